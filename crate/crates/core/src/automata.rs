//! Nondeterministic finite automata with word-labelled edges.
//!
//! Most operations first bring the automaton into the normalized shape where
//! every edge carries a single letter or ε; [`Nfa::normalize`] is cheap and
//! idempotent, so callers never need to care about the input shape.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::alphabet::{Alphabet, Letter, Word};
use crate::error::{Error, Result};
use crate::text;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub from: usize,
    pub label: Word,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    alphabet: Alphabet,
    num_states: usize,
    initial: usize,
    finals: Vec<bool>,
    edges: Vec<Edge>,
}

/// Adjacency of a normalized automaton.
pub(crate) struct Adjacency {
    pub eps: Vec<Vec<usize>>,
    pub letters: Vec<Vec<(Letter, usize)>>,
}

impl Adjacency {
    pub fn closure(&self, seeds: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        let mut stack: Vec<usize> = Vec::new();
        for s in seeds {
            if seen.insert(s) {
                stack.push(s);
            }
        }
        while let Some(s) = stack.pop() {
            for &t in &self.eps[s] {
                if seen.insert(t) {
                    stack.push(t);
                }
            }
        }
        seen
    }

    pub fn step(&self, from: &BTreeSet<usize>, a: Letter) -> BTreeSet<usize> {
        let direct = from
            .iter()
            .flat_map(|&s| self.letters[s].iter())
            .filter(|&&(l, _)| l == a)
            .map(|&(_, t)| t);
        self.closure(direct)
    }
}

/// Complete deterministic automaton produced by the subset construction.
#[derive(Clone, Debug)]
pub(crate) struct Dfa {
    pub delta: Vec<Vec<usize>>,
    pub finals: Vec<bool>,
}

impl Nfa {
    /// Automaton with `num_states` states, no edges and no final states.
    pub fn new(alphabet: Alphabet, num_states: usize, initial: usize) -> Self {
        assert!(initial < num_states.max(1));
        Nfa {
            alphabet,
            num_states: num_states.max(1),
            initial,
            finals: vec![false; num_states.max(1)],
            edges: Vec::new(),
        }
    }

    pub fn add_state(&mut self) -> usize {
        self.num_states += 1;
        self.finals.push(false);
        self.num_states - 1
    }

    pub fn add_edge(&mut self, from: usize, label: Word, to: usize) {
        debug_assert!(from < self.num_states && to < self.num_states);
        debug_assert!(label.iter().all(|&l| l < self.alphabet.len()));
        self.edges.push(Edge { from, label, to });
    }

    pub fn set_final(&mut self, s: usize, fin: bool) {
        self.finals[s] = fin;
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_final(&self, s: usize) -> bool {
        self.finals[s]
    }

    pub fn finals(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_states).filter(|&s| self.finals[s])
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// The empty language.
    pub fn empty(alphabet: Alphabet) -> Self {
        Nfa::new(alphabet, 1, 0)
    }

    /// `{ε}`.
    pub fn epsilon(alphabet: Alphabet) -> Self {
        let mut m = Nfa::new(alphabet, 1, 0);
        m.set_final(0, true);
        m
    }

    /// `X*`.
    pub fn universal(alphabet: Alphabet) -> Self {
        let mut m = Nfa::epsilon(alphabet);
        for a in m.alphabet.letters() {
            m.add_edge(0, vec![a], 0);
        }
        m
    }

    /// `{w}`.
    pub fn from_word(alphabet: Alphabet, w: &[Letter]) -> Self {
        let mut m = Nfa::new(alphabet, 2, 0);
        m.add_edge(0, w.to_vec(), 1);
        m.set_final(1, true);
        m
    }

    /// Finite language given by a list of words.
    pub fn from_words<'a>(alphabet: Alphabet, words: impl IntoIterator<Item = &'a Word>) -> Self {
        let mut m = Nfa::new(alphabet, 2, 0);
        m.set_final(1, true);
        for w in words {
            m.add_edge(0, w.clone(), 1);
        }
        m
    }

    /// `a₁*a₂*⋯aₙ*` in the alphabet's declaration order.
    pub fn bounded(alphabet: Alphabet) -> Self {
        let n = alphabet.len();
        let mut m = Nfa::new(alphabet, n + 1, 0);
        for i in 0..n {
            m.add_edge(i, vec![i], i);
            m.add_edge(i, vec![], i + 1);
        }
        m.set_final(n, true);
        m
    }

    pub fn is_normalized(&self) -> bool {
        self.edges.iter().all(|e| e.label.len() <= 1)
    }

    /// Splits word labels into single-letter steps through fresh states.
    pub fn normalize(&self) -> Nfa {
        if self.is_normalized() {
            return self.clone();
        }
        let mut out = Nfa {
            alphabet: self.alphabet.clone(),
            num_states: self.num_states,
            initial: self.initial,
            finals: self.finals.clone(),
            edges: Vec::new(),
        };
        for e in &self.edges {
            if e.label.len() <= 1 {
                out.edges.push(e.clone());
                continue;
            }
            let mut cur = e.from;
            for (i, &a) in e.label.iter().enumerate() {
                let next = if i + 1 == e.label.len() {
                    e.to
                } else {
                    out.add_state()
                };
                out.add_edge(cur, vec![a], next);
                cur = next;
            }
        }
        out
    }

    pub(crate) fn adjacency(&self) -> Adjacency {
        debug_assert!(self.is_normalized());
        let mut eps = vec![Vec::new(); self.num_states];
        let mut letters = vec![Vec::new(); self.num_states];
        for e in &self.edges {
            match e.label.as_slice() {
                [] => eps[e.from].push(e.to),
                [a] => letters[e.from].push((*a, e.to)),
                _ => unreachable!("adjacency of a non-normalized automaton"),
            }
        }
        Adjacency { eps, letters }
    }

    pub fn accepts(&self, w: &[Letter]) -> Result<bool> {
        if let Some(&bad) = w.iter().find(|&&l| l >= self.alphabet.len()) {
            return Err(Error::UnknownLetter(format!("#{bad}")));
        }
        let m = self.normalize();
        let adj = m.adjacency();
        let mut cur = adj.closure([m.initial]);
        for &a in w {
            cur = adj.step(&cur, a);
            if cur.is_empty() {
                return Ok(false);
            }
        }
        Ok(cur.iter().any(|&s| m.finals[s]))
    }

    /// Membership for a word given by letter names.
    pub fn accepts_names<S: AsRef<str>>(&self, w: &[S]) -> Result<bool> {
        let word = w
            .iter()
            .map(|t| self.alphabet.letter(t.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        self.accepts(&word)
    }

    fn reachable_from_initial(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); self.num_states];
        for e in &self.edges {
            out[e.from].push(e.to);
        }
        seen[self.initial] = true;
        let mut stack = vec![self.initial];
        while let Some(s) = stack.pop() {
            for &t in &out[s] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    fn coreachable(&self) -> Vec<bool> {
        let mut seen = self.finals.clone();
        let mut inc: Vec<Vec<usize>> = vec![Vec::new(); self.num_states];
        for e in &self.edges {
            inc[e.to].push(e.from);
        }
        let mut stack: Vec<usize> = self.finals().collect();
        while let Some(s) = stack.pop() {
            for &t in &inc[s] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    pub fn is_empty(&self) -> bool {
        let r = self.reachable_from_initial();
        !(0..self.num_states).any(|s| r[s] && self.finals[s])
    }

    /// Removes states that are unreachable or cannot reach a final state.
    pub fn trim(&self) -> Nfa {
        let r = self.reachable_from_initial();
        let c = self.coreachable();
        let keep: Vec<bool> = (0..self.num_states)
            .map(|s| s == self.initial || (r[s] && c[s]))
            .collect();
        let mut map = vec![usize::MAX; self.num_states];
        let mut n = 0;
        for s in 0..self.num_states {
            if keep[s] {
                map[s] = n;
                n += 1;
            }
        }
        let mut out = Nfa::new(self.alphabet.clone(), n, map[self.initial]);
        for s in 0..self.num_states {
            if keep[s] && self.finals[s] && c[s] {
                out.set_final(map[s], true);
            }
        }
        let mut edges: BTreeSet<Edge> = BTreeSet::new();
        for e in &self.edges {
            if keep[e.from] && keep[e.to] && c[e.to] && r[e.from] {
                edges.insert(Edge {
                    from: map[e.from],
                    label: e.label.clone(),
                    to: map[e.to],
                });
            }
        }
        out.edges = edges.into_iter().collect();
        out
    }

    /// Synchronous product; `L(result) = L(self) ∩ L(other)`.
    pub fn product(&self, other: &Nfa) -> Result<Nfa> {
        self.alphabet.ensure_eq(&other.alphabet)?;
        let a = self.normalize();
        let b = other.normalize();
        let (adj_a, adj_b) = (a.adjacency(), b.adjacency());
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
        let start = (a.initial, b.initial);
        index.insert(start, 0);
        queue.push_back(start);
        let mut out = Nfa::new(self.alphabet.clone(), 1, 0);
        let mut intern = |p: (usize, usize),
                          out: &mut Nfa,
                          queue: &mut VecDeque<(usize, usize)>|
         -> usize {
            *index.entry(p).or_insert_with(|| {
                queue.push_back(p);
                out.add_state()
            })
        };
        while let Some((p, q)) = queue.pop_front() {
            let id = intern((p, q), &mut out, &mut queue);
            if a.finals[p] && b.finals[q] {
                out.set_final(id, true);
            }
            for &p2 in &adj_a.eps[p] {
                let t = intern((p2, q), &mut out, &mut queue);
                out.add_edge(id, vec![], t);
            }
            for &q2 in &adj_b.eps[q] {
                let t = intern((p, q2), &mut out, &mut queue);
                out.add_edge(id, vec![], t);
            }
            for &(x, p2) in &adj_a.letters[p] {
                for &(y, q2) in &adj_b.letters[q] {
                    if x == y {
                        let t = intern((p2, q2), &mut out, &mut queue);
                        out.add_edge(id, vec![x], t);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Subset construction over the automaton's alphabet (complete DFA,
    /// reachable subsets only; state 0 is initial).
    pub(crate) fn determinize(&self) -> Dfa {
        let m = self.normalize();
        let adj = m.adjacency();
        let k = m.alphabet.len();
        let mut index: HashMap<BTreeSet<usize>, usize> = HashMap::new();
        let mut sets: Vec<BTreeSet<usize>> = Vec::new();
        let start = adj.closure([m.initial]);
        index.insert(start.clone(), 0);
        sets.push(start);
        let mut delta: Vec<Vec<usize>> = Vec::new();
        let mut i = 0;
        while i < sets.len() {
            let mut row = Vec::with_capacity(k);
            for a in 0..k {
                let next = adj.step(&sets[i], a);
                let id = match index.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = sets.len();
                        index.insert(next.clone(), id);
                        sets.push(next);
                        id
                    }
                };
                row.push(id);
            }
            delta.push(row);
            i += 1;
        }
        let finals = sets
            .iter()
            .map(|s| s.iter().any(|&q| m.finals[q]))
            .collect();
        Dfa { delta, finals }
    }

    pub(crate) fn from_dfa(alphabet: Alphabet, dfa: &Dfa) -> Nfa {
        let mut out = Nfa::new(alphabet, dfa.delta.len(), 0);
        for (s, row) in dfa.delta.iter().enumerate() {
            for (a, &t) in row.iter().enumerate() {
                out.add_edge(s, vec![a], t);
            }
            out.set_final(s, dfa.finals[s]);
        }
        out
    }

    /// `X* ∖ L(self)` where `X` is the automaton's own alphabet.
    pub fn complement(&self) -> Nfa {
        let mut dfa = self.determinize();
        for f in dfa.finals.iter_mut() {
            *f = !*f;
        }
        Nfa::from_dfa(self.alphabet.clone(), &dfa)
    }

    /// Complement with respect to an explicitly given alphabet, which must be
    /// the automaton's alphabet.
    pub fn complement_over(&self, x: &Alphabet) -> Result<Nfa> {
        self.alphabet.ensure_eq(x)?;
        Ok(self.complement())
    }

    /// `L(self) ⊆ L(other)`, by a search over pairs of on-the-fly subset
    /// states for a word accepted by `self` only.
    pub fn is_subset_of(&self, other: &Nfa) -> Result<bool> {
        Ok(self.difference_witness(other)?.is_none())
    }

    /// A shortest word in `L(self) ∖ L(other)`, if any.
    pub fn difference_witness(&self, other: &Nfa) -> Result<Option<Word>> {
        self.alphabet.ensure_eq(&other.alphabet)?;
        let a = self.normalize();
        let b = other.normalize();
        let (adj_a, adj_b) = (a.adjacency(), b.adjacency());
        type Pair = (BTreeSet<usize>, BTreeSet<usize>);
        let start: Pair = (adj_a.closure([a.initial]), adj_b.closure([b.initial]));
        let mut parent: HashMap<Pair, Option<(Pair, Letter)>> = HashMap::new();
        parent.insert(start.clone(), None);
        let mut queue = VecDeque::from([start]);
        while let Some(cur) = queue.pop_front() {
            let acc_a = cur.0.iter().any(|&s| a.finals[s]);
            let acc_b = cur.1.iter().any(|&s| b.finals[s]);
            if acc_a && !acc_b {
                let mut w = Vec::new();
                let mut node = cur;
                while let Some(Some((prev, l))) = parent.get(&node).cloned() {
                    w.push(l);
                    node = prev;
                }
                w.reverse();
                return Ok(Some(w));
            }
            for x in self.alphabet.letters() {
                let na = adj_a.step(&cur.0, x);
                if na.is_empty() {
                    continue;
                }
                let nb = adj_b.step(&cur.1, x);
                let next = (na, nb);
                if !parent.contains_key(&next) {
                    parent.insert(next.clone(), Some((cur.clone(), x)));
                    queue.push_back(next);
                }
            }
        }
        Ok(None)
    }

    pub fn equivalent(&self, other: &Nfa) -> Result<bool> {
        Ok(self.is_subset_of(other)? && other.is_subset_of(self)?)
    }

    /// `↓L(self)`: every letter edge gets a parallel ε edge.
    pub fn downward_saturate(&self) -> Nfa {
        let mut m = self.normalize();
        let extra: Vec<Edge> = m
            .edges
            .iter()
            .filter(|e| e.label.len() == 1)
            .map(|e| Edge {
                from: e.from,
                label: Vec::new(),
                to: e.to,
            })
            .collect();
        let mut all: BTreeSet<Edge> = m.edges.drain(..).collect();
        all.extend(extra);
        m.edges = all.into_iter().collect();
        m
    }

    /// Every accepted word of length at most `max_len`.
    pub fn enumerate(&self, max_len: usize) -> BTreeSet<Word> {
        let m = self.normalize();
        let adj = m.adjacency();
        let dist = m.distance_to_final(&adj);
        let mut out = BTreeSet::new();
        let start = adj.closure([m.initial]);
        let mut word = Vec::new();
        m.enumerate_rec(&adj, &dist, &start, max_len, &mut word, &mut out);
        out
    }

    fn enumerate_rec(
        &self,
        adj: &Adjacency,
        dist: &[usize],
        cur: &BTreeSet<usize>,
        remaining: usize,
        word: &mut Word,
        out: &mut BTreeSet<Word>,
    ) {
        if cur.iter().any(|&s| self.finals[s]) {
            out.insert(word.clone());
        }
        if remaining == 0 {
            return;
        }
        for a in self.alphabet.letters() {
            let next = adj.step(cur, a);
            let best = next.iter().map(|&s| dist[s]).min().unwrap_or(usize::MAX);
            if best > remaining - 1 {
                continue;
            }
            word.push(a);
            self.enumerate_rec(adj, dist, &next, remaining - 1, word, out);
            word.pop();
        }
    }

    /// Minimal number of letters needed to reach a final state (0-1 BFS).
    fn distance_to_final(&self, adj: &Adjacency) -> Vec<usize> {
        let mut rev: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.num_states];
        for s in 0..self.num_states {
            for &t in &adj.eps[s] {
                rev[t].push((s, 0));
            }
            for &(_, t) in &adj.letters[s] {
                rev[t].push((s, 1));
            }
        }
        let mut dist = vec![usize::MAX; self.num_states];
        let mut dq = VecDeque::new();
        for s in self.finals() {
            dist[s] = 0;
            dq.push_back(s);
        }
        while let Some(s) = dq.pop_front() {
            for &(p, w) in &rev[s] {
                let d = dist[s] + w;
                if d < dist[p] {
                    dist[p] = d;
                    if w == 0 {
                        dq.push_front(p);
                    } else {
                        dq.push_back(p);
                    }
                }
            }
        }
        dist
    }

    /// Reversal; the result has a fresh initial state.
    pub fn reverse(&self) -> Nfa {
        let mut out = Nfa::new(self.alphabet.clone(), self.num_states + 1, self.num_states);
        for e in &self.edges {
            let mut l = e.label.clone();
            l.reverse();
            out.add_edge(e.to, l, e.from);
        }
        for f in self.finals() {
            out.add_edge(self.num_states, vec![], f);
        }
        out.set_final(self.initial, true);
        out
    }

    /// Union by a fresh initial state.
    pub fn union(&self, other: &Nfa) -> Result<Nfa> {
        self.alphabet.ensure_eq(&other.alphabet)?;
        let off = self.num_states;
        let mut out = self.clone();
        out.num_states += other.num_states;
        out.finals.extend(other.finals.iter().copied());
        for e in &other.edges {
            out.edges.push(Edge {
                from: e.from + off,
                label: e.label.clone(),
                to: e.to + off,
            });
        }
        let s = out.add_state();
        out.add_edge(s, vec![], self.initial);
        out.add_edge(s, vec![], other.initial + off);
        out.initial = s;
        Ok(out)
    }

    /// Same language, relabelled onto `target`, which must contain every
    /// letter of this automaton's alphabet under the same name.
    pub fn with_alphabet(&self, target: &Alphabet) -> Result<Nfa> {
        let map = self
            .alphabet
            .letters()
            .map(|l| target.letter(self.alphabet.name(l)))
            .collect::<Result<Vec<_>>>()?;
        let mut out = self.clone();
        out.alphabet = target.clone();
        for e in out.edges.iter_mut() {
            for l in e.label.iter_mut() {
                *l = map[*l];
            }
        }
        Ok(out)
    }

    /// Parses the automaton text format.
    ///
    /// ```text
    /// alphabet: a b
    /// state: q0 initial
    /// state: q1 final
    /// edge: q0 a q1
    /// edge: q1 _ q0      # '_' denotes ε
    /// ```
    pub fn parse(src: &str) -> Result<Nfa> {
        let mut alphabet: Option<Alphabet> = None;
        let mut names: Vec<String> = Vec::new();
        let mut initial: Option<usize> = None;
        let mut finals: Vec<usize> = Vec::new();
        let mut raw_edges: Vec<(usize, String, String, String)> = Vec::new();
        for (no, line) in text::lines(src) {
            let (key, rest) = text::declaration(line)
                .ok_or_else(|| Error::parse(no, format!("expected `key: value`, found `{line}`")))?;
            match key {
                "alphabet" => {
                    if alphabet.is_some() {
                        return Err(Error::parse(no, "alphabet declared twice"));
                    }
                    alphabet = Some(
                        Alphabet::new(rest.split_whitespace())
                            .map_err(|e| Error::parse(no, e.to_string()))?,
                    );
                }
                "state" => {
                    let mut toks = rest.split_whitespace();
                    let name = toks
                        .next()
                        .ok_or_else(|| Error::parse(no, "state without a name"))?;
                    if names.iter().any(|n| n == name) {
                        return Err(Error::parse(no, format!("state `{name}` declared twice")));
                    }
                    names.push(name.to_string());
                    let id = names.len() - 1;
                    for flag in toks {
                        match flag {
                            "initial" => {
                                if initial.replace(id).is_some() {
                                    return Err(Error::parse(no, "more than one initial state"));
                                }
                            }
                            "final" => finals.push(id),
                            other => {
                                return Err(Error::parse(no, format!("unknown state flag `{other}`")))
                            }
                        }
                    }
                }
                "edge" => {
                    let toks = text::expect_tokens(no, rest, 3, "edge")?;
                    raw_edges.push((no, toks[0].into(), toks[1].into(), toks[2].into()));
                }
                other => return Err(Error::parse(no, format!("unknown declaration `{other}`"))),
            }
        }
        let alphabet = alphabet.ok_or_else(|| Error::parse(0, "missing `alphabet:` declaration"))?;
        let initial = initial.ok_or_else(|| Error::parse(0, "no initial state"))?;
        let mut m = Nfa::new(alphabet, names.len(), initial);
        for f in finals {
            m.set_final(f, true);
        }
        let lookup = |no: usize, s: &str| {
            names
                .iter()
                .position(|n| n == s)
                .ok_or_else(|| Error::parse(no, format!("undeclared state `{s}`")))
        };
        for (no, p, label, q) in raw_edges {
            let from = lookup(no, &p)?;
            let to = lookup(no, &q)?;
            let w = m
                .alphabet
                .parse_label(&label)
                .map_err(|e| Error::parse(no, e.to_string()))?;
            m.add_edge(from, w, to);
        }
        Ok(m)
    }

    /// Graphviz rendering with sorted states and edges.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph nfa {\n  rankdir=LR;\n  __start [shape=point];\n");
        for q in 0..self.num_states {
            let shape = if self.finals[q] { "doublecircle" } else { "circle" };
            s.push_str(&format!("  q{q} [shape={shape}];\n"));
        }
        s.push_str(&format!("  __start -> q{};\n", self.initial));
        let mut edges = self.edges.clone();
        edges.sort();
        edges.dedup();
        for e in edges {
            let label = if e.label.is_empty() {
                "ε".to_string()
            } else {
                self.alphabet.format_label(&e.label)
            };
            s.push_str(&format!("  q{} -> q{} [label=\"{}\"];\n", e.from, e.to, label));
        }
        s.push_str("}\n");
        s
    }
}

impl fmt::Display for Nfa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "alphabet: {}", self.alphabet)?;
        for q in 0..self.num_states {
            let mut flags = String::new();
            if q == self.initial {
                flags.push_str(" initial");
            }
            if self.finals[q] {
                flags.push_str(" final");
            }
            writeln!(f, "state: q{q}{flags}")?;
        }
        let mut edges = self.edges.clone();
        edges.sort();
        edges.dedup();
        for e in edges {
            writeln!(
                f,
                "edge: q{} {} q{}",
                e.from,
                self.alphabet.format_label(&e.label),
                e.to
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::is_subword;

    fn ab() -> Alphabet {
        Alphabet::of("a b")
    }

    /// a*b
    fn astar_b() -> Nfa {
        Nfa::parse(
            "alphabet: a b\nstate: p initial\nstate: q final\nedge: p a p\nedge: p b q\n",
        )
        .unwrap()
    }

    fn abstar() -> Nfa {
        Nfa::parse("alphabet: a b\nstate: p initial final\nstate: q\nedge: p a q\nedge: q b p\n")
            .unwrap()
    }

    fn astar_bstar() -> Nfa {
        Nfa::parse(
            "alphabet: a b\nstate: p initial final\nstate: q final\nedge: p a p\nedge: p _ q\nedge: q b q\n",
        )
        .unwrap()
    }

    fn bstar_astar() -> Nfa {
        Nfa::parse(
            "alphabet: a b\nstate: p initial final\nstate: q final\nedge: p b p\nedge: p _ q\nedge: q a q\n",
        )
        .unwrap()
    }

    fn words(x: &Alphabet, ws: &[&str]) -> BTreeSet<Word> {
        ws.iter().map(|w| x.parse_word(w).unwrap()).collect()
    }

    #[test]
    fn normalize_splits_labels() {
        let m = Nfa::from_word(ab(), &[0, 1]);
        let n = m.normalize();
        assert!(n.is_normalized());
        assert_eq!(n.num_states(), 3);
        assert_eq!(n.enumerate(4), words(&ab(), &["ab"]));
        assert_eq!(m.enumerate(4), n.enumerate(4));
        let already = astar_b();
        assert_eq!(already.normalize(), already);
    }

    #[test]
    fn membership() {
        let m = astar_b();
        assert!(m.accepts_names(&["a", "a", "b"]).unwrap());
        assert!(!m.accepts_names(&["b", "a"]).unwrap());
        assert!(!Nfa::empty(ab()).accepts(&[]).unwrap());
        assert!(matches!(m.accepts(&[7]), Err(Error::UnknownLetter(_))));
        assert!(matches!(
            m.accepts_names(&["z"]),
            Err(Error::UnknownLetter(_))
        ));
    }

    #[test]
    fn emptiness() {
        assert!(Nfa::empty(ab()).is_empty());
        assert!(!Nfa::epsilon(ab()).is_empty());
        let ba_star = Nfa::parse(
            "alphabet: a b\nstate: p initial\nstate: q final\nedge: p b q\nedge: q a q\n",
        )
        .unwrap();
        // a*b and ba* share exactly the word b
        let common: BTreeSet<Word> = astar_b()
            .enumerate(5)
            .intersection(&ba_star.enumerate(5))
            .cloned()
            .collect();
        assert_eq!(common, words(&ab(), &["b"]));
        let meet = astar_b().product(&ba_star).unwrap();
        assert!(!meet.is_empty());
        assert_eq!(meet.enumerate(5), common);
        // a*b and ba⁺ are disjoint
        let ba_plus = Nfa::parse(
            "alphabet: a b\nstate: p initial\nstate: q\nstate: r final\nedge: p b q\nedge: q a r\nedge: r a r\n",
        )
        .unwrap();
        assert!(astar_b().enumerate(5).is_disjoint(&ba_plus.enumerate(5)));
        assert!(astar_b().product(&ba_plus).unwrap().is_empty());
    }

    #[test]
    fn product_intersects() {
        let p = astar_bstar().product(&bstar_astar()).unwrap();
        // oracle: a* ∪ b* up to length 5
        let expected: BTreeSet<Word> = astar_bstar()
            .enumerate(5)
            .intersection(&bstar_astar().enumerate(5))
            .cloned()
            .collect();
        assert_eq!(p.enumerate(5), expected);
        assert!(expected.iter().all(|w| w.iter().all(|&l| l == w[0])));
        let m = abstar();
        assert!(m.product(&Nfa::universal(ab())).unwrap().equivalent(&m).unwrap());
        assert!(m.product(&Nfa::empty(ab())).unwrap().is_empty());
        let other = Nfa::universal(Alphabet::of("a"));
        assert!(matches!(
            m.product(&other),
            Err(Error::AlphabetMismatch { .. })
        ));
    }

    #[test]
    fn complement_cases() {
        let a = Alphabet::of("a");
        assert!(Nfa::empty(a.clone())
            .complement()
            .equivalent(&Nfa::universal(a))
            .unwrap());
        let m = abstar();
        assert!(m.complement().complement().equivalent(&m).unwrap());
        let c = astar_bstar().complement();
        for w in Nfa::universal(ab()).enumerate(5) {
            let has_ba = w.windows(2).any(|p| p == [1, 0]);
            assert_eq!(c.accepts(&w).unwrap(), has_ba, "{w:?}");
        }
    }

    #[test]
    fn equivalence() {
        let m = astar_b();
        assert!(m.equivalent(&m.normalize()).unwrap());
        let astar = Nfa::parse("alphabet: a\nstate: p initial final\nedge: p a p\n").unwrap();
        let astar2 = Nfa::parse(
            "alphabet: a\nstate: p initial final\nstate: q final\nedge: p a p\nedge: p _ q\nedge: q a q\n",
        )
        .unwrap();
        assert!(astar.equivalent(&astar2).unwrap());
        assert!(!astar_bstar().equivalent(&abstar()).unwrap());
        let w = astar_bstar().difference_witness(&abstar()).unwrap().unwrap();
        assert!(astar_bstar().accepts(&w).unwrap() && !abstar().accepts(&w).unwrap());
    }

    #[test]
    fn saturation() {
        let m = Nfa::from_word(ab(), &[0, 1]).downward_saturate();
        assert_eq!(m.enumerate(3), words(&ab(), &["_", "a", "b", "ab"]));
        let twice = m.downward_saturate();
        assert!(twice.equivalent(&m).unwrap());
        assert!(abstar()
            .downward_saturate()
            .equivalent(&Nfa::universal(ab()))
            .unwrap());
    }

    #[test]
    fn enumeration() {
        assert_eq!(astar_b().enumerate(2), words(&ab(), &["b", "ab"]));
        assert!(Nfa::empty(ab()).enumerate(5).is_empty());
        assert_eq!(abstar().enumerate(4), words(&ab(), &["_", "ab", "abab"]));
    }

    #[test]
    fn bounded_language() {
        let b = Nfa::bounded(Alphabet::of("a b c"));
        let x = Alphabet::of("a b c");
        for w in Nfa::universal(x.clone()).enumerate(4) {
            let sorted = w.windows(2).all(|p| p[0] <= p[1]);
            assert_eq!(b.accepts(&w).unwrap(), sorted);
        }
        assert!(Nfa::bounded(Alphabet::empty()).accepts(&[]).unwrap());
    }

    #[test]
    fn parse_errors() {
        let err = Nfa::parse("alphabet: a\nstate: p initial\nedge: p a q\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, ref message, .. } if message.contains("`q`")));
        assert!(Nfa::parse("alphabet: a\nstate: p\n").is_err());
    }

    #[test]
    fn display_roundtrip() {
        let m = astar_bstar();
        let again = Nfa::parse(&m.to_string()).unwrap();
        assert!(again.equivalent(&m).unwrap());
        assert!(m.to_dot().starts_with("digraph"));
    }

    #[test]
    fn reverse_and_union() {
        let m = astar_b();
        let r = m.reverse();
        assert!(r.accepts_names(&["b", "a", "a"]).unwrap());
        assert!(!r.accepts_names(&["a", "b"]).unwrap());
        let u = m.union(&abstar()).unwrap();
        assert!(u.accepts_names(&["a", "b"]).unwrap());
        assert!(u.accepts_names(&["a", "a", "b"]).unwrap());
        assert!(u.accepts(&[]).unwrap());
    }

    #[test]
    fn saturation_matches_subword_definition() {
        let m = Nfa::from_words(ab(), &[vec![0, 1, 0], vec![1, 1]]);
        let sat = m.downward_saturate();
        let big = m.enumerate(6);
        for w in Nfa::universal(ab()).enumerate(4) {
            let expected = big.iter().any(|v| is_subword(&w, v));
            assert_eq!(sat.accepts(&w).unwrap(), expected);
        }
    }
}
