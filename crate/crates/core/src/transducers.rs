//! Finite-state transducers and the rational transductions built from them.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::alphabet::{Alphabet, Letter, Word};
use crate::automata::Nfa;
use crate::error::{Error, Result};
use crate::text;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TEdge {
    pub from: usize,
    pub input: Word,
    pub output: Word,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transducer {
    input: Alphabet,
    output: Alphabet,
    num_states: usize,
    initial: usize,
    finals: Vec<bool>,
    edges: Vec<TEdge>,
}

impl Transducer {
    pub fn new(input: Alphabet, output: Alphabet, num_states: usize, initial: usize) -> Self {
        let n = num_states.max(1);
        assert!(initial < n);
        Transducer {
            input,
            output,
            num_states: n,
            initial,
            finals: vec![false; n],
            edges: Vec::new(),
        }
    }

    pub fn add_state(&mut self) -> usize {
        self.num_states += 1;
        self.finals.push(false);
        self.num_states - 1
    }

    pub fn add_edge(&mut self, from: usize, input: Word, output: Word, to: usize) {
        debug_assert!(from < self.num_states && to < self.num_states);
        debug_assert!(input.iter().all(|&l| l < self.input.len()));
        debug_assert!(output.iter().all(|&l| l < self.output.len()));
        self.edges.push(TEdge {
            from,
            input,
            output,
            to,
        });
    }

    pub fn set_final(&mut self, s: usize, fin: bool) {
        self.finals[s] = fin;
    }

    pub fn input_alphabet(&self) -> &Alphabet {
        &self.input
    }

    pub fn output_alphabet(&self) -> &Alphabet {
        &self.output
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

    pub fn edges(&self) -> &[TEdge] {
        &self.edges
    }

    /// `{(w, w) : w ∈ X*}`.
    pub fn identity(x: &Alphabet) -> Self {
        let mut t = Transducer::new(x.clone(), x.clone(), 1, 0);
        t.set_final(0, true);
        for a in x.letters() {
            t.add_edge(0, vec![a], vec![a], 0);
        }
        t
    }

    /// `L ↦ ↓L`: every letter is either copied or dropped.
    pub fn subword(x: &Alphabet) -> Self {
        let mut t = Transducer::identity(x);
        for a in x.letters() {
            t.add_edge(0, vec![a], vec![], 0);
        }
        t
    }

    /// `L ↦ L ∩ L(r)`.
    pub fn regular_intersection(r: &Nfa) -> Self {
        let r = r.normalize();
        let x = r.alphabet().clone();
        let mut t = Transducer::new(x.clone(), x, r.num_states(), r.initial());
        for s in r.finals() {
            t.set_final(s, true);
        }
        for e in r.edges() {
            t.add_edge(e.from, e.label.clone(), e.label.clone(), e.to);
        }
        t
    }

    /// `X* × {a}*`, with `a` the only letter of the output alphabet.
    pub fn projection(x: &Alphabet, a: &str) -> Result<Self> {
        let out = Alphabet::new([a])?;
        let mut t = Transducer::new(x.clone(), out, 1, 0);
        t.set_final(0, true);
        for l in x.letters() {
            t.add_edge(0, vec![l], vec![], 0);
        }
        t.add_edge(0, vec![], vec![0], 0);
        Ok(t)
    }

    /// `{(w₀u₁^{x₁}w₁⋯uₙ^{xₙ}wₙ, a₁^{x₁}⋯aₙ^{xₙ}) : xᵢ ≥ 0}` where `aᵢ` is
    /// the i-th letter of `out`.
    pub fn block_counting(x: &Alphabet, w: &[Word], u: &[Word], out: &Alphabet) -> Result<Self> {
        let n = u.len();
        if w.len() != n + 1 || out.len() != n {
            return Err(Error::ArityMismatch(format!(
                "{} words, {} blocks and {} output letters",
                w.len(),
                n,
                out.len()
            )));
        }
        if u.iter().any(|b| b.is_empty()) {
            return Err(Error::ArityMismatch("block words must be nonempty".into()));
        }
        // states: 0 = start, 1..=n hubs, n+1 = final
        let mut t = Transducer::new(x.clone(), out.clone(), n + 2, 0);
        t.set_final(n + 1, true);
        for i in 0..=n {
            t.add_edge(i, w[i].clone(), vec![], i + 1);
        }
        for i in 0..n {
            t.add_edge(i + 1, u[i].clone(), vec![i], i + 1);
        }
        Ok(t)
    }

    /// Equivalent transducer whose edges read at most one letter, and whose
    /// edges with an output read nothing.  A single final state is
    /// reached by ε/ε edges.
    pub fn normalize(&self) -> Transducer {
        let mut out = Transducer::new(
            self.input.clone(),
            self.output.clone(),
            self.num_states,
            self.initial,
        );
        for e in &self.edges {
            let steps: Vec<(Word, Word)> = e
                .input
                .iter()
                .map(|&a| (vec![a], vec![]))
                .chain(e.output.iter().map(|&b| (vec![], vec![b])))
                .collect();
            if steps.is_empty() {
                out.add_edge(e.from, vec![], vec![], e.to);
                continue;
            }
            let mut cur = e.from;
            for (i, (inp, outp)) in steps.iter().enumerate() {
                let next = if i + 1 == steps.len() {
                    e.to
                } else {
                    out.add_state()
                };
                out.add_edge(cur, inp.clone(), outp.clone(), next);
                cur = next;
            }
        }
        let fin = out.add_state();
        out.set_final(fin, true);
        for s in self.finals() {
            out.add_edge(s, vec![], vec![], fin);
        }
        out
    }

    pub fn is_normalized(&self) -> bool {
        self.finals().count() == 1
            && self.edges.iter().all(|e| {
                e.input.len() <= 1
                    && e.output.len() <= 1
                    && (e.input.is_empty() || e.output.is_empty())
            })
    }

    /// Every edge reads and writes at most one letter.
    pub(crate) fn split_steps(&self) -> Transducer {
        self.split(true)
    }

    /// Every edge reads at most one letter; outputs stay words.
    pub(crate) fn split_input(&self) -> Transducer {
        self.split(false)
    }

    fn split(&self, outputs_too: bool) -> Transducer {
        let mut out = self.clone();
        out.edges.clear();
        for e in &self.edges {
            let k_in = e.input.len();
            let k_out = if outputs_too { e.output.len() } else { 1 };
            let len = k_in.max(k_out).max(1);
            if len == 1 {
                out.edges.push(e.clone());
                continue;
            }
            let mut cur = e.from;
            for i in 0..len {
                let next = if i + 1 == len { e.to } else { out.add_state() };
                let inp = e.input.get(i).map(|&a| vec![a]).unwrap_or_default();
                let outp = if outputs_too {
                    e.output.get(i).map(|&a| vec![a]).unwrap_or_default()
                } else if i + 1 == len {
                    e.output.clone()
                } else {
                    Vec::new()
                };
                out.add_edge(cur, inp, outp, next);
                cur = next;
            }
        }
        out
    }

    /// `T(L(m))` by the product of the transducer with the automaton.
    pub fn apply_to_nfa(&self, m: &Nfa) -> Result<Nfa> {
        self.input.ensure_eq(m.alphabet())?;
        let t = self.split_input();
        let m = m.normalize();
        let adj = m.adjacency();
        let mut t_out: Vec<Vec<&TEdge>> = vec![Vec::new(); t.num_states];
        for e in &t.edges {
            t_out[e.from].push(e);
        }
        let mut result = Nfa::new(self.output.clone(), 1, 0);
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
        index.insert((t.initial, m.initial()), 0);
        queue.push_back((t.initial, m.initial()));
        let mut intern =
            |p: (usize, usize), r: &mut Nfa, q: &mut VecDeque<(usize, usize)>| -> usize {
                *index.entry(p).or_insert_with(|| {
                    q.push_back(p);
                    r.add_state()
                })
            };
        while let Some((p, q)) = queue.pop_front() {
            let id = intern((p, q), &mut result, &mut queue);
            if t.finals[p] && m.is_final(q) {
                result.set_final(id, true);
            }
            for &q2 in &adj.eps[q] {
                let to = intern((p, q2), &mut result, &mut queue);
                result.add_edge(id, vec![], to);
            }
            for e in &t_out[p] {
                match e.input.as_slice() {
                    [] => {
                        let to = intern((e.to, q), &mut result, &mut queue);
                        result.add_edge(id, e.output.clone(), to);
                    }
                    [a] => {
                        for &(b, q2) in &adj.letters[q] {
                            if b == *a {
                                let to = intern((e.to, q2), &mut result, &mut queue);
                                result.add_edge(id, e.output.clone(), to);
                            }
                        }
                    }
                    _ => unreachable!(),
                }
            }
        }
        Ok(result.trim())
    }

    /// Image of a single word.
    pub fn apply_to_word(&self, w: &[Letter]) -> Result<Nfa> {
        self.apply_to_nfa(&Nfa::from_word(self.input.clone(), w))
    }

    /// The transducer realizing `other ∘ self` (apply `self` first).
    pub fn compose(&self, other: &Transducer) -> Result<Transducer> {
        self.output.ensure_eq(&other.input)?;
        let t1 = self.split_steps();
        let t2 = other.split_input();
        let mut out1: Vec<Vec<&TEdge>> = vec![Vec::new(); t1.num_states];
        for e in &t1.edges {
            out1[e.from].push(e);
        }
        let mut out2: Vec<Vec<&TEdge>> = vec![Vec::new(); t2.num_states];
        for e in &t2.edges {
            out2[e.from].push(e);
        }
        let mut result = Transducer::new(self.input.clone(), other.output.clone(), 1, 0);
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
        index.insert((t1.initial, t2.initial), 0);
        queue.push_back((t1.initial, t2.initial));
        let mut intern =
            |p: (usize, usize), r: &mut Transducer, q: &mut VecDeque<(usize, usize)>| -> usize {
                *index.entry(p).or_insert_with(|| {
                    q.push_back(p);
                    r.add_state()
                })
            };
        while let Some((p, q)) = queue.pop_front() {
            let id = intern((p, q), &mut result, &mut queue);
            if t1.finals[p] && t2.finals[q] {
                result.set_final(id, true);
            }
            for e2 in &out2[q] {
                if e2.input.is_empty() {
                    let to = intern((p, e2.to), &mut result, &mut queue);
                    result.add_edge(id, vec![], e2.output.clone(), to);
                }
            }
            for e1 in &out1[p] {
                match e1.output.as_slice() {
                    [] => {
                        let to = intern((e1.to, q), &mut result, &mut queue);
                        result.add_edge(id, e1.input.clone(), vec![], to);
                    }
                    [b] => {
                        for e2 in &out2[q] {
                            if e2.input.as_slice() == [*b] {
                                let to = intern((e1.to, e2.to), &mut result, &mut queue);
                                result.add_edge(id, e1.input.clone(), e2.output.clone(), to);
                            }
                        }
                    }
                    _ => unreachable!(),
                }
            }
        }
        Ok(result.trim())
    }

    /// Drops states that are unreachable or cannot reach a final state.
    pub fn trim(&self) -> Transducer {
        let n = self.num_states;
        let mut fwd = vec![Vec::new(); n];
        let mut bwd = vec![Vec::new(); n];
        for e in &self.edges {
            fwd[e.from].push(e.to);
            bwd[e.to].push(e.from);
        }
        let reach = |adj: &Vec<Vec<usize>>, seeds: Vec<usize>| {
            let mut seen = vec![false; n];
            let mut stack = seeds;
            for &s in &stack {
                seen[s] = true;
            }
            while let Some(s) = stack.pop() {
                for &t in &adj[s] {
                    if !seen[t] {
                        seen[t] = true;
                        stack.push(t);
                    }
                }
            }
            seen
        };
        let r = reach(&fwd, vec![self.initial]);
        let c = reach(&bwd, self.finals().collect());
        let mut map = vec![usize::MAX; n];
        let mut count = 0;
        for s in 0..n {
            if s == self.initial || (r[s] && c[s]) {
                map[s] = count;
                count += 1;
            }
        }
        let mut out = Transducer::new(
            self.input.clone(),
            self.output.clone(),
            count,
            map[self.initial],
        );
        for s in 0..n {
            if map[s] != usize::MAX && self.finals[s] && c[s] {
                out.set_final(map[s], true);
            }
        }
        let mut edges = BTreeSet::new();
        for e in &self.edges {
            if r[e.from] && c[e.to] && map[e.from] != usize::MAX && map[e.to] != usize::MAX {
                edges.insert(TEdge {
                    from: map[e.from],
                    input: e.input.clone(),
                    output: e.output.clone(),
                    to: map[e.to],
                });
            }
        }
        out.edges = edges.into_iter().collect();
        out
    }

    /// Parses the transducer text format: `input:` and `output:` alphabets
    /// (or one shared `alphabet:`), `state:` lines as for automata and
    /// `edge: p in out q`.
    pub fn parse(src: &str) -> Result<Transducer> {
        let mut input: Option<Alphabet> = None;
        let mut output: Option<Alphabet> = None;
        let mut names: Vec<String> = Vec::new();
        let mut initial = None;
        let mut finals = Vec::new();
        let mut raw = Vec::new();
        for (no, line) in text::lines(src) {
            let (key, rest) = text::declaration(line)
                .ok_or_else(|| Error::parse(no, format!("expected `key: value`, found `{line}`")))?;
            let alpha = || {
                Alphabet::new(rest.split_whitespace()).map_err(|e| Error::parse(no, e.to_string()))
            };
            match key {
                "alphabet" => {
                    input = Some(alpha()?);
                    output = Some(alpha()?);
                }
                "input" => input = Some(alpha()?),
                "output" => output = Some(alpha()?),
                "state" => {
                    let mut toks = rest.split_whitespace();
                    let name = toks
                        .next()
                        .ok_or_else(|| Error::parse(no, "state without a name"))?;
                    if names.iter().any(|n| n == name) {
                        return Err(Error::parse(no, format!("state `{name}` declared twice")));
                    }
                    names.push(name.to_string());
                    for flag in toks {
                        match flag {
                            "initial" => {
                                if initial.replace(names.len() - 1).is_some() {
                                    return Err(Error::parse(no, "more than one initial state"));
                                }
                            }
                            "final" => finals.push(names.len() - 1),
                            other => {
                                return Err(Error::parse(no, format!("unknown state flag `{other}`")))
                            }
                        }
                    }
                }
                "edge" => {
                    let t = text::expect_tokens(no, rest, 4, "edge")?;
                    raw.push((no, t[0].to_string(), t[1].to_string(), t[2].to_string(), t[3].to_string()));
                }
                other => return Err(Error::parse(no, format!("unknown declaration `{other}`"))),
            }
        }
        let input = input.ok_or_else(|| Error::parse(0, "missing `input:` alphabet"))?;
        let output = output.ok_or_else(|| Error::parse(0, "missing `output:` alphabet"))?;
        let initial = initial.ok_or_else(|| Error::parse(0, "no initial state"))?;
        let mut t = Transducer::new(input, output, names.len(), initial);
        for f in finals {
            t.set_final(f, true);
        }
        let lookup = |no: usize, s: &str| {
            names
                .iter()
                .position(|n| n == s)
                .ok_or_else(|| Error::parse(no, format!("undeclared state `{s}`")))
        };
        for (no, p, i, o, q) in raw {
            let from = lookup(no, &p)?;
            let to = lookup(no, &q)?;
            let i = t.input.parse_label(&i).map_err(|e| Error::parse(no, e.to_string()))?;
            let o = t.output.parse_label(&o).map_err(|e| Error::parse(no, e.to_string()))?;
            t.add_edge(from, i, o, to);
        }
        Ok(t)
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph transducer {\n  rankdir=LR;\n  __start [shape=point];\n");
        for q in 0..self.num_states {
            let shape = if self.finals[q] { "doublecircle" } else { "circle" };
            s.push_str(&format!("  q{q} [shape={shape}];\n"));
        }
        s.push_str(&format!("  __start -> q{};\n", self.initial));
        let mut edges = self.edges.clone();
        edges.sort();
        edges.dedup();
        for e in edges {
            s.push_str(&format!(
                "  q{} -> q{} [label=\"{}/{}\"];\n",
                e.from,
                e.to,
                self.input.format_label(&e.input),
                self.output.format_label(&e.output)
            ));
        }
        s.push_str("}\n");
        s
    }
}

impl fmt::Display for Transducer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "input: {}", self.input)?;
        writeln!(f, "output: {}", self.output)?;
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
                "edge: q{} {} {} q{}",
                e.from,
                self.input.format_label(&e.input),
                self.output.format_label(&e.output),
                e.to
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(x: &Alphabet, ws: &[&str]) -> BTreeSet<Word> {
        ws.iter().map(|w| x.parse_word(w).unwrap()).collect()
    }

    fn ab() -> Alphabet {
        Alphabet::of("a b")
    }

    #[test]
    fn normalize_splits_edges() {
        let x = Alphabet::of("a b c");
        let mut t = Transducer::new(x.clone(), x.clone(), 2, 0);
        t.add_edge(0, vec![0, 1], vec![2], 1);
        t.set_final(1, true);
        let n = t.normalize();
        assert!(n.is_normalized());
        let img = n.apply_to_word(&[0, 1]).unwrap();
        assert_eq!(img.enumerate(3), words(&x, &["c"]));
        assert!(n.apply_to_word(&[0]).unwrap().is_empty());
    }

    #[test]
    fn normalized_identity_keeps_language() {
        let a = Alphabet::of("a");
        let t = Transducer::identity(&a).normalize();
        assert!(t.is_normalized());
        let img = t.apply_to_nfa(&Nfa::universal(a.clone())).unwrap();
        assert_eq!(img.enumerate(4), Nfa::universal(a).enumerate(4));
    }

    #[test]
    fn subword_image() {
        let m = Nfa::from_word(ab(), &[0, 1]);
        let img = Transducer::subword(&ab()).apply_to_nfa(&m).unwrap();
        assert_eq!(img.enumerate(3), words(&ab(), &["_", "a", "b", "ab"]));
        assert!(Transducer::subword(&ab())
            .apply_to_nfa(&Nfa::empty(ab()))
            .unwrap()
            .is_empty());
        let abstar =
            Nfa::parse("alphabet: a b\nstate: p initial final\nstate: q\nedge: p a q\nedge: q b p\n")
                .unwrap();
        let img = Transducer::subword(&ab()).apply_to_nfa(&abstar).unwrap();
        assert!(img.equivalent(&abstar.downward_saturate()).unwrap());
    }

    #[test]
    fn projection_images() {
        let t = Transducer::projection(&ab(), "c").unwrap();
        let c = t.output_alphabet().clone();
        assert!(t.apply_to_nfa(&Nfa::empty(ab())).unwrap().is_empty());
        let eps = t.apply_to_nfa(&Nfa::epsilon(ab())).unwrap();
        assert!(eps.equivalent(&Nfa::universal(c.clone())).unwrap());
        let img = t.apply_to_nfa(&Nfa::from_word(ab(), &[0, 1])).unwrap();
        assert_eq!(img.enumerate(3), Nfa::universal(c).enumerate(3));
    }

    #[test]
    fn intersection_transduction() {
        let u = Nfa::universal(ab());
        let astar_bstar = Nfa::bounded(ab());
        let id = Transducer::regular_intersection(&u);
        let m = Nfa::from_words(ab(), &[vec![1, 0], vec![0]]);
        assert!(id.apply_to_nfa(&m).unwrap().equivalent(&m).unwrap());
        let none = Transducer::regular_intersection(&Nfa::empty(ab()));
        assert!(none.apply_to_nfa(&u).unwrap().is_empty());
        let t = Transducer::regular_intersection(&astar_bstar);
        assert!(t.apply_to_nfa(&u).unwrap().equivalent(&astar_bstar).unwrap());
    }

    #[test]
    fn block_counting_cases() {
        let x = ab();
        let c = Alphabet::of("c");
        let t = Transducer::block_counting(&x, &[vec![], vec![]], &[vec![0]], &c).unwrap();
        assert_eq!(t.apply_to_word(&[0, 0, 0]).unwrap().enumerate(5), words(&c, &["ccc"]));

        let gate = Transducer::block_counting(&x, &[vec![0, 1]], &[], &Alphabet::empty()).unwrap();
        assert_eq!(gate.apply_to_word(&[0, 1]).unwrap().enumerate(2), BTreeSet::from([vec![]]));
        assert!(gate.apply_to_word(&[1]).unwrap().is_empty());

        // ababb = (ab)(ab)(b) is the only factorization into (ab)*b*
        let cd = Alphabet::of("c d");
        let t2 = Transducer::block_counting(&x, &[vec![], vec![], vec![]], &[vec![0, 1], vec![1]], &cd)
            .unwrap();
        let img = t2.apply_to_word(&[0, 1, 0, 1, 1]).unwrap();
        assert_eq!(img.enumerate(5), words(&cd, &["ccd"]));

        assert!(matches!(
            Transducer::block_counting(&x, &[vec![]], &[vec![0]], &c),
            Err(Error::ArityMismatch(_))
        ));
    }

    #[test]
    fn composition() {
        let x = ab();
        let sub = Transducer::subword(&x);
        let twice = sub.compose(&sub).unwrap();
        let m = Nfa::from_words(x.clone(), &[vec![0, 1, 1], vec![1, 0]]);
        let a = twice.apply_to_nfa(&m).unwrap();
        let b = sub.apply_to_nfa(&m).unwrap();
        assert!(a.equivalent(&b).unwrap());

        let id = Transducer::identity(&x);
        let proj = Transducer::projection(&x, "a").unwrap();
        let via = id.compose(&proj).unwrap().apply_to_nfa(&m).unwrap();
        assert!(via.equivalent(&proj.apply_to_nfa(&m).unwrap()).unwrap());

        let sp = sub.compose(&proj).unwrap().apply_to_nfa(&m).unwrap();
        assert!(sp.equivalent(&proj.apply_to_nfa(&m).unwrap()).unwrap());

        assert!(matches!(
            proj.compose(&sub),
            Err(Error::AlphabetMismatch { .. })
        ));
    }

    #[test]
    fn text_roundtrip() {
        let src = "input: a b\noutput: c\nstate: p initial final\nedge: p a,b c p\nedge: p _ c p\n";
        let t = Transducer::parse(src).unwrap();
        let again = Transducer::parse(&t.to_string()).unwrap();
        assert_eq!(t.to_string(), again.to_string());
        assert!(t.to_dot().contains("a,b/c"));
        assert!(Transducer::parse("alphabet: a\nstate: p initial\nedge: p a a q\n").is_err());
    }
}
