//! Context-free grammars: emptiness, transduction images (triple
//! construction), Parikh images and bounded enumeration.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::alphabet::{Alphabet, Letter, Word};
use crate::automata::Nfa;
use crate::error::{Error, Result};
use crate::semilinear::{parikh_word, SemilinearSet, System};
use crate::text;
use crate::transducers::Transducer;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sym {
    T(Letter),
    N(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Production {
    pub lhs: usize,
    pub rhs: Vec<Sym>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cfg {
    terminals: Alphabet,
    nonterminals: Vec<String>,
    start: usize,
    productions: Vec<Production>,
}

impl Cfg {
    /// Grammar with only the start symbol and no productions.
    pub fn new(terminals: Alphabet, start: &str) -> Self {
        Cfg {
            terminals,
            nonterminals: vec![start.to_string()],
            start: 0,
            productions: Vec::new(),
        }
    }

    /// Id of the named nonterminal, declaring it if needed.
    pub fn nonterminal(&mut self, name: &str) -> usize {
        match self.nonterminals.iter().position(|n| n == name) {
            Some(i) => i,
            None => {
                self.nonterminals.push(name.to_string());
                self.nonterminals.len() - 1
            }
        }
    }

    pub fn add_production(&mut self, lhs: usize, rhs: Vec<Sym>) {
        self.productions.push(Production { lhs, rhs });
    }

    /// Adds `lhs -> rhs` with the right-hand side written as tokens.
    pub fn add_rule(&mut self, lhs: &str, rhs: &[&str]) {
        let l = self.nonterminal(lhs);
        let r = self.symbols(rhs);
        self.add_production(l, r);
    }

    fn symbols(&mut self, toks: &[&str]) -> Vec<Sym> {
        toks.iter()
            .filter(|t| **t != "_")
            .map(|t| match self.terminals.index_of(t) {
                Some(a) => Sym::T(a),
                None => Sym::N(self.nonterminal(t)),
            })
            .collect()
    }

    pub fn terminals(&self) -> &Alphabet {
        &self.terminals
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn num_nonterminals(&self) -> usize {
        self.nonterminals.len()
    }

    pub fn nonterminal_name(&self, a: usize) -> &str {
        &self.nonterminals[a]
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    pub fn productive(&self) -> Vec<bool> {
        let mut prod = vec![false; self.nonterminals.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for p in &self.productions {
                if !prod[p.lhs]
                    && p.rhs.iter().all(|s| match s {
                        Sym::T(_) => true,
                        Sym::N(b) => prod[*b],
                    })
                {
                    prod[p.lhs] = true;
                    changed = true;
                }
            }
        }
        prod
    }

    pub fn is_empty(&self) -> bool {
        !self.productive()[self.start]
    }

    /// Length of a shortest word derivable from each nonterminal.
    pub fn shortest_yields(&self) -> Vec<Option<usize>> {
        let mut best: Vec<Option<usize>> = vec![None; self.nonterminals.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for p in &self.productions {
                let mut total = Some(0usize);
                for s in &p.rhs {
                    total = match (total, s) {
                        (Some(t), Sym::T(_)) => Some(t + 1),
                        (Some(t), Sym::N(b)) => best[*b].map(|l| t + l),
                        (None, _) => None,
                    };
                }
                if let Some(t) = total {
                    if best[p.lhs].map_or(true, |b| t < b) {
                        best[p.lhs] = Some(t);
                        changed = true;
                    }
                }
            }
        }
        best
    }

    /// Removes unproductive and unreachable nonterminals (the start symbol
    /// is always kept).
    pub fn trim(&self) -> Cfg {
        let prod = self.productive();
        let useful: Vec<&Production> = self
            .productions
            .iter()
            .filter(|p| {
                prod[p.lhs]
                    && p.rhs.iter().all(|s| match s {
                        Sym::N(b) => prod[*b],
                        _ => true,
                    })
            })
            .collect();
        let mut reach = vec![false; self.nonterminals.len()];
        reach[self.start] = true;
        let mut stack = vec![self.start];
        let mut by_lhs: Vec<Vec<&Production>> = vec![Vec::new(); self.nonterminals.len()];
        for p in &useful {
            by_lhs[p.lhs].push(p);
        }
        while let Some(a) = stack.pop() {
            for p in &by_lhs[a] {
                for s in &p.rhs {
                    if let Sym::N(b) = s {
                        if !reach[*b] {
                            reach[*b] = true;
                            stack.push(*b);
                        }
                    }
                }
            }
        }
        let mut map = vec![usize::MAX; self.nonterminals.len()];
        let mut out = Cfg::new(self.terminals.clone(), &self.nonterminals[self.start]);
        map[self.start] = 0;
        for a in 0..self.nonterminals.len() {
            if reach[a] && a != self.start {
                map[a] = out.nonterminals.len();
                out.nonterminals.push(self.nonterminals[a].clone());
            }
        }
        let mut seen = BTreeSet::new();
        for p in useful {
            if !reach[p.lhs] {
                continue;
            }
            let q = Production {
                lhs: map[p.lhs],
                rhs: p
                    .rhs
                    .iter()
                    .map(|s| match s {
                        Sym::N(b) => Sym::N(map[*b]),
                        t => *t,
                    })
                    .collect(),
            };
            if seen.insert(q.clone()) {
                out.productions.push(q);
            }
        }
        out
    }

    fn fresh_name(&self, stem: &str) -> String {
        let mut i = self.nonterminals.len();
        loop {
            let name = format!("{stem}{i}");
            if !self.nonterminals.contains(&name) && self.terminals.index_of(&name).is_none() {
                return name;
            }
            i += 1;
        }
    }

    /// Right-hand sides of length at most two.
    pub fn binarize(&self) -> Cfg {
        let mut out = Cfg {
            terminals: self.terminals.clone(),
            nonterminals: self.nonterminals.clone(),
            start: self.start,
            productions: Vec::new(),
        };
        for p in &self.productions {
            let mut lhs = p.lhs;
            let mut rhs = p.rhs.as_slice();
            while rhs.len() > 2 {
                let name = out.fresh_name("_B");
                let x = out.nonterminal(&name);
                out.add_production(lhs, vec![rhs[0], Sym::N(x)]);
                lhs = x;
                rhs = &rhs[1..];
            }
            out.add_production(lhs, rhs.to_vec());
        }
        out
    }

    /// Right-linear grammar of an automaton.
    pub fn from_nfa(m: &Nfa) -> Cfg {
        let m = m.normalize();
        let mut g = Cfg::new(m.alphabet().clone(), &format!("q{}", m.initial()));
        let ids: Vec<usize> = (0..m.num_states())
            .map(|q| g.nonterminal(&format!("q{q}")))
            .collect();
        for e in m.edges() {
            let mut rhs: Vec<Sym> = e.label.iter().map(|&a| Sym::T(a)).collect();
            rhs.push(Sym::N(ids[e.to]));
            g.add_production(ids[e.from], rhs);
        }
        for f in m.finals() {
            g.add_production(ids[f], vec![]);
        }
        g
    }

    /// Same grammar over a reordered or larger terminal alphabet; letters
    /// are matched by name.
    pub fn with_terminals(&self, target: &Alphabet) -> Result<Cfg> {
        let map = self
            .terminals
            .letters()
            .map(|l| target.letter(self.terminals.name(l)))
            .collect::<Result<Vec<_>>>()?;
        let mut out = self.clone();
        out.terminals = target.clone();
        for p in out.productions.iter_mut() {
            for s in p.rhs.iter_mut() {
                if let Sym::T(a) = s {
                    *a = map[*a];
                }
            }
        }
        Ok(out)
    }

    /// `{w ∈ L : |w| ≤ max_len}` by a least fixpoint over length-bounded
    /// yield sets; `budget` caps the number of stored words.
    pub fn enumerate(&self, max_len: usize, budget: usize) -> Result<BTreeSet<Word>> {
        let g = self.trim();
        if g.is_empty() {
            return Ok(BTreeSet::new());
        }
        let min = g.shortest_yields();
        let n = g.nonterminals.len();
        let mut yields: Vec<BTreeSet<Word>> = vec![BTreeSet::new(); n];
        let mut stored = 0usize;
        let mut changed = true;
        while changed {
            changed = false;
            for p in &g.productions {
                let fixed: usize = p
                    .rhs
                    .iter()
                    .map(|s| match s {
                        Sym::T(_) => 1,
                        Sym::N(b) => min[*b].unwrap_or(usize::MAX / 4),
                    })
                    .sum();
                if fixed > max_len {
                    continue;
                }
                let mut partial: BTreeSet<Word> = BTreeSet::from([Vec::new()]);
                for (i, s) in p.rhs.iter().enumerate() {
                    // room left for the remaining symbols' shortest yields
                    let rest: usize = p.rhs[i + 1..]
                        .iter()
                        .map(|s| match s {
                            Sym::T(_) => 1,
                            Sym::N(b) => min[*b].unwrap_or(0),
                        })
                        .sum();
                    let limit = max_len - rest.min(max_len);
                    let mut next = BTreeSet::new();
                    for w in &partial {
                        match s {
                            Sym::T(a) => {
                                if w.len() < limit {
                                    let mut v = w.clone();
                                    v.push(*a);
                                    next.insert(v);
                                }
                            }
                            Sym::N(b) => {
                                for y in &yields[*b] {
                                    if w.len() + y.len() <= limit {
                                        let mut v = w.clone();
                                        v.extend_from_slice(y);
                                        next.insert(v);
                                    }
                                }
                            }
                        }
                    }
                    partial = next;
                    if partial.is_empty() {
                        break;
                    }
                }
                for w in partial {
                    if yields[p.lhs].insert(w) {
                        changed = true;
                        stored += 1;
                        if stored > budget {
                            return Err(Error::BudgetExhausted(budget));
                        }
                    }
                }
            }
        }
        Ok(std::mem::take(&mut yields[g.start]))
    }

    /// Grammar for `T(L(self))` by the triple construction.
    pub fn apply_transduction(&self, t: &Transducer) -> Result<Cfg> {
        self.terminals.ensure_eq(t.input_alphabet())?;
        let t = t.split_input().trim();
        let g = self.trim().binarize();
        let q = t.num_states();
        // reach[p][r]: r reachable from p in the transducer graph
        let mut reach = vec![vec![false; q]; q];
        let mut succ = vec![Vec::new(); q];
        for e in t.edges() {
            succ[e.from].push(e.to);
        }
        for p in 0..q {
            let mut stack = vec![p];
            reach[p][p] = true;
            while let Some(s) = stack.pop() {
                for &r in &succ[s] {
                    if !reach[p][r] {
                        reach[p][r] = true;
                        stack.push(r);
                    }
                }
            }
        }
        let mut eps_out: Vec<Vec<(usize, Word)>> = vec![Vec::new(); q];
        let mut read_edges: Vec<Vec<(usize, Word, usize)>> = vec![Vec::new(); g.terminals.len()];
        for e in t.edges() {
            match e.input.as_slice() {
                [] => eps_out[e.from].push((e.to, e.output.clone())),
                [a] => read_edges[*a].push((e.from, e.output.clone(), e.to)),
                _ => unreachable!(),
            }
        }
        let mut by_lhs: Vec<Vec<&Production>> = vec![Vec::new(); g.nonterminals.len()];
        for p in &g.productions {
            by_lhs[p.lhs].push(p);
        }

        #[derive(Clone, Copy, PartialEq, Eq, Hash)]
        enum Key {
            Trip(usize, usize, usize),
            Read(usize, Letter, usize),
            Eps(usize, usize),
        }
        let out_alpha = t.output_alphabet().clone();
        let mut out = Cfg::new(out_alpha, "S'");
        let mut ids: HashMap<Key, usize> = HashMap::new();
        let mut work: VecDeque<(Key, usize)> = VecDeque::new();
        let names = &g.nonterminals;
        let talpha = g.terminals.clone();
        let mut id_of = |k: Key, out: &mut Cfg, work: &mut VecDeque<(Key, usize)>| -> usize {
            if let Some(&i) = ids.get(&k) {
                return i;
            }
            let name = match k {
                Key::Trip(p, a, r) => format!("<q{p},{},q{r}>", names[a]),
                Key::Read(p, a, r) => format!("<q{p}:{}:q{r}>", talpha.name(a)),
                Key::Eps(p, r) => format!("<q{p}:_:q{r}>"),
            };
            out.nonterminals.push(name);
            let i = out.nonterminals.len() - 1;
            ids.insert(k, i);
            work.push_back((k, i));
            i
        };
        let out_word = |w: &Word| w.iter().map(|&b| Sym::T(b)).collect::<Vec<_>>();
        for f in t.finals() {
            if reach[t.initial()][f] {
                let s = id_of(Key::Trip(t.initial(), g.start, f), &mut out, &mut work);
                out.add_production(0, vec![Sym::N(s)]);
            }
        }
        while let Some((k, lhs)) = work.pop_front() {
            match k {
                Key::Eps(p, r) => {
                    if p == r {
                        out.add_production(lhs, vec![]);
                    }
                    for (p2, w) in &eps_out[p] {
                        if reach[*p2][r] {
                            let rest = id_of(Key::Eps(*p2, r), &mut out, &mut work);
                            let mut rhs = out_word(w);
                            rhs.push(Sym::N(rest));
                            out.add_production(lhs, rhs);
                        }
                    }
                }
                Key::Read(p, a, r) => {
                    for (p1, w, q1) in &read_edges[a] {
                        if reach[p][*p1] && reach[*q1][r] {
                            let pre = id_of(Key::Eps(p, *p1), &mut out, &mut work);
                            let post = id_of(Key::Eps(*q1, r), &mut out, &mut work);
                            let mut rhs = vec![Sym::N(pre)];
                            rhs.extend(out_word(w));
                            rhs.push(Sym::N(post));
                            out.add_production(lhs, rhs);
                        }
                    }
                }
                Key::Trip(p, a, r) => {
                    for prod in &by_lhs[a] {
                        let sym_key = |s: &Sym, x: usize, y: usize| match s {
                            Sym::T(c) => Key::Read(x, *c, y),
                            Sym::N(b) => Key::Trip(x, *b, y),
                        };
                        match prod.rhs.as_slice() {
                            [] => {
                                let e = id_of(Key::Eps(p, r), &mut out, &mut work);
                                out.add_production(lhs, vec![Sym::N(e)]);
                            }
                            [s] => {
                                let e = id_of(sym_key(s, p, r), &mut out, &mut work);
                                out.add_production(lhs, vec![Sym::N(e)]);
                            }
                            [s1, s2] => {
                                for mid in 0..q {
                                    if reach[p][mid] && reach[mid][r] {
                                        let x = id_of(sym_key(s1, p, mid), &mut out, &mut work);
                                        let y = id_of(sym_key(s2, mid, r), &mut out, &mut work);
                                        out.add_production(lhs, vec![Sym::N(x), Sym::N(y)]);
                                    }
                                }
                            }
                            _ => unreachable!("binarized"),
                        }
                    }
                }
            }
        }
        Ok(out.trim())
    }

    /// `Ψ(L(self))`.
    pub fn parikh(&self) -> SemilinearSet {
        let g = self.trim();
        let dim = g.terminals.len();
        if g.is_empty() {
            return SemilinearSet::empty(dim);
        }
        let mut eqs = vec![Vec::new(); g.nonterminals.len()];
        for p in &g.productions {
            let letters: Vec<Letter> = p
                .rhs
                .iter()
                .filter_map(|s| match s {
                    Sym::T(a) => Some(*a),
                    _ => None,
                })
                .collect();
            let vars: Vec<usize> = p
                .rhs
                .iter()
                .filter_map(|s| match s {
                    Sym::N(b) => Some(*b),
                    _ => None,
                })
                .collect();
            eqs[p.lhs].push((parikh_word(dim, &letters), vars));
        }
        System { dim, eqs }.solve().swap_remove(g.start)
    }

    /// `{alph(w) : w ∈ L(self)}`.
    pub fn alph_sets(&self) -> BTreeSet<BTreeSet<Letter>> {
        let n = self.nonterminals.len();
        let mut sets: Vec<BTreeSet<BTreeSet<Letter>>> = vec![BTreeSet::new(); n];
        let mut changed = true;
        while changed {
            changed = false;
            for p in &self.productions {
                let mut acc: BTreeSet<BTreeSet<Letter>> = BTreeSet::from([BTreeSet::new()]);
                for s in &p.rhs {
                    acc = match s {
                        Sym::T(a) => acc
                            .into_iter()
                            .map(|mut x| {
                                x.insert(*a);
                                x
                            })
                            .collect(),
                        Sym::N(b) => acc
                            .iter()
                            .flat_map(|x| sets[*b].iter().map(move |y| x.union(y).copied().collect()))
                            .collect(),
                    };
                    if acc.is_empty() {
                        break;
                    }
                }
                for x in acc {
                    if sets[p.lhs].insert(x) {
                        changed = true;
                    }
                }
            }
        }
        std::mem::take(&mut sets[self.start])
    }

    /// Parses the grammar text format:
    ///
    /// ```text
    /// terminals: a b
    /// start: S
    /// S -> a S b | _
    /// ```
    pub fn parse(src: &str) -> Result<Cfg> {
        let mut terminals: Option<Alphabet> = None;
        let mut start: Option<String> = None;
        let mut rules: Vec<(usize, String, Vec<Vec<String>>)> = Vec::new();
        for (no, line) in text::lines(src) {
            if let Some((lhs, rhs)) = line.split_once("->") {
                let lhs = lhs.trim();
                if lhs.is_empty() || lhs.contains(char::is_whitespace) {
                    return Err(Error::parse(no, format!("bad left-hand side `{lhs}`")));
                }
                let alts = rhs
                    .split('|')
                    .map(|alt| alt.split_whitespace().map(str::to_string).collect::<Vec<_>>())
                    .collect::<Vec<_>>();
                if alts.iter().any(|a| a.is_empty()) {
                    return Err(Error::parse(no, "empty alternative; write `_` for ε"));
                }
                rules.push((no, lhs.to_string(), alts));
                continue;
            }
            let (key, rest) = text::declaration(line)
                .ok_or_else(|| Error::parse(no, format!("expected a rule or declaration, found `{line}`")))?;
            match key {
                "terminals" => {
                    terminals = Some(
                        Alphabet::new(rest.split_whitespace())
                            .map_err(|e| Error::parse(no, e.to_string()))?,
                    )
                }
                "start" => start = Some(text::expect_tokens(no, rest, 1, "start")?[0].to_string()),
                other => return Err(Error::parse(no, format!("unknown declaration `{other}`"))),
            }
        }
        let terminals = terminals.ok_or_else(|| Error::parse(0, "missing `terminals:` declaration"))?;
        let start = start
            .or_else(|| rules.first().map(|r| r.1.clone()))
            .ok_or_else(|| Error::parse(0, "missing `start:` declaration"))?;
        if terminals.index_of(&start).is_some() {
            return Err(Error::parse(0, format!("start symbol `{start}` is a terminal")));
        }
        let mut g = Cfg::new(terminals, &start);
        for (no, lhs, alts) in rules {
            if g.terminals.index_of(&lhs).is_some() {
                return Err(Error::parse(no, format!("terminal `{lhs}` on a left-hand side")));
            }
            for alt in alts {
                if alt.len() > 1 && alt.iter().any(|t| t == "_") {
                    return Err(Error::parse(no, "`_` must stand alone"));
                }
                let toks: Vec<&str> = alt.iter().map(String::as_str).collect();
                g.add_rule(&lhs, &toks);
            }
        }
        Ok(g)
    }

    fn format_sym(&self, s: &Sym) -> &str {
        match s {
            Sym::T(a) => self.terminals.name(*a),
            Sym::N(b) => &self.nonterminals[*b],
        }
    }
}

impl fmt::Display for Cfg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "terminals: {}", self.terminals)?;
        writeln!(f, "start: {}", self.nonterminals[self.start])?;
        for p in &self.productions {
            let rhs: Vec<&str> = p.rhs.iter().map(|s| self.format_sym(s)).collect();
            let rhs = if rhs.is_empty() { "_".to_string() } else { rhs.join(" ") };
            writeln!(f, "{} -> {}", self.nonterminals[p.lhs], rhs)?;
        }
        Ok(())
    }
}
