//! Productive interval grammars.
//!
//! Every nonterminal and index symbol is tagged with the state that a
//! deterministic automaton reaches on the index word below it; the state
//! tells which nonterminals erase (`σ₀`) and which derive a non-empty word
//! (`σ₊`).  Productions that would lead to a dead sentential form are
//! dropped, and erasable children are skipped.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use fixedbitset::FixedBitSet;

use super::interval::{output_parts, IntervalGrammar};
use super::iw::ErasureMachine;
use super::{IndexedGrammar, Interner, Production, Rule, Shape, Sym};
use crate::alphabet::{Alphabet, Letter, Word};
use crate::automata::Nfa;
use crate::error::{Error, Result};

/// The state space `Q` with `f·q`, `σ₀` and `σ₊`.
pub(crate) struct IndexStates {
    /// `delta[q][f] = f·q`.
    pub delta: Vec<Vec<usize>>,
    /// `pred[q][f]`: all `q'` with `f·q' = q`.
    pub pred: Vec<Vec<Vec<usize>>>,
    pub sigma0: Vec<FixedBitSet>,
    pub sigma_plus: Vec<FixedBitSet>,
}

impl IndexStates {
    pub fn new(g: &IndexedGrammar) -> Result<Self> {
        let t = g.terminals().clone();
        let m0 = ErasureMachine::new(g, &Nfa::epsilon(t.clone()))?;
        let mut plus = Nfa::new(t.clone(), 2, 0);
        plus.set_final(1, true);
        for a in t.letters() {
            plus.add_edge(0, vec![a], 1);
            plus.add_edge(1, vec![a], 1);
        }
        let mp = ErasureMachine::new(g, &plus)?;
        let k = g.indices().len();
        let n = g.num_nonterminals();
        let mut ids: HashMap<(FixedBitSet, FixedBitSet), usize> = HashMap::new();
        let start = (m0.initial().clone(), mp.initial().clone());
        let mut states = vec![start.clone()];
        ids.insert(start, 0);
        let mut delta: Vec<Vec<usize>> = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(q) = queue.pop_front() {
            let mut row = Vec::with_capacity(k);
            for f in 0..k {
                let next = (m0.step(&states[q].0, f), mp.step(&states[q].1, f));
                let id = match ids.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = states.len();
                        ids.insert(next.clone(), id);
                        states.push(next);
                        queue.push_back(id);
                        id
                    }
                };
                row.push(id);
            }
            if delta.len() <= q {
                delta.resize(q + 1, Vec::new());
            }
            delta[q] = row;
        }
        let mut pred = vec![vec![Vec::new(); k]; states.len()];
        for (q, row) in delta.iter().enumerate() {
            for (f, &to) in row.iter().enumerate() {
                pred[to][f].push(q);
            }
        }
        let project = |m: &ErasureMachine, x: &FixedBitSet| {
            let mut s = FixedBitSet::with_capacity(n);
            for a in 0..n {
                if m.erases(x, a) {
                    s.insert(a);
                }
            }
            s
        };
        let sigma0 = states.iter().map(|(x, _)| project(&m0, x)).collect();
        let sigma_plus = states.iter().map(|(_, y)| project(&mp, y)).collect();
        Ok(IndexStates {
            delta,
            pred,
            sigma0,
            sigma_plus,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Key {
    /// `(A, q)`
    Nt(usize, usize),
    /// `(⊥_w, q)`: pops its whole index, then derives `w`.
    Bottom(usize, usize),
}

impl IntervalGrammar {
    /// Productive interval grammar for `L(self) ∖ {ε}`.
    pub fn to_productive(&self) -> Result<IntervalGrammar> {
        let g = &self.grammar;
        if !g.is_normal_form() {
            return Err(Error::Invalid("interval grammar is not in normal form".into()));
        }
        let st = IndexStates::new(g)?;
        let mut by_lhs: Vec<Vec<&Production>> = vec![Vec::new(); g.num_nonterminals()];
        for p in g.productions() {
            by_lhs[p.lhs].push(p);
        }
        let mut keys: Interner<Key> = Interner::new();
        let mut bottoms: Interner<(Word, (usize, usize))> = Interner::new();
        let mut prods: BTreeSet<(usize, Rule)> = BTreeSet::new();
        // index symbols `(f, q)` in use
        let mut index_syms: Interner<(Letter, usize)> = Interner::new();
        let mut todo = VecDeque::new();
        let (s, _) = keys.intern(Key::Nt(g.start(), 0));
        let productive = st.sigma_plus[0].contains(g.start());
        if productive {
            todo.push_back(s);
        }
        let node = |keys: &mut Interner<Key>, todo: &mut VecDeque<usize>, k: Key| {
            let (id, new) = keys.intern(k);
            if new {
                todo.push_back(id);
            }
            id
        };
        while let Some(id) = todo.pop_front() {
            match keys.keys[id].clone() {
                Key::Nt(a, q) => {
                    let plus = |b: usize, q: usize| st.sigma_plus[q].contains(b);
                    let zero = |b: usize, q: usize| st.sigma0[q].contains(b);
                    for p in &by_lhs[a] {
                        match (&p.rule, p.shape()) {
                            (Rule::Pop(f, w), _) => {
                                let Sym::N(b) = w[0] else { unreachable!() };
                                for &q2 in &st.pred[q][*f] {
                                    if plus(b, q2) {
                                        let c = node(&mut keys, &mut todo, Key::Nt(b, q2));
                                        let (fi, _) = index_syms.intern((*f, q2));
                                        prods.insert((id, Rule::Pop(fi, vec![Sym::N(c)])));
                                    }
                                }
                            }
                            (Rule::Push(b, f), _) => {
                                let q2 = st.delta[q][*f];
                                if plus(*b, q2) {
                                    let c = node(&mut keys, &mut todo, Key::Nt(*b, q2));
                                    let (fi, _) = index_syms.intern((*f, q));
                                    prods.insert((id, Rule::Push(c, fi)));
                                }
                            }
                            (Rule::Plain(w), Some(Shape::Output)) => {
                                let (u, b, v) = output_parts(w);
                                if plus(b, q) {
                                    let c = node(&mut keys, &mut todo, Key::Nt(b, q));
                                    let body = w
                                        .iter()
                                        .map(|s| if let Sym::N(_) = s { Sym::N(c) } else { *s })
                                        .collect();
                                    prods.insert((id, Rule::Plain(body)));
                                }
                                if zero(b, q) && !(u.is_empty() && v.is_empty()) {
                                    let uv: Word = u.iter().chain(&v).copied().collect();
                                    let (bi, _) = bottoms.intern((uv, self.iota[a]));
                                    let c = node(&mut keys, &mut todo, Key::Bottom(bi, q));
                                    prods.insert((id, Rule::Plain(vec![Sym::N(c)])));
                                }
                            }
                            (Rule::Plain(w), Some(Shape::Split)) => {
                                let (Sym::N(b), Sym::N(c)) = (w[0], w[1]) else { unreachable!() };
                                let body: Vec<Sym> = match (plus(b, q), plus(c, q)) {
                                    (true, true) => vec![
                                        Sym::N(node(&mut keys, &mut todo, Key::Nt(b, q))),
                                        Sym::N(node(&mut keys, &mut todo, Key::Nt(c, q))),
                                    ],
                                    _ => vec![],
                                };
                                if !body.is_empty() {
                                    prods.insert((id, Rule::Plain(body)));
                                }
                                if plus(b, q) && zero(c, q) {
                                    let x = node(&mut keys, &mut todo, Key::Nt(b, q));
                                    prods.insert((id, Rule::Plain(vec![Sym::N(x)])));
                                }
                                if zero(b, q) && plus(c, q) {
                                    let x = node(&mut keys, &mut todo, Key::Nt(c, q));
                                    prods.insert((id, Rule::Plain(vec![Sym::N(x)])));
                                }
                            }
                            (Rule::Plain(w), Some(Shape::Terminal)) => {
                                if q == 0 && !w.is_empty() {
                                    prods.insert((id, Rule::Plain(w.clone())));
                                }
                            }
                            _ => unreachable!("grammar is in normal form"),
                        }
                    }
                }
                Key::Bottom(bi, q) => {
                    for f in 0..g.indices().len() {
                        for &q2 in &st.pred[q][f] {
                            let c = node(&mut keys, &mut todo, Key::Bottom(bi, q2));
                            let (fi, _) = index_syms.intern((f, q2));
                            prods.insert((id, Rule::Pop(fi, vec![Sym::N(c)])));
                        }
                    }
                    if q == 0 {
                        let w = bottoms.keys[bi].0.iter().map(|&a| Sym::T(a)).collect();
                        prods.insert((id, Rule::Plain(w)));
                    }
                }
            }
        }
        // names and the new index alphabet
        let taken = BTreeSet::new();
        let bottom_stem = g.fresh_name("⊥", &taken);
        let names: Vec<String> = keys
            .keys
            .iter()
            .map(|k| match k {
                Key::Nt(a, q) => format!("{}@{q}", g.nonterminal_name(*a)),
                Key::Bottom(b, q) => format!("{bottom_stem}.{b}@{q}"),
            })
            .collect();
        let mut order: BTreeMap<(Letter, usize), usize> = BTreeMap::new();
        for (i, k) in index_syms.keys.iter().enumerate() {
            order.insert(*k, i);
        }
        let mut renum = vec![0; index_syms.keys.len()];
        for (pos, (_, &old)) in order.iter().enumerate() {
            renum[old] = pos;
        }
        let indices = Alphabet::new(order.keys().map(|(f, q)| format!("{}@{q}", g.indices().name(*f))))?;
        let mut out = IndexedGrammar {
            terminals: g.terminals().clone(),
            indices,
            nonterminals: names,
            start: s,
            productions: Vec::new(),
        };
        for (lhs, rule) in prods {
            let rule = match rule {
                Rule::Push(b, f) => Rule::Push(b, renum[f]),
                Rule::Pop(f, w) => Rule::Pop(renum[f], w),
                r => r,
            };
            out.productions.push(Production { lhs, rule });
        }
        let iota_of = |k: &Key| match k {
            Key::Nt(a, _) => self.iota[*a],
            Key::Bottom(b, _) => bottoms.keys[*b].1,
        };
        let (trimmed, map) = out.trim_with_map();
        let mut iota = vec![self.iota[g.start()]; trimmed.num_nonterminals()];
        for (old, new) in map.iter().enumerate() {
            if let Some(new) = new {
                iota[*new] = iota_of(&keys.keys[old]);
            }
        }
        Ok(IntervalGrammar {
            grammar: trimmed,
            iota,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::corpus::*;
    use super::*;

    fn check_productive(ig: &IntervalGrammar) {
        let g = &ig.grammar;
        for p in g.productions() {
            assert!(!matches!(&p.rule, Rule::Plain(w) if w.is_empty()), "erasing production");
        }
        ig.check().unwrap();
    }

    fn equal_minus_eps(g: &IndexedGrammar, len: usize) {
        let ig = g.to_interval().unwrap();
        let pg = ig.to_productive().unwrap();
        check_productive(&pg);
        let a = ig.grammar.bounded_language(len, 200_000);
        let b = pg.grammar.bounded_language(len, 200_000);
        assert_eq!(a.exhaustive, b.exhaustive);
        let want: BTreeSet<Word> = a.words.into_iter().filter(|w| !w.is_empty()).collect();
        assert_eq!(b.words, want);
    }

    #[test]
    fn drops_only_epsilon() {
        let g = IndexedGrammar::parse("terminals: a\nstart: S\nS -> a | _\n").unwrap();
        equal_minus_eps(&g, 4);
        equal_minus_eps(&anbn(), 6);
        equal_minus_eps(&anbncn(), 6);
        equal_minus_eps(&example(), 5);
    }

    #[test]
    fn erasable_child_of_an_output() {
        // T may derive ε or b under the same index; the a of `S -> a T` must survive either way
        let g = IndexedGrammar::parse(
            "terminals: a b\nindices: f\nstart: S\nS -> S ^f | a T\nT ?f -> T\nT -> _ | b\n",
        )
        .unwrap();
        equal_minus_eps(&g, 4);
    }

    #[test]
    fn empty_language() {
        let g = IndexedGrammar::parse("terminals: a\nstart: S\nS -> S\n").unwrap();
        let pg = g.to_interval().unwrap().to_productive().unwrap();
        assert!(pg.grammar.productions().is_empty());
    }
}
