//! Regular index sets `I(A, R) = {x : Ax ⇒* y for some y ∈ R}`.
//!
//! After reducing `R` to `T*` by a triple construction and dropping all
//! terminals, the question becomes which nonterminals erase to ε under a
//! given index.  Push productions are bypassed by saturating the grammar
//! with shortcut productions; afterwards the erasable set for `f·v` is a
//! function of the erasable set for `v`, which yields a deterministic
//! automaton reading index words bottom-up.

use std::collections::{BTreeSet, HashMap, VecDeque};

use fixedbitset::FixedBitSet;

use super::{IndexedGrammar, Rule, Sym};
use crate::alphabet::{Alphabet, Letter};
use crate::automata::Nfa;
use crate::error::Result;
use crate::transducers::Transducer;

/// Saturated erasure data of a terminal-free grammar.
pub(crate) struct ErasureMachine {
    indices: Alphabet,
    /// Nonterminals of `self` mapped to their triples `⟨q₀, A, f⟩`.
    roots: Vec<usize>,
    /// Nonterminals erasable with the empty index.
    initial: FixedBitSet,
    /// `w[B][f]`: minimal sets of nonterminals `B f` can be rewritten to
    /// (nonterminal productions, then one pop each) — one of them must erase.
    w: Vec<Vec<Vec<FixedBitSet>>>,
}

impl ErasureMachine {
    pub fn new(g: &IndexedGrammar, r: &Nfa) -> Result<Self> {
        let (h, roots) = g.triple_all(&Transducer::regular_intersection(r))?;
        let n = h.num_nonterminals();
        let k = h.indices().len();
        // discard terminals
        let mut plain: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
        let mut pushes: Vec<(usize, usize, Letter)> = Vec::new();
        let mut pops: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); k]; n];
        let nts = |w: &[Sym]| -> Vec<usize> {
            w.iter()
                .filter_map(|s| match s {
                    Sym::N(b) => Some(*b),
                    Sym::T(_) => None,
                })
                .collect()
        };
        for p in h.productions() {
            match &p.rule {
                Rule::Plain(w) => {
                    plain.insert((p.lhs, nts(w)));
                }
                Rule::Push(b, f) => pushes.push((p.lhs, *b, *f)),
                Rule::Pop(f, w) => {
                    let w = nts(w);
                    assert_eq!(w.len(), 1, "pops are in normal form");
                    pops[p.lhs][*f].push(w[0]);
                }
            }
        }
        // nonterminals that cannot erase even when indices are ignored are dead
        let mut live = FixedBitSet::with_capacity(n);
        let mut changed = true;
        while changed {
            changed = false;
            let mut mark = |live: &mut FixedBitSet, a: usize, ok: bool| {
                if ok && !live.contains(a) {
                    live.insert(a);
                    changed = true;
                }
            };
            for (a, rhs) in &plain {
                let ok = rhs.iter().all(|&b| live.contains(b));
                mark(&mut live, *a, ok);
            }
            for &(c, b, _) in &pushes {
                let ok = live.contains(b);
                mark(&mut live, c, ok);
            }
            for (a, row) in pops.iter().enumerate() {
                let ok = row.iter().flatten().any(|&b| live.contains(b));
                mark(&mut live, a, ok);
            }
        }
        plain.retain(|(a, rhs)| live.contains(*a) && rhs.iter().all(|&b| live.contains(b)));
        pushes.retain(|&(c, b, _)| live.contains(c) && live.contains(b));
        for row in pops.iter_mut() {
            for targets in row.iter_mut() {
                targets.retain(|&b| live.contains(b));
            }
        }
        let bound = n.saturating_mul(1usize.checked_shl(n as u32).unwrap_or(usize::MAX));
        let mut sets = AlphSets::new(n, k, &pops);
        let mut rounds = 0usize;
        let mut fresh: Vec<(usize, Vec<usize>)> = plain.iter().cloned().collect();
        loop {
            for p in fresh.drain(..) {
                sets.add_production(p);
            }
            sets.run();
            for &(c, b, f) in &pushes {
                for x in &sets.w[b][f] {
                    let p = (c, x.ones().collect::<Vec<_>>());
                    if plain.insert(p.clone()) {
                        fresh.push(p);
                    }
                }
            }
            if fresh.is_empty() {
                break;
            }
            rounds += 1;
            assert!(rounds <= bound, "saturation exceeded |N|·2^|N| rounds");
        }
        let w = sets.w;
        // index-free erasure: least fixpoint over B → w, w ∈ N*
        let mut initial = FixedBitSet::with_capacity(n);
        let mut changed = true;
        while changed {
            changed = false;
            for (a, rhs) in &plain {
                if !initial.contains(*a) && rhs.iter().all(|&b| initial.contains(b)) {
                    initial.insert(*a);
                    changed = true;
                }
            }
        }
        Ok(ErasureMachine {
            indices: g.indices().clone(),
            roots,
            initial,
            w,
        })
    }

    pub fn initial(&self) -> &FixedBitSet {
        &self.initial
    }

    /// Erasable set for `f·v` from the erasable set `x` for `v`.
    pub fn step(&self, x: &FixedBitSet, f: Letter) -> FixedBitSet {
        let n = self.w.len();
        let mut out = FixedBitSet::with_capacity(n);
        for b in 0..n {
            if self.w[b][f].iter().any(|y| y.is_subset(x)) {
                out.insert(b);
            }
        }
        out
    }

    /// Whether the original nonterminal `a` is in the erasable set `x`.
    pub fn erases(&self, x: &FixedBitSet, a: usize) -> bool {
        x.contains(self.roots[a])
    }

    /// Reachable erasable sets with their transitions, in discovery order.
    pub fn explore(&self) -> (Vec<FixedBitSet>, Vec<Vec<usize>>) {
        let mut ids: HashMap<FixedBitSet, usize> = HashMap::new();
        let mut states = vec![self.initial.clone()];
        ids.insert(self.initial.clone(), 0);
        let mut delta: Vec<Vec<usize>> = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(s) = queue.pop_front() {
            let mut row = Vec::new();
            for f in self.indices.letters() {
                let next = self.step(&states[s], f);
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
            if delta.len() <= s {
                delta.resize(s + 1, Vec::new());
            }
            delta[s] = row;
        }
        (states, delta)
    }
}

/// Minimal `alph` sets of `V_f K_B` for all `B` and `f`: a least fixpoint
/// over antichains of nonterminal sets, extended as productions arrive.
struct AlphSets {
    n: usize,
    k: usize,
    w: Vec<Vec<Vec<FixedBitSet>>>,
    prods: Vec<(usize, Vec<usize>)>,
    /// productions mentioning each nonterminal on the right
    users: Vec<Vec<usize>>,
    queue: VecDeque<(usize, Letter)>,
}

impl AlphSets {
    fn new(n: usize, k: usize, pops: &[Vec<Vec<usize>>]) -> Self {
        let mut w = vec![vec![Vec::new(); k]; n];
        for b in 0..n {
            for f in 0..k {
                for &c in &pops[b][f] {
                    let mut y = FixedBitSet::with_capacity(n);
                    y.insert(c);
                    insert_minimal(&mut w[b][f], y);
                }
            }
        }
        AlphSets {
            n,
            k,
            w,
            prods: Vec::new(),
            users: vec![Vec::new(); n],
            queue: VecDeque::new(),
        }
    }

    fn add_production(&mut self, p: (usize, Vec<usize>)) {
        if p.1.is_empty() {
            return;
        }
        let id = self.prods.len();
        for &b in &p.1 {
            if self.users[b].last() != Some(&id) {
                self.users[b].push(id);
            }
        }
        self.prods.push(p);
        self.queue.extend((0..self.k).map(|f| (id, f)));
    }

    fn run(&mut self) {
        while let Some((id, f)) = self.queue.pop_front() {
            let (a, rhs) = &self.prods[id];
            let mut acc = vec![FixedBitSet::with_capacity(self.n)];
            for &b in rhs {
                let mut next = Vec::new();
                for x in &acc {
                    for y in &self.w[b][f] {
                        let mut z = x.clone();
                        z.union_with(y);
                        insert_minimal(&mut next, z);
                    }
                }
                acc = next;
                if acc.is_empty() {
                    break;
                }
            }
            let a = *a;
            let mut grew = false;
            for z in acc {
                grew |= insert_minimal(&mut self.w[a][f], z);
            }
            if grew {
                self.queue.extend(self.users[a].iter().map(|&u| (u, f)));
            }
        }
    }
}

/// Adds `y` to an antichain of minimal sets; reports whether it changed.
fn insert_minimal(sets: &mut Vec<FixedBitSet>, y: FixedBitSet) -> bool {
    if sets.iter().any(|x| x.is_subset(&y)) {
        return false;
    }
    sets.retain(|x| !y.is_subset(x));
    sets.push(y);
    true
}

impl IndexedGrammar {
    /// Automaton over the index alphabet for `I(a, R)`.
    pub fn iw_automaton(&self, a: usize, r: &Nfa) -> Result<Nfa> {
        let m = ErasureMachine::new(self, r)?;
        let (states, delta) = m.explore();
        // reads index words bottom-up
        let mut rev = Nfa::new(self.indices.clone(), states.len(), 0);
        for (s, x) in states.iter().enumerate() {
            rev.set_final(s, m.erases(x, a));
            for (f, &t) in delta[s].iter().enumerate() {
                rev.add_edge(s, vec![f], t);
            }
        }
        Ok(rev.reverse().trim())
    }
}

#[cfg(test)]
mod tests {
    use super::super::corpus::*;
    use super::*;

    fn star(x: &Alphabet, letters: &str) -> Nfa {
        let mut m = Nfa::new(x.clone(), 1, 0);
        m.set_final(0, true);
        for l in letters.split_whitespace() {
            m.add_edge(0, vec![x.letter(l).unwrap()], 0);
        }
        m
    }

    #[test]
    fn example_erodes_every_index() {
        let g = example();
        let u = g.nonterminal_id("U").unwrap();
        let m = g.iw_automaton(u, &Nfa::universal(g.terminals().clone())).unwrap();
        assert!(m.equivalent(&Nfa::universal(g.indices().clone())).unwrap());
    }

    #[test]
    fn blocking_index() {
        let g = IndexedGrammar::parse(
            "terminals: a b\nindices: f g\nstart: S\nS -> S ^f | S ^g | U\nU ?f -> A\nA -> U\nU -> _\n",
        )
        .unwrap();
        let u = g.nonterminal_id("U").unwrap();
        let m = g.iw_automaton(u, &Nfa::universal(g.terminals().clone())).unwrap();
        assert!(m.equivalent(&star(g.indices(), "f")).unwrap());
    }

    #[test]
    fn empty_target() {
        let g = example();
        let m = g.iw_automaton(g.start(), &Nfa::empty(g.terminals().clone())).unwrap();
        assert!(m.is_empty());
    }

    #[test]
    fn restricted_target() {
        // U·x derives the word spelled by x bottom-up (f ↦ a, g ↦ b)
        let g = example();
        let u = g.nonterminal_id("U").unwrap();
        let m = g.iw_automaton(u, &star(g.terminals(), "a")).unwrap();
        assert!(m.equivalent(&star(g.indices(), "f")).unwrap());
    }

    #[test]
    fn pushes_inside_erasure() {
        // A·x erases iff x ∈ g*, but only through a push of f that is popped again
        let g = IndexedGrammar::parse(
            "terminals: a\nindices: f g\nstart: A\nA -> B ^f\nB ?f -> C D\nC ?g -> C\nC -> _\nD ?g -> D\nD -> _\n",
        )
        .unwrap();
        let m = g.iw_automaton(0, &Nfa::universal(g.terminals().clone())).unwrap();
        assert!(m.equivalent(&star(g.indices(), "g")).unwrap());
    }
}
