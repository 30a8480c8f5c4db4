//! Multisets, linear and semilinear sets, Parikh images and the
//! simultaneous-unboundedness criterion on semilinear sets.
//!
//! Parikh images of automata and grammars go through one solver: the
//! commutative polynomial system `X_A = ⋃ Ψ(terminals)+ΣX_B` over the
//! semiring of semilinear sets, solved strongly-connected component by
//! component with Newton iteration, each Newton step being a linear system
//! solved by elimination with Kleene star.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::alphabet::{Alphabet, Letter};
use crate::automata::Nfa;

/// Letter counts; position `i` counts letter `i` of the ambient alphabet.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multiset(pub Vec<u32>);

impl Multiset {
    pub fn zero(dim: usize) -> Self {
        Multiset(vec![0; dim])
    }

    pub fn unit(dim: usize, l: Letter) -> Self {
        let mut m = Multiset::zero(dim);
        m.0[l] = 1;
        m
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, l: Letter) -> u32 {
        self.0[l]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn norm(&self) -> u64 {
        self.0.iter().map(|&c| c as u64).sum()
    }

    pub fn add(&self, o: &Multiset) -> Multiset {
        Multiset(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn checked_sub(&self, o: &Multiset) -> Option<Multiset> {
        self.0
            .iter()
            .zip(&o.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Multiset)
    }

    pub fn leq(&self, o: &Multiset) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a <= b)
    }

    pub fn format(&self, x: &Alphabet) -> String {
        let parts: Vec<String> = x
            .letters()
            .map(|l| format!("{}:{}", x.name(l), self.0[l]))
            .collect();
        format!("{{{}}}", parts.join(" "))
    }
}

/// `Ψ(w)`.
pub fn parikh_word(dim: usize, w: &[Letter]) -> Multiset {
    let mut m = Multiset::zero(dim);
    for &l in w {
        m.0[l] += 1;
    }
    m
}

/// Whether `target` is a nonnegative integer combination of `gens`.
fn in_monoid(target: &Multiset, gens: &[Multiset]) -> bool {
    fn go(t: &Multiset, gens: &[Multiset], seen: &mut HashSet<Multiset>) -> bool {
        if t.is_zero() {
            return true;
        }
        if !seen.insert(t.clone()) {
            return false;
        }
        // the first nonzero coordinate must be paid by some generator
        let first = t.0.iter().position(|&c| c > 0).unwrap();
        gens.iter().any(|g| {
            g.0[first] > 0
                && t.checked_sub(g)
                    .map_or(false, |rest| go(&rest, gens, seen))
        })
    }
    let gens: Vec<Multiset> = gens.iter().filter(|g| !g.is_zero()).cloned().collect();
    go(target, &gens, &mut HashSet::new())
}

/// `{μ₀ + Σ xᵢμᵢ}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearSet {
    pub base: Multiset,
    pub periods: Vec<Multiset>,
}

impl LinearSet {
    pub fn new(base: Multiset, periods: Vec<Multiset>) -> Self {
        let mut ls = LinearSet { base, periods };
        ls.tidy();
        ls
    }

    pub fn point(base: Multiset) -> Self {
        LinearSet {
            base,
            periods: Vec::new(),
        }
    }

    /// Drops zero, duplicate and redundant periods.
    fn tidy(&mut self) {
        let mut ps: Vec<Multiset> = self.periods.iter().filter(|p| !p.is_zero()).cloned().collect();
        ps.sort_by(|a, b| b.norm().cmp(&a.norm()).then(a.cmp(b)));
        ps.dedup();
        // try to remove the largest periods first
        let mut i = 0;
        while i < ps.len() {
            let p = ps.remove(i);
            if in_monoid(&p, &ps) {
                continue;
            }
            ps.insert(i, p);
            i += 1;
        }
        ps.sort();
        self.periods = ps;
    }

    pub fn contains(&self, v: &Multiset) -> bool {
        v.checked_sub(&self.base)
            .map_or(false, |d| in_monoid(&d, &self.periods))
    }

    /// Sufficient condition for `self ⊆ other`.
    fn covered_by(&self, other: &LinearSet) -> bool {
        other.contains(&self.base) && self.periods.iter().all(|p| in_monoid(p, &other.periods))
    }

    fn add(&self, o: &LinearSet) -> LinearSet {
        let mut periods = self.periods.clone();
        periods.extend(o.periods.iter().cloned());
        LinearSet::new(self.base.add(&o.base), periods)
    }

    /// Letters occurring in some period.
    pub fn unbounded_letters(&self) -> BTreeSet<Letter> {
        self.periods
            .iter()
            .flat_map(|p| (0..p.dim()).filter(move |&l| p.0[l] > 0))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemilinearSet {
    dim: usize,
    parts: Vec<LinearSet>,
}

impl SemilinearSet {
    pub fn empty(dim: usize) -> Self {
        SemilinearSet {
            dim,
            parts: Vec::new(),
        }
    }

    pub fn zero(dim: usize) -> Self {
        SemilinearSet::single(LinearSet::point(Multiset::zero(dim)))
    }

    pub fn single(l: LinearSet) -> Self {
        SemilinearSet {
            dim: l.base.dim(),
            parts: vec![l],
        }
    }

    pub fn from_parts(dim: usize, parts: Vec<LinearSet>) -> Self {
        let mut s = SemilinearSet { dim, parts };
        s.simplify();
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parts(&self) -> &[LinearSet] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    fn simplify(&mut self) {
        let mut ps: Vec<LinearSet> = std::mem::take(&mut self.parts);
        ps.sort();
        ps.dedup();
        // bigger sets first so that they absorb smaller ones
        ps.sort_by(|a, b| {
            b.periods
                .len()
                .cmp(&a.periods.len())
                .then(a.base.norm().cmp(&b.base.norm()))
                .then(a.cmp(b))
        });
        merge_steps(&mut ps);
        let mut keep: Vec<LinearSet> = Vec::new();
        for p in ps {
            if keep.iter().any(|k| p.covered_by(k)) {
                continue;
            }
            keep.retain(|k| !k.covered_by(&p));
            keep.push(p);
        }
        keep.sort();
        self.parts = keep;
    }

    pub fn union(&self, o: &SemilinearSet) -> SemilinearSet {
        let mut parts = self.parts.clone();
        parts.extend(o.parts.iter().cloned());
        SemilinearSet::from_parts(self.dim, parts)
    }

    /// Minkowski sum.
    pub fn add(&self, o: &SemilinearSet) -> SemilinearSet {
        let mut parts = Vec::with_capacity(self.parts.len() * o.parts.len());
        for a in &self.parts {
            for b in &o.parts {
                parts.push(a.add(b));
            }
        }
        SemilinearSet::from_parts(self.dim, parts)
    }

    /// `{0} ∪ S ∪ S+S ∪ ⋯`.
    pub fn star(&self) -> SemilinearSet {
        let mut acc = SemilinearSet::zero(self.dim);
        for l in &self.parts {
            let mut periods = l.periods.clone();
            periods.push(l.base.clone());
            let one = SemilinearSet::from_parts(
                self.dim,
                vec![
                    LinearSet::point(Multiset::zero(self.dim)),
                    LinearSet::new(l.base.clone(), periods),
                ],
            );
            acc = acc.add(&one);
        }
        acc
    }

    /// Exact membership.
    pub fn contains(&self, v: &Multiset) -> bool {
        self.parts.iter().any(|l| l.contains(v))
    }

    /// Membership by a search over coefficients bounded by `bound` (every
    /// period is nonzero, so `bound ≥ ‖v‖₁` makes the answer exact).
    pub fn contains_bounded(&self, v: &Multiset, bound: u64) -> bool {
        fn go(rest: &Multiset, periods: &[Multiset], budget: u64) -> bool {
            if rest.is_zero() {
                return true;
            }
            let Some((p, tail)) = periods.split_first() else {
                return false;
            };
            let mut cur = rest.clone();
            for k in 0..=budget {
                if go(&cur, tail, budget - k) {
                    return true;
                }
                match cur.checked_sub(p) {
                    Some(next) => cur = next,
                    None => return false,
                }
            }
            false
        }
        self.parts.iter().any(|l| {
            v.checked_sub(&l.base)
                .map_or(false, |d| go(&d, &l.periods, bound))
        })
    }

    /// Members with norm at most `max_norm`.
    pub fn members_up_to(&self, max_norm: u64) -> BTreeSet<Multiset> {
        let mut out = BTreeSet::new();
        for l in &self.parts {
            if l.base.norm() > max_norm {
                continue;
            }
            let mut stack = vec![l.base.clone()];
            let mut seen: HashSet<Multiset> = HashSet::new();
            while let Some(v) = stack.pop() {
                if !seen.insert(v.clone()) {
                    continue;
                }
                for p in &l.periods {
                    let w = v.add(p);
                    if w.norm() <= max_norm {
                        stack.push(w);
                    }
                }
                out.insert(v);
            }
        }
        out
    }

    pub fn format(&self, x: &Alphabet) -> String {
        let mut s = String::new();
        for l in &self.parts {
            s.push_str("base ");
            s.push_str(&l.base.format(x));
            s.push_str(" periods");
            for p in &l.periods {
                s.push(' ');
                s.push_str(&p.format(x));
            }
            s.push('\n');
        }
        s
    }

    pub fn display<'a>(&'a self, x: &'a Alphabet) -> impl fmt::Display + 'a {
        struct D<'a>(&'a SemilinearSet, &'a Alphabet);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0.format(self.1))
            }
        }
        D(self, x)
    }
}

/// `(b; P) ∪ (b+q; P∪{q}) = (b; P∪{q})`, applied until nothing changes.
fn merge_steps(ps: &mut Vec<LinearSet>) {
    'outer: loop {
        for i in 0..ps.len() {
            for j in 0..ps.len() {
                if i == j || ps[j].periods.len() != ps[i].periods.len() + 1 {
                    continue;
                }
                let (small, big) = (&ps[i], &ps[j]);
                let Some(q) = big.base.checked_sub(&small.base) else {
                    continue;
                };
                if q.is_zero() || !big.periods.contains(&q) || small.periods.contains(&q) {
                    continue;
                }
                if small.periods.iter().all(|p| big.periods.contains(p)) {
                    let merged = LinearSet::new(small.base.clone(), big.periods.clone());
                    let (hi, lo) = (i.max(j), i.min(j));
                    ps.swap_remove(hi);
                    ps.swap_remove(lo);
                    ps.push(merged);
                    continue 'outer;
                }
            }
        }
        return;
    }
}

/// Some linear set has, for every letter, a period in which it occurs.
pub fn sup_from_semilinear(s: &SemilinearSet, x: &Alphabet) -> bool {
    debug_assert_eq!(s.dim(), x.len());
    s.parts()
        .iter()
        .any(|l| l.unbounded_letters().len() == x.len())
}

/// A commutative polynomial system `X_v = ⋃ (c + Σ X_{vars})`.
#[derive(Clone, Debug)]
pub(crate) struct System {
    pub dim: usize,
    /// per variable: monomials (constant, variables)
    pub eqs: Vec<Vec<(Multiset, Vec<usize>)>>,
}

type Monomial = (SemilinearSet, Vec<usize>);

impl System {
    /// Least solution.
    pub fn solve(&self) -> Vec<SemilinearSet> {
        let n = self.eqs.len();
        let mut sol: Vec<Option<SemilinearSet>> = vec![None; n];
        for comp in self.components() {
            let local: Vec<Option<usize>> = {
                let mut l = vec![None; n];
                for (i, &v) in comp.iter().enumerate() {
                    l[v] = Some(i);
                }
                l
            };
            // fold solved variables into the constants
            let eqs: Vec<Vec<Monomial>> = comp
                .iter()
                .map(|&v| {
                    self.eqs[v]
                        .iter()
                        .filter_map(|(c, vars)| {
                            let mut coef = SemilinearSet::single(LinearSet::point(c.clone()));
                            let mut inner = Vec::new();
                            for &u in vars {
                                match local[u] {
                                    Some(i) => inner.push(i),
                                    None => coef = coef.add(sol[u].as_ref().unwrap()),
                                }
                            }
                            (!coef.is_empty()).then_some((coef, inner))
                        })
                        .collect()
                })
                .collect();
            let values = solve_component(self.dim, &eqs);
            for (i, &v) in comp.iter().enumerate() {
                sol[v] = Some(values[i].clone());
            }
        }
        sol.into_iter().map(Option::unwrap).collect()
    }

    /// Strongly connected components, dependencies first (Tarjan).
    fn components(&self) -> Vec<Vec<usize>> {
        let n = self.eqs.len();
        let succ: Vec<Vec<usize>> = self
            .eqs
            .iter()
            .map(|ms| {
                let s: BTreeSet<usize> = ms.iter().flat_map(|(_, v)| v.iter().copied()).collect();
                s.into_iter().collect()
            })
            .collect();
        tarjan(n, &succ)
    }
}

/// Tarjan's algorithm, iterative; components come out in reverse
/// topological order of the condensation (sinks first).
pub(crate) fn tarjan(n: usize, succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < succ[v].len() {
                let w = succ[v][*i];
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort();
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

fn eval(dim: usize, eqs: &[Vec<Monomial>], nu: &[SemilinearSet]) -> Vec<SemilinearSet> {
    eqs.iter()
        .map(|ms| {
            let mut acc = SemilinearSet::empty(dim);
            for (c, vars) in ms {
                let mut t = c.clone();
                for &v in vars {
                    if t.is_empty() {
                        break;
                    }
                    t = t.add(&nu[v]);
                }
                acc = acc.union(&t);
            }
            acc
        })
        .collect()
}

fn solve_component(dim: usize, eqs: &[Vec<Monomial>]) -> Vec<SemilinearSet> {
    let k = eqs.len();
    let linear = eqs.iter().all(|ms| ms.iter().all(|(_, v)| v.len() <= 1));
    let mut nu = eval(dim, eqs, &vec![SemilinearSet::empty(dim); k]);
    // linear systems are solved exactly by one step
    let rounds = if linear { 1 } else { k + 1 };
    for _ in 0..rounds {
        let rhs = eval(dim, eqs, &nu);
        let mut m: Vec<Vec<SemilinearSet>> = vec![vec![SemilinearSet::empty(dim); k]; k];
        for (a, ms) in eqs.iter().enumerate() {
            for (c, vars) in ms {
                for (j, &b) in vars.iter().enumerate() {
                    let mut coef = c.clone();
                    for (l, &u) in vars.iter().enumerate() {
                        if l != j {
                            coef = coef.add(&nu[u]);
                        }
                    }
                    if !coef.is_empty() {
                        m[a][b] = m[a][b].union(&coef);
                    }
                }
            }
        }
        nu = solve_linear(dim, m, rhs);
    }
    nu
}

/// Least solution of `X = M·X ∪ b` by Gauss–Jordan elimination.
fn solve_linear(
    dim: usize,
    mut m: Vec<Vec<SemilinearSet>>,
    mut b: Vec<SemilinearSet>,
) -> Vec<SemilinearSet> {
    let k = b.len();
    for p in 0..k {
        let s = m[p][p].star();
        m[p][p] = SemilinearSet::empty(dim);
        b[p] = s.add(&b[p]);
        for j in 0..k {
            if j != p && !m[p][j].is_empty() {
                m[p][j] = s.add(&m[p][j]);
            }
        }
        for i in 0..k {
            if i == p || m[i][p].is_empty() {
                continue;
            }
            let f = std::mem::replace(&mut m[i][p], SemilinearSet::empty(dim));
            b[i] = b[i].union(&f.add(&b[p]));
            for j in 0..k {
                if j != p && !m[p][j].is_empty() {
                    let extra = f.add(&m[p][j]);
                    m[i][j] = m[i][j].union(&extra);
                }
            }
        }
    }
    b
}

/// `Ψ(L(m))`.
pub fn parikh_nfa(m: &Nfa) -> SemilinearSet {
    let m = m.trim().normalize();
    let dim = m.alphabet().len();
    let mut eqs: Vec<Vec<(Multiset, Vec<usize>)>> = vec![Vec::new(); m.num_states()];
    for s in m.finals() {
        eqs[s].push((Multiset::zero(dim), Vec::new()));
    }
    for e in m.edges() {
        eqs[e.from].push((parikh_word(dim, &e.label), vec![e.to]));
    }
    let sys = System { dim, eqs };
    sys.solve().swap_remove(m.initial())
}
