//! Simple regular expressions: unions of products of atoms `x?` and `Y*`.

use std::collections::BTreeSet;
use std::fmt;

use crate::alphabet::{Alphabet, Letter, Word};
use crate::automata::Nfa;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    /// `(x ∪ ε)`
    Opt(Letter),
    /// `(y₁ ∪ ⋯ ∪ y_k)*`, nonempty
    Star(BTreeSet<Letter>),
}

impl Atom {
    pub fn star(letters: impl IntoIterator<Item = Letter>) -> Atom {
        let s: BTreeSet<Letter> = letters.into_iter().collect();
        assert!(!s.is_empty(), "star atoms need at least one letter");
        Atom::Star(s)
    }

    fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        let (one, many) = match self {
            Atom::Opt(x) => (Some(*x), None),
            Atom::Star(y) => (None, Some(y.iter().copied())),
        };
        one.into_iter().chain(many.into_iter().flatten())
    }

    /// Atoms over `x`: the letters, then every nonempty subset as a star.
    fn all(x: &Alphabet) -> Vec<Atom> {
        let n = x.len();
        let mut out: Vec<Atom> = x.letters().map(Atom::Opt).collect();
        for mask in 1u64..(1u64 << n) {
            out.push(Atom::Star((0..n).filter(|i| mask >> i & 1 == 1).collect()));
        }
        out.sort();
        out
    }
}

/// Whether two adjacent atoms can be merged into one.
fn mergeable(l: &Atom, r: &Atom) -> bool {
    match (l, r) {
        (Atom::Star(y), Atom::Star(z)) => y.is_subset(z) || z.is_subset(y),
        (Atom::Opt(x), Atom::Star(y)) | (Atom::Star(y), Atom::Opt(x)) => y.contains(x),
        (Atom::Opt(_), Atom::Opt(_)) => false,
    }
}

fn merge(l: &Atom, r: &Atom) -> Atom {
    match (l, r) {
        (Atom::Star(y), Atom::Star(z)) => Atom::Star(if y.is_subset(z) { z } else { y }.clone()),
        (Atom::Opt(_), s @ Atom::Star(_)) | (s @ Atom::Star(_), Atom::Opt(_)) => s.clone(),
        _ => unreachable!(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Product {
    pub atoms: Vec<Atom>,
}

/// `w₀Y₁*w₁⋯Yₙ*wₙ` together with the block words `uᵢ` (letters of `Yᵢ` in
/// alphabet order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockForm {
    pub words: Vec<Word>,
    pub sets: Vec<BTreeSet<Letter>>,
}

impl BlockForm {
    pub fn blocks(&self) -> Vec<Word> {
        self.sets.iter().map(|y| y.iter().copied().collect()).collect()
    }

    /// `↓{w₀}Y₁*↓{w₁}⋯Yₙ*↓{wₙ}` as an automaton.
    pub fn to_nfa(&self, x: &Alphabet) -> Nfa {
        let mut m = Nfa::new(x.clone(), 1, 0);
        let mut cur = 0;
        for (i, w) in self.words.iter().enumerate() {
            let next = m.add_state();
            m.add_edge(cur, w.clone(), next);
            cur = next;
            if let Some(y) = self.sets.get(i) {
                for &a in y {
                    m.add_edge(cur, vec![a], cur);
                }
            }
        }
        m.set_final(cur, true);
        m.downward_saturate()
    }
}

impl Product {
    pub fn new(atoms: Vec<Atom>) -> Product {
        Product { atoms }
    }

    pub fn epsilon() -> Product {
        Product::default()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Atom count plus one.
    pub fn size(&self) -> usize {
        self.atoms.len() + 1
    }

    pub fn is_canonical(&self) -> bool {
        self.atoms.windows(2).all(|p| !mergeable(&p[0], &p[1]))
    }

    pub fn canonicalize(&self) -> Product {
        let mut out: Vec<Atom> = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            let mut cur = a.clone();
            // merging may cascade to the left
            while let Some(last) = out.last() {
                if mergeable(last, &cur) {
                    cur = merge(last, &cur);
                    out.pop();
                } else {
                    break;
                }
            }
            out.push(cur);
        }
        Product { atoms: out }
    }

    /// `L(self) ⊆ L(other)` by greedy left-to-right atom matching.
    pub fn included_in(&self, other: &Product) -> bool {
        let (p, q) = (&self.atoms, &other.atoms);
        let (mut i, mut j) = (0, 0);
        while i < p.len() {
            if j == q.len() {
                return false;
            }
            match (&p[i], &q[j]) {
                (Atom::Opt(a), Atom::Opt(b)) => {
                    if a == b {
                        i += 1;
                    }
                    j += 1;
                }
                (Atom::Opt(a), Atom::Star(y)) => {
                    if y.contains(a) {
                        i += 1;
                    } else {
                        j += 1;
                    }
                }
                (Atom::Star(_), Atom::Opt(_)) => j += 1,
                (Atom::Star(z), Atom::Star(y)) => {
                    if z.is_subset(y) {
                        i += 1;
                    } else {
                        j += 1;
                    }
                }
            }
        }
        true
    }

    pub fn block_form(&self) -> BlockForm {
        let mut words = vec![Vec::new()];
        let mut sets = Vec::new();
        for a in &self.atoms {
            match a {
                Atom::Opt(x) => words.last_mut().unwrap().push(*x),
                Atom::Star(y) => {
                    sets.push(y.clone());
                    words.push(Vec::new());
                }
            }
        }
        BlockForm { words, sets }
    }

    pub fn to_nfa(&self, x: &Alphabet) -> Nfa {
        let mut m = Nfa::new(x.clone(), 1, 0);
        let mut cur = 0;
        for a in &self.atoms {
            match a {
                Atom::Opt(l) => {
                    let next = m.add_state();
                    m.add_edge(cur, vec![*l], next);
                    m.add_edge(cur, vec![], next);
                    cur = next;
                }
                Atom::Star(y) => {
                    let next = m.add_state();
                    m.add_edge(cur, vec![], next);
                    cur = next;
                    for &l in y {
                        m.add_edge(cur, vec![l], cur);
                    }
                }
            }
        }
        m.set_final(cur, true);
        m
    }

    pub fn letters(&self) -> BTreeSet<Letter> {
        self.atoms.iter().flat_map(|a| a.letters()).collect()
    }

    pub fn format(&self, x: &Alphabet) -> String {
        if self.atoms.is_empty() {
            return "_".into();
        }
        let parts: Vec<String> = self
            .atoms
            .iter()
            .map(|a| match a {
                Atom::Opt(l) => format!("{}?", x.name(*l)),
                Atom::Star(y) => {
                    let names: Vec<&str> = y.iter().map(|&l| x.name(l)).collect();
                    format!("({})*", names.join("|"))
                }
            })
            .collect();
        parts.join(" ")
    }

    fn parse(x: &Alphabet, src: &str) -> Result<Product> {
        let src = src.trim();
        if src == "_" {
            return Ok(Product::epsilon());
        }
        let mut atoms = Vec::new();
        for tok in src.split_whitespace() {
            if let Some(inner) = tok.strip_suffix('*') {
                let inner = inner
                    .strip_prefix('(')
                    .and_then(|s| s.strip_suffix(')'))
                    .unwrap_or(inner);
                let set = inner
                    .split('|')
                    .map(|n| x.letter(n.trim()))
                    .collect::<Result<BTreeSet<_>>>()?;
                if set.is_empty() {
                    return Err(Error::Invalid(format!("empty star in `{tok}`")));
                }
                atoms.push(Atom::Star(set));
            } else if let Some(name) = tok.strip_suffix('?') {
                atoms.push(Atom::Opt(x.letter(name)?));
            } else {
                return Err(Error::Invalid(format!(
                    "expected `x?` or `(x|y)*`, found `{tok}`"
                )));
            }
        }
        Ok(Product { atoms })
    }
}

/// Union of products; kept as a sorted antichain of canonical products.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Sre {
    products: Vec<Product>,
}

impl Sre {
    /// The SRE denoting `∅`.
    pub fn empty() -> Sre {
        Sre::default()
    }

    /// Builds and canonicalizes.
    pub fn new(products: Vec<Product>) -> Sre {
        Sre { products }.canonicalize()
    }

    pub fn products(&self) -> &[Product] {
        &self.products
    }

    pub fn is_empty(&self) -> bool {
        self.products.is_empty()
    }

    /// Total atom count plus product count.
    pub fn size(&self) -> usize {
        self.products.iter().map(Product::size).sum()
    }

    pub fn canonicalize(&self) -> Sre {
        let mut ps: Vec<Product> = self.products.iter().map(Product::canonicalize).collect();
        ps.sort();
        ps.dedup();
        let keep: Vec<Product> = ps
            .iter()
            .filter(|p| !ps.iter().any(|q| q != *p && p.included_in(q)))
            .cloned()
            .collect();
        Sre { products: keep }
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonicalize()
    }

    pub fn to_nfa(&self, x: &Alphabet) -> Nfa {
        let mut m = Nfa::new(x.clone(), 1, 0);
        for p in &self.products {
            let sub = p.to_nfa(x);
            let off = m.num_states();
            for _ in 0..sub.num_states() {
                m.add_state();
            }
            for e in sub.edges() {
                m.add_edge(e.from + off, e.label.clone(), e.to + off);
            }
            for f in sub.finals() {
                m.set_final(f + off, true);
            }
            m.add_edge(0, vec![], sub.initial() + off);
        }
        m
    }

    pub fn format(&self, x: &Alphabet) -> String {
        self.products
            .iter()
            .map(|p| p.format(x))
            .collect::<Vec<_>>()
            .join(" | ")
    }

    /// Text format: `a? (a|b)* | d*`; `_` is the ε product and blank input
    /// is `∅`.  `#` starts a comment.
    pub fn parse(x: &Alphabet, src: &str) -> Result<Sre> {
        let body: String = src
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .collect::<Vec<_>>()
            .join(" ");
        if body.trim().is_empty() {
            return Ok(Sre::empty());
        }
        let products = body
            .split('|')
            .fold(Vec::<String>::new(), |mut acc, piece| {
                // '|' inside parentheses belongs to a star atom
                match acc.last_mut() {
                    Some(last) if last.matches('(').count() > last.matches(')').count() => {
                        last.push('|');
                        last.push_str(piece);
                    }
                    _ => acc.push(piece.to_string()),
                }
                acc
            })
            .iter()
            .map(|p| Product::parse(x, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Sre::new(products))
    }

    pub fn display<'a>(&'a self, x: &'a Alphabet) -> impl fmt::Display + 'a {
        struct D<'a>(&'a Sre, &'a Alphabet);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0.format(self.1))
            }
        }
        D(self, x)
    }
}

/// Every canonical product with exactly `atoms` atoms, in lexicographic order.
pub fn canonical_products(x: &Alphabet, atoms: usize) -> Vec<Product> {
    let all = Atom::all(x);
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(all: &[Atom], k: usize, cur: &mut Vec<Atom>, out: &mut Vec<Product>) {
        if cur.len() == k {
            out.push(Product::new(cur.clone()));
            return;
        }
        for a in all {
            if let Some(last) = cur.last() {
                if mergeable(last, a) {
                    continue;
                }
            }
            cur.push(a.clone());
            go(all, k, cur, out);
            cur.pop();
        }
    }
    go(&all, atoms, &mut cur, &mut out);
    out
}

/// Canonical one-atom extensions `p·A` of a canonical product.
pub fn extensions(x: &Alphabet, p: &Product) -> Vec<Product> {
    Atom::all(x)
        .into_iter()
        .filter(|a| p.atoms.last().map_or(true, |l| !mergeable(l, a)))
        .map(|a| {
            let mut atoms = p.atoms.clone();
            atoms.push(a);
            Product::new(atoms)
        })
        .collect()
}

/// The stream of all canonical SREs over an alphabet, by nondecreasing size
/// and lexicographically within a size.
pub struct SreStream {
    x: Alphabet,
    size: usize,
    /// canonical products grouped by product size (index = size)
    by_size: Vec<Vec<Product>>,
    pending: std::vec::IntoIter<Sre>,
}

pub fn enumerate_sres(x: &Alphabet) -> SreStream {
    SreStream {
        x: x.clone(),
        size: 0,
        by_size: vec![Vec::new()],
        pending: vec![Sre::empty()].into_iter(),
    }
}

impl SreStream {
    fn products_of_size(&mut self, s: usize) {
        while self.by_size.len() <= s {
            let k = self.by_size.len();
            self.by_size.push(canonical_products(&self.x, k - 1));
        }
    }

    fn fill(&mut self, s: usize) -> Vec<Sre> {
        self.products_of_size(s);
        let mut pool: Vec<Product> = (1..=s).flat_map(|k| self.by_size[k].iter().cloned()).collect();
        pool.sort();
        let mut out = Vec::new();
        let mut chosen: Vec<usize> = Vec::new();
        fn go(
            pool: &[Product],
            start: usize,
            left: usize,
            chosen: &mut Vec<usize>,
            out: &mut Vec<Sre>,
        ) {
            if left == 0 {
                out.push(Sre {
                    products: chosen.iter().map(|&i| pool[i].clone()).collect(),
                });
                return;
            }
            for i in start..pool.len() {
                let p = &pool[i];
                if p.size() > left {
                    continue;
                }
                if chosen
                    .iter()
                    .any(|&j| p.included_in(&pool[j]) || pool[j].included_in(p))
                {
                    continue;
                }
                chosen.push(i);
                go(pool, i + 1, left - p.size(), chosen, out);
                chosen.pop();
            }
        }
        go(&pool, 0, s, &mut chosen, &mut out);
        out
    }
}

impl Iterator for SreStream {
    type Item = Sre;

    fn next(&mut self) -> Option<Sre> {
        loop {
            if let Some(r) = self.pending.next() {
                return Some(r);
            }
            self.size += 1;
            let batch = self.fill(self.size);
            self.pending = batch.into_iter();
        }
    }
}
