//! Transduction images by the triple construction.
//!
//! A triple `⟨p,B,q⟩` derives, with index `x`, exactly the outputs of runs
//! `p → q` of the transducer on the words derived by `Bx`.  Output and
//! terminal productions are simulated by chains of helper nonterminals
//! that read the production's terminals through the transducer, emitting
//! its outputs; the chains only use productions that keep the index, and a
//! terminal chain ends with an ε-production, so it still needs an empty
//! index to finish.

use std::collections::{BTreeSet, VecDeque};

use super::{Interner, IndexedGrammar, Production, Rule, Shape, Sym};
use crate::alphabet::{Letter, Word};
use crate::error::Result;
use crate::transducers::Transducer;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Key {
    /// `⟨p, B, q⟩`
    Trip(usize, usize, usize),
    /// Output production `k` = `A → u B v`: `i` letters of `u` read, at
    /// state `r`, the whole production must end in `q`.
    Pre(usize, usize, usize, usize),
    /// `v[..j]` remains to be read ending in `s`; `B` starts in `p`.
    Suf(usize, usize, usize, usize),
    /// Terminal production `k`: `i` letters read, at `r`, ending in `q`.
    Term(usize, usize, usize, usize),
}

struct Builder<'a> {
    g: &'a IndexedGrammar,
    t: &'a Transducer,
    /// `reach[p][q]`: `q` is reachable from `p`.
    reach: Vec<Vec<bool>>,
    /// Edges by source and by target: `(input, output, other end)`.
    out_edges: Vec<Vec<(Option<Letter>, Option<Letter>, usize)>>,
    in_edges: Vec<Vec<(Option<Letter>, Option<Letter>, usize)>>,
    keys: Interner<Key>,
    todo: VecDeque<usize>,
    prods: BTreeSet<(usize, Rule)>,
}

impl<'a> Builder<'a> {
    fn new(g: &'a IndexedGrammar, t: &'a Transducer) -> Self {
        let n = t.num_states();
        let mut out_edges = vec![Vec::new(); n];
        let mut in_edges = vec![Vec::new(); n];
        for e in t.edges() {
            let (i, o) = (e.input.first().copied(), e.output.first().copied());
            out_edges[e.from].push((i, o, e.to));
            in_edges[e.to].push((i, o, e.from));
        }
        let mut reach = vec![vec![false; n]; n];
        for (p, row) in reach.iter_mut().enumerate() {
            row[p] = true;
            let mut stack = vec![p];
            while let Some(s) = stack.pop() {
                for &(_, _, r) in &out_edges[s] {
                    if !row[r] {
                        row[r] = true;
                        stack.push(r);
                    }
                }
            }
        }
        Builder {
            g,
            t,
            reach,
            out_edges,
            in_edges,
            keys: Interner::new(),
            todo: VecDeque::new(),
            prods: BTreeSet::new(),
        }
    }

    fn id(&mut self, k: Key) -> usize {
        let (id, new) = self.keys.intern(k);
        if new {
            self.todo.push_back(id);
        }
        id
    }

    fn add(&mut self, lhs: usize, rule: Rule) {
        self.prods.insert((lhs, rule));
    }

    fn run(&mut self) {
        while let Some(id) = self.todo.pop_front() {
            match self.keys.keys[id].clone() {
                Key::Trip(p, b, q) => self.trip(id, p, b, q),
                Key::Pre(k, i, r, q) => self.pre(id, k, i, r, q),
                Key::Suf(k, j, s, p) => self.suf(id, k, j, s, p),
                Key::Term(k, i, r, q) => self.term(id, k, i, r, q),
            }
        }
    }

    fn trip(&mut self, id: usize, p: usize, b: usize, q: usize) {
        let g = self.g;
        for (k, prod) in g.productions().iter().enumerate().filter(|(_, x)| x.lhs == b) {
            match (&prod.rule, prod.shape()) {
                (Rule::Push(c, f), _) => {
                    let c = self.id(Key::Trip(p, *c, q));
                    self.add(id, Rule::Push(c, *f));
                }
                (Rule::Pop(f, w), _) => {
                    let Sym::N(c) = w[0] else { unreachable!() };
                    let c = self.id(Key::Trip(p, c, q));
                    self.add(id, Rule::Pop(*f, vec![Sym::N(c)]));
                }
                (Rule::Plain(w), Some(Shape::Split)) => {
                    let (Sym::N(c), Sym::N(d)) = (w[0], w[1]) else { unreachable!() };
                    for r in 0..self.t.num_states() {
                        if self.reach[p][r] && self.reach[r][q] {
                            let x = self.id(Key::Trip(p, c, r));
                            let y = self.id(Key::Trip(r, d, q));
                            self.add(id, Rule::Plain(vec![Sym::N(x), Sym::N(y)]));
                        }
                    }
                }
                (Rule::Plain(_), Some(Shape::Output)) => {
                    let c = self.id(Key::Pre(k, 0, p, q));
                    self.add(id, Rule::Plain(vec![Sym::N(c)]));
                }
                (Rule::Plain(_), Some(Shape::Terminal)) => {
                    let c = self.id(Key::Term(k, 0, p, q));
                    self.add(id, Rule::Plain(vec![Sym::N(c)]));
                }
                _ => unreachable!("grammar is in normal form"),
            }
        }
    }

    /// Splits an output production into `(u, B, v)`.
    fn output_parts(&self, k: usize) -> (Word, usize, Word) {
        let Rule::Plain(w) = &self.g.productions()[k].rule else { unreachable!() };
        let pos = w.iter().position(|s| matches!(s, Sym::N(_))).unwrap();
        let letters = |s: &[Sym]| -> Word {
            s.iter()
                .map(|x| match x {
                    Sym::T(a) => *a,
                    Sym::N(_) => unreachable!(),
                })
                .collect()
        };
        let Sym::N(b) = w[pos] else { unreachable!() };
        (letters(&w[..pos]), b, letters(&w[pos + 1..]))
    }

    fn pre(&mut self, id: usize, k: usize, i: usize, r: usize, q: usize) {
        let (u, _, v) = self.output_parts(k);
        if i == u.len() && self.reach[r][q] {
            let c = self.id(Key::Suf(k, v.len(), q, r));
            self.add(id, Rule::Plain(vec![Sym::N(c)]));
        }
        for (inp, outp, to) in self.out_edges[r].clone() {
            if !self.reach[to][q] {
                continue;
            }
            match (inp, outp) {
                (Some(a), None) if i < u.len() && u[i] == a => {
                    let c = self.id(Key::Pre(k, i + 1, to, q));
                    self.add(id, Rule::Plain(vec![Sym::N(c)]));
                }
                (None, Some(x)) => {
                    let c = self.id(Key::Pre(k, i, to, q));
                    self.add(id, Rule::Plain(vec![Sym::T(x), Sym::N(c)]));
                }
                (None, None) => {
                    let c = self.id(Key::Pre(k, i, to, q));
                    self.add(id, Rule::Plain(vec![Sym::N(c)]));
                }
                _ => {}
            }
        }
    }

    fn suf(&mut self, id: usize, k: usize, j: usize, s: usize, p: usize) {
        let (_, b, v) = self.output_parts(k);
        if j == 0 && self.reach[p][s] {
            let c = self.id(Key::Trip(p, b, s));
            self.add(id, Rule::Plain(vec![Sym::N(c)]));
        }
        for (inp, outp, from) in self.in_edges[s].clone() {
            if !self.reach[p][from] {
                continue;
            }
            match (inp, outp) {
                (Some(a), None) if j > 0 && v[j - 1] == a => {
                    let c = self.id(Key::Suf(k, j - 1, from, p));
                    self.add(id, Rule::Plain(vec![Sym::N(c)]));
                }
                (None, Some(x)) => {
                    let c = self.id(Key::Suf(k, j, from, p));
                    self.add(id, Rule::Plain(vec![Sym::N(c), Sym::T(x)]));
                }
                (None, None) => {
                    let c = self.id(Key::Suf(k, j, from, p));
                    self.add(id, Rule::Plain(vec![Sym::N(c)]));
                }
                _ => {}
            }
        }
    }

    fn term(&mut self, id: usize, k: usize, i: usize, r: usize, q: usize) {
        let Rule::Plain(w) = &self.g.productions()[k].rule else { unreachable!() };
        let w = w.clone();
        if i == w.len() && r == q {
            self.add(id, Rule::Plain(vec![]));
        }
        for (inp, outp, to) in self.out_edges[r].clone() {
            if !self.reach[to][q] {
                continue;
            }
            match (inp, outp) {
                (Some(a), None) if i < w.len() && w[i] == Sym::T(a) => {
                    let c = self.id(Key::Term(k, i + 1, to, q));
                    self.add(id, Rule::Plain(vec![Sym::N(c)]));
                }
                (None, Some(x)) => {
                    let c = self.id(Key::Term(k, i, to, q));
                    self.add(id, Rule::Plain(vec![Sym::T(x), Sym::N(c)]));
                }
                (None, None) => {
                    let c = self.id(Key::Term(k, i, to, q));
                    self.add(id, Rule::Plain(vec![Sym::N(c)]));
                }
                _ => {}
            }
        }
    }

    fn name(&self, k: &Key) -> String {
        match k {
            Key::Trip(p, b, q) => format!("<q{p},{},q{q}>", self.g.nonterminal_name(*b)),
            Key::Pre(k, i, r, q) => format!("[pre{k}.{i},q{r},q{q}]"),
            Key::Suf(k, j, s, p) => format!("[suf{k}.{j},q{s},q{p}]"),
            Key::Term(k, i, r, q) => format!("[term{k}.{i},q{r},q{q}]"),
        }
    }

    fn finish(self, start: usize) -> IndexedGrammar {
        let names: Vec<String> = self.keys.keys.iter().map(|k| self.name(k)).collect();
        let mut out = IndexedGrammar {
            terminals: self.t.output_alphabet().clone(),
            indices: self.g.indices().clone(),
            nonterminals: names,
            start,
            productions: Vec::new(),
        };
        for (lhs, rule) in self.prods {
            out.productions.push(Production { lhs, rule });
        }
        out
    }
}

/// Normalizes both inputs for the construction.
fn prepare(g: &IndexedGrammar, t: &Transducer) -> Result<(IndexedGrammar, Transducer)> {
    t.input_alphabet().ensure_eq(g.terminals())?;
    let g = if g.is_normal_form() { g.clone() } else { g.normalize() };
    let t = if t.is_normalized() { t.clone() } else { t.normalize() };
    Ok((g, t))
}

impl IndexedGrammar {
    /// Grammar for `T(L(self))`.
    pub fn triple_construct(&self, t: &Transducer) -> Result<IndexedGrammar> {
        let (g, t) = prepare(self, t)?;
        let fin = t.finals().next().unwrap();
        let mut b = Builder::new(&g, &t);
        let s = b.id(Key::Trip(t.initial(), g.start(), fin));
        b.run();
        Ok(b.finish(s).trim())
    }

    /// Untrimmed triple grammar with the triples `⟨q₀, A, f⟩` of all
    /// nonterminals `A` of `self` as roots (indexed by the ids of `self`).
    pub(crate) fn triple_all(&self, t: &Transducer) -> Result<(IndexedGrammar, Vec<usize>)> {
        let (g, t) = prepare(self, t)?;
        let fin = t.finals().next().unwrap();
        let mut b = Builder::new(&g, &t);
        let roots: Vec<usize> = (0..self.num_nonterminals())
            .map(|a| b.id(Key::Trip(t.initial(), a, fin)))
            .collect();
        b.run();
        Ok((b.finish(roots[self.start()]), roots))
    }
}

#[cfg(test)]
mod tests {
    use super::super::corpus::*;
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::automata::Nfa;

    /// Image of a finite set of words under `t`, restricted by length.
    fn image(t: &Transducer, ws: &BTreeSet<Word>, max_len: usize) -> BTreeSet<Word> {
        let mut out = BTreeSet::new();
        for w in ws {
            out.extend(t.apply_to_word(w).unwrap().enumerate(max_len));
        }
        out
    }

    #[test]
    fn identity_preserves_language() {
        let g = example();
        let h = g.triple_construct(&Transducer::identity(g.terminals())).unwrap();
        let (a, b) = (g.bounded_language(4, 100_000), h.bounded_language(4, 100_000));
        assert!(a.exhaustive && b.exhaustive);
        assert_eq!(a.words, b.words);
    }

    #[test]
    fn renaming() {
        let g = example();
        let t = Transducer::parse("input: a b\noutput: c d\nstate: q0 initial final\nedge: q0 a c q0\nedge: q0 b d q0\n")
            .unwrap();
        let h = g.triple_construct(&t).unwrap();
        let b = h.bounded_language(4, 100_000);
        assert!(b.exhaustive);
        let cd = Alphabet::of("c d");
        let want: BTreeSet<Word> = ["", "cc", "dd", "cccc", "cdcd", "dcdc", "dddd"]
            .iter()
            .map(|w| cd.parse_word(w).unwrap())
            .collect();
        assert_eq!(b.words, want);
    }

    #[test]
    fn empty_transduction() {
        let g = example();
        let t = Transducer::regular_intersection(&Nfa::empty(g.terminals().clone()));
        let h = g.triple_construct(&t).unwrap();
        let b = h.bounded_language(6, 10_000);
        assert!(b.exhaustive && b.words.is_empty());
    }

    #[test]
    fn matches_image_oracle() {
        let g = anbn();
        let ts = [
            Transducer::subword(g.terminals()),
            Transducer::parse(
                "input: a b\noutput: a b\nstate: p initial\nstate: q final\n\
                 edge: p a b,b p\nedge: p _ a q\nedge: q b _ q\n",
            )
            .unwrap(),
        ];
        for t in &ts {
            let h = g.triple_construct(t).unwrap();
            // deep indices keep producing short images, so the search cannot be exhaustive
            let b = h.bounded_language(4, 100_000);
            let src = g.bounded_language(8, 100_000).words;
            assert_eq!(b.words, image(t, &src, 4));
        }
    }

    #[test]
    fn alphabet_mismatch() {
        let g = example();
        let t = Transducer::identity(&Alphabet::of("a c"));
        assert!(g.triple_construct(&t).is_err());
    }
}
