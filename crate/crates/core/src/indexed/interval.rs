//! Interval grammars: every nonterminal `A` carries `ι(A) = (i, j)` and only
//! derives words in `aᵢ* ⋯ aⱼ*`, with letters numbered from 1 in the order
//! of the terminal alphabet.

use std::collections::BTreeSet;
use std::fmt;

use super::{parse_document, IndexedGrammar, Production, Rule, Shape, Sym};
use crate::alphabet::Letter;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalGrammar {
    pub grammar: IndexedGrammar,
    /// `ι`, indexed by nonterminal id.
    pub iota: Vec<(usize, usize)>,
}

/// `w ∈ aᵢ* ⋯ aⱼ*` (1-based, inclusive).
pub(crate) fn in_blocks(w: &[Letter], i: usize, j: usize) -> bool {
    let mut cur = i;
    for &a in w {
        let k = a + 1;
        if k < cur || k > j {
            return false;
        }
        cur = k;
    }
    true
}

fn letters(w: &[Sym]) -> Vec<Letter> {
    w.iter()
        .filter_map(|s| match s {
            Sym::T(a) => Some(*a),
            Sym::N(_) => None,
        })
        .collect()
}

/// `(u, B, v)` of an output production body.
pub(crate) fn output_parts(w: &[Sym]) -> (Vec<Letter>, usize, Vec<Letter>) {
    let pos = w.iter().position(|s| matches!(s, Sym::N(_))).unwrap();
    let Sym::N(b) = w[pos] else { unreachable!() };
    (letters(&w[..pos]), b, letters(&w[pos + 1..]))
}

impl IntervalGrammar {
    pub fn n(&self) -> usize {
        self.grammar.terminals().len()
    }

    /// Checks the syntactic interval conditions: normal form, `1 ≤ i ≤ j ≤ n`
    /// and that every production keeps its right-hand side inside the
    /// interval of its left-hand side, in order.
    pub fn check(&self) -> Result<()> {
        let g = &self.grammar;
        let n = self.n();
        if self.iota.len() != g.num_nonterminals() {
            return Err(Error::Invalid("interval map does not cover all nonterminals".into()));
        }
        for (a, &(i, j)) in self.iota.iter().enumerate() {
            if !(1 <= i && i <= j && j <= n) {
                return Err(Error::Invalid(format!(
                    "interval ({i},{j}) of `{}` is not inside 1..{n}",
                    g.nonterminal_name(a)
                )));
            }
        }
        for p in g.productions() {
            if !self.consistent(p) {
                return Err(Error::Invalid(format!(
                    "production `{}` leaves its interval",
                    g.format_production(p)
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn consistent(&self, p: &Production) -> bool {
        let (i, j) = self.iota[p.lhs];
        let inside = |b: usize| {
            let (r, s) = self.iota[b];
            i <= r && s <= j
        };
        match (&p.rule, p.shape()) {
            (Rule::Push(b, _), _) => inside(*b),
            (Rule::Pop(_, w), Some(Shape::Pop)) => {
                let Sym::N(b) = w[0] else { unreachable!() };
                inside(b)
            }
            (Rule::Plain(w), Some(Shape::Terminal)) => in_blocks(&letters(w), i, j),
            (Rule::Plain(w), Some(Shape::Output)) => {
                let (u, b, v) = output_parts(w);
                let (r, s) = self.iota[b];
                inside(b) && in_blocks(&u, i, r) && in_blocks(&v, s, j)
            }
            (Rule::Plain(w), Some(Shape::Split)) => {
                let (Sym::N(b), Sym::N(c)) = (w[0], w[1]) else { unreachable!() };
                let ((p, q), (r, s)) = (self.iota[b], self.iota[c]);
                i <= p && p <= q && q <= r && r <= s && s <= j
            }
            _ => false,
        }
    }

    pub fn parse(src: &str) -> Result<IntervalGrammar> {
        let doc = parse_document(src)?;
        if let Some((no, _)) = doc.direct {
            return Err(Error::parse(no, "`direct:` is only allowed in partitioned grammars"));
        }
        let ig = from_document(doc.grammar, &doc.intervals)?;
        ig.check()?;
        Ok(ig)
    }
}

pub(crate) fn from_document(
    grammar: IndexedGrammar,
    intervals: &[(usize, (usize, usize, usize))],
) -> Result<IntervalGrammar> {
    let mut iota = vec![None; grammar.num_nonterminals()];
    for &(no, (a, i, j)) in intervals {
        if iota[a].replace((i, j)).is_some() {
            return Err(Error::parse(no, "interval declared twice"));
        }
    }
    let iota = iota
        .into_iter()
        .enumerate()
        .map(|(a, x)| {
            x.ok_or_else(|| {
                Error::parse(0, format!("no interval for `{}`", grammar.nonterminal_name(a)))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IntervalGrammar { grammar, iota })
}

impl fmt::Display for IntervalGrammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.grammar)?;
        for (a, (i, j)) in self.iota.iter().enumerate() {
            writeln!(f, "interval: {} {i} {j}", self.grammar.nonterminal_name(a))?;
        }
        Ok(())
    }
}

impl IndexedGrammar {
    /// Equivalent interval grammar for `L(self) ∩ a₁* ⋯ aₙ*`, where `a₁ … aₙ`
    /// is the terminal alphabet in order.
    pub fn to_interval(&self) -> Result<IntervalGrammar> {
        let n = self.terminals.len();
        if n == 0 {
            return Err(Error::Invalid("interval grammars need at least one terminal".into()));
        }
        let g = if self.is_normal_form() { self.clone() } else { self.normalize() };
        let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|i| (i..=n).map(move |j| (i, j))).collect();
        let mut names = Vec::new();
        let mut id = vec![vec![vec![usize::MAX; n + 1]; n + 1]; g.num_nonterminals()];
        for a in 0..g.num_nonterminals() {
            for &(i, j) in &pairs {
                id[a][i][j] = names.len();
                names.push(((i, j), format!("<{i},{},{j}>", g.nonterminal_name(a))));
            }
        }
        let mut out = IndexedGrammar {
            terminals: g.terminals.clone(),
            indices: g.indices.clone(),
            nonterminals: names.iter().map(|x| x.1.clone()).collect(),
            start: id[g.start][1][n],
            productions: Vec::new(),
        };
        let mut seen = BTreeSet::new();
        let mut add = |out: &mut IndexedGrammar, lhs: usize, rule: Rule| {
            let p = Production { lhs, rule };
            if seen.insert(p.clone()) {
                out.productions.push(p);
            }
        };
        for p in &g.productions {
            for &(i, j) in &pairs {
                let lhs = id[p.lhs][i][j];
                match (&p.rule, p.shape()) {
                    (Rule::Push(b, f), _) => add(&mut out, lhs, Rule::Push(id[*b][i][j], *f)),
                    (Rule::Pop(f, w), _) => {
                        let Sym::N(b) = w[0] else { unreachable!() };
                        add(&mut out, lhs, Rule::Pop(*f, vec![Sym::N(id[b][i][j])]));
                    }
                    (Rule::Plain(w), Some(Shape::Terminal)) => {
                        if in_blocks(&letters(w), i, j) {
                            add(&mut out, lhs, Rule::Plain(w.clone()));
                        }
                    }
                    (Rule::Plain(w), Some(Shape::Output)) => {
                        let (u, b, v) = output_parts(w);
                        for r in i..=j {
                            for s in r..=j {
                                if in_blocks(&u, i, r) && in_blocks(&v, s, j) {
                                    let mut body: Vec<Sym> = u.iter().map(|&a| Sym::T(a)).collect();
                                    body.push(Sym::N(id[b][r][s]));
                                    body.extend(v.iter().map(|&a| Sym::T(a)));
                                    add(&mut out, lhs, Rule::Plain(body));
                                }
                            }
                        }
                    }
                    (Rule::Plain(w), Some(Shape::Split)) => {
                        let (Sym::N(b), Sym::N(c)) = (w[0], w[1]) else { unreachable!() };
                        for k in i..=j {
                            add(
                                &mut out,
                                lhs,
                                Rule::Plain(vec![Sym::N(id[b][i][k]), Sym::N(id[c][k][j])]),
                            );
                        }
                    }
                    _ => unreachable!("grammar is in normal form"),
                }
            }
        }
        let (trimmed, map) = out.trim_with_map();
        let mut iota = vec![(0, 0); trimmed.num_nonterminals()];
        for (old, new) in map.iter().enumerate() {
            if let Some(new) = new {
                iota[*new] = names[old].0;
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
    use crate::alphabet::Word;

    fn bounded(w: &Word, n: usize) -> bool {
        in_blocks(w, 1, n)
    }

    #[test]
    fn blocks() {
        assert!(in_blocks(&[0, 0, 1], 1, 2));
        assert!(!in_blocks(&[1, 0], 1, 2));
        assert!(!in_blocks(&[0], 2, 2));
        assert!(in_blocks(&[], 2, 2));
    }

    #[test]
    fn single_word() {
        let g = IndexedGrammar::parse("terminals: a b\nstart: S\nS -> a b\n").unwrap();
        let ig = g.to_interval().unwrap();
        ig.check().unwrap();
        let b = ig.grammar.bounded_language(4, 1000);
        assert_eq!(b.words, BTreeSet::from([vec![0, 1]]));
    }

    #[test]
    fn empty_language() {
        let g = IndexedGrammar::parse("terminals: a b\nstart: S\nS -> S a\n").unwrap();
        let ig = g.to_interval().unwrap();
        let b = ig.grammar.bounded_language(6, 1000);
        assert!(b.exhaustive && b.words.is_empty());
    }

    #[test]
    fn preserves_bounded_part() {
        for (g, len) in [(anbn(), 6), (anbncn(), 6), (example(), 5)] {
            let ig = g.to_interval().unwrap();
            ig.check().unwrap();
            let n = g.terminals().len();
            let (a, b) = (g.bounded_language(len, 100_000), ig.grammar.bounded_language(len, 100_000));
            assert!(a.exhaustive && b.exhaustive);
            let want: BTreeSet<Word> = a.words.into_iter().filter(|w| bounded(w, n)).collect();
            assert_eq!(b.words, want);
        }
    }

    #[test]
    fn text_roundtrip() {
        let ig = anbn().to_interval().unwrap();
        let again = IntervalGrammar::parse(&ig.to_string()).unwrap();
        let lines = |x: &IntervalGrammar| x.to_string().lines().map(str::to_string).collect::<BTreeSet<_>>();
        assert_eq!(lines(&again), lines(&ig));
    }
}
