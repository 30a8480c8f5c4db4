//! Partitioned grammars: interval grammars with a set `D` of direct
//! letters.  A direct letter is never produced below a unary nonterminal;
//! every other letter is produced by a single subtree.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use super::interval::{from_document, IntervalGrammar};
use super::{is_terminal_word, parse_document, IndexedGrammar, Production, Rule, Sym};
use crate::alphabet::Letter;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionedGrammar {
    pub grammar: IntervalGrammar,
    /// The direct letters, in alphabet order.
    pub direct: Vec<Letter>,
}

impl PartitionedGrammar {
    pub fn check(&self) -> Result<()> {
        self.grammar.check()?;
        for (a, &(i, j)) in self.grammar.iota.iter().enumerate() {
            if i == j && self.direct.contains(&(i - 1)) {
                return Err(Error::Invalid(format!(
                    "`{}` is unary for the direct letter `{}`",
                    self.grammar.grammar.nonterminal_name(a),
                    self.grammar.grammar.terminals().name(i - 1)
                )));
            }
        }
        Ok(())
    }

    pub fn parse(src: &str) -> Result<PartitionedGrammar> {
        let doc = parse_document(src)?;
        let direct = doc.direct.map(|d| d.1).unwrap_or_default();
        let pg = PartitionedGrammar {
            grammar: from_document(doc.grammar, &doc.intervals)?,
            direct,
        };
        pg.check()?;
        Ok(pg)
    }
}

impl fmt::Display for PartitionedGrammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.grammar)?;
        let t = self.grammar.grammar.terminals();
        let names: Vec<&str> = self.direct.iter().map(|&a| t.name(a)).collect();
        writeln!(f, "direct: {}", names.join(" "))
    }
}

/// Builds an interval grammar nonterminal by nonterminal.
struct Out {
    names: Vec<String>,
    iota: Vec<(usize, usize)>,
    prods: BTreeSet<(usize, Rule)>,
    escapes: HashMap<(Vec<Sym>, (usize, usize), String), usize>,
}

impl Out {
    fn new() -> Self {
        Out {
            names: Vec::new(),
            iota: Vec::new(),
            prods: BTreeSet::new(),
            escapes: HashMap::new(),
        }
    }

    fn add_nt(&mut self, name: String, iota: (usize, usize)) -> usize {
        self.names.push(name);
        self.iota.push(iota);
        self.names.len() - 1
    }

    /// `lhs → E`, `E f → E` for every index and `E → w`: derives `w` after
    /// discarding whatever index `lhs` carries.
    fn escape(&mut self, lhs: usize, w: Vec<Sym>, k: usize, stem: &str) {
        let key = (w.clone(), self.iota[lhs], stem.to_string());
        let e = match self.escapes.get(&key) {
            Some(&e) => e,
            None => {
                let e = self.add_nt(format!("{stem}{}", self.escapes.len()), self.iota[lhs]);
                self.escapes.insert(key, e);
                for f in 0..k {
                    self.prods.insert((e, Rule::Pop(f, vec![Sym::N(e)])));
                }
                self.prods.insert((e, Rule::Plain(w)));
                e
            }
        };
        self.prods.insert((lhs, Rule::Plain(vec![Sym::N(e)])));
    }

    fn finish(self, like: &IndexedGrammar, start: usize) -> IntervalGrammar {
        let g = IndexedGrammar {
            terminals: like.terminals().clone(),
            indices: like.indices().clone(),
            nonterminals: self.names,
            start,
            productions: self.prods.into_iter().map(|(lhs, rule)| Production { lhs, rule }).collect(),
        };
        let (trimmed, map) = g.trim_with_map();
        let mut iota = vec![(0, 0); trimmed.num_nonterminals()];
        for (old, new) in map.iter().enumerate() {
            if let Some(new) = new {
                iota[*new] = self.iota[old];
            }
        }
        IntervalGrammar {
            grammar: trimmed,
            iota,
        }
    }
}

/// A stem no existing nonterminal name starts with.
fn fresh_stem(g: &IndexedGrammar, stem: &str) -> String {
    (0..)
        .map(|i| format!("{stem}{i}."))
        .find(|s| (0..g.num_nonterminals()).all(|a| !g.nonterminal_name(a).starts_with(s.as_str())))
        .unwrap()
}

fn copy_names(ig: &IntervalGrammar) -> Out {
    let mut out = Out::new();
    for a in 0..ig.grammar.num_nonterminals() {
        out.add_nt(ig.grammar.nonterminal_name(a).to_string(), ig.iota[a]);
    }
    out
}

/// Drops productions that leave their interval and routes pushes and pops
/// between different intervals through a unit production.
fn strict_form(ig: &IntervalGrammar) -> IntervalGrammar {
    let g = &ig.grammar;
    let mut out = copy_names(ig);
    let stem = fresh_stem(g, "_Z");
    let mut units: HashMap<(usize, (usize, usize)), usize> = HashMap::new();
    let mut unit = |out: &mut Out, b: usize, iota: (usize, usize)| -> usize {
        *units.entry((b, iota)).or_insert_with(|| {
            let z = out.add_nt(format!("{stem}{}", out.names.len()), iota);
            out.prods.insert((z, Rule::Plain(vec![Sym::N(b)])));
            z
        })
    };
    for p in g.productions() {
        if !ig.consistent(p) {
            continue;
        }
        let here = ig.iota[p.lhs];
        let rule = match &p.rule {
            Rule::Push(b, f) if ig.iota[*b] != here => Rule::Push(unit(&mut out, *b, here), *f),
            Rule::Pop(f, w) => match w[0] {
                Sym::N(b) if ig.iota[b] != here => Rule::Pop(*f, vec![Sym::N(unit(&mut out, b, here))]),
                _ => p.rule.clone(),
            },
            r => r.clone(),
        };
        out.prods.insert((p.lhs, rule));
    }
    out.finish(g, g.start())
}

/// `G'_D`: unary nonterminals of direct letters become single letters.
fn direct_collapse(ig: &IntervalGrammar, direct: &[Letter]) -> IntervalGrammar {
    let g = &ig.grammar;
    let unary_direct = |b: usize| {
        let (i, j) = ig.iota[b];
        (i == j && direct.contains(&(i - 1))).then_some(i - 1)
    };
    let mut out = copy_names(ig);
    let stem = fresh_stem(g, "_E");
    for p in g.productions() {
        if unary_direct(p.lhs).is_some() {
            continue;
        }
        match &p.rule {
            Rule::Push(b, _) if unary_direct(*b).is_some() => {}
            Rule::Pop(_, w) if matches!(w[0], Sym::N(b) if unary_direct(b).is_some()) => {}
            Rule::Plain(w) if !is_terminal_word(w) => {
                let w2: Vec<Sym> = w
                    .iter()
                    .map(|s| match s {
                        Sym::N(b) => unary_direct(*b).map_or(*s, Sym::T),
                        t => *t,
                    })
                    .collect();
                if is_terminal_word(&w2) {
                    out.escape(p.lhs, w2, g.indices().len(), &stem);
                } else {
                    out.prods.insert((p.lhs, Rule::Plain(w2)));
                }
            }
            r => {
                out.prods.insert((p.lhs, r.clone()));
            }
        }
    }
    out.finish(g, g.start())
}

const ZERO: u8 = 0;
const ONE: u8 = 1;
const OMEGA: u8 = 2;

/// `G_D`: for every non-direct letter exactly one of its subtrees is kept,
/// tracked by `α: T∖D → {0, 1, ω}` on every nonterminal.
fn single_subtrees(ig: &IntervalGrammar, direct: &[Letter]) -> IntervalGrammar {
    let g = &ig.grammar;
    let nd: Vec<Letter> = g.terminals().letters().filter(|a| !direct.contains(a)).collect();
    let mut by_lhs: Vec<Vec<&Production>> = vec![Vec::new(); g.num_nonterminals()];
    for p in g.productions() {
        by_lhs[p.lhs].push(p);
    }
    let stem = fresh_stem(g, "_E");
    let mut out = Out::new();
    // escapes are interleaved with these, so ids are those of `out`
    let mut ids: HashMap<(usize, Vec<u8>), usize> = HashMap::new();
    let mut todo = VecDeque::new();
    let mut node = |out: &mut Out, todo: &mut VecDeque<(usize, usize, Vec<u8>)>, a: usize, alpha: Vec<u8>| -> usize {
        *ids.entry((a, alpha.clone())).or_insert_with(|| {
            let tag: String = alpha.iter().map(|&x| ['0', '1', 'w'][x as usize]).collect();
            let id = out.add_nt(format!("{}~{tag}", g.nonterminal_name(a)), ig.iota[a]);
            todo.push_back((id, a, alpha));
            id
        })
    };
    let start = node(&mut out, &mut todo, g.start(), vec![ONE; nd.len()]);
    let holds = |b: usize, letter: Letter| {
        let (r, s) = ig.iota[b];
        r <= letter + 1 && letter + 1 <= s
    };
    while let Some((id, a, alpha)) = todo.pop_front() {
        let inside = alpha.contains(&OMEGA);
        for p in &by_lhs[a] {
            match &p.rule {
                Rule::Push(b, f) => {
                    let c = node(&mut out, &mut todo, *b, alpha.clone());
                    out.prods.insert((id, Rule::Push(c, *f)));
                }
                Rule::Pop(f, w) => {
                    let Sym::N(b) = w[0] else { unreachable!() };
                    let c = node(&mut out, &mut todo, b, alpha.clone());
                    out.prods.insert((id, Rule::Pop(*f, vec![Sym::N(c)])));
                }
                Rule::Plain(w) if inside => {
                    let body = w
                        .iter()
                        .map(|s| match s {
                            Sym::N(b) => Sym::N(node(&mut out, &mut todo, *b, alpha.clone())),
                            t => *t,
                        })
                        .collect();
                    out.prods.insert((id, Rule::Plain(body)));
                }
                Rule::Plain(w) => {
                    // candidate positions for the kept subtree of each letter
                    let options: Vec<Vec<Option<usize>>> = nd
                        .iter()
                        .zip(&alpha)
                        .map(|(&l, &x)| {
                            if x == ZERO {
                                return vec![None];
                            }
                            (0..w.len())
                                .filter(|&pos| match w[pos] {
                                    Sym::T(c) => c == l,
                                    Sym::N(b) => holds(b, l),
                                })
                                .map(Some)
                                .collect()
                        })
                        .collect();
                    for choice in cartesian(&options) {
                        let mut body = Vec::new();
                        for (pos, s) in w.iter().enumerate() {
                            let chosen_for = |l: usize| choice[l] == Some(pos);
                            match *s {
                                Sym::T(c) => match nd.iter().position(|&l| l == c) {
                                    Some(l) if !chosen_for(l) => {}
                                    _ => body.push(*s),
                                },
                                Sym::N(b) => {
                                    let (r, s2) = ig.iota[b];
                                    let unary_nd = (r == s2).then(|| nd.iter().position(|&l| l + 1 == r)).flatten();
                                    let child_alpha: Vec<u8> = match unary_nd {
                                        Some(l) if chosen_for(l) => {
                                            (0..nd.len()).map(|m| if m == l { OMEGA } else { ZERO }).collect()
                                        }
                                        Some(_) => continue,
                                        None => (0..nd.len()).map(|m| if chosen_for(m) { ONE } else { ZERO }).collect(),
                                    };
                                    body.push(Sym::N(node(&mut out, &mut todo, b, child_alpha)));
                                }
                            }
                        }
                        if !is_terminal_word(w) && is_terminal_word(&body[..]) {
                            out.escape(id, body, g.indices().len(), &stem);
                        } else {
                            out.prods.insert((id, Rule::Plain(body)));
                        }
                    }
                }
            }
        }
    }
    out.finish(g, start)
}

fn cartesian(options: &[Vec<Option<usize>>]) -> Vec<Vec<Option<usize>>> {
    let mut acc = vec![Vec::new()];
    for opts in options {
        acc = acc
            .into_iter()
            .flat_map(|prefix: Vec<Option<usize>>| {
                opts.iter().map(move |o| {
                    let mut v = prefix.clone();
                    v.push(*o);
                    v
                })
            })
            .collect();
    }
    acc
}

impl IntervalGrammar {
    /// One partitioned grammar per set of direct letters (`2ⁿ` of them), or
    /// the grammar itself with `D = ∅` when `n = 1`.  Expects a productive
    /// interval grammar.
    pub fn partitioned_family(&self) -> Vec<PartitionedGrammar> {
        let n = self.n();
        if n == 1 {
            return vec![PartitionedGrammar {
                grammar: self.clone(),
                direct: Vec::new(),
            }];
        }
        let strict = strict_form(self);
        (0..1usize << n)
            .map(|mask| {
                let direct: Vec<Letter> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                let collapsed = direct_collapse(&strict, &direct);
                PartitionedGrammar {
                    grammar: single_subtrees(&collapsed, &direct),
                    direct,
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::super::corpus::*;
    use super::*;
    use crate::alphabet::{is_subword, Word};

    fn dominated(pg: &PartitionedGrammar, src: &BTreeSet<Word>) {
        let b = pg.grammar.grammar.bounded_language(5, 100_000);
        for w in &b.words {
            assert!(src.iter().any(|v| is_subword(w, v)), "{w:?} not dominated");
        }
    }

    #[test]
    fn unary_alphabet_is_already_partitioned() {
        let g = IndexedGrammar::parse("terminals: a\nindices: f\nstart: S\nS -> S ^f | A\nA ?f -> A A\nA -> a\n")
            .unwrap();
        let pg = g.to_interval().unwrap().to_productive().unwrap();
        let fam = pg.partitioned_family();
        assert_eq!(fam.len(), 1);
        assert!(fam[0].direct.is_empty());
        assert_eq!(fam[0].grammar, pg);
    }

    #[test]
    fn family_is_dominated() {
        for g in [anbn(), anbncn(), example()] {
            let pg = g.to_interval().unwrap().to_productive().unwrap();
            let src = pg.grammar.bounded_language(10, 200_000).words;
            let fam = pg.partitioned_family();
            assert_eq!(fam.len(), 1 << g.terminals().len());
            for d in &fam {
                d.check().unwrap();
                dominated(d, &src);
            }
        }
    }

    #[test]
    fn some_member_keeps_growing() {
        // aⁿbⁿ: with D = {a, b} every letter is its own unary subtree
        let pg = anbn().to_interval().unwrap().to_productive().unwrap();
        let fam = pg.partitioned_family();
        let full = fam.iter().find(|d| d.direct.len() == 2).unwrap();
        let b = full.grammar.grammar.bounded_language(6, 100_000);
        assert!(b.words.contains(&vec![0, 0, 0, 1, 1, 1]));
    }

    #[test]
    fn text_roundtrip() {
        let pg = anbn().to_interval().unwrap().to_productive().unwrap();
        for d in pg.partitioned_family() {
            let again = PartitionedGrammar::parse(&d.to_string()).unwrap();
            assert_eq!(again.direct, d.direct);
            assert_eq!(
                again.grammar.grammar.bounded_language(5, 100_000),
                d.grammar.grammar.bounded_language(5, 100_000)
            );
        }
    }
}
