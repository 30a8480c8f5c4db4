//! Bounded languages: all derivable terminal words up to a length.
//!
//! For a cap `k` on the index depth the words of each pair `(A, x)` with
//! `|x| ≤ k` form a least fixpoint over finitely many pairs.  A push beyond
//! the cap is harmless when a lower bound on the yield length of the pushed
//! nonterminal already exceeds the length limit; the search deepens `k`
//! until every cut is harmless (then the result is exact) or the budget on
//! the number of explored pairs runs out.

use std::collections::{BTreeSet, HashMap, VecDeque};

use super::{is_terminal_word, IndexedGrammar, Item, Production, Rule, Sym};
use crate::alphabet::{Letter, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedLanguage {
    pub words: BTreeSet<Word>,
    /// The set is exactly the language restricted to the length limit.
    pub exhaustive: bool,
}

impl IndexedGrammar {
    /// Terminal words of length `≤ max_len`; `budget` bounds the number of
    /// `(nonterminal, index word)` pairs explored overall.
    pub fn bounded_language(&self, max_len: usize, budget: usize) -> BoundedLanguage {
        self.bounded_language_from(&[Item::N(self.start, Vec::new())], max_len, budget)
    }

    /// Same as [`bounded_language`](Self::bounded_language) starting from an
    /// arbitrary sentential form.
    pub fn bounded_language_from(&self, sf: &[Item], max_len: usize, budget: usize) -> BoundedLanguage {
        let mut words = BTreeSet::new();
        let mut spent = 0;
        for k in 0.. {
            let mut s = Search::new(self, max_len, k, budget.saturating_sub(spent));
            let roots: Vec<Option<usize>> = sf
                .iter()
                .map(|it| match it {
                    Item::N(a, x) => s.key(*a, x.clone(), None),
                    Item::T(_) => None,
                })
                .collect();
            s.run();
            spent += s.keys.len();
            let sets: Vec<BTreeSet<Word>> = sf
                .iter()
                .zip(&roots)
                .map(|(it, r)| match (it, r) {
                    (Item::T(a), _) => BTreeSet::from([vec![*a]]),
                    (Item::N(..), Some(id)) => s.sets[*id].clone(),
                    (Item::N(..), None) => BTreeSet::new(),
                })
                .collect();
            let mut acc = BTreeSet::from([Vec::new()]);
            for set in &sets {
                acc = concat(&acc, set, max_len);
            }
            words.extend(acc);
            if s.over_budget {
                return BoundedLanguage {
                    words,
                    exhaustive: false,
                };
            }
            if !s.harmful_cut {
                return BoundedLanguage {
                    words,
                    exhaustive: true,
                };
            }
        }
        unreachable!()
    }

    /// `lb[A][ℓ]`: lower bound on the length of words derivable from `A`
    /// with an index of length `ℓ` (the last level stands for every length
    /// `≥ levels - 1`), clamped at `cap`.  Index symbols are ignored.
    pub(crate) fn length_bounds(&self, levels: usize, cap: usize) -> Vec<Vec<usize>> {
        let n = self.num_nonterminals();
        let top = levels - 1;
        let mut lb = vec![vec![cap; levels]; n];
        let below = |l: usize| -> Vec<usize> {
            if l == 0 {
                vec![]
            } else if l < top {
                vec![l - 1]
            } else {
                vec![l - 1, l]
            }
        };
        let sum = |lb: &Vec<Vec<usize>>, w: &[Sym], l: usize| -> usize {
            w.iter()
                .map(|s| match s {
                    Sym::T(_) => 1,
                    Sym::N(b) => lb[*b][l],
                })
                .fold(0usize, |a, b| a.saturating_add(b))
                .min(cap)
        };
        let mut changed = true;
        while changed {
            changed = false;
            for p in &self.productions {
                for l in 0..levels {
                    let v = match &p.rule {
                        Rule::Plain(w) if is_terminal_word(w) => {
                            if l == 0 {
                                w.len().min(cap)
                            } else {
                                cap
                            }
                        }
                        Rule::Plain(w) => sum(&lb, w, l),
                        Rule::Push(b, _) => lb[*b][(l + 1).min(top)],
                        Rule::Pop(_, w) => below(l)
                            .into_iter()
                            .filter(|&m| m == 0 || !is_terminal_word(w))
                            .map(|m| sum(&lb, w, m))
                            .min()
                            .unwrap_or(cap),
                    };
                    if v < lb[p.lhs][l] {
                        lb[p.lhs][l] = v;
                        changed = true;
                    }
                }
            }
        }
        lb
    }
}

struct Search<'g> {
    max_len: usize,
    depth: usize,
    budget: usize,
    lb: Vec<Vec<usize>>,
    by_lhs: Vec<Vec<&'g Production>>,
    ids: HashMap<(usize, Word), usize>,
    keys: Vec<(usize, Word)>,
    sets: Vec<BTreeSet<Word>>,
    dependents: Vec<BTreeSet<usize>>,
    queue: VecDeque<usize>,
    queued: Vec<bool>,
    harmful_cut: bool,
    over_budget: bool,
}

impl<'g> Search<'g> {
    fn new(g: &'g IndexedGrammar, max_len: usize, depth: usize, budget: usize) -> Self {
        let mut by_lhs = vec![Vec::new(); g.num_nonterminals()];
        for p in g.productions() {
            by_lhs[p.lhs].push(p);
        }
        Search {
            max_len,
            depth,
            budget,
            lb: g.length_bounds(depth + 2, max_len + 1),
            by_lhs,
            ids: HashMap::new(),
            keys: Vec::new(),
            sets: Vec::new(),
            dependents: Vec::new(),
            queue: VecDeque::new(),
            queued: Vec::new(),
            harmful_cut: false,
            over_budget: false,
        }
    }

    fn bound(&self, a: usize, depth: usize) -> usize {
        self.lb[a][depth.min(self.depth + 1)]
    }

    /// Id of the pair `(a, x)`, or `None` when it cannot contribute.
    fn key(&mut self, a: usize, x: Word, parent: Option<usize>) -> Option<usize> {
        if self.bound(a, x.len()) > self.max_len {
            return None;
        }
        if x.len() > self.depth {
            self.harmful_cut = true;
            return None;
        }
        let id = match self.ids.get(&(a, x.clone())) {
            Some(&id) => id,
            None => {
                if self.keys.len() >= self.budget {
                    self.over_budget = true;
                    return None;
                }
                let id = self.keys.len();
                self.ids.insert((a, x.clone()), id);
                self.keys.push((a, x));
                self.sets.push(BTreeSet::new());
                self.dependents.push(BTreeSet::new());
                self.queued.push(true);
                self.queue.push_back(id);
                id
            }
        };
        if let Some(p) = parent {
            self.dependents[id].insert(p);
        }
        Some(id)
    }

    fn run(&mut self) {
        while let Some(id) = self.queue.pop_front() {
            self.queued[id] = false;
            let fresh = self.eval(id);
            if fresh.len() > self.sets[id].len() {
                self.sets[id] = fresh;
                for d in self.dependents[id].clone() {
                    if !self.queued[d] {
                        self.queued[d] = true;
                        self.queue.push_back(d);
                    }
                }
            }
        }
    }

    fn eval(&mut self, id: usize) -> BTreeSet<Word> {
        let (a, x) = self.keys[id].clone();
        let mut out = self.sets[id].clone();
        let prods = self.by_lhs[a].clone();
        for p in prods {
            match &p.rule {
                Rule::Plain(w) => {
                    if is_terminal_word(w) && !x.is_empty() {
                        continue;
                    }
                    out.extend(self.body(id, w, &x));
                }
                Rule::Push(b, f) => {
                    let mut y = Vec::with_capacity(x.len() + 1);
                    y.push(*f);
                    y.extend_from_slice(&x);
                    if let Some(c) = self.key(*b, y, Some(id)) {
                        out.extend(self.sets[c].iter().cloned());
                    }
                }
                Rule::Pop(f, w) => {
                    let Some((top, rest)) = x.split_first() else { continue };
                    if top != f || (is_terminal_word(w) && !rest.is_empty()) {
                        continue;
                    }
                    out.extend(self.body(id, w, rest));
                }
            }
        }
        out
    }

    /// Words of `[w, x]` within the length limit.
    fn body(&mut self, parent: usize, w: &[Sym], x: &[Letter]) -> BTreeSet<Word> {
        let rest_lb: Vec<usize> = {
            let mut acc = vec![0usize; w.len() + 1];
            for i in (0..w.len()).rev() {
                let l = match w[i] {
                    Sym::T(_) => 1,
                    Sym::N(b) => self.bound(b, x.len()),
                };
                acc[i] = acc[i + 1].saturating_add(l);
            }
            acc
        };
        if rest_lb[0] > self.max_len {
            return BTreeSet::new();
        }
        let mut acc: BTreeSet<Word> = BTreeSet::from([Vec::new()]);
        for (i, s) in w.iter().enumerate() {
            let limit = self.max_len - rest_lb[i + 1].min(self.max_len);
            acc = match s {
                Sym::T(a) => acc
                    .into_iter()
                    .filter(|u| u.len() < limit)
                    .map(|mut u| {
                        u.push(*a);
                        u
                    })
                    .collect(),
                Sym::N(b) => match self.key(*b, x.to_vec(), Some(parent)) {
                    Some(c) => concat(&acc, &self.sets[c], limit),
                    None => BTreeSet::new(),
                },
            };
            if acc.is_empty() {
                break;
            }
        }
        acc
    }
}

fn concat(left: &BTreeSet<Word>, right: &BTreeSet<Word>, limit: usize) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for u in left {
        for v in right {
            if u.len() + v.len() <= limit {
                let mut w = u.clone();
                w.extend_from_slice(v);
                out.insert(w);
            }
        }
    }
    out
}
