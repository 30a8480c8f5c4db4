//! Indexed grammars: nonterminals carry a stack of index symbols that is
//! copied to every nonterminal of a right-hand side.
//!
//! Besides the derivation relation this module hosts the transformation
//! pipeline (normal form, transductions via triples, regular index sets,
//! interval, productive and partitioned grammars), a generator for the PCP
//! grammars and a bounded search that serves as the oracle for all of them.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::alphabet::{Alphabet, Letter, Word};
use crate::error::{Error, Result};
use crate::text;

pub use crate::cfg::Sym;

mod bounded;
mod interval;
mod iw;
mod normalize;
mod partition;
mod pcp;
mod productive;
mod triple;

pub use bounded::BoundedLanguage;
pub use interval::IntervalGrammar;
pub use partition::PartitionedGrammar;
pub use pcp::{nu, pcp_grammar};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    /// `A → w`
    Plain(Vec<Sym>),
    /// `A → B f`
    Push(usize, Letter),
    /// `A f → w`
    Pop(Letter, Vec<Sym>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Production {
    pub lhs: usize,
    pub rule: Rule,
}

/// The five production shapes of the normal form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Push,
    Pop,
    Output,
    Split,
    Terminal,
}

impl Production {
    pub fn shape(&self) -> Option<Shape> {
        let nts = |w: &[Sym]| w.iter().filter(|s| matches!(s, Sym::N(_))).count();
        match &self.rule {
            Rule::Push(..) => Some(Shape::Push),
            Rule::Pop(_, w) => (w.len() == 1 && nts(w) == 1).then_some(Shape::Pop),
            Rule::Plain(w) => match nts(w) {
                0 => Some(Shape::Terminal),
                1 => Some(Shape::Output),
                2 if w.len() == 2 => Some(Shape::Split),
                _ => None,
            },
        }
    }
}

/// One item of a sentential form; index words are stored top symbol first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Item {
    T(Letter),
    N(usize, Word),
}

pub type SententialForm = Vec<Item>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexedGrammar {
    terminals: Alphabet,
    indices: Alphabet,
    nonterminals: Vec<String>,
    start: usize,
    productions: Vec<Production>,
}

pub(crate) fn is_terminal_word(w: &[Sym]) -> bool {
    w.iter().all(|s| matches!(s, Sym::T(_)))
}

impl IndexedGrammar {
    pub fn new(terminals: Alphabet, indices: Alphabet, start: &str) -> Self {
        IndexedGrammar {
            terminals,
            indices,
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

    pub fn add_production(&mut self, lhs: usize, rule: Rule) {
        self.productions.push(Production { lhs, rule });
    }

    /// `lhs → rhs` with tokens; terminals are recognised by name, `_` is ε.
    pub fn add_plain(&mut self, lhs: &str, rhs: &[&str]) {
        let l = self.nonterminal(lhs);
        let r = self.symbols(rhs);
        self.add_production(l, Rule::Plain(r));
    }

    /// `lhs → b f`.
    pub fn add_push(&mut self, lhs: &str, b: &str, f: &str) {
        let l = self.nonterminal(lhs);
        let b = self.nonterminal(b);
        let f = self.indices.letter(f).expect("declared index");
        self.add_production(l, Rule::Push(b, f));
    }

    /// `lhs f → rhs`.
    pub fn add_pop(&mut self, lhs: &str, f: &str, rhs: &[&str]) {
        let l = self.nonterminal(lhs);
        let f = self.indices.letter(f).expect("declared index");
        let r = self.symbols(rhs);
        self.add_production(l, Rule::Pop(f, r));
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

    pub fn indices(&self) -> &Alphabet {
        &self.indices
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

    pub fn nonterminal_id(&self, name: &str) -> Option<usize> {
        self.nonterminals.iter().position(|n| n == name)
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    /// Same grammar with another start symbol.
    pub fn with_start(&self, a: usize) -> IndexedGrammar {
        let mut g = self.clone();
        g.start = a;
        g
    }

    pub fn is_normal_form(&self) -> bool {
        self.productions.iter().all(|p| p.shape().is_some())
    }

    /// A name starting with `stem` that is not yet used by any symbol.
    pub(crate) fn fresh_name(&self, stem: &str, taken: &BTreeSet<String>) -> String {
        (0..)
            .map(|i| format!("{stem}{i}"))
            .find(|n| {
                !taken.contains(n)
                    && !self.nonterminals.contains(n)
                    && self.terminals.index_of(n).is_none()
                    && self.indices.index_of(n).is_none()
            })
            .unwrap()
    }

    /// Nonterminals that can derive a terminal word when indices are ignored
    /// (an over-approximation of true productivity).
    fn productive(&self) -> Vec<bool> {
        let mut prod = vec![false; self.nonterminals.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for p in &self.productions {
                if prod[p.lhs] {
                    continue;
                }
                let ok = match &p.rule {
                    Rule::Push(b, _) => prod[*b],
                    Rule::Plain(w) | Rule::Pop(_, w) => w.iter().all(|s| match s {
                        Sym::N(b) => prod[*b],
                        Sym::T(_) => true,
                    }),
                };
                if ok {
                    prod[p.lhs] = true;
                    changed = true;
                }
            }
        }
        prod
    }

    /// Removes nonterminals that are unreachable from the start or cannot
    /// derive terminal words even when indices are ignored.  Returns the
    /// renaming of the surviving nonterminals.
    pub(crate) fn trim_with_map(&self) -> (IndexedGrammar, Vec<Option<usize>>) {
        let prod = self.productive();
        let ok = |s: &Sym| match s {
            Sym::N(b) => prod[*b],
            Sym::T(_) => true,
        };
        let useful: Vec<&Production> = self
            .productions
            .iter()
            .filter(|p| {
                prod[p.lhs]
                    && match &p.rule {
                        Rule::Push(b, _) => prod[*b],
                        Rule::Plain(w) | Rule::Pop(_, w) => w.iter().all(ok),
                    }
            })
            .collect();
        let n = self.nonterminals.len();
        let mut by_lhs: Vec<Vec<&Production>> = vec![Vec::new(); n];
        for p in &useful {
            by_lhs[p.lhs].push(p);
        }
        let mut reach = vec![false; n];
        reach[self.start] = true;
        let mut stack = vec![self.start];
        while let Some(a) = stack.pop() {
            for p in &by_lhs[a] {
                let succ: Vec<usize> = match &p.rule {
                    Rule::Push(b, _) => vec![*b],
                    Rule::Plain(w) | Rule::Pop(_, w) => w
                        .iter()
                        .filter_map(|s| match s {
                            Sym::N(b) => Some(*b),
                            Sym::T(_) => None,
                        })
                        .collect(),
                };
                for b in succ {
                    if !reach[b] {
                        reach[b] = true;
                        stack.push(b);
                    }
                }
            }
        }
        let mut map: Vec<Option<usize>> = vec![None; n];
        let mut out = IndexedGrammar::new(
            self.terminals.clone(),
            self.indices.clone(),
            &self.nonterminals[self.start],
        );
        map[self.start] = Some(0);
        for a in 0..n {
            if reach[a] && a != self.start {
                map[a] = Some(out.nonterminals.len());
                out.nonterminals.push(self.nonterminals[a].clone());
            }
        }
        let rename = |w: &[Sym]| -> Vec<Sym> {
            w.iter()
                .map(|s| match s {
                    Sym::N(b) => Sym::N(map[*b].unwrap()),
                    t => *t,
                })
                .collect()
        };
        let mut seen = BTreeSet::new();
        for p in useful {
            if !reach[p.lhs] {
                continue;
            }
            let rule = match &p.rule {
                Rule::Push(b, f) => Rule::Push(map[*b].unwrap(), *f),
                Rule::Plain(w) => Rule::Plain(rename(w)),
                Rule::Pop(f, w) => Rule::Pop(*f, rename(w)),
            };
            let q = Production {
                lhs: map[p.lhs].unwrap(),
                rule,
            };
            if seen.insert(q.clone()) {
                out.productions.push(q);
            }
        }
        (out, map)
    }

    pub fn trim(&self) -> IndexedGrammar {
        self.trim_with_map().0
    }

    /// All one-step successors of a sentential form.  Terminal-word
    /// productions (and pops to terminal words) only apply when no index
    /// remains on the rewritten nonterminal.
    pub fn derive_step(&self, sf: &[Item]) -> BTreeSet<SententialForm> {
        let mut out = BTreeSet::new();
        for (pos, item) in sf.iter().enumerate() {
            let Item::N(a, x) = item else { continue };
            for p in self.productions.iter().filter(|p| p.lhs == *a) {
                let repl: Option<Vec<Item>> = match &p.rule {
                    Rule::Plain(w) => {
                        (x.is_empty() || !is_terminal_word(w)).then(|| distribute(w, x))
                    }
                    Rule::Push(b, f) => {
                        let mut y = Vec::with_capacity(x.len() + 1);
                        y.push(*f);
                        y.extend_from_slice(x);
                        Some(vec![Item::N(*b, y)])
                    }
                    Rule::Pop(f, w) => match x.split_first() {
                        Some((top, rest)) if top == f => (rest.is_empty() || !is_terminal_word(w))
                            .then(|| distribute(w, rest)),
                        _ => None,
                    },
                };
                if let Some(r) = repl {
                    let mut next = Vec::with_capacity(sf.len() + r.len());
                    next.extend_from_slice(&sf[..pos]);
                    next.extend(r);
                    next.extend_from_slice(&sf[pos + 1..]);
                    out.insert(next);
                }
            }
        }
        out
    }

    /// Renders a sentential form, e.g. `U[gf] a`.
    pub fn format_form(&self, sf: &[Item]) -> String {
        if sf.is_empty() {
            return "_".to_string();
        }
        sf.iter()
            .map(|it| match it {
                Item::T(a) => self.terminals.name(*a).to_string(),
                Item::N(b, x) if x.is_empty() => self.nonterminals[*b].clone(),
                Item::N(b, x) => format!(
                    "{}[{}]",
                    self.nonterminals[*b],
                    x.iter().map(|&f| self.indices.name(f)).collect::<Vec<_>>().join(",")
                ),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn format_sym(&self, s: &Sym) -> &str {
        match s {
            Sym::T(a) => self.terminals.name(*a),
            Sym::N(b) => &self.nonterminals[*b],
        }
    }

    fn format_rhs(&self, w: &[Sym]) -> String {
        if w.is_empty() {
            return "_".to_string();
        }
        w.iter().map(|s| self.format_sym(s)).collect::<Vec<_>>().join(" ")
    }

    pub fn format_production(&self, p: &Production) -> String {
        let lhs = &self.nonterminals[p.lhs];
        match &p.rule {
            Rule::Plain(w) => format!("{lhs} -> {}", self.format_rhs(w)),
            Rule::Push(b, f) => format!(
                "{lhs} -> {} ^{}",
                self.nonterminals[*b],
                self.indices.name(*f)
            ),
            Rule::Pop(f, w) => format!("{lhs} ?{} -> {}", self.indices.name(*f), self.format_rhs(w)),
        }
    }

    /// Parses the text format:
    ///
    /// ```text
    /// terminals: a b
    /// indices: f g
    /// start: S
    /// S -> S ^f | U U     # push, split
    /// U ?f -> A           # pop
    /// A -> U a
    /// U -> _
    /// ```
    pub fn parse(src: &str) -> Result<IndexedGrammar> {
        let doc = parse_document(src)?;
        if let Some((no, _)) = doc.intervals.first() {
            return Err(Error::parse(*no, "`interval:` is only allowed in interval grammars"));
        }
        if let Some((no, _)) = doc.direct {
            return Err(Error::parse(no, "`direct:` is only allowed in partitioned grammars"));
        }
        Ok(doc.grammar)
    }
}

/// `[w, x]`: every nonterminal of `w` receives the index word `x`.
fn distribute(w: &[Sym], x: &[Letter]) -> Vec<Item> {
    w.iter()
        .map(|s| match s {
            Sym::T(a) => Item::T(*a),
            Sym::N(b) => Item::N(*b, x.to_vec()),
        })
        .collect()
}

impl fmt::Display for IndexedGrammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "terminals: {}", self.terminals)?;
        writeln!(f, "indices: {}", self.indices)?;
        writeln!(f, "start: {}", self.nonterminals[self.start])?;
        for p in &self.productions {
            writeln!(f, "{}", self.format_production(p))?;
        }
        Ok(())
    }
}

/// A parsed grammar file with the optional interval and direct-symbol
/// annotations.
pub(crate) struct Document {
    pub grammar: IndexedGrammar,
    pub intervals: Vec<(usize, (usize, usize, usize))>,
    pub direct: Option<(usize, Vec<Letter>)>,
}

pub(crate) fn parse_document(src: &str) -> Result<Document> {
    let mut terminals: Option<Alphabet> = None;
    let mut indices: Option<Alphabet> = None;
    let mut start: Option<String> = None;
    let mut rules: Vec<(usize, String, Option<String>, Vec<Vec<String>>)> = Vec::new();
    let mut raw_intervals: Vec<(usize, String, usize, usize)> = Vec::new();
    let mut raw_direct: Option<(usize, Vec<String>)> = None;
    for (no, line) in text::lines(src) {
        if let Some((lhs, rhs)) = line.split_once("->") {
            let lhs: Vec<&str> = lhs.split_whitespace().collect();
            let (name, pop) = match lhs.as_slice() {
                [a] => (a.to_string(), None),
                [a, f] if f.starts_with('?') && f.len() > 1 => (a.to_string(), Some(f[1..].to_string())),
                _ => return Err(Error::parse(no, "left-hand side must be `A` or `A ?f`")),
            };
            let alts = rhs
                .split('|')
                .map(|alt| alt.split_whitespace().map(str::to_string).collect::<Vec<_>>())
                .collect::<Vec<_>>();
            if alts.iter().any(|a| a.is_empty()) {
                return Err(Error::parse(no, "empty alternative; write `_` for ε"));
            }
            rules.push((no, name, pop, alts));
            continue;
        }
        let (key, rest) = text::declaration(line)
            .ok_or_else(|| Error::parse(no, format!("expected a rule or declaration, found `{line}`")))?;
        let alphabet = |rest: &str| {
            Alphabet::new(rest.split_whitespace()).map_err(|e| Error::parse(no, e.to_string()))
        };
        match key {
            "terminals" => terminals = Some(alphabet(rest)?),
            "indices" => indices = Some(alphabet(rest)?),
            "start" => start = Some(text::expect_tokens(no, rest, 1, "start")?[0].to_string()),
            "interval" => {
                let t = text::expect_tokens(no, rest, 3, "interval")?;
                let num = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|_| Error::parse(no, format!("`{s}` is not a number")))
                };
                raw_intervals.push((no, t[0].to_string(), num(t[1])?, num(t[2])?));
            }
            "direct" => raw_direct = Some((no, rest.split_whitespace().map(str::to_string).collect())),
            other => return Err(Error::parse(no, format!("unknown declaration `{other}`"))),
        }
    }
    let terminals = terminals.ok_or_else(|| Error::parse(0, "missing `terminals:` declaration"))?;
    let indices = indices.unwrap_or_default();
    if let Some(c) = indices.names().iter().find(|f| terminals.index_of(f).is_some()) {
        return Err(Error::parse(0, format!("`{c}` is both a terminal and an index")));
    }
    let start = start
        .or_else(|| rules.first().map(|r| r.1.clone()))
        .ok_or_else(|| Error::parse(0, "missing `start:` declaration"))?;
    let check_nt = |no: usize, name: &str| -> Result<()> {
        if terminals.index_of(name).is_some() || indices.index_of(name).is_some() {
            return Err(Error::parse(no, format!("`{name}` is not a nonterminal")));
        }
        if name.starts_with('^') || name.starts_with('?') {
            return Err(Error::parse(no, format!("misplaced index marker in `{name}`")));
        }
        Ok(())
    };
    check_nt(0, &start)?;
    let mut g = IndexedGrammar::new(terminals.clone(), indices.clone(), &start);
    let index = |no: usize, f: &str| {
        indices
            .index_of(f)
            .ok_or_else(|| Error::parse(no, format!("undeclared index `{f}`")))
    };
    for (no, lhs, pop, alts) in rules {
        check_nt(no, &lhs)?;
        let l = g.nonterminal(&lhs);
        let pop = pop.map(|f| index(no, &f)).transpose()?;
        for alt in alts {
            if alt.len() > 1 && alt.iter().any(|t| t == "_") {
                return Err(Error::parse(no, "`_` must stand alone"));
            }
            if let Some(f) = alt.last().and_then(|t| t.strip_prefix('^')) {
                if pop.is_some() || alt.len() != 2 {
                    return Err(Error::parse(no, "a push must have the shape `A -> B ^f`"));
                }
                check_nt(no, &alt[0])?;
                let f = index(no, f)?;
                let b = g.nonterminal(&alt[0]);
                g.add_production(l, Rule::Push(b, f));
                continue;
            }
            for t in &alt {
                if t != "_" && terminals.index_of(t).is_none() {
                    check_nt(no, t)?;
                }
            }
            let toks: Vec<&str> = alt.iter().map(String::as_str).collect();
            let w = g.symbols(&toks);
            let rule = match pop {
                Some(f) => Rule::Pop(f, w),
                None => Rule::Plain(w),
            };
            g.add_production(l, rule);
        }
    }
    let mut intervals = Vec::new();
    for (no, name, i, j) in raw_intervals {
        let a = g
            .nonterminal_id(&name)
            .ok_or_else(|| Error::parse(no, format!("unknown nonterminal `{name}`")))?;
        intervals.push((no, (a, i, j)));
    }
    let direct = match raw_direct {
        Some((no, names)) => {
            let ls = names
                .iter()
                .map(|n| {
                    terminals
                        .index_of(n)
                        .ok_or_else(|| Error::parse(no, format!("`{n}` is not a terminal")))
                })
                .collect::<Result<Vec<_>>>()?;
            Some((no, ls))
        }
        None => None,
    };
    Ok(Document {
        grammar: g,
        intervals,
        direct,
    })
}

/// Interns keys as dense ids while a grammar is built lazily.
pub(crate) struct Interner<K> {
    ids: HashMap<K, usize>,
    pub keys: Vec<K>,
}

impl<K: Clone + Eq + std::hash::Hash> Interner<K> {
    pub fn new() -> Self {
        Interner {
            ids: HashMap::new(),
            keys: Vec::new(),
        }
    }

    /// Id of `k` and whether it was new.
    pub fn intern(&mut self, k: K) -> (usize, bool) {
        if let Some(&i) = self.ids.get(&k) {
            return (i, false);
        }
        let i = self.keys.len();
        self.ids.insert(k.clone(), i);
        self.keys.push(k);
        (i, true)
    }
}

#[cfg(test)]
pub(crate) mod corpus {
    use super::*;

    /// `{ww : w ∈ {a,b}*}`.
    pub fn example() -> IndexedGrammar {
        IndexedGrammar::parse(
            "terminals: a b\nindices: f g\nstart: S\n\
             S -> S ^f | S ^g | U U\nU -> _\nU ?f -> A\nU ?g -> B\nA -> U a\nB -> U b\n",
        )
        .unwrap()
    }

    /// `{aⁿbⁿ}` with a pop to a mixed word.
    pub fn anbn() -> IndexedGrammar {
        IndexedGrammar::parse(
            "terminals: a b\nindices: f\nstart: S\nS -> S ^f | T\nT ?f -> a T b\nT -> _\n",
        )
        .unwrap()
    }

    /// `{aⁿbⁿcⁿ}`.
    pub fn anbncn() -> IndexedGrammar {
        IndexedGrammar::parse(
            "terminals: a b c\nindices: f\nstart: S\nS -> S ^f | A B C\n\
             A ?f -> a A\nA -> _\nB ?f -> b B\nB -> _\nC ?f -> c C\nC -> _\n",
        )
        .unwrap()
    }
}
