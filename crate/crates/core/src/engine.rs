//! Downward closures as simple regular expressions.
//!
//! A candidate SRE `r` describes `↓L` iff two inclusions hold:
//!
//! * `↓L ⊆ L(r)`: the closed language intersected with the complement of
//!   `L(r)` is empty;
//! * `L(r) ⊆ ↓L`: for every product `w₀Y₁*w₁⋯Yₙ*wₙ`, the block-counting
//!   image of `↓L` over fresh letters `c₁…cₙ` is simultaneously unbounded.
//!
//! Canonical SREs are antichains of products, and products are ideals of
//! the subword order, so the canonical SRE of a downward-closed language is
//! unique. [`Strategy::Levels`] exploits this: it grows the set of products
//! passing the lower test level by level (a product passes only if its
//! prefix does) and stops as soon as the maximal ones cover `↓L`.
//! [`Strategy::Plain`] walks the fair SRE stream and is kept as a reference.

use crate::alphabet::Alphabet;
use crate::automata::Nfa;
use crate::cfg::Cfg;
use crate::error::{Error, Result};
use crate::semilinear::{parikh_nfa, sup_from_semilinear};
use crate::sre::{enumerate_sres, extensions, Product, Sre};
use crate::transducers::Transducer;

/// What the engine needs from a language class.
pub trait ClassAdapter {
    type Handle: Clone;

    fn apply_transduction(&self, l: &Self::Handle, t: &Transducer) -> Result<Self::Handle>;

    fn is_empty(&self, l: &Self::Handle) -> Result<bool>;

    /// `↓L = a₁*⋯aₙ*` for `order = a₁…aₙ`; the handle's language is
    /// promised to lie in `a₁*⋯aₙ*`.
    fn decide_sup(&self, l: &Self::Handle, order: &Alphabet) -> Result<bool>;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RegularAdapter;

impl ClassAdapter for RegularAdapter {
    type Handle = Nfa;

    fn apply_transduction(&self, l: &Nfa, t: &Transducer) -> Result<Nfa> {
        t.apply_to_nfa(l)
    }

    fn is_empty(&self, l: &Nfa) -> Result<bool> {
        Ok(l.is_empty())
    }

    fn decide_sup(&self, l: &Nfa, order: &Alphabet) -> Result<bool> {
        decide_sup_regular(l, order)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CfgAdapter;

impl ClassAdapter for CfgAdapter {
    type Handle = Cfg;

    fn apply_transduction(&self, l: &Cfg, t: &Transducer) -> Result<Cfg> {
        l.apply_transduction(t)
    }

    fn is_empty(&self, l: &Cfg) -> Result<bool> {
        Ok(l.is_empty())
    }

    fn decide_sup(&self, l: &Cfg, order: &Alphabet) -> Result<bool> {
        decide_sup_cfg(l, order)
    }
}

/// Brings a language over the letters of `order` into `order`'s alphabet.
fn check_order(found: &Alphabet, order: &Alphabet) -> Result<()> {
    if found.same_set(order) {
        Ok(())
    } else {
        Err(Error::AlphabetMismatch {
            expected: order.to_string(),
            found: found.to_string(),
        })
    }
}

/// SUP for automata via the Parikh image of the saturated automaton.
pub fn decide_sup_regular(m: &Nfa, order: &Alphabet) -> Result<bool> {
    check_order(m.alphabet(), order)?;
    let m = m.with_alphabet(order)?;
    let outside = Nfa::bounded(order.clone()).complement();
    if !m.product(&outside)?.is_empty() {
        return Err(Error::NotBoundedForm(bounded_name(order)));
    }
    let s = parikh_nfa(&m.downward_saturate());
    Ok(sup_from_semilinear(&s, order))
}

/// SUP for grammars via the Parikh image of the subword-closed grammar.
pub fn decide_sup_cfg(g: &Cfg, order: &Alphabet) -> Result<bool> {
    check_order(g.terminals(), order)?;
    let g = g.with_terminals(order)?;
    let outside = Nfa::bounded(order.clone()).complement();
    let stray = g.apply_transduction(&Transducer::regular_intersection(&outside))?;
    if !stray.is_empty() {
        return Err(Error::NotBoundedForm(bounded_name(order)));
    }
    let closed = g.apply_transduction(&Transducer::subword(order))?;
    Ok(sup_from_semilinear(&closed.parikh(), order))
}

fn bounded_name(order: &Alphabet) -> String {
    order
        .names()
        .iter()
        .map(|n| format!("{n}*"))
        .collect::<Vec<_>>()
        .join("")
}

/// `↓L ⊆ L(r)` for the closed handle `h`.
pub fn sre_upper_inclusion<C: ClassAdapter>(
    c: &C,
    h: &C::Handle,
    r: &Sre,
    x: &Alphabet,
) -> Result<bool> {
    let outside = r.to_nfa(x).complement();
    let stray = c.apply_transduction(h, &Transducer::regular_intersection(&outside))?;
    c.is_empty(&stray)
}

/// `L(p) ⊆ ↓L` for a single product.
pub fn product_lower_inclusion<C: ClassAdapter>(
    c: &C,
    h: &C::Handle,
    p: &Product,
    x: &Alphabet,
) -> Result<bool> {
    let b = p.block_form();
    let blocks = b.blocks();
    if blocks.is_empty() {
        let gate = Transducer::block_counting(x, &b.words, &[], &Alphabet::empty())?;
        let name = x.fresh(1);
        let proj = Transducer::projection(&Alphabet::empty(), name.name(0))?;
        let s = c.apply_transduction(h, &gate.compose(&proj)?)?;
        return c.decide_sup(&s, &name);
    }
    let fresh = x.fresh(blocks.len());
    let t = Transducer::block_counting(x, &b.words, &blocks, &fresh)?;
    let s = c.apply_transduction(h, &t)?;
    c.decide_sup(&s, &fresh)
}

/// `L(r) ⊆ ↓L` for the closed handle `h`.
pub fn sre_lower_inclusion<C: ClassAdapter>(
    c: &C,
    h: &C::Handle,
    r: &Sre,
    x: &Alphabet,
) -> Result<bool> {
    for p in r.products() {
        if !product_lower_inclusion(c, h, p, x)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Grow products passing the lower test level by level.
    #[default]
    Levels,
    /// Test the SRE stream in order.
    Plain,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureResult {
    pub sre: Sre,
    /// Inclusion tests performed (one per product lower test and one per
    /// upper test).
    pub candidates_tested: usize,
}

/// `↓L` as the canonical SRE, with `budget` capping the number of tests.
pub fn downward_closure<C: ClassAdapter>(
    c: &C,
    l: &C::Handle,
    x: &Alphabet,
    budget: usize,
) -> Result<ClosureResult> {
    downward_closure_with(c, l, x, budget, Strategy::default())
}

pub fn downward_closure_with<C: ClassAdapter>(
    c: &C,
    l: &C::Handle,
    x: &Alphabet,
    budget: usize,
    strategy: Strategy,
) -> Result<ClosureResult> {
    if budget == 0 {
        return Err(Error::BudgetExhausted(0));
    }
    if c.is_empty(l)? {
        return Ok(ClosureResult {
            sre: Sre::empty(),
            candidates_tested: 0,
        });
    }
    let h = c.apply_transduction(l, &Transducer::subword(x))?;
    match strategy {
        Strategy::Levels => by_levels(c, &h, x, budget),
        Strategy::Plain => by_stream(c, &h, x, budget),
    }
}

fn by_stream<C: ClassAdapter>(
    c: &C,
    h: &C::Handle,
    x: &Alphabet,
    budget: usize,
) -> Result<ClosureResult> {
    for (i, r) in enumerate_sres(x).take(budget).enumerate() {
        if sre_upper_inclusion(c, h, &r, x)? && sre_lower_inclusion(c, h, &r, x)? {
            return Ok(ClosureResult {
                sre: r,
                candidates_tested: i + 1,
            });
        }
    }
    Err(Error::BudgetExhausted(budget))
}

fn by_levels<C: ClassAdapter>(
    c: &C,
    h: &C::Handle,
    x: &Alphabet,
    budget: usize,
) -> Result<ClosureResult> {
    let mut tested = 0usize;
    let spend = |tested: &mut usize| -> Result<()> {
        *tested += 1;
        if *tested > budget {
            Err(Error::BudgetExhausted(budget))
        } else {
            Ok(())
        }
    };
    // h is nonempty, so the ε product passes the lower test
    let mut frontier = vec![Product::epsilon()];
    let mut good: Vec<Product> = frontier.clone();
    loop {
        let maximal: Vec<Product> = good
            .iter()
            .filter(|p| !good.iter().any(|q| q != *p && p.included_in(q)))
            .cloned()
            .collect();
        let r = Sre::new(maximal);
        spend(&mut tested)?;
        if sre_upper_inclusion(c, h, &r, x)? {
            return Ok(ClosureResult {
                sre: r,
                candidates_tested: tested,
            });
        }
        let mut next = Vec::new();
        for p in &frontier {
            for q in extensions(x, p) {
                // a product inside a known good one passes without a test
                if good.iter().any(|g| q.included_in(g)) {
                    next.push(q);
                    continue;
                }
                spend(&mut tested)?;
                if product_lower_inclusion(c, h, &q, x)? {
                    next.push(q);
                }
            }
        }
        if next.is_empty() {
            // cannot happen for a correct adapter: ↓L has a finite decomposition
            return Err(Error::Invalid("no product extends the current level".into()));
        }
        good.extend(next.iter().cloned());
        frontier = next;
    }
}
