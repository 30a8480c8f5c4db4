//! Downward (subword) closures of languages, computed as simple regular
//! expressions by enumerating candidates and testing each one with two
//! inclusion checks: an emptiness check for `↓L ⊆ L(r)` and a simultaneous
//! unboundedness (SUP) check per product for `L(r) ⊆ ↓L`.
//!
//! The crate ships two language classes for the engine (finite automata and
//! context-free grammars) and a workbench of indexed-grammar transformations
//! (normal form, transductions, regular index sets, interval, productive and
//! partitioned grammars) together with bounded-derivation oracles.

pub mod alphabet;
pub mod automata;
pub mod cfg;
pub mod engine;
pub mod error;
pub mod indexed;
pub mod semilinear;
pub mod sre;
mod text;
pub mod transducers;

pub use alphabet::{is_subword, Alphabet, Letter, Word};
pub use automata::Nfa;
pub use cfg::Cfg;
pub use engine::{downward_closure, ClassAdapter, CfgAdapter, ClosureResult, RegularAdapter};
pub use error::{Error, Result};
pub use indexed::IndexedGrammar;
pub use semilinear::{LinearSet, Multiset, SemilinearSet};
pub use sre::{Atom, BlockForm, Product, Sre};
pub use transducers::Transducer;
