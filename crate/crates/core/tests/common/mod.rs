//! Shared corpora for the integration tests.
#![allow(dead_code)]

use downclosure::{Alphabet, Nfa};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random automaton with at most `max_states` states over `x`.
pub fn random_nfa(rng: &mut ChaCha8Rng, x: &Alphabet, max_states: usize) -> Nfa {
    let n = rng.gen_range(1..=max_states);
    let density = rng.gen_range(0.08..0.3);
    let mut m = Nfa::new(x.clone(), n, 0);
    for p in 0..n {
        for a in x.letters() {
            for q in 0..n {
                if rng.gen_bool(density) {
                    m.add_edge(p, vec![a], q);
                }
            }
        }
        for q in 0..n {
            if p != q && rng.gen_bool(0.05) {
                m.add_edge(p, vec![], q);
            }
        }
        if p + 1 == n || rng.gen_bool(0.3) {
            m.set_final(p, true);
        }
    }
    m
}

pub fn alphabet(rng: &mut ChaCha8Rng) -> Alphabet {
    if rng.gen_bool(0.5) {
        Alphabet::of("a b")
    } else {
        Alphabet::of("a b c")
    }
}

/// `{ww : w ∈ {a,b}*}`.
pub const WW: &str = "terminals: a b\nindices: f g\nstart: S\n\
S -> S ^f | S ^g | U U\nU -> _\nU ?f -> A\nU ?g -> B\nA -> U a\nB -> U b\n";

/// Same, but `g` can never be popped.
pub const WW_BLOCKED: &str = "terminals: a b\nindices: f g\nstart: S\n\
S -> S ^f | S ^g | U U\nU -> _\nU ?f -> A\nA -> U a\n";

pub const ANBN: &str = "terminals: a b\nindices: f\nstart: S\nS -> S ^f | T\nT ?f -> a T b\nT -> _\n";

pub const ANBNCN: &str = "terminals: a b c\nindices: f\nstart: S\nS -> S ^f | A B C\n\
A ?f -> a A\nA -> _\nB ?f -> b B\nB -> _\nC ?f -> c C\nC -> _\n";

/// `{a^(2ⁿ)}`.
pub const POWERS: &str = "terminals: a\nindices: f\nstart: S\nS -> S ^f | A\nA ?f -> A A\nA -> a\n";

/// `{aⁿ bᵐ cⁿ : m ≤ n}` with two index symbols.
pub const ABC_MIXED: &str = "terminals: a b c\nindices: f g\nstart: S\n\
S -> S ^f | S ^g | X C\nX ?f -> a X\nX ?g -> a X b\nX -> _\nC ?f -> C c\nC ?g -> C c\nC -> _\n";

pub fn indexed_corpus() -> Vec<(&'static str, downclosure::IndexedGrammar)> {
    [("ww", WW), ("ww-blocked", WW_BLOCKED), ("anbn", ANBN), ("anbncn", ANBNCN), ("powers", POWERS), ("abc-mixed", ABC_MIXED)]
        .into_iter()
        .map(|(n, s)| (n, downclosure::IndexedGrammar::parse(s).unwrap()))
        .collect()
}
