mod common;

use downclosure::{Alphabet, Nfa};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn nfa(seed: u64) -> Nfa {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = common::alphabet(&mut rng);
    common::random_nfa(&mut rng, &x, 5)
}

/// All words having `w` as a subword.
fn superwords(x: &Alphabet, w: &[usize]) -> Nfa {
    let mut m = Nfa::new(x.clone(), w.len() + 1, 0);
    for (i, &a) in w.iter().enumerate() {
        m.add_edge(i, vec![a], i + 1);
    }
    for s in 0..=w.len() {
        for a in x.letters() {
            m.add_edge(s, vec![a], s);
        }
    }
    m.set_final(w.len(), true);
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn saturation_is_the_subword_closure(seed in any::<u64>()) {
        let m = nfa(seed);
        let closed = m.downward_saturate();
        for w in closed.enumerate(4) {
            // L meets X* w₁ X* ⋯ wₖ X*
            prop_assert!(!m.product(&superwords(m.alphabet(), &w)).unwrap().is_empty());
        }
        for w in m.enumerate(4) {
            for mask in 0u32..1 << w.len() {
                let v: Vec<usize> = (0..w.len()).filter(|i| mask >> i & 1 == 1).map(|i| w[i]).collect();
                prop_assert!(closed.accepts(&v).unwrap());
            }
        }
        prop_assert!(closed.downward_saturate().equivalent(&closed).unwrap());
    }

    #[test]
    fn complement_and_product(a in any::<u64>(), b in any::<u64>()) {
        let m = nfa(a);
        let n = nfa(b).with_alphabet(m.alphabet());
        prop_assume!(n.is_ok());
        let n = n.unwrap();
        let both = m.product(&n).unwrap();
        for w in both.enumerate(5) {
            prop_assert!(m.accepts(&w).unwrap() && n.accepts(&w).unwrap());
        }
        for w in m.enumerate(5) {
            prop_assert_eq!(n.accepts(&w).unwrap(), both.accepts(&w).unwrap());
        }
        prop_assert!(m.complement().complement().equivalent(&m).unwrap());
        prop_assert!(m.product(&m.complement()).unwrap().is_empty());
    }

    #[test]
    fn normalize_trim_reverse_preserve(seed in any::<u64>()) {
        let m = nfa(seed);
        prop_assert!(m.normalize().is_normalized());
        prop_assert!(m.normalize().equivalent(&m).unwrap());
        prop_assert!(m.trim().equivalent(&m).unwrap());
        prop_assert!(m.reverse().reverse().equivalent(&m).unwrap());
        let back = Nfa::parse(&m.to_string()).unwrap();
        prop_assert!(back.equivalent(&m).unwrap());
    }
}

#[test]
fn bounded_automaton() {
    let x = Alphabet::of("a b c");
    let m = Nfa::bounded(x.clone());
    assert!(m.accepts_names(&["a", "a", "c"]).unwrap());
    assert!(!m.accepts_names(&["b", "a"]).unwrap());
}
