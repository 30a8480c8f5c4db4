mod common;

use std::collections::BTreeSet;

use downclosure::semilinear::parikh_word;
use downclosure::{is_subword, Cfg, Transducer};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn grammar_of_an_automaton(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = common::alphabet(&mut rng);
        let m = common::random_nfa(&mut rng, &x, 4);
        let g = Cfg::from_nfa(&m);
        prop_assert_eq!(g.enumerate(5, 1_000_000).unwrap(), m.enumerate(5));
        prop_assert_eq!(g.is_empty(), m.is_empty());
        let back = Cfg::parse(&g.to_string()).unwrap();
        prop_assert_eq!(back.enumerate(5, 1_000_000).unwrap(), m.enumerate(5));
    }

    #[test]
    fn transduced_grammar(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = common::alphabet(&mut rng);
        let m = common::random_nfa(&mut rng, &x, 3);
        let g = Cfg::from_nfa(&m);
        let closed = g.apply_transduction(&Transducer::subword(&x)).unwrap();
        let want = m.downward_saturate().enumerate(4);
        prop_assert_eq!(closed.enumerate(4, 1_000_000).unwrap(), want);
    }

    #[test]
    fn parikh_two_sided(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = common::alphabet(&mut rng);
        let m = common::random_nfa(&mut rng, &x, 3);
        // a context-free twist: wrap every word as a w b
        let inner = Cfg::from_nfa(&m);
        let mut src = format!("terminals: {}\nstart: Z\nZ -> {} Z {} | W\n", x, x.name(0), x.name(1));
        for line in inner.to_string().lines().filter(|l| l.contains("->")) {
            src.push_str(&line.replace("S", "W"));
            src.push('\n');
        }
        let g = Cfg::parse(&src);
        prop_assume!(g.is_ok());
        let g = g.unwrap();
        let s = g.parikh();
        let words = g.enumerate(6, 1_000_000).unwrap();
        let images: BTreeSet<_> = words.iter().map(|w| parikh_word(x.len(), w)).collect();
        for v in &images {
            prop_assert!(s.contains(v));
        }
        for v in s.members_up_to(6) {
            prop_assert!(images.contains(&v));
        }
        for w in &words {
            prop_assert!(words.iter().any(|v| is_subword(w, v)));
        }
    }
}
