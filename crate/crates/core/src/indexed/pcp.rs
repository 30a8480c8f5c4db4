//! Indexed grammars for Post correspondence instances over `{1, 2}`.
//!
//! For pairs `x ↦ (α(x), β(x))` the grammar derives `a^ν(α(x_k⋯x_1)) b^ν(β(x_k⋯x_1))`
//! for every non-empty sequence, where `ν` reads a word over `{1, 2}` in
//! bijective base 2.  The instance has a solution iff some derived word
//! has as many `a`s as `b`s.

use super::IndexedGrammar;
use crate::alphabet::Alphabet;
use crate::error::{Error, Result};

/// `ν(ε) = 0`, `ν(w1) = 2ν(w) + 1`, `ν(w2) = 2ν(w) + 2`.
pub fn nu(digits: &[u8]) -> u64 {
    digits.iter().fold(0, |acc, &d| {
        assert!(d == 1 || d == 2, "digit {d} is not 1 or 2");
        2 * acc + u64::from(d)
    })
}

fn digits(name: &str, w: &str) -> Result<Vec<&'static str>> {
    w.chars()
        .map(|c| match c {
            '1' => Ok("1"),
            '2' => Ok("2"),
            _ => Err(Error::Invalid(format!("`{w}` for `{name}` is not a word over 1 and 2"))),
        })
        .collect()
}

/// Grammar for the pairs `(x, α(x), β(x))`.
pub fn pcp_grammar(pairs: &[(&str, &str, &str)]) -> Result<IndexedGrammar> {
    if pairs.is_empty() {
        return Err(Error::Invalid("no pairs".into()));
    }
    for (x, _, _) in pairs {
        if ["1", "2", "a", "b"].contains(x) {
            return Err(Error::Invalid(format!("`{x}` cannot name a pair")));
        }
    }
    let indices = Alphabet::new(pairs.iter().map(|p| p.0).chain(["1", "2"]))
        .map_err(|e| Error::Invalid(e.to_string()))?;
    let mut g = IndexedGrammar::new(Alphabet::new(["a", "b"])?, indices, "S");
    for (x, _, _) in pairs {
        g.add_push("S", "U", x);
        g.add_push("U", "U", x);
    }
    g.add_plain("U", &["A", "B"]);
    for (c, side) in [("A", 1), ("A'", 1), ("B", 2), ("B'", 2)] {
        for &(x, alpha, beta) in pairs {
            let w = digits(x, if side == 1 { alpha } else { beta })?;
            // pop x, then push the word so that its first digit ends on top
            let z = |i: usize| if i == 0 { c.to_string() } else { format!("{c}.{x}.{i}") };
            g.add_pop(c, x, &[&z(w.len())]);
            for i in (1..=w.len()).rev() {
                g.add_push(&z(i), &z(i - 1), w[i - 1]);
            }
        }
        let bar = format!("{}'", &c[..1]);
        if c.ends_with('\'') {
            // doubles once per digit
            g.add_pop(c, "1", &[c, c]);
            g.add_pop(c, "2", &[c, c]);
        } else {
            g.add_pop(c, "1", &[c, &bar]);
            g.add_pop(c, "2", &[c, &bar, &bar]);
        }
    }
    g.add_plain("A", &["_"]);
    g.add_plain("B", &["_"]);
    g.add_plain("A'", &["a"]);
    g.add_plain("B'", &["b"]);
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{BTreeSet, HashMap};

    #[test]
    fn nu_values() {
        assert_eq!(nu(&[]), 0);
        assert_eq!(nu(&[1]), 1);
        assert_eq!(nu(&[2]), 2);
        assert_eq!(nu(&[1, 2]), 4);
        assert_eq!(nu(&[1, 1, 1]), 7);
    }

    #[test]
    fn nu_is_a_bijection_on_short_words() {
        let mut seen = HashMap::new();
        let mut words: Vec<Vec<u8>> = vec![vec![]];
        for _ in 0..6 {
            words = words
                .iter()
                .flat_map(|w| [1u8, 2].map(|d| [w.clone(), vec![d]].concat()))
                .chain(words.iter().cloned())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
        }
        for w in &words {
            assert!(seen.insert(nu(w), w.clone()).is_none());
        }
        // words of length ≤ 6 cover exactly 0 … 2⁷ − 2
        let values: BTreeSet<u64> = seen.keys().copied().collect();
        assert_eq!(values, (0..=126).collect());
    }

    #[test]
    fn single_pair() {
        let g = pcp_grammar(&[("x", "1", "1")]).unwrap();
        let b = g.bounded_language(8, 200_000);
        assert!(b.exhaustive);
        let want: BTreeSet<Vec<usize>> = [vec![0, 1], vec![0, 0, 0, 1, 1, 1]].into();
        assert_eq!(b.words, want);
    }

    #[test]
    fn counts_follow_nu() {
        let pairs = [("x", "12", "2"), ("y", "2", "21")];
        let g = pcp_grammar(&pairs).unwrap();
        let b = g.bounded_language(14, 500_000);
        assert!(b.exhaustive);
        let num = |w: &str| -> Vec<u8> { w.bytes().map(|c| c - b'0').collect() };
        let mut want = BTreeSet::new();
        let mut seqs: Vec<(String, String)> = vec![(String::new(), String::new())];
        for _ in 0..5 {
            seqs = seqs
                .iter()
                .flat_map(|(u, v)| pairs.iter().map(move |p| (format!("{u}{}", p.1), format!("{v}{}", p.2))))
                .collect();
            for (u, v) in &seqs {
                let (m, n) = (nu(&num(u)) as usize, nu(&num(v)) as usize);
                if m + n <= 14 {
                    want.insert([vec![0; m], vec![1; n]].concat());
                }
            }
        }
        assert_eq!(b.words, want);
    }

    #[test]
    fn rejects_bad_pairs() {
        assert!(pcp_grammar(&[]).is_err());
        assert!(pcp_grammar(&[("x", "13", "1")]).is_err());
        assert!(pcp_grammar(&[("1", "1", "1")]).is_err());
    }
}
