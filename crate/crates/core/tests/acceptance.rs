//! End-to-end acceptance suite.  Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use downclosure::alphabet::is_subword;
use downclosure::engine::{decide_sup_cfg, decide_sup_regular};
use downclosure::indexed::{nu, pcp_grammar, IndexedGrammar, Item};
use downclosure::semilinear::parikh_word;
use downclosure::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn regular_end_to_end() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let t0 = Instant::now();
    for i in 0..200 {
        let x = common::alphabet(&mut rng);
        let m = common::random_nfa(&mut rng, &x, 5).normalize();
        let r = downward_closure(&RegularAdapter, &m, &x, 1_000_000).map_err(|e| format!("nfa #{i}: {e}"))?;
        let same = r.sre.to_nfa(&x).equivalent(&m.downward_saturate()).map_err(|e| e.to_string())?;
        ensure(same, || format!("nfa #{i}: got {}", r.sre.format(&x)))?;
    }
    let took = t0.elapsed();
    ensure(took < Duration::from_secs(300), || format!("took {took:?}"))?;
    Ok(format!("200/200 automata in {took:.1?}"))
}

fn cfg_showcase() -> Outcome {
    let ab = Alphabet::of("a b");
    let cases: [(&str, Box<dyn Fn() -> Result<Sre>>, &str); 4] = [
        (
            "S → aSb | ε",
            Box::new(|| {
                let g = Cfg::parse("terminals: a b\nS -> a S b | _\n")?;
                Ok(downward_closure(&CfgAdapter, &g, g.terminals(), 100_000)?.sre)
            }),
            "a* b*",
        ),
        (
            "S → aS | b",
            Box::new(|| {
                let g = Cfg::parse("terminals: a b\nS -> a S | b\n")?;
                Ok(downward_closure(&CfgAdapter, &g, g.terminals(), 100_000)?.sre)
            }),
            "a* b?",
        ),
        (
            "NFA (ab)*",
            Box::new(|| {
                let m = Nfa::parse("alphabet: a b\nstate: p initial final\nstate: q\nedge: p a q\nedge: q b p\n")?;
                Ok(downward_closure(&RegularAdapter, &m, m.alphabet(), 100_000)?.sre)
            }),
            "(a|b)*",
        ),
        (
            "finite {ab}",
            Box::new(|| {
                let g = Cfg::parse("terminals: a b\nS -> a b\n")?;
                Ok(downward_closure(&CfgAdapter, &g, g.terminals(), 100_000)?.sre)
            }),
            "a? b?",
        ),
    ];
    let mut report = Vec::new();
    for (name, run, want) in cases {
        let t0 = Instant::now();
        let got = run().map_err(|e| format!("{name}: {e}"))?;
        let took = t0.elapsed();
        let want = Sre::parse(&ab, want).unwrap();
        let same = got.to_nfa(&ab).equivalent(&want.to_nfa(&ab)).unwrap();
        ensure(same, || format!("{name}: got {}", got.format(&ab)))?;
        ensure(took < Duration::from_secs(60), || format!("{name}: took {took:?}"))?;
        report.push(format!("{name} ↦ {}", got.format(&ab)));
    }
    Ok(report.join("; "))
}

/// `↓L(m) = a₁*⋯aₙ*`, decided by comparing automata.
fn saturation_oracle(m: &Nfa, order: &Alphabet) -> bool {
    let m = m.with_alphabet(order).unwrap();
    m.downward_saturate().equivalent(&Nfa::bounded(order.clone())).unwrap()
}

fn sup_table() -> Outcome {
    let regular = [
        ("a*b*", "a b", "alphabet: a b\nstate: p initial final\nstate: q final\nedge: p a p\nedge: p _ q\nedge: q b q\n"),
        ("a*b", "a b", "alphabet: a b\nstate: p initial\nstate: q final\nedge: p a p\nedge: p b q\n"),
        ("(aa)*(bb)*", "a b", "alphabet: a b\nstate: p initial final\nstate: p2\nstate: q final\nstate: q2\n\
          edge: p a p2\nedge: p2 a p\nedge: p _ q\nedge: q b q2\nedge: q2 b q\n"),
        ("{ab}", "a b", "alphabet: a b\nstate: p initial\nstate: q\nstate: r final\nedge: p a q\nedge: q b r\n"),
        ("a* b? c*", "a b c", "alphabet: a b c\nstate: p initial final\nstate: q final\nedge: p a p\nedge: p b q\nedge: p _ q\nedge: q c q\n"),
        ("a*", "a", "alphabet: a\nstate: p initial final\nedge: p a p\n"),
    ];
    let mut rows = 0;
    for (name, order, src) in regular {
        let m = Nfa::parse(src).unwrap();
        let order = Alphabet::of(order);
        let want = saturation_oracle(&m, &order);
        let got = decide_sup_regular(&m, &order).map_err(|e| format!("{name}: {e}"))?;
        ensure(got == want, || format!("{name}: decided {got}, oracle says {want}"))?;
        rows += 1;
    }
    // answers by hand; the enumeration check below guards the grammars
    let grammars = [
        ("aⁿbⁿ", "a b", "terminals: a b\nS -> a S b | _\n", true),
        ("aⁿb²ⁿ", "a b", "terminals: a b\nS -> a S b b | _\n", true),
        ("aⁿbⁿc*", "a b c", "terminals: a b c\nS -> X C\nX -> a X b | _\nC -> c C | _\n", true),
        ("aⁿbᵐ, m ≤ n", "a b", "terminals: a b\nS -> a S b | a S | _\n", true),
        ("aⁿb", "a b", "terminals: a b\nS -> a S | b\n", false),
        ("a* over {a, b}", "a b", "terminals: a b\nS -> a S | _\n", false),
        ("aⁿ bᵏ cⁿ, k ≤ 1", "a b c", "terminals: a b c\nS -> a S c | b | _\n", false),
    ];
    for (name, order, src, want) in grammars {
        let g = Cfg::parse(src).unwrap();
        let order = Alphabet::of(order);
        // a yes-instance contains a₁ᵏ⋯aₙᵏ as a subword of a short word, a
        // no-instance does not
        let words = g.enumerate(14, 1_000_000).map_err(|e| e.to_string())?;
        let diag: Word = order.letters().flat_map(|a| std::iter::repeat(a).take(3)).collect();
        let seen = words.iter().any(|w| is_subword(&diag, w));
        ensure(seen == want, || format!("{name}: enumeration disagrees with the hand answer"))?;
        let got = decide_sup_cfg(&g, &order).map_err(|e| format!("{name}: {e}"))?;
        ensure(got == want, || format!("{name}: decided {got}, expected {want}"))?;
        rows += 1;
    }
    Ok(format!("{rows} languages"))
}

fn random_cfg(rng: &mut ChaCha8Rng) -> Cfg {
    let x = Alphabet::of(if rng.gen_bool(0.5) { "a b" } else { "a b c" });
    let names = ["S", "A", "B"];
    let k = rng.gen_range(1..=3);
    let mut g = Cfg::new(x.clone(), "S");
    for lhs in &names[..k] {
        for _ in 0..rng.gen_range(1..=3) {
            let len = rng.gen_range(0..=3);
            let body: Vec<&str> = (0..len)
                .map(|_| {
                    if rng.gen_bool(0.6) {
                        x.name(rng.gen_range(0..x.len()))
                    } else {
                        names[rng.gen_range(0..k)]
                    }
                })
                .collect();
            g.add_rule(lhs, if body.is_empty() { &["_"] } else { &body });
        }
    }
    g
}

fn parikh_oracle() -> Outcome {
    let fixed = [
        "terminals: a b\nS -> a S b | _\n",
        "terminals: a b\nS -> a S | b\n",
        "terminals: a b\nS -> S S | a b | _\n",
        "terminals: a b c\nS -> a S c | B\nB -> b B | _\n",
        "terminals: a b\nS -> a S a | b S b | a | b | _\n",
        "terminals: a b\nS -> a b\n",
        "terminals: a b\nS -> A B\nA -> a A a | _\nB -> b B | b\n",
        "terminals: a b c\nS -> a S b b c | c\n",
        "terminals: a\nS -> a a S | a\n",
        "terminals: a b\nS -> S a | S b b | _\n",
    ];
    let mut grammars: Vec<Cfg> = fixed.iter().map(|s| Cfg::parse(s).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    while grammars.len() < 24 {
        let g = random_cfg(&mut rng);
        if !g.is_empty() {
            grammars.push(g);
        }
    }
    let mut members = 0;
    for (i, g) in grammars.iter().enumerate() {
        let dim = g.terminals().len();
        let s = g.parikh();
        let words = g.enumerate(8, 2_000_000).map_err(|e| format!("grammar #{i}: {e}"))?;
        let images: BTreeSet<_> = words.iter().map(|w| parikh_word(dim, w)).collect();
        for v in &images {
            ensure(s.contains(v), || format!("grammar #{i}: {v:?} missing from the image"))?;
        }
        let small = s.members_up_to(8);
        for v in &small {
            ensure(images.contains(v), || format!("grammar #{i}: {v:?} not realised by a word"))?;
        }
        members += small.len();
    }
    Ok(format!("{} grammars, {members} small vectors", grammars.len()))
}

fn exhaustive(g: &IndexedGrammar, len: usize, what: &str) -> std::result::Result<BTreeSet<Word>, String> {
    let b = g.bounded_language(len, 2_000_000);
    ensure(b.exhaustive, || format!("{what}: search at length {len} is not exhaustive"))?;
    Ok(b.words)
}

fn indexed_equivalences() -> Outcome {
    let ww = IndexedGrammar::parse(common::WW).unwrap();
    let want: BTreeSet<Word> = ["", "aa", "bb", "aaaa", "abab", "baba", "bbbb"]
        .iter()
        .map(|w| ww.terminals().parse_word(w).unwrap())
        .collect();
    ensure(exhaustive(&ww, 4, "ww")? == want, || "ww at length 4".into())?;
    let mut checks = 1;
    for (name, g) in common::indexed_corpus() {
        let src = exhaustive(&g, 5, name)?;
        let norm = g.normalize();
        ensure(norm.is_normal_form(), || format!("{name}: normalize left non-normal productions"))?;
        ensure(exhaustive(&norm, 5, name)? == src, || format!("{name}: normalize changed the language"))?;
        let ig = g.to_interval().map_err(|e| e.to_string())?;
        ig.check().map_err(|e| format!("{name}: {e}"))?;
        let ordered: BTreeSet<Word> = src.iter().filter(|w| w.windows(2).all(|p| p[0] <= p[1])).cloned().collect();
        ensure(exhaustive(&ig.grammar, 5, name)? == ordered, || format!("{name}: to_interval differs"))?;
        let pg = ig.to_productive().map_err(|e| e.to_string())?;
        let nonempty: BTreeSet<Word> = ordered.iter().filter(|w| !w.is_empty()).cloned().collect();
        ensure(exhaustive(&pg.grammar, 5, name)? == nonempty, || format!("{name}: to_productive differs"))?;
        checks += 3;
    }
    // transducer images
    let rename = "input: a b\noutput: c d\nstate: q initial final\nedge: q a c q\nedge: q b d q\n";
    let double = "input: a b\noutput: a b\nstate: q initial final\nedge: q a a,a q\nedge: q b b q\n";
    let swap_tail = "input: a b\noutput: a b\nstate: p initial final\nstate: q final\n\
                     edge: p a a p\nedge: p b b q\nedge: q b a q\nedge: q a b q\n";
    let finite = IndexedGrammar::parse("terminals: a b\nstart: S\nS -> a b a | b b\n").unwrap();
    let cases: Vec<(&str, IndexedGrammar, Transducer)> = vec![
        ("ww/identity", ww.clone(), Transducer::identity(ww.terminals())),
        ("ww/rename", ww.clone(), Transducer::parse(rename).unwrap()),
        ("anbn/double", IndexedGrammar::parse(common::ANBN).unwrap(), Transducer::parse(double).unwrap()),
        ("ww/swap-tail", ww.clone(), Transducer::parse(swap_tail).unwrap()),
        ("finite/subword", finite.clone(), Transducer::subword(finite.terminals())),
    ];
    for (name, g, t) in cases {
        let h = g.triple_construct(&t).map_err(|e| format!("{name}: {e}"))?;
        let got = exhaustive(&h, 4, name)?;
        // every transducer here is non-erasing or the source is finite
        let mut image = BTreeSet::new();
        for w in exhaustive(&g, 4, name)? {
            image.extend(t.apply_to_word(&w).unwrap().enumerate(4));
        }
        ensure(got == image, || format!("{name}: image differs"))?;
        checks += 1;
    }
    Ok(format!("{checks} equivalences"))
}

fn index_words(k: usize, max: usize) -> Vec<Word> {
    let mut all = vec![vec![]];
    let mut layer: Vec<Word> = vec![vec![]];
    for _ in 0..max {
        layer = layer.iter().flat_map(|w| (0..k).map(move |f| [w.clone(), vec![f]].concat())).collect();
        all.extend(layer.iter().cloned());
    }
    all
}

fn iw_cross_validation() -> Outcome {
    let ww = IndexedGrammar::parse(common::WW).unwrap();
    let blocked = IndexedGrammar::parse(common::WW_BLOCKED).unwrap();
    let universal = |g: &IndexedGrammar| Nfa::universal(g.terminals().clone());
    let u = ww.nonterminal_id("U").unwrap();
    let fg = ww.iw_automaton(u, &universal(&ww)).map_err(|e| e.to_string())?;
    ensure(fg.equivalent(&Nfa::universal(ww.indices().clone())).unwrap(), || "I(U, T*) ≠ (f|g)* for ww".into())?;
    let ub = blocked.nonterminal_id("U").unwrap();
    let f_only = blocked.iw_automaton(ub, &universal(&blocked)).map_err(|e| e.to_string())?;
    let mut fstar = Nfa::new(blocked.indices().clone(), 1, 0);
    fstar.set_final(0, true);
    fstar.add_edge(0, vec![0], 0);
    ensure(f_only.equivalent(&fstar).unwrap(), || "I(U, T*) ≠ f* for the blocked variant".into())?;

    let ends_in_a = |g: &IndexedGrammar| {
        let mut m = Nfa::new(g.terminals().clone(), 2, 0);
        for a in g.terminals().letters() {
            m.add_edge(0, vec![a], 0);
        }
        m.add_edge(0, vec![0], 1);
        m.set_final(1, true);
        m
    };
    let only_a = |g: &IndexedGrammar| {
        let mut m = Nfa::new(g.terminals().clone(), 1, 0);
        m.set_final(0, true);
        m.add_edge(0, vec![0], 0);
        m
    };
    let mut checked = 0;
    let corpus = common::indexed_corpus();
    for (name, g) in &corpus {
        let targets = [
            ("T*", universal(g)),
            ("ε", Nfa::epsilon(g.terminals().clone())),
            ("T*a", ends_in_a(g)),
            ("a*", only_a(g)),
        ];
        for (rname, r) in &targets {
            for a in 0..g.num_nonterminals() {
                let m = g.iw_automaton(a, r).map_err(|e| format!("{name}: {e}"))?;
                for x in index_words(g.indices().len(), 3) {
                    let b = g.bounded_language_from(&[Item::N(a, x.clone())], 12, 2_000_000);
                    ensure(b.exhaustive, || format!("{name}: search from {} is not exhaustive", g.nonterminal_name(a)))?;
                    let want = b.words.iter().any(|w| r.accepts(w).unwrap());
                    let got = m.accepts(&x).unwrap();
                    ensure(got == want, || {
                        format!(
                            "{name}: {} with index {} and R = {rname}: automaton says {got}",
                            g.nonterminal_name(a),
                            g.indices().format_word(&x)
                        )
                    })?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{} grammars, {checked} memberships", corpus.len()))
}

fn pcp() -> Outcome {
    let g = pcp_grammar(&[("x", "1", "1")]).map_err(|e| e.to_string())?;
    let b = g.bounded_language(8, 2_000_000);
    let want: BTreeSet<Word> = [vec![0, 1], vec![0, 0, 0, 1, 1, 1]].into();
    ensure(b.exhaustive, || "search is not exhaustive".into())?;
    ensure(b.words == want, || format!("got {:?}", b.words))?;
    let g = pcp_grammar(&[("x", "1", "2")]).map_err(|e| e.to_string())?;
    ensure(g.bounded_language(3, 100_000).words.contains(&vec![0, 1, 1]), || "a b² missing".into())?;
    let mut words: Vec<Vec<u8>> = vec![vec![]];
    let mut layer = words.clone();
    for _ in 0..6 {
        layer = layer.iter().flat_map(|w| [1u8, 2].map(|d| [w.clone(), vec![d]].concat())).collect();
        words.extend(layer.iter().cloned());
    }
    let values: BTreeSet<u64> = words.iter().map(|w| nu(w)).collect();
    ensure(values.len() == words.len(), || "ν is not injective".into())?;
    Ok(format!("{{ab, aaabbb}} at length 8; ν injective on {} words", words.len()))
}

fn partition_domination() -> Outcome {
    let mut members = 0;
    for (name, g) in common::indexed_corpus() {
        let pg = g.to_interval().and_then(|ig| ig.to_productive()).map_err(|e| e.to_string())?;
        let src = pg.grammar.bounded_language(10, 2_000_000).words;
        let fam = pg.partitioned_family();
        let n = g.terminals().len();
        ensure(fam.len() == if n == 1 { 1 } else { 1 << n }, || format!("{name}: family of {}", fam.len()))?;
        for d in &fam {
            d.check().map_err(|e| format!("{name}: {e}"))?;
            for w in d.grammar.grammar.bounded_language(5, 200_000).words {
                ensure(src.iter().any(|v| is_subword(&w, v)), || {
                    format!("{name}, D = {:?}: {} is not dominated", d.direct, g.terminals().format_word(&w))
                })?;
            }
            members += 1;
        }
    }
    Ok(format!("{members} partitioned grammars"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("regular end-to-end", regular_end_to_end),
        ("CFG showcase", cfg_showcase),
        ("SUP decision table", sup_table),
        ("Parikh two-sided oracle", parikh_oracle),
        ("indexed transformation equivalences", indexed_equivalences),
        ("regular index sets", iw_cross_validation),
        ("PCP generator", pcp),
        ("partitioned subword domination", partition_domination),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let out = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match out {
            Ok(detail) => println!("PASS {}. {name} ({detail}) [{:.1?}]", i + 1, t0.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name}: {why} [{:.1?}]", i + 1, t0.elapsed());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
