use super::*;
use crate::alphabet::Alphabet;
use crate::error::Error;
use crate::machine::{validate_spec, CspdaSpec, LetterMap, Machine, RunOutcome, StateKind};
use crate::oracles::fixtures::{integers, z2};
use crate::oracles::{FreeOracle, GroupOracle, VirtuallyFreeData, VirtuallyFreeOracle};

pub fn machine(spec: CspdaSpec) -> Machine {
    let report = validate_spec(&spec);
    assert!(report.is_valid(), "{report}");
    Machine::new(spec).unwrap()
}

/// Accepted words of `A^{≤n}` disagreeing with the oracle.
pub fn mismatches(m: &Machine, o: &dyn GroupOracle, n: usize, bound: usize) -> Vec<String> {
    let a = o.alphabet();
    let map = LetterMap::new(m, a).unwrap();
    let mut out = Vec::new();
    for w in a.words_up_to(n) {
        let got = m.accepts(&map.symbols(&w), bound).unwrap().accepted;
        if got == o.is_trivial(&w) {
            out.push(format!("{} (machine {got})", a.format_word(&w)));
        }
    }
    out
}

pub fn accepted_set(m: &Machine, a: &Alphabet, n: usize, bound: usize) -> Vec<bool> {
    let map = LetterMap::new(m, a).unwrap();
    a.words_up_to(n).map(|w| m.accepts(&map.symbols(&w), bound).unwrap().accepted).collect()
}

pub fn entry(m: &Machine, init: &str) -> crate::machine::Configuration {
    let word = m.spec().parse_symbols(init).unwrap();
    m.entry_configuration(&m.init_word(&word).unwrap())
}

pub fn run(m: &Machine, init: &str, w: &str) -> RunOutcome {
    let cfg = entry(m, init);
    let w = m.spec().parse_symbols(w).unwrap();
    m.run_word(cfg, &w)
}

fn f2() -> VirtuallyFreeData {
    VirtuallyFreeData::free(Alphabet::with_case_inverses(&["a", "b"]).unwrap())
}

#[test]
fn free_group_validates_and_matches() {
    let m = machine(build_virtually_free(&f2()).unwrap());
    let o = FreeOracle::new(f2().alphabet);
    assert!(mismatches(&m, &o, 5, 7).is_empty());
}

#[test]
fn free_group_traces() {
    let m = machine(build_virtually_free(&f2()).unwrap());
    assert!(run(&m, "⍟", "a").reached().is_some());
    assert!(run(&m, "", "a").is_failed());
    let r = m.accepts(&m.spec().parse_symbols("a b").unwrap(), 4).unwrap();
    assert_eq!(m.spec().format_symbols(&r.witness.unwrap().word), "⍟ ⍟");
    let back = run(&m, "⍟ ⍟", "a A");
    let cfg = back.reached().unwrap();
    assert!(cfg.push.is_empty());
    assert_eq!(m.kind(cfg.state), StateKind::Entry);
}

#[test]
fn lazy_search_matches_enumeration() {
    let m = machine(build_virtually_free(&super::tests::dinf()).unwrap());
    let a = super::tests::dinf().alphabet;
    let map = LetterMap::new(&m, &a).unwrap();
    for w in a.words_up_to(5) {
        let w = map.symbols(&w);
        assert_eq!(m.accepts(&w, 5).unwrap(), m.accepts_enumerated(&w, 5).unwrap());
    }
}

pub fn dinf() -> VirtuallyFreeData {
    crate::oracles::fixtures::dihedral()
}

#[test]
fn dihedral_and_involution() {
    let m = machine(build_virtually_free(&dinf()).unwrap());
    let o = VirtuallyFreeOracle::new(dinf()).unwrap();
    assert!(mismatches(&m, &o, 6, 6).is_empty());
    let m = machine(build_virtually_free(&z2("x")).unwrap());
    let o = VirtuallyFreeOracle::new(z2("x")).unwrap();
    assert!(mismatches(&m, &o, 4, 3).is_empty());
    let m = machine(build_virtually_free(&integers("t")).unwrap());
    let o = VirtuallyFreeOracle::new(integers("t")).unwrap();
    assert!(mismatches(&m, &o, 5, 6).is_empty());
}

#[test]
fn trivial_group_accepts_nothing() {
    let d = VirtuallyFreeData::free(Alphabet::empty());
    let m = machine(build_virtually_free(&d).unwrap());
    assert!(!m.accepts(&[], 3).unwrap().accepted);
}

mod bounded_tests {
    use super::*;
    use crate::oracles::fixtures::{grigorchuk, grigorchuk_generators, root_swap};
    use crate::oracles::{FinitaryAutomorphism, Generator};

    fn grig() -> (Machine, crate::oracles::BoundedOracle) {
        let o = grigorchuk();
        let m = machine(build_bounded_automata(o.alphabet(), &grigorchuk_generators()).unwrap());
        (m, o)
    }

    fn calibrated(o: &crate::oracles::BoundedOracle, n: usize) -> usize {
        o.alphabet().words_up_to(n).filter_map(|w| o.moved_depth(&w)).max().unwrap_or(0) + 1
    }

    #[test]
    fn grigorchuk_matches_oracle() {
        let (m, o) = grig();
        let bound = calibrated(&o, 4);
        assert!(mismatches(&m, &o, 4, bound).is_empty());
    }

    #[test]
    fn grigorchuk_relations_and_witness() {
        let (m, _) = grig();
        for r in ["a a", "b b", "c c", "d d", "b c d"] {
            assert!(!m.accepts(&m.spec().parse_symbols(r).unwrap(), 6).unwrap().accepted, "{r}");
        }
        let r = m.accepts(&m.spec().parse_symbols("a b").unwrap(), 4).unwrap();
        let x = r.witness.unwrap();
        assert_eq!(m.spec().format_symbols(&x.word), "0 ⍟");
    }

    #[test]
    fn identity_generators() {
        let a = Alphabet::from_pairs(&[("e", "e")]).unwrap();
        let m = machine(build_bounded_automata(&a, &[Generator::Finitary(FinitaryAutomorphism::identity(2))]).unwrap());
        let o =
            crate::oracles::BoundedOracle::new(a, &[Generator::Finitary(FinitaryAutomorphism::identity(2))]).unwrap();
        assert!(mismatches(&m, &o, 4, 4).is_empty());
        let a = Alphabet::from_pairs(&[("s", "s")]).unwrap();
        let g = [Generator::Finitary(root_swap())];
        let m = machine(build_bounded_automata(&a, &g).unwrap());
        let o = crate::oracles::BoundedOracle::new(a, &g).unwrap();
        assert!(mismatches(&m, &o, 4, 3).is_empty());
    }
}

mod preperiod_tests {
    use super::*;
    use crate::oracles::fixtures::root_swap;
    use crate::oracles::{BoundedOracle, DirectedAutomorphism, Generator, OffSpine};

    #[test]
    fn directed_with_preperiod() {
        let mut gens = vec![Generator::Finitary(root_swap())];
        for (p, q) in [(vec![0], vec![1]), (vec![1, 0], vec![1, 1]), (vec![], vec![0, 1])] {
            let classes = p.len() + q.len();
            let off_spine = (0..classes)
                .filter(|c| c % 2 == 1)
                .map(|c| {
                    let on = if c < p.len() { p[c] } else { q[c - p.len()] };
                    OffSpine { class: c, letter: 1 - on, image: 1 - on, tail: root_swap() }
                })
                .collect();
            gens.push(Generator::Directed(DirectedAutomorphism {
                degree: 2,
                p_image: p.clone(),
                q_image: q.clone(),
                p,
                q,
                off_spine,
            }));
        }
        let a = Alphabet::from_pairs(&[("s", "s"), ("x", "x"), ("y", "y"), ("z", "z")]).unwrap();
        let o = BoundedOracle::new(a.clone(), &gens).unwrap();
        let m = machine(build_bounded_automata(&a, &gens).unwrap());
        let bound = a.words_up_to(4).filter_map(|w| o.moved_depth(&w)).max().unwrap() + 1;
        assert!(mismatches(&m, &o, 4, bound).is_empty());
    }
}

mod ht_tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::oracles::fixtures::{leaf_swap, shift};
    use crate::oracles::HtOracle;

    fn two() -> (Machine, HtOracle) {
        let a = Alphabet::from_pairs(&[("s", "s"), ("t", "T")]).unwrap();
        let gens = BTreeMap::from([("s".to_string(), leaf_swap()), ("t".to_string(), shift())]);
        let m = machine(build_higman_thompson(&a, 2, 1, &gens).unwrap());
        (m, HtOracle::new(a, 2, 1, &gens).unwrap())
    }

    #[test]
    fn two_generator_matches_oracle() {
        let (m, o) = two();
        assert!(mismatches(&m, &o, 4, 7).is_empty());
    }

    #[test]
    fn leaf_swap_witness() {
        let (m, _) = two();
        let w = |s: &str| m.spec().parse_symbols(s).unwrap();
        assert!(!m.accepts(&w("s s"), 6).unwrap().accepted);
        let r = m.accepts(&w("s"), 4).unwrap();
        assert_eq!(m.spec().format_symbols(&r.witness.unwrap().word), "s1 q1 ⍟");
    }
}

mod combinator_tests {
    use std::sync::Arc;

    use super::*;
    use crate::oracles::fixtures::{free2, z2_oracle};
    use crate::oracles::{oracle_direct_product, oracle_finite_extension, oracle_rewritten, SharedOracle};

    fn f2_spec() -> CspdaSpec {
        build_virtually_free(&f2()).unwrap()
    }

    #[test]
    fn rewrite_identity_and_redundant_generator() {
        let a = f2().alphabet;
        let id: Vec<Vec<usize>> = a.letters().map(|x| vec![x]).collect();
        let m = machine(rewrite_generators(&f2_spec(), &a, &id).unwrap());
        let base = machine(f2_spec());
        assert_eq!(accepted_set(&m, &a, 4, 6), accepted_set(&base, &a, 4, 6));

        let new = Alphabet::with_case_inverses(&["a", "b", "c"]).unwrap();
        let p = |s: &str| a.parse_word(s).unwrap();
        let images = vec![p("a"), p("A"), p("b"), p("B"), p("ab"), p("BA")];
        let m = machine(rewrite_generators(&f2_spec(), &new, &images).unwrap());
        let o = oracle_rewritten(free2(), new, images).unwrap();
        assert!(mismatches(&m, &o, 4, 9).is_empty());
        assert!(!m.accepts(&m.spec().parse_symbols("c B A").unwrap(), 8).unwrap().accepted);
    }

    #[test]
    fn rewrite_rejects_empty_images() {
        let x = Alphabet::with_case_inverses(&["x"]).unwrap();
        assert!(matches!(rewrite_generators(&f2_spec(), &x, &[vec![], vec![]]), Err(Error::EmptyReplacement(_))));
    }

    #[test]
    fn dihedral_as_extension_of_integers() {
        let z = crate::oracles::fixtures::integers("x");
        let zm = build_virtually_free(&z).unwrap();
        let m = machine(extend_finite(&zm, &dinf()).unwrap());
        let direct = machine(build_virtually_free(&dinf()).unwrap());
        let a = dinf().alphabet;
        assert_eq!(accepted_set(&m, &a, 6, 7), accepted_set(&direct, &a, 6, 7));
        let zo: SharedOracle = Arc::new(VirtuallyFreeOracle::new(z).unwrap());
        let o = oracle_finite_extension(zo, dinf()).unwrap();
        assert!(mismatches(&m, &o, 6, 7).is_empty());
    }

    #[test]
    fn direct_product_with_involution() {
        let m = machine(product_direct(&f2_spec(), &build_virtually_free(&z2("z")).unwrap()).unwrap());
        let o = oracle_direct_product(free2(), z2_oracle("z")).unwrap();
        assert!(mismatches(&m, &o, 4, 6).is_empty());
        let w = |s: &str| m.spec().parse_symbols(s).unwrap();
        assert!(!m.accepts(&w("z z"), 6).unwrap().accepted);
        assert!(m.accepts(&w("a z"), 6).unwrap().accepted);
        assert!(m.accepts(&w("z"), 6).unwrap().accepted);
        assert!(matches!(product_direct(&f2_spec(), &f2_spec()), Err(Error::AlphabetCollision(_))));
    }
}

mod free_product_tests {
    use super::*;
    use crate::oracles::fixtures::{free2, z2_oracle};
    use crate::oracles::oracle_free_product;

    fn dinf_fp() -> Machine {
        let (a, b) = (build_virtually_free(&z2("a")).unwrap(), build_virtually_free(&z2("b")).unwrap());
        machine(product_free(&a, &b).unwrap())
    }

    #[test]
    fn involutions_give_dihedral() {
        let m = dinf_fp();
        let o = oracle_free_product(z2_oracle("a"), z2_oracle("b")).unwrap();
        assert!(mismatches(&m, &o, 5, 10).is_empty());
        let direct = machine(build_virtually_free(&dinf()).unwrap());
        let a = dinf().alphabet;
        assert_eq!(accepted_set(&m, &a, 5, 10), accepted_set(&direct, &a, 5, 10));
    }

    #[test]
    fn lazy_search_matches_enumeration() {
        let m = dinf_fp();
        let a = dinf().alphabet;
        let map = LetterMap::new(&m, &a).unwrap();
        for w in a.words_up_to(3) {
            let w = map.symbols(&w);
            assert_eq!(m.accepts(&w, 6).unwrap(), m.accepts_enumerated(&w, 6).unwrap());
        }
    }

    #[test]
    fn free_group_with_involution() {
        let m = machine(
            product_free(&build_virtually_free(&f2()).unwrap(), &build_virtually_free(&z2("z")).unwrap()).unwrap(),
        );
        let o = oracle_free_product(free2(), z2_oracle("z")).unwrap();
        assert!(mismatches(&m, &o, 3, 8).is_empty());
        let w = |s: &str| m.spec().parse_symbols(s).unwrap();
        assert!(m.accepts(&w("a z A z"), 10).unwrap().accepted);
        assert!(!m.accepts(&w("a A"), 8).unwrap().accepted);
    }
}

mod wreath_tests {
    use super::*;
    use crate::oracles::fixtures::z2_oracle;
    use crate::oracles::oracle_wreath;

    #[test]
    fn lamplighter() {
        let h = build_virtually_free(&z2("h")).unwrap();
        let m = machine(product_wreath(&h, &integers("t")).unwrap());
        let o = oracle_wreath(z2_oracle("h"), integers("t")).unwrap();
        assert!(mismatches(&m, &o, 4, 8).is_empty());
        let w = |s: &str| m.spec().parse_symbols(s).unwrap();
        assert!(m.accepts(&w("h t h T"), 8).unwrap().accepted);
        assert!(!m.accepts(&w("h h"), 8).unwrap().accepted);
        assert!(!m.accepts(&w("t T"), 8).unwrap().accepted);
    }
}

mod wreath_dihedral_tests {
    use super::*;
    use crate::machine::SearchLimits;
    use crate::oracles::fixtures::z2_oracle;
    use crate::oracles::oracle_wreath;

    #[test]
    fn over_dihedral_top() {
        let h = build_virtually_free(&z2("h")).unwrap();
        let m = machine(product_wreath(&h, &dinf()).unwrap());
        let o = oracle_wreath(z2_oracle("h"), dinf()).unwrap();
        assert!(mismatches(&m, &o, 4, 8).is_empty());
        let limits = SearchLimits { samples: 300, max_len: 4, init_bound: 6, seed: 3 };
        let report = m.audit_property3(&o, limits).unwrap();
        assert!(report.passed(), "{:?}", report.counterexamples.first());
    }
}
