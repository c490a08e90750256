use std::collections::BTreeSet;
use std::sync::OnceLock;

use margulis::affdyn::AffineSetting;
use margulis::linalg::Mat;
use margulis::schottky::{self, GeneratorSet, Letter, SynthesisConfig, Word};
use proptest::prelude::*;

fn setting() -> &'static (AffineSetting, GeneratorSet) {
    static CELL: OnceLock<(AffineSetting, GeneratorSet)> = OnceLock::new();
    CELL.get_or_init(|| {
        let st = AffineSetting::from_name("so(2,1)").unwrap();
        let gs = schottky::synthesize(&st, &SynthesisConfig::default()).unwrap();
        (st, gs)
    })
}

fn word(k: usize, max_len: usize) -> impl Strategy<Value = Word> {
    proptest::collection::vec((0..k, prop_oneof![Just(1i8), Just(-1i8)]), 0..max_len)
        .prop_map(|ls| Word(ls.into_iter().map(|(gen, sign)| Letter { gen, sign }).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn display_parse_round_trip(w in word(3, 8)) {
        let s = w.to_string();
        prop_assert_eq!(Word::parse(&s).unwrap(), w);
    }

    #[test]
    fn inverse_is_an_involution(w in word(3, 8)) {
        prop_assert_eq!(w.inverse().inverse(), w.clone());
        prop_assert_eq!(w.inverse().is_reduced(), w.is_reduced());
        prop_assert_eq!(w.inverse().is_cyclically_reduced(), w.is_cyclically_reduced());
    }

    #[test]
    fn evaluation_respects_inverses(w in word(2, 5)) {
        let (st, gs) = setting();
        let prod = gs.evaluate(&w).mul(&gs.evaluate(&w.inverse()));
        let id = Mat::identity(st.dim() + 1);
        prop_assert!(prod.extended().m.dist(&id) <= 1e-30);
    }
}

#[test]
fn enumeration_is_exactly_the_cyclically_reduced_words() {
    for (k, max_len) in [(1, 4), (2, 4), (3, 3)] {
        let words = schottky::enumerate_cyclically_reduced(k, max_len);
        let set: BTreeSet<&Word> = words.iter().collect();
        assert_eq!(set.len(), words.len(), "duplicates for k={k}");
        assert!(words.iter().all(|w| !w.is_empty() && w.len() <= max_len && w.is_cyclically_reduced()));
        // Closed form: (2k-1)^l + 1 + (k-1)(1 + (-1)^l) cyclically reduced words of length l.
        let expected: usize = (1..=max_len)
            .map(|l| {
                let base = (2 * k - 1).pow(l as u32) + 1;
                let even = if l % 2 == 0 { 2 * (k - 1) } else { 0 };
                base + even
            })
            .sum();
        assert_eq!(words.len(), expected, "k={k}, L={max_len}");
    }
}

#[test]
fn distinct_short_words_do_not_collide() {
    let (_, gs) = setting();
    let rep = schottky::freeness_proxy(gs, 4);
    assert!(rep.min_separation > 1e-4, "closest pair {:?} at {}", rep.closest, rep.min_separation);
}

#[test]
fn invariant_of_inverse_word_is_minus_w0() {
    let (st, gs) = setting();
    let rep = schottky::additivity_report(st, gs, 4);
    assert!(rep.summary.max_inverse_residual <= 1e-10);
    assert!(rep.rows.iter().all(|r| r.type_x0));
}

#[test]
fn generator_set_passes_verification() {
    let (st, gs) = setting();
    let checked = schottky::verify_generators(st, gs.clone()).unwrap();
    assert!(checked.c_bar.is_finite() && checked.c_bar >= 1.0);
    for (sp, sm) in &checked.s_values {
        assert!(*sp <= 1e-4 && *sm <= 1e-4);
    }
}
