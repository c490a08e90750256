mod common;

use margulis::rat::{self, Q, QVec};
use margulis::rootsys::{self, RootSystem};
use margulis::weights::{self, WeightSet};
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

const SYSTEMS: [&str; 10] = ["A1", "A2", "A3", "B2", "B3", "C2", "C3", "BC2", "G2", "D4"];

/// A valid highest weight from small fundamental coordinates.
fn representation() -> impl Strategy<Value = WeightSet> {
    (proptest::sample::select(SYSTEMS.to_vec()), proptest::collection::vec(0i64..=2, 4)).prop_filter_map(
        "invalid or trivial highest weight",
        |(s, n)| {
            let rs = RootSystem::from_label(s).unwrap();
            let coords: QVec = n[..rs.rank].iter().map(|&c| rat::q(c)).collect();
            if coords.iter().all(|c| c.is_zero()) {
                return None;
            }
            let lambda = weights::from_fundamental_coords(&rs, &coords);
            weights::weight_set(&rs, &lambda).ok()
        },
    )
}

fn coroot_pairing(rs: &RootSystem, mu: &[Q], a: &[Q]) -> Q {
    rat::q(2) * rs.inner(mu, a) / rs.norm2(a)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn weyl_invariant(ws in representation()) {
        for w in rootsys::weyl_group(&ws.rs).unwrap() {
            for mu in &ws.weights {
                prop_assert!(ws.contains(&w.apply(mu)));
            }
        }
    }

    #[test]
    fn saturated_along_simple_roots(ws in representation()) {
        let rs = &ws.rs;
        for mu in &ws.weights {
            for a in &rs.simple_roots {
                let n = coroot_pairing(rs, mu, a);
                prop_assert!(n.is_integer());
                let n = n.to_integer().to_i64().unwrap();
                let (lo, hi) = if n >= 0 { (0, n) } else { (n, 0) };
                for k in lo..=hi {
                    let p = rat::sub(mu, &rat::scale(&rat::q(k), a));
                    prop_assert!(ws.contains(&p), "missing {:?} on the string through {:?}", p, mu);
                }
            }
        }
    }

    #[test]
    fn matches_dominance_oracle(ws in representation()) {
        let oracle = common::dominance_oracle(&ws.rs, &ws.highest);
        prop_assert_eq!(&ws.weights, &oracle);
    }

    #[test]
    fn zero_weight_criteria_agree(ws in representation()) {
        prop_assert_eq!(weights::has_zero_weight(&ws), weights::in_root_lattice(&ws.rs, &ws.highest));
    }

    #[test]
    fn highest_weight_is_the_unique_dominant_maximum(ws in representation()) {
        let rs = &ws.rs;
        prop_assert!(ws.contains(&ws.highest));
        for mu in ws.weights.iter().filter(|m| rs.is_dominant(m)) {
            let c = rs.simple_coords(&rat::sub(&ws.highest, mu));
            prop_assert!(c.iter().all(|x| *x >= Q::zero()));
        }
    }
}

#[test]
fn hundred_random_highest_weights_zero_weight_agreement() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let mut tested = 0;
    while tested < 100 {
        let s = SYSTEMS[rng.gen_range(0..SYSTEMS.len())];
        let rs = RootSystem::from_label(s).unwrap();
        let n: QVec = (0..rs.rank).map(|_| rat::q(rng.gen_range(0..=3))).collect();
        let lambda = weights::from_fundamental_coords(&rs, &n);
        let Ok(ws) = weights::weight_set(&rs, &lambda) else { continue };
        assert_eq!(weights::has_zero_weight(&ws), weights::in_root_lattice(&rs, &lambda), "{s} {n:?}");
        tested += 1;
    }
}
