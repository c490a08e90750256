use std::collections::BTreeSet;

use margulis::rat::{self, Q, QMat, QVec};
use margulis::rootsys::{self, RootSystem, WeylElement};
use margulis::typing;
use margulis::weights::{self, WeightSet};
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

/// Representations without swinging, so that a reference vector exists.
const REPS: [(&str, &[i64]); 6] = [
    ("B2", &[1, 0]),
    ("B2", &[2, 1]),
    ("B2", &[1, 1]),
    ("A2", &[1, 0, -1]),
    ("B3", &[1, 0, 0]),
    ("C4", &[1, 1, 1, 1]),
];

fn ws_of(system: &str, hw: &[i64]) -> WeightSet {
    let rs = RootSystem::from_label(system).unwrap();
    weights::weight_set(&rs, &rat::qvec(hw)).unwrap()
}

/// Random strictly dominant rational point.
fn random_dominant(rs: &RootSystem, rng: &mut impl Rng) -> QVec {
    let fw = rootsys::fundamental_weights(rs);
    fw.iter().fold(rat::zeros(rs.ambient_dim), |acc, w| {
        let c = rat::qf(rng.gen_range(1..=1000), rng.gen_range(1..=97));
        rat::add(&acc, &rat::scale(&c, w))
    })
}

fn matrices(ws: &[WeylElement]) -> BTreeSet<QMat> {
    ws.iter().map(|w| w.matrix.clone()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn classify_is_scale_invariant(
        rep in 0usize..REPS.len(),
        xs in proptest::collection::vec(-20i64..=20, 4),
        num in 1i64..50,
        den in 1i64..50,
    ) {
        let ws = ws_of(REPS[rep].0, REPS[rep].1);
        let x: QVec = (0..ws.rs.ambient_dim).map(|i| rat::qf(xs[i], 1 + i as i64)).collect();
        let c = rat::qf(num, den);
        prop_assert_eq!(typing::classify(&rat::scale(&c, &x), &ws), typing::classify(&x, &ws));
    }
}

#[test]
fn reference_vector_is_extreme() {
    for (system, hw) in REPS {
        let ws = ws_of(system, hw);
        let group = rootsys::weyl_group(&ws.rs).unwrap();
        let rv = typing::reference_vector(&ws).unwrap();
        for w in &group {
            let wx = w.apply(&rv.x0);
            assert_eq!(typing::same_type(&wx, &rv.x0, &ws), wx == rv.x0, "{system} {hw:?}");
        }
    }
}

#[test]
fn stabilizer_generated_by_vanishing_simple_roots() {
    for (system, hw) in REPS {
        let ws = ws_of(system, hw);
        let rs = &ws.rs;
        let group = rootsys::weyl_group(rs).unwrap();
        let rv = typing::reference_vector(&ws).unwrap();
        let n = rs.ambient_dim;
        let mut generated: BTreeSet<QMat> = BTreeSet::new();
        let mut stack = vec![rat::identity(n)];
        while let Some(m) = stack.pop() {
            if !generated.insert(m.clone()) {
                continue;
            }
            for &i in &rv.pi_x0 {
                stack.push(rat::mat_mul(&rs.reflection_matrix(i), &m));
            }
        }
        let stab = matrices(&typing::weyl_stabilizer(&rv.x0, &group));
        assert_eq!(generated, stab, "{system} {hw:?}");
        assert_eq!(stab, matrices(&rv.w_x0));
    }
}

#[test]
fn enumeration_covers_monte_carlo_samples() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    for (system, hw) in [("B2", &[2i64, 1][..]), ("C4", &[1, 1, 1, 1][..]), ("B2", &[1, 0][..]), ("A2", &[1, 0, -1][..])] {
        let ws = ws_of(system, hw);
        let classes: BTreeSet<Vec<QVec>> =
            typing::enumerate_generic_types(&ws).unwrap().iter().map(|t| t.class.key()).collect();
        let mut seen = BTreeSet::new();
        for _ in 0..10_000 {
            let x = random_dominant(&ws.rs, &mut rng);
            if !typing::is_generic(&x, &ws) {
                continue;
            }
            let key = typing::classify(&x, &ws).key();
            assert!(classes.contains(&key), "{system} {hw:?}: sampled class missing from the enumeration");
            seen.insert(key);
        }
        assert!(!seen.is_empty());
    }
}

#[test]
fn longest_element_swaps_signs_of_symmetric_generic() {
    for (system, hw) in REPS {
        let ws = ws_of(system, hw);
        let w0 = rootsys::longest_element(&ws.rs);
        let x = typing::find_symmetric_generic(&ws, &w0).unwrap();
        assert_eq!(rat::neg(&w0.apply(&x)), x, "{system}: X is not symmetric");
        let t = typing::classify(&x, &ws);
        let image: BTreeSet<QVec> = t.omega_pos.iter().map(|w| w0.apply(w)).collect();
        assert_eq!(image, t.omega_neg, "{system} {hw:?}");
        assert!(t.omega_zero.iter().all(|w| w.iter().all(Q::is_zero)));
    }
}
