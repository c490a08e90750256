use margulis::hp::Hp;
use margulis::linalg::{self, Mat};
use margulis::proximal::{self, PROXIMAL_TOL};
use proptest::prelude::*;

fn mat(n: usize, xs: &[f64]) -> Mat {
    Mat::from_fn(n, n, |i, j| Hp::from_f64(xs[i * n + j] + if i == j { 1.0 } else { 0.0 }))
}

/// `phi diag(1, d_2, ...) phi^-1` with `|d_i| < 1`.
fn proximal_matrix(n: usize, phi: &[f64], d: &[f64]) -> Option<(Mat, Mat)> {
    let p = mat(n, phi);
    let pi = linalg::inverse(&p)?;
    let mut diag = vec![Hp::one()];
    diag.extend(d[..n - 1].iter().map(|x| Hp::from_f64(*x)));
    Some((p.mul(&Mat::diag(&diag)).mul(&pi), p))
}

fn entries(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-0.4f64..0.4, n * n)
}

fn moduli(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(prop_oneof![-0.9f64..-0.05, 0.05f64..0.9], n - 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kappa_is_at_most_strength(phi in entries(4), d in moduli(4)) {
        let Some((g, _)) = proximal_matrix(4, &phi, &d) else { return Ok(()) };
        let p = proximal::proximal_data(&g, PROXIMAL_TOL).unwrap();
        prop_assert!(p.kappa.to_f64() <= p.s_tilde.to_f64() * (1.0 + 1e-12));
        let top = d.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        prop_assert!((p.kappa.to_f64() - top).abs() <= 1e-20);
    }

    #[test]
    fn conjugation_moves_the_proximal_spaces(phi in entries(4), d in moduli(4), psi in entries(4)) {
        let Some((g, _)) = proximal_matrix(4, &phi, &d) else { return Ok(()) };
        let c = mat(4, &psi);
        let Some(ci) = linalg::inverse(&c) else { return Ok(()) };
        let cond = c.op_norm().to_f64() * ci.op_norm().to_f64();
        prop_assume!(cond < 50.0);
        let p = proximal::proximal_data(&g, PROXIMAL_TOL).unwrap();
        let q = proximal::proximal_data(&c.mul(&g).mul(&ci), PROXIMAL_TOL).unwrap();
        prop_assert!(proximal::line_angle(&q.es, &c.mul_vec(&p.es)) <= 1e-8);
        let eu = c.mul(&p.eu_basis());
        prop_assert!(linalg::subspace_distance(&eu, &q.eu_basis()).to_f64() <= 1e-8);
    }

    #[test]
    fn bounded_maps_distort_angles_by_at_most_c_squared(
        psi in entries(3),
        xs in proptest::collection::vec(-1.0f64..1.0, 12),
    ) {
        let c = mat(3, &psi);
        let Some(ci) = linalg::inverse(&c) else { return Ok(()) };
        let bound = c.op_norm().to_f64().max(ci.op_norm().to_f64());
        let v = |k: usize| -> Vec<Hp> { xs[3 * k..3 * k + 3].iter().map(|x| Hp::from_f64(*x)).collect() };
        let pairs = vec![(v(0), v(1)), (v(2), v(3))];
        prop_assume!(pairs.iter().all(|(a, b)| proximal::line_angle(a, b) > 1e-6));
        prop_assert!(proximal::angle_distortion(&c, &pairs) <= bound * bound * (1.0 + 1e-9));
    }

    #[test]
    fn exterior_power_is_multiplicative(a in entries(4), b in entries(4), p in 1usize..4) {
        let (a, b) = (mat(4, &a), mat(4, &b));
        let lhs = proximal::exterior_power(&a.mul(&b), p);
        let rhs = proximal::exterior_power(&a, p).mul(&proximal::exterior_power(&b, p));
        prop_assert!(lhs.dist(&rhs) <= 1e-60);
    }
}
