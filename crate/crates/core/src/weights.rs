//! Restricted weight sets `Omega = Lambda ∩ Conv(W lambda*)`.

use crate::rat::{self, Q, QVec};
use crate::rootsys::{dominant_representative, fundamental_weights, RootSystem};
use num_traits::{Signed, Zero};
use std::collections::{BTreeSet, VecDeque};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WeightError {
    #[error("highest weight is not dominant: negative on simple root {0}")]
    NotDominant(usize),
    #[error("highest weight is not integral: coefficient {0} is not an integer")]
    NotIntegral(usize),
    #[error("highest weight has a component outside the root span")]
    OutsideRootSpan,
    #[error("highest weight has {got} coordinates, expected {expected}")]
    WrongLength { got: usize, expected: usize },
}

#[derive(Debug, Clone)]
pub struct WeightSet {
    pub rs: RootSystem,
    pub highest: QVec,
    /// Sorted and deduplicated.
    pub weights: BTreeSet<QVec>,
}

impl WeightSet {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn contains(&self, w: &[Q]) -> bool {
        self.weights.contains(w)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = &QVec> {
        self.weights.iter().filter(|w| !rat::is_zero(w))
    }
}

/// Coefficients `n_i` of `lambda = sum n_i w_i`.
pub fn fundamental_coords(rs: &RootSystem, lambda: &[Q]) -> QVec {
    (0..rs.rank)
        .map(|i| {
            let ap = rs.alpha_prime(i);
            Q::from_integer(2.into()) * rs.inner(lambda, &ap) / rs.norm2(&ap)
        })
        .collect()
}

pub fn from_fundamental_coords(rs: &RootSystem, n: &[Q]) -> QVec {
    fundamental_weights(rs)
        .iter()
        .zip(n)
        .fold(rat::zeros(rs.ambient_dim), |acc, (w, c)| rat::add(&acc, &rat::scale(c, w)))
}

pub fn validate_highest_weight(rs: &RootSystem, lambda: &[Q]) -> Result<(), WeightError> {
    if lambda.len() != rs.ambient_dim {
        return Err(WeightError::WrongLength { got: lambda.len(), expected: rs.ambient_dim });
    }
    for (i, a) in rs.simple_roots.iter().enumerate() {
        if rs.inner(lambda, a).is_negative() {
            return Err(WeightError::NotDominant(i));
        }
    }
    let n = fundamental_coords(rs, lambda);
    if let Some(i) = n.iter().position(|c| !c.is_integer()) {
        return Err(WeightError::NotIntegral(i));
    }
    if from_fundamental_coords(rs, &n) != lambda {
        return Err(WeightError::OutsideRootSpan);
    }
    Ok(())
}

/// Whether the dominant representative of `mu` lies below `lambda` in every
/// fundamental-weight direction.
pub fn in_hull(rs: &RootSystem, fw: &[QVec], lambda: &[Q], mu: &[Q]) -> bool {
    let (dom, _) = dominant_representative(rs, mu);
    fw.iter().all(|w| rs.inner(w, &dom) <= rs.inner(w, lambda))
}

/// Breadth-first lowering from `lambda` by simple roots, keeping the points
/// that pass the hull test.
pub fn weight_set(rs: &RootSystem, lambda: &[Q]) -> Result<WeightSet, WeightError> {
    validate_highest_weight(rs, lambda)?;
    let fw = fundamental_weights(rs);
    let mut seen: BTreeSet<QVec> = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(lambda.to_vec());
    queue.push_back(lambda.to_vec());
    while let Some(mu) = queue.pop_front() {
        for a in &rs.simple_roots {
            let nu = rat::sub(&mu, a);
            if seen.contains(&nu) || !in_hull(rs, &fw, lambda, &nu) {
                continue;
            }
            seen.insert(nu.clone());
            queue.push_back(nu);
        }
    }
    Ok(WeightSet { rs: rs.clone(), highest: lambda.to_vec(), weights: seen })
}

pub fn has_zero_weight(ws: &WeightSet) -> bool {
    ws.contains(&rat::zeros(ws.rs.ambient_dim))
}

/// `lambda` lies in the integer span of the roots.
pub fn in_root_lattice(rs: &RootSystem, lambda: &[Q]) -> bool {
    rs.in_root_span(lambda) && rs.simple_coords(lambda).iter().all(|c| c.is_integer())
}

/// Sanity helper: the number of weights whose value on `x` vanishes.
pub fn count_vanishing(ws: &WeightSet, x: &[Q]) -> usize {
    ws.weights.iter().filter(|w| ws.rs.inner(w, x).is_zero()).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{qf, qvec};
    use crate::rootsys::RootLabel;

    fn b2() -> RootSystem {
        RootSystem::build(RootLabel::B, 2).unwrap()
    }

    #[test]
    fn validation_errors() {
        let rs = b2();
        assert!(validate_highest_weight(&rs, &qvec(&[2, 1])).is_ok());
        assert_eq!(validate_highest_weight(&rs, &qvec(&[-1, 0])), Err(WeightError::NotDominant(0)));
        assert_eq!(
            validate_highest_weight(&rs, &[qf(1, 3), Q::zero()]),
            Err(WeightError::NotIntegral(0))
        );
    }

    #[test]
    fn b2_standard() {
        let ws = weight_set(&b2(), &qvec(&[1, 0])).unwrap();
        let expect: BTreeSet<QVec> =
            [[1, 0], [-1, 0], [0, 1], [0, -1], [0, 0]].iter().map(|v| qvec(v)).collect();
        assert_eq!(ws.weights, expect);
        assert!(has_zero_weight(&ws));
    }

    #[test]
    fn a1_half_weight_has_no_zero() {
        let rs = RootSystem::build(RootLabel::A, 1).unwrap();
        let lam = fundamental_weights(&rs)[0].clone();
        let ws = weight_set(&rs, &lam).unwrap();
        assert_eq!(ws.len(), 2);
        assert!(!has_zero_weight(&ws));
        assert!(!in_root_lattice(&rs, &lam));
    }

    #[test]
    fn fundamental_coordinate_round_trip() {
        let rs = RootSystem::build(RootLabel::A, 2).unwrap();
        let lam = from_fundamental_coords(&rs, &qvec(&[3, 0]));
        assert_eq!(lam, qvec(&[2, -1, -1]));
        assert_eq!(fundamental_coords(&rs, &lam), qvec(&[3, 0]));
    }
}
