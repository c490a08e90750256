//! Exact rational feasibility by phase-one simplex with Bland's rule.

use crate::rat::{Q, QVec};
use num_traits::{One, Signed, Zero};

/// Constraints on unrestricted variables `x ∈ Q^n`.
#[derive(Debug, Clone, Default)]
pub struct Constraints {
    pub n: usize,
    pub eq: Vec<(QVec, Q)>,
    pub ge: Vec<(QVec, Q)>,
}

impl Constraints {
    pub fn new(n: usize) -> Self {
        Constraints { n, eq: Vec::new(), ge: Vec::new() }
    }

    pub fn eq(&mut self, a: QVec, b: Q) -> &mut Self {
        self.eq.push((a, b));
        self
    }

    pub fn ge(&mut self, a: QVec, b: Q) -> &mut Self {
        self.ge.push((a, b));
        self
    }

    pub fn check(&self, x: &[Q]) -> bool {
        let val = |a: &QVec| a.iter().zip(x).fold(Q::zero(), |s, (p, q)| s + p * q);
        self.eq.iter().all(|(a, b)| val(a) == *b) && self.ge.iter().all(|(a, b)| val(a) >= *b)
    }
}

/// Returns a feasible point or `None`.
pub fn feasible_point(c: &Constraints) -> Option<QVec> {
    let n = c.n;
    let m_eq = c.eq.len();
    let m_ge = c.ge.len();
    let m = m_eq + m_ge;
    if m == 0 {
        return Some(vec![Q::zero(); n]);
    }
    // columns: x+ (n), x- (n), surplus (m_ge), artificial (m), rhs
    let nv = 2 * n + m_ge;
    let width = nv + m + 1;
    let mut t: Vec<Vec<Q>> = Vec::with_capacity(m);
    for (r, (a, b)) in c.eq.iter().chain(c.ge.iter()).enumerate() {
        let mut row = vec![Q::zero(); width];
        for j in 0..n {
            row[j] = a[j].clone();
            row[n + j] = -a[j].clone();
        }
        if r >= m_eq {
            row[2 * n + (r - m_eq)] = -Q::one();
        }
        row[width - 1] = b.clone();
        if b.is_negative() {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
        }
        row[nv + r] = Q::one();
        t.push(row);
    }
    let mut basis: Vec<usize> = (0..m).map(|r| nv + r).collect();
    // reduced costs of the phase-one objective (sum of artificials)
    let mut cost = vec![Q::zero(); width];
    for row in &t {
        for j in 0..nv {
            cost[j] -= &row[j];
        }
        cost[width - 1] -= &row[width - 1];
    }
    while let Some(enter) = (0..nv + m).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<usize> = None;
        let mut best: Option<Q> = None;
        for r in 0..m {
            if t[r][enter].is_positive() {
                let ratio = &t[r][width - 1] / &t[r][enter];
                let better = match &best {
                    None => true,
                    Some(bv) => ratio < *bv || (ratio == *bv && basis[r] < basis[leave.unwrap()]),
                };
                if better {
                    best = Some(ratio);
                    leave = Some(r);
                }
            }
        }
        let Some(r) = leave else { break };
        pivot(&mut t, &mut cost, r, enter);
        basis[r] = enter;
    }
    if !cost[width - 1].is_zero() {
        return None;
    }
    let mut y = vec![Q::zero(); nv + m];
    for (r, &b) in basis.iter().enumerate() {
        y[b] = t[r][width - 1].clone();
    }
    let x: QVec = (0..n).map(|j| &y[j] - &y[n + j]).collect();
    debug_assert!(c.check(&x));
    Some(x)
}

fn pivot(t: &mut [Vec<Q>], cost: &mut [Q], r: usize, col: usize) {
    let p = t[r][col].clone();
    for x in t[r].iter_mut() {
        *x = &*x / &p;
    }
    let prow = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i != r && !row[col].is_zero() {
            let f = row[col].clone();
            for (x, y) in row.iter_mut().zip(&prow) {
                *x -= &f * y;
            }
        }
    }
    if !cost[col].is_zero() {
        let f = cost[col].clone();
        for (x, y) in cost.iter_mut().zip(&prow) {
            *x -= &f * y;
        }
    }
}

/// A point `t` with `row · t > 0` for every row, if the open cone is nonempty.
pub fn strict_cone_point(n: usize, rows: &[QVec]) -> Option<QVec> {
    let mut c = Constraints::new(n);
    for r in rows {
        c.ge(r.clone(), Q::one());
    }
    feasible_point(&c)
}

/// Whether `p` is a convex combination of `points`; returns the weights.
pub fn convex_combination(points: &[QVec], p: &[Q]) -> Option<QVec> {
    let k = points.len();
    let mut c = Constraints::new(k);
    for (d, pd) in p.iter().enumerate() {
        c.eq(points.iter().map(|v| v[d].clone()).collect(), pd.clone());
    }
    c.eq(vec![Q::one(); k], Q::one());
    for i in 0..k {
        let mut e = vec![Q::zero(); k];
        e[i] = Q::one();
        c.ge(e, Q::zero());
    }
    feasible_point(&c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{q, qf, qvec};

    #[test]
    fn simple_feasible_and_infeasible() {
        let mut c = Constraints::new(2);
        c.ge(qvec(&[1, 0]), q(1)).ge(qvec(&[0, 1]), q(2)).ge(qvec(&[-1, -1]), q(-4));
        let x = feasible_point(&c).unwrap();
        assert!(c.check(&x));
        c.ge(qvec(&[-1, -1]), q(-2));
        assert!(feasible_point(&c).is_none());
    }

    #[test]
    fn strict_cone() {
        assert!(strict_cone_point(2, &[qvec(&[1, 0]), qvec(&[0, 1]), qvec(&[1, -1])]).is_some());
        assert!(strict_cone_point(2, &[qvec(&[1, 0]), qvec(&[-1, 0])]).is_none());
    }

    #[test]
    fn hull_membership() {
        let pts = vec![qvec(&[0, 0]), qvec(&[2, 0]), qvec(&[0, 2])];
        assert!(convex_combination(&pts, &[qf(1, 2), qf(1, 2)]).is_some());
        assert!(convex_combination(&pts, &[q(2), q(1)]).is_none());
    }
}
