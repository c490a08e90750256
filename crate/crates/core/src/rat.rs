//! Exact rational scalars and small dense vector/matrix helpers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::Write as _;

pub type Q = BigRational;
pub type QVec = Vec<Q>;
pub type QMat = Vec<QVec>;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qvec(xs: &[i64]) -> QVec {
    xs.iter().map(|&x| q(x)).collect()
}

pub fn zeros(n: usize) -> QVec {
    vec![Q::zero(); n]
}

pub fn identity(n: usize) -> QMat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect()
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn add(a: &[Q], b: &[Q]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Q], b: &[Q]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(c: &Q, a: &[Q]) -> QVec {
    a.iter().map(|x| c * x).collect()
}

pub fn neg(a: &[Q]) -> QVec {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero(a: &[Q]) -> bool {
    a.iter().all(Zero::is_zero)
}

pub fn mat_vec(m: &QMat, v: &[Q]) -> QVec {
    m.iter().map(|row| dot(row, v)).collect()
}

pub fn mat_mul(a: &QMat, b: &QMat) -> QMat {
    let n = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| row.iter().zip(b).fold(Q::zero(), |acc, (x, brow)| acc + x * &brow[j]))
                .collect()
        })
        .collect()
}

pub fn transpose(a: &QMat) -> QMat {
    let n = a.first().map_or(0, Vec::len);
    (0..n).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Solves `a x = b` for square nonsingular `a`. Returns `None` when singular.
pub fn solve(a: &QMat, b: &[Q]) -> Option<QVec> {
    let n = a.len();
    let mut m: Vec<QVec> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let p = m[col][col].clone();
        for x in m[col].iter_mut() {
            *x = &*x / &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot_row = m[col].clone();
                for (x, y) in m[r].iter_mut().zip(&pivot_row) {
                    *x = &*x - &f * y;
                }
            }
        }
    }
    Some(m.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Reduced row echelon form; returns the matrix and its pivot columns.
pub fn rref(a: &QMat) -> (QMat, Vec<usize>) {
    let mut m = a.clone();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pv = m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = &*x / &pv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let prow = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&prow) {
                    *x = &*x - &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

/// Basis of the kernel of `a` (as column vectors of length `cols`).
pub fn kernel(a: &QMat, cols: usize) -> Vec<QVec> {
    if a.is_empty() {
        return (0..cols)
            .map(|i| (0..cols).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
            .collect();
    }
    let (m, pivots) = rref(a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = zeros(cols);
            v[f] = Q::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[row][f].clone();
            }
            v
        })
        .collect()
}

pub fn rank(a: &QMat) -> usize {
    rref(a).1.len()
}

/// Writes `p/q`, or `p` for integers.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        let mut s = String::new();
        let _ = write!(s, "{}/{}", x.numer(), x.denom());
        s
    }
}

pub fn fmt_qvec(v: &[Q]) -> Vec<String> {
    v.iter().map(fmt_q).collect()
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("cannot parse rational {0:?}")]
pub struct ParseQError(pub String);

pub fn parse_q(s: &str) -> Result<Q, ParseQError> {
    let t = s.trim();
    let err = || ParseQError(s.to_string());
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        Ok(Q::new(n, d))
    } else if let Some((ip, fp)) = t.split_once('.') {
        let neg = ip.trim_start().starts_with('-');
        let ip_abs = ip.trim().trim_start_matches(['-', '+']);
        let whole: BigInt = if ip_abs.is_empty() { BigInt::zero() } else { ip_abs.parse().map_err(|_| err())? };
        let frac: BigInt = if fp.is_empty() { BigInt::zero() } else { fp.parse().map_err(|_| err())? };
        let den = num_traits::pow(BigInt::from(10), fp.len());
        let v = Q::new(whole * &den + frac, den);
        Ok(if neg { -v } else { v })
    } else {
        Ok(Q::from_integer(t.parse().map_err(|_| err())?))
    }
}

pub fn parse_qvec(s: &str) -> Result<QVec, ParseQError> {
    s.split(',').map(parse_q).collect()
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn sign(x: &Q) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Exact rational value of a finite double.
pub fn from_f64(x: f64) -> Q {
    Q::from_float(x).unwrap_or_else(Q::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3", "-2/7", "0", "5/3"] {
            assert_eq!(fmt_q(&parse_q(s).unwrap()), s);
        }
        assert_eq!(parse_q("1.25").unwrap(), qf(5, 4));
        assert_eq!(parse_q("-0.5").unwrap(), qf(-1, 2));
        assert!(parse_q("1/0").is_err());
    }

    #[test]
    fn solve_small_system() {
        let a = vec![qvec(&[2, 1]), qvec(&[1, 3])];
        let x = solve(&a, &qvec(&[3, 5])).unwrap();
        assert_eq!(x, vec![qf(4, 5), qf(7, 5)]);
        assert!(solve(&vec![qvec(&[1, 2]), qvec(&[2, 4])], &qvec(&[1, 1])).is_none());
    }

    #[test]
    fn kernel_dimension() {
        let a = vec![qvec(&[1, 1, 1])];
        let k = kernel(&a, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(dot(&a[0], v).is_zero());
        }
    }
}
