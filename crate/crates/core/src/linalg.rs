//! Dense linear algebra over [`Hp`]: products, LU solves, one-sided Jacobi
//! SVD, Hessenberg/Francis eigenvalues and invariant subspaces.

use crate::hp::Hp;
use std::ops::{Index, IndexMut};

#[derive(Clone, PartialEq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Hp>,
}

impl std::fmt::Debug for Mat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format!("{:.6e}", self[(i, j)].to_f64())).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = Hp;
    fn index(&self, (i, j): (usize, usize)) -> &Hp {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Hp {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[Hp], b: &[Hp]) -> Hp {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

pub fn norm(a: &[Hp]) -> Hp {
    dot(a, a).sqrt()
}

pub fn vsub(a: &[Hp], b: &[Hp]) -> Vec<Hp> {
    a.iter().zip(b).map(|(x, y)| *x - *y).collect()
}

pub fn vadd(a: &[Hp], b: &[Hp]) -> Vec<Hp> {
    a.iter().zip(b).map(|(x, y)| *x + *y).collect()
}

pub fn vscale(c: Hp, a: &[Hp]) -> Vec<Hp> {
    a.iter().map(|x| c * *x).collect()
}

pub fn to_f64s(a: &[Hp]) -> Vec<f64> {
    a.iter().map(|x| x.to_f64()).collect()
}

pub fn from_f64s(a: &[f64]) -> Vec<Hp> {
    a.iter().map(|&x| Hp::from_f64(x)).collect()
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, data: vec![Hp::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Hp::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Hp) -> Mat {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Hp>]) -> Mat {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        Mat::from_fn(r, c, |i, j| rows[i][j])
    }

    pub fn from_f64_rows(rows: &[Vec<f64>]) -> Mat {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        Mat::from_fn(r, c, |i, j| Hp::from_f64(rows[i][j]))
    }

    pub fn from_cols(cols: &[Vec<Hp>], nrows: usize) -> Mat {
        Mat::from_fn(nrows, cols.len(), |i, j| cols[j][i])
    }

    pub fn diag(d: &[Hp]) -> Mat {
        let mut m = Mat::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = *x;
        }
        m
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self[(i, j)].to_f64()).collect()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<Hp> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<Hp> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[Hp]) {
        for (i, x) in v.iter().enumerate() {
            self[(i, j)] = *x;
        }
    }

    pub fn columns(&self) -> Vec<Vec<Hp>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out[(i, j)] + a * other[(k, j)];
                    out[(i, j)] = v;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Hp]) -> Vec<Hp> {
        (0..self.rows).map(|i| dot(&self.data[i * self.cols..(i + 1) * self.cols], v)).collect()
    }

    pub fn add(&self, other: &Mat) -> Mat {
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + other[(i, j)])
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - other[(i, j)])
    }

    pub fn scale(&self, c: Hp) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| c * *x).collect() }
    }

    pub fn norm_fro(&self) -> Hp {
        self.data.iter().map(|x| *x * *x).sum::<Hp>().sqrt()
    }

    pub fn max_abs(&self) -> Hp {
        self.data.iter().fold(Hp::ZERO, |m, x| m.max(x.abs()))
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> Hp {
        if self.rows == 0 || self.cols == 0 {
            return Hp::ZERO;
        }
        let t = self.transpose();
        let gram = if self.rows < self.cols { self.mul(&t) } else { t.mul(self) };
        let top = eigenvalues(&gram).into_iter().map(|(re, _)| re).fold(Hp::ZERO, Hp::max);
        top.sqrt()
    }

    pub fn block(&self, r0: usize, c0: usize, r: usize, c: usize) -> Mat {
        Mat::from_fn(r, c, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Mat) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        let mut m = Mat::zeros(self.rows, self.cols + other.cols);
        m.set_block(0, 0, self);
        m.set_block(0, self.cols, other);
        m
    }

    pub fn select_cols(&self, idx: &[usize]) -> Mat {
        Mat::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])])
    }

    pub fn trace(&self) -> Hp {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn dist(&self, other: &Mat) -> f64 {
        self.sub(other).max_abs().to_f64()
    }
}

/// LU with partial pivoting; `None` when a pivot vanishes.
pub struct Lu {
    lu: Mat,
    perm: Vec<usize>,
}

impl Lu {
    pub fn new(a: &Mat) -> Option<Lu> {
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, best) = (k..n).map(|i| (i, lu[(i, k)].abs())).fold((k, Hp::ZERO), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best.is_zero() {
                return None;
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
            }
            let inv = lu[(k, k)].recip();
            for i in k + 1..n {
                let f = lu[(i, k)] * inv;
                lu[(i, k)] = f;
                if !f.is_zero() {
                    for j in k + 1..n {
                        let v = lu[(i, j)] - f * lu[(k, j)];
                        lu[(i, j)] = v;
                    }
                }
            }
        }
        Some(Lu { lu, perm })
    }

    pub fn solve_vec(&self, b: &[Hp]) -> Vec<Hp> {
        let n = self.lu.rows;
        let mut x: Vec<Hp> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    pub fn solve(&self, b: &Mat) -> Mat {
        let cols: Vec<Vec<Hp>> = (0..b.cols).map(|j| self.solve_vec(&b.col(j))).collect();
        Mat::from_cols(&cols, self.lu.rows)
    }

    pub fn det(&self) -> Hp {
        let n = self.lu.rows;
        let mut d = Hp::one();
        for i in 0..n {
            d *= self.lu[(i, i)];
        }
        let mut p = self.perm.clone();
        let mut sign = false;
        for i in 0..n {
            while p[i] != i {
                let j = p[i];
                p.swap(i, j);
                sign = !sign;
            }
        }
        if sign {
            -d
        } else {
            d
        }
    }
}

pub fn inverse(a: &Mat) -> Option<Mat> {
    Lu::new(a).map(|lu| lu.solve(&Mat::identity(a.rows)))
}

pub fn det(a: &Mat) -> Hp {
    Lu::new(a).map_or(Hp::ZERO, |lu| lu.det())
}

/// Least-squares solution of `a x = b` through the SVD, dropping singular
/// values below `rel_tol * s_max`.
pub fn lstsq(a: &Mat, b: &[Hp], rel_tol: Hp) -> Vec<Hp> {
    let s = svd(a);
    let smax = s.s.first().copied().unwrap_or(Hp::ZERO);
    let mut x = vec![Hp::ZERO; a.cols];
    for k in 0..s.s.len() {
        if s.s[k] <= smax * rel_tol || s.s[k].is_zero() {
            continue;
        }
        let c = dot(&s.u.col(k), b) / s.s[k];
        let v = s.v.col(k);
        for (xi, vi) in x.iter_mut().zip(&v) {
            *xi += c * *vi;
        }
    }
    x
}

pub struct Svd {
    /// `rows x k` with orthonormal columns.
    pub u: Mat,
    /// Descending.
    pub s: Vec<Hp>,
    /// `cols x k` with orthonormal columns.
    pub v: Mat,
}

fn jacobi_tol() -> Hp {
    Hp::one().mul_pow2(-245)
}

/// One-sided Jacobi SVD.
pub fn svd(a: &Mat) -> Svd {
    if a.rows < a.cols {
        let t = svd(&a.transpose());
        return Svd { u: t.v, s: t.s, v: t.u };
    }
    let (m, n) = (a.rows, a.cols);
    let mut u = a.clone();
    let mut v = Mat::identity(n);
    let tol = jacobi_tol();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let mut alpha = Hp::ZERO;
                let mut beta = Hp::ZERO;
                let mut gamma = Hp::ZERO;
                for i in 0..m {
                    let up = u[(i, p)];
                    let uq = u[(i, q)];
                    alpha += up * up;
                    beta += uq * uq;
                    gamma += up * uq;
                }
                if gamma.is_zero() || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / gamma.mul_pow2(1);
                let t = {
                    let r = Hp::one() / (zeta.abs() + (Hp::one() + zeta * zeta).sqrt());
                    if zeta.is_negative() {
                        -r
                    } else {
                        r
                    }
                };
                let c = (Hp::one() + t * t).sqrt().recip();
                let s = c * t;
                for i in 0..m {
                    let up = u[(i, p)];
                    let uq = u[(i, q)];
                    u[(i, p)] = c * up - s * uq;
                    u[(i, q)] = s * up + c * uq;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = c * vp - s * vq;
                    v[(i, q)] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<(Hp, usize)> = (0..n).map(|j| (norm(&u.col(j)), j)).collect();
    sv.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    let mut uu = Mat::zeros(m, n);
    let mut vv = Mat::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (k, (sig, j)) in sv.iter().enumerate() {
        s.push(*sig);
        for i in 0..m {
            uu[(i, k)] = if sig.is_zero() { Hp::ZERO } else { u[(i, *j)] / *sig };
        }
        for i in 0..n {
            vv[(i, k)] = v[(i, *j)];
        }
    }
    Svd { u: uu, s, v: vv }
}

pub fn singular_values(a: &Mat) -> Vec<Hp> {
    svd(a).s
}

/// Smallest singular value (zero for an empty column set).
pub fn min_singular_value(a: &Mat) -> Hp {
    singular_values(a).last().copied().unwrap_or(Hp::ZERO)
}

/// Orthonormal basis of the column span, by Gram-Schmidt applied twice.
/// Columns whose residual falls below `rel_tol` times their norm are dropped.
pub fn orthonormalize(a: &Mat, rel_tol: Hp) -> Mat {
    let mut basis: Vec<Vec<Hp>> = Vec::new();
    for j in 0..a.cols {
        let mut v = a.col(j);
        let n0 = norm(&v);
        if n0.is_zero() {
            continue;
        }
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &v);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= c * *bi;
                }
            }
        }
        let n1 = norm(&v);
        if n1 <= n0 * rel_tol {
            continue;
        }
        basis.push(vscale(n1.recip(), &v));
    }
    Mat::from_cols(&basis, a.rows)
}

pub fn default_rank_tol() -> Hp {
    Hp::one().mul_pow2(-160)
}

/// Orthonormal basis of the orthogonal complement of the span of `a`.
pub fn orth_complement(a: &Mat) -> Mat {
    let n = a.rows;
    let q = orthonormalize(a, default_rank_tol());
    let full = q.hstack(&Mat::identity(n));
    let all = orthonormalize(&full, Hp::one().mul_pow2(-60));
    all.block(0, q.cols, n, all.cols - q.cols)
}

/// Orthonormal basis of the kernel, from singular values below `rel_tol * s_max`.
pub fn null_space(a: &Mat, rel_tol: Hp) -> Mat {
    let n = a.cols;
    if a.rows == 0 {
        return Mat::identity(n);
    }
    let aa = if a.rows < n {
        let mut p = Mat::zeros(n, n);
        p.set_block(0, 0, a);
        p
    } else {
        a.clone()
    };
    let s = svd(&aa);
    let smax = s.s.first().copied().unwrap_or(Hp::ZERO);
    let idx: Vec<usize> = (0..s.s.len()).filter(|&k| s.s[k] <= smax * rel_tol).collect();
    s.v.select_cols(&idx)
}

/// Orthogonal projector onto the span of an orthonormal basis.
pub fn projector(q: &Mat) -> Mat {
    q.mul(&q.transpose())
}

/// Orthonormal basis of the intersection of two spans.
pub fn intersect(u: &Mat, w: &Mat, tol: Hp) -> Mat {
    let qu = orthonormalize(u, default_rank_tol());
    let qw = orthonormalize(w, default_rank_tol());
    if qu.cols == 0 || qw.cols == 0 {
        return Mat::zeros(u.rows, 0);
    }
    let m = qu.transpose().mul(&qw);
    let s = svd(&m);
    let idx: Vec<usize> = (0..s.s.len()).filter(|&k| Hp::one() - s.s[k] <= tol).collect();
    let picked = qu.mul(&s.u.select_cols(&idx));
    orthonormalize(&picked, default_rank_tol())
}

/// Sine of the largest principal angle between two spans of equal dimension.
pub fn subspace_distance(u: &Mat, w: &Mat) -> Hp {
    let qu = orthonormalize(u, default_rank_tol());
    let qw = orthonormalize(w, default_rank_tol());
    let res = qw.sub(&qu.mul(&qu.transpose().mul(&qw)));
    let s = if res.cols == 0 { Hp::ZERO } else { res.op_norm() };
    let back = {
        let r2 = qu.sub(&qw.mul(&qw.transpose().mul(&qu)));
        if r2.cols == 0 {
            Hp::ZERO
        } else {
            r2.op_norm()
        }
    };
    s.max(back).min(Hp::one())
}

/// Eigenvalues as `(re, im)` pairs by Hessenberg reduction and Francis QR.
pub fn eigenvalues(a: &Mat) -> Vec<(Hp, Hp)> {
    let n = a.rows;
    if n == 0 {
        return Vec::new();
    }
    let mut h = hessenberg(a);
    hqr(&mut h)
}

fn hessenberg(a: &Mat) -> Mat {
    let n = a.rows;
    let mut h = a.clone();
    for m in 1..n.saturating_sub(1) {
        let mut x = Hp::ZERO;
        let mut piv = m;
        for j in m..n {
            if h[(j, m - 1)].abs() > x.abs() {
                x = h[(j, m - 1)];
                piv = j;
            }
        }
        if piv != m {
            for j in m - 1..n {
                let t = h[(piv, j)];
                h[(piv, j)] = h[(m, j)];
                h[(m, j)] = t;
            }
            for j in 0..n {
                let t = h[(j, piv)];
                h[(j, piv)] = h[(j, m)];
                h[(j, m)] = t;
            }
        }
        if !x.is_zero() {
            for i in m + 1..n {
                let mut y = h[(i, m - 1)];
                if !y.is_zero() {
                    y /= x;
                    h[(i, m - 1)] = y;
                    for j in m..n {
                        let v = h[(i, j)] - y * h[(m, j)];
                        h[(i, j)] = v;
                    }
                    for j in 0..n {
                        let v = h[(j, m)] + y * h[(j, i)];
                        h[(j, m)] = v;
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i > j + 1 {
                h[(i, j)] = Hp::ZERO;
            }
        }
    }
    h
}

fn sign_of(a: Hp, b: Hp) -> Hp {
    if b.is_negative() {
        -a.abs()
    } else {
        a.abs()
    }
}

fn hqr(a: &mut Mat) -> Vec<(Hp, Hp)> {
    let n = a.rows;
    let eps = Hp::one().mul_pow2(-250);
    let mut wr = vec![Hp::ZERO; n];
    let mut wi = vec![Hp::ZERO; n];
    let mut anorm = Hp::ZERO;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[(i, j)].abs();
        }
    }
    let mut nn: isize = n as isize - 1;
    let mut t = Hp::ZERO;
    let half = Hp::one().mul_pow2(-1);
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l > 0 {
                let mut s = a[(l - 1, l - 1)].abs() + a[(l, l)].abs();
                if s.is_zero() {
                    s = anorm;
                }
                if a[(l, l - 1)].abs() <= eps * s {
                    a[(l, l - 1)] = Hp::ZERO;
                    break;
                }
                l -= 1;
            }
            let mut x = a[(nu, nu)];
            if l == nu {
                wr[nu] = x + t;
                wi[nu] = Hp::ZERO;
                nn -= 1;
            } else {
                let mut y = a[(nu - 1, nu - 1)];
                let mut w = a[(nu, nu - 1)] * a[(nu - 1, nu)];
                if l + 1 == nu {
                    let p = half * (y - x);
                    let q = p * p + w;
                    let z = q.abs().sqrt();
                    x += t;
                    if !q.is_negative() {
                        let z = p + sign_of(z, p);
                        wr[nu - 1] = x + z;
                        wr[nu] = x + z;
                        if !z.is_zero() {
                            wr[nu] = x - w / z;
                        }
                        wi[nu - 1] = Hp::ZERO;
                        wi[nu] = Hp::ZERO;
                    } else {
                        wr[nu - 1] = x + p;
                        wr[nu] = x + p;
                        wi[nu - 1] = -z;
                        wi[nu] = z;
                    }
                    nn -= 2;
                } else {
                    if its == 120 {
                        panic!("eigenvalue iteration did not converge");
                    }
                    if its % 10 == 0 && its > 0 {
                        t += x;
                        for i in 0..=nu {
                            let v = a[(i, i)] - x;
                            a[(i, i)] = v;
                        }
                        let s = a[(nu, nu - 1)].abs() + a[(nu - 1, nu - 2)].abs();
                        x = Hp::from_f64(0.75) * s;
                        y = x;
                        w = Hp::from_f64(-0.4375) * s * s;
                    }
                    its += 1;
                    let mut m = nu - 2;
                    let (mut p, mut q, mut r);
                    loop {
                        let z = a[(m, m)];
                        let rr = x - z;
                        let ss = y - z;
                        p = (rr * ss - w) / a[(m + 1, m)] + a[(m, m + 1)];
                        q = a[(m + 1, m + 1)] - z - rr - ss;
                        r = a[(m + 2, m + 1)];
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
                        let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
                        if u <= eps * v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m..nu - 1 {
                        a[(i + 2, i)] = Hp::ZERO;
                        if i != m {
                            a[(i + 2, i - 1)] = Hp::ZERO;
                        }
                    }
                    let mut k = m;
                    while k < nu {
                        let mut xx = Hp::one();
                        if k != m {
                            p = a[(k, k - 1)];
                            q = a[(k + 1, k - 1)];
                            r = Hp::ZERO;
                            if k + 1 != nu {
                                r = a[(k + 2, k - 1)];
                            }
                            xx = p.abs() + q.abs() + r.abs();
                            if !xx.is_zero() {
                                p /= xx;
                                q /= xx;
                                r /= xx;
                            }
                        }
                        let s = sign_of((p * p + q * q + r * r).sqrt(), p);
                        if !s.is_zero() {
                            if k == m {
                                if l != m {
                                    a[(k, k - 1)] = -a[(k, k - 1)];
                                }
                            } else {
                                a[(k, k - 1)] = -s * xx;
                            }
                            p += s;
                            let x1 = p / s;
                            let y1 = q / s;
                            let z1 = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nu {
                                let mut pp = a[(k, j)] + q * a[(k + 1, j)];
                                if k + 1 != nu {
                                    pp += r * a[(k + 2, j)];
                                    let v = a[(k + 2, j)] - pp * z1;
                                    a[(k + 2, j)] = v;
                                }
                                let v1 = a[(k + 1, j)] - pp * y1;
                                a[(k + 1, j)] = v1;
                                let v0 = a[(k, j)] - pp * x1;
                                a[(k, j)] = v0;
                            }
                            let mmin = if nu < k + 3 { nu } else { k + 3 };
                            for i in l..=mmin {
                                let mut pp = x1 * a[(i, k)] + y1 * a[(i, k + 1)];
                                if k + 1 != nu {
                                    pp += z1 * a[(i, k + 2)];
                                    let v = a[(i, k + 2)] - pp * r;
                                    a[(i, k + 2)] = v;
                                }
                                let v1 = a[(i, k + 1)] - pp * q;
                                a[(i, k + 1)] = v1;
                                let v0 = a[(i, k)] - pp;
                                a[(i, k)] = v0;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if nn < 0 || l + 1 >= nn as usize {
                break;
            }
        }
    }
    wr.into_iter().zip(wi).collect()
}

/// Eigenvalue moduli in nonincreasing order.
pub fn eigen_moduli(a: &Mat) -> Vec<Hp> {
    let mut m: Vec<Hp> = eigenvalues(a).into_iter().map(|(re, im)| re.hypot(im)).collect();
    m.sort_by(|x, y| y.partial_cmp(x).unwrap());
    m
}

/// Unit eigenvector for a real eigenvalue `mu` by inverse iteration.
pub fn real_eigenvector(a: &Mat, mu: Hp) -> Vec<Hp> {
    let n = a.rows;
    let scale = a.max_abs().max(Hp::one());
    let shift = mu + scale.mul_pow2(-200);
    let shifted = Mat::from_fn(n, n, |i, j| if i == j { a[(i, j)] - shift } else { a[(i, j)] });
    let lu = Lu::new(&shifted).expect("shifted matrix is invertible");
    let mut v: Vec<Hp> = (0..n).map(|i| Hp::from_f64(1.0 + 0.1 * i as f64)).collect();
    for _ in 0..4 {
        v = lu.solve_vec(&v);
        let nv = norm(&v);
        v = vscale(nv.recip(), &v);
    }
    let idx = (0..n).fold(0, |b, i| if v[i].abs() > v[b].abs() { i } else { b });
    if v[idx].is_negative() {
        v = vscale(-Hp::one(), &v);
    }
    v
}

/// Orthonormal basis of the invariant subspace attached to the `k` eigenvalues
/// of largest modulus, assuming a strict modulus gap after the `k`-th.
pub fn dominant_subspace(a: &Mat, k: usize) -> Mat {
    let n = a.rows;
    if k == 0 {
        return Mat::zeros(n, 0);
    }
    if k >= n {
        return Mat::identity(n);
    }
    let moduli = eigen_moduli(a);
    let top = moduli[0].to_f64().max(f64::MIN_POSITIVE);
    let kth = moduli[k - 1].to_f64().max(f64::MIN_POSITIVE);
    let next = moduli[k].to_f64();
    let spread = (top / kth).ln().max(0.0);
    let gap = if next > 0.0 { (kth / next).ln() } else { f64::INFINITY };
    // power m keeps the spread inside the block below ~2^120
    let mut m: u64 = if spread > 0.0 { ((83.0 / spread).floor() as u64).max(1) } else { 1 << 16 };
    m = m.min(1 << 16);
    let mut p = a.scale(a.max_abs().recip());
    let mut power = 1u64;
    while power * 2 <= m {
        let sq = p.mul(&p);
        p = sq.scale(sq.max_abs().recip());
        power *= 2;
    }
    let seed_cols: Vec<Vec<Hp>> = (0..k)
        .map(|j| (0..n).map(|i| Hp::from_f64(((i * 7 + j * 13 + 3) % 11) as f64 / 11.0 - 0.45 + if i == j { 1.0 } else { 0.0 })).collect())
        .collect();
    let mut q = orthonormalize(&Mat::from_cols(&seed_cols, n), default_rank_tol());
    let per_step = gap * power as f64;
    let steps = if per_step.is_finite() && per_step > 0.0 { ((180.0 / per_step).ceil() as usize).clamp(2, 4000) } else { 2 };
    for _ in 0..steps {
        let next = orthonormalize(&p.mul(&q), default_rank_tol());
        if next.cols < k {
            break;
        }
        q = next;
    }
    for _ in 0..3 {
        let next = orthonormalize(&a.mul(&q), default_rank_tol());
        if next.cols < k {
            break;
        }
        q = next;
    }
    q
}

/// Matrix of `Λ^p g` in the lexicographic basis of `p`-subsets.
pub fn exterior_power(g: &Mat, p: usize) -> Mat {
    let subsets = k_subsets(g.rows, p);
    let n = subsets.len();
    let mut out = Mat::zeros(n, n);
    for (i, rows) in subsets.iter().enumerate() {
        for (j, cols) in subsets.iter().enumerate() {
            let minor = Mat::from_fn(p, p, |a, b| g[(rows[a], cols[b])]);
            out[(i, j)] = det(&minor);
        }
    }
    out
}

pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Wedge of the columns of `a` (an `n x p` matrix) in the lexicographic basis.
pub fn wedge(a: &Mat) -> Vec<Hp> {
    k_subsets(a.rows, a.cols)
        .iter()
        .map(|rows| det(&Mat::from_fn(a.cols, a.cols, |i, j| a[(rows[i], j)])))
        .collect()
}
