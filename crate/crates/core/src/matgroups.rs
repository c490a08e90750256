//! Matrix realizations of `(G, rho)`: the standard representation of
//! SO(p,q) and the adjoint representation of SL(n).
//!
//! Both live behind [`GroupRealization`] and are looked up by family name
//! through [`build`]. In every realization the basis of `V` is orthonormal for
//! the K-invariant form `B`, so `B` is the identity and adjoints are
//! transposes. Vectors of the Cartan subspace are given in the ambient
//! coordinates of the restricted root system, so `lambda(X)` is a dot product.

use crate::hp::Hp;
use crate::linalg::{self, Mat};
use crate::rat::{self, Q, QVec};
use crate::rootsys::{longest_element, rho, RootLabel, RootSystem};
use crate::typing::GroupKind;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

/// Log-spectrum match tolerance for projections.
pub const MATCH_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MatGroupError {
    #[error("invalid group parameters: {0}")]
    InvalidParameters(String),
    #[error("unknown group family `{0}`")]
    UnknownFamily(String),
    #[error("spectral match residual {0:e} exceeds tolerance")]
    MatchResidualTooLarge(f64),
    #[error("subspaces are not transverse: {0}")]
    NotTransverse(String),
}

/// A matrix together with its inverse, and optionally a preimage under a
/// covering representation (the `n x n` matrix behind an adjoint matrix).
#[derive(Clone, Debug)]
pub struct GroupElement {
    pub m: Mat,
    pub inv: Mat,
    pub lift: Option<Box<GroupElement>>,
}

impl GroupElement {
    pub fn new(m: Mat, inv: Mat) -> Self {
        GroupElement { m, inv, lift: None }
    }

    pub fn with_lift(m: Mat, inv: Mat, lift: GroupElement) -> Self {
        GroupElement { m, inv, lift: Some(Box::new(lift)) }
    }

    pub fn identity(n: usize) -> Self {
        GroupElement::new(Mat::identity(n), Mat::identity(n))
    }

    pub fn from_matrix(m: Mat) -> Option<Self> {
        let inv = linalg::inverse(&m)?;
        Some(GroupElement::new(m, inv))
    }

    pub fn dim(&self) -> usize {
        self.m.rows
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        let lift = match (&self.lift, &other.lift) {
            (Some(a), Some(b)) => Some(Box::new(a.mul(b))),
            _ => None,
        };
        GroupElement { m: self.m.mul(&other.m), inv: other.inv.mul(&self.inv), lift }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement { m: self.inv.clone(), inv: self.m.clone(), lift: self.lift.as_ref().map(|l| Box::new(l.inverse())) }
    }

    pub fn pow(&self, k: i64) -> GroupElement {
        if k == 0 {
            return GroupElement::identity(self.dim());
        }
        let mut sq = if k < 0 { self.inverse() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc: Option<GroupElement> = None;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => a.mul(&sq),
                });
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        acc.expect("k != 0")
    }

    /// `psi * self * psi^-1`.
    pub fn conjugate_by(&self, psi: &GroupElement) -> GroupElement {
        psi.mul(self).mul(&psi.inverse())
    }

    /// `‖g g^-1 - Id‖_max`.
    pub fn inverse_residual(&self) -> f64 {
        self.m.mul(&self.inv).dist(&Mat::identity(self.dim()))
    }
}

/// A restricted weight with an orthonormal basis of its weight space.
#[derive(Clone, Debug)]
pub struct WeightBlock {
    pub weight: QVec,
    pub basis: Mat,
}

impl WeightBlock {
    pub fn mult(&self) -> usize {
        self.basis.cols
    }
}

#[derive(Clone, Debug)]
pub struct Projection {
    /// Dominant vector in ambient coordinates.
    pub value: Vec<Hp>,
    /// Max deviation between the full log-spectrum and the predicted multiset.
    pub residual: f64,
    /// Spectrum entries below working resolution, left out of the residual.
    pub unresolved: usize,
}

impl Projection {
    pub fn to_f64(&self) -> Vec<f64> {
        linalg::to_f64s(&self.value)
    }
}

pub trait GroupRealization: Send + Sync {
    fn name(&self) -> String;
    fn kind(&self) -> GroupKind;
    fn dim(&self) -> usize;
    fn rs(&self) -> &RootSystem;
    fn highest_weight(&self) -> QVec;
    fn weight_table(&self) -> &[WeightBlock];
    /// The invariant form defining `G`.
    fn form_j(&self) -> &Mat;
    /// A random vector of the Cartan subspace with entries of size `scale`.
    fn random_a(&self, rng: &mut SeededRng, scale: f64) -> Vec<Hp>;
    fn random_k(&self, rng: &mut SeededRng) -> GroupElement;
    fn membership_residual(&self, g: &Mat) -> f64;
    /// Cartan projection read off the singular values, before the residual check.
    fn cartan_raw(&self, g: &GroupElement) -> Vec<Hp>;
    /// Jordan projection read off the eigenvalue moduli, before the residual check.
    fn jordan_raw(&self, g: &GroupElement) -> Vec<Hp>;
    /// `phi` in `G` with `phi(vge) = V^>=_0` and `phi(vle) = V^<=_0`.
    fn canonizer(&self, vge: &Mat, vle: &Mat) -> Result<GroupElement, MatGroupError>;
    /// A representative of `w0` in `N_K(A)`.
    fn w0_rep(&self) -> GroupElement;
    /// Generators of the Lie algebra of the compact centralizer, acting on `V`.
    fn l_generators(&self) -> Vec<Mat>;
    /// Preimage of `exp(X)` under a covering representation, if any.
    fn lift_of_exp(&self, _x: &[Hp]) -> Option<GroupElement> {
        None
    }
}

pub fn weight_value(lambda: &[Q], x: &[Hp]) -> Hp {
    lambda.iter().zip(x).map(|(l, xi)| Hp::from_q(l) * *xi).sum()
}

/// `rho(X)` as a diagonal matrix on the weight blocks.
pub fn lie_a(mg: &dyn GroupRealization, x: &[Hp]) -> Mat {
    let n = mg.dim();
    let mut out = Mat::zeros(n, n);
    for b in mg.weight_table() {
        let v = weight_value(&b.weight, x);
        out = out.add(&linalg::projector(&b.basis).scale(v));
    }
    out
}

pub fn exp_a(mg: &dyn GroupRealization, x: &[Hp]) -> GroupElement {
    let n = mg.dim();
    let mut m = Mat::zeros(n, n);
    let mut inv = Mat::zeros(n, n);
    for b in mg.weight_table() {
        let v = weight_value(&b.weight, x);
        let p = linalg::projector(&b.basis);
        m = m.add(&p.scale(v.exp()));
        inv = inv.add(&p.scale((-v).exp()));
    }
    GroupElement { m, inv, lift: mg.lift_of_exp(x).map(Box::new) }
}

pub fn exp_a_q(mg: &dyn GroupRealization, x: &[Q]) -> GroupElement {
    exp_a(mg, &x.iter().map(Hp::from_q).collect::<Vec<_>>())
}

/// `k1 exp(X) k2` with random `k1, k2` and `X` of entries up to `scale`.
pub fn random_element(mg: &dyn GroupRealization, rng: &mut SeededRng, scale: f64) -> GroupElement {
    let k1 = mg.random_k(rng);
    let x = mg.random_a(rng, scale);
    let k2 = mg.random_k(rng);
    k1.mul(&exp_a(mg, &x)).mul(&k2)
}

/// `psi exp(X) psi^-1` with `psi = k1 exp(Y) k2` and `‖Y‖_inf <= y_scale`.
pub fn random_hyperbolic(mg: &dyn GroupRealization, rng: &mut SeededRng, x_scale: f64, y_scale: f64) -> GroupElement {
    let psi = random_element(mg, rng, y_scale);
    let x = mg.random_a(rng, x_scale);
    exp_a(mg, &x).conjugate_by(&psi)
}

/// `k1 exp(a1) k1^-1 k2 exp(a2) k2^-1` with `‖a_i‖_inf <= eps`.
pub fn near_identity(mg: &dyn GroupRealization, rng: &mut SeededRng, eps: f64) -> GroupElement {
    let mut out = GroupElement::identity(mg.dim());
    for _ in 0..2 {
        let k = mg.random_k(rng);
        let a = mg.random_a(rng, eps);
        out = out.mul(&exp_a(mg, &a).conjugate_by(&k));
    }
    out
}

/// The multiset `{lambda(x)}` over weights with multiplicity, nonincreasing.
pub fn predicted_spectrum(mg: &dyn GroupRealization, x: &[Hp]) -> Vec<Hp> {
    let mut out: Vec<Hp> = mg
        .weight_table()
        .iter()
        .flat_map(|b| std::iter::repeat_n(weight_value(&b.weight, x), b.mult()))
        .collect();
    out.sort_by(|a, b| b.partial_cmp(a).unwrap());
    out
}

pub fn log_singular_values(g: &Mat) -> Vec<Hp> {
    linalg::singular_values(g).into_iter().map(Hp::ln).collect()
}

pub fn log_moduli(g: &Mat) -> Vec<Hp> {
    linalg::eigen_moduli(g).into_iter().map(Hp::ln).collect()
}

/// Entries more than this many nats below the top of their source are
/// treated as unresolved in 256-bit arithmetic.
const RESOLUTION_NATS: f64 = 138.0;

/// Nonincreasing log-spectrum of `g`, each entry read from `g` or from
/// `g^-1` (where it appears negated at the mirrored index), whichever has it
/// closer to its own top. Unresolvable entries are `None`.
pub fn combined_log_spectrum(g: &GroupElement, f: fn(&Mat) -> Vec<Hp>) -> Vec<Option<Hp>> {
    let a = f(&g.m);
    let b = f(&g.inv);
    let n = a.len();
    (0..n)
        .map(|i| {
            let ra = (a[i] - a[0]).to_f64();
            let rb = (b[n - 1 - i] - b[0]).to_f64();
            if ra.max(rb) < -RESOLUTION_NATS {
                None
            } else if ra >= rb {
                Some(a[i])
            } else {
                Some(-b[n - 1 - i])
            }
        })
        .collect()
}

fn match_residual(predicted: &[Hp], observed: &[Option<Hp>]) -> (f64, usize) {
    let mut worst = 0.0f64;
    let mut unresolved = 0;
    for (p, o) in predicted.iter().zip(observed) {
        match o {
            Some(o) => worst = worst.max((*p - *o).abs().to_f64()),
            None => unresolved += 1,
        }
    }
    (worst, unresolved)
}

pub fn cartan_projection(mg: &dyn GroupRealization, g: &GroupElement) -> Result<Projection, MatGroupError> {
    let value = mg.cartan_raw(g);
    let observed = combined_log_spectrum(g, log_singular_values);
    let (residual, unresolved) = match_residual(&predicted_spectrum(mg, &value), &observed);
    if residual > MATCH_TOL {
        return Err(MatGroupError::MatchResidualTooLarge(residual));
    }
    Ok(Projection { value, residual, unresolved })
}

pub fn jordan_projection(mg: &dyn GroupRealization, g: &GroupElement) -> Result<Projection, MatGroupError> {
    let value = mg.jordan_raw(g);
    let observed = combined_log_spectrum(g, log_moduli);
    let (residual, unresolved) = match_residual(&predicted_spectrum(mg, &value), &observed);
    if residual > MATCH_TOL {
        return Err(MatGroupError::MatchResidualTooLarge(residual));
    }
    Ok(Projection { value, residual, unresolved })
}

/// Orthonormal basis of the sum of the weight spaces selected by `pred`.
pub fn span_of(mg: &dyn GroupRealization, pred: impl Fn(&[Q]) -> bool) -> Mat {
    let cols: Vec<Vec<Hp>> =
        mg.weight_table().iter().filter(|b| pred(&b.weight)).flat_map(|b| b.basis.columns()).collect();
    Mat::from_cols(&cols, mg.dim())
}

pub fn zero_block(mg: &dyn GroupRealization) -> Mat {
    span_of(mg, rat::is_zero)
}

/// Reference pair `(V^>=_0, V^<=_0)` for any generic dominant `X0`; in both
/// realizations the sign of `lambda(X0)` is the sign of `<lambda, rho>`.
pub fn reference_pair(mg: &dyn GroupRealization) -> (Mat, Mat) {
    let r = rho(mg.rs());
    let sign = |l: &[Q]| rat::sign(&mg.rs().inner(l, &r));
    (span_of(mg, |l| sign(l) >= 0), span_of(mg, |l| sign(l) <= 0))
}

/// `V^t_0`: joint kernel of the compact-centralizer generators on `V^0`.
pub fn vt0_basis(mg: &dyn GroupRealization) -> Mat {
    let v0 = zero_block(mg);
    let gens = mg.l_generators();
    if gens.is_empty() || v0.cols == 0 {
        return v0;
    }
    let blocks: Vec<Mat> = gens.iter().map(|g| g.mul(&v0)).collect();
    let rows: usize = blocks.iter().map(|b| b.rows).sum();
    let mut stacked = Mat::zeros(rows, v0.cols);
    let mut r0 = 0;
    for b in &blocks {
        stacked.set_block(r0, 0, b);
        r0 += b.rows;
    }
    let null = linalg::null_space(&stacked, Hp::one().mul_pow2(-100));
    linalg::orthonormalize(&v0.mul(&null), linalg::default_rank_tol())
}

/// Matrix of `w0` on `V^t_0` in the basis returned by [`vt0_basis`].
pub fn w0_action_on_fixed_space(mg: &dyn GroupRealization) -> Mat {
    let vt = vt0_basis(mg);
    vt.transpose().mul(&mg.w0_rep().m).mul(&vt)
}

#[derive(Debug, Clone)]
pub struct TableCheck {
    pub dim_sum: usize,
    pub orthogonality: f64,
    pub eigen_residual: f64,
    pub weights_match: bool,
}

/// Checks the weight-table invariants against a sample Cartan vector.
pub fn check_weight_table(mg: &dyn GroupRealization, x: &[Hp]) -> TableCheck {
    let table = mg.weight_table();
    let dim_sum = table.iter().map(WeightBlock::mult).sum();
    let all = Mat::from_cols(&table.iter().flat_map(|b| b.basis.columns()).collect::<Vec<_>>(), mg.dim());
    let orthogonality = all.transpose().mul(&all).dist(&Mat::identity(all.cols));
    let a = lie_a(mg, x);
    let eigen_residual = table
        .iter()
        .map(|b| a.mul(&b.basis).dist(&b.basis.scale(weight_value(&b.weight, x))))
        .fold(0.0, f64::max);
    let ws = crate::weights::weight_set(mg.rs(), &mg.highest_weight());
    let weights_match = ws.is_ok_and(|ws| {
        let mine: std::collections::BTreeSet<QVec> = table.iter().map(|b| b.weight.clone()).collect();
        mine == ws.weights
    });
    TableCheck { dim_sum, orthogonality, eigen_residual, weights_match }
}

fn unit_col(n: usize, i: usize) -> Vec<Hp> {
    let mut v = vec![Hp::ZERO; n];
    v[i] = Hp::one();
    v
}

/// Random rotation in SO(m) as a product of Cayley-parametrized Givens rotations.
pub fn random_rotation(m: usize, rng: &mut SeededRng) -> Mat {
    let mut r = Mat::identity(m);
    for i in 0..m {
        for j in i + 1..m {
            let t = Hp::from_f64(rng.gen_range(-1.0..1.0));
            let d = (Hp::one() + t * t).recip();
            let c = (Hp::one() - t * t) * d;
            let s = t.mul_pow2(1) * d;
            for row in 0..m {
                let a = r[(row, i)];
                let b = r[(row, j)];
                r[(row, i)] = c * a - s * b;
                r[(row, j)] = s * a + c * b;
            }
        }
    }
    r
}

/// Standard representation of SO(p,q), `p > q >= 1`, in the basis
/// `e_1..e_q, f_1..f_q, u_1..u_{p-q}` with `J(e_i, f_j) = delta_ij`.
pub struct SoPq {
    p: usize,
    q: usize,
    rs: RootSystem,
    table: Vec<WeightBlock>,
    j: Mat,
    /// Orthonormal eigenbasis of `J`: `(e+f)/sqrt2`, `u`, `(e-f)/sqrt2`.
    t: Mat,
}

impl SoPq {
    pub fn new(p: usize, q: usize) -> Result<SoPq, MatGroupError> {
        if q < 1 || p <= q {
            return Err(MatGroupError::InvalidParameters(format!("so({p},{q}) needs p > q >= 1")));
        }
        let n = p + q;
        let rs = RootSystem::build(RootLabel::B, q).map_err(|e| MatGroupError::InvalidParameters(e.to_string()))?;
        let mut table = Vec::new();
        for i in 0..q {
            let mut w = rat::zeros(q);
            w[i] = Q::from_integer(1.into());
            table.push(WeightBlock { weight: w.clone(), basis: Mat::from_cols(&[unit_col(n, i)], n) });
            table.push(WeightBlock { weight: rat::neg(&w), basis: Mat::from_cols(&[unit_col(n, q + i)], n) });
        }
        let u: Vec<Vec<Hp>> = (2 * q..n).map(|i| unit_col(n, i)).collect();
        table.push(WeightBlock { weight: rat::zeros(q), basis: Mat::from_cols(&u, n) });
        let mut j = Mat::zeros(n, n);
        for i in 0..q {
            j[(i, q + i)] = Hp::one();
            j[(q + i, i)] = Hp::one();
        }
        for i in 2 * q..n {
            j[(i, i)] = Hp::one();
        }
        let h = Hp::from_i64(2).sqrt().recip();
        let mut t = Mat::zeros(n, n);
        for i in 0..q {
            t[(i, i)] = h;
            t[(q + i, i)] = h;
            t[(i, p + i)] = h;
            t[(q + i, p + i)] = -h;
        }
        for (c, i) in (2 * q..n).enumerate() {
            t[(i, q + c)] = Hp::one();
        }
        Ok(SoPq { p, q, rs, table, j, t })
    }

    fn n(&self) -> usize {
        self.p + self.q
    }

    /// Basis of the J-orthogonal complement of a span.
    fn j_perp(&self, a: &Mat) -> Mat {
        linalg::orth_complement(&self.j.mul(a))
    }

    fn jdot(&self, a: &[Hp], b: &[Hp]) -> Hp {
        linalg::dot(a, &self.j.mul_vec(b))
    }
}

/// The top `q` log values; the spectrum is symmetric about 0, so an
/// unresolved entry is recovered from its mirror.
fn top_q(spec: Vec<Option<Hp>>, q: usize) -> Vec<Hp> {
    let n = spec.len();
    (0..q).map(|i| spec[i].or_else(|| spec[n - 1 - i].map(|v| -v)).unwrap_or(Hp::ZERO)).collect()
}

impl GroupRealization for SoPq {
    fn name(&self) -> String {
        format!("so({},{})", self.p, self.q)
    }

    fn kind(&self) -> GroupKind {
        GroupKind::SoPq { p: self.p, q: self.q }
    }

    fn dim(&self) -> usize {
        self.n()
    }

    fn rs(&self) -> &RootSystem {
        &self.rs
    }

    fn highest_weight(&self) -> QVec {
        let mut w = rat::zeros(self.q);
        w[0] = Q::from_integer(1.into());
        w
    }

    fn weight_table(&self) -> &[WeightBlock] {
        &self.table
    }

    fn form_j(&self) -> &Mat {
        &self.j
    }

    fn random_a(&self, rng: &mut SeededRng, scale: f64) -> Vec<Hp> {
        (0..self.q).map(|_| Hp::from_f64(rng.gen_range(-scale..scale))).collect()
    }

    fn random_k(&self, rng: &mut SeededRng) -> GroupElement {
        let rp = random_rotation(self.p, rng);
        let rq = random_rotation(self.q, rng);
        let mut d = Mat::zeros(self.n(), self.n());
        d.set_block(0, 0, &rp);
        d.set_block(self.p, self.p, &rq);
        let k = self.t.mul(&d).mul(&self.t.transpose());
        let inv = k.transpose();
        GroupElement::new(k, inv)
    }

    fn membership_residual(&self, g: &Mat) -> f64 {
        g.transpose().mul(&self.j).mul(g).dist(&self.j)
    }

    fn cartan_raw(&self, g: &GroupElement) -> Vec<Hp> {
        top_q(combined_log_spectrum(g, log_singular_values), self.q)
    }

    fn jordan_raw(&self, g: &GroupElement) -> Vec<Hp> {
        top_q(combined_log_spectrum(g, log_moduli), self.q)
    }

    fn canonizer(&self, vge: &Mat, vle: &Mat) -> Result<GroupElement, MatGroupError> {
        let (n, p, q) = (self.n(), self.p, self.q);
        let tol = linalg::default_rank_tol();
        let vge = linalg::orthonormalize(vge, tol);
        let vle = linalg::orthonormalize(vle, tol);
        if vge.cols != p || vle.cols != p {
            return Err(MatGroupError::NotTransverse(format!("expected dimension {p}, got {} and {}", vge.cols, vle.cols)));
        }
        let vgt = self.j_perp(&vge);
        let vlt = self.j_perp(&vle);
        let pairing = vgt.transpose().mul(&self.j).mul(&vlt);
        let smin = linalg::min_singular_value(&pairing);
        if vgt.cols != q || vlt.cols != q || smin.to_f64() < 1e-30 {
            return Err(MatGroupError::NotTransverse("V^> and V^< do not pair".into()));
        }
        let e = vgt;
        let f = vlt.mul(&linalg::inverse(&pairing).expect("pairing is invertible"));
        let neutral = self.j_perp(&e.hstack(&f));
        let mut u: Vec<Vec<Hp>> = Vec::new();
        for c in neutral.columns() {
            let mut v = c;
            for b in &u {
                let k = self.jdot(b, &v);
                v = linalg::vsub(&v, &linalg::vscale(k, b));
            }
            let nn = self.jdot(&v, &v);
            if !nn.is_positive() {
                return Err(MatGroupError::NotTransverse("neutral part is not J-positive".into()));
            }
            u.push(linalg::vscale(nn.sqrt().recip(), &v));
        }
        let mut cols: Vec<Vec<Hp>> = Vec::with_capacity(n);
        let mut fcols: Vec<Vec<Hp>> = Vec::with_capacity(q);
        for i in 0..q {
            let ei = e.col(i);
            let fi = f.col(i);
            let c = (linalg::norm(&fi) / linalg::norm(&ei)).sqrt();
            cols.push(linalg::vscale(c, &ei));
            fcols.push(linalg::vscale(c.recip(), &fi));
        }
        cols.extend(fcols);
        cols.extend(u);
        let mut psi = Mat::from_cols(&cols, n);
        if linalg::det(&psi).is_negative() {
            for i in 0..n {
                psi[(i, 2 * q)] = -psi[(i, 2 * q)];
            }
        }
        let psi_inv = self.j.mul(&psi.transpose()).mul(&self.j);
        let phi = GroupElement::new(psi_inv, psi);
        let (rge, rle) = reference_pair(self);
        let d1 = linalg::subspace_distance(&phi.m.mul(&vge), &rge).to_f64();
        let d2 = linalg::subspace_distance(&phi.m.mul(&vle), &rle).to_f64();
        if d1.max(d2) > 1e-8 {
            return Err(MatGroupError::NotTransverse(format!("canonized spaces off by {:e}", d1.max(d2))));
        }
        Ok(phi)
    }

    fn w0_rep(&self) -> GroupElement {
        let (n, q) = (self.n(), self.q);
        let mut w = Mat::zeros(n, n);
        for i in 0..q {
            w[(q + i, i)] = Hp::one();
            w[(i, q + i)] = Hp::one();
        }
        for i in 2 * q..n {
            w[(i, i)] = Hp::one();
        }
        if q % 2 == 1 {
            w[(2 * q, 2 * q)] = -Hp::one();
        }
        GroupElement::new(w.transpose(), w)
    }

    fn l_generators(&self) -> Vec<Mat> {
        let (n, q) = (self.n(), self.q);
        let mut out = Vec::new();
        for a in 2 * q..n {
            for b in a + 1..n {
                let mut g = Mat::zeros(n, n);
                g[(a, b)] = Hp::one();
                g[(b, a)] = -Hp::one();
                out.push(g);
            }
        }
        out
    }
}

/// Adjoint representation of SL(n) on traceless matrices, with the trace
/// form as `B`. Basis: `E_ij` (`i != j`, row-major), then the orthonormal
/// traceless diagonals `d_k = (1,..,1,-k,0,..)/sqrt(k(k+1))`.
pub struct SlAdjoint {
    n: usize,
    rs: RootSystem,
    table: Vec<WeightBlock>,
    j: Mat,
    offdiag: Vec<(usize, usize)>,
    diag: Vec<Vec<Hp>>,
}

impl SlAdjoint {
    pub fn new(n: usize) -> Result<SlAdjoint, MatGroupError> {
        if n < 2 {
            return Err(MatGroupError::InvalidParameters(format!("sl({n}) needs n >= 2")));
        }
        let rs =
            RootSystem::build(RootLabel::A, n - 1).map_err(|e| MatGroupError::InvalidParameters(e.to_string()))?;
        let offdiag: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
        let diag: Vec<Vec<Hp>> = (1..n)
            .map(|k| {
                let s = Hp::from_i64((k * (k + 1)) as i64).sqrt().recip();
                (0..n)
                    .map(|i| match i.cmp(&k) {
                        std::cmp::Ordering::Less => s,
                        std::cmp::Ordering::Equal => -(Hp::from_i64(k as i64) * s),
                        std::cmp::Ordering::Greater => Hp::ZERO,
                    })
                    .collect()
            })
            .collect();
        let dim = n * n - 1;
        let mut table = Vec::new();
        for (c, &(i, jj)) in offdiag.iter().enumerate() {
            let mut w = rat::zeros(n);
            w[i] = Q::from_integer(1.into());
            w[jj] = Q::from_integer((-1).into());
            table.push(WeightBlock { weight: w, basis: Mat::from_cols(&[unit_col(dim, c)], dim) });
        }
        let zero_cols: Vec<Vec<Hp>> = (offdiag.len()..dim).map(|c| unit_col(dim, c)).collect();
        table.push(WeightBlock { weight: rat::zeros(n), basis: Mat::from_cols(&zero_cols, dim) });
        let mut sl = SlAdjoint { n, rs, table, j: Mat::zeros(dim, dim), offdiag, diag };
        let basis: Vec<Mat> = (0..dim).map(|c| sl.to_matrix(&unit_col(dim, c))).collect();
        sl.j = Mat::from_fn(dim, dim, |a, b| basis[a].mul(&basis[b]).trace());
        Ok(sl)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// The traceless matrix with the given coordinates.
    pub fn to_matrix(&self, v: &[Hp]) -> Mat {
        let n = self.n;
        let mut m = Mat::zeros(n, n);
        for (c, &(i, j)) in self.offdiag.iter().enumerate() {
            m[(i, j)] = v[c];
        }
        let off = self.offdiag.len();
        for (k, d) in self.diag.iter().enumerate() {
            for i in 0..n {
                let x = m[(i, i)] + v[off + k] * d[i];
                m[(i, i)] = x;
            }
        }
        m
    }

    /// Coordinates of a matrix; the trace part is discarded.
    pub fn coords(&self, m: &Mat) -> Vec<Hp> {
        let mut v: Vec<Hp> = self.offdiag.iter().map(|&(i, j)| m[(i, j)]).collect();
        for d in &self.diag {
            v.push((0..self.n).map(|i| d[i] * m[(i, i)]).sum());
        }
        v
    }

    /// Orthonormal basis of the traceless diagonal, as columns of an `n x (n-1)` matrix.
    pub fn diag_basis(&self) -> Mat {
        Mat::from_cols(&self.diag, self.n)
    }

    /// Matrix of `Ad(h)`.
    pub fn ad(&self, h: &Mat, h_inv: &Mat) -> Mat {
        let dim = self.n * self.n - 1;
        let cols: Vec<Vec<Hp>> =
            (0..dim).map(|c| self.coords(&h.mul(&self.to_matrix(&unit_col(dim, c))).mul(h_inv))).collect();
        Mat::from_cols(&cols, dim)
    }

    pub fn ad_element(&self, h: &Mat) -> Option<GroupElement> {
        let h_inv = linalg::inverse(h)?;
        Some(self.ad_pair(h, &h_inv))
    }

    fn ad_pair(&self, h: &Mat, h_inv: &Mat) -> GroupElement {
        GroupElement::with_lift(self.ad(h, h_inv), self.ad(h_inv, h), GroupElement::new(h.clone(), h_inv.clone()))
    }

    /// Recovers `h` with `|det h| = 1` from `Ad(h)`, as the kernel of
    /// `H -> H X - Ad(h)(X) H` over a basis `X`.
    pub fn recover(&self, g: &Mat) -> Option<Mat> {
        let n = self.n;
        let dim = n * n - 1;
        let mut sys = Mat::zeros(n * n * dim, n * n);
        for c in 0..dim {
            let x = self.to_matrix(&unit_col(dim, c));
            let y = self.to_matrix(&g.col(c));
            for r in 0..n {
                for s in 0..n {
                    let row = c * n * n + r * n + s;
                    // (H X)_{rs} = sum_k H_{rk} X_{ks}; (Y H)_{rs} = sum_k Y_{rk} H_{ks}
                    for k in 0..n {
                        let v = sys[(row, r * n + k)] + x[(k, s)];
                        sys[(row, r * n + k)] = v;
                        let w = sys[(row, k * n + s)] - y[(r, k)];
                        sys[(row, k * n + s)] = w;
                    }
                }
            }
        }
        let null = linalg::null_space(&sys, Hp::one().mul_pow2(-120));
        if null.cols != 1 {
            return None;
        }
        let mut h = Mat::from_fn(n, n, |i, j| null[(i * n + j, 0)]);
        let d = linalg::det(&h);
        if d.is_zero() {
            return None;
        }
        if d.is_negative() && n % 2 == 1 {
            h = h.scale(-Hp::one());
        }
        let s = (d.abs().ln() / Hp::from_i64(n as i64)).exp().recip();
        Some(h.scale(s))
    }

    fn centered_sorted(&self, mut v: Vec<Hp>) -> Vec<Hp> {
        let mean = v.iter().copied().sum::<Hp>() / Hp::from_i64(self.n as i64);
        v.iter_mut().for_each(|x| *x -= mean);
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        v
    }

    fn underlying(&self, g: &GroupElement) -> GroupElement {
        match &g.lift {
            Some(l) => (**l).clone(),
            None => {
                let h = self.recover(&g.m).expect("element lies in Ad(GL(n))");
                GroupElement::from_matrix(h).expect("recovered lift is invertible")
            }
        }
    }

    /// Log-spectrum of the lift, completed through `sum = 0` when one entry
    /// is below resolution.
    fn lift_logs(&self, g: &GroupElement, f: fn(&Mat) -> Vec<Hp>) -> Vec<Hp> {
        let spec = combined_log_spectrum(&self.underlying(g), f);
        let known: Hp = spec.iter().flatten().copied().sum();
        let missing = spec.iter().filter(|x| x.is_none()).count();
        let v: Vec<Hp> = spec
            .into_iter()
            .map(|x| x.unwrap_or(if missing == 1 { -known } else { Hp::ZERO }))
            .collect();
        self.centered_sorted(v)
    }
}

impl GroupRealization for SlAdjoint {
    fn name(&self) -> String {
        format!("sl({})", self.n)
    }

    fn kind(&self) -> GroupKind {
        GroupKind::Adjoint
    }

    fn dim(&self) -> usize {
        self.n * self.n - 1
    }

    fn rs(&self) -> &RootSystem {
        &self.rs
    }

    fn highest_weight(&self) -> QVec {
        self.rs.highest_root()
    }

    fn weight_table(&self) -> &[WeightBlock] {
        &self.table
    }

    fn form_j(&self) -> &Mat {
        &self.j
    }

    fn random_a(&self, rng: &mut SeededRng, scale: f64) -> Vec<Hp> {
        let v: Vec<Hp> = (0..self.n).map(|_| Hp::from_f64(rng.gen_range(-scale..scale))).collect();
        let mean = v.iter().copied().sum::<Hp>() / Hp::from_i64(self.n as i64);
        v.into_iter().map(|x| x - mean).collect()
    }

    fn random_k(&self, rng: &mut SeededRng) -> GroupElement {
        let k = random_rotation(self.n, rng);
        let kt = k.transpose();
        self.ad_pair(&k, &kt)
    }

    fn membership_residual(&self, g: &Mat) -> f64 {
        let Some(h) = self.recover(g) else { return f64::INFINITY };
        let Some(h_inv) = linalg::inverse(&h) else { return f64::INFINITY };
        let scale = g.max_abs().max(Hp::one());
        (self.ad(&h, &h_inv).sub(g).max_abs() / scale).to_f64()
    }

    fn cartan_raw(&self, g: &GroupElement) -> Vec<Hp> {
        self.lift_logs(g, log_singular_values)
    }

    fn jordan_raw(&self, g: &GroupElement) -> Vec<Hp> {
        self.lift_logs(g, log_moduli)
    }

    fn canonizer(&self, vge: &Mat, vle: &Mat) -> Result<GroupElement, MatGroupError> {
        let n = self.n;
        let tol = linalg::default_rank_tol();
        let cartan = linalg::intersect(vge, vle, Hp::one().mul_pow2(-100));
        if cartan.cols != n - 1 {
            return Err(MatGroupError::NotTransverse(format!("intersection has dimension {}", cartan.cols)));
        }
        let coeffs: Vec<Hp> = (0..n - 1).map(|k| Hp::from_f64(1.0 + 0.618_033_988_75 * (k as f64 + 1.0))).collect();
        let y = self.to_matrix(&cartan.mul_vec(&coeffs));
        let ev = linalg::eigenvalues(&y);
        let scale = y.max_abs();
        if ev.iter().any(|(_, im)| im.abs() > scale.mul_pow2(-80)) {
            return Err(MatGroupError::NotTransverse("intersection is not split".into()));
        }
        let mut vals: Vec<Hp> = ev.iter().map(|e| e.0).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if vals.windows(2).any(|w| (w[1] - w[0]) <= scale.mul_pow2(-80)) {
            return Err(MatGroupError::NotTransverse("intersection is not regular".into()));
        }
        let vecs: Vec<Vec<Hp>> = vals.iter().map(|&mu| linalg::real_eigenvector(&y, mu)).collect();
        let vge_mats: Vec<Mat> =
            linalg::orthonormalize(vge, tol).columns().iter().map(|c| self.to_matrix(c)).collect();
        let mut remaining: Vec<usize> = (0..n).collect();
        let mut chosen: Vec<Vec<Hp>> = Vec::new();
        while !remaining.is_empty() {
            let mut best: Option<(Hp, usize)> = None;
            for (pos, &c) in remaining.iter().enumerate() {
                let mut cols = chosen.clone();
                cols.push(vecs[c].clone());
                let qs = linalg::orthonormalize(&Mat::from_cols(&cols, n), tol);
                let mut res = Hp::ZERO;
                for z in &vge_mats {
                    let zv = z.mul_vec(&vecs[c]);
                    let proj = qs.mul_vec(&qs.transpose().mul_vec(&zv));
                    res += linalg::norm(&linalg::vsub(&zv, &proj));
                }
                if best.is_none_or(|(b, _)| res < b) {
                    best = Some((res, pos));
                }
            }
            let (_, pos) = best.expect("nonempty");
            chosen.push(vecs[remaining.remove(pos)].clone());
        }
        let mut p = Mat::from_cols(&chosen, n);
        let d = linalg::det(&p);
        if d.is_negative() {
            for i in 0..n {
                p[(i, 0)] = -p[(i, 0)];
            }
        }
        let s = (d.abs().ln() / Hp::from_i64(n as i64)).exp().recip();
        let p = p.scale(s);
        let p_inv = linalg::inverse(&p).ok_or_else(|| MatGroupError::NotTransverse("singular eigenbasis".into()))?;
        let phi = self.ad_pair(&p_inv, &p);
        let (rge, rle) = reference_pair(self);
        let d1 = linalg::subspace_distance(&phi.m.mul(vge), &rge).to_f64();
        let d2 = linalg::subspace_distance(&phi.m.mul(vle), &rle).to_f64();
        if d1.max(d2) > 1e-8 {
            return Err(MatGroupError::NotTransverse(format!("canonized spaces off by {:e}", d1.max(d2))));
        }
        Ok(phi)
    }

    fn w0_rep(&self) -> GroupElement {
        let n = self.n;
        let mut h = Mat::zeros(n, n);
        for i in 0..n {
            h[(i, n - 1 - i)] = Hp::one();
        }
        if (n * (n - 1) / 2) % 2 == 1 {
            for j in 0..n {
                h[(0, j)] = -h[(0, j)];
            }
        }
        self.ad_pair(&h, &h.transpose())
    }

    fn l_generators(&self) -> Vec<Mat> {
        Vec::new()
    }

    fn lift_of_exp(&self, x: &[Hp]) -> Option<GroupElement> {
        let d: Vec<Hp> = x.iter().map(|v| v.exp()).collect();
        let di: Vec<Hp> = x.iter().map(|v| (-*v).exp()).collect();
        Some(GroupElement::new(Mat::diag(&d), Mat::diag(&di)))
    }
}

type Constructor = fn(&[usize]) -> Result<Box<dyn GroupRealization>, MatGroupError>;

fn make_so(args: &[usize]) -> Result<Box<dyn GroupRealization>, MatGroupError> {
    Ok(Box::new(SoPq::new(args[0], args[1])?))
}

fn make_sl(args: &[usize]) -> Result<Box<dyn GroupRealization>, MatGroupError> {
    Ok(Box::new(SlAdjoint::new(args[0])?))
}

/// Family name, number of integer parameters, constructor.
const REGISTRY: &[(&str, usize, Constructor)] = &[("so", 2, make_so), ("sl", 1, make_sl)];

pub fn families() -> Vec<&'static str> {
    REGISTRY.iter().map(|r| r.0).collect()
}

/// Builds a realization from a name such as `so(3,2)` or `sl(3)`.
pub fn build(spec: &str) -> Result<Box<dyn GroupRealization>, MatGroupError> {
    let t = spec.trim().to_ascii_lowercase().replace(' ', "");
    let (family, rest) = t.split_once('(').ok_or_else(|| MatGroupError::UnknownFamily(spec.into()))?;
    let args = rest.strip_suffix(')').ok_or_else(|| MatGroupError::UnknownFamily(spec.into()))?;
    let (_, arity, ctor) =
        REGISTRY.iter().find(|r| r.0 == family).ok_or_else(|| MatGroupError::UnknownFamily(family.into()))?;
    let nums: Vec<usize> = args
        .split(',')
        .map(|a| a.parse().map_err(|_| MatGroupError::InvalidParameters(spec.into())))
        .collect::<Result<_, _>>()?;
    if nums.len() != *arity {
        return Err(MatGroupError::InvalidParameters(format!("{family} takes {arity} parameter(s)")));
    }
    ctor(&nums)
}

/// Whether the Layer-1 `w0` acts nontrivially on `V^t_0`, measured.
pub fn w0_moves_fixed_space(mg: &dyn GroupRealization) -> bool {
    let w = w0_action_on_fixed_space(mg);
    w.cols > 0 && w.dist(&Mat::identity(w.cols)) > 1e-8
}

/// Layer-1 `w0` as a real matrix on the ambient space.
pub fn layer1_w0(mg: &dyn GroupRealization) -> Mat {
    let w = longest_element(mg.rs());
    let n = w.matrix.len();
    Mat::from_fn(n, n, |i, j| Hp::from_q(&w.matrix[i][j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn registry_parses_names() {
        assert_eq!(build("so(3,2)").unwrap().dim(), 5);
        assert_eq!(build("sl(3)").unwrap().dim(), 8);
        assert!(matches!(build("su(2)"), Err(MatGroupError::UnknownFamily(_))));
        assert!(matches!(build("so(2,2)"), Err(MatGroupError::InvalidParameters(_))));
    }

    #[test]
    fn random_k_preserves_forms() {
        let mut rng = SeededRng::seed_from_u64(3);
        for name in ["so(3,2)", "sl(3)"] {
            let mg = build(name).unwrap();
            let k = mg.random_k(&mut rng);
            assert!(k.m.mul(&k.m.transpose()).dist(&Mat::identity(mg.dim())) < 1e-60);
            assert!(mg.membership_residual(&k.m) < 1e-40, "{name}");
        }
    }

    #[test]
    fn sl_recover_round_trip() {
        let sl = SlAdjoint::new(3).unwrap();
        let h = Mat::from_f64_rows(&[vec![2.0, 1.0, 0.0], vec![0.0, 1.0, 0.5], vec![1.0, 0.0, 1.0]]);
        let g = sl.ad_element(&h).unwrap();
        let r = sl.recover(&g.m).unwrap();
        let s = (Hp::from_f64(2.5).ln() / Hp::from_i64(3)).exp().recip();
        assert!(r.dist(&h.scale(s)) < 1e-50);
    }
}
