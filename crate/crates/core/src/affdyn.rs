//! Affine maps of `V` viewed as linear maps of the extended space
//! `A = V ⊕ R`, their dynamical spaces, canonizing maps, Margulis invariants
//! and contraction strengths.
//!
//! The Euclidean structure on `A` is `B ⊕ 1`; the last coordinate of a point
//! of the affine chart is 1.

use crate::hp::Hp;
use crate::linalg::{self, Mat};
use crate::matgroups::{self, GroupElement, GroupRealization, MatGroupError, SeededRng};
use rand::Rng;
use crate::rat::{self, Q, QVec};
use crate::typing::{self, ReferenceVector};
use crate::weights::{self, WeightSet};

/// Classification tolerance on `log |eigenvalue|`.
pub const NEUTRAL_TOL: f64 = 1e-8;
/// Width of the warning zone around the walls.
pub const NEAR_WALL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AffineError {
    #[error("map is not of type X0: {0}")]
    NotTypeX0(String),
    #[error("ill-conditioned translation solve (residual {0:e})")]
    IllConditioned(f64),
    #[error("eigenvalue classification is ambiguous: {0}")]
    ToleranceAmbiguous(String),
    #[error(transparent)]
    Group(#[from] MatGroupError),
    #[error("no reference vector: {0}")]
    Reference(String),
}

#[derive(Clone, Debug)]
pub struct AffineMap {
    pub lin: GroupElement,
    pub v: Vec<Hp>,
}

impl AffineMap {
    pub fn new(lin: GroupElement, v: Vec<Hp>) -> Self {
        assert_eq!(lin.dim(), v.len());
        AffineMap { lin, v }
    }

    pub fn identity(d: usize) -> Self {
        AffineMap { lin: GroupElement::identity(d), v: vec![Hp::ZERO; d] }
    }

    pub fn linear(lin: GroupElement) -> Self {
        let d = lin.dim();
        AffineMap { lin, v: vec![Hp::ZERO; d] }
    }

    pub fn translation(v: Vec<Hp>) -> Self {
        AffineMap { lin: GroupElement::identity(v.len()), v }
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn mul(&self, o: &AffineMap) -> AffineMap {
        AffineMap { lin: self.lin.mul(&o.lin), v: linalg::vadd(&self.lin.m.mul_vec(&o.v), &self.v) }
    }

    pub fn inverse(&self) -> AffineMap {
        let w = self.lin.inv.mul_vec(&self.v);
        AffineMap { lin: self.lin.inverse(), v: w.into_iter().map(|x| -x).collect() }
    }

    pub fn pow(&self, k: i64) -> AffineMap {
        if k == 0 {
            return AffineMap::identity(self.dim());
        }
        let mut sq = if k < 0 { self.inverse() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc: Option<AffineMap> = None;
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

    pub fn apply(&self, x: &[Hp]) -> Vec<Hp> {
        linalg::vadd(&self.lin.m.mul_vec(x), &self.v)
    }

    /// `psi * self * psi^-1`.
    pub fn conjugate_by(&self, psi: &AffineMap) -> AffineMap {
        psi.mul(self).mul(&psi.inverse())
    }

    pub fn linear_part(&self) -> AffineMap {
        AffineMap::linear(self.lin.clone())
    }

    /// The `(d+1) x (d+1)` matrix `[[l, v], [0, 1]]`.
    pub fn matrix(&self) -> Mat {
        extend_matrix(&self.lin.m, &self.v)
    }

    pub fn extended(&self) -> GroupElement {
        let inv = self.inverse();
        GroupElement::new(self.matrix(), inv.matrix())
    }

    /// Operator norm of the extended matrix.
    pub fn norm(&self) -> Hp {
        self.matrix().op_norm()
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        self.matrix().to_f64_rows()
    }
}

fn extend_matrix(l: &Mat, v: &[Hp]) -> Mat {
    let d = l.rows;
    let mut m = Mat::zeros(d + 1, d + 1);
    m.set_block(0, 0, l);
    for i in 0..d {
        m[(i, d)] = v[i];
    }
    m[(d, d)] = Hp::one();
    m
}

/// Embeds a basis of a subspace of `V` into `A`.
pub fn embed(q: &Mat) -> Mat {
    let mut m = Mat::zeros(q.rows + 1, q.cols);
    m.set_block(0, 0, q);
    m
}

/// Embeds a subspace of `V` into `A` and adds the origin direction.
pub fn embed_with_origin(q: &Mat) -> Mat {
    let d = q.rows;
    let mut m = Mat::zeros(d + 1, q.cols + 1);
    m.set_block(0, 0, q);
    m[(d, q.cols)] = Hp::one();
    m
}

#[derive(Clone, Debug)]
pub struct ReferenceSpaces {
    pub vgt: Mat,
    pub vlt: Mat,
    pub veq: Mat,
    pub vge: Mat,
    pub vle: Mat,
    pub age: Mat,
    pub ale: Mat,
    pub aeq: Mat,
    pub vt: Mat,
    pub vr: Mat,
    /// Orthogonal projector of `V` onto `V^t_0`.
    pub pi_t: Mat,
}

impl ReferenceSpaces {
    pub fn build(mg: &dyn GroupRealization, x0: &[Q]) -> Result<ReferenceSpaces, AffineError> {
        let rs = mg.rs();
        let sign = |l: &[Q]| rat::sign(&rs.inner(l, x0));
        if mg.weight_table().iter().any(|b| !rat::is_zero(&b.weight) && sign(&b.weight) == 0) {
            return Err(AffineError::Reference("X0 is not generic".into()));
        }
        let vgt = matgroups::span_of(mg, |l| sign(l) > 0);
        let vlt = matgroups::span_of(mg, |l| sign(l) < 0);
        let veq = matgroups::span_of(mg, |l| sign(l) == 0);
        let vge = vgt.hstack(&veq);
        let vle = vlt.hstack(&veq);
        let vt = matgroups::vt0_basis(mg);
        let vr = if vt.cols == 0 {
            veq.clone()
        } else {
            let p = Mat::identity(mg.dim()).sub(&linalg::projector(&vt));
            linalg::orthonormalize(&p.mul(&veq), linalg::default_rank_tol())
        };
        Ok(ReferenceSpaces {
            age: embed_with_origin(&vge),
            ale: embed_with_origin(&vle),
            aeq: embed_with_origin(&veq),
            pi_t: linalg::projector(&vt),
            vgt,
            vlt,
            veq,
            vge,
            vle,
            vt,
            vr,
        })
    }
}

#[derive(Clone, Debug)]
pub struct DynamicalSplit {
    pub vgt: Mat,
    pub vlt: Mat,
    pub veq: Mat,
    pub vge: Mat,
    pub vle: Mat,
    pub age: Mat,
    pub ale: Mat,
    pub aeq: Mat,
    pub tol: f64,
    pub warnings: Vec<String>,
}

impl DynamicalSplit {
    /// `(dim V^>, dim V^=, dim V^<)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.vgt.cols, self.veq.cols, self.vlt.cols)
    }
}

/// Counts of expanding, neutral and contracting eigenvalues of `g`.
pub fn classify_moduli(g: &GroupElement, tol: f64) -> (usize, usize, usize, Vec<String>) {
    let spec = matgroups::combined_log_spectrum(g, matgroups::log_moduli);
    let mut counts = (0, 0, 0);
    let mut warnings = Vec::new();
    for (i, e) in spec.iter().enumerate() {
        match e {
            None => {
                counts.1 += 1;
                warnings.push(format!("eigenvalue {i} below working resolution, taken as neutral"));
            }
            Some(l) => {
                let l = l.to_f64();
                if l.abs() > tol && l.abs() <= NEAR_WALL {
                    warnings.push(format!("NearWall: log-modulus {l:e} of eigenvalue {i}"));
                }
                if l > tol {
                    counts.0 += 1;
                } else if l < -tol {
                    counts.2 += 1;
                } else {
                    counts.1 += 1;
                }
            }
        }
    }
    (counts.0, counts.1, counts.2, warnings)
}

pub fn dynamical_split(g: &AffineMap, tol: f64) -> Result<DynamicalSplit, AffineError> {
    let (ngt, neq, nlt, mut warnings) = classify_moduli(&g.lin, tol);
    let ext = g.extended();
    let (egt, eeq, elt, _) = classify_moduli(&ext, tol);
    if (egt, eeq, elt) != (ngt, neq + 1, nlt) {
        return Err(AffineError::ToleranceAmbiguous(format!(
            "linear part splits as {:?}, extended map as {:?}",
            (ngt, neq, nlt),
            (egt, eeq, elt)
        )));
    }
    let l = &g.lin.m;
    let li = &g.lin.inv;
    let vgt = linalg::dominant_subspace(l, ngt);
    let vge = linalg::dominant_subspace(l, ngt + neq);
    let vlt = linalg::dominant_subspace(li, nlt);
    let vle = linalg::dominant_subspace(li, nlt + neq);
    let veq = if neq == 0 { Mat::zeros(g.dim(), 0) } else { linalg::intersect(&vge, &vle, Hp::one().mul_pow2(-100)) };
    if veq.cols != neq {
        warnings.push(format!("V^= has dimension {} instead of {neq}", veq.cols));
    }
    let age = linalg::dominant_subspace(&ext.m, ngt + neq + 1);
    let ale = linalg::dominant_subspace(&ext.inv, nlt + neq + 1);
    let aeq = linalg::intersect(&age, &ale, Hp::one().mul_pow2(-100));
    Ok(DynamicalSplit { vgt, vlt, veq, vge, vle, age, ale, aeq, tol, warnings })
}

/// `‖(I - QQ^T) g Q‖` for an orthonormal basis `Q`, relative to `‖gQ‖`.
pub fn invariance_residual(g: &Mat, q: &Mat) -> f64 {
    if q.cols == 0 {
        return 0.0;
    }
    let gq = g.mul(q);
    let res = gq.sub(&q.mul(&q.transpose().mul(&gq)));
    (res.max_abs() / gq.max_abs()).to_f64()
}

#[derive(Clone, Debug)]
pub struct TypeCheck {
    pub is_type_x0: bool,
    pub jd: Vec<Hp>,
    pub warnings: Vec<String>,
}

/// Group, reference vector and reference spaces bundled for the affine layer.
pub struct AffineSetting {
    pub mg: Box<dyn GroupRealization>,
    pub ws: WeightSet,
    pub refvec: ReferenceVector,
    pub x0: Vec<Hp>,
    pub refs: ReferenceSpaces,
    /// Log-modulus threshold below which an eigenvalue counts as neutral.
    pub tol: f64,
}

impl AffineSetting {
    pub fn new(mg: Box<dyn GroupRealization>) -> Result<AffineSetting, AffineError> {
        let ws = weights::weight_set(mg.rs(), &mg.highest_weight()).map_err(|e| AffineError::Reference(e.to_string()))?;
        let refvec = typing::reference_vector(&ws).map_err(|e| AffineError::Reference(e.to_string()))?;
        let refs = ReferenceSpaces::build(mg.as_ref(), &refvec.x0)?;
        let x0 = refvec.x0.iter().map(Hp::from_q).collect();
        Ok(AffineSetting { mg, ws, refvec, x0, refs, tol: NEUTRAL_TOL })
    }

    pub fn from_name(name: &str) -> Result<AffineSetting, AffineError> {
        AffineSetting::new(matgroups::build(name)?)
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn mg(&self) -> &dyn GroupRealization {
        self.mg.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.mg.dim()
    }

    pub fn x0_q(&self) -> &QVec {
        &self.refvec.x0
    }

    /// `exp(t X0)` as an affine map.
    pub fn exp_x0(&self, t: Hp) -> AffineMap {
        let x: Vec<Hp> = self.x0.iter().map(|v| *v * t).collect();
        AffineMap::linear(matgroups::exp_a(self.mg(), &x))
    }

    pub fn dim_age0(&self) -> usize {
        self.refs.age.cols
    }

    pub fn is_type_x0(&self, g: &AffineMap) -> TypeCheck {
        let mut warnings = Vec::new();
        let jd = match matgroups::jordan_projection(self.mg(), &g.lin) {
            Ok(p) => p.value,
            Err(e) => {
                return TypeCheck { is_type_x0: false, jd: Vec::new(), warnings: vec![e.to_string()] };
            }
        };
        let mut ok = true;
        for b in self.mg.weight_table() {
            if rat::is_zero(&b.weight) {
                continue;
            }
            let val = matgroups::weight_value(&b.weight, &jd).to_f64();
            if val.abs() < NEAR_WALL {
                warnings.push(format!("NearWall: weight {:?} takes value {val:e}", rat::fmt_qvec(&b.weight)));
                ok = false;
                continue;
            }
            let want = rat::sign(&self.mg.rs().inner(&b.weight, &self.refvec.x0));
            if (val > 0.0) != (want > 0) {
                ok = false;
            }
        }
        if ok {
            let jq: QVec = jd.iter().map(|v| rat::from_f64(v.to_f64())).collect();
            ok = typing::same_type(&jq, &self.refvec.x0, &self.ws);
        }
        TypeCheck { is_type_x0: ok, jd, warnings }
    }

    pub fn split(&self, g: &AffineMap) -> Result<DynamicalSplit, AffineError> {
        dynamical_split(g, self.tol)
    }

    /// Dynamical split of a map that must be of type X0, with dimensions checked.
    pub fn type_x0_split(&self, g: &AffineMap) -> Result<DynamicalSplit, AffineError> {
        let tc = self.is_type_x0(g);
        if !tc.is_type_x0 {
            return Err(AffineError::NotTypeX0(tc.warnings.join("; ")));
        }
        let sp = self.split(g)?;
        let want = (self.refs.vgt.cols, self.refs.veq.cols, self.refs.vlt.cols);
        if sp.dims() != want {
            return Err(AffineError::NotTypeX0(format!("dynamical dimensions {:?}, expected {want:?}", sp.dims())));
        }
        Ok(sp)
    }

    /// Canonizing map `phi = tau_w o phi_lin`, with `w` in `V^>_0 ⊕ V^<_0`
    /// solving `(l' - Id) w = v'_{>,<}` for `g' = phi_lin g phi_lin^-1`.
    pub fn canonizing_map(&self, g: &AffineMap) -> Result<AffineMap, AffineError> {
        let sp = self.type_x0_split(g)?;
        self.canonizing_map_with(g, &sp)
    }

    pub fn canonizing_map_with(&self, g: &AffineMap, sp: &DynamicalSplit) -> Result<AffineMap, AffineError> {
        let phi_lin = AffineMap::linear(self.mg.canonizer(&sp.vge, &sp.vle)?);
        let gp = g.conjugate_by(&phi_lin);
        let w = self.refs.vgt.hstack(&self.refs.vlt);
        let k = w.cols;
        let lw = gp.lin.m.mul(&w).sub(&w);
        let m = w.transpose().mul(&lw);
        let rhs: Vec<Hp> = w.transpose().mul_vec(&gp.v);
        let lu = linalg::Lu::new(&m).ok_or(AffineError::IllConditioned(f64::INFINITY))?;
        let c = lu.solve_vec(&rhs);
        let y = w.mul_vec(&c);
        let resid = linalg::vsub(&lw.mul_vec(&c), &w.mul_vec(&rhs));
        let scale = linalg::norm(&gp.v).max(Hp::one());
        let r = (linalg::norm(&resid) / scale).to_f64();
        if k > 0 && r > 1e-6 {
            return Err(AffineError::IllConditioned(r));
        }
        Ok(AffineMap { lin: phi_lin.lin, v: y })
    }

    /// Canonizer of a pair of affine parabolic spaces, through a point of
    /// their intersection in the affine chart.
    pub fn pair_canonizer(&self, a1: &Mat, a2: &Mat) -> Result<AffineMap, AffineError> {
        let d = self.dim();
        let v1 = linear_part_of(a1)?;
        let v2 = linear_part_of(a2)?;
        let phi_lin = self.mg.canonizer(&v1, &v2)?;
        let int = linalg::intersect(a1, a2, Hp::one().mul_pow2(-100));
        let c: Vec<Hp> = (0..int.cols).map(|j| int[(d, j)]).collect();
        if linalg::norm(&c).to_f64() < 1e-30 {
            return Err(MatGroupError::NotTransverse("intersection lies in V".into()).into());
        }
        let p = int.mul_vec(&c);
        let x: Vec<Hp> = (0..d).map(|i| p[i] / p[d]).collect();
        let shift: Vec<Hp> = phi_lin.m.mul_vec(&x).into_iter().map(|v| -v).collect();
        Ok(AffineMap::translation(shift).mul(&AffineMap::linear(phi_lin)))
    }

    /// `C̄ = max(‖phi‖, ‖phi^-1‖)` for the constructed canonizer of the pair.
    pub fn nondegeneracy_bound(&self, a1: &Mat, a2: &Mat) -> Result<f64, AffineError> {
        let phi = self.pair_canonizer(a1, a2)?;
        Ok(canonizer_norm(&phi))
    }

    /// Largest `C̄` over the four pairs `(A^>=_{g_i}, A^<=_{g_j})`.
    pub fn pair_bound(&self, sg: &DynamicalSplit, sh: &DynamicalSplit) -> Result<f64, AffineError> {
        let mut worst: f64 = 1.0;
        for (a, b) in [(sg, sg), (sg, sh), (sh, sg), (sh, sh)] {
            worst = worst.max(self.nondegeneracy_bound(&a.age, &b.ale)?);
        }
        Ok(worst)
    }

    /// `pi_t(phi(g(x)) - phi(x))` for an admissible `phi` and a point `x` of `A^=_g`.
    pub fn margulis_with(&self, g: &AffineMap, phi: &AffineMap, x: &[Hp]) -> Vec<Hp> {
        let diff = linalg::vsub(&g.apply(x), x);
        self.refs.pi_t.mul_vec(&phi.lin.m.mul_vec(&diff))
    }

    pub fn margulis_invariant(&self, g: &AffineMap) -> Result<Vec<Hp>, AffineError> {
        let phi = self.canonizing_map(g)?;
        let x = phi.inverse().apply(&vec![Hp::ZERO; self.dim()]);
        Ok(self.margulis_with(g, &phi, &x))
    }

    /// Coordinates of a vector of `V^t_0` in the basis of `refs.vt`.
    pub fn vt_coords(&self, m: &[Hp]) -> Vec<Hp> {
        self.refs.vt.transpose().mul_vec(m)
    }

    /// `s(g) = ‖g|V^<_g‖ ‖g^-1|A^>=_g‖`.
    pub fn contraction_strength(&self, g: &AffineMap) -> Result<Hp, AffineError> {
        let sp = self.type_x0_split(g)?;
        Ok(contraction_strength_with(g, &sp))
    }

    /// `kappa_p` of the extended map.
    pub fn spectral_gap(&self, g: &AffineMap, p: usize) -> Hp {
        spectral_gap(&g.extended(), p)
    }

    pub fn kappa(&self, g: &AffineMap) -> Hp {
        self.spectral_gap(g, self.dim_age0())
    }

    /// Angle by which `phi` misses the reference spaces on the split of `g`.
    pub fn canonization_error(&self, phi: &AffineMap, sp: &DynamicalSplit) -> f64 {
        let e = phi.extended();
        let a = linalg::subspace_distance(&e.m.mul(&sp.age), &self.refs.age).to_f64();
        let b = linalg::subspace_distance(&e.m.mul(&sp.ale), &self.refs.ale).to_f64();
        a.max(b).asin()
    }
}

/// `tau_v o h` with `h = k1 exp(X) k2` and `v` uniform in `[-vscale, vscale]^d`.
pub fn random_affine(mg: &dyn GroupRealization, rng: &mut SeededRng, scale: f64, vscale: f64) -> AffineMap {
    let lin = matgroups::random_element(mg, rng, scale);
    let v = (0..mg.dim()).map(|_| Hp::from_f64(rng.gen_range(-vscale..=vscale))).collect();
    AffineMap::new(lin, v)
}

/// `psi tau_v exp(t X0) psi^-1` with `psi` a random affine map.
pub fn random_type_x0(
    st: &AffineSetting,
    rng: &mut SeededRng,
    t: f64,
    psi_scale: f64,
    vscale: f64,
) -> AffineMap {
    let psi = random_affine(st.mg(), rng, psi_scale, vscale);
    let v = (0..st.dim()).map(|_| Hp::from_f64(rng.gen_range(-vscale..=vscale))).collect();
    let core = AffineMap::translation(v).mul(&st.exp_x0(Hp::from_f64(t)));
    core.conjugate_by(&psi)
}

pub fn canonizer_norm(phi: &AffineMap) -> f64 {
    let e = phi.extended();
    e.m.op_norm().max(e.inv.op_norm()).to_f64()
}

/// Basis of `A1 ∩ V` for a subspace `A1` of `A`; errors when `A1 ⊂ V`.
fn linear_part_of(a: &Mat) -> Result<Mat, AffineError> {
    let d = a.rows - 1;
    let last = Mat::from_rows(&[a.row(d)]);
    if last.max_abs().to_f64() < 1e-30 {
        return Err(MatGroupError::NotTransverse("affine space contained in V".into()).into());
    }
    let null = linalg::null_space(&last, Hp::one().mul_pow2(-100));
    let inside = a.mul(&null);
    Ok(linalg::orthonormalize(&inside.block(0, 0, d, inside.cols), linalg::default_rank_tol()))
}

pub fn contraction_strength_with(g: &AffineMap, sp: &DynamicalSplit) -> Hp {
    let a = linalg::min_singular_value(&g.lin.inv.mul(&sp.vlt));
    let ext = g.matrix();
    let b = linalg::min_singular_value(&ext.mul(&sp.age));
    (a * b).recip()
}

/// `kappa_p(g) = |lambda_{p+1}| / |lambda_p|`, moduli nonincreasing.
pub fn spectral_gap(g: &GroupElement, p: usize) -> Hp {
    let n = g.dim();
    if p == 0 || p >= n {
        return Hp::one();
    }
    let spec = matgroups::combined_log_spectrum(g, matgroups::log_moduli);
    match (spec[p - 1], spec[p]) {
        (Some(a), Some(b)) => (b - a).exp(),
        _ => Hp::ZERO,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_algebra() {
        let lin = GroupElement::from_matrix(Mat::from_f64_rows(&[vec![2.0, 1.0], vec![0.0, 0.5]])).unwrap();
        let g = AffineMap::new(lin, linalg::from_f64s(&[1.0, -1.0]));
        let id = g.mul(&g.inverse());
        assert!(id.matrix().dist(&Mat::identity(3)) < 1e-60);
        assert!(g.pow(3).matrix().dist(&g.matrix().mul(&g.matrix()).mul(&g.matrix())) < 1e-60);
        assert!(g.mul(&g).matrix().dist(&g.matrix().mul(&g.matrix())) < 1e-60);
    }

    use rand::SeedableRng;

    const GROUPS: [&str; 4] = ["so(2,1)", "so(3,2)", "so(4,3)", "sl(3)"];

    fn close(a: &[Hp], b: &[Hp], tol: f64) -> bool {
        linalg::norm(&linalg::vsub(a, b)).to_f64() <= tol * (1.0 + linalg::norm(b).to_f64())
    }

    #[test]
    fn margulis_of_conjugated_translation() {
        for name in GROUPS {
            let st = AffineSetting::from_name(name).unwrap();
            let mut rng = SeededRng::seed_from_u64(11);
            for _ in 0..3 {
                let psi = random_affine(st.mg(), &mut rng, 0.7, 1.0);
                let v: Vec<Hp> = (0..st.dim()).map(|_| Hp::from_f64(rng.gen_range(-2.0..2.0))).collect();
                let g = AffineMap::translation(v.clone()).mul(&st.exp_x0(Hp::one())).conjugate_by(&psi);
                let m = st.margulis_invariant(&g).unwrap();
                assert!(close(&m, &st.refs.pi_t.mul_vec(&v), 1e-40), "{name}");
            }
        }
    }

    #[test]
    fn margulis_of_inverse() {
        for name in GROUPS {
            let st = AffineSetting::from_name(name).unwrap();
            let mut rng = SeededRng::seed_from_u64(12);
            let w0 = st.mg.w0_rep();
            for _ in 0..3 {
                let g = random_type_x0(&st, &mut rng, 0.8, 0.6, 1.5);
                let m = st.margulis_invariant(&g).unwrap();
                let mi = st.margulis_invariant(&g.inverse()).unwrap();
                let minus_w0m: Vec<Hp> = w0.m.mul_vec(&m).into_iter().map(|x| -x).collect();
                assert!(close(&mi, &minus_w0m, 1e-40), "{name}");
            }
        }
    }

    #[test]
    fn margulis_independent_of_choices() {
        for name in GROUPS {
            let st = AffineSetting::from_name(name).unwrap();
            let mut rng = SeededRng::seed_from_u64(13);
            let g = random_type_x0(&st, &mut rng, 1.0, 0.6, 1.0);
            let sp = st.split(&g).unwrap();
            let m = st.margulis_invariant(&g).unwrap();
            let phi = st.canonizing_map(&g).unwrap();
            let a = st.mg.random_a(&mut rng, 1.0);
            let u = st.refs.veq.mul_vec(&(0..st.refs.veq.cols).map(|_| Hp::from_f64(rng.gen_range(-1.0..1.0))).collect::<Vec<_>>());
            let phi2 = AffineMap::translation(u).mul(&AffineMap::linear(matgroups::exp_a(st.mg(), &a))).mul(&phi);
            let coeffs: Vec<Hp> = (0..sp.aeq.cols).map(|_| Hp::from_f64(rng.gen_range(-1.0..1.0))).collect();
            let p = sp.aeq.mul_vec(&coeffs);
            let d = st.dim();
            let x: Vec<Hp> = (0..d).map(|i| p[i] / p[d]).collect();
            assert!(close(&st.margulis_with(&g, &phi2, &x), &m, 1e-40), "{name}");
            let pc = st.pair_canonizer(&sp.age, &sp.ale).unwrap();
            assert!(st.canonization_error(&pc, &sp) < 1e-40, "{name}");
            assert!(close(&st.margulis_with(&g, &pc, &x), &m, 1e-40), "{name}");
        }
    }

    #[test]
    fn split_matches_reference() {
        for name in GROUPS {
            let st = AffineSetting::from_name(name).unwrap();
            let mut rng = SeededRng::seed_from_u64(14);
            let g = random_type_x0(&st, &mut rng, 1.0, 0.6, 1.0);
            assert!(st.is_type_x0(&g).is_type_x0);
            let sp = st.split(&g).unwrap();
            assert_eq!(sp.dims(), (st.refs.vgt.cols, st.refs.veq.cols, st.refs.vlt.cols));
            assert_eq!(sp.age.cols, st.refs.age.cols);
            assert_eq!(sp.aeq.cols, st.refs.aeq.cols);
            let e = g.extended();
            for q in [&sp.age, &sp.ale, &sp.aeq] {
                assert!(invariance_residual(&e.m, q) < 1e-40);
            }
            let phi = st.canonizing_map(&g).unwrap();
            assert!(st.canonization_error(&phi, &sp) < 1e-40);
        }
    }

    #[test]
    fn contraction_of_exp_x0() {
        for name in GROUPS {
            let st = AffineSetting::from_name(name).unwrap();
            let rs = st.mg.rs();
            let m = st
                .mg
                .weight_table()
                .iter()
                .map(|b| rat::to_f64(&rs.inner(&b.weight, st.x0_q())))
                .filter(|v| *v > 0.0)
                .fold(f64::INFINITY, f64::min);
            for n in 1..4 {
                let t = n as f64 * 0.25;
                let s = st.contraction_strength(&st.exp_x0(Hp::from_f64(t))).unwrap().to_f64();
                assert!((s.ln() + t * m).abs() < 1e-12, "{name}");
            }
        }
    }

    #[test]
    fn contraction_dominates_gap() {
        for name in GROUPS {
            let st = AffineSetting::from_name(name).unwrap();
            let mut rng = SeededRng::seed_from_u64(15);
            for _ in 0..4 {
                let g = random_type_x0(&st, &mut rng, 0.5, 0.8, 2.0);
                let s = st.contraction_strength(&g).unwrap().to_f64();
                assert!(s >= st.kappa(&g).to_f64() * (1.0 - 1e-12), "{name}");
            }
        }
    }

    #[test]
    fn non_type_x0_refused() {
        let st = AffineSetting::from_name("so(3,2)").unwrap();
        let g = AffineMap::linear(matgroups::exp_a(st.mg(), &linalg::from_f64s(&[1.0, 0.0])));
        assert!(!st.is_type_x0(&g).is_type_x0);
        assert!(matches!(st.canonizing_map(&g), Err(AffineError::NotTypeX0(_))));
    }
}
