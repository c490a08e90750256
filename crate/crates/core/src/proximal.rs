//! Proximal linear maps of a Euclidean space, angles between subspaces and
//! the product estimates for proximal maps.

use crate::hp::Hp;
use crate::linalg::{self, Mat};
use serde::Serialize;

pub use crate::linalg::{exterior_power, wedge};

/// Required margin `1 - kappa~` for proximality.
pub const PROXIMAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProximalError {
    #[error("not proximal: {0}")]
    NotProximal(String),
}

#[derive(Debug, Clone)]
pub struct ProximalData {
    /// Spectral radius.
    pub r: Hp,
    /// `|lambda_2| / |lambda_1|`.
    pub kappa: Hp,
    /// Unit vector spanning the attracting line.
    pub es: Vec<Hp>,
    /// Unit normal of the repelling hyperplane.
    pub eu_normal: Vec<Hp>,
    /// `‖gamma|E^u‖ / r`.
    pub s_tilde: Hp,
}

impl ProximalData {
    /// Orthonormal basis of the repelling hyperplane.
    pub fn eu_basis(&self) -> Mat {
        let n = Mat::from_cols(std::slice::from_ref(&self.eu_normal), self.eu_normal.len());
        linalg::orth_complement(&n)
    }
}

pub fn proximal_data(g: &Mat, tol: f64) -> Result<ProximalData, ProximalError> {
    let n = g.rows;
    if n == 0 {
        return Err(ProximalError::NotProximal("empty matrix".into()));
    }
    let mut ev = linalg::eigenvalues(g);
    ev.sort_by(|a, b| b.0.hypot(b.1).partial_cmp(&a.0.hypot(a.1)).unwrap());
    let (re, im) = ev[0];
    let r = re.hypot(im);
    if r.is_zero() {
        return Err(ProximalError::NotProximal("nilpotent".into()));
    }
    let kappa = if n > 1 { ev[1].0.hypot(ev[1].1) / r } else { Hp::ZERO };
    if (im / r).abs().to_f64() > 1e-40 {
        return Err(ProximalError::NotProximal("leading eigenvalue is not real".into()));
    }
    if kappa.to_f64() >= 1.0 - tol {
        return Err(ProximalError::NotProximal(format!("spectral gap {:e} inside tolerance", kappa.to_f64())));
    }
    let es = unit(linalg::real_eigenvector(g, re));
    let eu_normal = unit(linalg::real_eigenvector(&g.transpose(), re));
    let mut data = ProximalData { r, kappa, es, eu_normal, s_tilde: Hp::ZERO };
    if n > 1 {
        let nn = Mat::from_fn(n, n, |i, j| data.eu_normal[i] * data.eu_normal[j]);
        data.s_tilde = g.mul(&Mat::identity(n).sub(&nn)).op_norm() / r;
    }
    Ok(data)
}

fn unit(v: Vec<Hp>) -> Vec<Hp> {
    let nv = linalg::norm(&v);
    linalg::vscale(nv.recip(), &v)
}

/// Angle between the lines spanned by `x` and `y`.
pub fn line_angle(x: &[Hp], y: &[Hp]) -> f64 {
    let c = linalg::dot(x, y).abs();
    let nx = linalg::norm(x);
    let ny = linalg::norm(y);
    let s = (nx * nx * ny * ny - c * c).max(Hp::ZERO).sqrt();
    s.to_f64().atan2(c.to_f64())
}

/// Smallest principal angle between the column spans of `u` and `w`.
pub fn subspace_angle(u: &Mat, w: &Mat) -> f64 {
    let tol = linalg::default_rank_tol();
    let qu = linalg::orthonormalize(u, tol);
    let qw = linalg::orthonormalize(w, tol);
    if qu.cols == 0 || qw.cols == 0 {
        return std::f64::consts::FRAC_PI_2;
    }
    let c = linalg::singular_values(&qu.transpose().mul(&qw))[0].min(Hp::one());
    let s = (Hp::one() - c * c).max(Hp::ZERO).sqrt();
    s.to_f64().atan2(c.to_f64())
}

/// Hausdorff distance between the unit spheres' projective images, as an angle.
pub fn hausdorff_angle(u: &Mat, w: &Mat) -> f64 {
    linalg::subspace_distance(u, w).to_f64().min(1.0).asin()
}

/// Angle between `wedge(a1)` and `wedge(a2)` as points of the projective space of `Λ^p`.
pub fn wedge_angle(a1: &Mat, a2: &Mat) -> f64 {
    line_angle(&wedge(a1), &wedge(a2))
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductReport {
    pub proximal: bool,
    pub c_bar: f64,
    pub s_tilde_1: f64,
    pub s_tilde_2: f64,
    pub s_tilde_12: f64,
    /// `alpha(E^s_{12}, E^s_1) / s~_1`.
    pub ratio_attracting: f64,
    /// `s~_12 / (s~_1 s~_2)`.
    pub ratio_strength: f64,
    /// `r_12 / (‖gamma_1‖ ‖gamma_2‖)`.
    pub ratio_radius: f64,
}

pub fn check_proximal_product(g1: &Mat, g2: &Mat, c_bar: f64) -> Result<ProductReport, ProximalError> {
    let p1 = proximal_data(g1, PROXIMAL_TOL)?;
    let p2 = proximal_data(g2, PROXIMAL_TOL)?;
    let g12 = g1.mul(g2);
    let p12 = proximal_data(&g12, PROXIMAL_TOL)?;
    let s1 = p1.s_tilde.to_f64();
    let s2 = p2.s_tilde.to_f64();
    let s12 = p12.s_tilde.to_f64();
    let norms = g1.op_norm() * g2.op_norm();
    Ok(ProductReport {
        proximal: true,
        c_bar,
        s_tilde_1: s1,
        s_tilde_2: s2,
        s_tilde_12: s12,
        ratio_attracting: line_angle(&p12.es, &p1.es) / s1,
        ratio_strength: s12 / (s1 * s2),
        ratio_radius: (p12.r / norms).to_f64(),
    })
}

/// Bound for the pair (attracting line of `a`, repelling hyperplane of `b`):
/// `1 / |cos|` of the angle between `E^s_a` and the normal of `E^u_b`. The map
/// fixing `E^u_b` and sending `E^s_a` onto that normal line realizes it up to a factor 2.
pub fn proximal_pair_bound(a: &ProximalData, b: &ProximalData) -> f64 {
    let c = linalg::dot(&a.es, &b.eu_normal).abs().to_f64();
    1.0 / c
}

/// Largest distortion factor of line angles under `phi`, over the given pairs of vectors.
pub fn angle_distortion(phi: &Mat, pairs: &[(Vec<Hp>, Vec<Hp>)]) -> f64 {
    pairs
        .iter()
        .map(|(x, y)| {
            let a = line_angle(x, y);
            let b = line_angle(&phi.mul_vec(x), &phi.mul_vec(y));
            (b / a).max(a / b)
        })
        .fold(1.0, f64::max)
}
