//! Free affine groups of Schottky type: words, generator synthesis and the
//! numerical checks run on the words of a synthesized group.

use std::fmt;

use rand::SeedableRng;
use rayon::prelude::*;
use serde::Serialize;

use crate::affdyn::{AffineError, AffineMap, AffineSetting, DynamicalSplit};
use crate::hp::Hp;
use crate::linalg::{self, Mat};
use crate::matgroups::{self, SeededRng};
use crate::typing::{self, ConditionReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Letter {
    pub gen: usize,
    pub sign: i8,
}

impl Letter {
    pub fn inverse(self) -> Letter {
        Letter { gen: self.gen, sign: -self.sign }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[1] != w[0].inverse())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_reduced() && (self.len() < 2 || self.0[0] != self.0[self.len() - 1].inverse())
    }

    pub fn parse(s: &str) -> Option<Word> {
        let mut out = Vec::new();
        if s.trim() == "e" {
            return Some(Word(out));
        }
        for tok in s.split('*').map(str::trim).filter(|t| !t.is_empty()) {
            let t = tok.strip_prefix('g')?;
            let (idx, sign) = match t.strip_suffix("^-1") {
                Some(i) => (i, -1),
                None => (t, 1),
            };
            let gen: usize = idx.parse().ok()?;
            if gen == 0 {
                return None;
            }
            out.push(Letter { gen: gen - 1, sign });
        }
        Some(Word(out))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|l| if l.sign > 0 { format!("g{}", l.gen + 1) } else { format!("g{}^-1", l.gen + 1) })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

pub const MAX_WORDS: usize = 1_000_000;

/// Nonempty cyclically reduced words of length at most `max_len`, by length
/// then lexicographically.
pub fn enumerate_cyclically_reduced(k: usize, max_len: usize) -> Vec<Word> {
    let letters: Vec<Letter> =
        (0..k).flat_map(|g| [Letter { gen: g, sign: 1 }, Letter { gen: g, sign: -1 }]).collect();
    let mut out = Vec::new();
    let mut layer: Vec<Word> = vec![Word::default()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                if w.0.last().is_some_and(|&p| p == l.inverse()) {
                    continue;
                }
                let mut v = w.0.clone();
                v.push(l);
                next.push(Word(v));
            }
        }
        assert!(next.len() <= MAX_WORDS, "word enumeration exceeds {MAX_WORDS}");
        out.extend(next.iter().filter(|w| w.is_cyclically_reduced()).cloned());
        layer = next;
    }
    out
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SchottkyError {
    #[error("preconditions of the construction fail: {0}")]
    Precondition(String),
    #[error("no transverse configuration after {0} attempts")]
    TransversalityRejectionExceeded(usize),
    #[error("contraction target not reached with power {0}")]
    PowerCapExceeded(u64),
    #[error("generator invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Affine(#[from] AffineError),
}

#[derive(Debug, Clone, Serialize)]
pub struct SynthesisConfig {
    pub k: usize,
    pub s_target: f64,
    pub m0_norm: f64,
    pub seed: u64,
    /// Scale of the random conjugators.
    pub psi_scale: f64,
    /// Largest accepted `C̄` between the linear parts.
    pub c_max: f64,
    pub max_attempts: usize,
    pub max_power: u64,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        SynthesisConfig {
            k: 2,
            s_target: 1e-4,
            m0_norm: 1.0,
            seed: 42,
            psi_scale: 1.0,
            c_max: 50.0,
            max_attempts: 1000,
            max_power: 10_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeneratorSet {
    pub generators: Vec<AffineMap>,
    pub inverses: Vec<AffineMap>,
    pub m0: Vec<Hp>,
    pub power: u64,
    pub attempts: usize,
    /// `s(g_i)` and `s(g_i^-1)` for each generator.
    pub s_values: Vec<(f64, f64)>,
    /// Largest `C̄` over admissible pairs.
    pub c_bar: f64,
}

impl GeneratorSet {
    pub fn k(&self) -> usize {
        self.generators.len()
    }

    pub fn letter(&self, l: Letter) -> &AffineMap {
        if l.sign > 0 {
            &self.generators[l.gen]
        } else {
            &self.inverses[l.gen]
        }
    }

    /// Left-to-right product `g_{i1}^{s1} ... g_{il}^{sl}`.
    pub fn evaluate(&self, w: &Word) -> AffineMap {
        let d = self.m0.len();
        w.0.iter().fold(AffineMap::identity(d), |acc, &l| acc.mul(self.letter(l)))
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.k()).flat_map(|g| [Letter { gen: g, sign: 1 }, Letter { gen: g, sign: -1 }]).collect()
    }
}

/// Condition report of the setting's representation with numeric entries settled.
pub fn condition_report(st: &AffineSetting) -> Result<ConditionReport, SchottkyError> {
    let mg = st.mg();
    let mut rep = typing::main_theorem_report(mg.rs(), &mg.highest_weight(), mg.kind())
        .map_err(|e| SchottkyError::Precondition(e.to_string()))?;
    typing::settle_numeric(&mut rep, st.refs.vt.cols, matgroups::w0_moves_fixed_space(mg));
    Ok(rep)
}

/// Unit vector of `V^t_0` fixed by `-w0`, scaled to `norm`.
pub fn choose_m0(st: &AffineSetting, norm: f64) -> Result<Vec<Hp>, SchottkyError> {
    let w = matgroups::w0_action_on_fixed_space(st.mg());
    let fixed = linalg::null_space(&w.add(&Mat::identity(w.cols)), Hp::one().mul_pow2(-100));
    if fixed.cols == 0 {
        return Err(SchottkyError::Precondition("-w0 has no fixed vector in V^t_0".into()));
    }
    let mut c = fixed.col(0);
    let pivot = c.iter().copied().max_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap()).unwrap();
    if pivot.is_negative() {
        c = c.into_iter().map(|x| -x).collect();
    }
    let m = st.refs.vt.mul_vec(&c);
    let scale = Hp::from_f64(norm) / linalg::norm(&m);
    Ok(linalg::vscale(scale, &m))
}

/// Largest `C̄` over the pairs `(A^>=(x), A^<=(y))` with `x != y^-1`, where
/// `splits[i]` holds the split of `g_i` and the affine spaces of `g_i^-1`
/// are those of `g_i` exchanged.
pub fn admissible_pair_bound(st: &AffineSetting, splits: &[DynamicalSplit]) -> Result<f64, AffineError> {
    let k = splits.len();
    let spaces = |i: usize, s: i8| -> (&Mat, &Mat) {
        if s > 0 {
            (&splits[i].age, &splits[i].ale)
        } else {
            (&splits[i].ale, &splits[i].age)
        }
    };
    let mut worst: f64 = 1.0;
    for i in 0..k {
        for si in [1i8, -1] {
            for j in 0..k {
                for sj in [1i8, -1] {
                    if i == j && si == -sj {
                        continue;
                    }
                    let (age, _) = spaces(i, si);
                    let (_, ale) = spaces(j, sj);
                    worst = worst.max(st.nondegeneracy_bound(age, ale)?);
                }
            }
        }
    }
    Ok(worst)
}

fn attach_translation(st: &AffineSetting, gamma: &AffineMap, m0: &[Hp]) -> Result<AffineMap, SchottkyError> {
    let sp = st.type_x0_split(gamma)?;
    let phi = st.mg.canonizer(&sp.vge, &sp.vle).map_err(AffineError::from)?;
    Ok(AffineMap::translation(phi.inv.mul_vec(m0)).mul(gamma))
}

pub fn synthesize(st: &AffineSetting, cfg: &SynthesisConfig) -> Result<GeneratorSet, SchottkyError> {
    let rep = condition_report(st)?;
    if !rep.all_satisfied() {
        let failed: Vec<&str> = [
            ("zero_weight", &rep.zero_weight),
            ("cond_ii", &rep.cond_ii_no_swinging),
            ("cond_ia", &rep.cond_ia_fixed_vector),
            ("cond_ib", &rep.cond_ib_w0_moves),
        ]
        .iter()
        .filter(|(_, c)| c.status != typing::Status::Satisfied)
        .map(|(n, _)| *n)
        .collect();
        return Err(SchottkyError::Precondition(failed.join(", ")));
    }
    if cfg.k < 2 {
        return Err(SchottkyError::Precondition("k must be at least 2".into()));
    }
    let m0 = choose_m0(st, cfg.m0_norm)?;
    let mut rng = SeededRng::seed_from_u64(cfg.seed);
    let base = st.exp_x0(Hp::one());
    let base_split = st.split(&base)?;
    let mut attempts = 0;
    let psis = loop {
        attempts += 1;
        if attempts > cfg.max_attempts {
            return Err(SchottkyError::TransversalityRejectionExceeded(cfg.max_attempts));
        }
        let psis: Vec<AffineMap> = (0..cfg.k)
            .map(|_| AffineMap::linear(matgroups::random_element(st.mg(), &mut rng, cfg.psi_scale)))
            .collect();
        let splits: Vec<DynamicalSplit> = psis.iter().map(|p| transport_split(&base_split, p)).collect();
        match admissible_pair_bound(st, &splits) {
            Ok(c) if c <= cfg.c_max => break psis,
            _ => continue,
        }
    };
    let mut power = 1u64;
    loop {
        if power > cfg.max_power {
            return Err(SchottkyError::PowerCapExceeded(cfg.max_power));
        }
        let t = Hp::from_f64(power as f64);
        let gens = psis
            .iter()
            .map(|p| attach_translation(st, &st.exp_x0(t).conjugate_by(p), &m0))
            .collect::<Result<Vec<_>, _>>()?;
        let inverses: Vec<AffineMap> = gens.iter().map(AffineMap::inverse).collect();
        let s_values = gens
            .iter()
            .zip(&inverses)
            .map(|(g, gi)| Ok((st.contraction_strength(g)?.to_f64(), st.contraction_strength(gi)?.to_f64())))
            .collect::<Result<Vec<_>, AffineError>>()?;
        if s_values.iter().all(|&(a, b)| a <= cfg.s_target && b <= cfg.s_target) {
            let gs = GeneratorSet { generators: gens, inverses, m0, power, attempts, s_values, c_bar: 0.0 };
            return verify_generators(st, gs);
        }
        power += 1;
    }
}

fn transport_split(sp: &DynamicalSplit, psi: &AffineMap) -> DynamicalSplit {
    let e = psi.extended().m;
    let l = &psi.lin.m;
    let orth = |m: Mat| linalg::orthonormalize(&m, linalg::default_rank_tol());
    DynamicalSplit {
        vgt: orth(l.mul(&sp.vgt)),
        vlt: orth(l.mul(&sp.vlt)),
        veq: orth(l.mul(&sp.veq)),
        vge: orth(l.mul(&sp.vge)),
        vle: orth(l.mul(&sp.vle)),
        age: orth(e.mul(&sp.age)),
        ale: orth(e.mul(&sp.ale)),
        aeq: orth(e.mul(&sp.aeq)),
        tol: sp.tol,
        warnings: sp.warnings.clone(),
    }
}

/// Re-measures every generator invariant.
pub fn verify_generators(st: &AffineSetting, mut gs: GeneratorSet) -> Result<GeneratorSet, SchottkyError> {
    let mut splits = Vec::new();
    for (i, g) in gs.generators.iter().enumerate() {
        let sp = st.type_x0_split(g)?;
        let m = st.margulis_invariant(g)?;
        let err = linalg::norm(&linalg::vsub(&m, &gs.m0)).to_f64();
        if err > 1e-6 {
            return Err(SchottkyError::Invariant(format!("M(g{}) differs from M0 by {err:e}", i + 1)));
        }
        st.type_x0_split(&gs.inverses[i])?;
        splits.push(sp);
    }
    gs.c_bar = admissible_pair_bound(st, &splits)?;
    Ok(gs)
}

#[derive(Debug, Clone, Serialize)]
pub struct WordRow {
    pub word: Word,
    pub length: usize,
    pub type_x0: bool,
    pub s: Option<f64>,
    pub c_bar: Option<f64>,
    #[serde(rename = "M")]
    pub m: Vec<f64>,
    pub defect: f64,
    pub defect_per_length: f64,
    /// Angle between `M(w)` and `M0`.
    pub angle: f64,
    /// `‖M(w^-1) + w0 M(w)‖`.
    pub inverse_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdditivitySummary {
    pub words: usize,
    pub all_type_x0: bool,
    pub eps_hat: f64,
    pub max_defect_per_length: f64,
    pub defect_bound_holds: bool,
    pub angle_bound: f64,
    pub max_angle: f64,
    pub half_line_holds: bool,
    pub max_inverse_residual: f64,
    pub min_projection_margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdditivityReport {
    pub rows: Vec<WordRow>,
    pub summary: AdditivitySummary,
}

fn word_row(st: &AffineSetting, gs: &GeneratorSet, gen_m: &[(Vec<Hp>, Vec<Hp>)], w: &Word) -> WordRow {
    let g = gs.evaluate(w);
    let expected = w.0.iter().fold(vec![Hp::ZERO; st.dim()], |acc, l| {
        let (mp, mm) = &gen_m[l.gen];
        linalg::vadd(&acc, if l.sign > 0 { mp } else { mm })
    });
    let split = st.type_x0_split(&g);
    let Ok(sp) = split else {
        return WordRow {
            word: w.clone(),
            length: w.len(),
            type_x0: false,
            s: None,
            c_bar: None,
            m: Vec::new(),
            defect: f64::INFINITY,
            defect_per_length: f64::INFINITY,
            angle: f64::INFINITY,
            inverse_residual: f64::INFINITY,
        };
    };
    let m = st.canonizing_map_with(&g, &sp).map(|phi| {
        let x = phi.inverse().apply(&vec![Hp::ZERO; st.dim()]);
        st.margulis_with(&g, &phi, &x)
    });
    let mi = st.margulis_invariant(&g.inverse());
    let (m, inverse_residual) = match (m, mi) {
        (Ok(m), Ok(mi)) => {
            let w0m = st.mg.w0_rep().m.mul_vec(&m);
            let r = linalg::norm(&linalg::vadd(&mi, &w0m)).to_f64();
            (m, r)
        }
        _ => (vec![Hp::ZERO; st.dim()], f64::INFINITY),
    };
    let defect = linalg::norm(&linalg::vsub(&m, &expected)).to_f64();
    WordRow {
        word: w.clone(),
        length: w.len(),
        type_x0: true,
        s: Some(crate::affdyn::contraction_strength_with(&g, &sp).to_f64()),
        c_bar: st.nondegeneracy_bound(&sp.age, &sp.ale).ok(),
        m: linalg::to_f64s(&st.vt_coords(&m)),
        defect,
        defect_per_length: defect / w.len() as f64,
        angle: vector_angle(&m, &gs.m0),
        inverse_residual,
    }
}

/// Angle between two vectors, in `[0, pi]`.
fn vector_angle(a: &[Hp], b: &[Hp]) -> f64 {
    let c = linalg::dot(a, b);
    let na = linalg::norm(a);
    let nb = linalg::norm(b);
    if na.is_zero() || nb.is_zero() {
        return std::f64::consts::PI;
    }
    let s = (na * na * nb * nb - c * c).max(Hp::ZERO).sqrt();
    s.to_f64().atan2(c.to_f64())
}

/// Measured `M` of every generator and its inverse.
fn generator_invariants(st: &AffineSetting, gs: &GeneratorSet) -> Vec<(Vec<Hp>, Vec<Hp>)> {
    (0..gs.k())
        .map(|i| {
            let mp = st.margulis_invariant(&gs.generators[i]).expect("generator verified");
            let mm = st.margulis_invariant(&gs.inverses[i]).expect("generator verified");
            (mp, mm)
        })
        .collect()
}

pub fn additivity_report(st: &AffineSetting, gs: &GeneratorSet, max_len: usize) -> AdditivityReport {
    let words = enumerate_cyclically_reduced(gs.k(), max_len);
    let gen_m = generator_invariants(st, gs);
    let rows: Vec<WordRow> = words.par_iter().map(|w| word_row(st, gs, &gen_m, w)).collect();
    let eps_hat = rows.iter().filter(|r| r.length == 2).map(|r| r.defect).fold(0.0, f64::max);
    let m0n = linalg::norm(&gs.m0).to_f64();
    let angle_bound = if eps_hat >= m0n { std::f64::consts::FRAC_PI_2 } else { (eps_hat / m0n).asin() };
    let max_defect_per_length = rows.iter().map(|r| r.defect_per_length).fold(0.0, f64::max);
    let max_angle = rows.iter().map(|r| r.angle).fold(0.0, f64::max);
    let m0u = linalg::vscale(Hp::from_f64(m0n).recip(), &gs.m0);
    let m0c = linalg::to_f64s(&st.vt_coords(&m0u));
    let min_projection_margin = rows
        .iter()
        .map(|r| {
            let proj: f64 = r.m.iter().zip(&m0c).map(|(a, b)| a * b).sum();
            proj - (m0n - eps_hat) * r.length as f64
        })
        .fold(f64::INFINITY, f64::min);
    let slack = 1e-9;
    let summary = AdditivitySummary {
        words: rows.len(),
        all_type_x0: rows.iter().all(|r| r.type_x0),
        eps_hat,
        max_defect_per_length,
        defect_bound_holds: max_defect_per_length <= eps_hat + slack,
        angle_bound,
        max_angle,
        half_line_holds: max_angle <= angle_bound + slack,
        max_inverse_residual: rows.iter().map(|r| r.inverse_residual).fold(0.0, f64::max),
        min_projection_margin,
    };
    AdditivityReport { rows, summary }
}

/// `min_{‖x‖ <= R} ‖g(x) - x‖`, by bisection on the trust-region multiplier.
pub fn min_displacement_in_ball(g: &AffineMap, radius: f64) -> f64 {
    let d = g.dim();
    let a = g.lin.m.sub(&Mat::identity(d));
    let svd = linalg::svd(&a);
    let utv: Vec<Hp> = svd.u.transpose().mul_vec(&g.v);
    let r = Hp::from_f64(radius);
    let x_of = |mu: Hp| -> Vec<Hp> {
        let c: Vec<Hp> = (0..d)
            .map(|i| {
                let s = svd.s[i];
                let den = s * s + mu;
                if den.is_zero() {
                    Hp::ZERO
                } else {
                    -(s * utv[i]) / den
                }
            })
            .collect();
        svd.v.mul_vec(&c)
    };
    let disp = |x: &[Hp]| linalg::norm(&linalg::vadd(&a.mul_vec(x), &g.v)).to_f64();
    let x0 = x_of(Hp::ZERO);
    if linalg::norm(&x0) <= r {
        return disp(&x0);
    }
    let (mut lo, mut hi) = (-200.0f64, 200.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let x = x_of(Hp::from_f64(mid.exp()));
        if linalg::norm(&x) > r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    disp(&x_of(Hp::from_f64(hi.exp())))
}

#[derive(Debug, Clone, Serialize)]
pub struct ProperRow {
    pub length: usize,
    pub min_displacement: f64,
    pub argmin_word: Option<Word>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProperReport {
    pub radius: f64,
    pub rows: Vec<ProperRow>,
    /// Least-squares slope of the minimal displacement against the length.
    pub slope: f64,
    /// Smallest ratio between consecutive minimal displacements.
    pub min_growth_ratio: f64,
    pub grows: bool,
}

/// Minimal displacement of the ball of radius `radius` by cyclically reduced
/// words of each length. A proxy for proper discontinuity, not a proof.
pub fn properness_proxy(gs: &GeneratorSet, max_len: usize, radius: f64) -> ProperReport {
    let words = enumerate_cyclically_reduced(gs.k(), max_len);
    let disps: Vec<f64> = words.par_iter().map(|w| min_displacement_in_ball(&gs.evaluate(w), radius)).collect();
    let mut rows = vec![ProperRow { length: 0, min_displacement: 0.0, argmin_word: None }];
    for len in 1..=max_len {
        let best = words
            .iter()
            .zip(&disps)
            .filter(|(w, _)| w.len() == len)
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap());
        if let Some((w, &d)) = best {
            rows.push(ProperRow { length: len, min_displacement: d, argmin_word: Some(w.clone()) });
        }
    }
    let n = rows.len() as f64;
    let mx = rows.iter().map(|r| r.length as f64).sum::<f64>() / n;
    let my = rows.iter().map(|r| r.min_displacement).sum::<f64>() / n;
    let sxy: f64 = rows.iter().map(|r| (r.length as f64 - mx) * (r.min_displacement - my)).sum();
    let sxx: f64 = rows.iter().map(|r| (r.length as f64 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let min_growth_ratio = rows
        .windows(2)
        .skip(1)
        .map(|w| w[1].min_displacement / w[0].min_displacement)
        .fold(f64::INFINITY, f64::min);
    ProperReport { radius, slope, min_growth_ratio, grows: slope > 0.0, rows }
}

/// The generator set with the translation of the last generator replaced so
/// that its invariant is `-M0`.
pub fn flipped_control(st: &AffineSetting, gs: &GeneratorSet) -> Result<GeneratorSet, SchottkyError> {
    let mut out = gs.clone();
    let k = gs.k() - 1;
    let gamma = AffineMap::linear(gs.generators[k].lin.clone());
    let neg: Vec<Hp> = gs.m0.iter().map(|x| -*x).collect();
    out.generators[k] = attach_translation(st, &gamma, &neg)?;
    out.inverses[k] = out.generators[k].inverse();
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct FreenessReport {
    pub max_len: usize,
    pub words: usize,
    /// Smallest `‖eval(u) - eval(v)‖` over distinct words, on extended matrices.
    pub min_separation: f64,
    pub closest: Option<(Word, Word)>,
}

/// Numerical collision check between distinct cyclically reduced words.
pub fn freeness_proxy(gs: &GeneratorSet, max_len: usize) -> FreenessReport {
    let words = enumerate_cyclically_reduced(gs.k(), max_len);
    let mats: Vec<Mat> = words.par_iter().map(|w| gs.evaluate(w).extended().m).collect();
    let best = (0..words.len())
        .into_par_iter()
        .filter_map(|i| {
            (i + 1..words.len())
                .map(|j| (mats[i].dist(&mats[j]), i, j))
                .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
        })
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    FreenessReport {
        max_len,
        words: words.len(),
        min_separation: best.map_or(f64::INFINITY, |b| b.0),
        closest: best.map(|(_, i, j)| (words[i].clone(), words[j].clone())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn reducedness() {
        assert!(!w("g1*g1^-1").is_reduced());
        let x = w("g1*g2*g1^-1");
        assert!(x.is_reduced());
        assert!(!x.is_cyclically_reduced());
        assert!(w("g1*g2").is_cyclically_reduced());
        assert_eq!(x.to_string(), "g1*g2*g1^-1");
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_cyclically_reduced(2, 2).len(), 16);
        let brute = |k: usize, l: usize| -> usize {
            let letters: Vec<Letter> =
                (0..k).flat_map(|g| [Letter { gen: g, sign: 1 }, Letter { gen: g, sign: -1 }]).collect();
            let mut count = 0;
            for len in 1..=l {
                let total = letters.len().pow(len as u32);
                for mut code in 0..total {
                    let mut v = Vec::new();
                    for _ in 0..len {
                        v.push(letters[code % letters.len()]);
                        code /= letters.len();
                    }
                    if Word(v).is_cyclically_reduced() {
                        count += 1;
                    }
                }
            }
            count
        };
        for (k, l) in [(2, 4), (3, 3)] {
            assert_eq!(enumerate_cyclically_reduced(k, l).len(), brute(k, l));
        }
    }

    #[test]
    fn displacement_of_translation() {
        let g = AffineMap::translation(linalg::from_f64s(&[3.0, 4.0]));
        assert!((min_displacement_in_ball(&g, 1.0) - 5.0).abs() < 1e-12);
    }
}
