//! Verification suites behind `margulis verify`. Each suite returns a JSON
//! report; given the same configuration the report is byte-identical
//! whatever the number of threads.

use std::collections::BTreeSet;

use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::affdyn::{self, AffineMap, AffineSetting};
use crate::hp::Hp;
use crate::linalg::{self, Mat};
use crate::lp;
use crate::matgroups::{self, GroupElement, GroupRealization, SeededRng};
use crate::proximal::{self, PROXIMAL_TOL};
use crate::rat::{self, Q, QVec};
use crate::rootsys::{self, RootSystem};
use crate::schottky::{self, SynthesisConfig};
use crate::typing::{self, GroupKind, Status};
use crate::weights;

pub const SUITES: [&str; 8] = ["weights", "typing", "spectra", "margulis", "proximal", "products", "additivity", "properness"];

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    pub pass: bool,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 7, trials: 100 }
    }
}

fn check(name: &str, pass: bool, detail: Value) -> Check {
    Check { name: name.to_string(), pass, detail }
}

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<SuiteReport, String> {
    let checks = match name {
        "weights" => suite_weights(),
        "typing" => suite_typing(),
        "spectra" => suite_spectra(cfg),
        "margulis" => suite_margulis(cfg),
        "proximal" => suite_proximal(cfg),
        "products" => suite_products(cfg),
        "additivity" => suite_additivity(cfg),
        "properness" => suite_properness(cfg),
        _ => return Err(format!("unknown suite {name:?}; expected one of {SUITES:?}")),
    };
    Ok(SuiteReport {
        suite: name.to_string(),
        seed: cfg.seed,
        trials: cfg.trials,
        pass: checks.iter().all(|c| c.pass),
        checks,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Stats {
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

pub fn stats(xs: &[f64]) -> Stats {
    if xs.is_empty() {
        return Stats { min: f64::NAN, median: f64::NAN, max: f64::NAN };
    }
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    Stats { min: v[0], median: v[v.len() / 2], max: v[v.len() - 1] }
}

/// `max / min` of positive values.
fn spread(xs: &[f64]) -> f64 {
    let s = stats(xs);
    s.max / s.min
}

fn fmt_set(s: &BTreeSet<QVec>) -> Vec<Vec<String>> {
    s.iter().map(|w| rat::fmt_qvec(w)).collect()
}

/// Weights of the representation of highest weight `lambda`, by brute force:
/// every `lambda - sum c_i alpha_i` with `0 <= c <= coords(lambda - w0 lambda)`
/// lying in the convex hull of the Weyl orbit of `lambda`.
pub fn oracle_weight_set(rs: &RootSystem, lambda: &[Q]) -> Result<BTreeSet<QVec>, String> {
    let group = rootsys::weyl_group(rs).map_err(|e| e.to_string())?;
    let orbit: Vec<QVec> = group.iter().map(|w| w.apply(lambda)).collect::<BTreeSet<_>>().into_iter().collect();
    let w0 = rootsys::longest_element(rs);
    let span = rs.simple_coords(&rat::sub(lambda, &w0.apply(lambda)));
    let bounds: Vec<i64> = span
        .iter()
        .map(|c| if c.is_integer() { c.to_integer().to_i64().unwrap_or(-1) } else { -1 })
        .collect();
    if bounds.iter().any(|&b| b < 0) {
        return Err("lambda - w0 lambda is not in the positive root cone".into());
    }
    let mut out = BTreeSet::new();
    let mut c = vec![0i64; rs.rank];
    loop {
        let shift = rs.combine(&c.iter().map(|&x| rat::q(x)).collect::<Vec<_>>());
        let mu = rat::sub(lambda, &shift);
        if lp::convex_combination(&orbit, &mu).is_some() {
            out.insert(mu);
        }
        let mut i = 0;
        while i < c.len() {
            c[i] += 1;
            if c[i] <= bounds[i] {
                break;
            }
            c[i] = 0;
            i += 1;
        }
        if i == c.len() {
            break;
        }
    }
    Ok(out)
}

fn weight_set_of(system: &str, hw: &[i64]) -> (RootSystem, QVec, BTreeSet<QVec>) {
    let rs = RootSystem::from_label(system).expect("valid system");
    let lambda = rat::qvec(hw);
    let ws = weights::weight_set(&rs, &lambda).expect("valid highest weight");
    (rs, lambda, ws.weights)
}

fn suite_weights() -> Vec<Check> {
    let mut out = Vec::new();
    let (_, _, b2) = weight_set_of("B2", &[1, 0]);
    let want: BTreeSet<QVec> = [[1, 0], [-1, 0], [0, 1], [0, -1], [0, 0]].iter().map(|v| rat::qvec(v)).collect();
    out.push(check("B2 e1", b2 == want, json!({ "weights": fmt_set(&b2) })));

    let (_, _, a2) = weight_set_of("A2", &[2, -1, -1]);
    let listed: BTreeSet<QVec> = [
        [2, -1, -1],
        [-1, 2, -1],
        [-1, -1, 2],
        [1, 0, -1],
        [0, 1, -1],
        [1, -1, 0],
        [-1, 1, 0],
        [-1, 0, 1],
        [0, -1, 1],
        [0, 0, 0],
    ]
    .iter()
    .map(|v| rat::qvec(v))
    .collect();
    out.push(check("A2 2e1-e2-e3", a2 == listed, json!({ "count": a2.len(), "weights": fmt_set(&a2) })));

    let (_, _, c4) = weight_set_of("C4", &[1, 1, 1, 1]);
    let mut fam = [0usize; 3];
    let mut other = 0;
    for w in &c4 {
        let nz = w.iter().filter(|x| !x.is_zero()).count();
        let unit = w.iter().all(|x| x.is_zero() || x.abs() == Q::from_integer(1.into()));
        match (nz, unit) {
            (4, true) => fam[0] += 1,
            (2, true) => fam[1] += 1,
            (0, _) => fam[2] += 1,
            _ => other += 1,
        }
    }
    let ok = c4.len() == 41 && fam == [16, 24, 1] && other == 0;
    out.push(check("C4 e1+e2+e3+e4", ok, json!({ "count": c4.len(), "families": fam, "other": other })));

    for (system, hw, expect) in [("B2", vec![2, 1], Some(21)), ("A2", vec![1, 0, -1], None), ("A1", vec![3, -3], None)] {
        let (rs, lambda, ws) = weight_set_of(system, &hw);
        let oracle = oracle_weight_set(&rs, &lambda);
        let ok = oracle.as_ref().is_ok_and(|o| *o == ws) && expect.is_none_or(|n| ws.len() == n);
        out.push(check(
            &format!("{system} {hw:?} against brute force"),
            ok,
            json!({ "count": ws.len(), "oracle_count": oracle.map(|o| o.len()).ok() }),
        ));
    }
    out
}

fn suite_typing() -> Vec<Check> {
    let mut out = Vec::new();
    for (label, system, hw, want) in [
        ("A2 adjoint", "A2", vec![1, 0, -1], 1),
        ("B2 adjoint", "B2", vec![1, 1], 1),
        ("SO(3,2) standard", "B2", vec![1, 0], 1),
        ("B2 35-dim", "B2", vec![2, 1], 2),
        ("C4 42-dim", "C4", vec![1, 1, 1, 1], 3),
    ] {
        let rs = RootSystem::from_label(system).unwrap();
        let ws = weights::weight_set(&rs, &rat::qvec(&hw)).unwrap();
        let got = typing::enumerate_generic_types(&ws).map(|t| t.len());
        out.push(check(&format!("types {label}"), got == Ok(want), json!({ "classes": got.ok(), "expected": want })));
    }

    let rs = RootSystem::from_label("A2").unwrap();
    let ws = weights::weight_set(&rs, &rat::qvec(&[2, -1, -1])).unwrap();
    let (status, wit) = typing::no_swinging(&ws, &rootsys::longest_element(&rs));
    let ok = status == Status::Failed && wit == Some(rat::qvec(&[-1, 2, -1]));
    out.push(check("A2 S^3 swinging witness", ok, json!({ "witness": wit.map(|w| rat::fmt_qvec(&w)) })));

    let mut passed = Vec::new();
    let mut ok = true;
    for system in ["B2", "B3", "C3", "BC2", "F4", "G2"] {
        let rs = RootSystem::from_label(system).unwrap();
        let w0 = rootsys::longest_element(&rs);
        ok &= rootsys::acts_as_minus_identity(&rs, &w0);
        for i in 0..rs.rank {
            let mut n = vec![Q::zero(); rs.rank];
            n[i] = rat::q(1);
            let lambda = weights::from_fundamental_coords(&rs, &n);
            let Ok(ws) = weights::weight_set(&rs, &lambda) else { continue };
            let (st, _) = typing::no_swinging(&ws, &w0);
            ok &= st == Status::Satisfied;
            passed.push(format!("{system} w{}", i + 1));
        }
    }
    out.push(check("w0 = -Id systems never swing", ok, json!({ "representations": passed })));

    for n in 1..=5usize {
        let rs = RootSystem::build(rootsys::RootLabel::B, n).unwrap();
        let mut e1 = vec![Q::zero(); n];
        e1[0] = rat::q(1);
        let kind = GroupKind::SoPq { p: n + 1, q: n };
        let rep = typing::main_theorem_report(&rs, &e1, kind).unwrap();
        let want_ok = n % 2 == 1;
        let status_ok = if want_ok {
            rep.all_satisfied()
        } else {
            rep.cond_ib_w0_moves.status == Status::Failed
                && [&rep.zero_weight, &rep.cond_ii_no_swinging, &rep.cond_ia_fixed_vector]
                    .iter()
                    .all(|c| c.status == Status::Satisfied)
        };
        let mg = matgroups::build(&format!("so({},{})", n + 1, n)).unwrap();
        let w = matgroups::w0_action_on_fixed_space(mg.as_ref());
        let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
        let target = Mat::identity(w.cols).scale(Hp::from_f64(sign));
        let dist = w.dist(&target);
        out.push(check(
            &format!("SO({},{}) standard", n + 1, n),
            status_ok && w.cols == 1 && dist <= 1e-8,
            json!({ "report": rep, "w0_on_vt0": w.to_f64_rows(), "distance_to_closed_form": dist }),
        ));
    }
    for (system, hw) in [("A2", vec![1, 0, -1]), ("B2", vec![1, 1])] {
        let rs = RootSystem::from_label(system).unwrap();
        let rep = typing::main_theorem_report(&rs, &rat::qvec(&hw), GroupKind::Adjoint).unwrap();
        out.push(check(&format!("{system} adjoint report"), rep.all_satisfied(), json!({ "report": rep })));
    }
    out
}

fn max_abs_diff(a: &[Hp], b: &[Hp]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (*x - *y).abs().to_f64()).fold(0.0, f64::max)
}

#[derive(Serialize)]
struct SpectrumRow {
    ct_residual: f64,
    jd_residual: f64,
    power_limit: f64,
}

fn spectrum_row(mg: &dyn GroupRealization, g: &GroupElement) -> Option<SpectrumRow> {
    let ct = matgroups::cartan_projection(mg, g).ok()?;
    let jd = matgroups::jordan_projection(mg, g).ok()?;
    let ct64 = matgroups::cartan_projection(mg, &g.pow(64)).ok()?;
    let scaled: Vec<Hp> = ct64.value.iter().map(|v| v.mul_pow2(-6)).collect();
    Some(SpectrumRow { ct_residual: ct.residual, jd_residual: jd.residual, power_limit: max_abs_diff(&jd.value, &scaled) })
}

fn richardson(mg: &dyn GroupRealization, g: &GroupElement) -> Option<f64> {
    let jd = matgroups::jordan_projection(mg, g).ok()?;
    let g64 = g.pow(64);
    let a = matgroups::cartan_projection(mg, &g64).ok()?;
    let b = matgroups::cartan_projection(mg, &g64.mul(&g64)).ok()?;
    let est: Vec<Hp> = b.value.iter().zip(&a.value).map(|(x, y)| (*x - *y).mul_pow2(-6)).collect();
    Some(max_abs_diff(&jd.value, &est))
}

/// Real spectrum with distinct moduli separated by at least `gap` in log scale.
fn well_separated(g: &GroupElement, gap: f64) -> bool {
    let ev = linalg::eigenvalues(&g.m);
    let mut logs = Vec::new();
    for (re, im) in ev {
        let r = re.hypot(im);
        if (im / r).abs().to_f64() > 1e-30 {
            return false;
        }
        logs.push(r.to_f64().ln());
    }
    logs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    logs.windows(2).all(|w| w[1] - w[0] < 1e-12 || w[1] - w[0] >= gap)
}

fn suite_spectra(cfg: &SuiteConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for (gi, name) in ["so(3,2)", "sl(3)"].iter().enumerate() {
        let mg = matgroups::build(name).unwrap();
        let mut rng = SeededRng::seed_from_u64(cfg.seed ^ ((gi as u64 + 1) * 0x9e37));
        let samples: Vec<GroupElement> =
            (0..cfg.trials).map(|_| matgroups::random_hyperbolic(mg.as_ref(), &mut rng, 1.0, 0.01)).collect();
        let rows: Vec<Option<SpectrumRow>> = samples.par_iter().map(|g| spectrum_row(mg.as_ref(), g)).collect();
        let failures = rows.iter().filter(|r| r.is_none()).count();
        let rows: Vec<SpectrumRow> = rows.into_iter().flatten().collect();
        let ct: Vec<f64> = rows.iter().map(|r| r.ct_residual).collect();
        let jd: Vec<f64> = rows.iter().map(|r| r.jd_residual).collect();
        let pl: Vec<f64> = rows.iter().map(|r| r.power_limit).collect();
        let ok = failures == 0 && stats(&ct).max <= 1e-6 && stats(&jd).max <= 1e-6 && stats(&pl).max <= 1e-3;
        out.push(check(
            &format!("{name} spectra of {} hyperbolic samples", cfg.trials),
            ok,
            json!({ "failures": failures, "cartan_residual": stats(&ct), "jordan_residual": stats(&jd), "power_limit": stats(&pl) }),
        ));
        let generic: Vec<GroupElement> = std::iter::repeat_with(|| matgroups::random_element(mg.as_ref(), &mut rng, 1.0))
            .take(10_000)
            .filter(|g| well_separated(g, 0.2))
            .take(cfg.trials.min(20))
            .collect();
        let rich: Vec<Option<f64>> = generic.par_iter().map(|g| richardson(mg.as_ref(), g)).collect();
        let fails = rich.iter().filter(|r| r.is_none()).count();
        let rich: Vec<f64> = rich.into_iter().flatten().collect();
        out.push(check(
            &format!("{name} Richardson power limit on generic loxodromic samples"),
            fails == 0 && !rich.is_empty() && stats(&rich).max <= 1e-3,
            json!({ "samples": rich.len(), "failures": fails, "error": stats(&rich) }),
        ));
    }
    out
}

fn vt_vector(st: &AffineSetting, rng: &mut SeededRng, scale: f64) -> Vec<Hp> {
    let c: Vec<Hp> = (0..st.refs.vt.cols).map(|_| Hp::from_f64(rng.gen_range(-scale..scale))).collect();
    st.refs.vt.mul_vec(&c)
}

fn hp_dist(a: &[Hp], b: &[Hp]) -> f64 {
    linalg::norm(&linalg::vsub(a, b)).to_f64()
}

#[derive(Serialize)]
struct MargulisRow {
    translation: f64,
    inverse: f64,
    choices: f64,
    pair_route: f64,
}

fn margulis_row(st: &AffineSetting, seed: u64) -> Option<MargulisRow> {
    let mut rng = SeededRng::seed_from_u64(seed);
    let d = st.dim();
    let v = vt_vector(st, &mut rng, 2.0);
    let g0 = AffineMap::translation(v.clone()).mul(&st.exp_x0(Hp::one()));
    let translation = hp_dist(&st.margulis_invariant(&g0).ok()?, &v);

    let t = rng.gen_range(0.5..1.5);
    let g = affdyn::random_type_x0(st, &mut rng, t, 0.8, 2.0);
    let m = st.margulis_invariant(&g).ok()?;
    let mi = st.margulis_invariant(&g.inverse()).ok()?;
    let minus_w0m: Vec<Hp> = st.mg.w0_rep().m.mul_vec(&m).into_iter().map(|x| -x).collect();
    let inverse = hp_dist(&mi, &minus_w0m);

    let sp = st.split(&g).ok()?;
    let phi = st.canonizing_map_with(&g, &sp).ok()?;
    let a = st.mg.random_a(&mut rng, 1.0);
    let uc: Vec<Hp> = (0..st.refs.veq.cols).map(|_| Hp::from_f64(rng.gen_range(-1.0..1.0))).collect();
    let phi2 = AffineMap::translation(st.refs.veq.mul_vec(&uc))
        .mul(&AffineMap::linear(matgroups::exp_a(st.mg(), &a)))
        .mul(&phi);
    let p = std::iter::repeat_with(|| {
        let coeffs: Vec<Hp> = (0..sp.aeq.cols).map(|_| Hp::from_f64(rng.gen_range(-1.0..1.0))).collect();
        sp.aeq.mul_vec(&coeffs)
    })
    .take(100)
    .find(|p| p[d].abs().to_f64() >= 1e-3)?;
    let x: Vec<Hp> = (0..d).map(|i| p[i] / p[d]).collect();
    let choices = hp_dist(&st.margulis_with(&g, &phi2, &x), &m);
    let pc = st.pair_canonizer(&sp.age, &sp.ale).ok()?;
    let pair_route = hp_dist(&st.margulis_with(&g, &pc, &x), &m);
    Some(MargulisRow { translation, inverse, choices, pair_route })
}

fn suite_margulis(cfg: &SuiteConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for (gi, name) in ["so(2,1)", "so(4,3)"].iter().enumerate() {
        let st = AffineSetting::from_name(name).unwrap();
        let seeds: Vec<u64> = (0..cfg.trials as u64).map(|i| cfg.seed.wrapping_mul(1_000_003) + 7919 * gi as u64 + i).collect();
        let rows: Vec<Option<MargulisRow>> = seeds.par_iter().map(|&s| margulis_row(&st, s)).collect();
        let failures = rows.iter().filter(|r| r.is_none()).count();
        let rows: Vec<MargulisRow> = rows.into_iter().flatten().collect();
        let col = |f: fn(&MargulisRow) -> f64| stats(&rows.iter().map(f).collect::<Vec<_>>());
        let (tr, inv, ch, pr) = (col(|r| r.translation), col(|r| r.inverse), col(|r| r.choices), col(|r| r.pair_route));
        out.push(check(&format!("{name} M(tau_v exp(X0)) = v"), failures == 0 && tr.max <= 1e-10, json!({ "error": tr })));
        out.push(check(&format!("{name} M(g^-1) = -w0 M(g)"), failures == 0 && inv.max <= 1e-6, json!({ "error": inv })));
        out.push(check(
            &format!("{name} independence of (x, phi)"),
            failures == 0 && ch.max <= 1e-8 && pr.max <= 1e-8,
            json!({ "failures": failures, "error": ch, "pair_canonizer_route": pr }),
        ));
    }
    out
}

fn random_matrix(rng: &mut SeededRng, n: usize, scale: f64) -> Mat {
    Mat::from_fn(n, n, |i, j| {
        let base = if i == j { 1.0 } else { 0.0 };
        Hp::from_f64(base + rng.gen_range(-scale..scale))
    })
}

fn cond_bound(phi: &Mat) -> f64 {
    let inv = linalg::inverse(phi).expect("invertible conjugator");
    phi.op_norm().max(inv.op_norm()).to_f64()
}

/// `phi diag(1, eps d_2, ...) phi^-1` with `|d_i| in [0.5, 1]` of random sign.
fn proximal_sample(phi: &Mat, phi_inv: &Mat, ds: &[f64], eps: f64) -> Mat {
    let mut diag = vec![Hp::one()];
    diag.extend(ds.iter().map(|d| Hp::from_f64(d * eps)));
    phi.mul(&Mat::diag(&diag)).mul(phi_inv)
}

#[derive(Serialize)]
struct ProximalTrial {
    c_bar: f64,
    proximal: bool,
    kappa_le_s: bool,
    attracting: Vec<f64>,
    strength: Vec<f64>,
    radius: Vec<f64>,
}

const PROXIMAL_SWEEP: [f64; 4] = [1e-2, 1e-4, 1e-6, 1e-8];

fn proximal_trial(seed: u64, n: usize) -> ProximalTrial {
    let mut rng = SeededRng::seed_from_u64(seed);
    loop {
        let phis: Vec<Mat> = (0..2).map(|_| random_matrix(&mut rng, n, 0.3)).collect();
        let invs: Vec<Mat> = phis.iter().map(|p| linalg::inverse(p).unwrap()).collect();
        let ds: Vec<Vec<f64>> = (0..2)
            .map(|_| (1..n).map(|_| rng.gen_range(0.5..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect())
            .collect();
        let mut out = ProximalTrial {
            c_bar: 0.0,
            proximal: true,
            kappa_le_s: true,
            attracting: Vec::new(),
            strength: Vec::new(),
            radius: Vec::new(),
        };
        let mut accepted = true;
        for &eps in &PROXIMAL_SWEEP {
            let g: Vec<Mat> = (0..2).map(|i| proximal_sample(&phis[i], &invs[i], &ds[i], eps)).collect();
            let data: Vec<_> = g.iter().map(|m| proximal::proximal_data(m, PROXIMAL_TOL)).collect();
            let [Ok(a), Ok(b)] = [&data[0], &data[1]] else {
                accepted = false;
                break;
            };
            let c = [(a, a), (a, b), (b, a), (b, b)]
                .iter()
                .map(|(x, y)| proximal::proximal_pair_bound(x, y))
                .fold(1.0, f64::max);
            out.c_bar = out.c_bar.max(c);
            if out.c_bar > 4.0 {
                accepted = false;
                break;
            }
            out.kappa_le_s &= a.kappa <= a.s_tilde && b.kappa <= b.s_tilde;
            match proximal::check_proximal_product(&g[0], &g[1], c) {
                Ok(r) => {
                    out.attracting.push(r.ratio_attracting);
                    out.strength.push(r.ratio_strength);
                    out.radius.push(r.ratio_radius);
                }
                Err(_) => out.proximal = false,
            }
        }
        if accepted {
            return out;
        }
    }
}

/// Exterior-power and proximal checks on type-X0 affine maps of `st`.
fn regular_to_proximal(st: &AffineSetting, seed: u64) -> Option<(f64, Vec<f64>)> {
    let mut rng = SeededRng::seed_from_u64(seed);
    let g = affdyn::random_type_x0(st, &mut rng, 0.5, 0.5, 1.0);
    let p = st.dim_age0();
    let sp = st.split(&g).ok()?;
    let lam = proximal::exterior_power(&g.matrix(), p);
    let pd = proximal::proximal_data(&lam, PROXIMAL_TOL).ok()?;
    let angle = proximal::line_angle(&pd.es, &proximal::wedge(&sp.age));
    let mut ratios = Vec::new();
    for n in [1i64, 2, 4, 8] {
        let gn = g.pow(n);
        let s = st.contraction_strength(&gn).ok()?.to_f64();
        let pdn = proximal::proximal_data(&proximal::exterior_power(&gn.matrix(), p), PROXIMAL_TOL).ok()?;
        ratios.push(s / pdn.s_tilde.to_f64());
    }
    Some((angle, ratios))
}

fn suite_proximal(cfg: &SuiteConfig) -> Vec<Check> {
    let mut out = Vec::new();
    let seeds: Vec<u64> = (0..cfg.trials as u64).map(|i| cfg.seed.wrapping_mul(31) + i).collect();
    let trials: Vec<ProximalTrial> = seeds.par_iter().map(|&s| proximal_trial(s, 4)).collect();
    let all = |f: fn(&ProximalTrial) -> &Vec<f64>| trials.iter().flat_map(|t| f(t).iter().copied()).collect::<Vec<_>>();
    let spreads = |f: fn(&ProximalTrial) -> &Vec<f64>| trials.iter().map(|t| spread(f(t))).collect::<Vec<_>>();
    let proximal_count = trials.iter().filter(|t| t.proximal).count();
    out.push(check(
        "products of C<=4 proximal pairs are proximal",
        proximal_count == trials.len(),
        json!({ "proximal": proximal_count, "trials": trials.len(), "c_bar": stats(&trials.iter().map(|t| t.c_bar).collect::<Vec<_>>()) }),
    ));
    let sp = [spreads(|t| &t.attracting), spreads(|t| &t.strength), spreads(|t| &t.radius)];
    let ok = sp.iter().all(|s| s.iter().all(|v| v.is_finite() && *v < 10.0));
    out.push(check(
        "proximal product ratios stable over the contraction sweep",
        ok,
        json!({
            "sweep": PROXIMAL_SWEEP,
            "attracting": stats(&all(|t| &t.attracting)),
            "strength": stats(&all(|t| &t.strength)),
            "radius": stats(&all(|t| &t.radius)),
            "spread_attracting": stats(&sp[0]),
            "spread_strength": stats(&sp[1]),
            "spread_radius": stats(&sp[2]),
        }),
    ));
    out.push(check("kappa~ <= s~", trials.iter().all(|t| t.kappa_le_s), json!({})));

    let mut rng = SeededRng::seed_from_u64(cfg.seed ^ 0xabcdef);
    let mut equiv: f64 = 0.0;
    let mut distortion_ok = true;
    let mut worst_distortion: f64 = 0.0;
    for _ in 0..cfg.trials.min(50) {
        let phi = random_matrix(&mut rng, 4, 0.3);
        let phi_inv = linalg::inverse(&phi).unwrap();
        let ds: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let base = random_matrix(&mut rng, 4, 0.3);
        let g = proximal_sample(&base, &linalg::inverse(&base).unwrap(), &ds, 1.0);
        let (Ok(a), Ok(b)) = (
            proximal::proximal_data(&g, PROXIMAL_TOL),
            proximal::proximal_data(&phi.mul(&g).mul(&phi_inv), PROXIMAL_TOL),
        ) else {
            equiv = f64::INFINITY;
            continue;
        };
        let es = proximal::line_angle(&b.es, &phi.mul_vec(&a.es));
        let nu = proximal::line_angle(&b.eu_normal, &phi_inv.transpose().mul_vec(&a.eu_normal));
        equiv = equiv.max(es).max(nu);
        let c = cond_bound(&phi);
        let pairs: Vec<(Vec<Hp>, Vec<Hp>)> = (0..20)
            .map(|_| {
                let x: Vec<Hp> = (0..4).map(|_| Hp::from_f64(rng.gen_range(-1.0..1.0))).collect();
                let y: Vec<Hp> = (0..4).map(|_| Hp::from_f64(rng.gen_range(-1.0..1.0))).collect();
                (x, y)
            })
            .collect();
        let dist = proximal::angle_distortion(&phi, &pairs);
        worst_distortion = worst_distortion.max(dist / (c * c));
        distortion_ok &= dist <= c * c * (1.0 + 1e-12);
    }
    out.push(check("proximal spaces are conjugation-equivariant", equiv <= 1e-8, json!({ "max_angle": equiv })));
    out.push(check(
        "angle distortion bounded by C^2",
        distortion_ok,
        json!({ "max_distortion_over_c2": worst_distortion }),
    ));

    let g = random_matrix(&mut rng, 4, 0.5);
    let id_ok = proximal::exterior_power(&Mat::identity(5), 2).dist(&Mat::identity(10)) == 0.0;
    let cof = proximal::exterior_power(&g, 3);
    let inv = linalg::inverse(&g).unwrap();
    let det = linalg::det(&g);
    let mut cof_err: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let sign = if (i + j) % 2 == 0 { Hp::one() } else { -Hp::one() };
            let want = sign * det * inv[(j, i)];
            cof_err = cof_err.max((cof[(3 - i, 3 - j)] - want).abs().to_f64());
        }
    }
    out.push(check(
        "exterior power: identity and cofactor oracle",
        id_ok && cof_err <= 1e-60,
        json!({ "cofactor_error": cof_err }),
    ));

    for (gi, name) in ["so(2,1)", "so(4,3)"].iter().enumerate() {
        let st = AffineSetting::from_name(name).unwrap();
        let seeds: Vec<u64> = (0..cfg.trials.min(20) as u64).map(|i| cfg.seed * 101 + 17 * gi as u64 + i).collect();
        let rows: Vec<Option<(f64, Vec<f64>)>> = seeds.par_iter().map(|&s| regular_to_proximal(&st, s)).collect();
        let failures = rows.iter().filter(|r| r.is_none()).count();
        let rows: Vec<(f64, Vec<f64>)> = rows.into_iter().flatten().collect();
        let angles: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let spreads: Vec<f64> = rows.iter().map(|r| spread(&r.1)).collect();
        let ratios: Vec<f64> = rows.iter().flat_map(|r| r.1.iter().copied()).collect();
        out.push(check(
            &format!("{name}: attracting line of the exterior power is the wedge of A^>="),
            failures == 0 && stats(&angles).max <= 1e-6,
            json!({ "failures": failures, "angle": stats(&angles) }),
        ));
        out.push(check(
            &format!("{name}: s(g^N) and s~ of the exterior power agree up to a stable factor"),
            failures == 0 && stats(&spreads).max < 10.0,
            json!({ "ratio": stats(&ratios), "spread": stats(&spreads) }),
        ));
    }

    let mut ratios = Vec::new();
    let mut ok = true;
    for (n, p) in [(5usize, 2usize), (6, 3)] {
        for _ in 0..500 {
            let a1 = linalg::orthonormalize(
                &Mat::from_fn(n, p, |_, _| Hp::from_f64(rng.gen_range(-1.0..1.0))),
                linalg::default_rank_tol(),
            );
            let eps = 10f64.powf(rng.gen_range(-6.0..0.5));
            let noise = Mat::from_fn(n, p, |_, _| Hp::from_f64(eps * rng.gen_range(-1.0..1.0)));
            let a2 = linalg::orthonormalize(&a1.add(&noise), linalg::default_rank_tol());
            let h = proximal::hausdorff_angle(&a1, &a2);
            let w = proximal::wedge_angle(&a1, &a2);
            let r = w / h;
            ok &= r >= 1.0 - 1e-9 && r <= (p as f64).sqrt() + 1e-9;
            ratios.push(r);
        }
    }
    out.push(check(
        "Hausdorff angle and exterior-power angle are comparable",
        ok,
        json!({ "ratio": stats(&ratios), "bound": "[1, sqrt(p)]" }),
    ));
    out
}

/// Smallest positive value of a weight on `X0`.
fn min_positive_weight(st: &AffineSetting) -> f64 {
    let rs = st.mg.rs();
    st.mg
        .weight_table()
        .iter()
        .map(|b| rat::to_f64(&rs.inner(&b.weight, st.x0_q())))
        .filter(|v| *v > 0.0)
        .fold(f64::INFINITY, f64::min)
}

/// `psi tau_v exp(t X0) psi^-1` with `t` tuned so that `s` is close to `target`.
fn calibrated(st: &AffineSetting, psi: &AffineMap, v: &[Hp], target: f64) -> Option<(AffineMap, f64)> {
    let m = min_positive_weight(st);
    let build = |t: f64| AffineMap::translation(v.to_vec()).mul(&st.exp_x0(Hp::from_f64(t))).conjugate_by(psi);
    let mut t = (1.0 / target).ln() / m;
    for _ in 0..3 {
        let s = st.contraction_strength(&build(t)).ok()?.to_f64();
        t = (t + (s / target).ln() / m).max(1e-3);
    }
    let g = build(t);
    let s = st.contraction_strength(&g).ok()?.to_f64();
    Some((g, s))
}

fn random_v(rng: &mut SeededRng, d: usize, scale: f64) -> Vec<Hp> {
    (0..d).map(|_| Hp::from_f64(rng.gen_range(-scale..scale))).collect()
}

pub const CONTRACTION_SWEEP: [f64; 4] = [1e-2, 1e-4, 1e-6, 1e-8];
const C_MAX: f64 = 4.0;
const PSI_EPS: f64 = 0.25;

#[derive(Serialize)]
struct ProductTrial {
    rejections: usize,
    c_bar: f64,
    type_x0: bool,
    s_ratio: Vec<f64>,
    haus_ratio: Vec<f64>,
    attracting: Vec<f64>,
    strength: Vec<f64>,
    radius: Vec<f64>,
}

fn product_trial(st: &AffineSetting, seed: u64) -> Option<ProductTrial> {
    let mut rng = SeededRng::seed_from_u64(seed);
    let d = st.dim();
    let p = st.dim_age0();
    for rejections in 0..1000 {
        let psi_g = AffineMap::linear(matgroups::near_identity(st.mg(), &mut rng, PSI_EPS));
        let psi_h = AffineMap::linear(matgroups::near_identity(st.mg(), &mut rng, PSI_EPS));
        let vg = random_v(&mut rng, d, 0.5);
        let vh = random_v(&mut rng, d, 0.5);
        let mut out = ProductTrial {
            rejections,
            c_bar: 1.0,
            type_x0: true,
            s_ratio: Vec::new(),
            haus_ratio: Vec::new(),
            attracting: Vec::new(),
            strength: Vec::new(),
            radius: Vec::new(),
        };
        let mut accepted = true;
        for &target in &CONTRACTION_SWEEP {
            let (g, sg) = calibrated(st, &psi_g, &vg, target)?;
            let (h, sh) = calibrated(st, &psi_h, &vh, target)?;
            let (spg, sph) = (st.split(&g).ok()?, st.split(&h).ok()?);
            let c = st.pair_bound(&spg, &sph).unwrap_or(f64::INFINITY);
            out.c_bar = out.c_bar.max(c);
            if out.c_bar > C_MAX {
                accepted = false;
                break;
            }
            let gh = g.mul(&h);
            let Ok(spgh) = st.type_x0_split(&gh) else {
                out.type_x0 = false;
                continue;
            };
            let sgh = affdyn::contraction_strength_with(&gh, &spgh).to_f64();
            out.s_ratio.push(sgh / (sg * sh));
            out.haus_ratio.push(proximal::hausdorff_angle(&spgh.age, &spg.age) / sg);
            let lg = proximal::exterior_power(&g.matrix(), p);
            let lh = proximal::exterior_power(&h.matrix(), p);
            match proximal::check_proximal_product(&lg, &lh, c) {
                Ok(r) => {
                    out.attracting.push(r.ratio_attracting);
                    out.strength.push(r.ratio_strength);
                    out.radius.push(r.ratio_radius);
                }
                Err(_) => out.type_x0 = false,
            }
        }
        if accepted {
            return Some(out);
        }
    }
    None
}

fn suite_products(cfg: &SuiteConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for (gi, (name, trials)) in [("so(2,1)", cfg.trials), ("so(4,3)", cfg.trials.div_ceil(4))].iter().enumerate() {
        let st = AffineSetting::from_name(name).unwrap();
        let seeds: Vec<u64> = (0..*trials as u64).map(|i| cfg.seed.wrapping_mul(7777) + 131 * gi as u64 + i).collect();
        let rows: Vec<Option<ProductTrial>> = seeds.par_iter().map(|&s| product_trial(&st, s)).collect();
        let failures = rows.iter().filter(|r| r.is_none()).count();
        let rows: Vec<ProductTrial> = rows.into_iter().flatten().collect();
        let typed = rows.iter().filter(|r| r.type_x0).count();
        out.push(check(
            &format!("{name}: products of C<=4 pairs are of type X0"),
            failures == 0 && typed == rows.len(),
            json!({
                "trials": rows.len(),
                "type_x0": typed,
                "failures": failures,
                "c_bar": stats(&rows.iter().map(|r| r.c_bar).collect::<Vec<_>>()),
                "rejections": rows.iter().map(|r| r.rejections).sum::<usize>(),
            }),
        ));
        let series: [(&str, fn(&ProductTrial) -> &Vec<f64>); 5] = [
            ("s(gh)/(s(g)s(h))", |r| &r.s_ratio),
            ("alpha_Haus(A>=_gh, A>=_g)/s(g)", |r| &r.haus_ratio),
            ("proximal (i) attracting line", |r| &r.attracting),
            ("proximal (ii) strength", |r| &r.strength),
            ("proximal (iii) spectral radius", |r| &r.radius),
        ];
        for (label, f) in series {
            let complete: Vec<&ProductTrial> = rows.iter().filter(|r| f(r).len() == CONTRACTION_SWEEP.len()).collect();
            let spreads: Vec<f64> = complete.iter().map(|r| spread(f(r))).collect();
            let values: Vec<f64> = complete.iter().flat_map(|r| f(r).iter().copied()).collect();
            let ok = complete.len() == rows.len()
                && !rows.is_empty()
                && values.iter().all(|v| v.is_finite() && *v > 0.0)
                && spreads.iter().all(|s| *s < 10.0);
            out.push(check(
                &format!("{name}: {label} bounded and stable"),
                ok,
                json!({ "sweep": CONTRACTION_SWEEP, "value": stats(&values), "spread": stats(&spreads) }),
            ));
        }
    }
    out
}

pub const JORDAN_SWEEP: [f64; 4] = [1e-5, 1e-6, 1e-7, 1e-8];

#[derive(Serialize)]
struct JordanTrial {
    /// `max_i varpi_i(Jd(gh) - Ct(g) - Ct(h))` for each sweep value.
    upper: Vec<f64>,
    /// `max_{i not in Pi_X0} -varpi_i(...)` for each sweep value.
    lower: Vec<f64>,
    hull: Vec<bool>,
    /// `-log s(g) - (min_{Omega>=} lambda(Ct g) - max_{Omega<} lambda(Ct g))`.
    cartan_gap: Vec<f64>,
}

fn to_q(v: &[Hp]) -> QVec {
    v.iter().map(|x| rat::from_f64(x.to_f64())).collect()
}

fn jordan_trial(st: &AffineSetting, seed: u64) -> Option<JordanTrial> {
    let mut rng = SeededRng::seed_from_u64(seed);
    let mg = st.mg();
    let rs = mg.rs();
    let fw = rootsys::fundamental_weights(rs);
    let pi_x0 = &st.refvec.pi_x0;
    let zero = vec![Hp::ZERO; st.dim()];
    let table = mg.weight_table();
    for _ in 0..1000 {
        let psi_g = AffineMap::linear(matgroups::near_identity(mg, &mut rng, PSI_EPS));
        let psi_h = AffineMap::linear(matgroups::near_identity(mg, &mut rng, PSI_EPS));
        let mut out = JordanTrial { upper: Vec::new(), lower: Vec::new(), hull: Vec::new(), cartan_gap: Vec::new() };
        let mut accepted = true;
        for &target in &JORDAN_SWEEP {
            let (g, sg) = calibrated(st, &psi_g, &zero, target)?;
            let (h, _) = calibrated(st, &psi_h, &zero, target)?;
            let (spg, sph) = (st.split(&g).ok()?, st.split(&h).ok()?);
            if st.pair_bound(&spg, &sph).unwrap_or(f64::INFINITY) > C_MAX {
                accepted = false;
                break;
            }
            let ctg = matgroups::cartan_projection(mg, &g.lin).ok()?.value;
            let cth = matgroups::cartan_projection(mg, &h.lin).ok()?.value;
            let jd = matgroups::jordan_projection(mg, &g.lin.mul(&h.lin)).ok()?.value;
            let diff: Vec<Hp> = (0..jd.len()).map(|i| jd[i] - ctg[i] - cth[i]).collect();
            let vals: Vec<f64> = fw.iter().map(|w| matgroups::weight_value(w, &diff).to_f64()).collect();
            out.upper.push(vals.iter().copied().fold(f64::NEG_INFINITY, f64::max));
            out.lower.push(
                (0..fw.len()).filter(|i| !pi_x0.contains(i)).map(|i| -vals[i]).fold(f64::NEG_INFINITY, f64::max),
            );

            let (jq, sq) = (to_q(&jd), rat::add(&to_q(&ctg), &to_q(&cth)));
            let rows: Vec<QVec> = fw.clone();
            let rhs: QVec = (0..fw.len())
                .map(|i| if pi_x0.contains(&i) { rs.inner(&fw[i], &sq) } else { rs.inner(&fw[i], &jq) })
                .collect();
            let ct_prime = rat::solve(&rows, &rhs)?;
            let orbit: Vec<QVec> = st.refvec.w_x0.iter().map(|w| w.apply(&ct_prime)).collect();
            out.hull.push(lp::convex_combination(&orbit, &jq).is_some());

            let x0 = st.x0_q();
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for b in table {
                let sign = rs.inner(&b.weight, x0);
                let val = matgroups::weight_value(&b.weight, &ctg).to_f64();
                if sign.is_negative() {
                    hi = hi.max(val);
                } else {
                    lo = lo.min(val);
                }
            }
            out.cartan_gap.push(-sg.ln() - (lo - hi));
        }
        if accepted {
            return Some(out);
        }
    }
    None
}

fn suite_additivity(cfg: &SuiteConfig) -> Vec<Check> {
    let mut out = Vec::new();
    let st = AffineSetting::from_name("so(4,3)").unwrap();
    let seeds: Vec<u64> = (0..cfg.trials as u64).map(|i| cfg.seed.wrapping_mul(4243) + i).collect();
    let rows: Vec<Option<JordanTrial>> = seeds.par_iter().map(|&s| jordan_trial(&st, s)).collect();
    let failures = rows.iter().filter(|r| r.is_none()).count();
    let rows: Vec<JordanTrial> = rows.into_iter().flatten().collect();
    let upper: Vec<f64> = rows.iter().flat_map(|r| r.upper.iter().copied()).collect();
    out.push(check(
        "so(4,3): varpi_i(Jd(gh) - Ct(g) - Ct(h)) <= 1e-8",
        failures == 0 && !rows.is_empty() && upper.iter().all(|v| *v <= 1e-8),
        json!({ "trials": rows.len(), "failures": failures, "value": stats(&upper) }),
    ));
    let eps_prime: Vec<f64> = (0..JORDAN_SWEEP.len())
        .map(|k| rows.iter().map(|r| r.lower[k]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let stable = eps_prime.iter().all(|e| e.is_finite())
        && (eps_prime.iter().all(|e| *e <= 1e-8) || (stats(&eps_prime).min > 0.0 && spread(&eps_prime) < 10.0));
    out.push(check(
        "so(4,3): lower bound outside Pi_X0 with stable epsilon",
        stable,
        json!({ "sweep": JORDAN_SWEEP, "eps_hat_prime": eps_prime }),
    ));
    let hull_ok = rows.iter().filter(|r| r.hull.iter().all(|b| *b)).count();
    out.push(check(
        "so(4,3): Jd(gh) in the W_X0-hull of Ct'(g,h) (exact LP)",
        failures == 0 && hull_ok == rows.len(),
        json!({ "holds": hull_ok, "trials": rows.len() }),
    ));
    let gap: Vec<f64> = (0..JORDAN_SWEEP.len())
        .map(|k| rows.iter().map(|r| r.cartan_gap[k]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let g = stats(&gap);
    out.push(check(
        "so(4,3): Cartan gap >= -log s - eps with stable eps",
        g.max - g.min <= 10f64.ln(),
        json!({ "sweep": JORDAN_SWEEP, "eps_hat_double_prime": gap }),
    ));

    let st = AffineSetting::from_name("so(2,1)").unwrap();
    let scfg = SynthesisConfig { seed: cfg.seed, ..SynthesisConfig::default() };
    match schottky::synthesize(&st, &scfg) {
        Ok(gs) => {
            let rep = schottky::additivity_report(&st, &gs, 6);
            let s = &rep.summary;
            out.push(check("so(2,1) Schottky words: all type X0", s.all_type_x0, json!({ "words": s.words })));
            out.push(check(
                "so(2,1) Schottky words: defect per letter <= eps_hat",
                s.defect_bound_holds,
                json!({ "eps_hat": s.eps_hat, "max_defect_per_length": s.max_defect_per_length }),
            ));
            out.push(check(
                "so(2,1) Schottky words: half-line property",
                s.half_line_holds && s.min_projection_margin >= -1e-9,
                json!({ "angle_bound": s.angle_bound, "max_angle": s.max_angle, "projection_margin": s.min_projection_margin }),
            ));
            out.push(check(
                "so(2,1) Schottky words: M(w^-1) = -w0 M(w)",
                s.max_inverse_residual <= 1e-6,
                json!({ "max_residual": s.max_inverse_residual }),
            ));
        }
        Err(e) => out.push(check("so(2,1) Schottky synthesis", false, json!({ "error": e.to_string() }))),
    }
    out
}

fn suite_properness(cfg: &SuiteConfig) -> Vec<Check> {
    let st = AffineSetting::from_name("so(2,1)").unwrap();
    let scfg = SynthesisConfig { seed: cfg.seed, ..SynthesisConfig::default() };
    let gs = match schottky::synthesize(&st, &scfg) {
        Ok(gs) => gs,
        Err(e) => return vec![check("so(2,1) Schottky synthesis", false, json!({ "error": e.to_string() }))],
    };
    let good = schottky::properness_proxy(&gs, 5, 10.0);
    let bad = schottky::flipped_control(&st, &gs).map(|b| schottky::properness_proxy(&b, 5, 10.0));
    let mut out = vec![check("so(2,1): displacement grows with word length", good.slope > 0.0, json!(good))];
    match bad {
        Ok(b) => out.push(check("negative control (flipped generator) fails the growth test", b.slope <= 0.0, json!(b))),
        Err(e) => out.push(check("negative control", false, json!({ "error": e.to_string() }))),
    }
    out
}

/// Runs `f` on a dedicated pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool").install(f)
}
