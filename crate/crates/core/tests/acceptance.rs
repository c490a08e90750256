//! The ten acceptance criteria. Runs without the libtest harness so that each
//! criterion prints exactly one PASS/FAIL line; exits nonzero if any fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use margulis::affdyn::AffineSetting;
use margulis::cli;
use margulis::hp::Hp;
use margulis::linalg::{self, Mat};
use margulis::matgroups;
use margulis::rat::{self, Q, QVec};
use margulis::rootsys::{self, RootLabel, RootSystem};
use margulis::schottky::{self, SynthesisConfig};
use margulis::typing::{self, GroupKind, Status};
use margulis::verify::{self, SuiteConfig};
use margulis::weights;
use num_traits::{Signed, Zero};

type Verdict = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn qset(rows: &[&[i64]]) -> BTreeSet<QVec> {
    rows.iter().map(|r| rat::qvec(r)).collect()
}

fn timed_weights(system: &str, hw: &[i64]) -> Result<(RootSystem, QVec, BTreeSet<QVec>), String> {
    let rs = RootSystem::from_label(system).map_err(|e| e.to_string())?;
    let lambda = rat::qvec(hw);
    let t = Instant::now();
    let ws = weights::weight_set(&rs, &lambda).map_err(|e| e.to_string())?;
    ensure(t.elapsed() < Duration::from_secs(1), format!("{system} {hw:?} took {:?}", t.elapsed()))?;
    Ok((rs, lambda, ws.weights))
}

fn criterion_1() -> Verdict {
    let (_, _, b2) = timed_weights("B2", &[1, 0])?;
    ensure(b2 == qset(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1], &[0, 0]]), "B2/e1 weight set")?;

    let (_, _, a2) = timed_weights("A2", &[2, -1, -1])?;
    let listed = qset(&[
        &[2, -1, -1],
        &[-1, 2, -1],
        &[-1, -1, 2],
        &[1, 0, -1],
        &[0, 1, -1],
        &[1, -1, 0],
        &[-1, 1, 0],
        &[-1, 0, 1],
        &[0, -1, 1],
        &[0, 0, 0],
    ]);
    ensure(a2 == listed, "A2/S^3 weight set differs from the listed ten weights")?;

    let (rs, lambda, c4) = timed_weights("C4", &[1, 1, 1, 1])?;
    let one = Q::from_integer(1.into());
    let unit = |w: &QVec, k: usize| {
        w.iter().filter(|x| !x.is_zero()).count() == k && w.iter().all(|x| x.is_zero() || x.abs() == one)
    };
    let fam = [c4.iter().filter(|w| unit(w, 4)).count(), c4.iter().filter(|w| unit(w, 2)).count(), c4.iter().filter(|w| unit(w, 0)).count()];
    ensure(c4.len() == 41 && fam == [16, 24, 1], format!("C4: {} weights, families {fam:?}", c4.len()))?;
    ensure(c4 == common::dominance_oracle(&rs, &lambda), "C4 differs from the dominance oracle")?;

    let (rs, lambda, b21) = timed_weights("B2", &[2, 1])?;
    let oracle = common::dominance_oracle(&rs, &lambda);
    ensure(oracle.len() == 21 && b21 == oracle, format!("B2/(2,1): {} weights, oracle {}", b21.len(), oracle.len()))?;
    Ok("B2/e1 = 5, A2/S^3 = listed 10, C4 = 41 (16+24+1), B2/(2,1) = oracle (21)".into())
}

fn criterion_2() -> Verdict {
    let t = Instant::now();
    let mut got = Vec::new();
    for (system, hw, want) in [
        ("A2", vec![1, 0, -1], 1),
        ("B2", vec![1, 1], 1),
        ("B2", vec![1, 0], 1),
        ("B2", vec![2, 1], 2),
        ("C4", vec![1, 1, 1, 1], 3),
    ] {
        let rs = RootSystem::from_label(system).unwrap();
        let ws = weights::weight_set(&rs, &rat::qvec(&hw)).map_err(|e| e.to_string())?;
        let n = typing::enumerate_generic_types(&ws).map_err(|e| e.to_string())?.len();
        ensure(n == want, format!("{system} {hw:?}: {n} classes, expected {want}"))?;
        got.push(n);
    }
    ensure(t.elapsed() < Duration::from_secs(60), format!("took {:?}", t.elapsed()))?;
    Ok(format!("classes adjoint A2/B2, SO(3,2), B2 35-dim, C4 42-dim = {got:?} in {:.2?}", t.elapsed()))
}

fn criterion_3() -> Verdict {
    let rs = RootSystem::from_label("A2").unwrap();
    let ws = weights::weight_set(&rs, &rat::qvec(&[2, -1, -1])).unwrap();
    let (st, wit) = typing::no_swinging(&ws, &rootsys::longest_element(&rs));
    ensure(st == Status::Failed && wit == Some(rat::qvec(&[-1, 2, -1])), format!("A2/S^3 witness {wit:?}"))?;

    let mut count = 0;
    for system in ["B2", "B3", "C2", "C3", "C4", "BC2", "BC3", "F4", "G2"] {
        let rs = RootSystem::from_label(system).unwrap();
        let w0 = rootsys::longest_element(&rs);
        ensure(rootsys::acts_as_minus_identity(&rs, &w0), format!("{system}: w0 != -Id"))?;
        let mut coords: Vec<QVec> = (0..rs.rank)
            .map(|i| (0..rs.rank).map(|j| if i == j { rat::q(1) } else { Q::zero() }).collect())
            .collect();
        coords.push(vec![rat::q(1); rs.rank]);
        for n in coords {
            let lambda = weights::from_fundamental_coords(&rs, &n);
            let Ok(ws) = weights::weight_set(&rs, &lambda) else { continue };
            let (st, w) = typing::no_swinging(&ws, &w0);
            ensure(st == Status::Satisfied, format!("{system} {n:?} swings at {w:?}"))?;
            count += 1;
        }
    }
    Ok(format!("A2/S^3 witness -e1+2e2-e3; {count} representations over B/C/BC/F/G pass"))
}

fn criterion_4() -> Verdict {
    for n in 1..=5usize {
        let rs = RootSystem::build(RootLabel::B, n).unwrap();
        let mut e1 = vec![Q::zero(); n];
        e1[0] = rat::q(1);
        let rep = typing::main_theorem_report(&rs, &e1, GroupKind::SoPq { p: n + 1, q: n }).map_err(|e| e.to_string())?;
        if n % 2 == 1 {
            ensure(rep.all_satisfied(), format!("SO({},{n}) not SATISFIED", n + 1))?;
        } else {
            ensure(
                rep.cond_ib_w0_moves.status == Status::Failed
                    && rep.conditions().iter().filter(|c| c.status == Status::Failed).count() == 1,
                format!("SO({},{n}) should fail exactly cond_ib", n + 1),
            )?;
        }
        let mg = matgroups::build(&format!("so({},{n})", n + 1)).map_err(|e| e.to_string())?;
        let w = matgroups::w0_action_on_fixed_space(mg.as_ref());
        let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
        let target = Mat::identity(w.cols).scale(Hp::from_f64(sign));
        ensure(w.cols == 1 && w.dist(&target) <= 1e-8, format!("so({},{n}): w0 on V^t_0 is {:?}", n + 1, w.to_f64_rows()))?;
    }
    for (system, hw) in [("A2", vec![1, 0, -1]), ("B2", vec![1, 1])] {
        let rs = RootSystem::from_label(system).unwrap();
        let rep = typing::main_theorem_report(&rs, &rat::qvec(&hw), GroupKind::Adjoint).map_err(|e| e.to_string())?;
        ensure(rep.all_satisfied(), format!("{system} adjoint not SATISFIED"))?;
    }
    let dir = std::env::temp_dir();
    let out = dir.join(format!("margulis-acc-{}.json", std::process::id()));
    let out_s = out.to_str().unwrap();
    let ok = cli::main_with_args(["margulis", "check-rep", "--system", "B3", "--highest", "1,0,0", "--group", "so(4,3)", "--out", out_s]);
    let bad = cli::main_with_args(["margulis", "check-rep", "--system", "A2", "--highest", "3,0", "--out", out_s]);
    let text = std::fs::read_to_string(&out).unwrap_or_default();
    let _ = std::fs::remove_file(&out);
    ensure(ok == cli::EXIT_OK && bad == cli::EXIT_FAILED, format!("check-rep exit codes {ok}, {bad}"))?;
    ensure(text.contains("\"-1\",\n      \"2\",\n      \"-1\""), "check-rep A2 witness missing")?;
    Ok("SO(n+1,n) n=1,3,5 SATISFIED, n=2,4 FAILED(cond_ib), w0|V^t_0 = (-1)^n, adjoint A2/B2 SATISFIED, CLI exits 0/2".into())
}

fn suite(name: &str) -> Verdict {
    let rep = verify::run_suite(name, &SuiteConfig::default())?;
    let failed: Vec<String> = rep.checks.iter().filter(|c| !c.pass).map(|c| format!("{}: {}", c.name, c.detail)).collect();
    if failed.is_empty() {
        Ok(format!("suite `{name}`: {} checks passed", rep.checks.len()))
    } else {
        Err(failed.join("; "))
    }
}

fn criterion_9() -> Verdict {
    let t = Instant::now();
    let st = AffineSetting::from_name("so(2,1)").map_err(|e| e.to_string())?;
    let cfg = SynthesisConfig { k: 2, s_target: 1e-4, seed: 42, ..SynthesisConfig::default() };
    let gs = schottky::synthesize(&st, &cfg).map_err(|e| e.to_string())?;
    let rep = schottky::additivity_report(&st, &gs, 6);
    let proper = schottky::properness_proxy(&gs, 6, 10.0);
    let control = schottky::flipped_control(&st, &gs).map_err(|e| e.to_string())?;
    let control = schottky::properness_proxy(&control, 6, 10.0);
    let elapsed = t.elapsed();

    ensure(rep.rows.iter().all(|r| r.type_x0), "a cyclically reduced word is not of type X0")?;
    let eps = rep.rows.iter().filter(|r| r.length == 2).map(|r| r.defect).fold(0.0, f64::max);
    ensure((eps - rep.summary.eps_hat).abs() <= 1e-12 * eps.max(1.0), "eps_hat is not the length-2 maximum")?;
    let worst = rep.rows.iter().map(|r| r.defect / r.length as f64).fold(0.0, f64::max);
    ensure(worst <= eps, format!("defect per length {worst:e} > eps_hat {eps:e}"))?;

    // Angle to M0, recomputed in V^t_0 coordinates.
    let m0c = st.refs.vt.transpose().mul_vec(&gs.m0);
    let m0n = linalg::norm(&m0c).to_f64();
    let bound = (eps / m0n).min(1.0).asin();
    let mut max_angle: f64 = 0.0;
    for r in rep.rows.iter().filter(|r| r.length >= 1) {
        let m: Vec<Hp> = r.m.iter().map(|x| Hp::from_f64(*x)).collect();
        let c = (linalg::dot(&m, &m0c) / (linalg::norm(&m) * linalg::norm(&m0c))).to_f64().clamp(-1.0, 1.0);
        max_angle = max_angle.max(c.acos());
    }
    ensure(max_angle <= bound + 1e-12, format!("angle {max_angle:e} > bound {bound:e}"))?;
    ensure(rep.summary.all_type_x0 && rep.summary.defect_bound_holds && rep.summary.half_line_holds, "summary flags")?;
    ensure(proper.slope > 0.0 && proper.grows, format!("properness slope {}", proper.slope))?;
    ensure(control.slope <= 0.0 && !control.grows, format!("negative control slope {}", control.slope))?;
    ensure(elapsed < Duration::from_secs(300), format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} words type X0, eps_hat {eps:.3e} >= max defect/len {worst:.3e}, max angle {max_angle:.1e} <= {bound:.3e}, slope {:.3} vs control {:.3}, {elapsed:.1?}",
        rep.rows.len(),
        proper.slope,
        control.slope
    ))
}

fn run_cli_to_string(args: &[&str], tag: &str) -> Result<(i32, String), String> {
    let out = std::env::temp_dir().join(format!("margulis-acc-{}-{tag}.json", std::process::id()));
    let mut full: Vec<String> = vec!["margulis".into()];
    full.extend(args.iter().map(|s| s.to_string()));
    full.extend(["--out".to_string(), out.to_str().unwrap().to_string()]);
    let code = cli::main_with_args(full);
    let text = std::fs::read_to_string(&out).map_err(|e| e.to_string())?;
    let _ = std::fs::remove_file(&out);
    Ok((code, text))
}

fn criterion_10() -> Verdict {
    let sim = ["simulate", "--group", "so(2,1)", "--k", "2", "--s-target", "1e-4", "--L", "6", "--seed", "42"];
    let mut texts = Vec::new();
    for threads in ["1", "4"] {
        let mut args = sim.to_vec();
        args.extend(["--threads", threads]);
        let (code, text) = run_cli_to_string(&args, &format!("sim{threads}"))?;
        ensure(code == cli::EXIT_OK, format!("simulate exit {code}"))?;
        texts.push(text);
    }
    ensure(texts[0] == texts[1], "simulate reports differ between 1 and 4 threads")?;
    let mut vtexts = Vec::new();
    for threads in ["1", "3"] {
        let args = ["verify", "--suite", "margulis", "--trials", "20", "--seed", "11", "--threads", threads];
        let (code, text) = run_cli_to_string(&args, &format!("ver{threads}"))?;
        ensure(code == cli::EXIT_OK, format!("verify exit {code}"))?;
        vtexts.push(text);
    }
    ensure(vtexts[0] == vtexts[1], "verify reports differ between 1 and 3 threads")?;
    let parsed: serde_json::Value = serde_json::from_str(&texts[0]).map_err(|e| e.to_string())?;
    ensure(cli::emit(&parsed) == texts[0], "simulate report does not round-trip")?;
    Ok(format!("simulate ({} bytes) and verify ({} bytes) byte-identical across thread counts", texts[0].len(), vtexts[0].len()))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("weight sets", criterion_1),
        ("type enumeration", criterion_2),
        ("swinging", criterion_3),
        ("condition reports", criterion_4),
        ("spectral characterization", || suite("spectra")),
        ("Margulis invariant laws", || suite("margulis")),
        ("product laws", || suite("products")),
        ("Jordan additivity", || suite("additivity")),
        ("Schottky run", criterion_9),
        ("determinism", criterion_10),
    ];
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = i + 1;
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let t = Instant::now();
        let verdict = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = t.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {id:>2} PASS  {name} [{secs:.1}s]: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("criterion {id:>2} FAIL  {name} [{secs:.1}s]: {detail}");
            }
        }
    }
    if failures > 0 {
        println!("acceptance: {failures} criterion(s) failed");
        std::process::exit(1);
    }
    println!("acceptance: all criteria passed");
}
