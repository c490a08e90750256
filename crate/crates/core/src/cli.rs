//! Command-line front end. `dispatch` turns parsed arguments into a JSON
//! report and an exit code: 0 on success, 2 when the report records a failed
//! condition or assertion, 1 on errors.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::affdyn::AffineSetting;
use crate::matgroups;
use crate::rat::{self, fmt_qvec, QVec};
use crate::rootsys::RootSystem;
use crate::schottky::{self, SynthesisConfig};
use crate::typing::{self, GroupKind};
use crate::verify::{self, SuiteConfig, SUITES};
use crate::weights;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "margulis", version, about = "Restricted weights, type conditions and affine Schottky groups")]
pub struct Cli {
    /// Seed for random sampling (default 42 for simulate, 7 for verify).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Neutral log-modulus tolerance of dynamical splits.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

/// Coordinates used for `--highest`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Basis {
    /// Fundamental-weight coordinates when exactly `rank` entries are given
    /// and the ambient dimension differs, ambient coordinates otherwise.
    Auto,
    /// Coordinates in the ambient basis `e_1, ..., e_n`.
    Ambient,
    /// Coefficients on the fundamental weights.
    Fund,
}

#[derive(Debug, Clone, clap::Args)]
pub struct RepArgs {
    /// Root system, e.g. `B2`, `A2`, `BC2`.
    #[arg(long)]
    pub system: String,
    /// Highest restricted weight, comma separated rationals.
    #[arg(long)]
    pub highest: String,
    #[arg(long, value_enum, default_value_t = Basis::Auto)]
    pub basis: Basis,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Restricted weight set of a representation.
    Weights(RepArgs),
    /// Generic types (open cells of the Weyl chamber cut by weight kernels).
    Types(RepArgs),
    /// Main-theorem conditions of a representation.
    CheckRep {
        #[command(flatten)]
        rep: RepArgs,
        /// Real form, e.g. `so(4,3)`, `sl(3)`, `split`, `adjoint`.
        #[arg(long)]
        group: Option<String>,
    },
    /// Synthesize affine Schottky generators and test word invariants.
    Simulate {
        #[arg(long, default_value = "so(2,1)")]
        group: String,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long = "s-target", default_value_t = 1e-4)]
        s_target: f64,
        /// Largest word length.
        #[arg(long = "L", default_value_t = 6)]
        max_len: usize,
        #[arg(long = "m0-norm", default_value_t = 1.0)]
        m0_norm: f64,
        /// Ball radius of the properness proxy.
        #[arg(long, default_value_t = 10.0)]
        radius: f64,
        /// Largest word length of the freeness proxy.
        #[arg(long = "freeness-len", default_value_t = 4)]
        freeness_len: usize,
    },
    /// Run a verification suite, or `all`.
    Verify {
        /// weights, typing, spectra, margulis, proximal, products, additivity, properness or all
        #[arg(long)]
        suite: String,
        /// Random samples per check
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
}

fn parse_highest(rs: &RootSystem, args: &RepArgs) -> Result<QVec, String> {
    let v = rat::parse_qvec(&args.highest).map_err(|e| e.to_string())?;
    let fund = match args.basis {
        Basis::Fund => true,
        Basis::Ambient => false,
        Basis::Auto => v.len() == rs.rank && rs.ambient_dim != rs.rank,
    };
    if fund {
        if v.len() != rs.rank {
            return Err(format!("expected {} fundamental coordinates, got {}", rs.rank, v.len()));
        }
        Ok(weights::from_fundamental_coords(rs, &v))
    } else {
        Ok(v)
    }
}

fn rep(args: &RepArgs) -> Result<(RootSystem, QVec), String> {
    let rs = RootSystem::from_label(&args.system).map_err(|e| e.to_string())?;
    let lambda = parse_highest(&rs, args)?;
    weights::validate_highest_weight(&rs, &lambda).map_err(|e| e.to_string())?;
    Ok((rs, lambda))
}

fn fmt_set<'a>(it: impl Iterator<Item = &'a QVec>) -> Vec<Vec<String>> {
    it.map(|w| fmt_qvec(w)).collect()
}

fn cmd_weights(args: &RepArgs) -> Result<Outcome, String> {
    let (rs, lambda) = rep(args)?;
    let ws = weights::weight_set(&rs, &lambda).map_err(|e| e.to_string())?;
    let report = json!({
        "system": rs.name(),
        "highest": fmt_qvec(&lambda),
        "count": ws.len(),
        "weights": fmt_set(ws.weights.iter()),
    });
    Ok(Outcome { code: EXIT_OK, report })
}

fn cmd_types(args: &RepArgs) -> Result<Outcome, String> {
    let (rs, lambda) = rep(args)?;
    let ws = weights::weight_set(&rs, &lambda).map_err(|e| e.to_string())?;
    let types = typing::enumerate_generic_types(&ws).map_err(|e| e.to_string())?;
    let classes: Vec<Value> = types
        .iter()
        .map(|t| {
            json!({
                "witness": fmt_qvec(&t.witness),
                "positive": fmt_set(t.class.omega_pos.iter()),
                "negative": fmt_set(t.class.omega_neg.iter()),
            })
        })
        .collect();
    let report = json!({
        "system": rs.name(),
        "highest": fmt_qvec(&lambda),
        "count": classes.len(),
        "classes": classes,
    });
    Ok(Outcome { code: EXIT_OK, report })
}

fn cmd_check_rep(args: &RepArgs, group: Option<&str>) -> Result<Outcome, String> {
    let (rs, lambda) = rep(args)?;
    let kind = match group {
        Some(g) => GroupKind::parse(g).ok_or_else(|| format!("unknown group {g:?}"))?,
        None => GroupKind::Split,
    };
    let mut report = typing::main_theorem_report(&rs, &lambda, kind).map_err(|e| e.to_string())?;
    let mut numeric = false;
    if let Some(mg) = group.and_then(|g| matgroups::build(g).ok()) {
        if mg.rs().name() == rs.name() && mg.highest_weight() == lambda {
            let w = matgroups::w0_action_on_fixed_space(mg.as_ref());
            typing::settle_numeric(&mut report, w.cols, matgroups::w0_moves_fixed_space(mg.as_ref()));
            numeric = true;
        }
    }
    let code = if report.any_failed() { EXIT_FAILED } else { EXIT_OK };
    let mut value = serde_json::to_value(&report).map_err(|e| e.to_string())?;
    value["numeric_realization"] = json!(numeric);
    Ok(Outcome { code, report: value })
}

#[derive(Serialize)]
struct SimulateConfig<'a> {
    group: &'a str,
    k: usize,
    s_target: f64,
    max_len: usize,
    m0_norm: f64,
    seed: u64,
    tol: f64,
    radius: f64,
    freeness_len: usize,
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    group: &str,
    k: usize,
    s_target: f64,
    max_len: usize,
    m0_norm: f64,
    radius: f64,
    freeness_len: usize,
    seed: u64,
    tol: Option<f64>,
) -> Result<Outcome, String> {
    let mut st = AffineSetting::from_name(group).map_err(|e| e.to_string())?;
    if let Some(t) = tol {
        st = st.with_tol(t);
    }
    let scfg = SynthesisConfig { k, s_target, m0_norm, seed, ..SynthesisConfig::default() };
    let gs = schottky::synthesize(&st, &scfg).map_err(|e| e.to_string())?;
    let add = schottky::additivity_report(&st, &gs, max_len);
    let proper = schottky::properness_proxy(&gs, max_len, radius);
    let control = schottky::flipped_control(&st, &gs)
        .map(|b| schottky::properness_proxy(&b, max_len, radius))
        .map_err(|e| e.to_string())?;
    let free = schottky::freeness_proxy(&gs, freeness_len.min(max_len));
    let s = &add.summary;
    let pass = s.all_type_x0
        && s.defect_bound_holds
        && s.half_line_holds
        && proper.grows
        && !control.grows
        && free.min_separation > 1e-4;
    let config = SimulateConfig {
        group,
        k,
        s_target,
        max_len,
        m0_norm,
        seed,
        tol: st.tol,
        radius,
        freeness_len,
    };
    let generators: Vec<Value> = gs
        .generators
        .iter()
        .zip(&gs.s_values)
        .map(|(g, (sp, sm))| json!({ "matrix": g.to_f64_rows(), "s": sp, "s_inverse": sm }))
        .collect();
    let report = json!({
        "config": config,
        "generators": generators,
        "rows": add.rows,
        "summary": {
            "pass": pass,
            "power": gs.power,
            "attempts": gs.attempts,
            "c_bar": gs.c_bar,
            "m0": gs.m0.iter().map(|x| x.to_f64()).collect::<Vec<_>>(),
            "additivity": add.summary,
            "freeness": free,
            "properness": proper,
            "negative_control": control,
        },
    });
    Ok(Outcome { code: if pass { EXIT_OK } else { EXIT_FAILED }, report })
}

fn cmd_verify(suite: &str, trials: usize, seed: u64) -> Result<Outcome, String> {
    let cfg = SuiteConfig { seed, trials };
    let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite] };
    let reports = names.iter().map(|n| verify::run_suite(n, &cfg)).collect::<Result<Vec<_>, _>>()?;
    let pass = reports.iter().all(|r| r.pass);
    let report = if reports.len() == 1 {
        serde_json::to_value(&reports[0]).map_err(|e| e.to_string())?
    } else {
        json!({ "pass": pass, "suites": reports })
    };
    Ok(Outcome { code: if pass { EXIT_OK } else { EXIT_FAILED }, report })
}

fn run(cli: &Cli) -> Result<Outcome, String> {
    match &cli.command {
        Command::Weights(a) => cmd_weights(a),
        Command::Types(a) => cmd_types(a),
        Command::CheckRep { rep, group } => cmd_check_rep(rep, group.as_deref()),
        Command::Simulate { group, k, s_target, max_len, m0_norm, radius, freeness_len } => cmd_simulate(
            group,
            *k,
            *s_target,
            *max_len,
            *m0_norm,
            *radius,
            *freeness_len,
            cli.seed.unwrap_or(42),
            cli.tol,
        ),
        Command::Verify { suite, trials } => cmd_verify(suite, *trials, cli.seed.unwrap_or(SuiteConfig::default().seed)),
    }
}

/// Runs the command on a pool of `--threads` workers if requested.
pub fn dispatch(cli: &Cli) -> Outcome {
    let result = match cli.threads {
        Some(0) => Err("--threads must be positive".to_string()),
        Some(n) => verify::with_threads(n, || run(cli)),
        None => run(cli),
    };
    result.unwrap_or_else(|e| Outcome { code: EXIT_ERROR, report: json!({ "error": e }) })
}

pub fn emit(report: &Value) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Parses `args`, runs the command, writes the report and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let out = dispatch(&cli);
    let text = emit(&out.report);
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("cannot write {}: {e}", path.display());
                return EXIT_ERROR;
            }
        }
        None => print!("{text}"),
    }
    if out.code == EXIT_ERROR {
        if let Some(e) = out.report.get("error").and_then(Value::as_str) {
            eprintln!("error: {e}");
        }
    }
    out.code
}
