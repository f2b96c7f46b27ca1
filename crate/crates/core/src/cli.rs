//! Command dispatch for the `qmemtime` binary.
//!
//! Exit status 0 on success, 1 when the analysis itself fails (for example
//! a non-Hurwitz drift where a limit is needed or a vanishing initial noise
//! rate), 2 when the configuration cannot be read or turned into a model.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use crate::algebra::{validate_structure, REPAIR_TOLERANCE};
use crate::config::{ConfigError, EnergySpec, OutputFormat, Problem, RunConfig};
use crate::decoherence::{decoherence_time, tau_expansion, tau_hat, DecoherenceTime, TauValue};
use crate::energy::{default_tolerance, gradient_check, optimize_energy, suboptimal_tau_report};
use crate::error::Error;
use crate::interconnect::{optimal_direct_coupling, partition_rk, COMPOSITE_TOLERANCE};
use crate::linalg::{min_eig_hermitian, spectral_abscissa, RVec};
use crate::model::coefficients;
use crate::moments::{is_hurwitz, simulate};
use crate::oracle::check_algebra;

/// Environment variable capping the number of sweep workers.
pub const THREADS_ENV: &str = "QMEMTIME_THREADS";

#[derive(Debug, Parser)]
#[command(name = "qmemtime", version, about = "Memory decoherence time of open quantum systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Validate,
    Simulate,
    Tau,
    OptimizeEnergy,
    OptimizeCoupling,
    Sweep,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the structure constants, representation and initial moments.
    Validate(Args),
    /// Mean, noise covariance diagonal and Delta on the time grid, as CSV.
    Simulate(Args),
    /// Decoherence time and its quadratic expansion for each epsilon.
    Tau(Args),
    /// Optimal energy vector for the approximate decoherence time.
    OptimizeEnergy(Args),
    /// Optimal direct coupling energy of a composite system.
    OptimizeCoupling(Args),
    /// tau and tau_hat over the epsilon list and coupling gains, as CSV.
    Sweep(Args),
}

impl Command {
    fn split(self) -> (CommandKind, Args) {
        match self {
            Command::Validate(a) => (CommandKind::Validate, a),
            Command::Simulate(a) => (CommandKind::Simulate, a),
            Command::Tau(a) => (CommandKind::Tau, a),
            Command::OptimizeEnergy(a) => (CommandKind::OptimizeEnergy, a),
            Command::OptimizeCoupling(a) => (CommandKind::OptimizeCoupling, a),
            Command::Sweep(a) => (CommandKind::Sweep, a),
        }
    }
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct Args {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Fidelity levels, comma separated; replaces `analysis.eps`.
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub settle: Option<f64>,
    #[arg(long)]
    pub margin: Option<f64>,
    /// Energy of subsystem 1, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub e1: Option<Vec<f64>>,
    /// Energy of subsystem 2, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub e2: Option<Vec<f64>>,
    /// Output file; replaces `output.path`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the effective configuration and exit.
    #[arg(long)]
    pub dump_config: bool,
}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Domain(Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Domain(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Folds the command-line overrides into the configuration.
pub fn apply_overrides(mut cfg: RunConfig, args: &Args) -> std::result::Result<RunConfig, ConfigError> {
    if let Some(eps) = &args.eps {
        cfg.analysis.eps = eps.clone();
    }
    let tau = &mut cfg.analysis.tau;
    if args.step.is_some() {
        tau.step = args.step;
    }
    if args.tol.is_some() {
        tau.tol = args.tol;
    }
    if let Some(h) = args.horizon {
        tau.horizon = h;
    }
    if let Some(s) = args.settle {
        tau.settle = s;
    }
    if let Some(m) = args.margin {
        tau.margin = m;
    }
    if args.e1.is_some() || args.e2.is_some() {
        let (mut e1, mut e2, e12) = match &cfg.energy {
            Some(EnergySpec::Blocks { e1, e2, e12 }) => (e1.clone(), e2.clone(), e12.clone()),
            _ => {
                let p = cfg.build()?;
                let c = p
                    .composite
                    .ok_or_else(|| ConfigError { field: "--e1/--e2".into(), message: "only apply to composite systems".into() })?;
                let (e1, e2, e12) = c.energy_blocks();
                (e1.as_slice().to_vec(), e2.as_slice().to_vec(), Some(e12.as_slice().to_vec()))
            }
        };
        if let Some(v) = &args.e1 {
            e1 = v.clone();
        }
        if let Some(v) = &args.e2 {
            e2 = v.clone();
        }
        cfg.energy = Some(EnergySpec::Blocks { e1, e2, e12 });
    }
    if let Some(out) = &args.out {
        cfg.output.path = Some(out.clone());
    }
    Ok(cfg)
}

/// Runs one command and returns the rendered artifact.
pub fn run_command(cfg: &RunConfig, command: CommandKind) -> CliResult<String> {
    let problem = cfg.build()?;
    let json = cfg.output.format == OutputFormat::Json;
    match command {
        CommandKind::Validate => validate(&problem, json),
        CommandKind::Simulate => simulate_csv(&problem),
        CommandKind::Tau => tau(cfg, &problem, json),
        CommandKind::OptimizeEnergy => optimize_energy_cmd(cfg, &problem, json),
        CommandKind::OptimizeCoupling => optimize_coupling(&problem, json),
        CommandKind::Sweep => sweep(cfg, &problem),
    }
}

fn num(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

fn list(v: &RVec) -> Vec<f64> {
    v.iter().copied().collect()
}

fn validate(p: &Problem, json: bool) -> CliResult<String> {
    let sc = p.sys.sc();
    let structure = validate_structure(sc, REPAIR_TOLERANCE);
    let algebra = match (&p.composite, &p.rep) {
        (Some(c), _) => Some(check_algebra(c.representation(), sc, COMPOSITE_TOLERANCE)?),
        (None, Some(rep)) => Some(check_algebra(rep, sc, COMPOSITE_TOLERANCE)?),
        (None, None) => None,
    };
    let coeffs = coefficients(&p.sys);
    let abscissa = spectral_abscissa(&coeffs.a);
    let min_pi = min_eig_hermitian(p.init.pi());
    let ok = structure.passed() && algebra.as_ref().is_none_or(|a| a.passed());
    let out = if json {
        json!({
            "n": p.sys.n(),
            "m": p.sys.m(),
            "structure_ok": structure.passed(),
            "algebra_ok": algebra.as_ref().map(|a| a.algebra_ok()),
            "ccr_ok": algebra.as_ref().map(|a| a.ccr_ok()),
            "algebra_residual": algebra.as_ref().map(|a| a.algebra_residual),
            "ccr_residual": algebra.as_ref().map(|a| a.ccr_residual),
            "min_eigenvalue_pi": min_pi,
            "weighting_rank": p.weights.rank(),
            "spectral_abscissa": abscissa,
            "hurwitz": is_hurwitz(&coeffs.a),
        })
        .to_string()
            + "\n"
    } else {
        let mut s = String::new();
        let _ = writeln!(s, "n = {}, m = {}", p.sys.n(), p.sys.m());
        let _ = writeln!(s, "{structure}");
        match &algebra {
            Some(a) => {
                let _ = writeln!(s, "{a}");
            }
            None => {
                let _ = writeln!(s, "no representation given; algebra and CCR not checked");
            }
        }
        let _ = writeln!(s, "initial second moment: min eigenvalue {min_pi:.6e}");
        let _ = writeln!(s, "weighting rank {}", p.weights.rank());
        let _ = writeln!(
            s,
            "drift spectral abscissa {abscissa:.6e} ({})",
            if is_hurwitz(&coeffs.a) { "Hurwitz" } else { "not Hurwitz" }
        );
        s
    };
    if !ok {
        return Err(CliError::Domain(Error::InvalidStructure(format!("validation failed:\n{out}"))));
    }
    Ok(out)
}

/// CSV with columns `t, mu_1..mu_n, Delta, ReV_11..ReV_nn`.
pub fn simulate_csv(p: &Problem) -> CliResult<String> {
    let traj = simulate(&p.sys, &p.init, &p.weights, &p.grid)?;
    let n = p.sys.n();
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("mu_{i}")));
    header.push("Delta".into());
    header.extend((1..=n).map(|i| format!("ReV_{i}{i}")));
    let mut s = header.join(",");
    s.push('\n');
    for (k, &t) in traj.grid.times().iter().enumerate() {
        let mut row = vec![num(t)];
        row.extend(traj.mu[k].iter().map(|x| num(*x)));
        row.push(num(traj.delta[k]));
        row.extend((0..n).map(|i| num(traj.v[k][(i, i)].re)));
        s.push_str(&row.join(","));
        s.push('\n');
    }
    Ok(s)
}

fn tau_json(t: &DecoherenceTime) -> serde_json::Value {
    match t.value {
        TauValue::Finite { value, bracket } => json!({"value": value, "bracket": [bracket.0, bracket.1], "sup_delta": t.sup_delta}),
        TauValue::Infinite => json!({"value": "inf", "sup_delta": t.sup_delta}),
    }
}

fn tau(cfg: &RunConfig, p: &Problem, json: bool) -> CliResult<String> {
    let expansion = tau_expansion(&p.sys, &p.init, &p.weights);
    let mut rows = Vec::new();
    for &eps in &cfg.analysis.eps {
        let t = decoherence_time(&p.sys, &p.init, &p.weights, eps, &cfg.analysis.tau)?;
        rows.push((eps, expansion.as_ref().ok().map(|e| tau_hat(e, eps)), t));
    }
    let out = if json {
        let exp = expansion.as_ref().ok();
        json!({
            "expansion": exp,
            "expansion_error": expansion.as_ref().err().map(|e| e.to_string()),
            "results": rows.iter().map(|(eps, th, t)| json!({"epsilon": eps, "tau_hat": th, "tau": tau_json(t)})).collect::<Vec<_>>(),
        })
        .to_string()
            + "\n"
    } else {
        let mut s = String::new();
        match &expansion {
            Ok(e) => {
                let _ = writeln!(s, "Delta_dot0 = {}", num(e.delta_dot0));
                let _ = writeln!(s, "Delta_ddot0 = {}", num(e.delta_ddot0));
                let _ = writeln!(s, "tau_prime0 = {}", num(e.tau_prime0));
                let _ = writeln!(s, "tau_second0 = {}", num(e.tau_second0));
                let _ = writeln!(s, "reference = {}", num(e.ref_norm));
            }
            Err(e) => {
                let _ = writeln!(s, "expansion unavailable: {e}");
            }
        }
        for (eps, th, t) in &rows {
            let _ = writeln!(s, "epsilon = {eps}");
            if let Some(th) = th {
                let _ = writeln!(s, "  tau_hat = {}", num(*th));
            }
            let _ = writeln!(s, "  {t}");
        }
        s
    };
    match expansion {
        // The crossing times are still reported before failing.
        Err(e) => {
            eprint!("{out}");
            Err(CliError::Domain(e))
        }
        Ok(_) => Ok(out),
    }
}

fn optimize_energy_cmd(cfg: &RunConfig, p: &Problem, json: bool) -> CliResult<String> {
    let opt = optimize_energy(&p.sys, &p.init, &p.weights)?;
    let grad = gradient_check(&p.sys, &p.init, &p.weights, &opt.e_star)?;
    let report = match (p.comparisons.is_empty(), cfg.analysis.eps.first()) {
        (false, Some(&eps)) => Some(suboptimal_tau_report(&p.sys, &p.init, &p.weights, eps, &p.comparisons, &cfg.analysis.tau)?),
        _ => None,
    };
    if json {
        let r: Vec<Vec<f64>> = opt.r.row_iter().map(|row| row.iter().copied().collect()).collect();
        let comparisons = report.as_ref().map(|rep| {
            rep.rows
                .iter()
                .map(|row| {
                    json!({
                        "label": row.label,
                        "energy": list(&row.energy),
                        "delta_ddot0": row.delta_ddot0,
                        "tau_hat": row.tau_hat,
                        "tau": row.tau.as_ref().map(tau_json),
                    })
                })
                .collect::<Vec<_>>()
        });
        return Ok(json!({
            "R": r,
            "K": list(&opt.k),
            "E_star": list(&opt.e_star),
            "null_dim": opt.null_dim,
            "residual": opt.residual,
            "zero_energy_optimal": opt.zero_energy_optimal,
            "gradient_at_E_star": list(&grad.analytic),
            "gradient_relative_error": grad.relative_error,
            "epsilon": report.as_ref().map(|r| r.epsilon),
            "comparisons": comparisons,
            "tau_hat_maximal": report.as_ref().map(|r| r.tau_hat_maximal),
        })
        .to_string()
            + "\n");
    }
    let mut s = match &report {
        Some(rep) => format!("{rep}\n"),
        None => format!("{opt}\n"),
    };
    let _ = writeln!(s, "gradient check at E_star: relative error {:.3e}", grad.relative_error);
    Ok(s)
}

fn optimize_coupling(p: &Problem, json: bool) -> CliResult<String> {
    let c = p.composite.as_ref().ok_or_else(|| {
        CliError::Config(ConfigError {
            field: "system".into(),
            message: "optimize-coupling needs a composite system".into(),
        })
    })?;
    let blocks = partition_rk(c, &p.init, &p.weights)?;
    let (e1, e2, _) = c.energy_blocks();
    let opt = optimal_direct_coupling(&blocks, &e1, &e2, default_tolerance(&blocks.r12))?;
    if json {
        return Ok(json!({
            "Q": list(&opt.q),
            "E12_star": list(&opt.e12_star),
            "null_dim": opt.null_dim,
            "residual": opt.residual,
        })
        .to_string()
            + "\n");
    }
    Ok(format!("{opt}\n"))
}

fn status(e: &Error) -> &'static str {
    match e {
        Error::Inconclusive { .. } => "inconclusive",
        Error::NoInitialNoise { .. } => "no_initial_noise",
        Error::TrivialWeighting { .. } => "trivial_weighting",
        Error::NotHurwitz { .. } => "not_hurwitz",
        _ => "error",
    }
}

/// Number of sweep workers: `QMEMTIME_THREADS` when set, else all cores.
pub fn sweep_threads() -> std::result::Result<Option<usize>, ConfigError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(Some(k)),
            _ => Err(ConfigError {
                field: THREADS_ENV.into(),
                message: format!("expected a positive integer, got {v:?}"),
            }),
        },
    }
}

/// CSV with columns `gain, epsilon, tau, tau_lo, tau_hi, tau_hat, status`,
/// ordered by gain and then epsilon.
fn sweep(cfg: &RunConfig, p: &Problem) -> CliResult<String> {
    let gains = if cfg.analysis.gains.is_empty() {
        vec![1.0]
    } else {
        cfg.analysis.gains.clone()
    };
    let points: Vec<(f64, f64)> = gains
        .iter()
        .flat_map(|&g| cfg.analysis.eps.iter().map(move |&e| (g, e)))
        .collect();
    let run_point = |&(g, eps): &(f64, f64)| -> crate::Result<String> {
        let sys = p.sys.with_coupling(p.sys.coupling_gain() * g, p.sys.coupling_offset().clone())?;
        let (th, th_status) = match tau_expansion(&sys, &p.init, &p.weights) {
            Ok(e) => (num(tau_hat(&e, eps)), None),
            Err(e) => (String::new(), Some(status(&e))),
        };
        let (tau, lo, hi, t_status) = match decoherence_time(&sys, &p.init, &p.weights, eps, &cfg.analysis.tau) {
            Ok(t) => match t.value {
                TauValue::Finite { value, bracket } => (num(value), num(bracket.0), num(bracket.1), None),
                TauValue::Infinite => ("inf".into(), String::new(), String::new(), None),
            },
            Err(e) => (String::new(), String::new(), String::new(), Some(status(&e))),
        };
        let st = t_status.or(th_status).unwrap_or("ok");
        Ok(format!("{},{},{tau},{lo},{hi},{th},{st}", num(g), num(eps)))
    };
    let threads = sweep_threads()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = threads {
        builder = builder.num_threads(k);
    }
    let pool = builder.build().map_err(|e| CliError::Io(e.to_string()))?;
    let rows: Vec<crate::Result<String>> = pool.install(|| points.par_iter().map(run_point).collect());
    let mut s = String::from("gain,epsilon,tau,tau_lo,tau_hi,tau_hat,status\n");
    for r in rows {
        s.push_str(&r?);
        s.push('\n');
    }
    Ok(s)
}

/// Entry point of the binary; returns the exit status.
pub fn main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (kind, args) = cli.command.split();
    match execute(kind, &args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(kind: CommandKind, args: &Args) -> CliResult<()> {
    let cfg = apply_overrides(RunConfig::load(&args.config)?, args)?;
    if args.dump_config {
        println!("{}", cfg.to_json());
        return Ok(());
    }
    let out = run_command(&cfg, kind)?;
    match &cfg.output.path {
        Some(path) => std::fs::write(path, out).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{out}");
            Ok(())
        }
    }
}
