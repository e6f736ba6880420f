//! Command-line front end: config handling, the four subcommands and all
//! file output.
//!
//! ```text
//! defect-control <solve|solve-constrained|continuation|check>
//!     [--config <path>] [--out <dir>] [--<key> <value>]...
//! ```
//!
//! Exit codes: 0 success, 1 invalid input, 2 iteration limit (or stalled
//! descent), 3 existence hypothesis not met.

mod config;
mod summary;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use log::info;

pub use config::{normalize_key, RunConfig, SolverKind, KEYS};
pub use summary::Summary;

use crate::barrier::{run_barrier_with, write_outer_log};
use crate::descent::run_descent_with;
use crate::error::{Error, Result};
use crate::model::{check_existence_hypothesis, check_monotone, find_existence_witness, kkt_residual};
use crate::report::RunStatus;
use crate::study::run_continuation;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_ITERATION_LIMIT: i32 = 2;
pub const EXIT_HYPOTHESIS: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    SolveConstrained,
    Continuation,
    Check,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::SolveConstrained => "solve-constrained",
            Command::Continuation => "continuation",
            Command::Check => "check",
        }
    }
}

/// Result of a command: what was written to `summary.txt` and the exit code.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub summary: Summary,
    pub exit_code: i32,
}

fn status_code(status: RunStatus) -> i32 {
    match status {
        RunStatus::Converged => EXIT_OK,
        RunStatus::IterationLimit | RunStatus::Stalled => EXIT_ITERATION_LIMIT,
    }
}

/// Exit code for a failed command.
pub fn error_code(err: &Error) -> i32 {
    match err {
        Error::IterationLimit { .. } => EXIT_ITERATION_LIMIT,
        _ => EXIT_INVALID,
    }
}

fn prepare_out(cfg: &RunConfig) -> Result<&Path> {
    std::fs::create_dir_all(&cfg.out)?;
    Ok(&cfg.out)
}

/// The existence hypothesis only backs the theory; a failure is logged and
/// the run goes ahead.
fn warn_without_witness(cfg: &RunConfig) {
    if find_existence_witness(&cfg.phi, cfg.check_range(), cfg.check_samples).is_none() {
        log::warn!(
            "no affine witness found for phi = {}; optimal pairs may not exist",
            cfg.phi
        );
    }
}

fn cmd_solve(cfg: &RunConfig) -> Result<Outcome> {
    let spec = cfg.problem()?;
    warn_without_witness(cfg);
    if spec.is_constrained() {
        return Err(Error::Config {
            key: "lower".into(),
            message: "`solve` handles unconstrained problems; use `solve-constrained` with bounds".into(),
        });
    }
    let k = cfg.stiffness()?;
    let init = cfg.initial_pair()?;
    let out_dir = prepare_out(cfg)?;
    let start = Instant::now();
    let out = run_descent_with(&spec, &cfg.descent_options(), init, &k)?;
    info!("solve finished in {:.2?}", start.elapsed());
    let st = &out.state;
    st.u.save_csv(out_dir.join("u.csv"))?;
    st.v.save_csv(out_dir.join("v.csv"))?;
    st.w.save_csv(out_dir.join("w.csv"))?;
    out.report.save_csv(out_dir.join("log.csv"))?;
    let kkt = kkt_residual(&st.u, &st.v, &st.w, &spec, &k)?;

    let mut s = Summary::new();
    s.push("command", "solve");
    s.push("status", out.report.status.as_str());
    s.push("iterations", st.iter);
    s.push_num("cost", st.cost);
    s.push_num("grad_norm", st.grad_norm_sq.sqrt());
    s.push_num("residual_h1", st.residual_h1);
    s.push_num("kkt_stationarity_u", kkt.stationarity_u);
    s.push_num("kkt_stationarity_v", kkt.stationarity_v);
    Ok(Outcome {
        exit_code: status_code(out.report.status),
        summary: s,
    })
}

fn cmd_solve_constrained(cfg: &RunConfig) -> Result<Outcome> {
    let spec = cfg.problem()?;
    if !spec.is_constrained() {
        return Err(Error::Config {
            key: "lower".into(),
            message: "`solve-constrained` needs control bounds `lower` and `upper`".into(),
        });
    }
    let k = cfg.stiffness()?;
    let out_dir = prepare_out(cfg)?;
    let start = Instant::now();
    let out = run_barrier_with(&spec, &cfg.barrier_options(), &k, |r| {
        if r.outer_iter % 100 == 0 {
            info!(
                "outer {}: cost {:.6}, certificates {:.2e}, violation {:.2e}",
                r.outer_iter,
                r.cost,
                r.max_certificate(),
                r.max_violation_u.max(r.max_violation_v)
            );
        }
    })?;
    info!("solve-constrained finished in {:.2?}", start.elapsed());
    let st = &out.state;
    st.u.save_csv(out_dir.join("u.csv"))?;
    st.v.save_csv(out_dir.join("v.csv"))?;
    st.w.save_csv(out_dir.join("w.csv"))?;
    out.multipliers.a.save_csv(out_dir.join("mult_a.csv"))?;
    out.multipliers.lower.save_csv(out_dir.join("mult_bm.csv"))?;
    out.multipliers.upper.save_csv(out_dir.join("mult_bp.csv"))?;
    out.certificates.write_fields(out_dir)?;
    let file = std::fs::File::create(out_dir.join("outer_log.csv"))?;
    write_outer_log(&out.log, std::io::BufWriter::new(file))?;

    let last = out.log.last();
    let mut s = Summary::new();
    s.push("command", "solve-constrained");
    s.push("status", out.status.as_str());
    s.push("outer_iterations", out.log.len());
    s.push("inner_iterations", out.total_inner_iters);
    s.push_num("cost", last.map_or(f64::NAN, |r| r.cost));
    s.push_num("residual_h1", st.residual_h1);
    s.push_num("max_u", st.u.max());
    s.push_num("min_v", st.v.min());
    s.push_num("max_v", st.v.max());
    s.push_num("cert_state", out.certificates.p_state());
    s.push_num("cert_lower", out.certificates.p_lower());
    s.push_num("cert_upper", out.certificates.p_upper());
    s.push_num("max_violation_u", last.map_or(f64::NAN, |r| r.max_violation_u));
    s.push_num("max_violation_v", last.map_or(f64::NAN, |r| r.max_violation_v));
    Ok(Outcome {
        exit_code: status_code(out.status),
        summary: s,
    })
}

fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

fn cmd_continuation(cfg: &RunConfig) -> Result<Outcome> {
    let spec = cfg.problem()?;
    warn_without_witness(cfg);
    let out_dir = prepare_out(cfg)?;
    let start = Instant::now();
    let result = run_continuation(&spec, &cfg.lambda_sweep, &cfg.descent_options())?;
    info!("continuation finished in {:.2?}", start.elapsed());
    result.save_csv(out_dir.join("continuation.csv"))?;

    let mut exit_code = EXIT_OK;
    for e in &result.entries {
        let code = match &e.result {
            Ok(sol) => status_code(sol.status()),
            Err(err) => error_code(err),
        };
        exit_code = exit_code.max(code);
    }
    let sols: Vec<_> = result.solutions().collect();
    let residuals: Vec<f64> = sols.iter().map(|(_, s)| s.residual_h1).collect();
    let weighted: Vec<f64> = sols.iter().map(|(_, s)| s.weighted_residual).collect();

    let mut s = Summary::new();
    s.push("command", "continuation");
    s.push(
        "status",
        if result.all_converged() {
            "converged"
        } else {
            "incomplete"
        },
    );
    s.push("lambdas", result.entries.len());
    s.push("solved", sols.len());
    s.push("residual_h1_decreasing", strictly_decreasing(&residuals));
    s.push("weighted_residual_decreasing", strictly_decreasing(&weighted));
    if let Some((lambda, last)) = sols.last() {
        s.push_num("final_lambda", *lambda);
        s.push_num("final_residual_h1", last.residual_h1);
        s.push_num("final_weighted_residual", last.weighted_residual);
        s.push_num("final_exact_law_residual", last.exact_law_residual);
        if let (Some(d), Some(o)) = (last.dist_u_oracle, &result.oracle) {
            s.push_num("final_rel_dist_u_oracle", d / o.state.l2_norm());
        }
        if let (Some(d), Some(o)) = (last.dist_v_oracle, &result.oracle) {
            s.push_num("final_rel_dist_v_oracle", d / o.control.l2_norm());
        }
    }
    Ok(Outcome { summary: s, exit_code })
}

fn cmd_check(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let range = cfg.check_range();
    let witness = find_existence_witness(&cfg.phi, range, cfg.check_samples);
    let monotone = check_monotone(&cfg.phi, range, cfg.check_samples);

    let mut s = Summary::new();
    s.push("command", "check");
    s.push("phi", &cfg.phi);
    s.push("range", format!("[{}, {}]", range.lo, range.hi));
    match witness {
        Some((l, report)) => {
            s.push("existence", "holds");
            s.push("witness_slope", l.slope);
            s.push("witness_intercept", l.intercept);
            s.push_num("sampled_max", report.max_value);
        }
        None => {
            let plain = check_existence_hypothesis(&cfg.phi, 0.0, 0.0, range, cfg.check_samples);
            s.push("existence", "fails");
            s.push("bounded_at_infinity_for_zero_witness", plain.bounded_at_infinity);
        }
    }
    s.push("monotone", monotone);
    Ok(Outcome {
        exit_code: if witness.is_some() { EXIT_OK } else { EXIT_HYPOTHESIS },
        summary: s,
    })
}

/// Runs `command` on a validated config and writes `summary.txt` when the
/// output directory exists (`check` never creates it).
pub fn execute(command: Command, cfg: &RunConfig) -> Result<Outcome> {
    let outcome = match command {
        Command::Solve => cmd_solve(cfg)?,
        Command::SolveConstrained => cmd_solve_constrained(cfg)?,
        Command::Continuation => cmd_continuation(cfg)?,
        Command::Check => cmd_check(cfg)?,
    };
    if cfg.out.is_dir() {
        outcome.summary.save(&cfg.out.join("summary.txt"))?;
    }
    Ok(outcome)
}

#[derive(Debug, Parser)]
#[command(
    name = "defect-control",
    version,
    about = "Defect-regularized optimal control of elliptic equations"
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Unconstrained steepest descent.
    Solve(RunArgs),
    /// Exponential-barrier scheme for `u ≤ 0` and control bounds.
    SolveConstrained(RunArgs),
    /// λ sweep with warm starts and the classical reference.
    Continuation(RunArgs),
    /// Existence and monotonicity checks on `phi`.
    Check(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-key overrides: `--key value` or `--key=value`.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "--KEY VALUE")]
    overrides: Vec<String>,
}

/// Splits `--key value` / `--key=value` pairs.
pub fn parse_overrides(args: &[String]) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        let Some(flag) = arg.strip_prefix("--") else {
            return Err(Error::Config {
                key: arg.clone(),
                message: "expected `--key value`".into(),
            });
        };
        let (key, value) = match flag.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => {
                let value = it.next().ok_or_else(|| Error::Config {
                    key: flag.to_string(),
                    message: "missing value".into(),
                })?;
                (flag.to_string(), value.clone())
            }
        };
        pairs.push((normalize_key(&key), value));
    }
    Ok(pairs)
}

fn build_config(args: RunArgs) -> Result<RunConfig> {
    let mut pairs = parse_overrides(&args.overrides)?;
    let mut config_path = args.config;
    let mut out = args.out;
    pairs.retain(|(k, v)| match k.as_str() {
        "config" => {
            config_path = Some(v.into());
            false
        }
        "out" => {
            out = Some(v.into());
            false
        }
        _ => true,
    });
    let mut cfg = match &config_path {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    for (k, v) in &pairs {
        cfg.set(k, v, Path::new(""))?;
    }
    if let Some(out) = out {
        cfg.out = out;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Parses `args` (program name first), runs the command, prints the summary
/// and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let (command, args) = match cli.command {
        CliCommand::Solve(a) => (Command::Solve, a),
        CliCommand::SolveConstrained(a) => (Command::SolveConstrained, a),
        CliCommand::Continuation(a) => (Command::Continuation, a),
        CliCommand::Check(a) => (Command::Check, a),
    };
    let result = build_config(args).and_then(|cfg| execute(command, &cfg));
    match result {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            error_code(&e)
        }
    }
}
