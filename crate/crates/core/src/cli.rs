//! Command-line front end. The binary is a thin wrapper around [`run`].
//!
//! Exit codes: 0 success, 1 failed check or non-convergence, 2 usage error.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{OracleError, Result};
use crate::exec::{trial_rng, Execution};
use crate::fw::{fw_solve, EpsilonSchedule, FwProblem};
use crate::reduction::{
    approx_lmo, approx_lmo_with_lambda, certificate_tolerance, default_tol_exact,
    lambda_star_search, DEFAULT_MAX_DOUBLINGS,
};
use crate::sets::spec::{parse_set_spec, parse_vector};
use crate::sets::{ConvexSetOracle, SetDescriptor};
use crate::suite::{self, random_direction, SetSource, SuiteConfig};
use crate::vector::Vector;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "projlmo",
    about = "Projection-based linear minimization oracles",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the seeded randomized property suites.
    Verify(VerifyArgs),
    /// Tabulate gap and bound of proj(-lambda x) over a lambda grid (CSV).
    Sweep(SweepArgs),
    /// Search for a finite lambda giving an exact LMO point on a polyhedral set.
    Lambdastar(LambdaStarArgs),
    /// Frank-Wolfe on 1/2 ||z - target||^2 with the approximate oracle (CSV trace).
    Fw(FwArgs),
    /// Informational timings of projection, exact LMO and approximate LMO.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Set spec (`kind key=val ...`, JSON, or @file). Random catalog sets when omitted.
    #[arg(long)]
    pub set: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// Run trials on one thread.
    #[arg(long)]
    pub sequential: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub set: String,
    /// Direction x as comma-separated reals.
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    /// `a:b:steps`, log-spaced from a to b inclusive.
    #[arg(long, default_value = "1:1e6:7")]
    pub lambda_grid: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct LambdaStarArgs {
    #[arg(long)]
    pub set: String,
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, default_value_t = 1.0)]
    pub lambda0: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_DOUBLINGS)]
    pub max_doublings: u32,
    /// Exactness tolerance; defaults to 1e-9 (1 + ||x||) (1 + bound).
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScheduleKind {
    Exact,
    Constant,
    Harmonic,
}

#[derive(Debug, Args)]
pub struct FwArgs {
    #[arg(long)]
    pub set: String,
    #[arg(long, allow_hyphen_values = true)]
    pub target: String,
    #[arg(long, value_enum, default_value_t = ScheduleKind::Harmonic)]
    pub schedule: ScheduleKind,
    /// Schedule constant c: eps_k = c / (k + 2) (harmonic) or c (constant).
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub stop_gap: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Set spec; a representative catalog when omitted.
    #[arg(long)]
    pub set: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
}

/// Captured result of one command.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CommandOutput {
    pub stdout: String,
    pub stderr: String,
    pub exit_code: i32,
}

impl CommandOutput {
    fn usage(message: impl Into<String>) -> Self {
        CommandOutput {
            stderr: message.into(),
            exit_code: EXIT_USAGE,
            ..Default::default()
        }
    }
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::CertificateViolation(_) => Failure::Runtime(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type CmdResult = std::result::Result<CommandOutput, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> CommandOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli.command),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                CommandOutput {
                    stdout: text,
                    ..Default::default()
                }
            } else {
                CommandOutput::usage(text)
            }
        }
    }
}

pub fn execute(command: &Command) -> CommandOutput {
    let result = match command {
        Command::Verify(args) => cmd_verify(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Lambdastar(args) => cmd_lambdastar(args),
        Command::Fw(args) => cmd_fw(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(out) => out,
        Err(Failure::Usage(msg)) => CommandOutput::usage(format!("error: {msg}\n")),
        Err(Failure::Runtime(msg)) => CommandOutput {
            stderr: format!("error: {msg}\n"),
            exit_code: EXIT_CHECK_FAILED,
            ..Default::default()
        },
    }
}

/// Reads `@path` specs from disk, otherwise parses inline.
pub fn load_set(spec: &str) -> Result<SetDescriptor> {
    match spec.strip_prefix('@') {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| OracleError::Parse(format!("cannot read {path}: {e}")))?;
            parse_set_spec(&text)
        }
        None => parse_set_spec(spec),
    }
}

/// Parses `a:b:steps` into `steps` log-spaced values from `a` to `b`.
pub fn parse_lambda_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || OracleError::Parse(format!("lambda grid '{text}' must be a:b:steps"));
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, steps] = parts.as_slice() else {
        return Err(bad());
    };
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    let steps: usize = steps.trim().parse().map_err(|_| bad())?;
    if !(a > 0.0 && b >= a && a.is_finite() && b.is_finite()) || steps == 0 {
        return Err(OracleError::InvalidParameter(format!(
            "lambda grid needs 0 < a <= b and steps >= 1, got '{text}'"
        )));
    }
    if steps == 1 {
        return Ok(vec![a]);
    }
    let (la, lb) = (a.log10(), b.log10());
    Ok((0..steps)
        .map(|i| 10f64.powf(la + (lb - la) * i as f64 / (steps - 1) as f64))
        .collect())
}

fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_point(p: &Vector) -> String {
    p.iter()
        .map(|v| fmt_float(*v))
        .collect::<Vec<_>>()
        .join(";")
}

/// Sends CSV to `--out` when given, else to stdout.
fn emit_csv(
    output: &OutputArgs,
    csv: String,
    out: &mut CommandOutput,
) -> std::result::Result<(), Failure> {
    match &output.out {
        Some(path) => std::fs::write(path, csv)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            out.stdout.push_str(&csv);
            Ok(())
        }
    }
}

fn cmd_verify(args: &VerifyArgs) -> CmdResult {
    let source = match &args.set {
        Some(spec) => SetSource::Fixed(load_set(spec)?),
        None => SetSource::AnyKind,
    };
    let config = SuiteConfig {
        seed: args.seed,
        trials: args.trials,
        execution: if args.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        },
    };
    suite::validate_config(&config)?;
    let reports = suite::run_all(&source, &config);

    let mut text = String::new();
    match &source {
        SetSource::Fixed(set) => writeln!(text, "set: {set}").unwrap(),
        _ => writeln!(text, "set: random catalog").unwrap(),
    }
    writeln!(text, "seed: {} trials: {}", args.seed, args.trials).unwrap();
    for report in &reports {
        writeln!(text, "{report}").unwrap();
    }
    let ok = reports.iter().all(|r| r.all_passed());
    writeln!(text, "result: {}", if ok { "PASS" } else { "FAIL" }).unwrap();

    let mut out = CommandOutput {
        exit_code: if ok { EXIT_OK } else { EXIT_CHECK_FAILED },
        ..Default::default()
    };
    emit_csv(&args.output, text, &mut out)?;
    Ok(out)
}

/// One row of a gap-versus-lambda sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub gap: f64,
    pub bound: f64,
    pub eps_from_lambda: f64,
}

/// Gap and bound of `proj_C(-lambda x)` for each `lambda`.
pub fn sweep_rows(set: &SetDescriptor, x: &Vector, grid: &[f64]) -> Result<Vec<SweepRow>> {
    grid.iter()
        .map(|&lambda| {
            let r = approx_lmo_with_lambda(set, x, lambda)?;
            Ok(SweepRow {
                lambda,
                gap: r.certificate.gap.ok_or(OracleError::LmoUnavailable)?,
                bound: r.certificate.bound.unwrap_or(f64::INFINITY),
                eps_from_lambda: r.epsilon,
            })
        })
        .collect()
}

fn cmd_sweep(args: &SweepArgs) -> CmdResult {
    let set = load_set(&args.set)?;
    let x = parse_vector(&args.x)?;
    x.expect_dim(set.dim())?;
    let grid = parse_lambda_grid(&args.lambda_grid)?;
    let rows = sweep_rows(&set, &x, &grid)?;

    let tol = certificate_tolerance(x.norm(), set.constants().norm_bound);
    let mut csv = String::from("lambda,gap,gap_bound,eps_from_lambda\n");
    let mut violations = 0;
    for row in &rows {
        if row.gap > row.bound + tol {
            violations += 1;
        }
        writeln!(
            csv,
            "{},{},{},{}",
            fmt_float(row.lambda),
            fmt_float(row.gap),
            fmt_float(row.bound),
            fmt_float(row.eps_from_lambda)
        )
        .unwrap();
    }
    let monotone = rows.windows(2).all(|w| w[1].gap <= w[0].gap);

    let mut out = CommandOutput::default();
    writeln!(
        out.stderr,
        "rows: {} bound_violations: {violations} gap_nonincreasing: {monotone}",
        rows.len()
    )
    .unwrap();
    out.exit_code = if violations == 0 {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    };
    emit_csv(&args.output, csv, &mut out)?;
    Ok(out)
}

fn cmd_lambdastar(args: &LambdaStarArgs) -> CmdResult {
    let set = load_set(&args.set)?;
    let x = parse_vector(&args.x)?;
    x.expect_dim(set.dim())?;
    let polytope = set.to_polytope()?;
    let tol = args
        .tol
        .unwrap_or_else(|| default_tol_exact(&x, &set.constants()));
    let r = lambda_star_search(&polytope, &x, tol, args.lambda0, args.max_doublings)?;

    let mut csv = String::from(
        "lambda_star,exactness_gap,min_norm_match,min_norm_distance,search_iterations,converged,point\n",
    );
    writeln!(
        csv,
        "{},{},{},{},{},{},{}",
        fmt_float(r.lambda_star),
        fmt_float(r.exactness_gap),
        r.min_norm_match,
        fmt_float(r.min_norm_distance),
        r.search_iterations,
        r.converged,
        fmt_point(&r.point)
    )
    .unwrap();

    let mut out = CommandOutput::default();
    if !r.converged {
        writeln!(
            out.stderr,
            "not yet exact after {} doublings (best lambda {}, gap {:e})",
            r.search_iterations, r.lambda_star, r.exactness_gap
        )
        .unwrap();
        out.exit_code = EXIT_CHECK_FAILED;
    } else if !r.min_norm_match {
        writeln!(
            out.stderr,
            "exact at lambda {} but {:e} away from the minimum-norm face point",
            r.lambda_star, r.min_norm_distance
        )
        .unwrap();
        out.exit_code = EXIT_CHECK_FAILED;
    } else {
        writeln!(out.stderr, "exact at lambda {}", r.lambda_star).unwrap();
    }
    emit_csv(&args.output, csv, &mut out)?;
    Ok(out)
}

fn cmd_fw(args: &FwArgs) -> CmdResult {
    let set = load_set(&args.set)?;
    let target = parse_vector(&args.target)?;
    let schedule = match args.schedule {
        ScheduleKind::Exact => EpsilonSchedule::Exact,
        ScheduleKind::Constant => EpsilonSchedule::Constant(args.eps),
        ScheduleKind::Harmonic => EpsilonSchedule::Harmonic(args.eps),
    };
    let problem = FwProblem::new(set, target, schedule)?;
    let result = fw_solve(&problem, args.max_iter, args.stop_gap)?;
    let reference = problem.set.project(&problem.target)?;

    let mut csv = String::from("k,objective,fw_gap,epsilon\n");
    for it in &result.trace.iterates {
        writeln!(
            csv,
            "{},{},{},{}",
            it.k,
            fmt_float(it.objective),
            fmt_float(it.fw_gap),
            fmt_float(it.epsilon)
        )
        .unwrap();
    }
    let mut out = CommandOutput::default();
    writeln!(
        out.stderr,
        "solution: {}\ndistance_to_projection: {:e}\niterations: {}\nconverged: {}",
        result.solution,
        result.solution.distance(&reference),
        result.trace.iterates.len(),
        result.converged
    )
    .unwrap();
    out.exit_code = if result.converged {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    };
    emit_csv(&args.output, csv, &mut out)?;
    Ok(out)
}

fn bench_catalog() -> Vec<SetDescriptor> {
    let specs = [
        "box l=-1,-2,-3,-1,0,-2,-1,-1 u=1,2,0,1,3,2,1,1",
        "ball2 c=2,2,0,0,1,-1,0,3 r=1.5",
        "ball1 n=8 r=2",
        "ballinf n=8 r=1",
        "simplex n=8",
        "polytope v=0,0,0;1,0,0;0,1,0;0,0,1;1,1,1;-1,0.5,0.2",
        "singleton p=1,2,3,4",
    ];
    specs
        .iter()
        .map(|s| parse_set_spec(s).expect("catalog specs are valid"))
        .collect()
}

struct Timing {
    median: Duration,
    worst: Duration,
}

fn time_each(inputs: &[Vector], mut f: impl FnMut(&Vector) -> Result<Vector>) -> Result<Timing> {
    let mut samples = Vec::with_capacity(inputs.len());
    for x in inputs {
        let start = Instant::now();
        std::hint::black_box(f(std::hint::black_box(x))?);
        samples.push(start.elapsed());
    }
    samples.sort_unstable();
    Ok(Timing {
        median: samples[samples.len() / 2],
        worst: *samples.last().unwrap(),
    })
}

fn cmd_bench(args: &BenchArgs) -> CmdResult {
    if args.trials == 0 {
        return Err(Failure::Usage("trials must be at least 1".into()));
    }
    let sets = match &args.set {
        Some(spec) => vec![load_set(spec)?],
        None => bench_catalog(),
    };
    let mut out = CommandOutput::default();
    writeln!(
        out.stdout,
        "{:<10} {:>4} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>8}",
        "set",
        "dim",
        "proj_med_ns",
        "proj_max_ns",
        "lmo_med_ns",
        "lmo_max_ns",
        "alm_med_ns",
        "alm_max_ns",
        "alm/proj"
    )
    .unwrap();
    for set in &sets {
        let inputs: Vec<Vector> = (0..args.trials)
            .map(|t| random_direction(&mut trial_rng(args.seed, 0xbe4c, t), set.dim()))
            .collect();
        let proj = time_each(&inputs, |x| set.project(x))?;
        let lmo = time_each(&inputs, |x| set.lmo_exact(x))?;
        let alm = time_each(&inputs, |x| Ok(approx_lmo(set, x, args.eps)?.point))?;
        let ratio = alm.median.as_secs_f64() / proj.median.as_secs_f64().max(1e-12);
        writeln!(
            out.stdout,
            "{:<10} {:>4} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>8.2}",
            set.kind(),
            set.dim(),
            proj.median.as_nanos(),
            proj.worst.as_nanos(),
            lmo.median.as_nanos(),
            lmo.worst.as_nanos(),
            alm.median.as_nanos(),
            alm.worst.as_nanos(),
            ratio
        )
        .unwrap();
    }
    writeln!(
        out.stdout,
        "alm = projection-based approximate LMO at eps = {}; timings are informational only",
        args.eps
    )
    .unwrap();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_grid() {
        assert_eq!(
            parse_lambda_grid("1:1e6:7").unwrap(),
            vec![1.0, 10.0, 100.0, 1e3, 1e4, 1e5, 1e6]
        );
        assert_eq!(parse_lambda_grid("3:5:1").unwrap(), vec![3.0]);
        assert!(parse_lambda_grid("0:1:3").is_err());
        assert!(parse_lambda_grid("2:1:3").is_err());
        assert!(parse_lambda_grid("1:2:0").is_err());
        assert!(parse_lambda_grid("1:2").is_err());
    }

    #[test]
    fn set_from_file() {
        let dir = std::env::temp_dir().join(format!("projlmo-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("set.txt");
        std::fs::write(&path, "ball2 c=0,0 r=1\n").unwrap();
        let set = load_set(&format!("@{}", path.display())).unwrap();
        assert_eq!(set.kind(), "ball2");
        assert!(load_set("@/nonexistent/set.txt").is_err());
    }
}
