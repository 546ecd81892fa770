//! Command-line front end: build measurement schemes, verify informational
//! completeness, reconstruct states from noiseless statistics, print bound
//! tables, run random-measurement experiments and emit the Roman-surface
//! point cloud.
//!
//! Exit codes: 0 success (Certified/SampledPass where applicable), 1 usage
//! or input error, 2 a verifier returned Refuted/SampledFail, 3 numerical
//! failure (non-convergence or inconsistent input data).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qic_core::bounds::{premise_bound_report, pure_bound_table};
use qic_core::matrix::DensityState;
use qic_core::opsys::{ExpectationVector, Scheme};
use qic_core::pure::{
    james_observables, real_projective_scheme, reconstruct_pure_state, roman_surface_points,
};
use qic_core::rankcon::rank_constrained_povm_with_report;
use qic_core::recon::{reconstruct_rank_r, ReconstructOptions};
use qic_core::verify::{
    complement_of_scheme, mane_experiment, pure_ic_rank_criterion, sampled_injectivity, IcReport,
    Premise, PremiseKind,
};
use qic_core::Error as CoreError;

#[derive(Parser)]
#[command(name = "qic", version, about = "Informationally complete measurement schemes under prior information", long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a measurement scheme for a premise
    Build(BuildArgs),
    /// Check informational completeness of a scheme file against a premise
    Verify(VerifyArgs),
    /// Reconstruct a state from noiseless statistics
    Reconstruct(ReconstructArgs),
    /// Print minimal-observable bound tables or single reports
    Bounds(BoundsArgs),
    /// Test random observables against a premise by pair sampling
    Mane(ManeArgs),
    /// Emit the Roman-surface point cloud as CSV
    Roman(RomanArgs),
}

#[derive(Args)]
struct BuildArgs {
    /// Premise: pure | realpure | rank:<r>
    #[arg(long)]
    premise: String,
    /// Hilbert-space dimension
    #[arg(long)]
    dim: usize,
    /// Scheme family for the pure premise
    #[arg(long, default_value = "james")]
    scheme: String,
    /// Random combinations used for the construction report's rank check
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Scheme JSON file ({"dim","effects"} or {"dim","observables"})
    #[arg(long)]
    scheme: PathBuf,
    /// Premise: pure | realpure | rank:<r> | grassmann:<r> | depol:<statefile>
    #[arg(long)]
    premise: String,
    /// Sampled pairs for premise experiments
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    /// Multistart budget for the pure-state rank search
    #[arg(long, default_value_t = 64)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ReconstructArgs {
    /// "james" (with --dim) or a scheme JSON file
    #[arg(long)]
    scheme: String,
    /// Statistics JSON file {"values": [...]}
    #[arg(long)]
    stats: PathBuf,
    /// Dimension, required with --scheme james
    #[arg(long)]
    dim: Option<usize>,
    /// Rank bound for POVM-based reconstruction
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 16)]
    starts: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Premise: pure | realpure | rank:<r> | grassmann:<r> | depol:<statefile>
    #[arg(long)]
    premise: String,
    /// Table up to this dimension (pure premise only)
    #[arg(long)]
    dmax: Option<usize>,
    /// Dimension for a single report
    #[arg(long)]
    dim: Option<usize>,
    /// Emit JSON instead of aligned text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ManeArgs {
    /// Premise: pure | realpure | rank:<r> | grassmann:<r> | depol:<statefile>
    #[arg(long)]
    premise: String,
    #[arg(long)]
    dim: usize,
    /// Number of random observables
    #[arg(short = 'm', long)]
    observables: usize,
    #[arg(long, default_value_t = 10_000)]
    pairs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct RomanArgs {
    /// Number of lattice points
    #[arg(long)]
    n: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap prints help/version through the error path with status 0
            if err.use_stderr() {
                eprint!("{err}");
                return ExitCode::from(1);
            }
            print!("{err}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

#[derive(Debug)]
enum CliError {
    Core(CoreError),
    Usage(String),
    Io(std::io::Error),
    Json(serde_json::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Json(e) => write!(f, "{e}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Json(e)
    }
}

fn exit_code_for(err: &CliError) -> u8 {
    match err {
        CliError::Core(CoreError::InconsistentExpectations { .. })
        | CliError::Core(CoreError::NoSingularCombination) => 3,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Build(args) => build(args),
        Command::Verify(args) => verify(args),
        Command::Reconstruct(args) => reconstruct(args),
        Command::Bounds(args) => bounds(args),
        Command::Mane(args) => mane(args),
        Command::Roman(args) => roman(args),
    }
}

fn parse_premise(spec: &str, dim: usize) -> Result<Premise, CliError> {
    let kind = if spec == "pure" {
        PremiseKind::Pure
    } else if spec == "realpure" {
        PremiseKind::RealPure
    } else if let Some(r) = spec.strip_prefix("rank:") {
        let r = r
            .parse()
            .map_err(|_| CliError::Usage(format!("bad rank in premise '{spec}'")))?;
        PremiseKind::BoundedRank(r)
    } else if let Some(r) = spec.strip_prefix("grassmann:") {
        let r = r
            .parse()
            .map_err(|_| CliError::Usage(format!("bad rank in premise '{spec}'")))?;
        PremiseKind::GrassmannProjections(r)
    } else if let Some(path) = spec.strip_prefix("depol:") {
        let sigma: DensityState = read_json(Path::new(path))?;
        PremiseKind::DepolarizedPure(sigma)
    } else {
        return Err(CliError::Usage(format!(
            "unknown premise '{spec}' (expected pure | realpure | rank:<r> | grassmann:<r> | depol:<file>)"
        )));
    };
    Ok(Premise::new(kind, dim)?)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn emit<T: serde::Serialize>(value: &T, out: Option<&PathBuf>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text)?,
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn build(args: BuildArgs) -> Result<u8, CliError> {
    match args.premise.as_str() {
        p if p.starts_with("rank:") => {
            let premise = parse_premise(p, args.dim)?;
            let PremiseKind::BoundedRank(r) = *premise.kind() else {
                unreachable!("rank: prefix parses to a bounded-rank premise");
            };
            let (povm, report) =
                rank_constrained_povm_with_report(args.dim, r, Some((args.samples, args.seed)))?;
            emit(&povm, args.out.as_ref())?;
            eprintln!("{}", serde_json::to_string_pretty(&report)?);
            Ok(0)
        }
        "pure" => {
            if args.scheme != "james" {
                return Err(CliError::Usage(format!(
                    "unknown pure-state scheme '{}'",
                    args.scheme
                )));
            }
            let scheme = james_observables(args.dim)?;
            emit(&scheme.observables(), args.out.as_ref())?;
            Ok(0)
        }
        "realpure" => {
            if args.dim != 3 {
                return Err(CliError::Usage(
                    "the real-amplitude scheme is defined for --dim 3".into(),
                ));
            }
            emit(&real_projective_scheme(), args.out.as_ref())?;
            Ok(0)
        }
        other => Err(CliError::Usage(format!(
            "build supports premises pure | realpure | rank:<r>, got '{other}'"
        ))),
    }
}

fn verify(args: VerifyArgs) -> Result<u8, CliError> {
    let scheme: Scheme = read_json(&args.scheme)?;
    let premise = parse_premise(&args.premise, scheme.dim())?;
    let report: IcReport = match premise.kind() {
        PremiseKind::Pure => {
            let complement = complement_of_scheme(&scheme);
            pure_ic_rank_criterion(&complement, args.budget, args.seed)?
        }
        _ => sampled_injectivity(&scheme, &premise, args.trials, args.seed)?,
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(if report.passes() { 0 } else { 2 })
}

fn reconstruct(args: ReconstructArgs) -> Result<u8, CliError> {
    let stats: ExpectationVector = read_json(&args.stats)?;
    if args.scheme == "james" {
        let dim = args
            .dim
            .ok_or_else(|| CliError::Usage("--scheme james requires --dim".into()))?;
        let state = reconstruct_pure_state(&stats, dim)?;
        emit(&state, args.out.as_ref())?;
        return Ok(0);
    }
    let scheme: Scheme = read_json(Path::new(&args.scheme))?;
    match scheme {
        Scheme::Povm(povm) => {
            let rank = args
                .rank
                .ok_or_else(|| CliError::Usage("POVM reconstruction requires --rank".into()))?;
            let opts = ReconstructOptions {
                max_starts: args.starts,
                seed: args.seed,
                ..Default::default()
            };
            let result = reconstruct_rank_r(&povm, &stats, rank, opts)?;
            let converged = result.converged;
            emit(&result, args.out.as_ref())?;
            Ok(if converged { 0 } else { 3 })
        }
        Scheme::Observables(obs) => {
            // only the anti-diagonal pure-state scheme has a reconstruction
            // algorithm; verify the file matches it
            let d = obs.dim();
            let james = james_observables(d)?.observables();
            let matches = obs.len() == james.len()
                && obs
                    .observables()
                    .iter()
                    .zip(james.observables())
                    .all(|(a, b)| (a.matrix() - b.matrix()).frob_norm() <= 1e-12);
            if !matches {
                return Err(CliError::Usage(
                    "observable-set reconstruction requires the james scheme layout; \
                     use --scheme james with --dim"
                        .into(),
                ));
            }
            let state = reconstruct_pure_state(&stats, d)?;
            emit(&state, args.out.as_ref())?;
            Ok(0)
        }
    }
}

fn bounds(args: BoundsArgs) -> Result<u8, CliError> {
    if let Some(dmax) = args.dmax {
        if args.premise != "pure" {
            return Err(CliError::Usage(
                "--dmax tables are available for the pure premise".into(),
            ));
        }
        let table = pure_bound_table(dmax)?;
        if args.json {
            println!("{}", serde_json::to_string_pretty(&table)?);
        } else {
            println!("{:>4} {:>7} {:>7} {:>7}", "d", "lower", "upper", "exact");
            for row in &table {
                let exact = row
                    .exact
                    .map_or_else(|| "-".to_string(), |e| e.to_string());
                println!("{:>4} {:>7} {:>7} {:>7}", row.d, row.lower, row.upper, exact);
            }
        }
        return Ok(0);
    }
    let dim = args
        .dim
        .ok_or_else(|| CliError::Usage("provide --dim (single report) or --dmax (table)".into()))?;
    let premise = parse_premise(&args.premise, dim)?;
    let report = premise_bound_report(&premise)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        let exact = report
            .exact
            .map_or_else(|| "-".to_string(), |e| e.to_string());
        println!(
            "d={} premise={} lower={} upper={} exact={} [{}]",
            report.d,
            args.premise,
            report.lower,
            report.upper,
            exact,
            report.formula_tags.join(", ")
        );
    }
    Ok(0)
}

fn mane(args: ManeArgs) -> Result<u8, CliError> {
    let premise = parse_premise(&args.premise, args.dim)?;
    let report = mane_experiment(&premise, args.observables, args.pairs, args.seed)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(if report.passes() { 0 } else { 2 })
}

fn roman(args: RomanArgs) -> Result<u8, CliError> {
    let points = roman_surface_points(args.n)?;
    let mut text = String::from("y1,y2,y3\n");
    for [y1, y2, y3] in points {
        text.push_str(&format!("{y1},{y2},{y3}\n"));
    }
    match args.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(0)
}
