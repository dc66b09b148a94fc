use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mpinv::harness::fuzz::{fuzz, run_trial, FuzzConfig, Suite};
use mpinv::harness::generate::{generate_regular, generate_rol_pair, RolMode};
use mpinv::isometry::{prop53_check, theorem54_check};
use mpinv::mp_hermitian::theorem51_check;
use mpinv::svd::svd;
use mpinv::{
    classify, conorm, full_report, generate_mp_hermitian, generate_special, pinv, theorem52_decompose,
    ClassificationReport, ComplexMatrix, ConditionReport, SpecialKind, Tolerance,
};

#[derive(Parser)]
#[command(name = "mpinv", version, about = "Moore-Penrose inverses and their identities on complex matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct TolArgs {
    /// Relative Frobenius tolerance for identity checks.
    #[arg(long = "tol", default_value_t = mpinv::tolerance::DEFAULT_EQ_TOL)]
    eq_tol: f64,
    /// Multiplier on the sigma_max·max(m,n)·eps rank threshold.
    #[arg(long = "rank-tol", default_value_t = mpinv::tolerance::DEFAULT_RANK_TOL_FACTOR)]
    rank_tol_factor: f64,
}

impl TolArgs {
    fn tolerance(self) -> anyhow::Result<Tolerance> {
        Ok(Tolerance::new(self.rank_tol_factor, self.eq_tol)?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Pseudoinverse with its Penrose residuals and rank.
    Pinv {
        #[arg(long = "in")]
        input: PathBuf,
        /// Also write the pseudoinverse matrix here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Every reverse order law condition for the product ab.
    Rol {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Structural predicates plus the range, normality and isometry characterizations.
    Classify {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Null space / range decomposition of a Moore-Penrose hermitian matrix.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Reduced minimum modulus c(a) with ‖a‖ and ‖a†‖.
    Conorm {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Seeded property campaign; exits 2 when any property fails.
    Fuzz {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long)]
        trials: u64,
        #[arg(long = "max-dim")]
        max_dim: usize,
        #[arg(long)]
        seed: u64,
        /// Replay a single trial of a concrete suite instead of a campaign.
        #[arg(long)]
        trial: Option<u64>,
        #[arg(long)]
        stop_on_failure: bool,
        /// Include per-trial verdict maps in the report.
        #[arg(long)]
        verdicts: bool,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Writes a seeded fixture matrix (or pair).
    Gen(GenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Penrose,
    Formulations,
    Rol,
    Mph,
    Isometry,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Penrose => Suite::Penrose,
            SuiteArg::Formulations => Suite::Formulations,
            SuiteArg::Rol => Suite::Rol,
            SuiteArg::Mph => Suite::Mph,
            SuiteArg::Isometry => Suite::Isometry,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    /// rows x cols, given rank, singular values in [sv-low, sv-high].
    Regular,
    /// n x n Moore-Penrose hermitian of the given rank.
    MpHermitian,
    /// n x n partial isometry of the given rank.
    PartialIsometry,
    /// n x n hermitian partial isometry with the given inertia.
    HermitianPartialIsometry,
    /// n x n with the listed nonzero singular values.
    SingularValues,
    /// A pair (a, b) for reverse order law experiments.
    RolPair,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    ForcedUnitary,
    ForcedPinv,
    Random,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: GenKind,
    #[arg(long)]
    seed: u64,
    /// Square dimension.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long = "sv-low", default_value_t = 0.5)]
    sv_low: f64,
    #[arg(long = "sv-high", default_value_t = 2.0)]
    sv_high: f64,
    #[arg(long, default_value_t = 0)]
    positive: usize,
    #[arg(long, default_value_t = 0)]
    negative: usize,
    /// Comma-separated singular values.
    #[arg(long, value_delimiter = ',')]
    sigma: Vec<f64>,
    #[arg(long, value_enum, default_value = "random")]
    mode: ModeArg,
    /// Output file (the first matrix of a pair).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output file for the second matrix of a pair.
    #[arg(long = "out-b")]
    out_b: Option<PathBuf>,
}

enum Outcome {
    Ok,
    PropertyFailures,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let rendered = e.to_string();
            let line = rendered.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            eprintln!("mpinv: {}", line.trim_start_matches("error: "));
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::PropertyFailures) => ExitCode::from(2),
        Err(e) => {
            eprintln!("mpinv: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::from(1)
        }
    }
}

fn read_matrix(path: &Path) -> anyhow::Result<ComplexMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn print_json<T: Serialize>(value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match writeln!(io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

#[derive(Serialize)]
struct ClassifyOutput<'a> {
    #[serde(flatten)]
    classification: &'a ClassificationReport,
    theorem51: Option<ConditionReport<mpinv::mp_hermitian::Theorem51Condition>>,
    theorem54: Option<ConditionReport<mpinv::isometry::Theorem54Condition>>,
    prop53: Option<ConditionReport<mpinv::isometry::Prop53Condition>>,
}

#[derive(Serialize)]
struct ConormOutput {
    conorm: f64,
    norm: f64,
    pinv_norm: f64,
}

#[derive(Serialize)]
struct Written<'a> {
    out: &'a Path,
    rows: usize,
    cols: usize,
}

#[derive(Serialize)]
struct Pair<'a> {
    a: &'a ComplexMatrix,
    b: &'a ComplexMatrix,
}

fn run(command: Command) -> anyhow::Result<Outcome> {
    match command {
        Command::Pinv { input, out, tol } => {
            let a = read_matrix(&input)?;
            let result = pinv(&a, &tol.tolerance()?)?;
            if let Some(out) = out {
                write_json(&out, &result.pinv)?;
            }
            print_json(&result)?;
        }
        Command::Rol { a, b, tol } => {
            let (a, b) = (read_matrix(&a)?, read_matrix(&b)?);
            print_json(&full_report(&a, &b, &tol.tolerance()?)?)?;
        }
        Command::Classify { input, tol } => {
            let a = read_matrix(&input)?;
            let t = tol.tolerance()?;
            let classification = classify(&a, &t)?;
            let square = a.is_square();
            let output = ClassifyOutput {
                classification: &classification,
                theorem51: square.then(|| theorem51_check(&a, &t)).transpose()?,
                theorem54: square.then(|| theorem54_check(&a, &t)).transpose()?,
                prop53: (classification.rank > 0).then(|| prop53_check(&a, &t)).transpose()?,
            };
            print_json(&output)?;
        }
        Command::Decompose { input, tol } => {
            let a = read_matrix(&input)?;
            print_json(&theorem52_decompose(&a, &tol.tolerance()?)?)?;
        }
        Command::Conorm { input, tol } => {
            let a = read_matrix(&input)?;
            let t = tol.tolerance()?;
            let c = conorm(&a, &t)?;
            let pinv_norm = svd(&pinv(&a, &t)?.pinv)?.sigma_max();
            print_json(&ConormOutput {
                conorm: c,
                norm: svd(&a)?.sigma_max(),
                pinv_norm,
            })?;
        }
        Command::Fuzz {
            suite,
            trials,
            max_dim,
            seed,
            trial,
            stop_on_failure,
            verdicts,
            tol,
        } => {
            let t = tol.tolerance()?;
            if let Some(index) = trial {
                let outcome = run_trial(suite.into(), seed, index, max_dim, &t)?;
                print_json(&outcome)?;
                return Ok(if outcome.failures.is_empty() { Outcome::Ok } else { Outcome::PropertyFailures });
            }
            let config = FuzzConfig {
                suite: suite.into(),
                trials,
                max_dim,
                seed,
                tolerance: t,
                stop_on_failure,
                record_verdicts: verdicts,
            };
            let report = fuzz(&config)?;
            print_json(&report)?;
            if !report.passed() {
                return Ok(Outcome::PropertyFailures);
            }
        }
        Command::Gen(args) => generate(args)?,
    }
    Ok(Outcome::Ok)
}

fn generate(args: GenArgs) -> anyhow::Result<()> {
    let need = |v: Option<usize>, flag: &str| v.with_context(|| format!("--{flag} is required for this kind"));
    let m = match args.kind {
        GenKind::Regular => {
            let rows = need(args.rows.or(args.n), "rows")?;
            let cols = need(args.cols.or(args.n), "cols")?;
            let rank = need(args.rank, "rank")?;
            generate_regular(rows, cols, rank, args.sv_low, args.sv_high, args.seed)?
        }
        GenKind::MpHermitian => generate_mp_hermitian(need(args.n, "n")?, need(args.rank, "rank")?, args.seed)?,
        GenKind::PartialIsometry => {
            let kind = SpecialKind::PartialIsometry { rank: need(args.rank, "rank")? };
            generate_special(&kind, need(args.n, "n")?, args.seed)?
        }
        GenKind::HermitianPartialIsometry => {
            let kind = SpecialKind::HermitianPartialIsometry {
                positive: args.positive,
                negative: args.negative,
            };
            generate_special(&kind, need(args.n, "n")?, args.seed)?
        }
        GenKind::SingularValues => {
            if args.sigma.is_empty() {
                bail!("--sigma is required for this kind");
            }
            let kind = SpecialKind::PrescribedSingularValues { sigma: args.sigma };
            generate_special(&kind, need(args.n, "n")?, args.seed)?
        }
        GenKind::RolPair => {
            let mode = match args.mode {
                ModeArg::ForcedUnitary => RolMode::ForcedUnitary,
                ModeArg::ForcedPinv => RolMode::ForcedPinv,
                ModeArg::Random => RolMode::Random,
            };
            let (a, b) = generate_rol_pair(need(args.n, "n")?, mode, args.seed)?;
            return match (args.out, args.out_b) {
                (Some(pa), Some(pb)) => {
                    write_json(&pa, &a)?;
                    write_json(&pb, &b)?;
                    print_json(&[
                        Written { out: &pa, rows: a.rows(), cols: a.cols() },
                        Written { out: &pb, rows: b.rows(), cols: b.cols() },
                    ])
                }
                (None, None) => print_json(&Pair { a: &a, b: &b }),
                _ => bail!("--out and --out-b must be given together"),
            };
        }
    };
    match args.out {
        Some(path) => {
            write_json(&path, &m)?;
            print_json(&Written { out: &path, rows: m.rows(), cols: m.cols() })
        }
        None => print_json(&m),
    }
}
