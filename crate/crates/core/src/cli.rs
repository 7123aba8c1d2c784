//! Command-line front end.
//!
//! Exit codes: 0 success, 2 bad input or usage, 3 iteration cap reached,
//! 4 numerical or configuration failure during the solve.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::admm::{self, AdmmConfig, AdmmError, ProjectionSchedule, SolveStatus, Variant};
use crate::bench::{self, BenchConfig, ExperimentId};
use crate::poly::PopProblem;
use crate::reduction::{reduce_to_qop, QopProblem};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_MAX_ITER: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "admm4pop", version, about = "ADMM local solver for polynomial optimization problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rewrite a polynomial problem as a QOP and print it as JSON.
    Reduce {
        /// POP as JSON or in the line-oriented text format.
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Print the variable lineage table to stderr.
        #[arg(long)]
        explain: bool,
    },
    /// Solve a POP (JSON or text) or a QOP (JSON).
    Solve(SolveArgs),
    /// Run one of the benchmark experiments.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// TOML file with solver settings; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub variant: Option<Variant>,
    #[arg(long)]
    pub eps_abs: Option<f64>,
    #[arg(long)]
    pub eps_rel: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the per-iteration residual trace as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Run the triple projections on the thread pool.
    #[arg(long)]
    pub parallel: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantChoice {
    Constrained,
    Relaxed,
    Both,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// exp1 or exp2.
    pub experiment: String,
    #[arg(long)]
    pub runs: Option<usize>,
    /// Base seed; run r uses seed + r.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Horizon of experiment 2.
    #[arg(long = "K")]
    pub horizon: Option<usize>,
    #[arg(long, value_enum, default_value_t = VariantChoice::Both)]
    pub variant: VariantChoice,
    /// Output noise variance of experiment 2.
    #[arg(long)]
    pub noise_variance: Option<f64>,
    /// 500 runs and K = 500 unless overridden.
    #[arg(long)]
    pub full_scale: bool,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub eps_abs: Option<f64>,
    #[arg(long)]
    pub eps_rel: Option<f64>,
    /// Directory for `<experiment>_<variant>.csv` and `.json`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Run the benchmark sequentially.
    #[arg(long)]
    pub sequential: bool,
}

impl std::str::FromStr for VariantChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as ValueEnum>::from_str(s, false)
    }
}

/// Failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        Self { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<AdmmError> for CliError {
    fn from(e: AdmmError) -> Self {
        let code = match e {
            AdmmError::InvalidProblem(_) => EXIT_INPUT,
            _ => EXIT_NUMERICAL,
        };
        Self { code, message: e.to_string() }
    }
}

/// Parsed problem file.
pub enum Problem {
    Pop(PopProblem),
    Qop(QopProblem),
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::input(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

/// JSON objects with an `A` key are QOPs, other JSON is a POP, anything else
/// is the POP text format.
pub fn load_problem(text: &str) -> Result<Problem, CliError> {
    match serde_json::from_str::<serde_json::Value>(text) {
        Ok(value) if value.get("A").is_some() => {
            let q = QopProblem::from_json(text).map_err(|e| CliError::input(e.to_string()))?;
            Ok(Problem::Qop(q))
        }
        Ok(_) => PopProblem::from_json(text).map(Problem::Pop).map_err(|e| CliError::input(e.to_string())),
        Err(_) => PopProblem::parse_text(text).map(Problem::Pop).map_err(|e| CliError::input(e.to_string())),
    }
}

fn load_pop(path: &Path) -> Result<PopProblem, CliError> {
    match load_problem(&read(path)?)? {
        Problem::Pop(p) => Ok(p),
        Problem::Qop(_) => Err(CliError::input("expected a polynomial problem, got a QOP")),
    }
}

pub fn cmd_reduce(input: &Path, output: Option<&Path>, explain: bool) -> Result<i32, CliError> {
    let pop = load_pop(input)?;
    let qop = reduce_to_qop(&pop);
    let violations = qop.validate();
    if !violations.is_empty() {
        let msgs: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(CliError::input(format!("reduced problem is invalid: {}", msgs.join("; "))));
    }
    if explain {
        eprint!("{}", qop.explain());
    }
    write_or_print(output, &qop.to_json())?;
    Ok(EXIT_OK)
}

/// Defaults, then the config file, then flags.
pub fn solve_config(args: &SolveArgs) -> Result<AdmmConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => toml::from_str::<AdmmConfig>(&read(path)?)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?,
        None => AdmmConfig::default(),
    };
    if let Some(v) = args.rho {
        cfg.rho = v;
    }
    if let Some(v) = args.gamma {
        cfg.gamma = v;
    }
    if let Some(v) = args.variant {
        cfg.variant = v;
    }
    if let Some(v) = args.eps_abs {
        cfg.eps_abs = v;
    }
    if let Some(v) = args.eps_rel {
        cfg.eps_rel = v;
    }
    if let Some(v) = args.max_iter {
        cfg.max_iter = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if args.parallel {
        cfg.schedule = ProjectionSchedule::Parallel;
    }
    if args.trace.is_some() {
        cfg.record_trace = true;
    }
    cfg.validate().map_err(|e| CliError::input(e.to_string()))?;
    Ok(cfg)
}

pub fn cmd_solve(args: &SolveArgs) -> Result<i32, CliError> {
    let cfg = solve_config(args)?;
    let qop = match load_problem(&read(&args.input)?)? {
        Problem::Pop(p) => reduce_to_qop(&p),
        Problem::Qop(q) => q,
    };
    let report = match admm::run(&qop, &cfg) {
        Ok(r) => r,
        Err(e) => {
            let err = CliError::from(e);
            if let Some(out) = &args.output {
                let doc = serde_json::json!({ "status": "error", "seed": cfg.seed, "error": err.message });
                let text = serde_json::to_string_pretty(&doc).expect("json value serializes");
                write_or_print(Some(out), &text)?;
            }
            return Err(err);
        }
    };
    if let (Some(path), Some(trace)) = (&args.trace, &report.trace) {
        let file = fs::File::create(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        admm::write_trace_csv(trace, file).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let mut printed = report.clone();
    printed.trace = None;
    write_or_print(args.output.as_deref(), &printed.to_json())?;
    Ok(match report.status {
        SolveStatus::Converged => EXIT_OK,
        SolveStatus::MaxIter => EXIT_MAX_ITER,
        SolveStatus::Error => EXIT_NUMERICAL,
    })
}

pub fn cmd_bench(args: &BenchArgs) -> Result<i32, CliError> {
    let experiment: ExperimentId = args.experiment.parse().map_err(CliError::input)?;
    let variants = match args.variant {
        VariantChoice::Constrained => vec![Variant::Constrained],
        VariantChoice::Relaxed => vec![Variant::Relaxed],
        VariantChoice::Both => vec![Variant::Constrained, Variant::Relaxed],
    };
    if let Some(dir) = &args.output {
        fs::create_dir_all(dir).map_err(|e| CliError::input(format!("{}: {e}", dir.display())))?;
    }
    for variant in variants {
        let mut cfg = BenchConfig::new(experiment, variant);
        cfg.base_seed = args.seed;
        cfg.runs = args.runs.unwrap_or(if args.full_scale { bench::FULL_RUNS } else { bench::DEFAULT_RUNS });
        cfg.horizon = args.horizon.unwrap_or(if args.full_scale { bench::EXP2_FULL_K } else { bench::EXP2_DEFAULT_K });
        if let Some(v) = args.noise_variance {
            cfg.noise_variance = v;
        }
        if let Some(m) = args.max_iter {
            cfg.admm.max_iter = m;
        }
        if let Some(v) = args.eps_abs {
            cfg.admm.eps_abs = v;
        }
        if let Some(v) = args.eps_rel {
            cfg.admm.eps_rel = v;
        }
        cfg.parallel_runs = !args.sequential;
        if cfg.runs == 0 {
            return Err(CliError::input("--runs must be at least 1"));
        }
        if cfg.horizon < 2 {
            return Err(CliError::input("--K must be at least 2"));
        }
        if !(cfg.noise_variance >= 0.0 && cfg.noise_variance.is_finite()) {
            return Err(CliError::input("--noise-variance must be non-negative"));
        }
        cfg.admm.validate().map_err(|e| CliError::input(e.to_string()))?;

        let stats = bench::run_benchmark(&cfg);
        let json = stats.aggregate_json();
        match &args.output {
            Some(dir) => {
                let stem = format!("{}_{}", args.experiment, variant);
                let csv_path = dir.join(format!("{stem}.csv"));
                let json_path = dir.join(format!("{stem}.json"));
                fs::write(&csv_path, stats.to_csv_string())
                    .map_err(|e| CliError::input(format!("{}: {e}", csv_path.display())))?;
                fs::write(&json_path, &json).map_err(|e| CliError::input(format!("{}: {e}", json_path.display())))?;
                println!("{json}");
            }
            None => {
                print!("{}", stats.to_csv_string());
                println!("{json}");
            }
        }
    }
    Ok(EXIT_OK)
}

/// Parses arguments and runs the command; returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Reduce { input, output, explain } => cmd_reduce(input, output.as_deref(), *explain),
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
