//! Command-line front end: parse a matrix, dispatch to the library, and emit
//! machine-readable JSON or CSV.
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O or parse error, 3 when
//! `verify` or `suite` records any violation.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use pqnorm::{
    check_duality_identity, check_improvement_dominance, check_theorem1, check_theorem2,
    operator_norm, optimize, parse_matrix_file, run_suite, Error, Exponent, ExponentPair,
    FactorizeOptions, InequalityRecord, MatrixFormat, NormEstimate, NormOptions, PositiveMatrix,
    SuiteConfig,
};

const DEFAULT_SUITE_CONFIG: &str = include_str!("../../../config/suite-default.toml");

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_VIOLATION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "pqnorm",
    version,
    about = "lp->lq operator norms, diagonal factorizations, and inequality checks for nonnegative matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the lp->lq operator norm of one matrix
    Norm(NormArgs),
    /// Minimize ||d||_r * ||B||_{p,p} over factorizations A = diag(d) * B
    Factorize(FactorizeArgs),
    /// Evaluate the mixed-norm inequality checks (M = 1) for one matrix
    #[command(after_help = REPORT_COLUMNS)]
    Verify(VerifyArgs),
    /// Run the randomized verification suite
    #[command(after_help = REPORT_COLUMNS)]
    Suite(SuiteArgs),
}

const REPORT_COLUMNS: &str = "Report CSV columns: theorem,m,n,p,q,r,s,lhs,rhs,ratio,pass";

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InputFormat {
    Auto,
    Csv,
    Json,
}

impl From<InputFormat> for MatrixFormat {
    fn from(f: InputFormat) -> Self {
        match f {
            InputFormat::Auto => MatrixFormat::Auto,
            InputFormat::Csv => MatrixFormat::Csv,
            InputFormat::Json => MatrixFormat::Json,
        }
    }
}

#[derive(Args)]
struct InputArgs {
    /// Matrix file: CSV rows ("1,2\n3,4") or a JSON 2-D array
    #[arg(long)]
    input: PathBuf,
    /// Input layout (auto sniffs the extension / leading bracket)
    #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
    input_format: InputFormat,
    /// Replace entries by absolute values before validation
    #[arg(long)]
    abs: bool,
}

#[derive(Args)]
struct PairArgs {
    /// Domain exponent p: decimal, fraction like "4/3", or "inf"
    #[arg(long)]
    p: String,
    /// Codomain exponent q (q <= p)
    #[arg(long)]
    q: String,
}

#[derive(Args)]
struct NormControls {
    /// Relative convergence tolerance of the power iteration
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Iteration cap per start
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    /// Randomized starts (best objective wins)
    #[arg(long, default_value_t = 8)]
    multistarts: usize,
    /// Seed for the randomized starts
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl NormControls {
    fn options(&self) -> NormOptions {
        NormOptions {
            tol: self.tol,
            max_iter: self.max_iter,
            multistarts: self.multistarts,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct NormArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    pair: PairArgs,
    #[command(flatten)]
    controls: NormControls,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
}

#[derive(Args)]
struct FactorizeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    pair: PairArgs,
    #[command(flatten)]
    controls: NormControls,
    /// Randomized optimizer restarts beyond the seeded run
    #[arg(long, default_value_t = 2)]
    restarts: usize,
    /// Sweep cap for the coordinate descent
    #[arg(long, default_value_t = 400)]
    opt_max_iter: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    pair: PairArgs,
    #[command(flatten)]
    controls: NormControls,
    /// Relative slack for the one-sided inequality checks
    #[arg(long, default_value_t = 1e-9)]
    slack: f64,
    /// Relative tolerance for the duality identity
    #[arg(long, default_value_t = 1e-6)]
    duality_tol: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
}

#[derive(Args)]
struct SuiteArgs {
    /// Suite configuration (TOML); defaults to the shipped config
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the instance count
    #[arg(long)]
    instances: Option<usize>,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
}

struct Failure {
    message: String,
    code: u8,
}

impl Failure {
    fn io(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: EXIT_IO,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_)
            | Error::Json(_)
            | Error::ParseEntry { .. }
            | Error::RaggedRow { .. }
            | Error::BadEntry { .. }
            | Error::EmptyMatrix
            | Error::DimensionMismatch { .. } => EXIT_IO,
            _ => EXIT_USAGE,
        };
        Self {
            message: e.to_string(),
            code,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let result = match cli.command {
        Command::Norm(args) => run_norm(args),
        Command::Factorize(args) => run_factorize(args),
        Command::Verify(args) => run_verify(args),
        Command::Suite(args) => run_suite_cmd(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn read_matrix(args: &InputArgs) -> Result<PositiveMatrix, Failure> {
    if !args.input.exists() {
        return Err(Failure::io(format!(
            "no such file: {}",
            args.input.display()
        )));
    }
    Ok(parse_matrix_file(
        &args.input,
        args.input_format.into(),
        args.abs,
    )?)
}

fn parse_pair(args: &PairArgs) -> Result<ExponentPair, Failure> {
    let p: Exponent = args.p.parse()?;
    let q: Exponent = args.q.parse()?;
    Ok(ExponentPair::new(p, q)?)
}

/// Round to 12 significant digits for reproducible witness output.
fn sig12(x: f64) -> f64 {
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn json_f64_or_inf(x: f64) -> serde_json::Value {
    if x.is_finite() {
        serde_json::json!(x)
    } else {
        serde_json::json!("inf")
    }
}

fn norm_json(est: &NormEstimate) -> serde_json::Value {
    serde_json::json!({
        "value": est.value,
        "method": est.method.as_str(),
        "iterations": est.iterations,
        "lower": est.lower,
        "upper": json_f64_or_inf(est.upper),
        "tol": est.tol,
        "witness": est.witness.iter().map(|&w| sig12(w)).collect::<Vec<f64>>(),
    })
}

fn run_norm(args: NormArgs) -> Result<u8, Failure> {
    let a = read_matrix(&args.input)?;
    let pair = parse_pair(&args.pair)?;
    let est = operator_norm(&a, &pair, &args.controls.options())?;
    match args.format {
        OutputFormat::Json => println!("{}", norm_json(&est)),
        OutputFormat::Csv => {
            println!("value,method,iterations,lower,upper,tol,witness");
            let witness: Vec<String> = est.witness.iter().map(|&w| sig12(w).to_string()).collect();
            let upper = if est.upper.is_finite() {
                est.upper.to_string()
            } else {
                "inf".into()
            };
            println!(
                "{},{},{},{},{},{},{}",
                est.value,
                est.method,
                est.iterations,
                est.lower,
                upper,
                est.tol,
                witness.join(";")
            );
        }
    }
    Ok(0)
}

fn run_factorize(args: FactorizeArgs) -> Result<u8, Failure> {
    let a = read_matrix(&args.input)?;
    let pair = parse_pair(&args.pair)?;
    let opts = FactorizeOptions {
        max_iter: args.opt_max_iter,
        restarts: args.restarts,
        norm_opts: args.controls.options(),
        seed: args.controls.seed,
        ..FactorizeOptions::default()
    };
    let fact = optimize(&a, &pair, &opts)?;
    let d: Vec<f64> = fact.d.iter().map(|&v| sig12(v)).collect();
    match args.format {
        OutputFormat::Json => println!(
            "{}",
            serde_json::json!({
                "objective": fact.objective,
                "gap": fact.gap,
                "iterations": fact.iterations,
                "d": d,
            })
        ),
        OutputFormat::Csv => {
            println!("objective,gap,iterations,d");
            let d: Vec<String> = d.iter().map(f64::to_string).collect();
            println!(
                "{},{},{},{}",
                fact.objective,
                fact.gap,
                fact.iterations,
                d.join(";")
            );
        }
    }
    Ok(0)
}

fn applicable_records(
    a: &PositiveMatrix,
    pair: &ExponentPair,
    opts: &NormOptions,
    slack: f64,
    duality_tol: f64,
    matrix_id: &str,
) -> Result<Vec<InequalityRecord>, Failure> {
    let est = operator_norm(a, pair, opts)?;
    let mut records = Vec::new();
    let one = Exponent::ONE;
    let two = Exponent::TWO;
    if pair.q >= one && pair.q <= two && pair.p >= two {
        records.extend(check_theorem1(a, pair, &est, slack, matrix_id)?);
    }
    if pair.q >= one {
        records.extend(check_theorem2(a, pair, &est, slack, matrix_id)?);
        if pair.r <= two {
            records.push(check_improvement_dominance(a, pair, slack, matrix_id)?);
        }
        records.push(check_duality_identity(
            a,
            pair,
            opts,
            duality_tol,
            matrix_id,
        )?);
    }
    Ok(records)
}

fn records_csv(records: &[InequalityRecord]) -> String {
    let mut out = String::from(pqnorm::verify::CSV_HEADER);
    out.push('\n');
    for rec in records {
        out.push_str(&rec.csv_line());
        out.push('\n');
    }
    out
}

fn run_verify(args: VerifyArgs) -> Result<u8, Failure> {
    let a = read_matrix(&args.input)?;
    let pair = parse_pair(&args.pair)?;
    let matrix_id = args
        .input
        .input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "matrix".into());
    let records = applicable_records(
        &a,
        &pair,
        &args.controls.options(),
        args.slack,
        args.duality_tol,
        &matrix_id,
    )?;
    match args.format {
        OutputFormat::Json => println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::json!({ "records": records }))
                .expect("records serialize")
        ),
        OutputFormat::Csv => print!("{}", records_csv(&records)),
    }
    Ok(if records.iter().any(|r| !r.pass) {
        EXIT_VIOLATION
    } else {
        0
    })
}

fn load_suite_config(args: &SuiteArgs) -> Result<SuiteConfig, Failure> {
    let text = match &args.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?,
        None => DEFAULT_SUITE_CONFIG.to_string(),
    };
    let mut config: SuiteConfig =
        toml::from_str(&text).map_err(|e| Failure::io(format!("bad suite config: {e}")))?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(instances) = args.instances {
        config.instances = instances;
    }
    Ok(config)
}

fn run_suite_cmd(args: SuiteArgs) -> Result<u8, Failure> {
    let config = load_suite_config(&args)?;
    let report = run_suite(&config)?;
    let mut body = match args.format {
        OutputFormat::Json => {
            let mut value = serde_json::to_value(&report).expect("report serializes");
            let stamp = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_millis() as u64)
                .unwrap_or(0);
            value
                .as_object_mut()
                .expect("report is an object")
                .insert("generated_at_ms".into(), serde_json::json!(stamp));
            serde_json::to_string_pretty(&value).expect("report serializes")
        }
        OutputFormat::Csv => report.records_csv(),
    };
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match &args.out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?,
        None => print!("{body}"),
    }
    Ok(if report.has_violations() {
        EXIT_VIOLATION
    } else {
        0
    })
}
