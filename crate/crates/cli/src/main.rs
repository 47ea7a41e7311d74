use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use framediv::codazzi::synthetic::BUILTIN_FIELDS;
use framediv::config::{ConfigFile, Overrides, Suite, SuiteConfig};
use framediv::geometry::builtins::BUILTIN_METRICS;
use framediv::hypersurface::builtins::BUILTIN_IMMERSIONS;
use framediv::report::Bound;
use framediv::suite::{run, SuiteOutcome};

/// Worker threads for the parallel sweeps; defaults to one per core.
const WORKERS_VAR: &str = "FRAMEDIV_WORKERS";

const EXIT_VERDICT: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "framediv", version, about = "Run numerical identity verification suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one suite and report per-identity verdicts.
    Run(RunArgs),
    /// List suites and built-in fixtures.
    List,
}

#[derive(Args)]
struct RunArgs {
    /// div-identity, codazzi-lemmas, sympoly-identities, polyfamily-scan,
    /// hypersurface-isoparametric or integrated-torus.
    suite: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    metric: Option<String>,
    #[arg(long)]
    tensor: Option<String>,
    #[arg(long)]
    immersion: Option<String>,
    /// Points per axis, e.g. 50x50.
    #[arg(long)]
    grid: Option<String>,
    /// Polynomial for the shift family, e.g. "x^3-3x".
    #[arg(long)]
    q: Option<String>,
    /// lower or upper.
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    /// Directory for report.jsonl and summary.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML file; its settings override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            suite: None,
            n: self.n,
            samples: self.samples,
            seed: self.seed,
            metric: self.metric.clone(),
            tensor: self.tensor.clone(),
            immersion: self.immersion.clone(),
            grid: self.grid.clone(),
            q: self.q.clone(),
            endpoint: self.endpoint.clone(),
            tol: self.tol,
            out: self.out.clone(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            list();
            ExitCode::SUCCESS
        }
        Command::Run(args) => match execute(&args) {
            Ok(outcome) if outcome.passed() => ExitCode::SUCCESS,
            Ok(_) => ExitCode::from(EXIT_VERDICT),
            Err(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(EXIT_CONFIG)
            }
        },
    }
}

fn configure_workers() -> Result<(), String> {
    let Ok(value) = std::env::var(WORKERS_VAR) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{WORKERS_VAR} must be a positive integer, got '{value}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn execute(args: &RunArgs) -> Result<SuiteOutcome, String> {
    configure_workers()?;
    let file = args
        .config
        .as_deref()
        .map(ConfigFile::load)
        .transpose()
        .map_err(|e| e.to_string())?;
    let config = SuiteConfig::layered(Some(&args.suite), &args.overrides(), file).map_err(|e| e.to_string())?;
    let outcome = run(&config).map_err(|e| e.to_string())?;
    print_summary(&outcome);
    if let Some(dir) = &config.out {
        outcome.write(dir).map_err(|e| e.to_string())?;
    }
    Ok(outcome)
}

fn print_summary(outcome: &SuiteOutcome) {
    println!("suite {} seed {}", outcome.suite, outcome.seed);
    for r in &outcome.reports {
        let op = match r.bound {
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
        };
        println!(
            "{} {:<32} {:<28} n={:<6} worst={:<12.3e} {op} {:.1e}",
            if r.passed() { "PASS" } else { "FAIL" },
            r.identity,
            r.fixture,
            r.n_samples(),
            r.worst_residual(),
            r.tolerance,
        );
        for row in r.failures().take(3) {
            match &row.error {
                Some(e) => println!("     sample {} at {:?}: {e}", row.sample, row.point),
                None => println!("     sample {} at {:?}: residual {:e}", row.sample, row.point, row.residual),
            }
        }
    }
    let failed = outcome.failed_reports().count();
    println!(
        "{}: {} of {} reports passed",
        if failed == 0 { "PASS" } else { "FAIL" },
        outcome.reports.len() - failed,
        outcome.reports.len()
    );
}

fn list() {
    let suites: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
    println!("suites:     {}", suites.join(", "));
    println!("metrics:    {}", BUILTIN_METRICS.join(", "));
    println!("tensors:    {}", BUILTIN_FIELDS.join(", "));
    println!("immersions: {}", BUILTIN_IMMERSIONS.join(", "));
}
