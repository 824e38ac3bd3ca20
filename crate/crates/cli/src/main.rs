//! `lprj`: simulate ARFIMA series, estimate the memory parameter, and run
//! Monte Carlo designs.
//!
//! Exit codes: 0 on success, 2 for configuration or input errors, 3 when a
//! numerical step fails.

mod estimate;
mod series;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lpr_jackknife::arfima::{simulate, ArfimaModel};
use lpr_jackknife::harness::{emit, run_experiment, EstimatorKind, ExperimentConfig, OutputFormat};
use lpr_jackknife::jackknife::Scheme;
use lpr_jackknife::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use estimate::{estimate, EstimateOptions};

#[derive(Debug, Parser)]
#[command(name = "lprj", version, about = "Log-periodogram estimation of long memory with jackknife bias correction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw a Gaussian ARFIMA(p, d, q) series, one value per line.
    Simulate {
        #[arg(long, allow_negative_numbers = true)]
        d: f64,
        /// AR coefficients, comma separated, in (1 + phi_1 B + ...) form.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        phi: Vec<f64>,
        /// MA coefficients, comma separated, in (1 + theta_1 B + ...) form.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        theta: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        sigma2: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate d from a series file (one value per line, optional header).
    Estimate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "lpr", value_parser = parse_estimator)]
        estimator: EstimatorKind,
        #[arg(long, default_value_t = 0.65)]
        alpha: f64,
        /// Sub-sample count for jackknife estimators.
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value = "no", value_parser = parse_scheme)]
        scheme: Scheme,
        /// AR order of the fitted short-memory model.
        #[arg(long, default_value_t = 0)]
        p: usize,
        /// MA order of the fitted short-memory model.
        #[arg(long, default_value_t = 0)]
        q: usize,
    },
    /// Run a Monte Carlo experiment described by a JSON file.
    Mc {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads; all cores when omitted. Output does not depend on it.
        #[arg(long)]
        threads: Option<usize>,
        /// Overrides the configuration's output path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the configuration's output format.
        #[arg(long, value_parser = parse_format)]
        format: Option<OutputFormat>,
    },
}

fn parse_estimator(s: &str) -> std::result::Result<EstimatorKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_scheme(s: &str) -> std::result::Result<Scheme, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_format(s: &str) -> std::result::Result<OutputFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { d, phi, theta, sigma2, mu, n, seed, out } => {
            let model = ArfimaModel { d, ar: phi, ma: theta, sigma2, mu };
            model.validate()?;
            let y = simulate(&model, n, &mut ChaCha20Rng::seed_from_u64(seed))?;
            series::write_series(&y, out.as_deref())
        }
        Command::Estimate { input, estimator, alpha, m, scheme, p, q } => {
            let y = series::read_series(&input)?;
            let report = estimate(&y, &EstimateOptions { estimator, alpha, m, scheme, p, q })?;
            let mut line = serde_json::to_string(&report).map_err(|e| Error::Config(e.to_string()))?;
            line.push('\n');
            series::write_bytes(line.as_bytes(), None)
        }
        Command::Mc { config, threads, out, format } => {
            let text = fs::read_to_string(&config)
                .map_err(|e| Error::Io { path: config.display().to_string(), message: e.to_string() })?;
            let cfg = ExperimentConfig::from_json(&text)?;
            let summary = run_experiment(&cfg, threads)?;
            let bytes = emit(&summary, format.unwrap_or(cfg.format))?;
            let path = out.or_else(|| cfg.output.as_ref().map(PathBuf::from));
            series::write_bytes(&bytes, path.as_deref())?;
            eprintln!("{} cells, {} replications, {:.2}s", summary.rows.len(), cfg.reps, summary.wall_time_secs);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() || matches!(e, Error::Io { .. }) {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
