use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use liouville_harness::config::{self, Config};
use liouville_harness::report::{write_csv, ExperimentReport};
use liouville_harness::{experiments, RunError};

/// Spectral simulator and verification harness for the stochastic
/// Liouville equations on the 2-torus.
#[derive(Parser)]
#[command(name = "liouville", version)]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Variance σ_N of the truncated free field.
    Sigma(Overrides),
    /// Truncated Green kernels and the mollified wave kernel.
    Kernels(Overrides),
    /// Chaos estimators: mean, covariance, moments, cauchy, multifractal, kahane.
    Gmc(Overrides),
    /// Heat equation runs with sign and energy diagnostics.
    Heat(Overrides),
    /// Damped wave runs (full or X+Y system).
    Wave(Overrides),
    /// Gibbs sampling with generator and dynamical invariance checks.
    Gibbs(Overrides),
    /// The acceptance suite.
    All(Overrides),
}

#[derive(clap::Args)]
struct Overrides {
    /// `--key value` pairs overriding the configuration.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, num_args = 0..)]
    args: Vec<String>,
}

impl Command {
    fn split(&self) -> (&'static str, &[String]) {
        match self {
            Command::Sigma(o) => ("sigma", &o.args),
            Command::Kernels(o) => ("kernels", &o.args),
            Command::Gmc(o) => ("gmc", &o.args),
            Command::Heat(o) => ("heat", &o.args),
            Command::Wave(o) => ("wave", &o.args),
            Command::Gibbs(o) => ("gibbs", &o.args),
            Command::All(o) => ("all", &o.args),
        }
    }
}

fn threads_from_env() -> Result<(), RunError> {
    if let Ok(v) = std::env::var("LIOUVILLE_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| RunError::Config(format!("LIOUVILLE_THREADS: '{v}' is not a thread count")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| RunError::Config(e.to_string()))?;
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<Vec<ExperimentReport>, RunError> {
    threads_from_env()?;
    let (name, raw) = cli.command.split();
    let overrides = config::parse_overrides(raw)?;
    let cfg: Config = config::load(cli.config.as_deref(), name, &overrides)?;
    let out = PathBuf::from(&cfg.out_dir);
    let reports = experiments::run(name, &cfg, &out)?;
    for r in &reports {
        r.write(&out)?;
    }
    if name == "all" {
        let rows: Vec<_> = reports.iter().flat_map(|r| r.rows.iter().cloned()).collect();
        std::fs::create_dir_all(&out)?;
        write_csv(&out.join("acceptance.csv"), &rows)?;
    }
    Ok(reports)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(reports) => {
            let mut failed = false;
            for r in &reports {
                let status = if r.failed() { "FAIL" } else { "ok" };
                println!("{:<20} {:<4} {} rows, {:.1} s", r.experiment_id, status, r.rows.len(), r.wall_clock_s);
                failed |= r.failed();
            }
            if failed {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
