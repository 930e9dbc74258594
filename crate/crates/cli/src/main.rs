use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cchaos::par::Execution;
use cchaos_cli::commands::{self, Outcome, WassersteinArgs};
use cchaos_cli::{CliError, CliResult};
use clap::{Parser, Subcommand};

/// Complex fourth-moment bounds: exact and Monte Carlo moments, Wasserstein
/// estimates and identity checks.
#[derive(Parser, Debug)]
#[command(name = "cchaos", version)]
struct Cli {
    /// Worker threads for the data-parallel loops (1 runs sequentially).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run an experiment config over its n-grid and write CSV and JSON.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Moment summary of a polynomial vector.
    Moments {
        #[arg(long)]
        poly: PathBuf,
        /// Estimate from this many samples instead of exactly.
        #[arg(long)]
        mc: Option<usize>,
    },
    /// Moment and Gamma bounds for a polynomial vector against a covariance.
    Bound {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        /// Also run the Monte Carlo route with this many samples.
        #[arg(long)]
        mc: Option<usize>,
    },
    /// Empirical W1 between two sample files, or of one file against CN(0, Sigma).
    Wasserstein {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: Option<PathBuf>,
        #[arg(long)]
        sigma: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        repeats: usize,
        /// Sinkhorn regularization above the exact solver cap.
        #[arg(long, default_value_t = 1e-2)]
        eps: f64,
    },
    /// Stein solver battery: closed-form potentials, residuals and Hessian bounds.
    SteinCheck {
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
    },
    /// The exact identity suite.
    Verify,
    /// Write samples of CN(0, Sigma) or of a polynomial vector as CSV.
    Sample {
        #[arg(long)]
        sigma: Option<PathBuf>,
        #[arg(long)]
        poly: Option<PathBuf>,
        #[arg(long)]
        count: usize,
    },
}

fn execution(threads: Option<usize>) -> CliResult<Execution> {
    match threads {
        Some(0) => Err(CliError::Usage("--threads must be positive".into())),
        Some(1) => Ok(Execution::Sequential),
        Some(n) => {
            #[cfg(feature = "parallel")]
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
            #[cfg(not(feature = "parallel"))]
            eprintln!("built without the parallel feature; ignoring --threads {n}");
            Ok(Execution::Parallel)
        }
        None => Ok(Execution::Parallel),
    }
}

fn emit(outcome: &Outcome, out: Option<&Path>) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(&outcome.document).expect("documents serialize");
    text.push('\n');
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(format!("{}.json", outcome.name));
            std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn finish(outcome: &Outcome) -> CliResult<()> {
    eprintln!("{}", outcome.summary);
    if outcome.passed {
        Ok(())
    } else {
        Err(CliError::Invariant(format!("{} reported failures", outcome.name)))
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let exec = execution(cli.threads)?;
    let seed = cli.seed.unwrap_or(0);
    let out = cli.out.as_deref();
    match cli.command {
        Command::Run { config } => {
            let r = commands::run(&config, cli.seed, out, exec)?;
            finish(&r.outcome)
        }
        Command::Moments { poly, mc } => {
            let o = commands::moments(&poly, mc, seed, exec)?;
            emit(&o, out)?;
            finish(&o)
        }
        Command::Bound { poly, sigma, mc } => {
            let o = commands::bound(&poly, &sigma, mc, seed, exec)?;
            emit(&o, out)?;
            finish(&o)
        }
        Command::Wasserstein { a, b, sigma, repeats, eps } => {
            let args = WassersteinArgs { a: &a, b: b.as_deref(), sigma: sigma.as_deref(), repeats, eps, seed };
            let o = commands::wasserstein(&args, exec)?;
            emit(&o, out)?;
            finish(&o)
        }
        Command::SteinCheck { samples } => {
            let o = commands::stein_check(samples, seed, exec)?;
            emit(&o, out)?;
            finish(&o)
        }
        Command::Verify => {
            let o = commands::verify(seed, exec)?;
            emit(&o, out)?;
            finish(&o)
        }
        Command::Sample { sigma, poly, count } => {
            let csv = commands::sample(sigma.as_deref(), poly.as_deref(), count, seed)?;
            match out {
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    let path = dir.join("samples.csv");
                    std::fs::write(&path, csv)?;
                    eprintln!("wrote {}", path.display());
                }
                None => print!("{csv}"),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
