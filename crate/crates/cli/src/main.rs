//! `vpfp <experiment> [--config FILE] [--set key=value ...] [--out DIR] [--threads N]`
//!
//! Exit status: 0 when every embedded assertion passes, 1 on an assertion
//! failure, 2 on usage or configuration errors, 3 on numerical errors.

mod experiments;
mod params;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use experiments::{Experiment, Setup};
use params::Params;
use report::CliError;

#[derive(Debug, Parser)]
#[command(name = "vpfp", version, about = "Run a named Vlasov-Poisson-Fokker-Planck experiment")]
struct Cli {
    #[arg(value_enum)]
    experiment: Experiment,
    /// Flat key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one configuration key (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory (default: out/<experiment>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; falls back to VPFP_THREADS, then to all cores.
    #[arg(long)]
    threads: Option<usize>,
}

fn threads(cli: &Cli) -> Result<Option<usize>, CliError> {
    if let Some(n) = cli.threads {
        return Ok(Some(n));
    }
    match std::env::var("VPFP_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("VPFP_THREADS must be a positive integer, got '{v}'"))),
        Err(_) => Ok(None),
    }
}

fn execute(cli: Cli) -> Result<report::Summary, CliError> {
    if let Some(n) = threads(&cli)? {
        if n == 0 {
            return Err(CliError::Usage("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure {n} threads: {e}")))?;
    }
    let mut params = Params::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        params.parse_text(&text, &path.display().to_string())?;
    }
    for s in &cli.set {
        params.set(s)?;
    }
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("out").join(cli.experiment.name()));
    experiments::run(Setup {
        experiment: cli.experiment,
        params,
        out,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.experiment.name();
    match execute(cli) {
        Ok(summary) => {
            for a in &summary.assertions {
                let mark = if a.passed { "PASS" } else { "FAIL" };
                println!("{mark}  {}: {}", a.name, a.detail);
            }
            println!("{name}: wrote {} files", summary.files.len());
            if summary.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("vpfp {name}: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
