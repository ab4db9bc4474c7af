use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use berryem_cli::{run, validate, CliError, RunOptions};

/// Berry-phase quantities of magnetized plasmas and related scenarios.
#[derive(Debug, Parser)]
#[command(name = "berryem", version)]
struct Args {
    /// Scenario JSON
    #[arg(long)]
    config: PathBuf,

    /// Output directory; overrides the scenario's `output`
    #[arg(long)]
    out_dir: Option<PathBuf>,

    /// Worker threads for grid sweeps (default: all cores)
    #[arg(long)]
    threads: Option<usize>,

    /// Seed for randomized checks
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match go(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("berryem: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn go(args: &Args) -> Result<(), CliError> {
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(CliError::Config(vec!["--threads: must be at least 1".into()]));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().expect("thread pool set once");
    }
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(vec![format!("--config {}: {e}", args.config.display())]))?;
    let scenario = validate(&text)?;
    let report = run(&scenario, &RunOptions { out_dir: args.out_dir.clone(), seed: args.seed })?;
    println!("{}", report.primary.display());
    println!("{}", report.metadata.display());
    Ok(())
}
