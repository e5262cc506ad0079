use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use silab_cli::{execute, Experiment};

/// Run one silab experiment and write its results.
#[derive(Parser)]
#[command(name = "silab", version)]
struct Args {
    experiment: Experiment,
    /// JSON config file; `{}` selects every default.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: silab-out/<experiment>).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(args.experiment, &args.config, args.seed, args.out) {
        Ok(run) => {
            let total = run.record.scalars.len();
            let failed = run.record.failed_checks();
            println!(
                "{}: {}/{} checks passed, {} files in {}",
                run.record.experiment,
                total - failed.len(),
                total,
                run.files.len(),
                run.dir.display()
            );
            for name in failed {
                let s = &run.record.scalars[name];
                println!(
                    "  failed {name}: value {:e}, tolerance {:e}",
                    s.value, s.tolerance
                );
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("silab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
