//! Runner behind the `silab` command.
//!
//! `silab <experiment> --config <path> [--seed N] [--out DIR]` loads a JSON
//! config, runs one experiment and writes `results.json` plus a CSV and an
//! SVG chart for every scan into the output directory.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod record;

use std::path::{Path, PathBuf};
use std::time::Instant;

pub use config::{Experiment, ExperimentConfig};
pub use error::CliError;
pub use record::{ResultRecord, Scalar, Scan};

/// Runs `experiment` without touching the filesystem.
pub fn run(experiment: Experiment, config: &ExperimentConfig) -> Result<ResultRecord, CliError> {
    config.validate(experiment)?;
    let start = Instant::now();
    let outcome = experiments::run(experiment, config)?;
    let record = ResultRecord {
        experiment: experiment.name().to_string(),
        seed: config.seed,
        config: config.echo(experiment),
        passed: outcome.scalars.values().all(|s| s.passed),
        scalars: outcome.scalars,
        report: outcome.report,
        scans: outcome.scans,
        duration_seconds: start.elapsed().as_secs_f64(),
    };
    record.check_finite()?;
    Ok(record)
}

pub struct RunOutput {
    pub record: ResultRecord,
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
}

pub fn default_out_dir(experiment: Experiment) -> PathBuf {
    Path::new("silab-out").join(experiment.name())
}

/// Loads the config, applies `--seed` and `--out`, runs and writes outputs.
pub fn execute(
    experiment: Experiment,
    config_path: &Path,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<RunOutput, CliError> {
    let mut config = ExperimentConfig::load(config_path)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    let dir = out
        .or_else(|| config.out.clone())
        .unwrap_or_else(|| default_out_dir(experiment));
    let record = run(experiment, &config)?;
    let mut files = vec![output::write_results(&dir, &record)?];
    files.extend(output::emit_plot_data(&dir, &record.scans)?);
    Ok(RunOutput { record, dir, files })
}
