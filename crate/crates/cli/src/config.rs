//! Experiment configuration.
//!
//! One JSON file can hold settings for every experiment; each experiment
//! reads its own section and ignores the rest. Every field has a default, so
//! `{}` is a complete configuration.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use silab_core::wave_cylinder::CylinderGrid;
use silab_core::wave_mixed::SurfaceGrid;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    ChshScan,
    SiFit,
    WaveMixed,
    WaveCylinder,
    KsCheck,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Experiment::ChshScan,
        Experiment::SiFit,
        Experiment::WaveMixed,
        Experiment::WaveCylinder,
        Experiment::KsCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::ChshScan => "chsh-scan",
            Experiment::SiFit => "si-fit",
            Experiment::WaveMixed => "wave-mixed",
            Experiment::WaveCylinder => "wave-cylinder",
            Experiment::KsCheck => "ks-check",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Output directory; `--out` takes precedence.
    pub out: Option<PathBuf>,
    pub chsh_scan: ChshScanConfig,
    pub si_fit: SiFitConfig,
    pub wave_mixed: WaveMixedConfig,
    pub wave_cylinder: WaveCylinderConfig,
    pub ks_check: KsCheckConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChshScanConfig {
    /// Points in the `θ` scan of the family `(0, 2θ, θ, 3θ)`.
    pub points: usize,
    pub theta_max: f64,
    /// Points in the singlet-correlation check.
    pub singlet_points: usize,
}

impl Default for ChshScanConfig {
    fn default() -> Self {
        ChshScanConfig {
            points: 91,
            theta_max: FRAC_PI_2,
            singlet_points: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SiFitConfig {
    /// `[a₁, a₂, b₁, b₂]` in radians.
    pub angles: [f64; 4],
    pub match_marginals: bool,
    /// Tables per class in the necessity scan; 0 skips it.
    pub necessity_count: usize,
}

impl Default for SiFitConfig {
    fn default() -> Self {
        SiFitConfig {
            angles: [0.0, FRAC_PI_2, FRAC_PI_4, 3.0 * FRAC_PI_4],
            match_marginals: true,
            necessity_count: 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveMixedConfig {
    /// Grid size for the leakage test (both axes, periods `2π`).
    pub leakage_n: usize,
    /// Grid size for the field-conditioning ensemble.
    pub field_n: usize,
    pub ensemble: usize,
    pub growth_x2_max: f64,
    pub growth_steps: usize,
}

impl Default for WaveMixedConfig {
    fn default() -> Self {
        WaveMixedConfig {
            leakage_n: 64,
            field_n: 32,
            ensemble: 2000,
            growth_x2_max: 5.0,
            growth_steps: 50,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveCylinderConfig {
    pub period: f64,
    pub repeats: usize,
    pub n: usize,
    /// Time of the spatial-repetition check, in units of the period.
    pub repetition_time: f64,
    /// Samples of the energy over `[0, 3T]`.
    pub energy_steps: usize,
    pub locality_repeats: Vec<usize>,
}

impl Default for WaveCylinderConfig {
    fn default() -> Self {
        WaveCylinderConfig {
            period: 1.0,
            repeats: 4,
            n: 64,
            repetition_time: 1.0 / 3.0,
            energy_steps: 30,
            locality_repeats: vec![8, 16, 32],
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KsCheckConfig {}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn finite(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite")))
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
    }

    /// Checks the section `experiment` will read.
    pub fn validate(&self, experiment: Experiment) -> Result<(), CliError> {
        let grid_err = |e: silab_core::Error| invalid(e.to_string());
        match experiment {
            Experiment::ChshScan => {
                let c = &self.chsh_scan;
                finite("chsh_scan.theta_max", c.theta_max)?;
                if c.points < 2 || c.singlet_points < 1 {
                    return Err(invalid("chsh_scan needs points ≥ 2 and singlet_points ≥ 1"));
                }
                if !(0.0..=PI).contains(&c.theta_max) || c.theta_max == 0.0 {
                    return Err(invalid("chsh_scan.theta_max must lie in (0, π]"));
                }
            }
            Experiment::SiFit => {
                for (k, a) in self.si_fit.angles.iter().enumerate() {
                    finite(&format!("si_fit.angles[{k}]"), *a)?;
                }
            }
            Experiment::WaveMixed => {
                let c = &self.wave_mixed;
                SurfaceGrid::new(c.leakage_n, c.leakage_n, 2.0 * PI, 2.0 * PI).map_err(grid_err)?;
                SurfaceGrid::new(c.field_n, c.field_n, 2.0 * PI, 2.0 * PI).map_err(grid_err)?;
                if c.ensemble < silab_core::wave_mixed::MIN_ENSEMBLE {
                    return Err(invalid(format!(
                        "wave_mixed.ensemble must be at least {}",
                        silab_core::wave_mixed::MIN_ENSEMBLE
                    )));
                }
                finite("wave_mixed.growth_x2_max", c.growth_x2_max)?;
                if c.growth_x2_max <= 0.0 || c.growth_steps == 0 {
                    return Err(invalid(
                        "wave_mixed growth scan needs positive x2_max and steps",
                    ));
                }
            }
            Experiment::WaveCylinder => {
                let c = &self.wave_cylinder;
                let grid = CylinderGrid::new(c.period, c.repeats, c.n).map_err(grid_err)?;
                if !grid.n().is_multiple_of(grid.repeats()) {
                    return Err(invalid("wave_cylinder.n must be a multiple of repeats"));
                }
                finite("wave_cylinder.repetition_time", c.repetition_time)?;
                if c.energy_steps == 0 {
                    return Err(invalid("wave_cylinder.energy_steps must be positive"));
                }
                if let Some(r) = c
                    .locality_repeats
                    .iter()
                    .find(|r| **r < 2 || !r.is_power_of_two())
                {
                    return Err(invalid(format!(
                        "locality repeats must be powers of two ≥ 2, got {r}"
                    )));
                }
            }
            Experiment::KsCheck => {}
        }
        Ok(())
    }

    /// The parameters an experiment depends on, for the results echo.
    pub fn echo(&self, experiment: Experiment) -> Value {
        let section = match experiment {
            Experiment::ChshScan => serde_json::to_value(&self.chsh_scan),
            Experiment::SiFit => serde_json::to_value(&self.si_fit),
            Experiment::WaveMixed => serde_json::to_value(&self.wave_mixed),
            Experiment::WaveCylinder => serde_json::to_value(&self.wave_cylinder),
            Experiment::KsCheck => serde_json::to_value(&self.ks_check),
        }
        .expect("config sections serialize");
        serde_json::json!({ "seed": self.seed, experiment.name().replace('-', "_"): section })
    }
}
