//! Benchmark fixtures.

use std::f64::consts::PI;

use silab_core::bell::{
    enumerate_deterministic_models, singlet_table, CorrelationTable, HiddenState,
};
use silab_core::wave_cylinder::{CylinderData, CylinderGrid};
use silab_core::wave_mixed::{raised_cosine_bump, SurfaceData, SurfaceGrid};
use silab_core::Result;

/// Singlet correlations at (0, π/2, π/4, 3π/4) and the 16 deterministic states.
pub fn singlet_fit_inputs() -> Result<(CorrelationTable, Vec<HiddenState>)> {
    let table = singlet_table(0.0, PI / 2.0, PI / 4.0, 3.0 * PI / 4.0)?;
    Ok((table, enumerate_deterministic_models()))
}

/// The raised-cosine bump on an `n × n` grid of side 2π.
pub fn bump_surface(n: usize) -> Result<SurfaceData> {
    let grid = SurfaceGrid::new(n, n, 2.0 * PI, 2.0 * PI)?;
    Ok(raised_cosine_bump(&grid).0)
}

pub fn gaussian_cylinder(repeats: usize, n: usize, seed: u64) -> Result<CylinderData> {
    Ok(CylinderData::gaussian(
        CylinderGrid::new(1.0, repeats, n)?,
        seed,
    ))
}
