//! The 1+1 wave equation on a spacetime whose time direction is a circle of
//! circumference `T`.
//!
//! Solutions must return to their initial data after time `T`, so only
//! plane waves with `k = 2πn/T` survive. Space is compactified to
//! `L = r·T` with integer `r`, which makes the admissible wavenumbers the
//! exact subset `m ≡ 0 (mod r)` of the spatial grid modes `k = 2πm/L`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::rng;
use crate::spectral::{is_power_of_two_at_least, max_abs, real_parts, signed_mode, Fft1};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderGrid {
    period: f64,
    repeats: usize,
    n: usize,
}

impl CylinderGrid {
    /// `period` is `T`, `repeats` is `r` (so `L = rT`), `n` the sample count.
    pub fn new(period: f64, repeats: usize, n: usize) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(validation(format!(
                "time circumference {period} must be positive"
            )));
        }
        if repeats == 0 {
            return Err(validation("spatial repeat count r must be at least 1"));
        }
        if !is_power_of_two_at_least(n, 8) {
            return Err(validation(format!(
                "sample count {n} must be a power of two ≥ 8"
            )));
        }
        if n < 2 * repeats {
            return Err(validation(format!(
                "{n} samples cannot resolve a mode with r = {repeats}"
            )));
        }
        Ok(CylinderGrid { period, repeats, n })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn repeats(&self) -> usize {
        self.repeats
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.repeats as f64 * self.period
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    /// `k = 2πm/L` for bin `idx`.
    pub fn wavenumber(&self, idx: usize) -> f64 {
        2.0 * PI * signed_mode(idx, self.n) as f64 / self.length()
    }
}

/// `f = φ(x, 0)` and `g = φ̇(x, 0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderData {
    pub grid: CylinderGrid,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

impl CylinderData {
    pub fn new(grid: CylinderGrid, f: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        let d = CylinderData { grid, f, g };
        d.validate()?;
        Ok(d)
    }

    pub fn zeros(grid: CylinderGrid) -> Self {
        CylinderData {
            grid,
            f: vec![0.0; grid.n],
            g: vec![0.0; grid.n],
        }
    }

    pub fn from_fn(grid: CylinderGrid, f: impl Fn(f64) -> f64, g: impl Fn(f64) -> f64) -> Self {
        CylinderData {
            grid,
            f: (0..grid.n).map(|i| f(grid.x(i))).collect(),
            g: (0..grid.n).map(|i| g(grid.x(i))).collect(),
        }
    }

    /// Independent standard-normal samples for `f` and `g`.
    pub fn gaussian(grid: CylinderGrid, seed: u64) -> Self {
        let mut rng = rng::stream(seed, "wave-cylinder/gaussian-data");
        let f = (0..grid.n).map(|_| rng.sample(StandardNormal)).collect();
        let g = (0..grid.n).map(|_| rng.sample(StandardNormal)).collect();
        CylinderData { grid, f, g }
    }

    pub fn validate(&self) -> Result<()> {
        if self.f.len() != self.grid.n || self.g.len() != self.grid.n {
            return Err(validation(format!(
                "cylinder data has {}/{} samples, grid needs {}",
                self.f.len(),
                self.g.len(),
                self.grid.n
            )));
        }
        if self.f.iter().chain(&self.g).any(|v| !v.is_finite()) {
            return Err(validation("cylinder data has non-finite samples"));
        }
        Ok(())
    }

    pub fn peak(&self) -> f64 {
        max_abs(&self.f).max(max_abs(&self.g))
    }

    /// `(φ̂(k, 0), φ̂ₜ(k, 0))`.
    pub fn spectra(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let fft = Fft1::new(self.grid.n);
        (fft.forward_real(&self.f), fft.forward_real(&self.g))
    }

    /// Left- and right-moving amplitudes `(F̂, Ĝ)` with
    /// `φ̂(k, t) = F̂ e^{−ikt} + Ĝ e^{ikt}`.
    ///
    /// At `k = 0` the split does not exist; the bin carries `F̂ = φ̂(0, 0)`,
    /// `Ĝ = 0`, and the secular rate `φ̂ₜ(0, 0)` is not represented.
    pub fn two_wave_split(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let (p, q) = self.spectra();
        let mut fh = vec![Complex64::new(0.0, 0.0); self.grid.n];
        let mut gh = fh.clone();
        for idx in 0..self.grid.n {
            let k = self.grid.wavenumber(idx);
            if k == 0.0 {
                fh[idx] = p[idx];
            } else {
                let w = Complex64::i() * q[idx] / k;
                fh[idx] = 0.5 * (p[idx] + w);
                gh[idx] = 0.5 * (p[idx] - w);
            }
        }
        (fh, gh)
    }
}

/// Bins of the spatial grid whose plane waves have period `T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderModeSet {
    pub n: usize,
    pub repeats: usize,
    /// Allowed signed modes `m`, ascending by bin.
    pub modes: Vec<i64>,
    /// Whether `m = 0` (the spatially constant, possibly secular mode) is included.
    pub includes_zero: bool,
}

impl CylinderModeSet {
    pub fn contains_bin(&self, idx: usize) -> bool {
        signed_mode(idx, self.n) % self.repeats as i64 == 0
    }

    /// Nonzero allowed wavenumbers counted with both signs; the Nyquist
    /// mode counts as the pair `±N/2`.
    pub fn nonzero_wavenumber_count(&self) -> usize {
        2 * self.modes.iter().filter(|&&m| m > 0).count()
    }
}

pub fn allowed_modes(grid: &CylinderGrid) -> CylinderModeSet {
    let r = grid.repeats as i64;
    let modes: Vec<i64> = (0..grid.n)
        .map(|idx| signed_mode(idx, grid.n))
        .filter(|m| m % r == 0)
        .collect();
    CylinderModeSet {
        n: grid.n,
        repeats: grid.repeats,
        includes_zero: modes.contains(&0),
        modes,
    }
}

/// Keeps only modes with `k = 2πn/T` and removes the mean of `g`, which
/// would otherwise drive the non-periodic drift `φ = a + bt`.
pub fn project_periodic(data: &CylinderData) -> Result<CylinderData> {
    data.validate()?;
    let set = allowed_modes(&data.grid);
    let (mut p, mut q) = data.spectra();
    for idx in 0..data.grid.n {
        if !set.contains_bin(idx) {
            p[idx] = Complex64::new(0.0, 0.0);
            q[idx] = Complex64::new(0.0, 0.0);
        }
    }
    q[0] = Complex64::new(0.0, 0.0);
    let fft = Fft1::new(data.grid.n);
    Ok(CylinderData {
        grid: data.grid,
        f: real_parts(&fft.inverse(&p)),
        g: real_parts(&fft.inverse(&q)),
    })
}

/// Exact evolution to time `t`; returns `(φ(·, t), φ̇(·, t))` as new data.
pub fn evolve_cylinder(data: &CylinderData, t: f64) -> Result<CylinderData> {
    data.validate()?;
    if !t.is_finite() {
        return Err(validation("evolution time must be finite"));
    }
    let (p, q) = data.spectra();
    let (fh, gh) = data.two_wave_split();
    let mut pt = vec![Complex64::new(0.0, 0.0); data.grid.n];
    let mut qt = pt.clone();
    for idx in 0..data.grid.n {
        let k = data.grid.wavenumber(idx);
        if k == 0.0 {
            pt[idx] = p[idx] + q[idx] * t;
            qt[idx] = q[idx];
        } else {
            let back = Complex64::from_polar(1.0, -k * t);
            let fwd = Complex64::from_polar(1.0, k * t);
            pt[idx] = fh[idx] * back + gh[idx] * fwd;
            qt[idx] = Complex64::i() * k * (gh[idx] * fwd - fh[idx] * back);
        }
    }
    let fft = Fft1::new(data.grid.n);
    Ok(CylinderData {
        grid: data.grid,
        f: real_parts(&fft.inverse(&pt)),
        g: real_parts(&fft.inverse(&qt)),
    })
}

/// `max(|f_T − f₀|, |g_T − g₀|)` relative to the peak of the initial data.
pub fn periodicity_residual(data: &CylinderData) -> Result<f64> {
    let peak = data.peak();
    if peak == 0.0 {
        data.validate()?;
        return Ok(0.0);
    }
    let later = evolve_cylinder(data, data.grid.period)?;
    let diff = data
        .f
        .iter()
        .zip(&later.f)
        .chain(data.g.iter().zip(&later.g))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(diff / peak)
}

/// `max |φ(x + T, t) − φ(x, t)|` relative to the peak of `φ(·, t)`.
pub fn spatial_repetition_residual(data: &CylinderData, t: f64) -> Result<f64> {
    let grid = data.grid;
    if !grid.n.is_multiple_of(grid.repeats) {
        return Err(validation(format!(
            "shift by T is not a whole number of samples ({} samples, r = {})",
            grid.n, grid.repeats
        )));
    }
    let shift = grid.n / grid.repeats;
    let phi = evolve_cylinder(data, t)?.f;
    let peak = max_abs(&phi);
    if peak == 0.0 {
        return Ok(0.0);
    }
    let diff = (0..grid.n)
        .map(|i| (phi[(i + shift) % grid.n] - phi[i]).abs())
        .fold(0.0, f64::max);
    Ok(diff / peak)
}

/// `Σ (g² + (∂f/∂x)²) Δx`, gradient term via Parseval.
pub fn cylinder_energy(data: &CylinderData) -> Result<f64> {
    data.validate()?;
    let (p, _) = data.spectra();
    let kinetic: f64 = data.g.iter().map(|v| v * v).sum::<f64>() * data.grid.dx();
    let gradient: f64 = p
        .iter()
        .enumerate()
        .map(|(idx, c)| data.grid.wavenumber(idx).powi(2) * c.norm_sqr())
        .sum::<f64>()
        * data.grid.length();
    Ok(kinetic + gradient)
}

/// Outcome of [`locality_probe`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalityReport {
    pub repeats: usize,
    pub seed: u64,
    pub time: f64,
    /// `max |Δf|, |Δg|` between the two projected data sets on the window.
    pub window_mismatch: f64,
    /// `|Δφ|` at the window center after evolving both data sets.
    pub center_difference: f64,
}

/// Compares two projected data sets that agree on the window `|x| ≤ T/4`.
///
/// Both start from the same seeded Gaussian data; the second also carries a
/// raised-cosine bump of width `T/2` in `f`, centered at `x = 3T/2`. After
/// projection the bump is spread over all `r` periods with weight `1/r` and
/// still vanishes on the window. Both sets are evolved to `t = T/10` and
/// compared at `x = 0`. Uses `T = 1` and `32` samples per period.
pub fn locality_probe(repeats: usize, seed: u64) -> Result<LocalityReport> {
    if repeats < 2 || !repeats.is_power_of_two() {
        return Err(validation(format!(
            "locality probe needs r a power of two ≥ 2, got {repeats}"
        )));
    }
    let grid = CylinderGrid::new(1.0, repeats, 32 * repeats)?;
    let base = CylinderData::gaussian(grid, seed);
    let bump = |x: f64| {
        let u = (x - 1.5) / 0.25;
        if u.abs() < 1.0 {
            0.5 * (1.0 + (PI * u).cos())
        } else {
            0.0
        }
    };
    let mut bumped = base.clone();
    for (i, f) in bumped.f.iter_mut().enumerate() {
        *f += bump(grid.x(i));
    }
    let (p0, p1) = (project_periodic(&base)?, project_periodic(&bumped)?);

    let quarter = grid.n / (4 * repeats);
    let window_mismatch = (0..grid.n)
        .filter(|&i| i <= quarter || i >= grid.n - quarter)
        .map(|i| (p0.f[i] - p1.f[i]).abs().max((p0.g[i] - p1.g[i]).abs()))
        .fold(0.0, f64::max);

    let time = 0.1 * grid.period;
    let center_difference =
        (evolve_cylinder(&p0, time)?.f[0] - evolve_cylinder(&p1, time)?.f[0]).abs();
    Ok(LocalityReport {
        repeats,
        seed,
        time,
        window_mismatch,
        center_difference,
    })
}
