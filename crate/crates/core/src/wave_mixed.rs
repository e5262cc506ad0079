//! The 2+1 massless wave equation `(∂²₁ + ∂²₂ − ∂²ₜ)φ = 0` with data on the
//! timelike plane `x₂ = 0`.
//!
//! Data are `f = φ(x₁, 0, t)` and `g = ∂φ/∂x₂(x₁, 0, t)` on a doubly
//! periodic `(x₁, t)` grid. A Fourier mode `e^{i(k₁x₁ − ωt)}` evolves in `x₂`
//! with `k₂² = ω² − k₁²`: oscillatory when `|ω| > |k₁|`, exponential when
//! `|k₁| > |ω|`. Restricting the data to one side of the cone `|ω| = |k₁|` is
//! the nonlocal constraint; the constrained data can never be compactly
//! supported, and conditioning on data in one region changes the statistics
//! of the data elsewhere.
//!
//! Units have `c = 1`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::rng;
use crate::spectral::{bin_of, is_power_of_two_at_least, max_abs, real_parts, wavenumber, Fft2};

/// Relative tolerance on `|ω² − k₁²|` for treating a mode as lightlike.
pub const MARGINAL_REL_TOL: f64 = 1e-12;

/// Periodic `(x₁, t)` grid for data on the plane `x₂ = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceGrid {
    n1: usize,
    nt: usize,
    l1: f64,
    lt: f64,
}

impl SurfaceGrid {
    pub fn new(n1: usize, nt: usize, l1: f64, lt: f64) -> Result<Self> {
        if !is_power_of_two_at_least(n1, 8) || !is_power_of_two_at_least(nt, 8) {
            return Err(validation(format!(
                "grid sizes {n1}×{nt} must be powers of two ≥ 8"
            )));
        }
        if !(l1.is_finite() && l1 > 0.0 && lt.is_finite() && lt > 0.0) {
            return Err(validation(format!(
                "grid periods {l1}, {lt} must be positive"
            )));
        }
        Ok(SurfaceGrid { n1, nt, l1, lt })
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn l1(&self) -> f64 {
        self.l1
    }

    pub fn lt(&self) -> f64 {
        self.lt
    }

    pub fn len(&self) -> usize {
        self.n1 * self.nt
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.nt + j
    }

    pub fn x1(&self, i: usize) -> f64 {
        i as f64 * self.l1 / self.n1 as f64
    }

    pub fn t(&self, j: usize) -> f64 {
        j as f64 * self.lt / self.nt as f64
    }

    pub fn k1(&self, i: usize) -> f64 {
        wavenumber(i, self.n1, self.l1)
    }

    pub fn omega(&self, j: usize) -> f64 {
        wavenumber(j, self.nt, self.lt)
    }

    fn fft(&self) -> Fft2 {
        Fft2::new(self.n1, self.nt)
    }
}

/// `f(x₁, t)` and `g(x₁, t)` sampled row-major (`i·N_t + j`).
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceData {
    pub grid: SurfaceGrid,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

impl SurfaceData {
    pub fn new(grid: SurfaceGrid, f: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        let data = SurfaceData { grid, f, g };
        data.validate()?;
        Ok(data)
    }

    pub fn zeros(grid: SurfaceGrid) -> Self {
        SurfaceData {
            grid,
            f: vec![0.0; grid.len()],
            g: vec![0.0; grid.len()],
        }
    }

    /// Samples `f` and `g` from closures of `(x₁, t)`.
    pub fn from_fn(
        grid: SurfaceGrid,
        f: impl Fn(f64, f64) -> f64,
        g: impl Fn(f64, f64) -> f64,
    ) -> Self {
        let mut data = Self::zeros(grid);
        for i in 0..grid.n1 {
            for j in 0..grid.nt {
                let k = grid.index(i, j);
                data.f[k] = f(grid.x1(i), grid.t(j));
                data.g[k] = g(grid.x1(i), grid.t(j));
            }
        }
        data
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.grid.len();
        if self.f.len() != n || self.g.len() != n {
            return Err(validation(format!(
                "surface data has {}/{} samples, grid needs {n}",
                self.f.len(),
                self.g.len()
            )));
        }
        if self.f.iter().chain(&self.g).any(|v| !v.is_finite()) {
            return Err(validation("surface data has non-finite samples"));
        }
        Ok(())
    }

    pub fn peak(&self) -> f64 {
        max_abs(&self.f).max(max_abs(&self.g))
    }
}

/// Fourier coefficients of `f` and `g`, normalized so `f = Σ f̃ e^{i(k₁x₁ + ω't)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralData {
    pub grid: SurfaceGrid,
    pub ftilde: Vec<Complex64>,
    pub gtilde: Vec<Complex64>,
}

impl SpectralData {
    pub fn from_surface(data: &SurfaceData) -> Self {
        let fft = data.grid.fft();
        SpectralData {
            grid: data.grid,
            ftilde: fft.forward_real(&data.f),
            gtilde: fft.forward_real(&data.g),
        }
    }

    pub fn zeros(grid: SurfaceGrid) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); grid.len()];
        SpectralData {
            grid,
            ftilde: z.clone(),
            gtilde: z,
        }
    }

    /// Sets the coefficients of signed mode `(m, n)` and of its mirror
    /// `(−m, −n)` to the conjugate values, keeping the fields real.
    pub fn set_mode(&mut self, m: i64, n: i64, f: Complex64, g: Complex64) {
        let a = self
            .grid
            .index(bin_of(m, self.grid.n1), bin_of(n, self.grid.nt));
        let b = self
            .grid
            .index(bin_of(-m, self.grid.n1), bin_of(-n, self.grid.nt));
        if a == b {
            self.ftilde[a] = Complex64::new(f.re, 0.0);
            self.gtilde[a] = Complex64::new(g.re, 0.0);
        } else {
            self.ftilde[a] = f;
            self.gtilde[a] = g;
            self.ftilde[b] = f.conj();
            self.gtilde[b] = g.conj();
        }
    }

    /// Zeroes every coefficient the mask disallows.
    pub fn masked(&self, mask: &ConeMask) -> Result<Self> {
        mask.check(&self.grid)?;
        let mut out = self.clone();
        for (k, allowed) in mask.allowed.iter().enumerate() {
            if !allowed {
                out.ftilde[k] = Complex64::new(0.0, 0.0);
                out.gtilde[k] = Complex64::new(0.0, 0.0);
            }
        }
        Ok(out)
    }

    /// Inverse transform without discarding imaginary parts.
    pub fn inverse_complex(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let fft = self.grid.fft();
        (fft.inverse(&self.ftilde), fft.inverse(&self.gtilde))
    }

    pub fn to_surface(&self) -> SurfaceData {
        let (f, g) = self.inverse_complex();
        SurfaceData {
            grid: self.grid,
            f: real_parts(&f),
            g: real_parts(&g),
        }
    }

    /// `Σ |f̃|² + |g̃|²`, which equals the mean of `f² + g²` over the grid.
    pub fn norm_sq(&self) -> f64 {
        self.ftilde
            .iter()
            .chain(&self.gtilde)
            .map(|c| c.norm_sqr())
            .sum()
    }
}

/// How a mode behaves as it is carried off the surface in `x₂`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModeCharacter {
    /// `k₂ = ±κ` real.
    Oscillatory { kappa: f64 },
    /// `k₂ = ±i·rate`.
    Exponential { rate: f64 },
    /// `k₂ = 0`: the light cone itself.
    Marginal,
}

pub fn mode_character(k1: f64, omega: f64) -> ModeCharacter {
    let (w2, k2) = (omega * omega, k1 * k1);
    let d = w2 - k2;
    if d.abs() <= MARGINAL_REL_TOL * w2.max(k2) {
        ModeCharacter::Marginal
    } else if d > 0.0 {
        ModeCharacter::Oscillatory { kappa: d.sqrt() }
    } else {
        ModeCharacter::Exponential { rate: (-d).sqrt() }
    }
}

/// `φ̃(x₂)` for one mode with `φ̃(0) = f` and `∂φ̃/∂x₂(0) = g`.
pub fn propagate_mode(character: ModeCharacter, f: Complex64, g: Complex64, x2: f64) -> Complex64 {
    match character {
        ModeCharacter::Oscillatory { kappa } => {
            f * (kappa * x2).cos() + g * ((kappa * x2).sin() / kappa)
        }
        ModeCharacter::Exponential { rate } => {
            f * (rate * x2).cosh() + g * ((rate * x2).sinh() / rate)
        }
        ModeCharacter::Marginal => f + g * x2,
    }
}

/// Which side of the cone `|ω| = |k₁|` the constraint keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// Keep `|ω| ≥ |k₁|`: the modes that oscillate in `x₂`.
    OmegaDominant,
    /// Keep `|k₁| ≥ |ω|`.
    KDominant,
}

impl Orientation {
    pub const BOTH: [Orientation; 2] = [Orientation::OmegaDominant, Orientation::KDominant];

    pub fn name(self) -> &'static str {
        match self {
            Orientation::OmegaDominant => "omega-dominant",
            Orientation::KDominant => "k-dominant",
        }
    }
}

/// Allowed-mode set on a [`SurfaceGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct ConeMask {
    n1: usize,
    nt: usize,
    allowed: Vec<bool>,
    /// `None` for the all-pass mask.
    pub orientation: Option<Orientation>,
    /// Whether lightlike modes are removed as well.
    pub strict: bool,
}

impl ConeMask {
    pub fn new(grid: &SurfaceGrid, orientation: Orientation, strict: bool) -> Self {
        let mut allowed = vec![false; grid.len()];
        for i in 0..grid.n1 {
            for j in 0..grid.nt {
                allowed[grid.index(i, j)] =
                    match (mode_character(grid.k1(i), grid.omega(j)), orientation) {
                        (ModeCharacter::Marginal, _) => !strict,
                        (ModeCharacter::Oscillatory { .. }, Orientation::OmegaDominant) => true,
                        (ModeCharacter::Exponential { .. }, Orientation::KDominant) => true,
                        _ => false,
                    };
            }
        }
        ConeMask {
            n1: grid.n1,
            nt: grid.nt,
            allowed,
            orientation: Some(orientation),
            strict,
        }
    }

    pub fn all_pass(grid: &SurfaceGrid) -> Self {
        ConeMask {
            n1: grid.n1,
            nt: grid.nt,
            allowed: vec![true; grid.len()],
            orientation: None,
            strict: false,
        }
    }

    /// Whether signed mode `(m, n)` survives.
    pub fn allows(&self, m: i64, n: i64) -> bool {
        self.allowed[bin_of(m, self.n1) * self.nt + bin_of(n, self.nt)]
    }

    pub fn allowed_count(&self) -> usize {
        self.allowed.iter().filter(|a| **a).count()
    }

    fn check(&self, grid: &SurfaceGrid) -> Result<()> {
        if self.n1 != grid.n1 || self.nt != grid.nt {
            return Err(validation(format!(
                "mask is {}×{}, data grid is {}×{}",
                self.n1, self.nt, grid.n1, grid.nt
            )));
        }
        Ok(())
    }
}

/// Removes every Fourier component the mask disallows from `f` and `g`.
pub fn project_to_cone(data: &SurfaceData, mask: &ConeMask) -> Result<SurfaceData> {
    data.validate()?;
    Ok(SpectralData::from_surface(data).masked(mask)?.to_surface())
}

/// `φ(x₁, x₂, t)` at one fixed `x₂`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSlice {
    pub grid: SurfaceGrid,
    pub x2: f64,
    pub phi: Vec<f64>,
}

impl FieldSlice {
    /// `|φ̃|` of signed mode `(m, n)` in this slice.
    pub fn mode_amplitude(&self, m: i64, n: i64) -> f64 {
        let spec = self.grid.fft().forward_real(&self.phi);
        spec[self
            .grid
            .index(bin_of(m, self.grid.n1), bin_of(n, self.grid.nt))]
        .norm()
    }

    pub fn peak(&self) -> f64 {
        max_abs(&self.phi)
    }
}

/// Carries the surface data to `x₂` mode by mode in closed form, keeping
/// only the modes `mask` allows. Data are not required to lie on the mask;
/// pass [`ConeMask::all_pass`] to evolve every mode, including the growing
/// ones.
pub fn evolve_x2(data: &SurfaceData, mask: &ConeMask, x2: f64) -> Result<FieldSlice> {
    data.validate()?;
    mask.check(&data.grid)?;
    if !x2.is_finite() {
        return Err(validation("x2 must be finite"));
    }
    let grid = data.grid;
    let spec = SpectralData::from_surface(data);
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for i in 0..grid.n1 {
        for j in 0..grid.nt {
            let k = grid.index(i, j);
            if mask.allowed[k] {
                let ch = mode_character(grid.k1(i), grid.omega(j));
                out[k] = propagate_mode(ch, spec.ftilde[k], spec.gtilde[k], x2);
            }
        }
    }
    Ok(FieldSlice {
        grid,
        x2,
        phi: real_parts(&grid.fft().inverse(&out)),
    })
}

/// Periodic `(x₁, x₂)` grid for ordinary spacelike data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    n1: usize,
    n2: usize,
    l1: f64,
    l2: f64,
}

impl SpatialGrid {
    pub fn new(n1: usize, n2: usize, l1: f64, l2: f64) -> Result<Self> {
        if !is_power_of_two_at_least(n1, 8) || !is_power_of_two_at_least(n2, 8) {
            return Err(validation(format!(
                "grid sizes {n1}×{n2} must be powers of two ≥ 8"
            )));
        }
        if !(l1.is_finite() && l1 > 0.0 && l2.is_finite() && l2 > 0.0) {
            return Err(validation(format!(
                "grid periods {l1}, {l2} must be positive"
            )));
        }
        Ok(SpatialGrid { n1, n2, l1, l2 })
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n2 + j
    }

    pub fn x1(&self, i: usize) -> f64 {
        i as f64 * self.l1 / self.n1 as f64
    }

    pub fn x2(&self, j: usize) -> f64 {
        j as f64 * self.l2 / self.n2 as f64
    }

    pub fn area(&self) -> f64 {
        self.l1 * self.l2
    }

    pub fn cell_area(&self) -> f64 {
        self.area() / self.len() as f64
    }

    fn k_sq(&self, i: usize, j: usize) -> f64 {
        let a = wavenumber(i, self.n1, self.l1);
        let b = wavenumber(j, self.n2, self.l2);
        a * a + b * b
    }

    fn check(&self, v: &[f64], what: &str) -> Result<()> {
        if v.len() != self.len() {
            return Err(validation(format!(
                "{what} has {} samples, grid needs {}",
                v.len(),
                self.len()
            )));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(validation(format!("{what} has non-finite samples")));
        }
        Ok(())
    }
}

/// `φ` and `∂φ/∂t` on a spatial grid at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpatialField {
    pub grid: SpatialGrid,
    pub t: f64,
    pub phi: Vec<f64>,
    pub phidot: Vec<f64>,
}

/// Ordinary Cauchy evolution in `t`, exact per mode:
/// `φ̂(t) = φ̂₀ cos|k|t + φ̂̇₀ sin(|k|t)/|k|`.
pub fn evolve_t(phi0: &[f64], phidot0: &[f64], grid: &SpatialGrid, t: f64) -> Result<SpatialField> {
    grid.check(phi0, "phi0")?;
    grid.check(phidot0, "phidot0")?;
    let fft = Fft2::new(grid.n1, grid.n2);
    let p = fft.forward_real(phi0);
    let q = fft.forward_real(phidot0);
    let mut pt = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut qt = pt.clone();
    for i in 0..grid.n1 {
        for j in 0..grid.n2 {
            let idx = grid.index(i, j);
            let k = grid.k_sq(i, j).sqrt();
            if k == 0.0 {
                pt[idx] = p[idx] + q[idx] * t;
                qt[idx] = q[idx];
            } else {
                let (s, c) = (k * t).sin_cos();
                pt[idx] = p[idx] * c + q[idx] * (s / k);
                qt[idx] = -p[idx] * (k * s) + q[idx] * c;
            }
        }
    }
    Ok(SpatialField {
        grid: *grid,
        t,
        phi: real_parts(&fft.inverse(&pt)),
        phidot: real_parts(&fft.inverse(&qt)),
    })
}

/// `Σ (φ̇² + |∇φ|²) ΔA` with the gradient taken spectrally.
///
/// The gradient term is summed in Fourier space (Parseval), which keeps the
/// Nyquist modes consistent with the per-mode evolution.
pub fn energy(phi: &[f64], phidot: &[f64], grid: &SpatialGrid) -> Result<f64> {
    grid.check(phi, "phi")?;
    grid.check(phidot, "phidot")?;
    let kinetic: f64 = phidot.iter().map(|v| v * v).sum::<f64>() * grid.cell_area();
    let p = Fft2::new(grid.n1, grid.n2).forward_real(phi);
    let mut gradient = 0.0;
    for i in 0..grid.n1 {
        for j in 0..grid.n2 {
            gradient += grid.k_sq(i, j) * p[grid.index(i, j)].norm_sqr();
        }
    }
    Ok(kinetic + gradient * grid.area())
}

/// Half-open index rectangle `[i0, i1) × [j0, j1)` on a surface grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexRect {
    pub i0: usize,
    pub i1: usize,
    pub j0: usize,
    pub j1: usize,
}

impl IndexRect {
    pub fn new(i0: usize, i1: usize, j0: usize, j1: usize) -> Self {
        IndexRect { i0, i1, j0, j1 }
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        (self.i0..self.i1).contains(&i) && (self.j0..self.j1).contains(&j)
    }

    pub fn area(&self) -> usize {
        self.i1.saturating_sub(self.i0) * self.j1.saturating_sub(self.j0)
    }

    fn check(&self, grid: &SurfaceGrid) -> Result<()> {
        if self.area() == 0 {
            return Err(validation(format!("region {self:?} is empty")));
        }
        if self.i1 > grid.n1 || self.j1 > grid.nt {
            return Err(Error::Index(format!(
                "region {self:?} exceeds the {}×{} grid",
                grid.n1, grid.nt
            )));
        }
        Ok(())
    }

    fn mean(&self, grid: &SurfaceGrid, v: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in self.i0..self.i1 {
            for j in self.j0..self.j1 {
                s += v[grid.index(i, j)];
            }
        }
        s / self.area() as f64
    }
}

/// Largest `|f|` or `|g|` outside `region`, relative to the largest inside.
pub fn tail_mass(data: &SurfaceData, region: &IndexRect) -> Result<f64> {
    data.validate()?;
    region.check(&data.grid)?;
    let grid = data.grid;
    let (mut inside, mut outside) = (0.0_f64, 0.0_f64);
    for i in 0..grid.n1 {
        for j in 0..grid.nt {
            let k = grid.index(i, j);
            let v = data.f[k].abs().max(data.g[k].abs());
            if region.contains(i, j) {
                inside = inside.max(v);
            } else {
                outside = outside.max(v);
            }
        }
    }
    Ok(match (outside, inside) {
        (0.0, _) => 0.0,
        (_, 0.0) => f64::INFINITY,
        (o, p) => o / p,
    })
}

/// Raised-cosine window on the central quarter of an `n`-point axis:
/// nonzero on samples strictly between `3n/8` and `5n/8`.
fn raised_cosine(n: usize) -> Vec<f64> {
    let start = 3 * n / 8;
    let width = n / 4;
    (0..n)
        .map(|i| {
            if (start..=start + width).contains(&i) {
                0.5 * (1.0 - (2.0 * PI * (i - start) as f64 / width as f64).cos())
            } else {
                0.0
            }
        })
        .collect()
}

/// Bump `f = w(x₁)w(t)`, `g = 0`, and the rectangle holding its support.
pub fn raised_cosine_bump(grid: &SurfaceGrid) -> (SurfaceData, IndexRect) {
    let w1 = raised_cosine(grid.n1);
    let wt = raised_cosine(grid.nt);
    let mut data = SurfaceData::zeros(*grid);
    for i in 0..grid.n1 {
        for j in 0..grid.nt {
            data.f[grid.index(i, j)] = w1[i] * wt[j];
        }
    }
    let rect = IndexRect::new(
        3 * grid.n1 / 8,
        3 * grid.n1 / 8 + grid.n1 / 4 + 1,
        3 * grid.nt / 8,
        3 * grid.nt / 8 + grid.nt / 4 + 1,
    );
    (data, rect)
}

/// Tail of the projected bump outside the bump's own support.
pub fn cone_leakage(grid: &SurfaceGrid, mask: &ConeMask) -> Result<f64> {
    let (bump, support) = raised_cosine_bump(grid);
    tail_mass(&project_to_cone(&bump, mask)?, &support)
}

/// Regions `A`, `B` (the "settings") and `Λ` (the "state") on the surface.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldRegions {
    pub a: IndexRect,
    pub b: IndexRect,
    pub lambda: IndexRect,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSiReport {
    pub ensemble: usize,
    pub seed: u64,
    /// `Var(Y)` for `Y` the mean of `f` over `Λ`.
    pub unconditioned_variance: f64,
    /// `Var(Y | data in A and B)`.
    pub conditioned_variance: f64,
    pub ratio: f64,
}

pub const MIN_ENSEMBLE: usize = 100;

/// Estimates how much the field in `Λ` depends on the data in `A` and `B`.
///
/// Draws `ensemble` pairs of white-noise fields `(f, g)`, projects them with
/// `mask`, and compares the variance of `Y = mean_Λ f` before and after
/// conditioning on `X = (mean_A f, mean_A g, mean_B f, mean_B g)`. The
/// ensemble is Gaussian, so the conditional variance is the residual
/// variance of the linear regression of `Y` on `X`, and it is the same for
/// every conditioning value, including data pinned near zero. A ratio of 1
/// means the data in `A` and `B` say nothing about `Λ`.
pub fn si_field_analogue(
    grid: &SurfaceGrid,
    regions: &FieldRegions,
    mask: &ConeMask,
    ensemble: usize,
    seed: u64,
) -> Result<FieldSiReport> {
    if ensemble < MIN_ENSEMBLE {
        return Err(validation(format!(
            "ensemble of {ensemble} is below the minimum {MIN_ENSEMBLE}"
        )));
    }
    for r in [&regions.a, &regions.b, &regions.lambda] {
        r.check(grid)?;
    }
    mask.check(grid)?;

    let mut rng = rng::stream(seed, "wave-mixed/field-ensemble");
    let mut samples: Vec<[f64; 5]> = Vec::with_capacity(ensemble);
    for _ in 0..ensemble {
        let f: Vec<f64> = (0..grid.len())
            .map(|_| rng.sample(StandardNormal))
            .collect();
        let g: Vec<f64> = (0..grid.len())
            .map(|_| rng.sample(StandardNormal))
            .collect();
        let d = project_to_cone(&SurfaceData { grid: *grid, f, g }, mask)?;
        samples.push([
            regions.lambda.mean(grid, &d.f),
            regions.a.mean(grid, &d.f),
            regions.a.mean(grid, &d.g),
            regions.b.mean(grid, &d.f),
            regions.b.mean(grid, &d.g),
        ]);
    }

    let n = ensemble as f64;
    let mut mean = [0.0; 5];
    for s in &samples {
        for (m, v) in mean.iter_mut().zip(s) {
            *m += v / n;
        }
    }
    let mut cov = [[0.0; 5]; 5];
    for s in &samples {
        for a in 0..5 {
            for b in 0..5 {
                cov[a][b] += (s[a] - mean[a]) * (s[b] - mean[b]) / (n - 1.0);
            }
        }
    }
    let unconditioned = cov[0][0];
    let conditioned = residual_variance(cov);
    Ok(FieldSiReport {
        ensemble,
        seed,
        unconditioned_variance: unconditioned,
        conditioned_variance: conditioned,
        ratio: if unconditioned > 0.0 {
            conditioned / unconditioned
        } else {
            0.0
        },
    })
}

/// Residual variance of variable 0 after sweeping out variables 1..5.
/// Regressors already explained by earlier ones are skipped.
fn residual_variance(mut c: [[f64; 5]; 5]) -> f64 {
    let diag: Vec<f64> = (0..5).map(|k| c[k][k]).collect();
    for k in 1..5 {
        let p = c[k][k];
        if p <= 1e-12 * diag[k] || p <= 0.0 {
            continue;
        }
        let row = c[k];
        for i in 0..5 {
            for j in 0..5 {
                if i != k && j != k {
                    c[i][j] -= c[i][k] * row[j] / p;
                }
            }
        }
        for i in 0..5 {
            c[i][k] = 0.0;
            c[k][i] = 0.0;
        }
    }
    c[0][0].max(0.0)
}

/// Outcome of the single-mode stability probe for one orientation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub orientation: Orientation,
    /// Allowed, non-lightlike probe mode `(m, n)`.
    pub probe_mode: (i64, i64),
    /// `max |amplitude(x₂) − 1|` over `x₂ ∈ [0, 10]`.
    pub probe_max_deviation: f64,
    /// Whether `(k₁, ω) = (1, 0)` is excluded by the mask.
    pub growth_mode_disallowed: bool,
    /// Amplitude of `(1, 0)` at `x₂ = 5` with `f̃ = g̃ = 1`.
    pub growth_amplitude: f64,
    /// `e⁵`.
    pub growth_analytic: f64,
    pub passes: bool,
}

pub const STABILITY_TOL: f64 = 1e-6;
pub const GROWTH_REL_TOL: f64 = 0.01;

/// The 16×16 grid with both periods `2π`, so bin `m` has wavenumber `m`.
pub fn unit_mode_grid() -> SurfaceGrid {
    SurfaceGrid::new(16, 16, 2.0 * PI, 2.0 * PI).expect("fixed grid is valid")
}

/// Single-mode data with `φ̃(x₂) = e^{i k₂ x₂}`, `k₂` the principal root of
/// `ω² − k₁²`: a pure wave when the mode oscillates, a pure decay otherwise.
pub fn single_mode_data(grid: &SurfaceGrid, m: i64, n: i64) -> SurfaceData {
    let k1 = 2.0 * PI * m as f64 / grid.l1;
    let w = 2.0 * PI * n as f64 / grid.lt;
    let k2 = Complex64::new(w * w - k1 * k1, 0.0).sqrt();
    let mut spec = SpectralData::zeros(*grid);
    spec.set_mode(m, n, Complex64::new(1.0, 0.0), Complex64::i() * k2);
    spec.to_surface()
}

/// Runs the stability dichotomy for one cone orientation: an allowed mode
/// must keep constant amplitude over `x₂ ∈ [0, 10]`, and the mode
/// `(k₁, ω) = (1, 0)` must be excluded and grow like `e^{x₂}`.
pub fn stability_dichotomy(orientation: Orientation) -> Result<StabilityReport> {
    let grid = unit_mode_grid();
    let mask = ConeMask::new(&grid, orientation, false);
    let probe = [(0, 1), (1, 0)]
        .into_iter()
        .find(|&(m, n)| {
            mask.allows(m, n) && mode_character(m as f64, n as f64) != ModeCharacter::Marginal
        })
        .ok_or_else(|| Error::Validation("no admissible probe mode".into()))?;

    let data = single_mode_data(&grid, probe.0, probe.1);
    let mut dev: f64 = 0.0;
    for step in 0..=100 {
        let x2 = 0.1 * step as f64;
        let amp = evolve_x2(&data, &mask, x2)?.mode_amplitude(probe.0, probe.1);
        dev = dev.max((amp - 1.0).abs());
    }

    let mut spec = SpectralData::zeros(grid);
    spec.set_mode(1, 0, Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
    let growth =
        evolve_x2(&spec.to_surface(), &ConeMask::all_pass(&grid), 5.0)?.mode_amplitude(1, 0);
    let analytic = 5.0_f64.exp();
    let disallowed = !mask.allows(1, 0);
    let passes = dev < STABILITY_TOL
        && disallowed
        && ((growth - analytic) / analytic).abs() < GROWTH_REL_TOL;
    Ok(StabilityReport {
        orientation,
        probe_mode: probe,
        probe_max_deviation: dev,
        growth_mode_disallowed: disallowed,
        growth_amplitude: growth,
        growth_analytic: analytic,
        passes,
    })
}

/// `(x₂, measured amplitude, e^{x₂})` for the `(1, 0)` mode with `f̃ = g̃ = 1`.
pub fn growth_scan(x2_max: f64, steps: usize) -> Result<Vec<[f64; 3]>> {
    if steps == 0 || !(x2_max.is_finite() && x2_max > 0.0) {
        return Err(validation("growth scan needs positive x2_max and steps"));
    }
    let grid = unit_mode_grid();
    let mut spec = SpectralData::zeros(grid);
    spec.set_mode(1, 0, Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
    let data = spec.to_surface();
    let all = ConeMask::all_pass(&grid);
    (0..=steps)
        .map(|s| {
            let x2 = x2_max * s as f64 / steps as f64;
            Ok([
                x2,
                evolve_x2(&data, &all, x2)?.mode_amplitude(1, 0),
                x2.exp(),
            ])
        })
        .collect()
}

/// Agreement between the `x₂`-evolution of surface data and the ordinary
/// `t`-evolution of the same solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualEvolutionReport {
    pub seed: u64,
    pub points: usize,
    pub max_abs_diff: f64,
    pub peak: f64,
    pub relative: f64,
    /// `max |project(data) − data|`, confirming the data satisfy the constraint.
    pub constraint_residual: f64,
}

/// Builds a random superposition of plane waves `cos(k₁x₁ + k₂x₂ − ωt + δ)`
/// with integer `ω² = k₁² + k₂²`, evolves its surface data in `x₂` and its
/// spatial data in `t`, and compares the two on shared spacetime points.
pub fn dual_evolution_check(seed: u64) -> Result<DualEvolutionReport> {
    const N: usize = 32;
    let l = 2.0 * PI;
    let surface = SurfaceGrid::new(N, N, l, l)?;
    let spatial = SpatialGrid::new(N, N, l, l)?;
    // (k1, k2, omega), all with omega ≥ |k1|.
    const TRIPLES: [(f64, f64, f64); 9] = [
        (0.0, 1.0, 1.0),
        (1.0, 0.0, 1.0),
        (3.0, 4.0, 5.0),
        (-4.0, 3.0, 5.0),
        (0.0, -2.0, 2.0),
        (6.0, -8.0, 10.0),
        (-5.0, 12.0, 13.0),
        (8.0, 6.0, 10.0),
        (2.0, 0.0, 2.0),
    ];
    let mut rng = rng::stream(seed, "wave-mixed/dual-evolution");
    let waves: Vec<(f64, f64, f64, f64, f64)> = TRIPLES
        .iter()
        .map(|&(k1, k2, w)| {
            (
                k1,
                k2,
                w,
                rng.random_range(0.2..1.0),
                rng.random_range(0.0..2.0 * PI),
            )
        })
        .collect();
    let phase = |x1: f64, x2: f64, t: f64, &(k1, k2, w, _, d): &(f64, f64, f64, f64, f64)| {
        k1 * x1 + k2 * x2 - w * t + d
    };
    let field = |x1: f64, x2: f64, t: f64| {
        waves
            .iter()
            .map(|wv| wv.3 * phase(x1, x2, t, wv).cos())
            .sum::<f64>()
    };
    let d_x2 = |x1: f64, x2: f64, t: f64| -> f64 {
        waves
            .iter()
            .map(|wv| -wv.3 * wv.1 * phase(x1, x2, t, wv).sin())
            .sum()
    };
    let d_t = |x1: f64, x2: f64, t: f64| -> f64 {
        waves
            .iter()
            .map(|wv| wv.3 * wv.2 * phase(x1, x2, t, wv).sin())
            .sum()
    };

    let data = SurfaceData::from_fn(surface, |x1, t| field(x1, 0.0, t), |x1, t| d_x2(x1, 0.0, t));
    let mask = ConeMask::new(&surface, Orientation::OmegaDominant, false);
    let projected = project_to_cone(&data, &mask)?;
    let constraint_residual = data
        .f
        .iter()
        .chain(&data.g)
        .zip(projected.f.iter().chain(&projected.g))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let mut phi0 = vec![0.0; spatial.len()];
    let mut phidot0 = vec![0.0; spatial.len()];
    for i in 0..N {
        for j in 0..N {
            phi0[spatial.index(i, j)] = field(spatial.x1(i), spatial.x2(j), 0.0);
            phidot0[spatial.index(i, j)] = d_t(spatial.x1(i), spatial.x2(j), 0.0);
        }
    }

    let (mut diff, mut peak, mut points) = (0.0_f64, 0.0_f64, 0usize);
    let x2_slots = [0usize, 5, 11, 24];
    let slices: Vec<FieldSlice> = x2_slots
        .iter()
        .map(|&p| evolve_x2(&data, &mask, spatial.x2(p)))
        .collect::<Result<_>>()?;
    for jt in (0..N).step_by(3) {
        let t = surface.t(jt);
        let st = evolve_t(&phi0, &phidot0, &spatial, t)?;
        for (slice, &p) in slices.iter().zip(&x2_slots) {
            for i in 0..N {
                let a = slice.phi[surface.index(i, jt)];
                let b = st.phi[spatial.index(i, p)];
                diff = diff.max((a - b).abs());
                peak = peak.max(a.abs()).max(b.abs());
                points += 1;
            }
        }
    }
    Ok(DualEvolutionReport {
        seed,
        points,
        max_abs_diff: diff,
        peak,
        relative: if peak > 0.0 { diff / peak } else { 0.0 },
        constraint_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> SurfaceGrid {
        SurfaceGrid::new(n, n, 2.0 * PI, 2.0 * PI).unwrap()
    }

    #[test]
    fn mode_character_examples() {
        assert_eq!(
            mode_character(0.0, 1.0),
            ModeCharacter::Oscillatory { kappa: 1.0 }
        );
        assert_eq!(
            mode_character(1.0, 0.0),
            ModeCharacter::Exponential { rate: 1.0 }
        );
        assert_eq!(
            mode_character(3.0, 5.0),
            ModeCharacter::Oscillatory { kappa: 4.0 }
        );
        assert_eq!(mode_character(2.0, -2.0), ModeCharacter::Marginal);
        assert_eq!(mode_character(0.0, 0.0), ModeCharacter::Marginal);
    }

    #[test]
    fn grid_validation() {
        assert!(SurfaceGrid::new(12, 16, 1.0, 1.0).is_err());
        assert!(SurfaceGrid::new(4, 16, 1.0, 1.0).is_err());
        assert!(SurfaceGrid::new(8, 8, 0.0, 1.0).is_err());
        assert!(SpatialGrid::new(8, 8, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn mask_symmetry_and_orientation() {
        let g = grid(16);
        for o in Orientation::BOTH {
            let mask = ConeMask::new(&g, o, false);
            for m in -7..=8 {
                for n in -7..=8 {
                    assert_eq!(mask.allows(m, n), mask.allows(-m, -n));
                }
            }
        }
        let omega = ConeMask::new(&g, Orientation::OmegaDominant, false);
        assert!(omega.allows(0, 3) && omega.allows(3, 3) && !omega.allows(3, 2));
        let strict = ConeMask::new(&g, Orientation::OmegaDominant, true);
        assert!(!strict.allows(3, 3) && !strict.allows(0, 0) && strict.allows(2, 3));
    }

    #[test]
    fn projection_fixed_point_and_kill() {
        let g = grid(16);
        let mask = ConeMask::new(&g, Orientation::OmegaDominant, false);
        let allowed = single_mode_data(&g, 2, 5);
        let p = project_to_cone(&allowed, &mask).unwrap();
        for (a, b) in allowed.f.iter().zip(&p.f).chain(allowed.g.iter().zip(&p.g)) {
            assert!((a - b).abs() < 1e-12);
        }
        let banned = SurfaceData::from_fn(g, |x1, t| (3.0 * x1 - t).cos(), |_, _| 0.0);
        let p = project_to_cone(&banned, &mask).unwrap();
        assert!(p.peak() < 1e-12);
    }

    #[test]
    fn evolve_closed_form() {
        let g = grid(16);
        let mut spec = SpectralData::zeros(g);
        spec.set_mode(0, 1, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        let slice = evolve_x2(&spec.to_surface(), &ConeMask::all_pass(&g), PI).unwrap();
        // mode (0, 1) carries f̃ = 1 at both ±1 bins
        let amp = Fft2::new(16, 16).forward_real(&slice.phi)[g.index(0, 1)];
        assert!((amp - Complex64::new(-1.0, 0.0)).norm() < 1e-12);

        let zero = evolve_x2(&SurfaceData::zeros(g), &ConeMask::all_pass(&g), 3.0).unwrap();
        assert_eq!(zero.peak(), 0.0);
    }

    #[test]
    fn disallowed_mode_grows_like_exponential() {
        let rows = growth_scan(5.0, 5).unwrap();
        for [x2, amp, analytic] in rows {
            assert!(((amp - analytic) / analytic).abs() < 0.01, "x2 = {x2}");
        }
    }

    #[test]
    fn evolve_t_standing_wave() {
        let sg = SpatialGrid::new(16, 16, 2.0 * PI, 2.0 * PI).unwrap();
        let k = 3.0;
        let mut phi0 = vec![0.0; sg.len()];
        for i in 0..16 {
            for j in 0..16 {
                phi0[sg.index(i, j)] = (k * sg.x1(i)).cos();
            }
        }
        let t = 0.37;
        let out = evolve_t(&phi0, &vec![0.0; sg.len()], &sg, t).unwrap();
        for i in 0..16 {
            for j in 0..16 {
                let exact = (k * sg.x1(i)).cos() * (k * t).cos();
                assert!((out.phi[sg.index(i, j)] - exact).abs() < 1e-12);
            }
        }
        let z = evolve_t(&vec![0.0; sg.len()], &vec![0.0; sg.len()], &sg, 1.0).unwrap();
        assert_eq!(max_abs(&z.phi), 0.0);
    }

    #[test]
    fn energy_examples() {
        let sg = SpatialGrid::new(8, 8, 1.0, 1.0).unwrap();
        let zero = vec![0.0; sg.len()];
        assert_eq!(energy(&zero, &zero, &sg).unwrap(), 0.0);
        let ones = vec![1.0; sg.len()];
        assert!((energy(&zero, &ones, &sg).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tail_mass_examples() {
        let g = grid(16);
        let region = IndexRect::new(4, 8, 4, 8);
        let mut inside_only = SurfaceData::zeros(g);
        inside_only.f[g.index(5, 5)] = 2.0;
        assert_eq!(tail_mass(&inside_only, &region).unwrap(), 0.0);
        let constant = SurfaceData::from_fn(g, |_, _| 0.3, |_, _| 0.3);
        assert_eq!(tail_mass(&constant, &region).unwrap(), 1.0);
        assert!(matches!(
            tail_mass(&constant, &IndexRect::new(3, 3, 0, 4)),
            Err(Error::Validation(_))
        ));
        assert!(tail_mass(&constant, &IndexRect::new(0, 17, 0, 4)).is_err());
    }

    #[test]
    fn bump_support_is_central_quarter() {
        let g = grid(64);
        let (bump, rect) = raised_cosine_bump(&g);
        assert_eq!(rect, IndexRect::new(24, 41, 24, 41));
        assert_eq!(tail_mass(&bump, &rect).unwrap(), 0.0);
        assert_eq!(bump.f[g.index(32, 32)], 1.0);
    }

    #[test]
    fn small_ensembles_are_rejected() {
        let g = grid(16);
        let r = IndexRect::new(0, 2, 0, 2);
        let regions = FieldRegions {
            a: r,
            b: r,
            lambda: r,
        };
        let err = si_field_analogue(&g, &regions, &ConeMask::all_pass(&g), 99, 1);
        assert!(matches!(err, Err(Error::Validation(_))));
    }

    #[test]
    fn sweep_matches_direct_regression() {
        // Y = X1 + noise of variance 1, X1 variance 4, other regressors independent.
        let mut c = [[0.0; 5]; 5];
        for (k, row) in c.iter_mut().enumerate() {
            row[k] = 1.0;
        }
        c[0][0] = 5.0;
        c[1][1] = 4.0;
        c[0][1] = 4.0;
        c[1][0] = 4.0;
        assert!((residual_variance(c) - 1.0).abs() < 1e-15);
    }
}
