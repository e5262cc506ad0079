//! Thin wrappers over `rustfft` for periodic grids.
//!
//! Forward transforms are normalized by `1/N`, so a field is the plain sum
//! of its coefficients times `e^{+i k·x}`. Index `m` of an `N`-point axis
//! stands for the signed mode `m` when `m ≤ N/2` and `m − N` otherwise; the
//! Nyquist bin is taken as `+N/2`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub fn signed_mode(idx: usize, n: usize) -> i64 {
    if idx <= n / 2 {
        idx as i64
    } else {
        idx as i64 - n as i64
    }
}

/// Bin holding signed mode `m` on an `n`-point axis.
pub fn bin_of(m: i64, n: usize) -> usize {
    m.rem_euclid(n as i64) as usize
}

/// Angular wavenumber of bin `idx` on an axis of period `length`.
pub fn wavenumber(idx: usize, n: usize, length: f64) -> f64 {
    2.0 * PI * signed_mode(idx, n) as f64 / length
}

pub fn is_power_of_two_at_least(n: usize, min: usize) -> bool {
    n >= min && n.is_power_of_two()
}

#[derive(Clone)]
pub struct Fft1 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Fft1 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft1 {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    pub fn forward_real(&self, x: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fwd.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        buf
    }

    pub fn inverse(&self, spec: &[Complex64]) -> Vec<Complex64> {
        let mut buf = spec.to_vec();
        self.inv.process(&mut buf);
        buf
    }
}

/// 2-D transform of row-major `n1 × n2` arrays (index `i·n2 + j`).
#[derive(Clone)]
pub struct Fft2 {
    n1: usize,
    n2: usize,
    rows: Fft1,
    cols: Fft1,
}

impl Fft2 {
    pub fn new(n1: usize, n2: usize) -> Self {
        Fft2 {
            n1,
            n2,
            rows: Fft1::new(n2),
            cols: Fft1::new(n1),
        }
    }

    fn apply(&self, buf: &mut [Complex64], forward: bool) {
        let (row_plan, col_plan) = if forward {
            (&self.rows.fwd, &self.cols.fwd)
        } else {
            (&self.rows.inv, &self.cols.inv)
        };
        for row in buf.chunks_exact_mut(self.n2) {
            row_plan.process(row);
        }
        let mut col = vec![Complex64::new(0.0, 0.0); self.n1];
        for j in 0..self.n2 {
            for i in 0..self.n1 {
                col[i] = buf[i * self.n2 + j];
            }
            col_plan.process(&mut col);
            for i in 0..self.n1 {
                buf[i * self.n2 + j] = col[i];
            }
        }
    }

    pub fn forward_real(&self, x: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.apply(&mut buf, true);
        let scale = 1.0 / (self.n1 * self.n2) as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        buf
    }

    pub fn inverse(&self, spec: &[Complex64]) -> Vec<Complex64> {
        let mut buf = spec.to_vec();
        self.apply(&mut buf, false);
        buf
    }
}

pub fn real_parts(v: &[Complex64]) -> Vec<f64> {
    v.iter().map(|c| c.re).collect()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct O(N²) DFT, normalized like `forward_real`.
    fn naive_dft(x: &[f64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(j, &v)| Complex64::from_polar(v, -2.0 * PI * (k * j) as f64 / n as f64))
                    .sum::<Complex64>()
                    / n as f64
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        let x: Vec<f64> = (0..16).map(|i| ((i * 7 % 5) as f64 - 2.0) * 0.3).collect();
        let fast = Fft1::new(16).forward_real(&x);
        for (a, b) in fast.iter().zip(naive_dft(&x)) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn round_trip_2d() {
        let x: Vec<f64> = (0..8 * 16).map(|i| ((i * 13 % 11) as f64).sin()).collect();
        let fft = Fft2::new(8, 16);
        let back = real_parts(&fft.inverse(&fft.forward_real(&x)));
        for (a, b) in x.iter().zip(back) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn signed_modes() {
        assert_eq!(signed_mode(0, 8), 0);
        assert_eq!(signed_mode(4, 8), 4);
        assert_eq!(signed_mode(5, 8), -3);
        assert_eq!(bin_of(-3, 8), 5);
        assert_eq!(bin_of(3, 8), 3);
    }
}
