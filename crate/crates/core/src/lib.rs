//! Numerical laboratory for statistical independence in hidden-variable
//! models and for field theories whose initial data obey nonlocal
//! constraints.
//!
//! - [`bell`]: finite hidden-variable models, the CHSH functional and the
//!   singlet correlations.
//! - [`si_fit`]: LP fits of setting-dependent distributions, built on the
//!   dense simplex in [`lp`].
//! - [`wave_mixed`]: the 2+1 wave equation with data on a timelike plane.
//! - [`wave_cylinder`]: the 1+1 wave equation on a time-periodic spacetime.
//! - [`contextuality`]: the two-qubit operator square and its exhaustive
//!   value-assignment search.

#![allow(clippy::needless_range_loop)]

pub mod bell;
pub mod contextuality;
pub mod error;
pub mod field_io;
pub mod linalg;
pub mod lp;
pub mod rng;
pub mod si_fit;
pub mod spectral;
pub mod wave_cylinder;
pub mod wave_mixed;

pub use error::{Error, Result};
