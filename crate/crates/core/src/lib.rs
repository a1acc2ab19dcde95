//! Needlet analysis on the sphere and the needlet spectral estimator (NSE).
//!
//! The crate covers the whole chain from frequency windows to Monte Carlo
//! verification:
//!
//! - [`window`]: B-adic needlet windows `b_{j,l}` built from a smooth cutoff.
//! - [`grid`]: Gauss-Legendre product pixelizations with exact cubature.
//! - [`harmonics`]: complex spherical harmonics and ring-based transforms.
//! - [`model`]: spectra, Gaussian field synthesis, masks, noise and the
//!   observation process.
//! - [`needlet`]: needlets, needlet coefficients and their covariance oracles.
//! - [`estimator`]: noise levels, kept sets, weights and the spectral estimate.
//! - [`mc`]: the Monte Carlo harness and distributional diagnostics.
//! - [`config`], [`io`], [`cli`]: file formats and the command-line surface.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod estimator;
pub mod grid;
pub mod harmonics;
pub mod io;
pub mod mc;
pub mod model;
pub mod needlet;
pub mod stats;
pub mod window;

pub use error::{Error, Result};
pub use grid::{Direction, Pixelization};
pub use harmonics::{Alm, ShtPlan};
pub use needlet::{NeedletCoeffs, NeedletScale};
pub use window::{CutoffFunction, WindowFamily, WindowMode};
