//! Spectrum models, Gaussian field synthesis, band-limiting and the masked,
//! noisy observation process.

mod rng;
mod scenario;

pub use rng::{SeededRng, StreamRole};
pub use scenario::{BeamProfile, MaskSpec, NoiseSpec, ObservationSetup, Scenario};

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::grid::Pixelization;
use crate::harmonics::{Alm, ShtPlan};

/// The slowly varying factor `g` of `C_l = l^{-alpha} g(B^{-j} l)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectrumShape {
    Constant { g0: f64 },
    /// `g(u) = g0 (1 + eps cos(2 pi log_B u))`, one period per octave of `B`.
    Modulated { g0: f64, eps: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumModel {
    alpha: f64,
    shape: SpectrumShape,
    band_ratio: f64,
}

impl SpectrumModel {
    pub fn new(alpha: f64, shape: SpectrumShape, band_ratio: f64) -> Result<Self> {
        if !(alpha > 2.0) || !alpha.is_finite() {
            return Err(Error::invalid(format!("spectral slope must exceed 2, got {alpha}")));
        }
        if !(band_ratio > 1.0) || !band_ratio.is_finite() {
            return Err(Error::invalid(format!("band ratio must exceed 1, got {band_ratio}")));
        }
        match shape {
            SpectrumShape::Constant { g0 } | SpectrumShape::Modulated { g0, .. } if !(g0 > 0.0) || !g0.is_finite() => {
                return Err(Error::invalid(format!("g0 must be positive, got {g0}")));
            }
            SpectrumShape::Modulated { eps, .. } if !(0.0..1.0).contains(&eps) => {
                return Err(Error::invalid(format!("modulation depth must lie in [0, 1), got {eps}")));
            }
            _ => {}
        }
        Ok(Self {
            alpha,
            shape,
            band_ratio,
        })
    }

    /// `C_l = l^{-alpha}`.
    pub fn power_law(alpha: f64, band_ratio: f64) -> Result<Self> {
        Self::new(alpha, SpectrumShape::Constant { g0: 1.0 }, band_ratio)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn shape(&self) -> SpectrumShape {
        self.shape
    }

    pub fn band_ratio(&self) -> f64 {
        self.band_ratio
    }

    /// `g(u)` for `u > 0`.
    pub fn g(&self, u: f64) -> f64 {
        match self.shape {
            SpectrumShape::Constant { g0 } => g0,
            SpectrumShape::Modulated { g0, eps } => {
                g0 * (1.0 + eps * (2.0 * PI * u.ln() / self.band_ratio.ln()).cos())
            }
        }
    }

    /// Bounds constant `c0` with `1/c0 <= g <= c0`.
    pub fn c0(&self) -> f64 {
        let (lo, hi) = match self.shape {
            SpectrumShape::Constant { g0 } => (g0, g0),
            SpectrumShape::Modulated { g0, eps } => (g0 * (1.0 - eps), g0 * (1.0 + eps)),
        };
        hi.max(1.0 / lo)
    }

    /// `C_l` as seen at scale `j`; `C_0 = 0`.
    pub fn value(&self, j: i32, l: usize) -> f64 {
        if l == 0 {
            return 0.0;
        }
        let lf = l as f64;
        lf.powf(-self.alpha) * self.g(lf * self.band_ratio.powi(-j))
    }

    /// `C_0 ..= C_lmax` at scale `j`.
    pub fn values(&self, j: i32, lmax: usize) -> Vec<f64> {
        (0..=lmax).map(|l| self.value(j, l)).collect()
    }
}

/// `C_0 ..= C_lmax` of `model` at scale `j`.
pub fn spectrum_values(model: &SpectrumModel, j: i32, lmax: usize) -> Vec<f64> {
    model.values(j, lmax)
}

/// Gaussian harmonic coefficients with `E|a_lm|^2 = C_l`: real `a_l0`, and
/// independent real and imaginary parts of variance `C_l / 2` for `m > 0`.
pub fn synthesize_field<R: Rng + ?Sized>(spectrum: &[f64], lmax: usize, rng: &mut R) -> Result<Alm> {
    if let Some((l, c)) = spectrum.iter().enumerate().find(|(_, c)| !(**c >= 0.0)) {
        return Err(Error::invalid(format!("negative spectrum value C_{l} = {c}")));
    }
    let mut alm = Alm::zeros(lmax);
    for l in 0..=lmax {
        let c = spectrum.get(l).copied().unwrap_or(0.0);
        // draw even when c == 0 so the stream layout does not depend on C
        let z0: f64 = rng.sample(StandardNormal);
        alm.set(l, 0, Complex64::new(c.sqrt() * z0, 0.0));
        let s = (c / 2.0).sqrt();
        for m in 1..=l {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            alm.set(l, m, Complex64::new(s * re, s * im));
        }
    }
    Ok(alm)
}

/// `a_lm -> B_l a_lm`; entries beyond the profile become 0.
pub fn apply_band_limit(alm: &Alm, profile: &[f64]) -> Alm {
    let mut out = Alm::zeros(alm.lmax());
    for l in 0..=alm.lmax() {
        let b = profile.get(l).copied().unwrap_or(0.0);
        for m in 0..=l {
            out.set(l, m, alm.get(l, m) * b);
        }
    }
    out
}

/// One realization of the observation process at a single scale.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    /// `W X_j`
    pub masked_field: Vec<f64>,
    /// `W sigma`
    pub masked_sigma: Vec<f64>,
    /// `W sigma U`
    pub masked_noise: Vec<f64>,
    /// `Y = W (X_j + sigma U)`
    pub y: Vec<f64>,
}

/// `Y_k = W_k (field_k + sigma_k U_k)` with `U` i.i.d. standard normal drawn
/// in point order.
pub fn observe_samples<R: Rng + ?Sized>(field: &[f64], mask: &[f64], sigma: &[f64], rng: &mut R) -> Result<Observation> {
    let n = field.len();
    for len in [mask.len(), sigma.len()] {
        if len != n {
            return Err(Error::Shape {
                expected: n,
                actual: len,
            });
        }
    }
    let mut obs = Observation {
        masked_field: Vec::with_capacity(n),
        masked_sigma: Vec::with_capacity(n),
        masked_noise: Vec::with_capacity(n),
        y: Vec::with_capacity(n),
    };
    for k in 0..n {
        let u: f64 = rng.sample(StandardNormal);
        let (w, z) = (mask[k], sigma[k] * u);
        obs.masked_field.push(w * field[k]);
        obs.masked_sigma.push(w * sigma[k]);
        obs.masked_noise.push(w * z);
        obs.y.push(w * (field[k] + z));
    }
    Ok(obs)
}

/// Full observation at scale `j`: synthesize `X_j` on `pix` and apply the
/// scenario's mask and noise.
pub fn observe<R: Rng + ?Sized>(
    alm_j: &Alm,
    pix: &Pixelization,
    scenario: &Scenario,
    j: i32,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let mask = scenario.mask_map(j, pix)?;
    let sigma = scenario.noise_map(j, pix)?;
    let plan = ShtPlan::new(pix, alm_j.lmax())?;
    let field = plan.inverse(alm_j)?;
    Ok(observe_samples(&field, &mask, &sigma, rng)?.y)
}
