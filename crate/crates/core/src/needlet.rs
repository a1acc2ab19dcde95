//! Needlets `psi_{j,k}(xi) = sqrt(lambda_{j,k}) sum_l b_{j,l} L_l(xi . xi_{j,k})`,
//! their coefficients, and the covariance oracles of needlet coefficients of
//! a Gaussian field and of heteroscedastic noise.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{angle_between, gauss_legendre, Direction, Pixelization};
use crate::harmonics::{legendre_kernel_series, legendre_series, Alm, ShtPlan};
use crate::window::WindowFamily;

/// Needlet coefficients `gamma_{j,k}` at the points of a scale's pixelization.
#[derive(Debug, Clone, PartialEq)]
pub struct NeedletCoeffs {
    pub j: i32,
    pub values: Vec<f64>,
}

impl NeedletCoeffs {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// One needlet scale: the window `b_{j,.}` and a pixelization of order at
/// least `4 L_j^(b)`.
pub struct NeedletScale {
    j: i32,
    band_ratio: f64,
    window: Vec<f64>,
    pix: Pixelization,
    plan: ShtPlan,
    square: OnceLock<SquaredKernel>,
}

struct SquaredKernel {
    plan: ShtPlan,
    // Psi^2(t) = sum_L coeffs[L] L_L(t)
    coeffs: Vec<f64>,
}

impl std::fmt::Debug for NeedletScale {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NeedletScale")
            .field("j", &self.j)
            .field("band_limit", &self.band_limit())
            .field("order", &self.pix.order())
            .finish()
    }
}

impl NeedletScale {
    /// Scale `j` of `family` on the pixelization of order `4 L_j^(b)`.
    pub fn new(family: &WindowFamily, j: i32) -> Result<Self> {
        let order = 4 * family.band_limit(j);
        Self::with_order(family, j, order)
    }

    pub fn with_order(family: &WindowFamily, j: i32, order: usize) -> Result<Self> {
        let window = family
            .scale_table(j)
            .ok_or_else(|| Error::invalid(format!("scale {j} outside the window family")))?
            .to_vec();
        let band = window.len() - 1;
        if order < 4 * band {
            return Err(Error::invalid(format!(
                "pixelization order {order} below 4 L_j = {}",
                4 * band
            )));
        }
        let pix = Pixelization::new(order);
        let plan = ShtPlan::new(&pix, band)?;
        Ok(Self {
            j,
            band_ratio: family.band_ratio(),
            window,
            pix,
            plan,
            square: OnceLock::new(),
        })
    }

    pub fn j(&self) -> i32 {
        self.j
    }

    pub fn band_ratio(&self) -> f64 {
        self.band_ratio
    }

    /// `L_j^(b)`.
    pub fn band_limit(&self) -> usize {
        self.window.len() - 1
    }

    /// `b_{j,0..=L_j^(b)}`.
    pub fn window(&self) -> &[f64] {
        &self.window
    }

    pub fn pixelization(&self) -> &Pixelization {
        &self.pix
    }

    pub fn plan(&self) -> &ShtPlan {
        &self.plan
    }

    pub fn len(&self) -> usize {
        self.pix.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pix.is_empty()
    }

    pub fn has_empty_band(&self) -> bool {
        self.window.iter().all(|&b| b == 0.0)
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k >= self.len() {
            return Err(Error::Index {
                index: k,
                len: self.len(),
            });
        }
        Ok(())
    }

    fn check_len(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.len() {
            return Err(Error::Shape {
                expected: self.len(),
                actual: values.len(),
            });
        }
        Ok(())
    }

    /// Zonal kernel `Psi(t) = sum_l b_{j,l} L_l(t)`.
    pub fn kernel(&self, t: f64) -> f64 {
        weighted_kernel(&self.window, t)
    }

    /// `psi_{j,k}(xi)`.
    pub fn eval_needlet(&self, k: usize, xi: &Direction) -> Result<f64> {
        self.check_index(k)?;
        let t = self.pix.point(k).dot(xi).clamp(-1.0, 1.0);
        Ok(self.pix.weight(k).sqrt() * self.kernel(t))
    }

    /// Coefficients of a function given by its harmonic coefficients:
    /// `gamma_k = sum_{l,m} b_{j,l} a_{l,m} Y_{l,m}(xi_k)`.
    pub fn needlet_transform(&self, alm: &Alm) -> Result<NeedletCoeffs> {
        let filtered = alm.filtered(&self.window);
        Ok(NeedletCoeffs {
            j: self.j,
            values: self.plan.inverse(&filtered)?,
        })
    }

    /// Coefficients of a finite sequence on the scale's points:
    /// `sum_p lambda_p f_p sum_l b_{j,l} L_l(xi_k . xi_p)`, evaluated as a
    /// forward transform, a window filter and an inverse transform.
    pub fn coeffs_of_sequence(&self, values: &[f64]) -> Result<NeedletCoeffs> {
        self.check_len(values)?;
        let alm = self.plan.forward(values)?;
        self.needlet_transform(&alm)
    }

    /// `Cov(eta_k, eta_k') = sum_l b_{j,l}^2 C_l L_l(xi_k . xi_k')` for a
    /// field of spectrum `spectrum`.
    pub fn signal_covariance(&self, spectrum: &[f64], k: usize, k2: usize) -> Result<f64> {
        self.check_index(k)?;
        self.check_index(k2)?;
        let t = self.pix.point(k).dot(&self.pix.point(k2)).clamp(-1.0, 1.0);
        Ok(self.signal_correlation_kernel(spectrum, t))
    }

    fn signal_correlation_kernel(&self, spectrum: &[f64], t: f64) -> f64 {
        let w: Vec<f64> = self
            .window
            .iter()
            .enumerate()
            .map(|(l, b)| b * b * spectrum.get(l).copied().unwrap_or(0.0))
            .collect();
        weighted_kernel(&w, t)
    }

    /// `Cov(zeta_k, zeta_k') = sum_p lambda_p^2 s_p^2 Psi(xi_k . xi_p) Psi(xi_k' . xi_p)`
    /// for the coefficients of noise with per-point standard deviation `s`.
    pub fn noise_covariance(&self, sigma_eff: &[f64], k: usize, k2: usize) -> Result<f64> {
        self.check_len(sigma_eff)?;
        self.check_index(k)?;
        self.check_index(k2)?;
        let (a, b) = (self.pix.point(k), self.pix.point(k2));
        let weights = self.pix.weights();
        Ok(self
            .pix
            .points()
            .iter()
            .zip(weights.iter().zip(sigma_eff))
            .filter(|(_, (_, s))| **s != 0.0)
            .map(|(p, (lambda, s))| {
                let ls = lambda * s;
                ls * ls
                    * self.kernel(a.dot(p).clamp(-1.0, 1.0))
                    * self.kernel(b.dot(p).clamp(-1.0, 1.0))
            })
            .sum())
    }

    /// `(sum_p lambda_p psi_k(xi_p)^2, lambda_k sum_l b_{j,l}^2 (2l+1) / (4 pi))`.
    pub fn norm_identity_check(&self, k: usize) -> Result<(f64, f64)> {
        self.check_index(k)?;
        let xk = self.pix.point(k);
        let lambda_k = self.pix.weight(k);
        let lhs = lambda_k
            * self
                .pix
                .points()
                .iter()
                .zip(self.pix.weights())
                .map(|(p, w)| w * self.kernel(xk.dot(p).clamp(-1.0, 1.0)).powi(2))
                .sum::<f64>();
        Ok((lhs, lambda_k * self.kernel_norm()))
    }

    /// `sum_l b_{j,l}^2 (2l+1) / (4 pi) = Psi^2` integrated over the sphere.
    pub fn kernel_norm(&self) -> f64 {
        self.window
            .iter()
            .enumerate()
            .map(|(l, b)| b * b * (2 * l + 1) as f64 / (4.0 * PI))
            .sum()
    }

    fn squared_kernel(&self) -> &SquaredKernel {
        self.square.get_or_init(|| {
            let degree = 2 * self.band_limit();
            let (nodes, weights) = gauss_legendre(degree + 1);
            let mut coeffs = vec![0.0; degree + 1];
            for (t, w) in nodes.iter().zip(&weights) {
                let psi2 = self.kernel(*t).powi(2);
                for (c, p) in coeffs.iter_mut().zip(legendre_series(degree, *t)) {
                    *c += 2.0 * PI * w * psi2 * p;
                }
            }
            SquaredKernel {
                plan: ShtPlan::new(&self.pix, degree).expect("plan construction is infallible"),
                coeffs,
            }
        })
    }

    /// Expansion `Psi(t)^2 = sum_L c_L L_L(t)`, `L = 0..=2 L_j^(b)`.
    pub fn squared_kernel_coefficients(&self) -> &[f64] {
        &self.squared_kernel().coeffs
    }

    /// `sum_p lambda_p g_p Psi(xi_k . xi_p)^2` at every scale point `k`,
    /// computed through harmonic space.
    pub fn smooth_squared(&self, g: &[f64]) -> Result<Vec<f64>> {
        self.check_len(g)?;
        let sq = self.squared_kernel();
        let alm = sq.plan.forward(g)?.filtered(&sq.coeffs);
        sq.plan.inverse(&alm)
    }

    /// Direct `O(N^2 L)` evaluation of [`smooth_squared`](Self::smooth_squared).
    pub fn smooth_squared_direct(&self, g: &[f64]) -> Result<Vec<f64>> {
        self.check_len(g)?;
        let points = self.pix.points();
        let weights = self.pix.weights();
        Ok(points
            .par_iter()
            .map(|xk| {
                points
                    .iter()
                    .zip(weights.iter().zip(g))
                    .filter(|(_, (_, g))| **g != 0.0)
                    .map(|(p, (w, g))| w * g * self.kernel(xk.dot(p).clamp(-1.0, 1.0)).powi(2))
                    .sum()
            })
            .collect())
    }

    /// Analytic correlations of the field's coefficients against the point
    /// nearest `center`, and the fitted decay slope in `(1 + B^j d)` over
    /// `B^j d` in `fit_range`.
    pub fn correlation_decay_report(
        &self,
        spectrum: &[f64],
        center: &Direction,
        fit_range: (f64, f64),
    ) -> Result<DecayReport> {
        let k0 = (0..self.len())
            .min_by(|&a, &b| {
                angle_between(center, &self.pix.point(a)).total_cmp(&angle_between(center, &self.pix.point(b)))
            })
            .ok_or_else(|| Error::invalid("empty pixelization"))?;
        let x0 = self.pix.point(k0);
        let var = self.signal_correlation_kernel(spectrum, 1.0);
        if !(var > 0.0) {
            return Err(Error::invalid(format!("scale {} has zero signal variance", self.j)));
        }
        let scale = self.band_ratio.powi(self.j);
        let rows: Vec<(f64, f64)> = self
            .pix
            .points()
            .iter()
            .map(|p| {
                let d = angle_between(&x0, p);
                let t = x0.dot(p).clamp(-1.0, 1.0);
                (scale * d, self.signal_correlation_kernel(spectrum, t).abs() / var)
            })
            .collect();
        let slope = envelope_slope(&rows, fit_range, DEFAULT_ENVELOPE_BINS)?;
        Ok(DecayReport { rows, slope })
    }

    /// `|Psi(cos d)|` sampled at `samples` distances in `(0, pi]`, and the
    /// fitted decay slope in `(1 + B^j d)` over `B^j d` in `fit_range`.
    pub fn localization_report(&self, samples: usize, fit_range: (f64, f64)) -> Result<DecayReport> {
        let scale = self.band_ratio.powi(self.j);
        let rows: Vec<(f64, f64)> = (1..=samples)
            .map(|i| {
                let d = PI * i as f64 / samples as f64;
                (scale * d, self.kernel(d.cos()).abs())
            })
            .collect();
        let slope = envelope_slope(&rows, fit_range, DEFAULT_ENVELOPE_BINS)?;
        Ok(DecayReport { rows, slope })
    }
}

/// `sum_l w_l L_l(t)`.
pub fn weighted_kernel(w: &[f64], t: f64) -> f64 {
    if w.is_empty() {
        return 0.0;
    }
    legendre_kernel_series(w.len() - 1, t)
        .iter()
        .zip(w)
        .map(|(k, w)| k * w)
        .sum()
}

/// Pairs `(B^j d, |value|)` with a fitted log-log decay slope.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub rows: Vec<(f64, f64)>,
    pub slope: f64,
}

const DEFAULT_ENVELOPE_BINS: usize = 12;

/// Least-squares slope of `ln max|y|` against `ln(1 + x)`, where the maximum
/// is taken over `bins` equal-width bins of `ln(1 + x)` covering `range`.
/// Oscillating kernels have zeros, so the fit is to the envelope.
pub fn envelope_slope(rows: &[(f64, f64)], range: (f64, f64), bins: usize) -> Result<f64> {
    let (lo, hi) = ((1.0 + range.0).ln(), (1.0 + range.1).ln());
    if !(hi > lo) || bins < 2 {
        return Err(Error::invalid("empty fit range"));
    }
    let width = (hi - lo) / bins as f64;
    let mut peaks = vec![0.0f64; bins];
    for &(x, y) in rows {
        let u = (1.0 + x).ln();
        if u < lo || u > hi {
            continue;
        }
        let b = (((u - lo) / width) as usize).min(bins - 1);
        peaks[b] = peaks[b].max(y.abs());
    }
    let pts: Vec<(f64, f64)> = peaks
        .iter()
        .enumerate()
        .filter(|(_, p)| **p > 0.0)
        .map(|(b, p)| (lo + (b as f64 + 0.5) * width, p.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::DegenerateSample("fewer than two populated bins".into()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
