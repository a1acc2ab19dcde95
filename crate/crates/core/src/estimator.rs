//! The needlet spectral estimator
//!
//! `C_hat^(j) = sum_{k in K_j} w_k (gamma_k^2 - n_k^2)`
//!
//! with `n_k` the exact standard deviation of the masked noise's needlet
//! coefficient, `K_j` the points whose needlet barely sees the masked region,
//! and uniform or inverse-variance weights.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::needlet::NeedletScale;
use crate::window::WindowFamily;

/// How the mask threshold `t_j` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdRule {
    /// `t_j = tau0 B^{-(alpha + eps) j}`.
    Schedule { tau0: f64, eps: f64 },
    /// The same `t_j` at every scale.
    Absolute(f64),
    /// Keep the fraction `q` of points with the smallest mask functional.
    Quantile(f64),
}

impl Default for ThresholdRule {
    fn default() -> Self {
        ThresholdRule::Schedule { tau0: 0.1, eps: 0.5 }
    }
}

impl ThresholdRule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ThresholdRule::Schedule { tau0, eps } if !(tau0 > 0.0) || !(eps > 0.0) => Err(Error::invalid(format!(
                "threshold schedule needs tau0 > 0 and eps > 0, got {tau0} and {eps}"
            ))),
            ThresholdRule::Absolute(t) if !(t >= 0.0) => Err(Error::invalid(format!("negative threshold {t}"))),
            ThresholdRule::Quantile(q) if !(q > 0.0 && q <= 1.0) => {
                Err(Error::invalid(format!("quantile must lie in (0, 1], got {q}")))
            }
            _ => Ok(()),
        }
    }

    /// Threshold value at scale `j`; `None` for the quantile rule.
    pub fn threshold(&self, alpha: f64, band_ratio: f64, j: i32) -> Option<f64> {
        match *self {
            ThresholdRule::Schedule { tau0, eps } => Some(tau0 * band_ratio.powf(-(alpha + eps) * j as f64)),
            ThresholdRule::Absolute(t) => Some(t),
            ThresholdRule::Quantile(_) => None,
        }
    }
}

impl fmt::Display for ThresholdRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdRule::Schedule { tau0, eps } => write!(f, "schedule({tau0},{eps})"),
            ThresholdRule::Absolute(t) => write!(f, "absolute({t})"),
            ThresholdRule::Quantile(q) => write!(f, "quantile({q})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightMode {
    Uniform,
    /// `w_k` proportional to `(C_bar + n_k^2)^{-2}`.
    #[default]
    Mle,
}

impl fmt::Display for WeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            WeightMode::Uniform => "uniform",
            WeightMode::Mle => "mle",
        })
    }
}

impl FromStr for WeightMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(WeightMode::Uniform),
            "mle" => Ok(WeightMode::Mle),
            other => Err(Error::invalid(format!("unknown weight mode `{other}`"))),
        }
    }
}

/// Source of the rough spectrum value `C_bar` used by the mle weights.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum PilotRule {
    /// Uniform-weight estimate from the same data.
    #[default]
    TwoPass,
    External(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    pub threshold: ThresholdRule,
    pub weights: WeightMode,
    pub pilot: PilotRule,
    /// Spectral slope used by the threshold schedule.
    pub alpha: f64,
}

impl EstimatorConfig {
    pub fn new(alpha: f64) -> Self {
        Self {
            threshold: ThresholdRule::default(),
            weights: WeightMode::default(),
            pilot: PilotRule::default(),
            alpha,
        }
    }

    pub fn with_threshold(mut self, threshold: ThresholdRule) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn with_weights(mut self, weights: WeightMode) -> Self {
        self.weights = weights;
        self
    }

    pub fn with_pilot(mut self, pilot: PilotRule) -> Self {
        self.pilot = pilot;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.threshold.validate()?;
        if let PilotRule::External(c) = self.pilot {
            if !(c > 0.0) {
                return Err(Error::invalid(format!("external pilot must be positive, got {c}")));
            }
        }
        if !self.alpha.is_finite() {
            return Err(Error::invalid("alpha must be finite"));
        }
        Ok(())
    }
}

/// `C^(j) = (4 pi)^{-1} sum_l (2l+1) b_{j,l}^2 C_l`.
pub fn target_cj(family: &WindowFamily, j: i32, spectrum: &[f64]) -> f64 {
    family
        .scale_table(j)
        .unwrap_or(&[])
        .iter()
        .zip(spectrum)
        .enumerate()
        .map(|(l, (b, c))| (2 * l + 1) as f64 * b * b * c)
        .sum::<f64>()
        / (4.0 * PI)
}

/// `n_k^2 = sum_p lambda_p^2 s_p^2 Psi(xi_k . xi_p)^2` for `s = W sigma`,
/// through the squared-kernel expansion.
pub fn noise_variances(scale: &NeedletScale, sigma_eff: &[f64]) -> Result<Vec<f64>> {
    let g = weighted_squares(scale, sigma_eff)?;
    Ok(scale.smooth_squared(&g)?.into_iter().map(|v| v.max(0.0)).collect())
}

/// Direct `O(N^2)` evaluation of [`noise_variances`].
pub fn noise_variances_direct(scale: &NeedletScale, sigma_eff: &[f64]) -> Result<Vec<f64>> {
    let g = weighted_squares(scale, sigma_eff)?;
    scale.smooth_squared_direct(&g)
}

fn weighted_squares(scale: &NeedletScale, sigma_eff: &[f64]) -> Result<Vec<f64>> {
    if sigma_eff.len() != scale.len() {
        return Err(Error::Shape {
            expected: scale.len(),
            actual: sigma_eff.len(),
        });
    }
    Ok(sigma_eff
        .iter()
        .zip(scale.pixelization().weights())
        .map(|(s, w)| w * s * s)
        .collect())
}

/// `n_k`.
pub fn noise_levels(scale: &NeedletScale, sigma_eff: &[f64]) -> Result<Vec<f64>> {
    Ok(noise_variances(scale, sigma_eff)?.into_iter().map(f64::sqrt).collect())
}

/// `(lambda_bar sum_p lambda_p (1 - W_p)^2 Psi(xi_k . xi_p)^2)^{1/2}` at every
/// point, with `lambda_bar = 4 pi / N`.
///
/// This is `(sum_p lambda_p (1 - W_p)^2 psi_k(xi_p)^2)^{1/2}` with the needlet's
/// own weight `lambda_k` replaced by the mean weight. Gauss-Legendre weights
/// shrink towards the poles, and with `lambda_k` a polar point inside a mask
/// would pass any threshold.
pub fn mask_functional(scale: &NeedletScale, mask: &[f64]) -> Result<Vec<f64>> {
    let g = complement_squares(scale, mask)?;
    let lambda_bar = mean_weight(scale);
    Ok(scale
        .smooth_squared(&g)?
        .iter()
        .map(|s| (lambda_bar * s).max(0.0).sqrt())
        .collect())
}

/// Direct `O(N^2)` evaluation of [`mask_functional`].
pub fn mask_functional_direct(scale: &NeedletScale, mask: &[f64]) -> Result<Vec<f64>> {
    let g = complement_squares(scale, mask)?;
    let lambda_bar = mean_weight(scale);
    Ok(scale
        .smooth_squared_direct(&g)?
        .iter()
        .map(|s| (lambda_bar * s).sqrt())
        .collect())
}

fn mean_weight(scale: &NeedletScale) -> f64 {
    4.0 * PI / scale.len() as f64
}

fn complement_squares(scale: &NeedletScale, mask: &[f64]) -> Result<Vec<f64>> {
    if mask.len() != scale.len() {
        return Err(Error::Shape {
            expected: scale.len(),
            actual: mask.len(),
        });
    }
    Ok(mask.iter().map(|w| (1.0 - w).powi(2)).collect())
}

/// `K_j = {k : functional_k <= t}`, in index order.
pub fn kept_set(functional: &[f64], t: f64) -> Vec<usize> {
    (0..functional.len()).filter(|&k| functional[k] <= t).collect()
}

/// The `ceil(q N)` points with the smallest functional, ties broken by index,
/// returned in index order.
pub fn kept_set_quantile(functional: &[f64], q: f64) -> Vec<usize> {
    let n = ((q * functional.len() as f64).ceil() as usize).min(functional.len());
    let mut order: Vec<usize> = (0..functional.len()).collect();
    order.sort_by(|&a, &b| functional[a].total_cmp(&functional[b]).then(a.cmp(&b)));
    let mut kept = order[..n].to_vec();
    kept.sort_unstable();
    kept
}

/// Kept set of `rule` at scale `j`.
pub fn kept_set_for(rule: &ThresholdRule, functional: &[f64], alpha: f64, band_ratio: f64, j: i32) -> Vec<usize> {
    match rule.threshold(alpha, band_ratio, j) {
        Some(t) => kept_set(functional, t),
        None => match rule {
            ThresholdRule::Quantile(q) => kept_set_quantile(functional, *q),
            _ => unreachable!(),
        },
    }
}

/// Weights over all `n2.len()` points, zero outside `kept`, summing to 1.
pub fn weights(mode: WeightMode, kept: &[usize], n2: &[f64], pilot: f64, j: i32) -> Result<Vec<f64>> {
    if kept.is_empty() {
        return Err(Error::AllMasked { j });
    }
    let mut w = vec![0.0; n2.len()];
    match mode {
        WeightMode::Uniform => {
            let v = 1.0 / kept.len() as f64;
            for &k in kept {
                w[k] = v;
            }
        }
        WeightMode::Mle => {
            if !(pilot > 0.0) {
                return Err(Error::invalid(format!("mle weights need a positive pilot, got {pilot}")));
            }
            let mut total = 0.0;
            for &k in kept {
                let v = (pilot + n2[k]).powi(-2);
                w[k] = v;
                total += v;
            }
            for &k in kept {
                w[k] /= total;
            }
        }
    }
    Ok(w)
}

/// `sum_k w_k (gamma_k^2 - n_k^2)`, summed in index order.
pub fn estimate(gamma: &[f64], n2: &[f64], w: &[f64]) -> f64 {
    gamma
        .iter()
        .zip(n2)
        .zip(w)
        .filter(|(_, w)| **w != 0.0)
        .map(|((g, n), w)| w * (g * g - n))
        .sum()
}

/// Sample mean of `((c - target) / target)^2`.
pub fn relative_mse(estimates: &[f64], target: f64) -> Result<f64> {
    if !(target > 0.0) {
        return Err(Error::invalid(format!("target must be positive, got {target}")));
    }
    if estimates.len() < 2 {
        return Err(Error::DegenerateSample("need at least 2 estimates".into()));
    }
    Ok(estimates.iter().map(|c| ((c - target) / target).powi(2)).sum::<f64>() / estimates.len() as f64)
}

/// Estimate at one scale with its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleEstimate {
    pub j: i32,
    pub c_hat: f64,
    pub c_target: f64,
    pub kept_count: usize,
    pub weight_mode: WeightMode,
    /// `-sum w ln w`; `ln |K_j|` for uniform weights.
    pub weights_entropy: f64,
    /// Minimum, median and maximum of `n_k^2` over `K_j`.
    pub n_stats: (f64, f64, f64),
    pub pilot: Option<f64>,
    /// The two-pass pilot was non-positive and replaced by the floor.
    pub pilot_floored: bool,
}

/// Everything at one scale that depends on the observation setup but not on
/// the data: noise variances, the mask functional and the kept set.
#[derive(Debug, Clone)]
pub struct PreparedScale {
    pub j: i32,
    pub noise_variances: Vec<f64>,
    pub functional: Vec<f64>,
    pub kept: Vec<usize>,
    pilot_floor: f64,
}

impl PreparedScale {
    pub fn new(scale: &NeedletScale, mask: &[f64], sigma: &[f64], cfg: &EstimatorConfig) -> Result<Self> {
        cfg.validate()?;
        if sigma.len() != mask.len() {
            return Err(Error::Shape {
                expected: mask.len(),
                actual: sigma.len(),
            });
        }
        let sigma_eff: Vec<f64> = mask.iter().zip(sigma).map(|(w, s)| w * s).collect();
        let noise_variances = noise_variances(scale, &sigma_eff)?;
        let functional = if mask.iter().all(|&w| w == 1.0) {
            vec![0.0; mask.len()]
        } else {
            mask_functional(scale, mask)?
        };
        let kept = kept_set_for(&cfg.threshold, &functional, cfg.alpha, scale.band_ratio(), scale.j());
        Ok(Self {
            j: scale.j(),
            noise_variances,
            functional,
            kept,
            pilot_floor: 1e-12 * mean_weight(scale) * scale.kernel_norm(),
        })
    }

    /// Smallest pilot accepted by the mle weights.
    pub fn pilot_floor(&self) -> f64 {
        self.pilot_floor
    }

    /// Estimate from coefficients `gamma` of the observed data.
    pub fn estimate(&self, gamma: &[f64], cfg: &EstimatorConfig, c_target: f64) -> Result<ScaleEstimate> {
        if gamma.len() != self.noise_variances.len() {
            return Err(Error::Shape {
                expected: self.noise_variances.len(),
                actual: gamma.len(),
            });
        }
        let n2 = &self.noise_variances;
        let uniform = weights(WeightMode::Uniform, &self.kept, n2, 0.0, self.j)?;
        let (w, pilot, floored) = match cfg.weights {
            WeightMode::Uniform => (uniform, None, false),
            WeightMode::Mle => {
                let (raw, from_data) = match cfg.pilot {
                    PilotRule::TwoPass => (estimate(gamma, n2, &uniform), true),
                    PilotRule::External(c) => (c, false),
                };
                let floored = from_data && raw < self.pilot_floor;
                let pilot = if floored { self.pilot_floor } else { raw };
                (weights(WeightMode::Mle, &self.kept, n2, pilot, self.j)?, Some(pilot), floored)
            }
        };
        let c_hat = estimate(gamma, n2, &w);
        let weights_entropy = -w.iter().filter(|&&v| v > 0.0).map(|v| v * v.ln()).sum::<f64>();
        let mut kept_n2: Vec<f64> = self.kept.iter().map(|&k| n2[k]).collect();
        kept_n2.sort_by(f64::total_cmp);
        let n_stats = (kept_n2[0], kept_n2[kept_n2.len() / 2], kept_n2[kept_n2.len() - 1]);
        Ok(ScaleEstimate {
            j: self.j,
            c_hat,
            c_target,
            kept_count: self.kept.len(),
            weight_mode: cfg.weights,
            weights_entropy,
            n_stats,
            pilot,
            pilot_floored: floored,
        })
    }
}

/// Two-pass estimate from observed data `y` on the scale's points.
pub fn two_pass_estimate(
    y: &[f64],
    scale: &NeedletScale,
    prepared: &PreparedScale,
    cfg: &EstimatorConfig,
    c_target: f64,
) -> Result<ScaleEstimate> {
    let gamma = scale.coeffs_of_sequence(y)?;
    prepared.estimate(&gamma.values, cfg, c_target)
}
