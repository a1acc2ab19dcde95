//! Monte Carlo harness: repeated synthesis, observation and estimation with
//! per-scale distributional diagnostics.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimator::{relative_mse, target_cj, EstimatorConfig, PreparedScale, ScaleEstimate};
use crate::harmonics::{Alm, ShtPlan};
use crate::model::{apply_band_limit, observe_samples, synthesize_field, Scenario, SeededRng, SpectrumModel, StreamRole};
use crate::needlet::NeedletScale;
use crate::stats::{anderson_darling, mean, skew_kurt, variance};
use crate::window::WindowFamily;

/// A fully specified Monte Carlo experiment.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub family: WindowFamily,
    pub model: SpectrumModel,
    pub scenario: Scenario,
    pub scales: Vec<i32>,
    pub replicates: usize,
    pub seed: u64,
    pub estimator: EstimatorConfig,
}

impl Experiment {
    pub fn validate(&self) -> Result<()> {
        if self.replicates < 2 {
            return Err(Error::Config(format!("need at least 2 replicates, got {}", self.replicates)));
        }
        if self.scales.is_empty() {
            return Err(Error::Config("no scales requested".into()));
        }
        if let Some(j) = self.scales.iter().find(|j| !self.family.contains(**j)) {
            return Err(Error::Config(format!(
                "scale {j} outside the window range {:?}",
                self.family.j_range()
            )));
        }
        self.estimator.validate()
    }

    /// Highest degree of the shared field: the largest beam support.
    pub fn field_lmax(&self) -> usize {
        self.scales
            .iter()
            .map(|&j| self.scenario.beam.highest_degree(self.family.band_limit(j)))
            .max()
            .unwrap_or(0)
    }

    /// The field realization of replicate `r`, shared by all scales.
    pub fn replicate_field(&self, r: usize) -> Result<Alm> {
        let lmax = self.field_lmax();
        let spectrum = self.model.values(0, lmax);
        synthesize_field(&spectrum, lmax, &mut SeededRng::new(self.seed).stream(r as u32, StreamRole::Field, 0))
    }
}

/// Everything needed to simulate and estimate at one scale, independent of
/// the replicate.
pub struct ScaleRun {
    pub scale: NeedletScale,
    pub mask: Vec<f64>,
    pub sigma: Vec<f64>,
    pub beam: Vec<f64>,
    pub prepared: PreparedScale,
    pub target: f64,
    synth: ShtPlan,
}

impl ScaleRun {
    pub fn new(exp: &Experiment, j: i32) -> Result<Self> {
        let scale = NeedletScale::new(&exp.family, j)?;
        let pix = scale.pixelization();
        let mask = exp.scenario.mask_map(j, pix)?;
        let sigma = exp.scenario.noise_map(j, pix)?;
        let band = exp.family.band_limit(j);
        let beam = exp.scenario.beam.values(band);
        let synth = ShtPlan::new(pix, exp.scenario.beam.highest_degree(band))?;
        let prepared = PreparedScale::new(&scale, &mask, &sigma, &exp.estimator)?;
        let spectrum = exp.model.values(j, band);
        let target = target_cj(&exp.family, j, &spectrum);
        Ok(Self {
            scale,
            mask,
            sigma,
            beam,
            prepared,
            target,
            synth,
        })
    }

    /// `Y_j` for the field `alm` with noise from `noise_stream`.
    pub fn observe(&self, alm: &Alm, noise: &mut impl rand::Rng) -> Result<crate::model::Observation> {
        let limited = apply_band_limit(&alm.resized(self.synth.lmax()), &self.beam);
        let field = self.synth.inverse(&limited)?;
        observe_samples(&field, &self.mask, &self.sigma, noise)
    }

    pub fn estimate(&self, y: &[f64], cfg: &EstimatorConfig) -> Result<ScaleEstimate> {
        let gamma = self.scale.coeffs_of_sequence(y)?;
        self.prepared.estimate(&gamma.values, cfg, self.target)
    }
}

/// One `(scale, replicate)` outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub j: i32,
    pub replicate: usize,
    pub c_target: f64,
    pub outcome: std::result::Result<ScaleEstimate, String>,
}

impl ResultRow {
    pub fn c_hat(&self) -> Option<f64> {
        self.outcome.as_ref().ok().map(|e| e.c_hat)
    }
}

/// Summary statistics of the estimates at one scale.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRow {
    pub j: i32,
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub bias: f64,
    pub rel_mse: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub ad_stat: f64,
}

impl DiagnosticsRow {
    /// Standard error of the mean.
    pub fn standard_error(&self) -> f64 {
        (self.variance / self.count as f64).sqrt()
    }
}

pub fn diagnostics(j: i32, estimates: &[f64], target: f64) -> DiagnosticsRow {
    let nan = f64::NAN;
    let (m, v) = match estimates.len() {
        0 => (nan, nan),
        1 => (estimates[0], nan),
        _ => (mean(estimates), variance(estimates)),
    };
    let (skewness, excess_kurtosis) = skew_kurt(estimates).unwrap_or((nan, nan));
    DiagnosticsRow {
        j,
        count: estimates.len(),
        mean: m,
        variance: v,
        bias: m - target,
        rel_mse: relative_mse(estimates, target).unwrap_or(nan),
        skewness,
        excess_kurtosis,
        ad_stat: anderson_darling(estimates).unwrap_or(nan),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    /// Sorted by `(j, replicate)` in the order of the experiment's scales.
    pub rows: Vec<ResultRow>,
    pub summary: Vec<DiagnosticsRow>,
}

impl ExperimentOutput {
    pub fn estimates(&self, j: i32) -> Vec<f64> {
        self.rows.iter().filter(|r| r.j == j).filter_map(ResultRow::c_hat).collect()
    }

    pub fn summary_for(&self, j: i32) -> Option<&DiagnosticsRow> {
        self.summary.iter().find(|d| d.j == j)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ResultRow> {
        self.rows.iter().filter(|r| r.outcome.is_err())
    }
}

/// Runs the experiment on the current rayon pool. Results do not depend on
/// the number of threads.
pub fn run_experiment(exp: &Experiment) -> Result<ExperimentOutput> {
    exp.validate()?;
    let runs = exp
        .scales
        .iter()
        .map(|&j| ScaleRun::new(exp, j))
        .collect::<Result<Vec<_>>>()?;
    let seeds = SeededRng::new(exp.seed);

    let per_replicate: Vec<Vec<ResultRow>> = (0..exp.replicates)
        .into_par_iter()
        .map(|r| {
            let field = exp.replicate_field(r);
            exp.scales
                .iter()
                .zip(&runs)
                .map(|(&j, run)| {
                    let outcome = field
                        .as_ref()
                        .map_err(|e| e.to_string())
                        .and_then(|alm| {
                            let mut noise = seeds.stream(r as u32, StreamRole::Noise, j as u32);
                            run.observe(alm, &mut noise)
                                .and_then(|obs| run.estimate(&obs.y, &exp.estimator))
                                .map_err(|e| e.to_string())
                        });
                    ResultRow {
                        j,
                        replicate: r,
                        c_target: run.target,
                        outcome,
                    }
                })
                .collect()
        })
        .collect();

    let mut rows = Vec::with_capacity(exp.replicates * exp.scales.len());
    for (s, _) in exp.scales.iter().enumerate() {
        rows.extend(per_replicate.iter().map(|rep| rep[s].clone()));
    }
    let summary = exp
        .scales
        .iter()
        .zip(&runs)
        .map(|(&j, run)| {
            let est: Vec<f64> = rows.iter().filter(|row| row.j == j).filter_map(ResultRow::c_hat).collect();
            diagnostics(j, &est, run.target)
        })
        .collect();
    Ok(ExperimentOutput { rows, summary })
}

/// [`run_experiment`] on a dedicated pool of `threads` workers.
pub fn run_experiment_with_threads(exp: &Experiment, threads: usize) -> Result<ExperimentOutput> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {threads} worker threads: {e}")))?;
    pool.install(|| run_experiment(exp))
}
