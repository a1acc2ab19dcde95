//! TOML configuration binding files to the pipeline.
//!
//! ```toml
//! [window]
//! B = 2.0
//! M = 5
//! mode = "tight"
//! j_min = 1
//! j_max = 6
//!
//! [model]
//! alpha = 3.0
//! g = "constant"
//! g0 = 1.0
//!
//! [setups.wide]
//! mask = { kind = "full-sky" }
//! noise = { kind = "constant", sigma = 0.01 }
//!
//! [scenario]
//! beam = "sharp"
//! schedule = [{ from = 1, to = 6, setup = "wide" }]
//!
//! [mask.j5]
//! kind = "polar-cap"
//! theta_cut = 0.5
//!
//! [estimator]
//! threshold = "schedule"
//! weights = "mle"
//!
//! [mc]
//! replicates = 500
//! seed = 1
//! scales = [3, 4, 5, 6]
//! ```
//!
//! Unknown keys are rejected. Relative paths are resolved against the
//! directory holding the config file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::estimator::{EstimatorConfig, PilotRule, ThresholdRule, WeightMode};
use crate::grid::Direction;
use crate::io::read_map;
use crate::mc::Experiment;
use crate::model::{BeamProfile, MaskSpec, NoiseSpec, ObservationSetup, Scenario, SpectrumModel, SpectrumShape};
use crate::window::{CutoffFunction, WindowFamily, WindowMode};

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct WindowSection {
    #[serde(rename = "B", default = "default_band_ratio")]
    pub band_ratio: f64,
    #[serde(rename = "M", default = "default_smoothness")]
    pub smoothness: usize,
    #[serde(default)]
    pub mode: ModeName,
    #[serde(default = "default_j_min")]
    pub j_min: i32,
    #[serde(default = "default_j_max")]
    pub j_max: i32,
}

fn default_band_ratio() -> f64 {
    2.0
}
fn default_smoothness() -> usize {
    5
}
fn default_j_min() -> i32 {
    1
}
fn default_j_max() -> i32 {
    6
}

impl Default for WindowSection {
    fn default() -> Self {
        Self {
            band_ratio: default_band_ratio(),
            smoothness: default_smoothness(),
            mode: ModeName::default(),
            j_min: default_j_min(),
            j_max: default_j_max(),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    #[default]
    Tight,
    Literal,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub g: ShapeName,
    #[serde(default = "default_g0")]
    pub g0: f64,
    #[serde(default)]
    pub g_eps: f64,
}

fn default_alpha() -> f64 {
    3.0
}
fn default_g0() -> f64 {
    1.0
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            alpha: default_alpha(),
            g: ShapeName::default(),
            g0: default_g0(),
            g_eps: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
pub enum ShapeName {
    #[default]
    Constant,
    Modulated,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MaskEntry {
    FullSky {},
    PolarCap {
        theta_cut: f64,
    },
    /// `center = [theta, phi]` in radians.
    ObservedDisc {
        center: [f64; 2],
        radius: f64,
    },
    Map {
        file: PathBuf,
    },
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NoiseEntry {
    Constant { sigma: f64 },
    ColatitudeLinear { north: f64, south: f64 },
    HemisphereStep { north: f64, south: f64 },
    Map { file: PathBuf },
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SetupEntry {
    pub mask: MaskEntry,
    pub noise: NoiseEntry,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScheduleEntry {
    pub from: i32,
    pub to: i32,
    pub setup: String,
}

#[derive(Debug, Clone, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    #[serde(default)]
    pub beam: BeamName,
    #[serde(default)]
    pub schedule: Vec<ScheduleEntry>,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "kebab-case")]
pub enum BeamName {
    #[default]
    Sharp,
    CosineTaper,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSection {
    #[serde(default)]
    pub threshold: ThresholdName,
    #[serde(default = "default_tau0")]
    pub tau0: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// Threshold for `threshold = "absolute"`.
    pub t: Option<f64>,
    /// Kept fraction for `threshold = "quantile"`.
    #[serde(default = "default_q")]
    pub q: f64,
    #[serde(default)]
    pub weights: WeightName,
    #[serde(default)]
    pub pilot: PilotName,
    pub pilot_value: Option<f64>,
    /// Overrides `model.alpha` in the threshold schedule.
    pub alpha: Option<f64>,
}

fn default_tau0() -> f64 {
    0.1
}
fn default_eps() -> f64 {
    0.5
}
fn default_q() -> f64 {
    0.5
}

impl Default for EstimatorSection {
    fn default() -> Self {
        Self {
            threshold: ThresholdName::default(),
            tau0: default_tau0(),
            eps: default_eps(),
            t: None,
            q: default_q(),
            weights: WeightName::default(),
            pilot: PilotName::default(),
            pilot_value: None,
            alpha: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdName {
    #[default]
    Schedule,
    Absolute,
    Quantile,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
pub enum WeightName {
    Uniform,
    #[default]
    Mle,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PilotName {
    #[default]
    TwoPass,
    External,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    /// Defaults to the full window range.
    pub scales: Option<Vec<i32>>,
}

fn default_replicates() -> usize {
    500
}

impl Default for McSection {
    fn default() -> Self {
        Self {
            replicates: default_replicates(),
            seed: 0,
            scales: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct IoSection {
    /// Output directory.
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// Directory of `y_j{j}.map` inputs for `estimate`.
    pub maps: Option<PathBuf>,
    #[serde(default = "default_profile_samples")]
    pub profile_samples: usize,
    #[serde(default = "default_partition_lmax")]
    pub partition_lmax: usize,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}
fn default_profile_samples() -> usize {
    180
}
fn default_partition_lmax() -> usize {
    128
}

impl Default for IoSection {
    fn default() -> Self {
        Self {
            out: default_out(),
            maps: None,
            profile_samples: default_profile_samples(),
            partition_lmax: default_partition_lmax(),
        }
    }
}

/// Raw configuration file contents.
#[derive(Debug, Clone, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub window: WindowSection,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub setups: BTreeMap<String, SetupEntry>,
    #[serde(default)]
    pub scenario: ScenarioSection,
    /// Per-scale overrides keyed `j<scale>`.
    #[serde(default)]
    pub mask: BTreeMap<String, MaskEntry>,
    #[serde(default)]
    pub noise: BTreeMap<String, NoiseEntry>,
    #[serde(default)]
    pub estimator: EstimatorSection,
    #[serde(default)]
    pub mc: McSection,
    #[serde(default)]
    pub io: IoSection,
}

/// A parsed configuration with paths resolved against `base_dir`.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub file: ConfigFile,
    pub base_dir: PathBuf,
}

impl Config {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let cfg = Self {
            file,
            base_dir: base_dir.to_path_buf(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        self.family()?;
        self.model()?;
        self.estimator()?.validate().map_err(config_error)?;
        for entry in &self.file.scenario.schedule {
            if !self.file.setups.contains_key(&entry.setup) {
                return Err(Error::Config(format!("schedule names unknown setup `{}`", entry.setup)));
            }
            if entry.from > entry.to {
                return Err(Error::Config(format!("empty schedule range {}..={}", entry.from, entry.to)));
            }
        }
        for key in self.file.mask.keys().chain(self.file.noise.keys()) {
            scale_key(key)?;
        }
        Ok(())
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn family(&self) -> Result<WindowFamily> {
        let w = &self.file.window;
        let mode = match w.mode {
            ModeName::Tight => WindowMode::Tight,
            ModeName::Literal => WindowMode::Literal,
        };
        CutoffFunction::new(w.band_ratio, w.smoothness)
            .and_then(|c| WindowFamily::new(c, mode, w.j_min, w.j_max))
            .map_err(config_error)
    }

    pub fn model(&self) -> Result<SpectrumModel> {
        let m = &self.file.model;
        let shape = match m.g {
            ShapeName::Constant => SpectrumShape::Constant { g0: m.g0 },
            ShapeName::Modulated => SpectrumShape::Modulated { g0: m.g0, eps: m.g_eps },
        };
        SpectrumModel::new(m.alpha, shape, self.file.window.band_ratio).map_err(config_error)
    }

    pub fn estimator(&self) -> Result<EstimatorConfig> {
        let e = &self.file.estimator;
        let threshold = match e.threshold {
            ThresholdName::Schedule => ThresholdRule::Schedule { tau0: e.tau0, eps: e.eps },
            ThresholdName::Absolute => ThresholdRule::Absolute(
                e.t.ok_or_else(|| Error::Config("threshold = \"absolute\" needs estimator.t".into()))?,
            ),
            ThresholdName::Quantile => ThresholdRule::Quantile(e.q),
        };
        let weights = match e.weights {
            WeightName::Uniform => WeightMode::Uniform,
            WeightName::Mle => WeightMode::Mle,
        };
        let pilot = match e.pilot {
            PilotName::TwoPass => PilotRule::TwoPass,
            PilotName::External => PilotRule::External(
                e.pilot_value
                    .ok_or_else(|| Error::Config("pilot = \"external\" needs estimator.pilot_value".into()))?,
            ),
        };
        Ok(EstimatorConfig {
            threshold,
            weights,
            pilot,
            alpha: e.alpha.unwrap_or(self.file.model.alpha),
        })
    }

    fn mask_spec(&self, entry: &MaskEntry) -> Result<MaskSpec> {
        Ok(match entry {
            MaskEntry::FullSky {} => MaskSpec::FullSky,
            MaskEntry::PolarCap { theta_cut } => MaskSpec::PolarCap { theta_cut: *theta_cut },
            MaskEntry::ObservedDisc { center, radius } => MaskSpec::ObservedDisc {
                center: Direction::from_angles(center[0], center[1]),
                radius: *radius,
            },
            MaskEntry::Map { file } => MaskSpec::Map(Arc::new(read_map(&self.resolve(file))?.values)),
        })
    }

    fn noise_spec(&self, entry: &NoiseEntry) -> Result<NoiseSpec> {
        Ok(match entry {
            NoiseEntry::Constant { sigma } => NoiseSpec::Constant { sigma: *sigma },
            NoiseEntry::ColatitudeLinear { north, south } => NoiseSpec::ColatitudeLinear {
                north: *north,
                south: *south,
            },
            NoiseEntry::HemisphereStep { north, south } => NoiseSpec::HemisphereStep {
                north: *north,
                south: *south,
            },
            NoiseEntry::Map { file } => NoiseSpec::Map(Arc::new(read_map(&self.resolve(file))?.values)),
        })
    }

    /// The observation scenario. Without a schedule every scale is observed
    /// on the full sky without noise.
    pub fn scenario(&self) -> Result<Scenario> {
        let s = &self.file.scenario;
        let mut scenario = if s.schedule.is_empty() {
            Scenario::full_sky(NoiseSpec::Constant { sigma: 0.0 })
        } else {
            let mut sc = Scenario::default();
            for entry in &s.schedule {
                let setup = &self.file.setups[&entry.setup];
                sc = sc.with_setup(
                    entry.from..=entry.to,
                    ObservationSetup::new(&entry.setup, self.mask_spec(&setup.mask)?, self.noise_spec(&setup.noise)?),
                );
            }
            sc
        };
        for (key, entry) in &self.file.mask {
            scenario = scenario.with_mask_override(scale_key(key)?, self.mask_spec(entry)?);
        }
        for (key, entry) in &self.file.noise {
            scenario = scenario.with_noise_override(scale_key(key)?, self.noise_spec(entry)?);
        }
        Ok(scenario.with_beam(match s.beam {
            BeamName::Sharp => BeamProfile::Sharp,
            BeamName::CosineTaper => BeamProfile::CosineTaper,
        }))
    }

    pub fn scales(&self) -> Vec<i32> {
        self.file
            .mc
            .scales
            .clone()
            .unwrap_or_else(|| (self.file.window.j_min..=self.file.window.j_max).collect())
    }

    pub fn out_dir(&self) -> PathBuf {
        self.resolve(&self.file.io.out)
    }

    /// The Monte Carlo experiment, with an optional seed override.
    pub fn experiment(&self, seed: Option<u64>) -> Result<Experiment> {
        let exp = Experiment {
            family: self.family()?,
            model: self.model()?,
            scenario: self.scenario()?,
            scales: self.scales(),
            replicates: self.file.mc.replicates,
            seed: seed.unwrap_or(self.file.mc.seed),
            estimator: self.estimator()?,
        };
        exp.validate()?;
        for &j in &exp.scales {
            exp.scenario.setup_for(j)?;
        }
        Ok(exp)
    }
}

fn config_error(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

fn scale_key(key: &str) -> Result<i32> {
    key.strip_prefix('j')
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Config(format!("override key `{key}` is not of the form j<scale>")))
}
