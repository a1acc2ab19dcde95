use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::RangeInclusive;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{angle_between, Direction, Pixelization};

/// Mask generator `W_{j,.}`.
#[derive(Debug, Clone, PartialEq)]
pub enum MaskSpec {
    FullSky,
    /// Removes the cap of colatitude `< theta_cut` around the north pole.
    PolarCap { theta_cut: f64 },
    /// Keeps only the disc of `radius` around `center`.
    ObservedDisc { center: Direction, radius: f64 },
    /// Explicit per-point values, ring-major.
    Map(Arc<Vec<f64>>),
}

/// Noise level generator `sigma_{j,.}`.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseSpec {
    Constant { sigma: f64 },
    /// Linear in colatitude from `north` at `theta = 0` to `south` at `pi`.
    ColatitudeLinear { north: f64, south: f64 },
    /// `north` on `z > 0`, `south` elsewhere.
    HemisphereStep { north: f64, south: f64 },
    Map(Arc<Vec<f64>>),
}

/// Instrumental low-pass `B_{j,l}`: 1 up to `L_j`, 0 beyond `2 L_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BeamProfile {
    /// 0 above `L_j`.
    #[default]
    Sharp,
    /// `cos^2` roll-off on `(L_j, 2 L_j]`.
    CosineTaper,
}

impl BeamProfile {
    /// Profile values for `l = 0..=highest_degree(band)`.
    pub fn values(&self, band: usize) -> Vec<f64> {
        match self {
            BeamProfile::Sharp => vec![1.0; band + 1],
            BeamProfile::CosineTaper => (0..=2 * band)
                .map(|l| {
                    if l <= band {
                        1.0
                    } else {
                        let u = (l - band) as f64 / band as f64;
                        (0.5 * PI * u).cos().powi(2)
                    }
                })
                .collect(),
        }
    }

    /// Largest degree with a non-zero profile value.
    pub fn highest_degree(&self, band: usize) -> usize {
        match self {
            BeamProfile::Sharp => band,
            BeamProfile::CosineTaper => (2 * band).saturating_sub(1).max(band),
        }
    }
}

impl MaskSpec {
    pub fn evaluate(&self, pix: &Pixelization) -> Result<Vec<f64>> {
        let values = match self {
            MaskSpec::FullSky => vec![1.0; pix.len()],
            MaskSpec::PolarCap { theta_cut } => pix
                .points()
                .iter()
                .map(|xi| if xi.theta() < *theta_cut { 0.0 } else { 1.0 })
                .collect(),
            MaskSpec::ObservedDisc { center, radius } => pix
                .points()
                .iter()
                .map(|xi| {
                    if angle_between(center, xi) <= *radius {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect(),
            MaskSpec::Map(values) => {
                check_len(values.len(), pix.len())?;
                values.to_vec()
            }
        };
        if let Some(bad) = values.iter().find(|w| !(0.0..=1.0).contains(*w)) {
            return Err(Error::invalid(format!("mask value {bad} outside [0, 1]")));
        }
        Ok(values)
    }

    /// Fraction of the sphere with `W = 1` for the analytic generators.
    pub fn sky_fraction(&self) -> Option<f64> {
        match self {
            MaskSpec::FullSky => Some(1.0),
            MaskSpec::PolarCap { theta_cut } => Some((1.0 + theta_cut.cos()) / 2.0),
            MaskSpec::ObservedDisc { radius, .. } => Some((1.0 - radius.cos()) / 2.0),
            MaskSpec::Map(_) => None,
        }
    }
}

impl NoiseSpec {
    pub fn evaluate(&self, pix: &Pixelization) -> Result<Vec<f64>> {
        let values = match self {
            NoiseSpec::Constant { sigma } => vec![*sigma; pix.len()],
            NoiseSpec::ColatitudeLinear { north, south } => pix
                .points()
                .iter()
                .map(|xi| north + (south - north) * xi.theta() / PI)
                .collect(),
            NoiseSpec::HemisphereStep { north, south } => pix
                .points()
                .iter()
                .map(|xi| if xi.z > 0.0 { *north } else { *south })
                .collect(),
            NoiseSpec::Map(values) => {
                check_len(values.len(), pix.len())?;
                values.to_vec()
            }
        };
        if let Some(bad) = values.iter().find(|s| !(**s >= 0.0) || !s.is_finite()) {
            return Err(Error::invalid(format!("noise level {bad} is negative or non-finite")));
        }
        Ok(values)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            NoiseSpec::Constant { sigma } => *sigma == 0.0,
            NoiseSpec::ColatitudeLinear { north, south } | NoiseSpec::HemisphereStep { north, south } => {
                *north == 0.0 && *south == 0.0
            }
            NoiseSpec::Map(v) => v.iter().all(|&s| s == 0.0),
        }
    }
}

fn check_len(actual: usize, expected: usize) -> Result<()> {
    if actual != expected {
        return Err(Error::Shape { expected, actual });
    }
    Ok(())
}

/// A mask and noise pair applied to a range of scales.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSetup {
    pub name: String,
    pub mask: MaskSpec,
    pub noise: NoiseSpec,
}

impl ObservationSetup {
    pub fn new(name: impl Into<String>, mask: MaskSpec, noise: NoiseSpec) -> Self {
        Self {
            name: name.into(),
            mask,
            noise,
        }
    }
}

impl fmt::Display for ObservationSetup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Per-scale observation conditions: a schedule of setups over scale ranges,
/// optional per-scale overrides, and the beam.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Scenario {
    schedule: Vec<(RangeInclusive<i32>, ObservationSetup)>,
    mask_overrides: BTreeMap<i32, MaskSpec>,
    noise_overrides: BTreeMap<i32, NoiseSpec>,
    pub beam: BeamProfile,
}

impl Scenario {
    /// The same setup at every scale.
    pub fn uniform(mask: MaskSpec, noise: NoiseSpec) -> Self {
        Self::default().with_setup(i32::MIN..=i32::MAX, ObservationSetup::new("uniform", mask, noise))
    }

    pub fn full_sky(noise: NoiseSpec) -> Self {
        Self::uniform(MaskSpec::FullSky, noise)
    }

    /// Appends a setup; earlier entries win where ranges overlap.
    pub fn with_setup(mut self, scales: RangeInclusive<i32>, setup: ObservationSetup) -> Self {
        self.schedule.push((scales, setup));
        self
    }

    pub fn with_mask_override(mut self, j: i32, mask: MaskSpec) -> Self {
        self.mask_overrides.insert(j, mask);
        self
    }

    pub fn with_noise_override(mut self, j: i32, noise: NoiseSpec) -> Self {
        self.noise_overrides.insert(j, noise);
        self
    }

    pub fn with_beam(mut self, beam: BeamProfile) -> Self {
        self.beam = beam;
        self
    }

    /// Three-experiment pattern: a wide full-sky survey at coarse scales, a
    /// cap-masked noisier survey at intermediate scales, and a deep disc at
    /// the finest scales.
    pub fn abc(a: RangeInclusive<i32>, b: RangeInclusive<i32>, c: RangeInclusive<i32>, setups: [ObservationSetup; 3]) -> Self {
        let [sa, sb, sc] = setups;
        Self::default().with_setup(a, sa).with_setup(b, sb).with_setup(c, sc)
    }

    pub fn setup_for(&self, j: i32) -> Result<&ObservationSetup> {
        self.schedule
            .iter()
            .find(|(range, _)| range.contains(&j))
            .map(|(_, s)| s)
            .ok_or_else(|| Error::Config(format!("no observation setup covers scale {j}")))
    }

    pub fn mask_for(&self, j: i32) -> Result<&MaskSpec> {
        match self.mask_overrides.get(&j) {
            Some(m) => Ok(m),
            None => Ok(&self.setup_for(j)?.mask),
        }
    }

    pub fn noise_for(&self, j: i32) -> Result<&NoiseSpec> {
        match self.noise_overrides.get(&j) {
            Some(n) => Ok(n),
            None => Ok(&self.setup_for(j)?.noise),
        }
    }

    /// Name of the setup used at scale `j`, marked when overridden.
    pub fn label_for(&self, j: i32) -> Result<String> {
        let base = self.setup_for(j)?.name.clone();
        if self.mask_overrides.contains_key(&j) || self.noise_overrides.contains_key(&j) {
            Ok(format!("{base}*"))
        } else {
            Ok(base)
        }
    }

    pub fn mask_map(&self, j: i32, pix: &Pixelization) -> Result<Vec<f64>> {
        self.mask_for(j)?.evaluate(pix)
    }

    pub fn noise_map(&self, j: i32, pix: &Pixelization) -> Result<Vec<f64>> {
        self.noise_for(j)?.evaluate(pix)
    }
}
