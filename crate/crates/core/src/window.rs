//! B-adic needlet windows.
//!
//! The cutoff `a` equals 1 on `[-1/B, 1/B]`, vanishes outside `[-1, 1]` and
//! connects the two plateaus with the degree `2M + 1` Hermite polynomial whose
//! first `M` derivatives vanish at both ends. In Bernstein form on the
//! normalized interval `t in [0, 1]` that polynomial has coefficients
//! `1, ..., 1, 0, ..., 0` (`M + 1` ones followed by `M + 1` zeros), which makes
//! monotonicity and the endpoint conditions structural.
//!
//! Windows are `b_{j,l} = b(l / B^j)` with either `b^2(x) = a(x/B) - a(x)`
//! ([`WindowMode::Tight`], the default) or `b(x) = a(x/B) - a(x)`
//! ([`WindowMode::Literal`]).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// The smooth cutoff `a` generating the window family.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffFunction {
    band_ratio: f64,
    smoothness: usize,
    bernstein: Vec<f64>,
}

impl CutoffFunction {
    pub fn new(band_ratio: f64, smoothness: usize) -> Result<Self> {
        if !(band_ratio > 1.0) || !band_ratio.is_finite() {
            return Err(Error::invalid(format!(
                "band ratio B must be a finite number > 1, got {band_ratio}"
            )));
        }
        if smoothness < 3 {
            return Err(Error::invalid(format!(
                "smoothness order M must be >= 3, got {smoothness}"
            )));
        }
        let degree = 2 * smoothness + 1;
        let bernstein = (0..=degree)
            .map(|i| if i <= smoothness { 1.0 } else { 0.0 })
            .collect();
        Ok(Self {
            band_ratio,
            smoothness,
            bernstein,
        })
    }

    pub fn band_ratio(&self) -> f64 {
        self.band_ratio
    }

    pub fn smoothness(&self) -> usize {
        self.smoothness
    }

    /// Degree of the transition polynomial, `2M + 1`.
    pub fn degree(&self) -> usize {
        self.bernstein.len() - 1
    }

    /// Bernstein coefficients of the transition on the normalized interval.
    pub fn coefficients(&self) -> &[f64] {
        &self.bernstein
    }

    fn lower_knot(&self) -> f64 {
        1.0 / self.band_ratio
    }

    fn transition_width(&self) -> f64 {
        1.0 - self.lower_knot()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = x.abs();
        let lo = self.lower_knot();
        if x <= lo {
            1.0
        } else if x >= 1.0 {
            0.0
        } else {
            let t = (x - lo) / self.transition_width();
            de_casteljau(&self.bernstein, t).clamp(0.0, 1.0)
        }
    }

    /// `order`-th derivative of `a`, by exact differentiation of the stored
    /// Bernstein polynomial. Zero on both plateaus.
    pub fn derivative(&self, x: f64, order: usize) -> f64 {
        if order == 0 {
            return self.eval(x);
        }
        let n = self.degree();
        if order > n {
            return 0.0;
        }
        let ax = x.abs();
        let lo = self.lower_knot();
        if ax <= lo || ax >= 1.0 {
            return 0.0;
        }
        let mut diffs = self.bernstein.clone();
        for _ in 0..order {
            for i in 0..diffs.len() - 1 {
                diffs[i] = diffs[i + 1] - diffs[i];
            }
            diffs.pop();
        }
        let falling: f64 = (0..order).map(|i| (n - i) as f64).product();
        let t = (ax - lo) / self.transition_width();
        let chain = self.transition_width().powi(-(order as i32));
        let sign = if x < 0.0 && order % 2 == 1 { -1.0 } else { 1.0 };
        sign * falling * chain * de_casteljau(&diffs, t)
    }
}

fn de_casteljau(coeffs: &[f64], t: f64) -> f64 {
    let mut work = coeffs.to_vec();
    let s = 1.0 - t;
    for level in 1..work.len() {
        for i in 0..work.len() - level {
            work[i] = s * work[i] + t * work[i + 1];
        }
    }
    work[0]
}

/// How the window is derived from the cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WindowMode {
    /// `b^2(x) = a(x/B) - a(x)`: the squares telescope, giving a tight frame.
    #[default]
    Tight,
    /// `b(x) = a(x/B) - a(x)`.
    Literal,
}

impl fmt::Display for WindowMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WindowMode::Tight => "tight",
            WindowMode::Literal => "literal",
        })
    }
}

impl FromStr for WindowMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tight" => Ok(WindowMode::Tight),
            "literal" => Ok(WindowMode::Literal),
            other => Err(Error::invalid(format!("unknown window mode `{other}`"))),
        }
    }
}

/// Tabulated windows `b_{j,l}` for an inclusive range of scales.
#[derive(Debug, Clone)]
pub struct WindowFamily {
    cutoff: CutoffFunction,
    mode: WindowMode,
    j_min: i32,
    j_max: i32,
    // tables[j - j_min][l] for l in 0..=band_limit(j)
    tables: Vec<Vec<f64>>,
}

impl WindowFamily {
    pub fn new(cutoff: CutoffFunction, mode: WindowMode, j_min: i32, j_max: i32) -> Result<Self> {
        if j_min < 0 || j_max < j_min {
            return Err(Error::invalid(format!(
                "invalid scale range {j_min}..={j_max}"
            )));
        }
        let mut fam = Self {
            cutoff,
            mode,
            j_min,
            j_max,
            tables: Vec::new(),
        };
        fam.tables = (j_min..=j_max)
            .map(|j| {
                (0..=fam.band_limit(j))
                    .map(|l| fam.window_value(j, l))
                    .collect()
            })
            .collect();
        Ok(fam)
    }

    pub fn cutoff(&self) -> &CutoffFunction {
        &self.cutoff
    }

    pub fn mode(&self) -> WindowMode {
        self.mode
    }

    pub fn band_ratio(&self) -> f64 {
        self.cutoff.band_ratio
    }

    pub fn j_range(&self) -> std::ops::RangeInclusive<i32> {
        self.j_min..=self.j_max
    }

    pub fn contains(&self, j: i32) -> bool {
        self.j_range().contains(&j)
    }

    /// `L_j^(b) = ceil(B^{j+1})`.
    pub fn band_limit(&self, j: i32) -> usize {
        // Guard against B^{j+1} landing a hair above an integer.
        let top = self.band_ratio().powi(j + 1);
        let rounded = top.round();
        if (top - rounded).abs() <= 1e-9 * top {
            rounded as usize
        } else {
            top.ceil() as usize
        }
    }

    /// Continuous window profile `b(x)`.
    pub fn profile(&self, x: f64) -> f64 {
        self.combine(self.cutoff.eval(x / self.band_ratio()), self.cutoff.eval(x))
    }

    fn combine(&self, outer: f64, inner: f64) -> f64 {
        let diff = outer - inner;
        match self.mode {
            WindowMode::Tight => diff.max(0.0).sqrt(),
            WindowMode::Literal => diff,
        }
    }

    // Evaluated from l / B^{j+1} and l / B^j so that neighbouring scales share
    // the exact same cutoff value and the squares telescope to rounding.
    fn window_value(&self, j: i32, l: usize) -> f64 {
        let b = self.band_ratio();
        let l = l as f64;
        self.combine(
            self.cutoff.eval(l / b.powi(j + 1)),
            self.cutoff.eval(l / b.powi(j)),
        )
    }

    /// `b_{j,l}`; zero outside the scale's band and for scales not tabulated.
    pub fn eval(&self, j: i32, l: usize) -> f64 {
        if !self.contains(j) {
            return 0.0;
        }
        self.tables[(j - self.j_min) as usize]
            .get(l)
            .copied()
            .unwrap_or(0.0)
    }

    /// Window values `b_{j,0..=L_j^(b)}`.
    pub fn scale_table(&self, j: i32) -> Option<&[f64]> {
        self.contains(j)
            .then(|| self.tables[(j - self.j_min) as usize].as_slice())
    }

    /// Smallest and largest `l` with `b_{j,l} != 0`, or `None` for an empty band.
    pub fn scale_band(&self, j: i32) -> Option<(usize, usize)> {
        let table = self.scale_table(j)?;
        let lo = table.iter().position(|&b| b != 0.0)?;
        let hi = table.iter().rposition(|&b| b != 0.0)?;
        Some((lo, hi))
    }

    /// `sum_j b_{j,l}^2` over the family's scales.
    pub fn partition_sum(&self, l: usize) -> f64 {
        self.j_range().map(|j| self.eval(j, l).powi(2)).sum()
    }
}
