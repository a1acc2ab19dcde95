//! Sample moments and the Anderson-Darling normality statistic.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Unbiased sample variance.
pub fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() as f64 - 1.0)
}

/// Sample skewness `m3 / m2^{3/2}` and excess kurtosis `m4 / m2^2 - 3`, from
/// central moments with `1/n` normalization.
pub fn skew_kurt(x: &[f64]) -> Result<(f64, f64)> {
    if x.len() < 4 {
        return Err(Error::DegenerateSample(format!(
            "need at least 4 values, got {}",
            x.len()
        )));
    }
    let n = x.len() as f64;
    let m = mean(x);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in x {
        let d = v - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if !(m2 > 0.0) || m2.sqrt() <= 1e-14 * m.abs() {
        return Err(Error::DegenerateSample("zero variance".into()));
    }
    Ok((m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0))
}

/// Critical values of the modified statistic `A^2 (1 + 0.75/n + 2.25/n^2)` for
/// a normal sample with estimated mean and variance (D'Agostino & Stephens).
pub const AD_CRITICAL_VALUES: [(f64, f64); 4] = [(0.10, 0.631), (0.05, 0.752), (0.025, 0.873), (0.01, 1.035)];

/// Anderson-Darling `A^2` of the studentized sample against the standard
/// normal, with the small-sample multiplier `1 + 0.75/n + 2.25/n^2` applied.
pub fn anderson_darling(x: &[f64]) -> Result<f64> {
    let n = x.len();
    if n < 8 {
        return Err(Error::DegenerateSample(format!(
            "need at least 8 values, got {n}"
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateSample("non-finite value".into()));
    }
    let m = mean(x);
    let sd = variance(x).sqrt();
    if !(sd > 0.0) || sd <= 1e-14 * m.abs() {
        return Err(Error::DegenerateSample("zero variance".into()));
    }
    let mut z: Vec<f64> = x.iter().map(|v| (v - m) / sd).collect();
    z.sort_by(f64::total_cmp);
    let normal = Normal::standard();
    let nf = n as f64;
    let s: f64 = (0..n)
        .map(|i| {
            let lower = normal.cdf(z[i]).ln();
            // upper tail of the mirrored order statistic, computed without 1 - cdf
            let upper = normal.cdf(-z[n - 1 - i]).ln();
            (2 * i + 1) as f64 * (lower + upper)
        })
        .sum();
    let a2 = -nf - s / nf;
    Ok(a2 * (1.0 + 0.75 / nf + 2.25 / (nf * nf)))
}

/// Approximate p-value of the modified statistic (D'Agostino & Stephens
/// piecewise fit). Diagnostic only.
pub fn anderson_darling_p_value(a2: f64) -> f64 {
    let p = if a2 < 0.2 {
        1.0 - (-13.436 + 101.14 * a2 - 223.73 * a2 * a2).exp()
    } else if a2 < 0.34 {
        1.0 - (-8.318 + 42.796 * a2 - 59.938 * a2 * a2).exp()
    } else if a2 < 0.6 {
        (0.9177 - 4.279 * a2 - 1.38 * a2 * a2).exp()
    } else if a2 < 10.0 {
        (1.2937 - 5.709 * a2 + 0.0186 * a2 * a2).exp()
    } else {
        3.7e-24
    };
    p.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use rand_distr::{Distribution, Exp1, StandardNormal};

    fn normal_sample(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn two_point_sample_is_symmetric() {
        let (s, _) = skew_kurt(&[-1.0, 1.0, -1.0, 1.0]).unwrap();
        assert_eq!(s, 0.0);
    }

    #[test]
    fn degenerate_samples_error() {
        assert!(skew_kurt(&[2.0; 10]).is_err());
        assert!(skew_kurt(&[1.0, 2.0]).is_err());
        assert!(anderson_darling(&[3.0; 20]).is_err());
        assert!(anderson_darling(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn normal_sample_moments() {
        let x = normal_sample(10_000, 11);
        let (s, k) = skew_kurt(&x).unwrap();
        assert!(s.abs() < 0.08, "skew {s}");
        assert!(k.abs() < 0.15, "exkurt {k}");
    }

    #[test]
    fn squared_normals_are_right_skewed() {
        let x: Vec<f64> = normal_sample(2000, 5).iter().map(|v| v * v).collect();
        assert!(skew_kurt(&x).unwrap().0 > 0.0);
    }

    #[test]
    fn anderson_darling_accepts_normal_data() {
        let critical = AD_CRITICAL_VALUES[3].1;
        let accepted = (0..100)
            .filter(|&t| anderson_darling(&normal_sample(10_000, 1000 + t)).unwrap() < critical)
            .count();
        assert!(accepted >= 95, "accepted {accepted}/100");
    }

    #[test]
    fn anderson_darling_rejects_exponential_data() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let x: Vec<f64> = (0..10_000).map(|_| Exp1.sample(&mut rng)).collect();
        assert!(anderson_darling(&x).unwrap() > AD_CRITICAL_VALUES[3].1);
    }

    #[test]
    fn p_value_is_monotone() {
        let mut prev = 1.0;
        for i in 0..200 {
            let p = anderson_darling_p_value(i as f64 * 0.05);
            assert!(p <= prev + 1e-12);
            prev = p;
        }
        assert!((anderson_darling_p_value(1.035) - 0.01).abs() < 0.002);
    }
}
