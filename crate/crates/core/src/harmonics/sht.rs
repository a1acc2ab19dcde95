use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::{Alm, LegendreRecursion};
use crate::error::{Error, Result};
use crate::grid::{Direction, Pixelization};

/// Relative tolerance on the imaginary part of synthesized samples.
pub const IMAGINARY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy)]
struct RingGeometry {
    cos_theta: f64,
    sin_theta: f64,
    point_weight: f64,
}

/// Reusable transform between samples on a [`Pixelization`] and an [`Alm`]
/// of a fixed maximum degree.
///
/// Each coefficient is accumulated over rings in ascending order inside a
/// single task, so results do not depend on the number of worker threads.
pub struct ShtPlan {
    lmax: usize,
    order: usize,
    n_phi: usize,
    rings: Vec<RingGeometry>,
    recursion: LegendreRecursion,
    fft_forward: Arc<dyn Fft<f64>>,
    fft_inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for ShtPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ShtPlan")
            .field("lmax", &self.lmax)
            .field("n_phi", &self.n_phi)
            .field("n_rings", &self.rings.len())
            .finish()
    }
}

impl ShtPlan {
    /// Plan for degrees `0..=lmax` on `pix`. Analysis additionally requires
    /// `lmax <= pix.order()`; synthesis accepts any degree.
    pub fn new(pix: &Pixelization, lmax: usize) -> Result<Self> {
        let mut planner = FftPlanner::new();
        let n_phi = pix.n_phi();
        Ok(Self {
            lmax,
            order: pix.order(),
            n_phi,
            rings: pix
                .rings()
                .iter()
                .map(|r| RingGeometry {
                    cos_theta: r.cos_theta,
                    sin_theta: r.sin_theta,
                    point_weight: r.point_weight,
                })
                .collect(),
            recursion: LegendreRecursion::new(lmax),
            fft_forward: planner.plan_fft_forward(n_phi),
            fft_inverse: planner.plan_fft_inverse(n_phi),
        })
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    pub fn n_points(&self) -> usize {
        self.rings.len() * self.n_phi
    }

    /// `a_{l,m} = sum_k lambda_k f(xi_k) conj(Y_{l,m}(xi_k))`.
    pub fn forward(&self, samples: &[f64]) -> Result<Alm> {
        if self.lmax > self.order {
            return Err(Error::invalid(format!(
                "analysis degree {} exceeds pixelization order {}",
                self.lmax, self.order
            )));
        }
        if samples.len() != self.n_points() {
            return Err(Error::Shape {
                expected: self.n_points(),
                actual: samples.len(),
            });
        }
        let spectra: Vec<Vec<Complex64>> = samples
            .par_chunks(self.n_phi)
            .map(|ring| {
                let mut buf: Vec<Complex64> =
                    ring.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                self.fft_forward.process(&mut buf);
                buf
            })
            .collect();

        let lmax = self.lmax;
        let columns: Vec<Vec<Complex64>> = (0..=lmax)
            .into_par_iter()
            .map(|m| {
                let mut acc = vec![Complex64::new(0.0, 0.0); lmax - m + 1];
                let mut plm = vec![0.0; lmax - m + 1];
                for (ring, spec) in self.rings.iter().zip(&spectra) {
                    if !self
                        .recursion
                        .column(m, ring.cos_theta, ring.sin_theta, &mut plm)
                    {
                        continue;
                    }
                    let f = spec[m % self.n_phi] * ring.point_weight;
                    for (a, &p) in acc.iter_mut().zip(&plm) {
                        *a += f * p;
                    }
                }
                acc
            })
            .collect();

        let mut alm = Alm::zeros(lmax);
        for (m, col) in columns.into_iter().enumerate() {
            for (i, v) in col.into_iter().enumerate() {
                alm.set(m + i, m, v);
            }
        }
        Ok(alm)
    }

    /// `f(xi_k) = sum_{l,m} a_{l,m} Y_{l,m}(xi_k)` on the plan's grid.
    pub fn inverse(&self, alm: &Alm) -> Result<Vec<f64>> {
        if alm.lmax() > self.lmax {
            return Err(Error::invalid(format!(
                "coefficient degree {} exceeds plan degree {}",
                alm.lmax(),
                self.lmax
            )));
        }
        let lmax = alm.lmax();
        let n_rings = self.rings.len();
        // per-order, per-ring Legendre sums
        let sums: Vec<Vec<Complex64>> = (0..=lmax)
            .into_par_iter()
            .map(|m| {
                let mut plm = vec![0.0; lmax - m + 1];
                let mut out = vec![Complex64::new(0.0, 0.0); n_rings];
                for (ring, o) in self.rings.iter().zip(out.iter_mut()) {
                    if !self
                        .recursion
                        .column(m, ring.cos_theta, ring.sin_theta, &mut plm)
                    {
                        continue;
                    }
                    let mut s = Complex64::new(0.0, 0.0);
                    for (i, &p) in plm.iter().enumerate() {
                        s += alm.get(m + i, m) * p;
                    }
                    *o = s;
                }
                out
            })
            .collect();

        let residue = sums[0].iter().map(|g| g.im.abs()).fold(0.0, f64::max);

        let n_phi = self.n_phi;
        let mut samples = vec![0.0; n_rings * n_phi];
        samples
            .par_chunks_mut(n_phi)
            .enumerate()
            .for_each(|(r, ring_out)| {
                let mut spec = vec![Complex64::new(0.0, 0.0); n_phi];
                spec[0] += Complex64::new(sums[0][r].re, 0.0);
                for (m, s) in sums.iter().enumerate().skip(1) {
                    spec[m % n_phi] += s[r] * 2.0;
                }
                self.fft_inverse.process(&mut spec);
                for (o, v) in ring_out.iter_mut().zip(&spec) {
                    *o = v.re;
                }
            });

        check_residue(residue, &samples)?;
        Ok(samples)
    }
}

fn check_residue(residue: f64, samples: &[f64]) -> Result<()> {
    let scale = samples.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let tolerance = IMAGINARY_TOLERANCE * scale;
    if residue > tolerance {
        return Err(Error::ConventionViolation {
            residue,
            tolerance,
        });
    }
    Ok(())
}

/// One-shot forward transform; see [`ShtPlan::forward`].
pub fn forward_sht(samples: &[f64], pix: &Pixelization, lmax: usize) -> Result<Alm> {
    ShtPlan::new(pix, lmax)?.forward(samples)
}

/// One-shot inverse transform onto the pixelization; see [`ShtPlan::inverse`].
pub fn inverse_sht(alm: &Alm, pix: &Pixelization) -> Result<Vec<f64>> {
    ShtPlan::new(pix, alm.lmax())?.inverse(alm)
}

/// Evaluates the field of `alm` at arbitrary directions.
pub fn inverse_sht_points(alm: &Alm, points: &[Direction]) -> Result<Vec<f64>> {
    let lmax = alm.lmax();
    let rec = LegendreRecursion::new(lmax);
    let evaluated: Vec<(f64, f64)> = points
        .par_iter()
        .map(|xi| {
            let x = xi.z.clamp(-1.0, 1.0);
            let s = (xi.x * xi.x + xi.y * xi.y).sqrt();
            let phi = xi.phi();
            let mut plm = vec![0.0; lmax + 1];
            let mut value = 0.0;
            let mut residue = 0.0;
            for m in 0..=lmax {
                let col = &mut plm[..lmax - m + 1];
                if !rec.column(m, x, s, col) {
                    continue;
                }
                let mut g = Complex64::new(0.0, 0.0);
                for (i, &p) in col.iter().enumerate() {
                    g += alm.get(m + i, m) * p;
                }
                if m == 0 {
                    value += g.re;
                    residue = g.im.abs();
                } else {
                    value += 2.0 * (g * Complex64::from_polar(1.0, m as f64 * phi)).re;
                }
            }
            (value, residue)
        })
        .collect();
    let residue = evaluated.iter().map(|e| e.1).fold(0.0, f64::max);
    let values: Vec<f64> = evaluated.into_iter().map(|e| e.0).collect();
    check_residue(residue, &values)?;
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::{eval_ylm, Y00};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_alm(lmax: usize, seed: u64) -> Alm {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut alm = Alm::zeros(lmax);
        for l in 0..=lmax {
            alm.set(l, 0, Complex64::new(rng.random_range(-1.0..1.0), 0.0));
            for m in 1..=l {
                alm.set(
                    l,
                    m,
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                );
            }
        }
        alm
    }

    #[test]
    fn constant_field() {
        let pix = Pixelization::new(12);
        let alm = forward_sht(&vec![2.5; pix.len()], &pix, 6).unwrap();
        for (l, m, a) in alm.iter() {
            if l == 0 {
                assert!((a.re - 2.5 / Y00).abs() < 1e-12);
                assert!(a.im.abs() < 1e-12);
            } else {
                assert!(a.norm() < 1e-12, "({l},{m}) = {a}");
            }
        }
    }

    #[test]
    fn real_part_of_single_harmonic() {
        let pix = Pixelization::new(8);
        let samples: Vec<f64> = pix
            .points()
            .iter()
            .map(|xi| eval_ylm(3, 2, xi).unwrap().re)
            .collect();
        let alm = forward_sht(&samples, &pix, 4).unwrap();
        // Re Y_{3,2} = (Y_{3,2} + Y_{3,-2}) / 2 so a_{3,2} = 1/2
        for (l, m, a) in alm.iter() {
            let expected = if (l, m) == (3, 2) { 0.5 } else { 0.0 };
            assert!((a - Complex64::new(expected, 0.0)).norm() < 1e-11, "({l},{m})");
        }
    }

    #[test]
    fn zero_and_monopole_synthesis() {
        let pix = Pixelization::new(6);
        let zero = inverse_sht(&Alm::zeros(3), &pix).unwrap();
        assert!(zero.iter().all(|&v| v == 0.0));
        let mut alm = Alm::zeros(3);
        alm.set(0, 0, Complex64::new((4.0 * std::f64::consts::PI).sqrt(), 0.0));
        let ones = inverse_sht(&alm, &pix).unwrap();
        assert!(ones.iter().all(|v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn round_trip_band_limited() {
        let pix = Pixelization::new(16);
        let plan = ShtPlan::new(&pix, 8).unwrap();
        let alm = random_alm(8, 1);
        let samples = plan.inverse(&alm).unwrap();
        let back = plan.forward(&samples).unwrap();
        for (l, m, a) in back.iter() {
            assert!((a - alm.get(l, m)).norm() < 1e-11);
        }
        let again = plan.inverse(&back).unwrap();
        let norm = samples.iter().map(|v| v * v).sum::<f64>().sqrt();
        let err = samples
            .iter()
            .zip(&again)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(err < 1e-10 * norm);
    }

    #[test]
    fn parseval() {
        let pix = Pixelization::new(32);
        let alm = random_alm(16, 7);
        let f = inverse_sht(&alm, &pix).unwrap();
        let lhs: f64 = pix.weights().iter().zip(&f).map(|(w, v)| w * v * v).sum();
        let rhs = alm.squared_norm();
        assert!((lhs - rhs).abs() < 1e-10 * rhs);
    }

    #[test]
    fn point_evaluation_matches_grid() {
        let pix = Pixelization::new(10);
        let alm = random_alm(5, 3);
        let grid = inverse_sht(&alm, &pix).unwrap();
        let direct = inverse_sht_points(&alm, pix.points()).unwrap();
        for (a, b) in grid.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn imaginary_axial_coefficient_is_rejected() {
        let pix = Pixelization::new(8);
        let mut alm = Alm::zeros(2);
        alm.set(1, 0, Complex64::new(1.0, 0.5));
        assert!(matches!(
            inverse_sht(&alm, &pix),
            Err(Error::ConventionViolation { .. })
        ));
        assert!(inverse_sht_points(&alm, pix.points()).is_err());
    }

    #[test]
    fn shape_and_degree_errors() {
        let pix = Pixelization::new(8);
        assert!(matches!(
            forward_sht(&[1.0; 3], &pix, 4),
            Err(Error::Shape { .. })
        ));
        assert!(forward_sht(&vec![0.0; pix.len()], &pix, 9).is_err());
    }
}
