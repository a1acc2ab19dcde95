//! Spherical harmonics and transforms.
//!
//! Harmonics are the orthonormal complex `Y_{l,m}` with the Condon-Shortley
//! phase, so a real field satisfies `a_{l,-m} = (-1)^m conj(a_{l,m})`. Only
//! `m >= 0` is stored.

mod legendre;
mod sht;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use rayon::prelude::*;

use crate::grid::{Direction, Pixelization};

pub use legendre::{legendre_kernel, legendre_kernel_series, legendre_series, LegendreRecursion};
pub use sht::{forward_sht, inverse_sht, inverse_sht_points, ShtPlan};

/// Harmonic coefficients `a_{l,m}`, `0 <= m <= l <= lmax`, of a real field.
#[derive(Debug, Clone, PartialEq)]
pub struct Alm {
    lmax: usize,
    data: Vec<Complex64>,
}

#[inline]
pub(crate) fn alm_index(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

impl Alm {
    pub fn zeros(lmax: usize) -> Self {
        Self {
            lmax,
            data: vec![Complex64::new(0.0, 0.0); alm_index(lmax, lmax) + 1],
        }
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    pub fn get(&self, l: usize, m: usize) -> Complex64 {
        debug_assert!(m <= l && l <= self.lmax);
        self.data[alm_index(l, m)]
    }

    /// Coefficient for any `m` in `-l..=l`, using the real-field relation.
    pub fn get_signed(&self, l: usize, m: i64) -> Complex64 {
        let a = self.get(l, m.unsigned_abs() as usize);
        if m >= 0 {
            a
        } else if m % 2 == 0 {
            a.conj()
        } else {
            -a.conj()
        }
    }

    pub fn set(&mut self, l: usize, m: usize, value: Complex64) {
        debug_assert!(m <= l && l <= self.lmax);
        self.data[alm_index(l, m)] = value;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// Iterates `(l, m, a_{l,m})` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..=self.lmax).flat_map(move |l| (0..=l).map(move |m| (l, m, self.get(l, m))))
    }

    /// Copy truncated or zero-padded to `lmax`.
    pub fn resized(&self, lmax: usize) -> Self {
        let mut out = Self::zeros(lmax);
        for l in 0..=lmax.min(self.lmax) {
            for m in 0..=l {
                out.set(l, m, self.get(l, m));
            }
        }
        out
    }

    /// Multiplies every `a_{l,m}` by `profile[l]`; degrees beyond the profile
    /// are zeroed. The result keeps `lmax` at most `profile.len() - 1`.
    pub fn filtered(&self, profile: &[f64]) -> Self {
        let lmax = self.lmax.min(profile.len().saturating_sub(1));
        let mut out = Self::zeros(lmax);
        for (l, p) in profile.iter().enumerate().take(lmax + 1) {
            for m in 0..=l {
                out.set(l, m, self.get(l, m) * p);
            }
        }
        out
    }

    /// `sum_{l,m} |a_{l,m}|^2` over all `m` in `-l..=l`.
    pub fn squared_norm(&self) -> f64 {
        self.iter()
            .map(|(_, m, a)| if m == 0 { a.norm_sqr() } else { 2.0 * a.norm_sqr() })
            .sum()
    }

    /// Empirical spectrum `(2l+1)^{-1} sum_m |a_{l,m}|^2`.
    pub fn empirical_spectrum(&self) -> Vec<f64> {
        (0..=self.lmax)
            .map(|l| {
                let s: f64 = (0..=l)
                    .map(|m| {
                        let p = self.get(l, m).norm_sqr();
                        if m == 0 {
                            p
                        } else {
                            2.0 * p
                        }
                    })
                    .sum();
                s / (2 * l + 1) as f64
            })
            .collect()
    }

    /// Largest `|Im a_{l,0}|`; non-zero values break the real-field constraint.
    pub fn axial_imaginary_residue(&self) -> f64 {
        (0..=self.lmax)
            .map(|l| self.get(l, 0).im.abs())
            .fold(0.0, f64::max)
    }
}

/// Orthonormal complex spherical harmonic `Y_{l,m}(xi)`.
pub fn eval_ylm(l: usize, m: i64, xi: &Direction) -> Result<Complex64> {
    let am = m.unsigned_abs() as usize;
    if am > l {
        return Err(Error::invalid(format!("|m| = {am} exceeds l = {l}")));
    }
    let rec = LegendreRecursion::new(l);
    let (x, s) = (xi.z.clamp(-1.0, 1.0), (xi.x * xi.x + xi.y * xi.y).sqrt());
    let mut column = vec![0.0; l - am + 1];
    rec.column(am, x, s, &mut column);
    let plm = column[l - am];
    let phase = Complex64::from_polar(1.0, am as f64 * xi.phi());
    let y = phase * plm;
    Ok(if m >= 0 {
        y
    } else if am.is_multiple_of(2) {
        y.conj()
    } else {
        -y.conj()
    })
}

/// Largest entry of `|G - I|` where `G[(l,m),(l',m')] = sum_k lambda_k
/// conj(Y_{l,m}(xi_k)) Y_{l',m'}(xi_k)`, over all pairs with `l + l' <= degree`.
pub fn gram_max_error(pix: &Pixelization, degree: usize) -> f64 {
    let lmax = degree;
    let rec = LegendreRecursion::new(lmax);
    let n_harm = (lmax + 1) * (lmax + 1);
    let mut basis = vec![Complex64::new(0.0, 0.0); pix.len() * n_harm];
    let mut column = vec![0.0; lmax + 1];
    for (k, xi) in pix.points().iter().enumerate() {
        let (x, s) = (xi.z.clamp(-1.0, 1.0), (xi.x * xi.x + xi.y * xi.y).sqrt());
        let row = &mut basis[k * n_harm..(k + 1) * n_harm];
        for m in 0..=lmax {
            rec.column(m, x, s, &mut column[..=lmax - m]);
            let phase = Complex64::from_polar(1.0, m as f64 * xi.phi());
            for l in m..=lmax {
                let y = phase * column[l - m];
                row[l * l + l + m] = y;
                let neg = if m % 2 == 0 { y.conj() } else { -y.conj() };
                row[(l * l + l) - m] = neg;
            }
        }
    }
    let weights = pix.weights();
    (0..n_harm)
        .into_par_iter()
        .map(|a| {
            let la = (a as f64).sqrt() as usize;
            let n_pair = (degree - la + 1) * (degree - la + 1);
            let mut acc = vec![Complex64::new(0.0, 0.0); n_pair];
            for (k, w) in weights.iter().enumerate() {
                let row = &basis[k * n_harm..k * n_harm + n_pair];
                let ya = basis[k * n_harm + a].conj() * *w;
                for (g, y) in acc.iter_mut().zip(row) {
                    *g += ya * y;
                }
            }
            acc.iter()
                .enumerate()
                .map(|(b, g)| (g - if a == b { 1.0 } else { 0.0 }).norm())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// `1 / sqrt(4 pi)`, the constant harmonic.
pub const Y00: f64 = 0.282_094_791_773_878_14;

pub(crate) const INV_FOUR_PI: f64 = 1.0 / (4.0 * PI);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_is_identity_only_up_to_order() {
        let pix = Pixelization::new(6);
        assert!(gram_max_error(&pix, 6) < 1e-13);
        assert!(gram_max_error(&pix, 8) > 1e-3);
    }

    #[test]
    fn constant_and_axial_values() {
        let xi = Direction::from_angles(0.4, 1.3);
        assert!((eval_ylm(0, 0, &xi).unwrap().re - Y00).abs() < 1e-16);
        let y10 = eval_ylm(1, 0, &Direction::NORTH).unwrap();
        assert!((y10.re - (3.0 / (4.0 * PI)).sqrt()).abs() < 1e-15);
        assert_eq!(y10.im, 0.0);
    }

    #[test]
    fn rejects_m_above_l() {
        assert!(eval_ylm(2, 3, &Direction::NORTH).is_err());
        assert!(eval_ylm(2, -3, &Direction::NORTH).is_err());
    }

    #[test]
    fn condon_shortley_phase() {
        let theta: f64 = 0.5;
        let y11 = eval_ylm(1, 1, &Direction::from_angles(theta, 0.0)).unwrap();
        let expected = -(3.0 / (8.0 * PI)).sqrt() * theta.sin();
        assert!((y11.re - expected).abs() < 1e-15);
        let ym = eval_ylm(1, -1, &Direction::from_angles(theta, 0.0)).unwrap();
        assert!((ym.re + expected).abs() < 1e-15);
    }

    #[test]
    fn high_degree_against_extended_precision() {
        // mpmath.spherharm(50, 30, 1.0, 0.7) at 40 significant digits
        let expected = Complex64::new(
            0.209_217_959_415_457_4,
            -0.319_580_124_962_246_8,
        );
        let y = eval_ylm(50, 30, &Direction::from_angles(1.0, 0.7)).unwrap();
        assert!((y - expected).norm() < 1e-13, "{y}");
    }

    #[test]
    fn signed_access_follows_real_field_relation() {
        let mut alm = Alm::zeros(3);
        alm.set(3, 1, Complex64::new(0.5, -0.25));
        alm.set(3, 2, Complex64::new(0.1, 0.2));
        assert_eq!(alm.get_signed(3, -1), Complex64::new(-0.5, -0.25));
        assert_eq!(alm.get_signed(3, -2), Complex64::new(0.1, -0.2));
    }

    #[test]
    fn filtering_truncates() {
        let mut alm = Alm::zeros(4);
        alm.set(4, 2, Complex64::new(1.0, 1.0));
        alm.set(1, 0, Complex64::new(2.0, 0.0));
        let f = alm.filtered(&[1.0, 0.5, 1.0]);
        assert_eq!(f.lmax(), 2);
        assert_eq!(f.get(1, 0), Complex64::new(1.0, 0.0));
    }
}
