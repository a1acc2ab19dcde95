use super::{alm_index, INV_FOUR_PI};

// Below this magnitude the sectoral seed P_m^m is treated as zero; every
// higher degree of that order then stays far below double precision.
const SEED_LOG_FLOOR: f64 = -690.0;

/// Coefficients of the normalized associated Legendre recursion
///
/// `P_l^m = a_{l,m} (x P_{l-1}^m - b_{l,m} P_{l-2}^m)`,
/// `a_{l,m} = sqrt((4l^2 - 1) / (l^2 - m^2))`, `b_{l,m} = 1 / a_{l-1,m}`,
///
/// for functions normalized so that `Y_{l,m} = P_l^m(cos theta) e^{i m phi}`.
#[derive(Debug, Clone)]
pub struct LegendreRecursion {
    lmax: usize,
    // sqrt((2m+1)!! / (4 pi (2m)!!)) without the (-1)^m sin^m factor
    sectoral: Vec<f64>,
    ln_sectoral: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl LegendreRecursion {
    pub fn new(lmax: usize) -> Self {
        let mut sectoral = Vec::with_capacity(lmax + 1);
        let mut acc = INV_FOUR_PI;
        sectoral.push(acc.sqrt());
        for m in 1..=lmax {
            acc *= (2 * m + 1) as f64 / (2 * m) as f64;
            sectoral.push(acc.sqrt());
        }
        let ln_sectoral = sectoral.iter().map(|v| v.ln()).collect();
        let size = alm_index(lmax, lmax) + 1;
        let mut a = vec![0.0; size];
        let mut b = vec![0.0; size];
        for m in 0..=lmax {
            for l in m + 2..=lmax {
                let (lf, mf) = (l as f64, m as f64);
                let idx = alm_index(l, m);
                a[idx] = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let lp = lf - 1.0;
                b[idx] = ((lp * lp - mf * mf) / (4.0 * lp * lp - 1.0)).sqrt();
            }
        }
        Self {
            lmax,
            sectoral,
            ln_sectoral,
            a,
            b,
        }
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    /// Fills `out[i] = P_{m+i}^m(x)` for `i < out.len()` (degrees up to
    /// `lmax`), with `x = cos theta` and `sin_theta = sin theta >= 0`.
    /// Returns `false` when the whole column underflows to zero.
    pub fn column(&self, m: usize, x: f64, sin_theta: f64, out: &mut [f64]) -> bool {
        let len = out.len().min(self.lmax + 1 - m);
        let seed = if m == 0 {
            self.sectoral[0]
        } else {
            let ln = self.ln_sectoral[m] + m as f64 * sin_theta.ln();
            if !(ln > SEED_LOG_FLOOR) {
                out.iter_mut().for_each(|v| *v = 0.0);
                return false;
            }
            let mag = ln.exp();
            if m % 2 == 1 {
                -mag
            } else {
                mag
            }
        };
        if len == 0 {
            return true;
        }
        out[0] = seed;
        if len > 1 {
            out[1] = x * ((2 * m + 3) as f64).sqrt() * seed;
        }
        for i in 2..len {
            let idx = alm_index(m + i, m);
            out[i] = self.a[idx] * (x * out[i - 1] - self.b[idx] * out[i - 2]);
        }
        out[len..].iter_mut().for_each(|v| *v = 0.0);
        true
    }
}

/// Standard Legendre polynomials `P_0(t) ..= P_lmax(t)`.
pub fn legendre_series(lmax: usize, t: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(lmax + 1);
    p.push(1.0);
    if lmax >= 1 {
        p.push(t);
    }
    for l in 2..=lmax {
        let lf = l as f64;
        let next = ((2.0 * lf - 1.0) * t * p[l - 1] - (lf - 1.0) * p[l - 2]) / lf;
        p.push(next);
    }
    p
}

/// Zonal kernels `L_l(t) = (2l + 1) / (4 pi) P_l(t)` for `l = 0..=lmax`,
/// normalized so that `L_l(1) = (2l + 1) / (4 pi)`.
pub fn legendre_kernel_series(lmax: usize, t: f64) -> Vec<f64> {
    let mut p = legendre_series(lmax, t);
    for (l, v) in p.iter_mut().enumerate() {
        *v *= (2 * l + 1) as f64 * INV_FOUR_PI;
    }
    p
}

/// Zonal kernel `L_l(t)`.
pub fn legendre_kernel(l: usize, t: f64) -> f64 {
    legendre_kernel_series(l, t)[l]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn kernel_at_one() {
        for l in [0usize, 1, 5] {
            let expected = (2 * l + 1) as f64 / (4.0 * PI);
            assert!((legendre_kernel(l, 1.0) - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn first_degree_kernel() {
        for t in [-1.0, -0.3, 0.0, 0.45, 1.0] {
            assert!((legendre_kernel(1, t) - 3.0 * t / (4.0 * PI)).abs() < 1e-16);
        }
    }

    #[test]
    fn column_matches_closed_forms() {
        let rec = LegendreRecursion::new(4);
        let theta: f64 = 0.8;
        let (x, s) = (theta.cos(), theta.sin());
        let mut col = vec![0.0; 3];
        rec.column(2, x, s, &mut col);
        // P_2^2 normalized: sqrt(15 / (32 pi)) sin^2
        assert!((col[0] - (15.0 / (32.0 * PI)).sqrt() * s * s).abs() < 1e-15);
        // P_3^2: sqrt(105 / (32 pi)) sin^2 cos
        assert!((col[1] - (105.0 / (32.0 * PI)).sqrt() * s * s * x).abs() < 1e-15);
    }

    #[test]
    fn polar_underflow_is_clean_zero() {
        let rec = LegendreRecursion::new(600);
        let mut col = vec![1.0; 10];
        let nonzero = rec.column(500, 1.0, 1e-3, &mut col);
        assert!(!nonzero);
        assert!(col.iter().all(|&v| v == 0.0));
    }
}
