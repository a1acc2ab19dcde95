//! Gauss-Legendre product pixelizations of the sphere.
//!
//! A pixelization of order `L` uses `floor(L/2) + 1` Gauss-Legendre nodes in
//! `cos(theta)` and `L + 1` equispaced longitudes starting at `phi = 0`. The
//! product rule integrates every spherical harmonic of degree `<= L` exactly.
//! Points are stored ring-major (north to south, then by longitude) and the
//! ordering is part of the map file contract.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A point on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Direction {
    pub const NORTH: Direction = Direction {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };
    pub const SOUTH: Direction = Direction {
        x: 0.0,
        y: 0.0,
        z: -1.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Direction at colatitude `theta` and longitude `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self {
            x: st * cp,
            y: st * sp,
            z: ct,
        }
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self::new(self.x / n, self.y / n, self.z / n)
    }

    pub fn theta(&self) -> f64 {
        self.z.clamp(-1.0, 1.0).acos()
    }

    /// Longitude in `[0, 2 pi)`.
    pub fn phi(&self) -> f64 {
        let p = self.y.atan2(self.x);
        if p < 0.0 {
            p + 2.0 * PI
        } else {
            p
        }
    }
}

/// Geodesic distance `arccos(xi . xi')`, rejecting inputs that are not unit
/// vectors to within `1e-9`.
pub fn geodesic_distance(a: &Direction, b: &Direction) -> Result<f64> {
    for d in [a, b] {
        if (d.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "direction ({}, {}, {}) is not unit-normalized",
                d.x, d.y, d.z
            )));
        }
    }
    Ok(angle_between(a, b))
}

pub(crate) fn angle_between(a: &Direction, b: &Direction) -> f64 {
    a.dot(b).clamp(-1.0, 1.0).acos()
}

/// Gauss-Legendre nodes (descending) and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// One iso-latitude ring of a pixelization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ring {
    pub theta: f64,
    pub cos_theta: f64,
    pub sin_theta: f64,
    /// Gauss-Legendre weight of the ring's node.
    pub gl_weight: f64,
    /// Cubature weight shared by every point on the ring.
    pub point_weight: f64,
}

/// Cubature points `xi_k` and weights `lambda_k` of a given order.
#[derive(Debug, Clone)]
pub struct Pixelization {
    order: usize,
    n_phi: usize,
    rings: Vec<Ring>,
    points: Vec<Direction>,
    weights: Vec<f64>,
}

impl Pixelization {
    pub fn new(order: usize) -> Self {
        let n_rings = order / 2 + 1;
        let n_phi = order + 1;
        let (nodes, gl_weights) = gauss_legendre(n_rings);
        let dphi = 2.0 * PI / n_phi as f64;
        let rings: Vec<Ring> = nodes
            .iter()
            .zip(&gl_weights)
            .map(|(&x, &w)| Ring {
                theta: x.acos(),
                cos_theta: x,
                sin_theta: (1.0 - x * x).sqrt(),
                gl_weight: w,
                point_weight: w * dphi,
            })
            .collect();
        let mut points = Vec::with_capacity(n_rings * n_phi);
        let mut weights = Vec::with_capacity(n_rings * n_phi);
        for ring in &rings {
            for i in 0..n_phi {
                let (sp, cp) = (i as f64 * dphi).sin_cos();
                points.push(Direction::new(
                    ring.sin_theta * cp,
                    ring.sin_theta * sp,
                    ring.cos_theta,
                ));
                weights.push(ring.point_weight);
            }
        }
        Self {
            order,
            n_phi,
            rings,
            points,
            weights,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn n_rings(&self) -> usize {
        self.rings.len()
    }

    pub fn rings(&self) -> &[Ring] {
        &self.rings
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Direction] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn point(&self, k: usize) -> Direction {
        self.points[k]
    }

    pub fn weight(&self, k: usize) -> f64 {
        self.weights[k]
    }

    /// Colatitude and longitude of point `k`.
    pub fn angles(&self, k: usize) -> (f64, f64) {
        let ring = &self.rings[k / self.n_phi];
        let phi = 2.0 * PI * (k % self.n_phi) as f64 / self.n_phi as f64;
        (ring.theta, phi)
    }

    /// Cubature sum `sum_k lambda_k f(xi_k)`.
    pub fn integrate(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.len() {
            return Err(Error::Shape {
                expected: self.len(),
                actual: values.len(),
            });
        }
        Ok(self.weights.iter().zip(values).map(|(w, v)| w * v).sum())
    }

    /// Indices of all points within geodesic distance `radius` of `center`.
    /// Only rings whose colatitude is within `radius` of the center are scanned.
    pub fn points_within(&self, center: &Direction, radius: f64) -> Vec<usize> {
        let theta0 = center.theta();
        let mut out = Vec::new();
        for (r, ring) in self.rings.iter().enumerate() {
            if (ring.theta - theta0).abs() > radius + 1e-12 {
                continue;
            }
            let start = r * self.n_phi;
            for k in start..start + self.n_phi {
                if angle_between(center, &self.points[k]) <= radius {
                    out.push(k);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(6);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // exact up to degree 11
        for deg in 0..=11 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            let exact = if deg % 2 == 1 {
                0.0
            } else {
                2.0 / (deg as f64 + 1.0)
            };
            assert!((q - exact).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn order_zero_is_a_single_point() {
        let pix = Pixelization::new(0);
        assert_eq!(pix.len(), 1);
        assert!((pix.weight(0) - 4.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn point_count_and_weights() {
        let pix = Pixelization::new(8);
        assert_eq!(pix.len(), 45);
        assert_eq!(pix.n_rings(), 5);
        assert_eq!(pix.n_phi(), 9);
        for order in [0, 1, 2, 5, 8, 16, 33, 64] {
            let pix = Pixelization::new(order);
            let total: f64 = pix.weights().iter().sum();
            assert!((total - 4.0 * PI).abs() < 1e-12, "order {order}");
            assert!(pix.weights().iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn rings_run_north_to_south() {
        let pix = Pixelization::new(16);
        for pair in pix.rings().windows(2) {
            assert!(pair[0].theta < pair[1].theta);
        }
        let (theta, phi) = pix.angles(pix.n_phi() + 3);
        assert_eq!(theta, pix.rings()[1].theta);
        assert!((phi - 3.0 * 2.0 * PI / 17.0).abs() < 1e-15);
    }

    #[test]
    fn points_are_distinct() {
        let pix = Pixelization::new(12);
        for i in 0..pix.len() {
            for k in i + 1..pix.len() {
                assert!(angle_between(&pix.point(i), &pix.point(k)) > 1e-6);
            }
        }
    }

    #[test]
    fn geodesic_distance_special_cases() {
        let eq = Direction::from_angles(PI / 2.0, 0.3);
        assert_eq!(geodesic_distance(&Direction::NORTH, &Direction::NORTH).unwrap(), 0.0);
        assert!((geodesic_distance(&Direction::NORTH, &Direction::SOUTH).unwrap() - PI).abs() < 1e-15);
        assert!((geodesic_distance(&Direction::NORTH, &eq).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!(geodesic_distance(&Direction::new(0.0, 0.0, 1.1), &eq).is_err());
    }

    #[test]
    fn points_within_whole_sphere_and_single_point() {
        let pix = Pixelization::new(10);
        assert_eq!(pix.points_within(&Direction::NORTH, PI).len(), pix.len());
        let k = 17;
        assert_eq!(pix.points_within(&pix.point(k), 0.0), vec![k]);
    }

    #[test]
    fn points_within_matches_exhaustive_scan() {
        let pix = Pixelization::new(40);
        let center = Direction::from_angles(1.1, 2.0);
        for radius in [0.05, 0.3, 1.0, 2.5] {
            let fast = pix.points_within(&center, radius);
            let brute: Vec<usize> = (0..pix.len())
                .filter(|&k| angle_between(&center, &pix.point(k)) <= radius)
                .collect();
            assert_eq!(fast, brute);
        }
    }
}
