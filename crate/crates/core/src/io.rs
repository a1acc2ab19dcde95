//! Text formats: map files, coefficient files and CSV tables.
//!
//! Floats are written with 17 significant digits so that files round-trip
//! exactly and identical runs produce identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Pixelization;
use crate::harmonics::Alm;
use crate::mc::{DiagnosticsRow, ResultRow};
use crate::needlet::weighted_kernel;
use crate::window::WindowFamily;

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_error(path: &Path, line: usize, message: impl std::fmt::Display) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        message: format!("line {line}: {message}"),
    }
}

/// Values on a pixelization as stored in a map file.
#[derive(Debug, Clone, PartialEq)]
pub struct MapFile {
    pub order: usize,
    pub n_rings: usize,
    pub n_phi: usize,
    pub values: Vec<f64>,
}

impl MapFile {
    /// Checks the header against `pix`.
    pub fn check(&self, pix: &Pixelization) -> Result<()> {
        if self.order != pix.order() || self.n_rings != pix.n_rings() || self.n_phi != pix.n_phi() {
            return Err(Error::invalid(format!(
                "map of order {} ({} x {}) does not match pixelization of order {} ({} x {})",
                self.order,
                self.n_rings,
                self.n_phi,
                pix.order(),
                pix.n_rings(),
                pix.n_phi()
            )));
        }
        if self.values.len() != pix.len() {
            return Err(Error::Shape {
                expected: pix.len(),
                actual: self.values.len(),
            });
        }
        Ok(())
    }
}

pub fn format_map(pix: &Pixelization, values: &[f64]) -> Result<String> {
    if values.len() != pix.len() {
        return Err(Error::Shape {
            expected: pix.len(),
            actual: values.len(),
        });
    }
    let mut out = String::with_capacity(values.len() * 100);
    let _ = writeln!(out, "#order {}", pix.order());
    let _ = writeln!(out, "#nrings {}", pix.n_rings());
    let _ = writeln!(out, "#nphi {}", pix.n_phi());
    out.push_str("# k,theta,phi,lambda,value\n");
    for (k, v) in values.iter().enumerate() {
        let (theta, phi) = pix.angles(k);
        let _ = writeln!(out, "{k},{},{},{},{}", num(theta), num(phi), num(pix.weight(k)), num(*v));
    }
    Ok(out)
}

pub fn write_map(path: &Path, pix: &Pixelization, values: &[f64]) -> Result<()> {
    write_text(path, &format_map(pix, values)?)
}

pub fn parse_map(text: &str, path: &Path) -> Result<MapFile> {
    let (mut order, mut n_rings, mut n_phi) = (None, None, None);
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let mut parts = rest.split_whitespace();
            let slot = match parts.next() {
                Some("order") => &mut order,
                Some("nrings") => &mut n_rings,
                Some("nphi") => &mut n_phi,
                _ => continue,
            };
            let v = parts
                .next()
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| parse_error(path, i + 1, "malformed header"))?;
            *slot = Some(v);
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(parse_error(path, i + 1, format!("expected 5 fields, got {}", fields.len())));
        }
        let k: usize = fields[0].parse().map_err(|e| parse_error(path, i + 1, e))?;
        if k != values.len() {
            return Err(parse_error(path, i + 1, format!("expected index {}, got {k}", values.len())));
        }
        let v: f64 = fields[4].parse().map_err(|e| parse_error(path, i + 1, e))?;
        values.push(v);
    }
    let missing = |name: &str| parse_error(path, 0, format!("missing #{name} header"));
    Ok(MapFile {
        order: order.ok_or_else(|| missing("order"))?,
        n_rings: n_rings.ok_or_else(|| missing("nrings"))?,
        n_phi: n_phi.ok_or_else(|| missing("nphi"))?,
        values,
    })
}

pub fn read_map(path: &Path) -> Result<MapFile> {
    parse_map(&read_text(path)?, path)
}

/// Reads a map and checks it against `pix`.
pub fn read_map_for(path: &Path, pix: &Pixelization) -> Result<Vec<f64>> {
    let map = read_map(path)?;
    map.check(pix).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    Ok(map.values)
}

pub fn format_alm(alm: &Alm) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "#lmax {}", alm.lmax());
    for (l, m, a) in alm.iter() {
        let _ = writeln!(out, "{l},{m},{},{}", num(a.re), num(a.im));
    }
    out
}

pub fn write_alm(path: &Path, alm: &Alm) -> Result<()> {
    write_text(path, &format_alm(alm))
}

pub fn parse_alm(text: &str, path: &Path) -> Result<Alm> {
    let mut alm: Option<Alm> = None;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let mut parts = rest.split_whitespace();
            if parts.next() == Some("lmax") {
                let lmax = parts
                    .next()
                    .and_then(|s| s.parse::<usize>().ok())
                    .ok_or_else(|| parse_error(path, i + 1, "malformed #lmax header"))?;
                alm = Some(Alm::zeros(lmax));
            }
            continue;
        }
        let target = alm
            .as_mut()
            .ok_or_else(|| parse_error(path, i + 1, "data before #lmax header"))?;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(parse_error(path, i + 1, format!("expected 4 fields, got {}", fields.len())));
        }
        let l: usize = fields[0].parse().map_err(|e| parse_error(path, i + 1, e))?;
        let m: usize = fields[1].parse().map_err(|e| parse_error(path, i + 1, e))?;
        if m > l || l > target.lmax() {
            return Err(parse_error(path, i + 1, format!("invalid degree/order ({l}, {m})")));
        }
        let re: f64 = fields[2].parse().map_err(|e| parse_error(path, i + 1, e))?;
        let im: f64 = fields[3].parse().map_err(|e| parse_error(path, i + 1, e))?;
        target.set(l, m, Complex64::new(re, im));
    }
    alm.ok_or_else(|| parse_error(path, 0, "missing #lmax header"))
}

pub fn read_alm(path: &Path) -> Result<Alm> {
    parse_alm(&read_text(path)?, path)
}

/// `j,l,b` rows for every tabulated degree of the requested scales.
pub fn windows_csv(family: &WindowFamily, scales: &[i32]) -> String {
    let mut out = String::from("j,l,b\n");
    for &j in scales {
        for (l, b) in family.scale_table(j).unwrap_or(&[]).iter().enumerate() {
            let _ = writeln!(out, "{j},{l},{}", num(*b));
        }
    }
    out
}

/// `j,theta,value` rows of the zonal profile `sum_l b_{j,l} L_l(cos theta)`
/// at `samples + 1` equispaced colatitudes in `[0, pi]`.
pub fn profiles_csv(family: &WindowFamily, scales: &[i32], samples: usize) -> String {
    let mut out = String::from("j,theta,value\n");
    for &j in scales {
        let window = family.scale_table(j).unwrap_or(&[]);
        for i in 0..=samples {
            let theta = std::f64::consts::PI * i as f64 / samples.max(1) as f64;
            let _ = writeln!(out, "{j},{},{}", num(theta), num(weighted_kernel(window, theta.cos())));
        }
    }
    out
}

/// `l,sum_b2` rows for `l = 0..=lmax`.
pub fn partition_csv(family: &WindowFamily, lmax: usize) -> String {
    let mut out = String::from("l,sum_b2\n");
    for l in 0..=lmax {
        let _ = writeln!(out, "{l},{}", num(family.partition_sum(l)));
    }
    out
}

pub fn results_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from("j,replicate,c_hat,c_target,kept_count,mode\n");
    for row in rows {
        match &row.outcome {
            Ok(e) => {
                let mode = if e.pilot_floored {
                    format!("{}-floored", e.weight_mode)
                } else {
                    e.weight_mode.to_string()
                };
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{mode}",
                    row.j,
                    row.replicate,
                    num(e.c_hat),
                    num(row.c_target),
                    e.kept_count
                );
            }
            Err(_) => {
                let _ = writeln!(out, "{},{},NA,{},0,failed", row.j, row.replicate, num(row.c_target));
            }
        }
    }
    out
}

pub fn summary_csv(summary: &[DiagnosticsRow]) -> String {
    let mut out = String::from("j,mean,var,bias,rel_mse,skew,exkurt,ad_stat\n");
    for d in summary {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            d.j,
            num(d.mean),
            num(d.variance),
            num(d.bias),
            num(d.rel_mse),
            num(d.skewness),
            num(d.excess_kurtosis),
            num(d.ad_stat)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::window::{CutoffFunction, WindowMode};

    #[test]
    fn map_round_trip_is_exact() {
        let pix = Pixelization::new(6);
        let values: Vec<f64> = (0..pix.len()).map(|k| (k as f64 * 0.37).sin() / 3.0).collect();
        let text = format_map(&pix, &values).unwrap();
        assert!(text.starts_with("#order 6\n#nrings 4\n#nphi 7\n"));
        let map = parse_map(&text, Path::new("m")).unwrap();
        map.check(&pix).unwrap();
        assert_eq!(map.values, values);
        assert!(map.check(&Pixelization::new(8)).is_err());
    }

    #[test]
    fn map_errors() {
        let p = Path::new("bad.map");
        assert!(parse_map("#order 2\n#nrings 2\n0,1,2,3\n", p).is_err());
        assert!(parse_map("0,1,2,3,4\n", p).is_err());
        assert!(parse_map("#order 0\n#nrings 1\n#nphi 1\n1,0,0,1,2\n", p).is_err());
        assert!(format_map(&Pixelization::new(2), &[1.0]).is_err());
    }

    #[test]
    fn alm_round_trip() {
        let mut alm = Alm::zeros(3);
        alm.set(2, 1, Complex64::new(0.1, -1.0 / 3.0));
        alm.set(3, 0, Complex64::new(7.0, 0.0));
        let back = parse_alm(&format_alm(&alm), Path::new("a")).unwrap();
        assert_eq!(back, alm);
        assert!(parse_alm("#lmax 1\n2,0,1,0\n", Path::new("a")).is_err());
    }

    #[test]
    fn window_tables() {
        let fam = WindowFamily::new(CutoffFunction::new(2.0, 5).unwrap(), WindowMode::Tight, 0, 8).unwrap();
        assert_eq!(windows_csv(&fam, &[]), "j,l,b\n");
        assert_eq!(profiles_csv(&fam, &[], 10), "j,theta,value\n");
        let part = partition_csv(&fam, 100);
        for line in part.lines().skip(2) {
            let v: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            assert!((v - 1.0).abs() < 1e-12);
        }
        let prof = profiles_csv(&fam, &[3], 4);
        let first: f64 = prof.lines().nth(1).unwrap().split(',').nth(2).unwrap().parse().unwrap();
        let peak: f64 = fam
            .scale_table(3)
            .unwrap()
            .iter()
            .enumerate()
            .map(|(l, b)| b * (2 * l + 1) as f64 / (4.0 * std::f64::consts::PI))
            .sum();
        assert!((first - peak).abs() < 1e-13 * peak);
    }
}
