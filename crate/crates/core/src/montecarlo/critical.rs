//! Critical points of the Chern connection: zeros of
//! `G(z) = (1 + |z|^2) f'(z) - n conj(z) f(z)` in a disk.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::rings::RingGrid;
use super::{CoefficientVector, Polynomial};
use crate::{Error, Result};

/// `G(z)` for the monomial-basis polynomial `p` of degree parameter `n`.
pub fn chern_gradient(p: &Polynomial, n: u32, z: Complex64) -> Complex64 {
    let [f, d1, _] = p.eval_derivatives(z);
    (1.0 + z.norm_sqr()) * d1 - n as f64 * z.conj() * f
}

/// Tuning of the seeded Newton search.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CriticalSearchConfig {
    /// Seed density `g`: the polar seed grid has `g / 2` rings of `2 g`
    /// nodes, i.e. `g^2` seeds in total.
    pub grid: usize,
    pub max_iterations: usize,
    /// Residual bound relative to the local absolute size of `G`.
    pub residual_tolerance: f64,
    /// Repeat the search with a `2 g` grid and warn if the counts differ.
    pub coverage_check: bool,
}

impl Default for CriticalSearchConfig {
    fn default() -> Self {
        CriticalSearchConfig { grid: 96, max_iterations: 50, residual_tolerance: 1e-9, coverage_check: false }
    }
}

/// Outcome of a critical point search.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalSearch {
    pub points: Vec<Complex64>,
    /// Points whose real Jacobian is numerically singular.
    pub singular_hits: usize,
    /// `(count at g, count at 2 g)` when the coverage check disagreed.
    pub coverage_mismatch: Option<(usize, usize)>,
}

/// All critical points in `|z| <= radius` with the default configuration.
pub fn find_critical_points(poly: &CoefficientVector, radius: f64) -> Result<Vec<Complex64>> {
    let search = find_critical_points_with(poly, radius, &CriticalSearchConfig::default())?;
    if let Some((a, b)) = search.coverage_mismatch {
        log::warn!("critical point coverage check disagrees: {a} vs {b}");
    }
    Ok(search.points)
}

/// Seeded Newton search for critical points in `|z| <= radius`.
///
/// `G` and its Wirtinger derivatives are evaluated on a polar grid by FFT.
/// Newton runs start from nodes whose own Newton step stays within a couple
/// of cells, and from every cell around which `G` winds or whose phase is
/// under-resolved, so that simple zeros are not missed between nodes.
pub fn find_critical_points_with(
    poly: &CoefficientVector,
    radius: f64,
    config: &CriticalSearchConfig,
) -> Result<CriticalSearch> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("search radius must be positive, got {radius}")));
    }
    if config.grid < 4 {
        return Err(Error::InvalidArgument(format!("seed grid must be at least 4, got {}", config.grid)));
    }
    let searcher = Searcher::new(poly, radius, config);
    let mut out = searcher.run(config.grid);
    if config.coverage_check {
        let fine = searcher.run(2 * config.grid);
        if fine.points.len() != out.points.len() {
            out.coverage_mismatch = Some((out.points.len(), fine.points.len()));
        }
    }
    if out.singular_hits > 0 {
        log::debug!("{} critical points with singular Jacobian", out.singular_hits);
    }
    Ok(out)
}

struct Searcher<'a> {
    n: f64,
    radius: f64,
    config: &'a CriticalSearchConfig,
    p: Polynomial,
    dp: Polynomial,
    ddp: Polynomial,
}

/// `G` together with `dG/dz` and `dG/dzbar`.
#[derive(Clone, Copy)]
struct GradJet {
    g: Complex64,
    dz: Complex64,
    dzbar: Complex64,
}

impl<'a> Searcher<'a> {
    fn new(poly: &CoefficientVector, radius: f64, config: &'a CriticalSearchConfig) -> Self {
        let p = poly.monomial();
        let dp = derivative(&p);
        let ddp = derivative(&dp);
        Searcher { n: poly.n as f64, radius, config, p, dp, ddp }
    }

    fn jet_from(&self, z: Complex64, f: Complex64, d1: Complex64, d2: Complex64) -> GradJet {
        let w = 1.0 + z.norm_sqr();
        GradJet {
            g: w * d1 - self.n * z.conj() * f,
            dz: w * d2 - (self.n - 1.0) * z.conj() * d1,
            dzbar: z * d1 - self.n * f,
        }
    }

    fn jet(&self, z: Complex64) -> GradJet {
        let [f, d1, d2] = self.p.eval_derivatives(z);
        self.jet_from(z, f, d1, d2)
    }

    /// Absolute size of the terms making up `G(z)`.
    fn scale(&self, z: Complex64) -> f64 {
        (1.0 + z.norm_sqr()) * self.dp.abs_scale(z) + self.n * z.norm() * self.p.abs_scale(z)
    }

    fn run(&self, g: usize) -> CriticalSearch {
        let rings = (g / 2).max(2);
        let m = 2 * g;
        let grid = RingGrid::new(m);
        let dr = self.radius / rings as f64;
        let radii: Vec<f64> = (1..=rings).map(|k| dr * k as f64).collect();

        let zero = Complex64::new(0.0, 0.0);
        let mut f = vec![zero; m];
        let mut d1 = vec![zero; m];
        let mut d2 = vec![zero; m];
        let mut phase = vec![0.0; rings * m];
        let mut steps = vec![zero; rings * m];
        for (k, &r) in radii.iter().enumerate() {
            grid.eval(&self.p, r, &mut f);
            grid.eval(&self.dp, r, &mut d1);
            grid.eval(&self.ddp, r, &mut d2);
            for j in 0..m {
                let z = Complex64::from_polar(r, grid.angle(j));
                let jet = self.jet_from(z, f[j], d1[j], d2[j]);
                phase[k * m + j] = jet.g.arg();
                steps[k * m + j] = newton_step(&jet).unwrap_or(Complex64::new(f64::INFINITY, 0.0));
            }
        }
        let node = |k: usize, j: usize| Complex64::from_polar(radii[k], grid.angle(j % m));

        // Cells around which G winds or whose phase is under-resolved: the
        // corners as starting points (most promising first), and the cell
        // centre and size.
        let mut bracketed: Vec<(Vec<Complex64>, Complex64, f64)> = Vec::new();
        let max_jump = 2.0 * PI / 3.0;
        let winding = |incs: &[f64]| -> (f64, bool) {
            let mut sum = 0.0;
            let mut unresolved = false;
            for &d in incs {
                unresolved |= d.abs() > max_jump;
                sum += d;
            }
            (sum / (2.0 * PI), unresolved)
        };
        let ordered = |corners: &mut Vec<(usize, usize)>| -> Vec<Complex64> {
            corners.sort_by(|a, b| {
                let sa = steps[a.0 * m + a.1].norm();
                let sb = steps[b.0 * m + b.1].norm();
                sa.partial_cmp(&sb).unwrap_or(std::cmp::Ordering::Equal)
            });
            corners.iter().map(|&(k, j)| node(k, j)).collect()
        };

        // The inner disk bounded by the first ring.
        {
            let incs: Vec<f64> = (0..m).map(|j| wrap(phase[(j + 1) % m] - phase[j])).collect();
            let (w, unresolved) = winding(&incs);
            if unresolved || w.abs() > 0.5 {
                let mut corners: Vec<(usize, usize)> = (0..m).map(|j| (0, j)).collect();
                let mut starts = vec![zero];
                starts.extend(ordered(&mut corners).into_iter().take(4));
                bracketed.push((starts, zero, dr));
            }
        }
        for k in 0..rings - 1 {
            for j in 0..m {
                let j1 = (j + 1) % m;
                let p00 = phase[k * m + j];
                let p10 = phase[(k + 1) * m + j];
                let p11 = phase[(k + 1) * m + j1];
                let p01 = phase[k * m + j1];
                let incs = [wrap(p10 - p00), wrap(p11 - p10), wrap(p01 - p11), wrap(p00 - p01)];
                let (w, unresolved) = winding(&incs);
                if unresolved || w.abs() > 0.5 {
                    let mut corners = vec![(k, j), (k + 1, j), (k + 1, j1), (k, j1)];
                    let starts = ordered(&mut corners);
                    let centre = Complex64::from_polar(radii[k] + 0.5 * dr, grid.angle(j) + PI / m as f64);
                    let size = dr.max(radii[k + 1] * 2.0 * PI / m as f64);
                    bracketed.push((starts, centre, size));
                }
            }
        }
        // Nodes whose Newton step stays within a cell, with the cell size.
        let mut screened: Vec<(Complex64, f64)> = Vec::new();
        for k in 0..rings {
            let cell = dr.max(radii[k] * 2.0 * PI / m as f64);
            for j in 0..m {
                let step = steps[k * m + j];
                if step.norm() <= cell {
                    screened.push((node(k, j) + step, cell));
                }
            }
        }

        let merge = 1e-6 * self.radius;
        let mut points: Vec<Complex64> = Vec::new();
        let mut singular_hits = 0usize;
        let mut attempt = |seed: Complex64, points: &mut Vec<Complex64>| -> Option<Complex64> {
            let (z, singular) = self.newton(seed)?;
            if z.norm() <= self.radius && !points.iter().any(|q| (q - z).norm() < merge) {
                points.push(z);
                singular_hits += singular as usize;
            }
            Some(z)
        };
        for (starts, centre, size) in bracketed {
            // Stop once a start converges into (a neighbourhood of) its cell.
            for seed in starts {
                if attempt(seed, &mut points).is_some_and(|z| (z - centre).norm() <= 2.0 * size) {
                    break;
                }
            }
        }
        for (seed, cell) in screened {
            // A landing point this close to a known critical point would
            // almost surely converge to it.
            if !points.iter().any(|q| (q - seed).norm() < 0.5 * cell) {
                attempt(seed, &mut points);
            }
        }
        points.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap_or(std::cmp::Ordering::Equal));
        CriticalSearch { points, singular_hits, coverage_mismatch: None }
    }

    /// Damped Newton iteration on `(Re G, Im G)`. Returns the converged point
    /// and whether its Jacobian is numerically singular.
    fn newton(&self, start: Complex64) -> Option<(Complex64, bool)> {
        let mut z = start;
        let mut jet = self.jet(z);
        for _ in 0..self.config.max_iterations {
            let mut step = newton_step(&jet)?;
            if step.norm() <= 1e-14 * self.radius {
                break;
            }
            let mut accepted = false;
            for _ in 0..10 {
                let candidate = z + step;
                let next = self.jet(candidate);
                if next.g.norm() <= jet.g.norm() {
                    z = candidate;
                    jet = next;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !z.norm().is_finite() || z.norm() > 2.0 * self.radius + 1.0 {
                return None;
            }
            if !accepted || step.norm() <= 1e-13 * self.radius {
                break;
            }
        }
        if jet.g.norm() > self.config.residual_tolerance * self.scale(z) {
            return None;
        }
        let det = jet.dz.norm_sqr() - jet.dzbar.norm_sqr();
        let size = jet.dz.norm_sqr() + jet.dzbar.norm_sqr();
        Some((z, det.abs() <= 1e-8 * size))
    }
}

/// The step `d` solving `G + dG/dz d + dG/dzbar conj(d) = 0`, regularised
/// towards least squares when the real Jacobian is singular.
fn newton_step(jet: &GradJet) -> Option<Complex64> {
    let (p, q, g) = (jet.dz, jet.dzbar, jet.g);
    let det = p.norm_sqr() - q.norm_sqr();
    let size = p.norm_sqr() + q.norm_sqr();
    if size == 0.0 || !size.is_finite() {
        return None;
    }
    if det.abs() > 1e-10 * size {
        return Some((q * g.conj() - p.conj() * g) / det);
    }
    // Levenberg-Marquardt on the real 2x2 system.
    let jx = p + q;
    let jy = Complex64::i() * (p - q);
    let mu = 1e-12 * size;
    let (a, b, d) = (jx.norm_sqr() + mu, jx.re * jy.re + jx.im * jy.im, jy.norm_sqr() + mu);
    let (rx, ry) = (-(jx.re * g.re + jx.im * g.im), -(jy.re * g.re + jy.im * g.im));
    let den = a * d - b * b;
    Some(Complex64::new((d * rx - b * ry) / den, (a * ry - b * rx) / den))
}

fn wrap(d: f64) -> f64 {
    let mut d = d % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    } else if d <= -PI {
        d += 2.0 * PI;
    }
    d
}

fn derivative(p: &Polynomial) -> Polynomial {
    let coeffs = if p.coeffs.len() <= 1 {
        vec![Complex64::new(0.0, 0.0)]
    } else {
        p.coeffs.iter().enumerate().skip(1).map(|(j, c)| c * j as f64).collect()
    };
    Polynomial { coeffs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::{basis_constants, sample, Conditioning, RngSpec};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_has_single_critical_point() {
        let poly = CoefficientVector::new(vec![c(1.0 / 3f64.sqrt(), 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let pts = find_critical_points(&poly, 2.0).unwrap();
        assert_eq!(pts.len(), 1);
        assert!(pts[0].norm() < 1e-12);
    }

    #[test]
    fn circle_family_is_reported() {
        let cs = basis_constants(2);
        let poly = CoefficientVector::new(vec![c(0.0, 0.0), c(1.0 / cs[1], 0.0), c(0.0, 0.0)]).unwrap();
        let config = CriticalSearchConfig { grid: 32, coverage_check: true, ..Default::default() };
        let search = find_critical_points_with(&poly, 2.0, &config).unwrap();
        assert!(search.points.len() > 1);
        for z in &search.points {
            assert!((z.norm() - 1.0).abs() < 1e-8);
        }
        assert!(search.coverage_mismatch.is_some() || search.singular_hits > 0);
    }

    #[test]
    fn random_sample_residuals_and_stability() {
        let n = 50;
        let radius = 4.0 / (n as f64).sqrt();
        for stream in 0..10 {
            let poly = sample(n, RngSpec::new(5, stream), Conditioning::ZeroAtOrigin).unwrap();
            let config = CriticalSearchConfig { coverage_check: true, ..Default::default() };
            let search = find_critical_points_with(&poly, radius, &config).unwrap();
            assert_eq!(search.coverage_mismatch, None, "stream {stream}");
            let p = poly.monomial();
            let searcher = Searcher::new(&poly, radius, &config);
            for &z in &search.points {
                assert!(z.norm() <= radius);
                assert!(chern_gradient(&p, n, z).norm() < 1e-9 * searcher.scale(z));
            }
            for (i, a) in search.points.iter().enumerate() {
                for b in &search.points[i + 1..] {
                    assert!((a - b).norm() >= 1e-6 * radius);
                }
            }
        }
    }

    #[test]
    fn critical_conditioning_finds_origin() {
        let poly = sample(30, RngSpec::new(9, 0), Conditioning::CriticalAtOrigin).unwrap();
        let pts = find_critical_points(&poly, 0.5).unwrap();
        assert!(pts.iter().any(|z| z.norm() < 1e-10));
    }

    #[test]
    fn rejects_bad_radius() {
        let poly = sample(4, RngSpec::new(0, 0), Conditioning::None).unwrap();
        assert!(find_critical_points(&poly, 0.0).is_err());
    }
}
