//! Evaluation of a polynomial on concentric circles by FFT, and zero counting
//! by the argument principle.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::Polynomial;
use crate::{Error, Result};

/// Evaluates polynomials at the `m` equally spaced points of a circle.
///
/// Since `ω^m = 1` for the sample angles, coefficients of degree `j` fold onto
/// bin `j mod m` exactly, so `m` need not exceed the degree.
#[derive(Clone)]
pub struct RingGrid {
    m: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for RingGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RingGrid").field("m", &self.m).finish()
    }
}

impl RingGrid {
    pub fn new(m: usize) -> Self {
        assert!(m >= 4, "ring needs at least four samples");
        let fft = FftPlanner::new().plan_fft_inverse(m);
        RingGrid { m, fft }
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The `k`-th sample angle.
    pub fn angle(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.m as f64
    }

    /// Writes `p(r e^{2 pi i k / m})` for `k = 0..m` into `out`.
    pub fn eval(&self, p: &Polynomial, r: f64, out: &mut [Complex64]) {
        assert_eq!(out.len(), self.m);
        out.fill(Complex64::new(0.0, 0.0));
        let mut rj = 1.0;
        for (j, c) in p.coeffs.iter().enumerate() {
            out[j % self.m] += c * rj;
            rj *= r;
        }
        self.fft.process(out);
    }
}

/// Number of zeros of `p` (with multiplicity) in the open disk of radius `r`.
///
/// The winding number of `p` along the circle is accumulated from principal
/// phase increments; any increment larger than a quarter turn is resolved by
/// bisecting the arc with direct evaluations.
pub fn count_zeros_inside(p: &Polynomial, r: f64, grid: &RingGrid, scratch: &mut [Complex64]) -> Result<i64> {
    if r == 0.0 {
        return Ok(0);
    }
    grid.eval(p, r, scratch);
    let m = grid.len();
    let mut total = 0.0;
    for k in 0..m {
        let (a, b) = (scratch[k], scratch[(k + 1) % m]);
        total += arc_phase(p, r, grid.angle(k), grid.angle(k + 1), a, b, 0)?;
    }
    let winding = total / (2.0 * PI);
    let rounded = winding.round();
    if (winding - rounded).abs() > 1e-3 {
        return Err(Error::Domain(format!("winding number {winding} is not an integer")));
    }
    Ok(rounded as i64)
}

fn arc_phase(p: &Polynomial, r: f64, t0: f64, t1: f64, a: Complex64, b: Complex64, depth: u32) -> Result<f64> {
    if a.norm() == 0.0 || b.norm() == 0.0 {
        return Err(Error::Domain(format!("polynomial vanishes on the circle of radius {r}")));
    }
    let d = (b / a).arg();
    if d.abs() <= 0.5 * PI {
        return Ok(d);
    }
    if depth > 40 {
        return Err(Error::Domain(format!("cannot resolve phase on the circle of radius {r}")));
    }
    let tm = 0.5 * (t0 + t1);
    let mid = p.eval(Complex64::from_polar(r, tm));
    Ok(arc_phase(p, r, t0, tm, a, mid, depth + 1)? + arc_phase(p, r, tm, t1, mid, b, depth + 1)?)
}
