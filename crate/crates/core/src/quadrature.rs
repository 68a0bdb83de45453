//! Gauss-Legendre quadrature.

use std::f64::consts::PI;

use crate::{Error, Result};

/// Nodes and weights of the `m`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the rule by Newton iteration on `P_m` from Chebyshev-like
    /// initial guesses.
    pub fn new(m: usize) -> Self {
        assert!(m >= 1, "need at least one node");
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        let mf = m as f64;
        for i in 0..m.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(m, x);
                let step = p / d;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(m, x);
            let w = 2.0 / ((1.0 - x * x) * d * d);
            nodes[i] = -x;
            nodes[m - 1 - i] = x;
            weights[i] = w;
            weights[m - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// `∫_a^b f(x) dx`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sum = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(mid + half * x)?;
        }
        Ok(sum * half)
    }
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (1.0, 0.0);
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `∫_{r_lo}^{r_hi} rho(r) 2 pi r dr`: the expected count of a radial
/// intensity in an annulus.
pub fn annulus_mass(
    rule: &GaussLegendre,
    r_lo: f64,
    r_hi: f64,
    mut rho: impl FnMut(f64) -> Result<f64>,
) -> Result<f64> {
    if !(r_lo >= 0.0 && r_hi >= r_lo) {
        return Err(Error::InvalidArgument(format!("bad annulus [{r_lo}, {r_hi}]")));
    }
    rule.integrate(r_lo, r_hi, |r| Ok(2.0 * PI * r * rho(r)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials() {
        let rule = GaussLegendre::new(64);
        let w: f64 = rule.weights.iter().sum();
        assert!((w - 2.0).abs() < 1e-13);
        // degree 127 is the highest integrated exactly
        let v = rule.integrate(0.0, 1.0, |x| Ok(x.powi(120))).unwrap();
        assert!((v - 1.0 / 121.0).abs() < 1e-14);
        let v = GaussLegendre::new(3).integrate(-1.0, 1.0, |x| Ok(x.powi(4))).unwrap();
        assert!((v - 0.4).abs() < 1e-15);
    }

    #[test]
    fn annulus_area() {
        let rule = GaussLegendre::new(64);
        let m = annulus_mass(&rule, 1.0, 2.0, |_| Ok(1.0)).unwrap();
        assert!((m - 3.0 * PI).abs() < 1e-13);
        assert!(annulus_mass(&rule, 2.0, 1.0, |_| Ok(1.0)).is_err());
    }
}
