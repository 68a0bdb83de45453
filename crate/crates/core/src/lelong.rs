//! Zero densities from the Poincaré-Lelong formula.
//!
//! For a Gaussian ensemble with covariance kernel `K`, the expected zero
//! density against `(i/2) dz ∧ dz̄` is `(1/pi) ∂∂̄ log K(z, z)`. For radial
//! `F(s)`, `s = |z|^2`, we use `∂∂̄ F = F'(s) + s F''(s)` (equivalently
//! `Δ/4`).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::kacrice::{k_infinity, k_infinity_normal_frame, rescaled_kn, rescaled_kn_normal_frame};
use crate::{Error, Result};

/// Which radial density a [`RadialDensity`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RadialKind {
    /// `D_n(z|0)` for SU(2), against Lebesgue measure in `z`.
    DnSu2 {
        n: u32,
    },
    /// `D_n(v/sqrt(n)|0)` against Lebesgue measure in `v`.
    RescaledDn {
        n: u32,
    },
    DInfinity,
    KInfinity,
    /// `K_n(u/sqrt(n)|0)` against Lebesgue measure in `u`.
    RescaledKn {
        n: u32,
    },
    /// Chern critical points given a zero, normal-frame evaluation.
    RescaledKnNormalFrame {
        n: u32,
    },
    KInfinityNormalFrame,
    /// Smooth part of the zeros-given-zero limit density.
    ZerosGivenZero,
}

/// A radial density `r -> rho(r) >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RadialDensity {
    pub kind: RadialKind,
}

impl RadialDensity {
    pub fn new(kind: RadialKind) -> Self {
        RadialDensity { kind }
    }

    /// Density at radius `r` (evaluated on the positive real axis). At
    /// `r = 0` the zeros-given-zero density returns its limit `1/(2 pi)`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("radius must be finite and >= 0, got {r}")));
        }
        let z = Complex64::new(r, 0.0);
        match self.kind {
            RadialKind::DnSu2 { n } => dn_su2_density(n, z),
            RadialKind::RescaledDn { n } => rescaled_dn(n, z),
            RadialKind::DInfinity => Ok(d_infinity(z)),
            RadialKind::KInfinity => Ok(k_infinity(z)),
            RadialKind::RescaledKn { n } => rescaled_kn(n, z),
            RadialKind::RescaledKnNormalFrame { n } => rescaled_kn_normal_frame(n, z),
            RadialKind::KInfinityNormalFrame => k_infinity_normal_frame(z),
            RadialKind::ZerosGivenZero if r == 0.0 => Ok(0.5 / PI),
            RadialKind::ZerosGivenZero => zeros_given_zero_density(z),
        }
    }
}

/// `D_n(z|0)` for SU(2) polynomials against `(i/2) dz ∧ dz̄`: the zero density
/// given a Chern critical point at the origin.
///
/// This is `(1/pi) ∂∂̄ log((1 + |z|^2)^n - n |z|^2)`.
pub fn dn_su2_density(n: u32, z: Complex64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("D_n needs n >= 2, got {n}")));
    }
    let nf = n as f64;
    let s = z.norm_sqr();
    let l = s.ln_1p();
    let bracket = if nf * l < 600.0 {
        // (1+s)^{n-1} - 1 and (1+s)^n - n s without cancellation.
        let e1 = ((nf - 1.0) * l).exp_m1();
        let e0 = (nf * l).exp_m1();
        let den = 1.0 + (e0 - nf * s);
        let p2 = ((nf - 2.0) * l).exp();
        let first = nf * (e1 + (nf - 1.0) * p2 * s) / den;
        let ratio = e1 / den;
        let second = nf * nf * ratio * ratio * s;
        first - second
    } else {
        // Divide through by (1+s)^n.
        let inv = (-nf * l).exp();
        let g = 1.0 / (1.0 + s) - inv;
        let den = 1.0 - nf * s * inv;
        let first = nf * (g + (nf - 1.0) * s / ((1.0 + s) * (1.0 + s))) / den;
        let ratio = g / den;
        let second = nf * nf * ratio * ratio * s;
        first - second
    };
    Ok((bracket / PI).max(0.0))
}

/// `D_n(v/sqrt(n)|0)` against Lebesgue measure in `v`.
pub fn rescaled_dn(n: u32, v: Complex64) -> Result<f64> {
    let nf = n as f64;
    Ok(dn_su2_density(n, v / nf.sqrt())? / nf)
}

/// `D_inf(v|0) = (1/pi) ∂∂̄ log(e^{|v|^2} - |v|^2)`.
pub fn d_infinity(v: Complex64) -> f64 {
    let s = v.norm_sqr();
    if s.sqrt() < 1e-3 {
        // log(e^s - s) = s^2/2 + s^3/6 + O(s^4)
        return (2.0 * s + 1.5 * s * s) / PI;
    }
    let em = s.exp_m1();
    if s > 700.0 {
        return 1.0 / PI;
    }
    let den = 1.0 + (em - s);
    let first = (em + s * (1.0 + em)) / den;
    let ratio = em / den;
    let second = ratio * ratio * s;
    ((first - second) / PI).max(0.0)
}

/// Smooth part of `(1/pi) ∂∂̄ log(e^{|u|^2} - 1)`, the limiting zero density
/// given a zero at the origin. The point mass at the origin is excluded;
/// `u = 0` is a domain error.
pub fn zeros_given_zero_density(u: Complex64) -> Result<f64> {
    let s = u.norm_sqr();
    if s == 0.0 {
        return Err(Error::Domain("zeros-given-zero density is singular at u = 0".into()));
    }
    if s > 700.0 {
        return Ok(1.0 / PI);
    }
    // e^s (e^s - 1 - s) / (e^s - 1)^2
    let em = s.exp_m1();
    let excess = if s < 0.5 {
        // e^s - 1 - s by its Taylor series
        let mut term = s;
        let mut sum = 0.0;
        for k in 2..30 {
            term *= s / k as f64;
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        sum
    } else {
        em - s
    };
    Ok(((1.0 + em) / em) * (excess / em) / PI)
}

/// Five-point stencil for `∂∂̄ log f = (1/4) Δ log f` at `z`.
pub fn ddbar_log_numeric(f: impl Fn(Complex64) -> f64, z: Complex64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("stencil step must be positive, got {h}")));
    }
    let stencil = [
        z,
        z + Complex64::new(h, 0.0),
        z - Complex64::new(h, 0.0),
        z + Complex64::new(0.0, h),
        z - Complex64::new(0.0, h),
    ];
    let mut logs = [0.0; 5];
    for (slot, &p) in logs.iter_mut().zip(&stencil) {
        let v = f(p);
        if !(v > 0.0) {
            return Err(Error::Domain(format!("f({p}) = {v} is not positive")));
        }
        *slot = v.ln();
    }
    Ok(0.25 * (logs[1] + logs[2] + logs[3] + logs[4] - 4.0 * logs[0]) / (h * h))
}

/// The kernel diagonals whose `∂∂̄ log` give the densities above, in the
/// coordinates each density is expressed in. Used by the finite-difference
/// checks.
pub mod potentials {
    use num_complex::Complex64;

    /// `(1 + |v|^2/n)^n - |v|^2`: the critical-conditioned SU(2) kernel
    /// diagonal at `z = v / sqrt(n)`.
    pub fn rescaled_dn(n: u32, v: Complex64) -> f64 {
        let nf = n as f64;
        let s = v.norm_sqr();
        (nf * (s / nf).ln_1p()).exp() - s
    }

    /// `(1 + |z|^2)^n - n |z|^2`.
    pub fn dn(n: u32, z: Complex64) -> f64 {
        let nf = n as f64;
        let s = z.norm_sqr();
        (nf * s.ln_1p()).exp() - nf * s
    }

    pub fn d_infinity(v: Complex64) -> f64 {
        let s = v.norm_sqr();
        s.exp() - s
    }

    /// `(e^{|u|^2} - 1) / |u|^2`. Dividing out the harmonic factor `|u|^2`
    /// leaves `∂∂̄ log` unchanged away from the origin and removes the
    /// logarithmic singularity a stencil cannot resolve near it.
    pub fn zeros_given_zero(u: Complex64) -> f64 {
        let s = u.norm_sqr();
        if s == 0.0 {
            1.0
        } else {
            s.exp_m1() / s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(r: f64) -> Complex64 {
        Complex64::new(r, 0.0)
    }

    #[test]
    fn dn_examples() {
        for n in [2, 3, 50, 4000] {
            assert_eq!(dn_su2_density(n, re(0.0)).unwrap(), 0.0);
        }
        let v = dn_su2_density(2, Complex64::new(0.6, 0.8)).unwrap();
        assert!((v - 1.0 / PI).abs() < 1e-14);
        let v = dn_su2_density(10_000, re(0.01)).unwrap() / 10_000.0;
        assert!((v - d_infinity(re(1.0))).abs() < 0.02 * d_infinity(re(1.0)));
    }

    #[test]
    fn dn_large_argument_branch_is_continuous() {
        // n log(1+s) crosses 600 near s = e^6 - 1 for n = 100.
        let n = 100;
        let s_cross = (6.0f64).exp() - 1.0;
        let below = dn_su2_density(n, re((s_cross * 0.999_999).sqrt())).unwrap();
        let above = dn_su2_density(n, re((s_cross * 1.000_001).sqrt())).unwrap();
        // high-precision reference values on either side
        assert!((below - 1.9557674367141445e-4).abs() < 1e-9 * below);
        assert!((above - 1.955759633051418e-4).abs() < 1e-9 * above);
        // far away the density tends to n / (pi (1+s)^2)
        let r: f64 = 50.0;
        let v = dn_su2_density(n, re(r)).unwrap();
        let expect = n as f64 / (PI * (1.0 + r * r).powi(2));
        assert!((v - expect).abs() < 1e-9 * expect);
    }

    #[test]
    fn no_overflow_at_moderate_radius() {
        // exp(s)^2 overflows for s > ~355 while exp(s) itself does not
        for r in [19.0, 20.0, 25.0] {
            assert!((d_infinity(re(r)) - 1.0 / PI).abs() < 1e-9);
            assert!((zeros_given_zero_density(re(r)).unwrap() - 1.0 / PI).abs() < 1e-9);
        }
        let n = 1000;
        let v = dn_su2_density(n, re(0.8)).unwrap();
        let s: f64 = 0.64;
        let expect = n as f64 / (PI * (1.0 + s).powi(2));
        assert!((v - expect).abs() < 1e-6 * expect);
    }

    #[test]
    fn d_infinity_examples() {
        assert_eq!(d_infinity(re(0.0)), 0.0);
        assert!((d_infinity(re(8.0)) - 1.0 / PI).abs() < 1e-3);
        let e = std::f64::consts::E;
        let expect = ((2.0 * e - 1.0) / (e - 1.0) - 1.0) / PI;
        assert!((d_infinity(re(1.0)) - expect).abs() < 1e-15);
        assert!((expect - 0.503559).abs() < 1e-6);
        let small = d_infinity(re(0.1));
        assert!((small - 2.0 * 0.01 / PI).abs() < 0.02 * 2.0 * 0.01 / PI);
        // both sides of the series / closed-form switch, against
        // high-precision reference values
        let a = d_infinity(re(0.999_999e-3));
        let b = d_infinity(re(1.000_001e-3));
        assert!((a - 6.366189765911681e-7).abs() < 1e-9 * a);
        assert!((b - 6.366215230740773e-7).abs() < 1e-9 * b);
    }

    #[test]
    fn zeros_given_zero_examples() {
        assert!(zeros_given_zero_density(re(0.0)).is_err());
        let small = zeros_given_zero_density(re(1e-4)).unwrap();
        assert!((small - 0.5 / PI).abs() < 1e-7);
        assert!((zeros_given_zero_density(re(8.0)).unwrap() - 1.0 / PI).abs() < 1e-3);
        let fd = ddbar_log_numeric(potentials::zeros_given_zero, re(1.0), 1e-3).unwrap() / PI;
        assert!((zeros_given_zero_density(re(1.0)).unwrap() - fd).abs() < 1e-5);
        // near r = 0 the smooth part still matches the stencil
        let r = 1e-2;
        let fd = ddbar_log_numeric(potentials::zeros_given_zero, re(r), 1e-3).unwrap() / PI;
        assert!((zeros_given_zero_density(re(r)).unwrap() - fd).abs() < 1e-5);
    }

    #[test]
    fn stencil_examples() {
        let v = ddbar_log_numeric(|z| z.norm_sqr().exp(), Complex64::new(0.3, -0.7), 1e-3).unwrap();
        assert!((v - 1.0).abs() < 1e-6);
        assert_eq!(ddbar_log_numeric(|_| 3.0, re(1.0), 1e-3).unwrap(), 0.0);
        let v = ddbar_log_numeric(potentials::d_infinity, re(1.0), 1e-3).unwrap();
        assert!((v - PI * d_infinity(re(1.0))).abs() < 1e-4);
        assert!((v - 1.581976).abs() < 1e-4);
        assert!(ddbar_log_numeric(|z| z.re, re(0.0), 1e-3).is_err());
        assert!(ddbar_log_numeric(|_| 1.0, re(0.0), 0.0).is_err());
    }

    #[test]
    fn radial_density_dispatch() {
        let k = RadialDensity::new(RadialKind::KInfinity);
        assert!((k.eval(0.0).unwrap() - 2.0 / PI).abs() < 1e-15);
        let zgz = RadialDensity::new(RadialKind::ZerosGivenZero);
        assert!((zgz.eval(0.0).unwrap() - 0.5 / PI).abs() < 1e-15);
        assert!(k.eval(-1.0).is_err());
        let rd = RadialDensity::new(RadialKind::RescaledDn { n: 100 });
        assert!((rd.eval(1.0).unwrap() - dn_su2_density(100, re(0.1)).unwrap() / 100.0).abs() < 1e-15);
    }
}
