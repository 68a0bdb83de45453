//! Rank-one conditioning of the covariance kernel.
//!
//! Conditioning a Gaussian ensemble on one linear constraint removes one
//! orthonormal direction from the basis, so the conditioned kernel is the
//! original kernel minus `Phi(z) conj(Phi(w))` for the unit section `Phi`
//! spanning the removed direction.

use std::ops::Deref;

use num_complex::Complex64;

use crate::kernel::{KernelJet, KernelModel};
use crate::{Error, Result};

/// A holomorphic function's value and first two derivatives at one point,
/// times `exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionJet {
    pub value: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
    pub log_scale: f64,
}

impl SectionJet {
    fn derivative(&self, k: usize) -> Complex64 {
        match k {
            0 => self.value,
            1 => self.d1,
            2 => self.d2,
            _ => panic!("section derivative {k} out of range"),
        }
    }
}

/// Jet at `(z, z)` of the kernel conditioned on a zero at `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalKernelJet(KernelJet);

impl ConditionalKernelJet {
    pub fn into_inner(self) -> KernelJet {
        self.0
    }
}

impl Deref for ConditionalKernelJet {
    type Target = KernelJet;

    fn deref(&self) -> &KernelJet {
        &self.0
    }
}

/// `Phi(z) = K(z, p) / sqrt(K(p, p))` with its first two `z`-derivatives.
pub fn phi_jet(model: KernelModel, p: Complex64, z: Complex64) -> Result<SectionJet> {
    let at_p = model.jet(p, p)?;
    let norm_sq = at_p.value.re;
    if !(norm_sq > 0.0) {
        return Err(Error::Degenerate(format!("K(p, p) = {norm_sq} is not positive at p = {p}")));
    }
    let cross = model.jet(z, p)?;
    let inv_norm = 1.0 / norm_sq.sqrt();
    Ok(SectionJet {
        value: cross.value * inv_norm,
        d1: cross.dz * inv_norm,
        d2: cross.dz2 * inv_norm,
        log_scale: cross.log_scale - 0.5 * at_p.log_scale,
    })
}

/// Jet at `(z, z)` of `K(z, w) - Phi(z) conj(Phi(w))`: the covariance of the
/// ensemble conditioned on vanishing at `p`.
pub fn conditional_jet_zero(model: KernelModel, p: Complex64, z: Complex64) -> Result<ConditionalKernelJet> {
    let phi = phi_jet(model, p, z)?;
    let jet = model.jet(z, z)?;
    let factor = (2.0 * phi.log_scale - jet.log_scale).exp();
    let mut out = jet.map(|a, b, e| e - factor * phi.derivative(a) * phi.derivative(b).conj());
    if z == p {
        // The conditioned variance vanishes identically at the conditioning point.
        out.value = Complex64::new(0.0, 0.0);
    }
    Ok(ConditionalKernelJet(out))
}

/// Diagonal `K^q(z, z)` of the kernel conditioned on a Chern critical point
/// at `q`; only `q = 0` (origin of the normal frame) is supported.
pub fn critical_conditional_value(model: KernelModel, q: Complex64, z: Complex64) -> Result<f64> {
    if q != Complex64::new(0.0, 0.0) {
        return Err(Error::UnsupportedConditioningPoint(q));
    }
    let at_q = model.jet(q, q)?;
    let curvature = at_q.dz_dwbar.re;
    if !(curvature > 0.0) {
        return Err(Error::Degenerate(format!("(d d̄ K)(0, 0) = {curvature} is not positive")));
    }
    let diag = model.jet(z, z)?;
    let cross = model.jet(z, q)?;
    let removed = cross.dwbar.norm_sqr() / curvature;
    let value = if diag.log_scale > 0.0 {
        (diag.value.re - removed * (-diag.log_scale).exp()) * diag.log_scale.exp()
    } else {
        diag.value.re - removed
    };
    Ok(value.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn phi_is_constant_for_origin() {
        let model = KernelModel::su2(7).unwrap();
        for z in [c(0.0, 0.0), c(0.3, -1.2), c(2.0, 2.0)] {
            let phi = phi_jet(model, c(0.0, 0.0), z).unwrap();
            assert_eq!(phi.value, c(1.0, 0.0));
            assert_eq!(phi.d1, c(0.0, 0.0));
            assert_eq!(phi.d2, c(0.0, 0.0));
        }
        let phi = phi_jet(KernelModel::BargmannFock, c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        assert_eq!(phi.value, c(1.0, 0.0));
        assert_eq!(phi.d1, c(0.0, 0.0));
    }

    #[test]
    fn phi_off_origin() {
        let phi = phi_jet(KernelModel::su2(3).unwrap(), c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!((phi.value.re - 2f64.powf(1.5)).abs() < 1e-14);
    }

    #[test]
    fn conditional_origin_values() {
        let n = 3;
        let model = KernelModel::su2(n).unwrap();
        let at0 = conditional_jet_zero(model, c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(at0.value, c(0.0, 0.0));
        assert_eq!(at0.dz_dwbar, c(3.0, 0.0));
        assert_eq!(at0.dz2_dwbar2, c(12.0, 0.0));
        let at1 = conditional_jet_zero(model, c(0.0, 0.0), c(0.6, 0.8)).unwrap();
        assert!((at1.value.re - 7.0).abs() < 1e-13);
    }

    #[test]
    fn conditional_vanishes_at_general_p() {
        let model = KernelModel::su2(12).unwrap();
        let p = c(0.4, -0.3);
        let j = conditional_jet_zero(model, p, p).unwrap();
        assert_eq!(j.value, c(0.0, 0.0));
        assert!(j.dz_dwbar.re > 0.0);
        // First derivative of the conditioned covariance also vanishes at p.
        assert!(j.dz.norm() < 1e-12 * j.dz_dwbar.re);
    }

    #[test]
    fn critical_conditioning_closed_forms() {
        let v = critical_conditional_value(KernelModel::su2(2).unwrap(), c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!((v - 2.0).abs() < 1e-14);
        let v = critical_conditional_value(KernelModel::su2(9).unwrap(), c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(v, 1.0);
        let v = critical_conditional_value(KernelModel::BargmannFock, c(0.0, 0.0), c(0.6, 0.8)).unwrap();
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-14);
        let err = critical_conditional_value(KernelModel::BargmannFock, c(0.1, 0.0), c(0.0, 0.0));
        assert!(matches!(err, Err(Error::UnsupportedConditioningPoint(_))));
    }

    #[test]
    fn nonnegative_on_grid() {
        let models = [
            KernelModel::su2(2).unwrap(),
            KernelModel::su2(10).unwrap(),
            KernelModel::su2(100).unwrap(),
            KernelModel::BargmannFock,
        ];
        let origin = c(0.0, 0.0);
        for model in models {
            for i in 0..100 {
                for k in 0..100 {
                    let z = c(-3.0 + 6.0 * i as f64 / 99.0, -3.0 + 6.0 * k as f64 / 99.0);
                    if z.norm() > 3.0 {
                        continue;
                    }
                    let j = conditional_jet_zero(model, origin, z).unwrap();
                    assert!(j.value.re >= 0.0, "{model:?} {z}");
                    assert!(j.dz_dwbar.re >= 0.0);
                    assert!(critical_conditional_value(model, origin, z).unwrap() >= 0.0);
                }
            }
        }
    }
}
