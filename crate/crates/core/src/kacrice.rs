//! Kac-Rice density of Chern critical points given a zero.
//!
//! With the conditioned covariance of `(f', f'', f)` split as
//! `[[A, B], [B*, C]]`, the expected density relative to the Kähler form is
//!
//! ```text
//! K = (1 / (pi A)) * (l1^2 + l2^2) / (|l1| + |l2|)
//! ```
//!
//! where `l1 >= l2` are the eigenvalues of `Lambda Q`, `Lambda = C - B* B / A`
//! and `Q = diag(1, -n^2)`.
//!
//! The jets are taken in the affine chart centred at the conditioning zero.
//! That chart is a normal frame only at its origin, so [`kn_density_wrt_omega`]
//! counts Chern critical points exactly only at `z = p`. The
//! `*_normal_frame` functions instead move `z` to the origin with an isometry
//! before applying the same formula.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::conditioning::conditional_jet_zero;
use crate::kernel::KernelModel;
use crate::linalg::Hermitian2;
use crate::{Error, Result};

/// Conditioned covariance of `(f', f'', f)` in block form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceBlocks {
    /// `Var f'`.
    pub a: f64,
    /// `(Cov(f', f''), Cov(f', f))`.
    pub b: [Complex64; 2],
    /// Covariance of `(f'', f)`.
    pub c: Hermitian2,
}

impl CovarianceBlocks {
    /// The full 3x3 covariance matrix in the order `(f', f'', f)`.
    pub fn full_matrix(&self) -> [[Complex64; 3]; 3] {
        let c = self.c.to_array();
        let mut m = [[Complex64::new(0.0, 0.0); 3]; 3];
        m[0][0] = Complex64::new(self.a, 0.0);
        for i in 0..2 {
            m[0][i + 1] = self.b[i];
            m[i + 1][0] = self.b[i].conj();
            for j in 0..2 {
                m[i + 1][j + 1] = c[i][j];
            }
        }
        m
    }

    /// All entries multiplied by `s`.
    pub fn scale(&self, s: f64) -> Self {
        CovarianceBlocks { a: self.a * s, b: [self.b[0] * s, self.b[1] * s], c: self.c.scale(s) }
    }
}

/// Eigenvalues of `Lambda Q`, descending.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaPair {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl LambdaPair {
    /// `(l1^2 + l2^2) / (|l1| + |l2|)`, the value of
    /// `∫∫_{x,y>0} |l1 x + l2 y| e^{-x-y} dx dy`.
    pub fn integral(&self) -> Result<f64> {
        let denom = self.lambda1.abs() + self.lambda2.abs();
        if denom == 0.0 {
            return Err(Error::Degenerate("both eigenvalues of Lambda Q vanish".into()));
        }
        Ok((self.lambda1 * self.lambda1 + self.lambda2 * self.lambda2) / denom)
    }
}

/// Covariance blocks of `(f', f'', f)` at `z` for the ensemble conditioned to
/// vanish at `p`.
pub fn blocks(model: KernelModel, p: Complex64, z: Complex64) -> Result<CovarianceBlocks> {
    let j = conditional_jet_zero(model, p, z)?;
    Ok(CovarianceBlocks {
        a: j.dz_dwbar.re,
        b: [j.dz_dwbar2, j.dz],
        c: Hermitian2::new(j.dz2_dwbar2.re, j.dz2, j.value.re),
    })
}

/// Schur complement `C - B* B / A`: the covariance of `(f'', f)` given `f'`.
pub fn schur_lambda(blocks: &CovarianceBlocks) -> Result<Hermitian2> {
    let a = blocks.a;
    if !(a > 0.0) {
        return Err(Error::Degenerate(format!("Var f' = {a} is not positive")));
    }
    let [b0, b1] = blocks.b;
    let c = blocks.c;
    Ok(Hermitian2::new(c.a - b0.norm_sqr() / a, c.b - b0.conj() * b1 / a, c.d - b1.norm_sqr() / a))
}

/// Eigenvalues of `Lambda Q`, `Q = diag(1, -n^2)`, computed from the Hermitian
/// `Lambda^{1/2} Q Lambda^{1/2}`.
pub fn lambda_pair(lambda: &Hermitian2, n: f64) -> LambdaPair {
    let e = lambda.eigh();
    let trace = lambda.trace().abs();
    if e.values[1] < -1e-8 * trace {
        log::warn!("Lambda is not PSD: min eigenvalue {} (trace {trace}); clamping", e.values[1]);
    }
    let root = lambda.sqrt_psd();
    let m = root.sandwich_diagonal(1.0, -n * n).eigh();
    LambdaPair { lambda1: m.values[0], lambda2: m.values[1] }
}

/// Kac-Rice density at `z` for a zero conditioned at `p`, relative to the
/// Kähler form, with the jets taken in the chart of `model`.
pub fn kn_density_conditioned_at(model: KernelModel, p: Complex64, z: Complex64) -> Result<f64> {
    let blocks = blocks(model, p, z)?;
    let lambda = schur_lambda(&blocks)?;
    let pair = lambda_pair(&lambda, model.connection_weight());
    Ok(pair.integral()? / (PI * blocks.a))
}

/// `K_n(z|0)` relative to the Kähler form, jets in the affine chart at 0.
pub fn kn_density_wrt_omega(model: KernelModel, z: Complex64) -> Result<f64> {
    kn_density_conditioned_at(model, Complex64::new(0.0, 0.0), z)
}

/// `K_n(u/sqrt(n) | 0)` against Lebesgue measure in the rescaled variable `u`.
pub fn rescaled_kn(n: u32, u: Complex64) -> Result<f64> {
    let (model, z, to_lebesgue) = rescaled_setup(n, u)?;
    Ok(kn_density_wrt_omega(model, z)? * to_lebesgue)
}

/// Closed-form rescaling limit of [`rescaled_kn`].
pub fn k_infinity(u: Complex64) -> f64 {
    let r2 = u.norm_sqr();
    let decay = (-r2).exp();
    let a = 1.0 + r2;
    let l1 = 2.0 + 2.0 * r2 + r2 * r2;
    let l2 = -1.0 + r2 * decay + decay;
    (l1 * l1 + l2 * l2) / (l1.abs() + l2.abs()) / (PI * a * a)
}

/// Density of Chern critical points at `z` given a zero at 0, relative to
/// the Fubini-Study form.
///
/// The SU(2) isometry `w -> (w - z) / (1 + z̄ w)` sends `z` to the origin,
/// where the affine chart is a normal frame, and the zero to `-z`.
pub fn kn_normal_frame_density_wrt_omega(n: u32, z: Complex64) -> Result<f64> {
    let model = KernelModel::su2(n)?;
    kn_density_conditioned_at(model, -z, Complex64::new(0.0, 0.0))
}

/// [`kn_normal_frame_density_wrt_omega`] at `u / sqrt(n)` against Lebesgue
/// measure in `u`.
pub fn rescaled_kn_normal_frame(n: u32, u: Complex64) -> Result<f64> {
    let (_, z, to_lebesgue) = rescaled_setup(n, u)?;
    Ok(kn_normal_frame_density_wrt_omega(n, z)? * to_lebesgue)
}

/// Bargmann-Fock limit of [`rescaled_kn_normal_frame`]; the Heisenberg
/// translation by `-u` plays the role of the SU(2) rotation.
pub fn k_infinity_normal_frame(u: Complex64) -> Result<f64> {
    kn_density_conditioned_at(KernelModel::BargmannFock, -u, Complex64::new(0.0, 0.0))
}

fn rescaled_setup(n: u32, u: Complex64) -> Result<(KernelModel, Complex64, f64)> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("rescaled densities need n >= 2, got {n}")));
    }
    let nf = n as f64;
    let model = KernelModel::su2(n)?;
    let z = u / nf.sqrt();
    // omega_FS = dℓ_z / (1 + |z|^2)^2 and dℓ_z = dℓ_u / n.
    let to_lebesgue = 1.0 / (nf * (1.0 + u.norm_sqr() / nf).powi(2));
    Ok((model, z, to_lebesgue))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const ORIGIN: Complex64 = Complex64::new(0.0, 0.0);

    #[test]
    fn origin_blocks() {
        for n in [2u32, 5, 40] {
            let nf = n as f64;
            let b = blocks(KernelModel::su2(n).unwrap(), ORIGIN, ORIGIN).unwrap();
            assert_eq!(b.a, nf);
            assert_eq!(b.b, [ORIGIN, ORIGIN]);
            assert_eq!(b.c, Hermitian2::diagonal(2.0 * nf * (nf - 1.0), 0.0));
            let l = schur_lambda(&b).unwrap();
            assert_eq!(l, b.c);
        }
        let b = blocks(KernelModel::BargmannFock, ORIGIN, ORIGIN).unwrap();
        assert_eq!(b.a, 1.0);
        assert_eq!(b.c, Hermitian2::diagonal(2.0, 0.0));
    }

    #[test]
    fn lambda_examples() {
        let nf = 7.0;
        let p = lambda_pair(&Hermitian2::diagonal(2.0 * nf * (nf - 1.0), 0.0), nf);
        assert_eq!((p.lambda1, p.lambda2), (84.0, 0.0));
        let p = lambda_pair(&Hermitian2::diagonal(1.0, 1.0), 1.0);
        assert!((p.lambda1 - 1.0).abs() < 1e-15 && (p.lambda2 + 1.0).abs() < 1e-15);
        let p = lambda_pair(&Hermitian2::new(2.0, c(1.0, 0.0), 1.0), 1.0);
        let s5 = 5f64.sqrt();
        assert!((p.lambda1 - (1.0 + s5) / 2.0).abs() < 1e-14);
        assert!((p.lambda2 - (1.0 - s5) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn finite_n_anchor() {
        for n in [2u32, 10, 100, 1000] {
            let nf = n as f64;
            let k = kn_density_wrt_omega(KernelModel::su2(n).unwrap(), ORIGIN).unwrap();
            assert!((k - 2.0 * (nf - 1.0) / PI).abs() < 1e-12 * k);
        }
        let k = kn_density_wrt_omega(KernelModel::su2(100).unwrap(), ORIGIN).unwrap();
        assert!((k - 63.02535746439057).abs() < 1e-10);
        assert!((rescaled_kn(100, ORIGIN).unwrap() - 0.6302535746439057).abs() < 1e-14);
        assert!((rescaled_kn(1000, ORIGIN).unwrap() - 0.6359831525952139).abs() < 1e-13);
    }

    #[test]
    fn k_infinity_values() {
        assert!((k_infinity(ORIGIN) - 2.0 / PI).abs() < 1e-15);
        assert!((k_infinity(c(8.0, 0.0)) - 1.0 / PI).abs() < 1e-3);
        assert!((k_infinity(c(1.0, 0.0)) - 0.378970702739692).abs() < 1e-12);
    }

    #[test]
    fn normal_frame_agrees_at_origin_and_tends_to_five_thirds() {
        for n in [4u32, 50, 400] {
            let a = rescaled_kn(n, ORIGIN).unwrap();
            let b = rescaled_kn_normal_frame(n, ORIGIN).unwrap();
            assert!((a - b).abs() < 1e-13);
        }
        assert!((k_infinity_normal_frame(ORIGIN).unwrap() - 2.0 / PI).abs() < 1e-14);
        // Far from the conditioning zero the unconditioned Chern critical
        // density 5/(3 pi) is recovered.
        let far = k_infinity_normal_frame(c(6.0, 0.0)).unwrap();
        assert!((far - 5.0 / (3.0 * PI)).abs() < 1e-6);
    }

    #[test]
    fn degenerate_inputs() {
        let b = CovarianceBlocks { a: 0.0, b: [ORIGIN; 2], c: Hermitian2::diagonal(1.0, 1.0) };
        assert!(schur_lambda(&b).is_err());
        let zero = LambdaPair { lambda1: 0.0, lambda2: 0.0 };
        assert!(zero.integral().is_err());
    }
}
