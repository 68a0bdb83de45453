//! Two-point Bergman kernels and their mixed derivative jets.
//!
//! Both supported kernels are functions of `x = z * conj(w)` alone:
//! `(1 + x)^n` for the normalized SU(2) kernel and `exp(x)` for the
//! Bargmann-Fock kernel. Every entry of the `(d/dz)^a (d/dw̄)^b` jet with
//! `a, b <= 2` is therefore a short combination of `F^{(k)}(x)`, `k <= 4`.

use num_complex::Complex64;

use crate::{Error, Result};

/// Above this value of `Re log K(z, w)` a jet is returned with a common
/// factor pulled out into [`KernelJet::log_scale`].
const OVERFLOW_LOG: f64 = 600.0;

/// Covariance kernel of a Gaussian ensemble of holomorphic functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelModel {
    /// Normalized SU(2) kernel `(1 + z w̄)^n` of degree-`n` polynomials.
    Su2 { n: u32 },
    /// Bargmann-Fock kernel `exp(z w̄)`, the universal rescaling limit.
    BargmannFock,
}

impl KernelModel {
    /// Checked SU(2) constructor; second derivatives need `n >= 2`.
    pub fn su2(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("SU(2) degree must be >= 2, got {n}")));
        }
        Ok(KernelModel::Su2 { n })
    }

    /// Weight `n` of the Chern connection term; 1 for Bargmann-Fock, whose
    /// coordinates are already rescaled.
    pub fn connection_weight(&self) -> f64 {
        match *self {
            KernelModel::Su2 { n } => n as f64,
            KernelModel::BargmannFock => 1.0,
        }
    }

    /// Jet of the kernel at `(z, w)`.
    pub fn jet(&self, z: Complex64, w: Complex64) -> Result<KernelJet> {
        match *self {
            KernelModel::Su2 { n } => su2_jet(n, z, w),
            KernelModel::BargmannFock => Ok(bargmann_fock_jet(z, w)),
        }
    }
}

/// Values of `(d/dz)^a (d/dw̄)^b K(z, w)` for the nine pairs used by the
/// Kac-Rice covariance blocks.
///
/// The true derivatives are the stored entries times `exp(log_scale)`;
/// `log_scale` is zero unless the kernel would overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelJet {
    pub value: Complex64,
    pub dz: Complex64,
    pub dwbar: Complex64,
    pub dz2: Complex64,
    pub dwbar2: Complex64,
    pub dz_dwbar: Complex64,
    pub dz2_dwbar: Complex64,
    pub dz_dwbar2: Complex64,
    pub dz2_dwbar2: Complex64,
    pub log_scale: f64,
}

impl KernelJet {
    /// Builds the jet of `F(z w̄)` from `F^{(k)}(x)`, `k = 0..=4`.
    fn from_x_derivatives(z: Complex64, wbar: Complex64, d: [Complex64; 5], log_scale: f64) -> Self {
        let x = z * wbar;
        KernelJet {
            value: d[0],
            dz: wbar * d[1],
            dwbar: z * d[1],
            dz2: wbar * wbar * d[2],
            dwbar2: z * z * d[2],
            dz_dwbar: d[1] + x * d[2],
            dz2_dwbar: wbar * (2.0 * d[2] + x * d[3]),
            dz_dwbar2: z * (2.0 * d[2] + x * d[3]),
            dz2_dwbar2: 2.0 * d[2] + 4.0 * x * d[3] + x * x * d[4],
            log_scale,
        }
    }

    /// Entry `(d/dz)^a (d/dw̄)^b`, for `a, b` in `0..=2`.
    pub fn entry(&self, a: usize, b: usize) -> Complex64 {
        match (a, b) {
            (0, 0) => self.value,
            (1, 0) => self.dz,
            (0, 1) => self.dwbar,
            (2, 0) => self.dz2,
            (0, 2) => self.dwbar2,
            (1, 1) => self.dz_dwbar,
            (2, 1) => self.dz2_dwbar,
            (1, 2) => self.dz_dwbar2,
            (2, 2) => self.dz2_dwbar2,
            _ => panic!("jet entry ({a}, {b}) out of range"),
        }
    }

    fn entry_mut(&mut self, a: usize, b: usize) -> &mut Complex64 {
        match (a, b) {
            (0, 0) => &mut self.value,
            (1, 0) => &mut self.dz,
            (0, 1) => &mut self.dwbar,
            (2, 0) => &mut self.dz2,
            (0, 2) => &mut self.dwbar2,
            (1, 1) => &mut self.dz_dwbar,
            (2, 1) => &mut self.dz2_dwbar,
            (1, 2) => &mut self.dz_dwbar2,
            (2, 2) => &mut self.dz2_dwbar2,
            _ => panic!("jet entry ({a}, {b}) out of range"),
        }
    }

    /// Applies `f` to every entry, keeping `log_scale`.
    pub fn map(mut self, f: impl Fn(usize, usize, Complex64) -> Complex64) -> Self {
        for (a, b) in JET_INDICES {
            let e = self.entry_mut(a, b);
            *e = f(a, b, *e);
        }
        self
    }

    /// The jet of the same kernel at the swapped pair `(w, z)`.
    ///
    /// Uses `K(w, z) = conj(K(z, w))`, so entry `(a, b)` of the result is the
    /// conjugate of entry `(b, a)` here.
    pub fn hermitian_transpose(&self) -> Self {
        let src = *self;
        self.map(|a, b, _| src.entry(b, a).conj())
    }

    /// Re-expresses the jet with a different common factor.
    pub fn with_log_scale(&self, log_scale: f64) -> Self {
        let factor = (self.log_scale - log_scale).exp();
        let mut out = self.map(|_, _, e| e * factor);
        out.log_scale = log_scale;
        out
    }

    /// The jet with `log_scale` folded back in (may overflow to infinity).
    pub fn unscaled(&self) -> Self {
        self.with_log_scale(0.0)
    }
}

/// All nine `(a, b)` index pairs of a jet.
pub const JET_INDICES: [(usize, usize); 9] = [(0, 0), (1, 0), (0, 1), (2, 0), (0, 2), (1, 1), (2, 1), (1, 2), (2, 2)];

/// `log(1 + x)` on the principal branch without cancellation for small `x`.
pub fn ln_1p(x: Complex64) -> Complex64 {
    let re = 0.5 * (2.0 * x.re + x.norm_sqr()).ln_1p();
    let im = x.im.atan2(1.0 + x.re);
    Complex64::new(re, im)
}

/// Jet of the normalized SU(2) kernel `(1 + z w̄)^n`.
pub fn su2_jet(n: u32, z: Complex64, w: Complex64) -> Result<KernelJet> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("SU(2) degree must be >= 2, got {n}")));
    }
    let wbar = w.conj();
    let x = z * wbar;
    let base = Complex64::new(1.0, 0.0) + x;
    if base == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain(format!("1 + z conj(w) vanishes at z = {z}, w = {w}")));
    }
    let nf = n as f64;
    let log_base = ln_1p(x);
    let full_log = nf * log_base.re;
    let log_scale = if full_log > OVERFLOW_LOG { full_log } else { 0.0 };

    // (1 + x)^(n-4) once, then the four higher powers by multiplication.
    let mut powers = [Complex64::new(0.0, 0.0); 5];
    powers[4] = ((nf - 4.0) * log_base - log_scale).exp();
    for k in (0..4).rev() {
        powers[k] = powers[k + 1] * base;
    }
    let mut d = [Complex64::new(0.0, 0.0); 5];
    let mut falling = 1.0;
    for k in 0..5 {
        d[k] = falling * powers[k];
        falling *= nf - k as f64;
    }
    Ok(KernelJet::from_x_derivatives(z, wbar, d, log_scale))
}

/// Jet of the Bargmann-Fock kernel `exp(u v̄)`.
pub fn bargmann_fock_jet(u: Complex64, v: Complex64) -> KernelJet {
    let vbar = v.conj();
    let x = u * vbar;
    let log_scale = if x.re > OVERFLOW_LOG { x.re } else { 0.0 };
    let e = (x - log_scale).exp();
    KernelJet::from_x_derivatives(u, vbar, [e; 5], log_scale)
}

/// SU(2) jet at `(u/sqrt(n), v/sqrt(n))`; derivatives stay in the original
/// `z` coordinates.
pub fn su2_rescaled_jet(n: u32, u: Complex64, v: Complex64) -> Result<KernelJet> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!("rescaled SU(2) jet needs n >= 4, got {n}")));
    }
    let s = (n as f64).sqrt();
    su2_jet(n, u / s, v / s)
}
