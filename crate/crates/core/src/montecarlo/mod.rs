//! Monte Carlo oracle: sample conditioned SU(2) polynomials and locate their
//! zeros and Chern critical points.

mod critical;
mod experiment;
mod rings;
mod roots;

pub use critical::{
    chern_gradient, find_critical_points, find_critical_points_with, CriticalSearch, CriticalSearchConfig,
};
pub use experiment::{annulus_experiment, AnnulusHistogram, ExperimentConfig, Reference, ZeroCounting};
pub use rings::{count_zeros_inside, RingGrid};
pub use roots::{companion_eigenvalues, find_zeros};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{Error, Result};

/// Identifies one reproducible random stream: the experiment seed plus the
/// trial index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct RngSpec {
    pub seed: u64,
    pub stream: u64,
}

impl RngSpec {
    pub fn new(seed: u64, stream: u64) -> Self {
        RngSpec { seed, stream }
    }

    /// A ChaCha generator keyed by `seed` on stream `stream`.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Linear condition imposed on the sampled polynomial at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Conditioning {
    None,
    /// `f(0) = 0`.
    ZeroAtOrigin,
    /// Chern critical point at 0, i.e. `f'(0) = 0` since the Fubini-Study
    /// potential has vanishing gradient there.
    CriticalAtOrigin,
}

/// Coefficients `a_0..=a_n` of `f(z) = Σ a_j sqrt((n+1) C(n, j)) z^j` in the
/// orthonormal SU(2) basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    pub n: u32,
    pub coeffs: Vec<Complex64>,
}

impl CoefficientVector {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidArgument("need at least two coefficients".into()));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument("coefficients must be finite".into()));
        }
        Ok(CoefficientVector { n: (coeffs.len() - 1) as u32, coeffs })
    }

    /// Coefficients in the monomial basis.
    pub fn monomial(&self) -> Polynomial {
        let c = basis_constants(self.n);
        Polynomial { coeffs: self.coeffs.iter().zip(&c).map(|(a, c)| a * c).collect() }
    }

    /// Applies the rotation `a_j -> e^{i j theta} a_j`, i.e. `f(z) -> f(e^{i theta} z)`.
    pub fn rotated(&self, theta: f64) -> Self {
        let coeffs =
            self.coeffs.iter().enumerate().map(|(j, a)| a * Complex64::from_polar(1.0, j as f64 * theta)).collect();
        CoefficientVector { n: self.n, coeffs }
    }
}

/// `sqrt((n+1) C(n, j))` for `j = 0..=n`, through log space.
pub fn basis_constants(n: u32) -> Vec<f64> {
    let nf = n as f64;
    let mut log_binom = 0.0;
    let mut out = Vec::with_capacity(n as usize + 1);
    for j in 0..=n {
        if j > 0 {
            log_binom += ((nf - j as f64 + 1.0) / j as f64).ln();
        }
        out.push((0.5 * ((nf + 1.0).ln() + log_binom)).exp());
    }
    out
}

/// A polynomial in the monomial basis, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `(f, f', f'')` at `z` by Horner's scheme.
    pub fn eval_derivatives(&self, z: Complex64) -> [Complex64; 3] {
        let zero = Complex64::new(0.0, 0.0);
        let (mut f, mut d1, mut d2) = (zero, zero, zero);
        for &c in self.coeffs.iter().rev() {
            d2 = d2 * z + d1;
            d1 = d1 * z + f;
            f = f * z + c;
        }
        [f, d1, 2.0 * d2]
    }

    /// `Σ |c_j| |z|^j`, the natural size of `f(z)` for residual tests.
    pub fn abs_scale(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }
}

/// Draws one SU(2) polynomial; the conditioning is imposed exactly by zeroing
/// the coefficient it constrains.
pub fn sample(n: u32, rng: RngSpec, conditioning: Conditioning) -> Result<CoefficientVector> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("degree must be >= 2, got {n}")));
    }
    let mut gen = rng.rng();
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut coeffs: Vec<Complex64> = (0..=n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut gen);
            let im: f64 = StandardNormal.sample(&mut gen);
            Complex64::new(re * scale, im * scale)
        })
        .collect();
    match conditioning {
        Conditioning::None => {}
        Conditioning::ZeroAtOrigin => coeffs[0] = Complex64::new(0.0, 0.0),
        Conditioning::CriticalAtOrigin => coeffs[1] = Complex64::new(0.0, 0.0),
    }
    Ok(CoefficientVector { n, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_constants_small() {
        let c = basis_constants(2);
        assert!((c[0] - 3f64.sqrt()).abs() < 1e-14);
        assert!((c[1] - 6f64.sqrt()).abs() < 1e-14);
        assert!((c[2] - 3f64.sqrt()).abs() < 1e-14);
        let c = basis_constants(1000);
        assert!(c.iter().all(|v| v.is_finite() && *v > 0.0));
    }

    #[test]
    fn horner_derivatives() {
        let p = Polynomial { coeffs: vec![1.0.into(), 2.0.into(), 3.0.into(), 4.0.into()] };
        let z = Complex64::new(0.5, -1.0);
        let [f, d1, d2] = p.eval_derivatives(z);
        let expect_f = 1.0 + 2.0 * z + 3.0 * z * z + 4.0 * z * z * z;
        let expect_d1 = 2.0 + 6.0 * z + 12.0 * z * z;
        let expect_d2 = 6.0 + 24.0 * z;
        assert!((f - expect_f).norm() < 1e-13);
        assert!((d1 - expect_d1).norm() < 1e-13);
        assert!((d2 - expect_d2).norm() < 1e-13);
    }

    #[test]
    fn conditioning_is_exact() {
        let p = sample(5, RngSpec::new(3, 0), Conditioning::ZeroAtOrigin).unwrap().monomial();
        assert_eq!(p.eval(Complex64::new(0.0, 0.0)), Complex64::new(0.0, 0.0));
        let p = sample(5, RngSpec::new(3, 1), Conditioning::CriticalAtOrigin).unwrap().monomial();
        let g = chern_gradient(&p, 5, Complex64::new(0.0, 0.0));
        assert_eq!(g, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = sample(10, RngSpec::new(42, 7), Conditioning::None).unwrap();
        let b = sample(10, RngSpec::new(42, 7), Conditioning::None).unwrap();
        let c = sample(10, RngSpec::new(42, 8), Conditioning::None).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(sample(1, RngSpec::new(0, 0), Conditioning::None).is_err());
    }
}
