//! Conditional point-process densities for Gaussian random SU(2) polynomials.
//!
//! Two conditional first intensities are computed, both at finite degree `n`
//! and in the `n -> infinity` limit at the `n^{-1/2}` length scale:
//!
//! * `K_n(z|p)`: critical points of the Chern connection given a zero at `p`,
//!   via a Kac-Rice reduction of the conditioned kernel jets ([`kacrice`]);
//! * `D_n(z|q)`: zeros given a Chern critical point at `q`, via the
//!   Poincare-Lelong formula applied to the conditioned kernel ([`lelong`]).
//!
//! Every closed form is paired with an independent check: finite-difference
//! Laplacians for the Poincare-Lelong densities, 2D quadrature for the
//! Kac-Rice integral, and a Monte Carlo sampler ([`montecarlo`]) that locates
//! actual zeros and critical points of sampled polynomials.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod conditioning;
pub mod kacrice;
pub mod kernel;
pub mod lelong;
pub mod linalg;
pub mod montecarlo;
pub mod quadrature;

pub use num_complex::Complex64;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// A covariance quantity that must be strictly positive is not.
    #[error("degenerate kernel: {0}")]
    Degenerate(String),
    /// Conditioning away from the origin of the normal frame is not implemented.
    #[error("unsupported conditioning point {0}; only the origin is supported")]
    UnsupportedConditioningPoint(Complex64),
    /// The sampled polynomial has (numerically) lower degree than requested.
    #[error("leading coefficient {0:e} is too small for a degree-n root solve")]
    DegenerateLeadingCoefficient(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
