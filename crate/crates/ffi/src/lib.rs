//! C interface to `holocond`.
//!
//! Every fallible function returns a [`HolocondStatus`] and writes its result
//! through an out-pointer. On failure, [`holocond_last_error_message`] returns
//! a description that stays valid until the next failing call on the same
//! thread. Panics are caught at the boundary and reported as
//! [`HolocondStatus::Panic`].
//!
//! Experiments and sampled polynomials live behind opaque handles, created by
//! `*_new` / `*_sample` functions and released with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use holocond::kernel::su2_jet;
use holocond::lelong::{RadialDensity, RadialKind};
use holocond::montecarlo::{
    annulus_experiment, find_critical_points, find_zeros, sample, AnnulusHistogram, CoefficientVector, Conditioning,
    ExperimentConfig, Reference, RngSpec, ZeroCounting,
};
use holocond::{Complex64, Error};

/// Result code of every fallible call.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HolocondStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// An argument lies outside the domain of the requested quantity.
    Domain = 3,
    /// A covariance that must be positive is not.
    Degenerate = 4,
    /// The polynomial's leading coefficient is numerically zero.
    DegenerateLeadingCoefficient = 5,
    /// The output buffer is shorter than the result; the required length has
    /// been written to the length out-pointer.
    BufferTooSmall = 6,
    /// The experiment handle has not been run yet.
    NotRun = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolocondComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for HolocondComplex {
    fn from(z: Complex64) -> Self {
        HolocondComplex { re: z.re, im: z.im }
    }
}

impl From<HolocondComplex> for Complex64 {
    fn from(z: HolocondComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// Radial densities exposed through [`holocond_radial_density`]. Kinds
/// without a degree ignore the `n` argument.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HolocondDensityKind {
    /// Zeros given a critical point at 0, degree `n`, Lebesgue measure in `z`.
    DnSu2,
    /// The same at the `n^{-1/2}` length scale.
    RescaledDn,
    DInfinity,
    /// Kac-Rice formula with affine-frame jets at the `n^{-1/2}` scale.
    RescaledKn,
    KInfinity,
    /// Critical points given a zero at 0, normal-frame evaluation.
    RescaledKnNormalFrame,
    KInfinityNormalFrame,
    /// Smooth part of the zeros-given-zero limit density.
    ZerosGivenZero,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HolocondConditioning {
    None,
    ZeroAtOrigin,
    CriticalAtOrigin,
}

impl From<HolocondConditioning> for Conditioning {
    fn from(c: HolocondConditioning) -> Self {
        match c {
            HolocondConditioning::None => Conditioning::None,
            HolocondConditioning::ZeroAtOrigin => Conditioning::ZeroAtOrigin,
            HolocondConditioning::CriticalAtOrigin => Conditioning::CriticalAtOrigin,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HolocondReference {
    KacRice,
    NormalFrame,
}

/// `(d/dz)^a (d/dw̄)^b K(z, w)` is `entries[a][b] * exp(log_scale)`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolocondJet {
    pub entries: [[HolocondComplex; 3]; 3],
    pub log_scale: f64,
}

/// Opaque Monte Carlo experiment.
pub struct HolocondExperiment {
    config: ExperimentConfig,
    result: Option<AnnulusHistogram>,
}

/// Opaque sampled polynomial.
pub struct HolocondPolynomial {
    poly: CoefficientVector,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(message));
}

struct Failure(HolocondStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Domain(_) => HolocondStatus::Domain,
            Error::Degenerate(_) => HolocondStatus::Degenerate,
            Error::DegenerateLeadingCoefficient(_) => HolocondStatus::DegenerateLeadingCoefficient,
            Error::InvalidArgument(_) | Error::UnsupportedConditioningPoint(_) => HolocondStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(HolocondStatus::NullPointer, format!("{what} is NULL"))
}

/// Runs `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> HolocondStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HolocondStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {message}"));
            HolocondStatus::Panic
        }
    }
}

/// Copies `values` into a caller buffer of `capacity` elements and writes
/// the full length to `len`.
///
/// # Safety
/// `out` must be valid for `capacity` writes unless `capacity` is 0; `len`
/// must be NULL or valid for one write.
unsafe fn write_slice<T: Copy>(values: &[T], out: *mut T, capacity: usize, len: *mut usize) -> Result<(), Failure> {
    if !len.is_null() {
        *len = values.len();
    }
    if values.len() > capacity {
        return Err(Failure(
            HolocondStatus::BufferTooSmall,
            format!("buffer holds {capacity} elements, {} needed", values.len()),
        ));
    }
    if !values.is_empty() {
        if out.is_null() {
            return Err(null("output buffer"));
        }
        ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    }
    Ok(())
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// is owned by the library and valid until the next failing call.
#[no_mangle]
pub extern "C" fn holocond_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Evaluates a radial density at radius `r >= 0`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn holocond_radial_density(
    kind: HolocondDensityKind,
    n: u32,
    r: f64,
    out: *mut f64,
) -> HolocondStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let kind = match kind {
            HolocondDensityKind::DnSu2 => RadialKind::DnSu2 { n },
            HolocondDensityKind::RescaledDn => RadialKind::RescaledDn { n },
            HolocondDensityKind::DInfinity => RadialKind::DInfinity,
            HolocondDensityKind::RescaledKn => RadialKind::RescaledKn { n },
            HolocondDensityKind::KInfinity => RadialKind::KInfinity,
            HolocondDensityKind::RescaledKnNormalFrame => RadialKind::RescaledKnNormalFrame { n },
            HolocondDensityKind::KInfinityNormalFrame => RadialKind::KInfinityNormalFrame,
            HolocondDensityKind::ZerosGivenZero => RadialKind::ZerosGivenZero,
        };
        *out = RadialDensity::new(kind).eval(r)?;
        Ok(())
    })
}

/// Derivative jet of the SU(2) kernel `(1 + z w̄)^n`, `n >= 2`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn holocond_su2_jet(
    n: u32,
    z: HolocondComplex,
    w: HolocondComplex,
    out: *mut HolocondJet,
) -> HolocondStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let jet = su2_jet(n, z.into(), w.into())?;
        let mut entries = [[HolocondComplex { re: 0.0, im: 0.0 }; 3]; 3];
        for (a, row) in entries.iter_mut().enumerate() {
            for (b, e) in row.iter_mut().enumerate() {
                *e = jet.entry(a, b).into();
            }
        }
        *out = HolocondJet { entries, log_scale: jet.log_scale };
        Ok(())
    })
}

/// Creates an experiment histogramming zeros (for `CriticalAtOrigin` and
/// `None`) or critical points (for `ZeroAtOrigin`) of `trials` sampled
/// degree-`n` polynomials over the annuli between consecutive `edges`.
///
/// # Safety
/// `edges` must be valid for `edge_count` reads and `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn holocond_experiment_new(
    n: u32,
    trials: u64,
    conditioning: HolocondConditioning,
    edges: *const f64,
    edge_count: usize,
    seed: u64,
    out: *mut *mut HolocondExperiment,
) -> HolocondStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if edges.is_null() {
            return Err(null("edges"));
        }
        let edges = std::slice::from_raw_parts(edges, edge_count).to_vec();
        let config = ExperimentConfig::new(n, trials, conditioning.into(), edges, seed);
        config.validate()?;
        *out = Box::into_raw(Box::new(HolocondExperiment { config, result: None }));
        Ok(())
    })
}

/// Chooses the density critical point counts are compared against.
///
/// # Safety
/// `experiment` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn holocond_experiment_set_reference(
    experiment: *mut HolocondExperiment,
    reference: HolocondReference,
) -> HolocondStatus {
    guard(|| {
        let e = experiment.as_mut().ok_or_else(|| null("experiment"))?;
        e.config.reference = match reference {
            HolocondReference::KacRice => Reference::KacRice,
            HolocondReference::NormalFrame => Reference::NormalFrame,
        };
        e.result = None;
        Ok(())
    })
}

/// Worker threads for [`holocond_experiment_run`]; 0 uses the global pool.
/// Results do not depend on the thread count.
///
/// # Safety
/// `experiment` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn holocond_experiment_set_threads(
    experiment: *mut HolocondExperiment,
    threads: usize,
) -> HolocondStatus {
    guard(|| {
        let e = experiment.as_mut().ok_or_else(|| null("experiment"))?;
        e.config.threads = (threads > 0).then_some(threads);
        Ok(())
    })
}

/// Counts zeros by companion-matrix roots instead of winding numbers.
///
/// # Safety
/// `experiment` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn holocond_experiment_use_companion_roots(
    experiment: *mut HolocondExperiment,
    enabled: bool,
) -> HolocondStatus {
    guard(|| {
        let e = experiment.as_mut().ok_or_else(|| null("experiment"))?;
        e.config.zero_counting = if enabled { ZeroCounting::Companion } else { ZeroCounting::ArgumentPrinciple };
        e.result = None;
        Ok(())
    })
}

/// Runs the experiment, replacing any previous result.
///
/// # Safety
/// `experiment` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn holocond_experiment_run(experiment: *mut HolocondExperiment) -> HolocondStatus {
    guard(|| {
        let e = experiment.as_mut().ok_or_else(|| null("experiment"))?;
        e.result = Some(annulus_experiment(&e.config)?);
        Ok(())
    })
}

/// Number of annuli, one less than the number of edges.
///
/// # Safety
/// `experiment` must be NULL or a live handle; returns 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn holocond_experiment_bin_count(experiment: *const HolocondExperiment) -> usize {
    experiment.as_ref().map_or(0, |e| e.config.edges.len() - 1)
}

unsafe fn result_of<'a>(experiment: *const HolocondExperiment) -> Result<&'a AnnulusHistogram, Failure> {
    let e = experiment.as_ref().ok_or_else(|| null("experiment"))?;
    e.result.as_ref().ok_or_else(|| Failure(HolocondStatus::NotRun, "experiment has not been run".into()))
}

/// Observed count per annulus, summed over trials.
///
/// # Safety
/// `experiment` must be NULL or a live handle; `out` valid for `capacity`
/// writes; `len` NULL or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn holocond_experiment_counts(
    experiment: *const HolocondExperiment,
    out: *mut u64,
    capacity: usize,
    len: *mut usize,
) -> HolocondStatus {
    guard(|| write_slice(&result_of(experiment)?.counts, out, capacity, len))
}

/// Predicted count per annulus (`trials` times the density's annulus mass).
///
/// # Safety
/// As for [`holocond_experiment_counts`].
#[no_mangle]
pub unsafe extern "C" fn holocond_experiment_predicted(
    experiment: *const HolocondExperiment,
    out: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> HolocondStatus {
    guard(|| write_slice(&result_of(experiment)?.predicted, out, capacity, len))
}

/// Empirical standard error of each count.
///
/// # Safety
/// As for [`holocond_experiment_counts`].
#[no_mangle]
pub unsafe extern "C" fn holocond_experiment_stderr(
    experiment: *const HolocondExperiment,
    out: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> HolocondStatus {
    guard(|| write_slice(&result_of(experiment)?.stderr, out, capacity, len))
}

/// Number of samples redrawn because of a degenerate leading coefficient.
///
/// # Safety
/// `experiment` must be NULL or a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn holocond_experiment_resamples(
    experiment: *const HolocondExperiment,
    out: *mut u64,
) -> HolocondStatus {
    guard(|| {
        let r = result_of(experiment)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = r.resamples;
        Ok(())
    })
}

/// Releases an experiment. NULL is ignored.
///
/// # Safety
/// `experiment` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn holocond_experiment_free(experiment: *mut HolocondExperiment) {
    if !experiment.is_null() {
        drop(Box::from_raw(experiment));
    }
}

/// Samples a degree-`n` polynomial from stream `stream` of `seed`. The same
/// `(seed, stream)` gives the same polynomial as trial `stream` of an
/// experiment with that seed.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn holocond_polynomial_sample(
    n: u32,
    seed: u64,
    stream: u64,
    conditioning: HolocondConditioning,
    out: *mut *mut HolocondPolynomial,
) -> HolocondStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let poly = sample(n, RngSpec::new(seed, stream), conditioning.into())?;
        *out = Box::into_raw(Box::new(HolocondPolynomial { poly }));
        Ok(())
    })
}

/// Wraps `len >= 2` coefficients `a_0..a_n` in the orthonormal SU(2) basis.
///
/// # Safety
/// `coeffs` must be valid for `len` reads and `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn holocond_polynomial_from_coefficients(
    coeffs: *const HolocondComplex,
    len: usize,
    out: *mut *mut HolocondPolynomial,
) -> HolocondStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if coeffs.is_null() {
            return Err(null("coeffs"));
        }
        let coeffs = std::slice::from_raw_parts(coeffs, len).iter().map(|&c| c.into()).collect();
        let poly = CoefficientVector::new(coeffs)?;
        *out = Box::into_raw(Box::new(HolocondPolynomial { poly }));
        Ok(())
    })
}

/// Degree `n` of the polynomial, or 0 for NULL.
///
/// # Safety
/// `poly` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn holocond_polynomial_degree(poly: *const HolocondPolynomial) -> u32 {
    poly.as_ref().map_or(0, |p| p.poly.n)
}

/// Copies the coefficients `a_0..a_n`.
///
/// # Safety
/// `poly` must be NULL or a live handle; `out` valid for `capacity` writes;
/// `len` NULL or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn holocond_polynomial_coefficients(
    poly: *const HolocondPolynomial,
    out: *mut HolocondComplex,
    capacity: usize,
    len: *mut usize,
) -> HolocondStatus {
    guard(|| {
        let p = poly.as_ref().ok_or_else(|| null("poly"))?;
        let coeffs: Vec<HolocondComplex> = p.poly.coeffs.iter().map(|&c| c.into()).collect();
        write_slice(&coeffs, out, capacity, len)
    })
}

/// All `n` zeros. Call with `capacity = 0` to query the length.
///
/// # Safety
/// As for [`holocond_polynomial_coefficients`].
#[no_mangle]
pub unsafe extern "C" fn holocond_polynomial_zeros(
    poly: *const HolocondPolynomial,
    out: *mut HolocondComplex,
    capacity: usize,
    len: *mut usize,
) -> HolocondStatus {
    guard(|| {
        let p = poly.as_ref().ok_or_else(|| null("poly"))?;
        let zeros: Vec<HolocondComplex> = find_zeros(&p.poly)?.into_iter().map(Into::into).collect();
        write_slice(&zeros, out, capacity, len)
    })
}

/// Chern critical points in the disk `|z| <= radius`.
///
/// # Safety
/// As for [`holocond_polynomial_coefficients`].
#[no_mangle]
pub unsafe extern "C" fn holocond_polynomial_critical_points(
    poly: *const HolocondPolynomial,
    radius: f64,
    out: *mut HolocondComplex,
    capacity: usize,
    len: *mut usize,
) -> HolocondStatus {
    guard(|| {
        let p = poly.as_ref().ok_or_else(|| null("poly"))?;
        let points: Vec<HolocondComplex> = find_critical_points(&p.poly, radius)?.into_iter().map(Into::into).collect();
        write_slice(&points, out, capacity, len)
    })
}

/// Releases a polynomial. NULL is ignored.
///
/// # Safety
/// `poly` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn holocond_polynomial_free(poly: *mut HolocondPolynomial) {
    if !poly.is_null() {
        drop(Box::from_raw(poly));
    }
}
