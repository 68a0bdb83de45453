//! All roots of a polynomial as eigenvalues of its balanced companion matrix.

use num_complex::Complex64;

use super::{CoefficientVector, Polynomial};
use crate::{Error, Result};

const LEADING_TOLERANCE: f64 = 1e-13;
const RESIDUAL_TOLERANCE: f64 = 1e-6;

/// All `n` roots (with multiplicity) of the sampled polynomial.
///
/// Exact zero roots from vanishing low-order coefficients are returned as
/// exact zeros. The remaining roots come from a balanced companion matrix and
/// get one Newton polishing step on the original polynomial.
pub fn find_zeros(poly: &CoefficientVector) -> Result<Vec<Complex64>> {
    let lead = poly.coeffs[poly.n as usize].norm();
    if lead < LEADING_TOLERANCE {
        return Err(Error::DegenerateLeadingCoefficient(lead));
    }
    let p = poly.monomial();
    let zero = Complex64::new(0.0, 0.0);
    let trailing = p.coeffs.iter().take_while(|c| **c == zero).count();
    let reduced = &p.coeffs[trailing..];
    let mut roots = vec![zero; trailing];
    if reduced.len() > 1 {
        let lead = reduced[reduced.len() - 1];
        let monic: Vec<Complex64> = reduced[..reduced.len() - 1].iter().map(|c| c / lead).collect();
        let mut found = companion_eigenvalues(&monic)?;
        let mut failures = 0usize;
        for z in found.iter_mut() {
            polish(&p, z);
            if p.eval(*z).norm() > RESIDUAL_TOLERANCE * p.abs_scale(*z) {
                failures += 1;
            }
        }
        if failures > 0 {
            log::warn!("{failures} of {} roots fail the residual check", found.len());
        }
        roots.extend(found);
    }
    Ok(roots)
}

/// One Newton step, kept only if it reduces `|f|`.
fn polish(p: &Polynomial, z: &mut Complex64) {
    let [f, d1, _] = p.eval_derivatives(*z);
    if d1.norm() == 0.0 {
        return;
    }
    let candidate = *z - f / d1;
    if p.eval(candidate).norm() < f.norm() {
        *z = candidate;
    }
}

/// Eigenvalues of the companion matrix of the monic polynomial
/// `z^m + c_{m-1} z^{m-1} + ... + c_0`, given `c_0..c_{m-1}`.
pub fn companion_eigenvalues(lower: &[Complex64]) -> Result<Vec<Complex64>> {
    let m = lower.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    if m == 1 {
        return Ok(vec![-lower[0]]);
    }
    // Upper Hessenberg companion: first row -c_{m-1}..-c_0, ones below.
    let mut h = vec![Complex64::new(0.0, 0.0); m * m];
    for j in 0..m {
        h[j] = -lower[m - 1 - j];
    }
    for i in 1..m {
        h[i * m + i - 1] = Complex64::new(1.0, 0.0);
    }
    balance(&mut h, m);
    hessenberg_qr(&mut h, m)
}

fn norm1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Diagonal similarity scaling by powers of two so that each row and column
/// have comparable 1-norms.
fn balance(h: &mut [Complex64], m: usize) {
    const RADIX: f64 = 2.0;
    loop {
        let mut done = true;
        for i in 0..m {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..m {
                if j != i {
                    col += norm1(h[j * m + i]);
                    row += norm1(h[i * m + j]);
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let total = col + row;
            let mut f = 1.0;
            let mut c = col;
            while c < row / RADIX {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            while c >= row * RADIX {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + row) / f < 0.95 * total {
                done = false;
                for j in 0..m {
                    h[i * m + j] /= f;
                    h[j * m + i] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix by single-shift QR with
/// Wilkinson shifts and deflation. The matrix is overwritten.
fn hessenberg_qr(h: &mut [Complex64], m: usize) -> Result<Vec<Complex64>> {
    let at = |i: usize, j: usize| i * m + j;
    let mut eig = Vec::with_capacity(m);
    let mut hi = m - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let mut rot: Vec<(Complex64, Complex64)> = vec![(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); m];
    loop {
        if hi == 0 {
            eig.push(h[at(0, 0)]);
            break;
        }
        // Locate the start of the unreduced trailing block.
        let mut lo = hi;
        while lo > 0 {
            let sub = norm1(h[at(lo, lo - 1)]);
            let diag = norm1(h[at(lo - 1, lo - 1)]) + norm1(h[at(lo, lo)]);
            if sub <= f64::EPSILON * diag || sub < f64::MIN_POSITIVE {
                h[at(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig.push(h[at(hi, hi)]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 60 * m {
            return Err(Error::Domain("companion QR iteration did not converge".into()));
        }
        let a = h[at(hi - 1, hi - 1)];
        let b = h[at(hi - 1, hi)];
        let c = h[at(hi, hi - 1)];
        let d = h[at(hi, hi)];
        let shift = if iter.is_multiple_of(11) {
            // exceptional shift to break cycles
            d + Complex64::new(0.75 * norm1(c), 0.0)
        } else {
            let half_tr = 0.5 * (a + d);
            let disc = (half_tr * half_tr - (a * d - b * c)).sqrt();
            let s1 = half_tr + disc;
            let s2 = half_tr - disc;
            if (s1 - d).norm() < (s2 - d).norm() {
                s1
            } else {
                s2
            }
        };
        for k in lo..=hi {
            h[at(k, k)] -= shift;
        }
        // H - shift = Q R, with Q a product of Givens rotations.
        for k in lo..hi {
            let x = h[at(k, k)];
            let y = h[at(k + 1, k)];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (cs, sn) = if r == 0.0 { (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)) } else { (x / r, y / r) };
            rot[k] = (cs, sn);
            for j in k..=hi {
                let u = h[at(k, j)];
                let v = h[at(k + 1, j)];
                h[at(k, j)] = cs.conj() * u + sn.conj() * v;
                h[at(k + 1, j)] = -sn * u + cs * v;
            }
        }
        // R Q, then undo the shift.
        for k in lo..hi {
            let (cs, sn) = rot[k];
            for i in lo..=(k + 1).min(hi) {
                let u = h[at(i, k)];
                let v = h[at(i, k + 1)];
                h[at(i, k)] = u * cs + v * sn;
                h[at(i, k + 1)] = -u * sn.conj() + v * cs.conj();
            }
        }
        for k in lo..=hi {
            h[at(k, k)] += shift;
        }
    }
    Ok(eig)
}
