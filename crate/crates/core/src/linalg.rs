//! Closed-form 2x2 Hermitian linear algebra.

use num_complex::Complex64;

/// The Hermitian matrix `[[a, b], [conj(b), d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hermitian2 {
    pub a: f64,
    pub b: Complex64,
    pub d: f64,
}

/// Eigenvalues (descending) and matching orthonormal eigenvectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigh2 {
    pub values: [f64; 2],
    pub vectors: [[Complex64; 2]; 2],
}

impl Hermitian2 {
    pub fn new(a: f64, b: Complex64, d: f64) -> Self {
        Hermitian2 { a, b, d }
    }

    pub fn diagonal(a: f64, d: f64) -> Self {
        Hermitian2 { a, b: Complex64::new(0.0, 0.0), d }
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b.norm_sqr()
    }

    /// Row-major entries.
    pub fn to_array(&self) -> [[Complex64; 2]; 2] {
        [[Complex64::new(self.a, 0.0), self.b], [self.b.conj(), Complex64::new(self.d, 0.0)]]
    }

    pub fn scale(&self, s: f64) -> Self {
        Hermitian2 { a: self.a * s, b: self.b * s, d: self.d * s }
    }

    pub fn eigh(&self) -> Eigh2 {
        let mean = 0.5 * (self.a + self.d);
        let half_gap = 0.5 * (self.a - self.d);
        let radius = half_gap.hypot(self.b.norm());
        let hi = mean + radius;
        let mut lo = mean - radius;
        // Recover the small eigenvalue of a nearly singular matrix from the
        // determinant instead of the cancelling difference.
        if mean > 0.0 && lo.abs() < 1e-3 * hi {
            lo = self.det() / hi;
        }
        let v1 = if radius == 0.0 {
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
        } else if half_gap >= 0.0 {
            normalize([Complex64::new(half_gap + radius, 0.0), self.b.conj()])
        } else {
            normalize([self.b, Complex64::new(radius - half_gap, 0.0)])
        };
        let v2 = [-v1[1].conj(), v1[0].conj()];
        Eigh2 { values: [hi, lo], vectors: [v1, v2] }
    }

    /// Square root of the positive part: negative eigenvalues are clamped to 0.
    pub fn sqrt_psd(&self) -> Hermitian2 {
        let e = self.eigh();
        let s = [e.values[0].max(0.0).sqrt(), e.values[1].max(0.0).sqrt()];
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (k, v) in e.vectors.iter().enumerate() {
            for i in 0..2 {
                for j in 0..2 {
                    m[i][j] += s[k] * v[i] * v[j].conj();
                }
            }
        }
        Hermitian2 { a: m[0][0].re, b: m[0][1], d: m[1][1].re }
    }

    /// `self * diag(q0, q1) * self`, Hermitian because `self` is.
    pub fn sandwich_diagonal(&self, q0: f64, q1: f64) -> Hermitian2 {
        let m = self.to_array();
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = m[i][0] * q0 * m[0][j] + m[i][1] * q1 * m[1][j];
            }
        }
        Hermitian2 { a: out[0][0].re, b: out[0][1], d: out[1][1].re }
    }
}

fn normalize(v: [Complex64; 2]) -> [Complex64; 2] {
    let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / norm, v[1] / norm]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn matvec(m: &Hermitian2, v: [Complex64; 2]) -> [Complex64; 2] {
        let a = m.to_array();
        [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
    }

    #[test]
    fn diagonal_and_identity() {
        let e = Hermitian2::diagonal(1.0, 3.0).eigh();
        assert_eq!(e.values, [3.0, 1.0]);
        let e = Hermitian2::diagonal(2.0, 2.0).eigh();
        assert_eq!(e.values, [2.0, 2.0]);
    }

    #[test]
    fn sqrt_of_rank_one() {
        let b = Complex64::new(0.0, 2.0);
        let m = Hermitian2::new(1.0, b, 4.0);
        let s = m.sqrt_psd();
        let back = s.sandwich_diagonal(1.0, 1.0);
        assert!((back.a - 1.0).abs() < 1e-12);
        assert!((back.b - b).norm() < 1e-12);
        assert!((back.d - 4.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn eigenpairs_satisfy_definition(a in -5.0..5.0f64, d in -5.0..5.0f64,
                                         br in -5.0..5.0f64, bi in -5.0..5.0f64) {
            let m = Hermitian2::new(a, Complex64::new(br, bi), d);
            let e = m.eigh();
            prop_assert!(e.values[0] >= e.values[1]);
            for k in 0..2 {
                let v = e.vectors[k];
                let mv = matvec(&m, v);
                for i in 0..2 {
                    prop_assert!((mv[i] - e.values[k] * v[i]).norm() < 1e-10 * (1.0 + e.values[0].abs()));
                }
            }
            prop_assert!((e.values[0] + e.values[1] - m.trace()).abs() < 1e-10 * (1.0 + m.trace().abs()));
        }
    }
}
