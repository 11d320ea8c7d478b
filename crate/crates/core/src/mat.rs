//! Small fixed-size real matrices.
//!
//! Only the 2x2 (one complex dimension) and 4x4 (a pair of complex
//! dimensions) cases are needed; everything is closed form, no external
//! solver.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Determinant magnitudes below this are treated as singular.
pub const DET_GUARD: f64 = 1e-300;

/// 2x2 real matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[0.0, 0.0], [0.0, 0.0]]);
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);

    /// `v` times the identity.
    pub fn isotropic(v: f64) -> Mat2 {
        Mat2([[v, 0.0], [0.0, v]])
    }

    /// Matrix form of a complex scalar: multiplying a real 2-vector by this
    /// matrix is the same as multiplying the corresponding complex numbers.
    /// By construction `m00 == m11` and `m01 == -m10`.
    pub fn rot_scale(z: Complex64) -> Mat2 {
        Mat2([[z.re, -z.im], [z.im, z.re]])
    }

    pub fn add(&self, other: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &other.0;
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }

    pub fn sub(&self, other: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &other.0;
        Mat2([
            [a[0][0] - b[0][0], a[0][1] - b[0][1]],
            [a[1][0] - b[1][0], a[1][1] - b[1][1]],
        ])
    }

    pub fn scale(&self, k: f64) -> Mat2 {
        let a = &self.0;
        Mat2([[k * a[0][0], k * a[0][1]], [k * a[1][0], k * a[1][1]]])
    }

    pub fn matmul(&self, other: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &other.0;
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }

    pub fn mul_vec(&self, v: [f64; 2]) -> [f64; 2] {
        let a = &self.0;
        [
            a[0][0] * v[0] + a[0][1] * v[1],
            a[1][0] * v[0] + a[1][1] * v[1],
        ]
    }

    pub fn transpose(&self) -> Mat2 {
        let a = &self.0;
        Mat2([[a[0][0], a[1][0]], [a[0][1], a[1][1]]])
    }

    pub fn det(&self) -> f64 {
        let a = &self.0;
        a[0][0] * a[1][1] - a[0][1] * a[1][0]
    }

    /// Closed-form cofactor inverse with a determinant-magnitude guard.
    pub fn inverse(&self) -> Result<Mat2> {
        let d = self.det();
        if !d.is_finite() || d.abs() < DET_GUARD {
            return Err(Error::DegenerateFusion { guard: DET_GUARD });
        }
        let a = &self.0;
        Ok(Mat2([
            [a[1][1] / d, -a[0][1] / d],
            [-a[1][0] / d, a[0][0] / d],
        ]))
    }

    pub fn max_abs(&self) -> f64 {
        let a = &self.0;
        a[0][0]
            .abs()
            .max(a[0][1].abs())
            .max(a[1][0].abs())
            .max(a[1][1].abs())
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let a = &self.0;
        (a[0][1] - a[1][0]).abs() <= tol * self.max_abs().max(1.0)
    }

    /// Eigenvalues of the symmetrised matrix, ascending. Closed form.
    pub fn sym_eigenvalues(&self) -> [f64; 2] {
        let a = &self.0;
        let off = 0.5 * (a[0][1] + a[1][0]);
        let tr = a[0][0] + a[1][1];
        let disc = (0.5 * (a[0][0] - a[1][1])).hypot(off);
        [0.5 * tr - disc, 0.5 * tr + disc]
    }
}

/// 4x4 real matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat4(pub [[f64; 4]; 4]);

impl Mat4 {
    pub fn isotropic(v: f64) -> Mat4 {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = v;
        }
        Mat4(m)
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .fold(0.0f64, |acc, x| acc.max(x.abs()))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let a = &self.0;
        let scale = self.max_abs().max(1.0);
        for i in 0..4 {
            for j in (i + 1)..4 {
                if (a[i][j] - a[j][i]).abs() > tol * scale {
                    return false;
                }
            }
        }
        true
    }

    /// Extract the 2x2 block at rows `r..r+2`, columns `c..c+2`.
    pub fn block2(&self, r: usize, c: usize) -> Mat2 {
        let a = &self.0;
        Mat2([[a[r][c], a[r][c + 1]], [a[r + 1][c], a[r + 1][c + 1]]])
    }

    /// Eigenvalues of a symmetric matrix, ascending, via cyclic Jacobi
    /// rotations.
    pub fn sym_eigenvalues(&self) -> [f64; 4] {
        let mut a = self.0;
        for _ in 0..64 {
            let mut off = 0.0f64;
            for i in 0..4 {
                for j in (i + 1)..4 {
                    off += a[i][j] * a[i][j];
                }
            }
            if off <= 1e-30 * self.max_abs().max(1.0).powi(2) {
                break;
            }
            for p in 0..4 {
                for q in (p + 1)..4 {
                    if a[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..4 {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..4 {
                        let apk = a[p][k];
                        let aqk = a[q][k];
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut ev = [a[0][0], a[1][1], a[2][2], a[3][3]];
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
        ev
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let m = Mat2([[2.0, 0.5], [-1.0, 3.0]]);
        let inv = m.inverse().unwrap();
        let prod = m.matmul(&inv);
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((prod.0[i][j] - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn singular_inverse_rejected() {
        let m = Mat2([[1.0, 2.0], [0.5, 1.0]]);
        assert!(m.inverse().is_err());
        assert!(Mat2::ZERO.inverse().is_err());
    }

    #[test]
    fn sym_eigenvalues_2x2() {
        let m = Mat2([[1.0, 2.0], [2.0, 1.0]]);
        let ev = m.sym_eigenvalues();
        assert!((ev[0] + 1.0).abs() < 1e-14);
        assert!((ev[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_matches_known_spectrum() {
        // diag(1,2,3,4) conjugated by a permutation stays {1,2,3,4}
        let m = Mat4([
            [3.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 4.0, 0.0],
            [0.0, 0.0, 0.0, 2.0],
        ]);
        let ev = m.sym_eigenvalues();
        for (got, want) in ev.iter().zip([1.0, 2.0, 3.0, 4.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        // a coupled case: 2x2 blocks [[1,a],[a,1]] have eigenvalues 1 +- a
        let a = 0.3;
        let m = Mat4([
            [1.0, 0.0, a, 0.0],
            [0.0, 1.0, 0.0, a],
            [a, 0.0, 1.0, 0.0],
            [0.0, a, 0.0, 1.0],
        ]);
        let ev = m.sym_eigenvalues();
        for (got, want) in ev.iter().zip([0.7, 0.7, 1.3, 1.3]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn rot_scale_structure() {
        let m = Mat2::rot_scale(Complex64::new(0.3, -1.7));
        assert_eq!(m.0[0][0], m.0[1][1]);
        assert_eq!(m.0[0][1], -m.0[1][0]);
    }
}
