//! Cyclic Jacobi diagonalization of small Hermitian matrices.
//!
//! Each rotation zeroes one off-diagonal pair `(p, q)` with a unitary of the
//! form
//!
//! ```text
//! J = [  c         s·e^{iφ} ]
//!     [ -s·e^{-iφ}  c       ]
//! ```
//!
//! where `e^{iφ}` is the phase of `A[p][q]`. After the phase is removed the
//! 2×2 block is real symmetric and the classical (Rutishauser) angle applies.
//! A rotation is skipped only when the off-diagonal entry is negligible
//! relative to the geometric mean of the two diagonal entries, which keeps
//! small eigenvalues of positive semi-definite matrices accurate to high
//! relative precision.

use num_complex::Complex64;

use super::matrix::{CMatrix, ZERO};
use crate::error::{Error, Result};

/// Default tolerance for Hermiticity and PSD checks.
pub const DEFAULT_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Real eigenvalues sorted in descending order.
    pub values: Vec<f64>,
    /// Column `i` is the unit eigenvector for `values[i]`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// `V Λ V†`.
    pub fn reconstruct(&self) -> CMatrix {
        self.map_values(|x| x)
    }

    /// `V f(Λ) V†`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut out = CMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let fl = f(lambda);
            if fl == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = self.vectors[(i, k)] * fl;
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Diagonalizes a Hermitian matrix by cyclic Jacobi rotations.
///
/// `tol` bounds the accepted deviation from Hermiticity.
pub fn hermitian_eig(h: &CMatrix, tol: f64) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigenproblem needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let herm = h.hermiticity_error();
    if herm > tol {
        return Err(Error::NotHermitian(herm));
    }

    let n = h.rows();
    // Work on the exactly Hermitian part.
    let mut a = CMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = Complex64::new(h[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let z = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
    let mut v = CMatrix::identity(n);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                if r <= f64::EPSILON * 1e-3 * (app.abs() * aqq.abs()).sqrt() {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                rotated = true;
                rotate(&mut a, &mut v, p, q, apq, r, app, aqq);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = v[(row, src)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

#[allow(clippy::too_many_arguments)]
fn rotate(
    a: &mut CMatrix,
    v: &mut CMatrix,
    p: usize,
    q: usize,
    apq: Complex64,
    r: f64,
    app: f64,
    aqq: f64,
) {
    let n = a.rows();
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let jpq = phase * s;
    let jqp = -phase.conj() * s;

    // A <- A J (columns p, q)
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * jqp;
        a[(k, q)] = akp * jpq + akq * c;
    }
    // A <- J† A (rows p, q)
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * jqp.conj();
        a[(q, k)] = apk * jpq.conj() + aqk * c;
    }
    a[(p, p)] = Complex64::new(app - t * r, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * r, 0.0);
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * c;
    }
}

/// Principal square root of a positive semi-definite matrix.
///
/// Eigenvalues in `[-tol, 0)` are treated as zero; anything more negative is
/// rejected.
pub fn psd_sqrt(rho: &CMatrix, tol: f64) -> Result<CMatrix> {
    let eig = hermitian_eig(rho, tol)?;
    if let Some(&min) = eig.values.last() {
        if min < -tol {
            return Err(Error::NotPsd(min));
        }
    }
    Ok(eig.map_values(|x| x.max(0.0).sqrt()))
}

/// Trace norm `Tr|A|` of a Hermitian matrix: the sum of absolute eigenvalues.
pub fn trace_norm(a: &CMatrix, tol: f64) -> Result<f64> {
    let eig = hermitian_eig(a, tol)?;
    Ok(eig.values.iter().map(|x| x.abs()).sum())
}
