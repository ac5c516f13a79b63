//! Small dense helpers for real symmetric matrices.
//!
//! Everything here works on `nalgebra::DMatrix<f64>`. The eigensolver is a
//! cyclic Jacobi iteration: slower than tridiagonal QR but unconditionally
//! stable for symmetric input and accurate for the graded spectra that show
//! up with strongly squeezed states.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Off-diagonal convergence threshold of the Jacobi sweeps, relative to the
/// Frobenius norm of the input.
pub const JACOBI_TOLERANCE: f64 = 1e-12;

const MAX_SWEEPS: usize = 64;

/// Largest absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()))
}

/// `(m + mᵀ) / 2`
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Eigen-decomposition `A = V diag(λ) Vᵀ` of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Eigenvalues in ascending order.
    pub values: DVector<f64>,
    /// Orthonormal eigenvectors stored column-wise, matching `values`.
    pub vectors: DMatrix<f64>,
}

impl SymmetricEigen {
    /// Cyclic Jacobi eigensolver. Only the upper triangle is trusted; the
    /// input is symmetrized first.
    pub fn new(a: &DMatrix<f64>) -> Result<Self> {
        assert!(a.is_square(), "eigensolver needs a square matrix");
        let n = a.nrows();
        let mut a = symmetrize(a);
        let mut v = DMatrix::<f64>::identity(n, n);
        let scale = a.norm();

        let off = |a: &DMatrix<f64>| {
            let mut s = 0.0;
            for q in 1..n {
                for p in 0..q {
                    s += 2.0 * a[(p, q)] * a[(p, q)];
                }
            }
            s.sqrt()
        };

        let mut sweeps = 0;
        while scale > 0.0 && off(&a) > JACOBI_TOLERANCE * scale {
            if sweeps == MAX_SWEEPS {
                return Err(Error::NoConvergence { sweeps });
            }
            sweeps += 1;
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;

                    a[(p, p)] -= t * apq;
                    a[(q, q)] += t * apq;
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    for r in 0..n {
                        if r != p && r != q {
                            let arp = a[(r, p)];
                            let arq = a[(r, q)];
                            a[(r, p)] = c * arp - s * arq;
                            a[(p, r)] = a[(r, p)];
                            a[(r, q)] = s * arp + c * arq;
                            a[(q, r)] = a[(r, q)];
                        }
                    }
                    for r in 0..n {
                        let vrp = v[(r, p)];
                        let vrq = v[(r, q)];
                        v[(r, p)] = c * vrp - s * vrq;
                        v[(r, q)] = s * vrp + c * vrq;
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
        let values = DVector::from_iterator(n, order.iter().map(|&i| a[(i, i)]));
        let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
        Ok(SymmetricEigen { values, vectors })
    }

    /// `V diag(f(λ)) Vᵀ`
    pub fn map(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let fl = DMatrix::from_diagonal(&self.values.map(f));
        symmetrize(&(&self.vectors * fl * self.vectors.transpose()))
    }
}

/// Symmetric square root of a positive-definite matrix.
pub fn spd_sqrt(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(a)?;
    if eig.values.iter().any(|&l| l <= 0.0) {
        return Err(Error::InvalidCovariance("matrix is not positive definite".into()));
    }
    Ok(eig.map(f64::sqrt))
}

/// Attempts a Cholesky factorization; `true` iff it succeeds.
pub fn is_positive_definite(a: &DMatrix<f64>) -> bool {
    a.iter().all(|x| x.is_finite()) && a.clone().cholesky().is_some()
}

/// Inverse of a symmetric positive-definite matrix via Cholesky, or `None`
/// if the factorization fails.
pub fn spd_inverse(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    a.clone().cholesky().map(|c| symmetrize(&c.inverse()))
}
