//! Phase-space linear algebra for N bosonic modes.
//!
//! Quadratures are ordered mode by mode, `(q1, p1, q2, p2, …)`, and obey
//! `[Xᵢ, Xⱼ] = 2iΩᵢⱼ`, so the vacuum covariance matrix is the identity.
//! Mode indices in the public API are 1-based.

use nalgebra::{DMatrix, Matrix2};

use crate::error::{Error, Result};
use crate::linalg::{self, max_abs, SymmetricEigen};
use crate::tolerance::Tolerances;

/// `Ω = ω ⊕ … ⊕ ω` with `ω = ((0, 1), (-1, 0))`.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

fn check_mode(index: usize, n_modes: usize) -> Result<usize> {
    if index == 0 || index > n_modes {
        return Err(Error::ModeOutOfRange { index, n_modes });
    }
    Ok(index - 1)
}

fn check_modes(n_modes: usize) -> Result<()> {
    if n_modes == 0 {
        return Err(Error::TooFewModes { min: 1, got: 0 });
    }
    Ok(())
}

/// Row/column permutation taking mode-interleaved ordering to
/// `(q1, …, qN, p1, …, pN)`: entry `k` of the result is the interleaved
/// index placed at position `k`.
pub fn qqpp_order(n_modes: usize) -> Vec<usize> {
    (0..n_modes).map(|k| 2 * k).chain((0..n_modes).map(|k| 2 * k + 1)).collect()
}

/// Reorders an interleaved phase-space matrix into `qq…pp` ordering.
pub fn to_qqpp(m: &DMatrix<f64>) -> DMatrix<f64> {
    let order = qqpp_order(m.nrows() / 2);
    DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(order[r], order[c])])
}

/// Inverse of [`to_qqpp`].
pub fn from_qqpp(m: &DMatrix<f64>) -> DMatrix<f64> {
    let order = qqpp_order(m.nrows() / 2);
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            out[(order[r], order[c])] = m[(r, c)];
        }
    }
    out
}

/// Covariance matrix of a zero-mean Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    n_modes: usize,
    data: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Validates `data` as a bona fide covariance matrix: square of even
    /// size, finite, symmetric up to roundoff, positive definite, and with
    /// every symplectic eigenvalue at least `1 - tol`.
    pub fn new(data: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerances(data, &Tolerances::default())
    }

    pub fn with_tolerances(data: DMatrix<f64>, tol: &Tolerances) -> Result<Self> {
        let (rows, cols) = data.shape();
        if rows != cols || rows == 0 || rows % 2 != 0 {
            return Err(Error::InvalidCovariance(format!(
                "expected a non-empty 2N×2N matrix, got {rows}×{cols}"
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidCovariance("non-finite entry".into()));
        }
        let asym = linalg::max_abs_diff(&data, &data.transpose());
        if asym > tol.symmetry * (1.0 + max_abs(&data)) {
            return Err(Error::InvalidCovariance(format!("matrix is not symmetric (asymmetry {asym:e})")));
        }
        let cm = Self::from_trusted(data);
        if !linalg::is_positive_definite(&cm.data) {
            return Err(Error::InvalidCovariance("matrix is not positive definite".into()));
        }
        let smallest = symplectic_eigenvalues(&cm.data)?.last().copied().unwrap_or(1.0);
        if smallest < 1.0 - tol.bona_fide {
            return Err(Error::InvalidCovariance(format!(
                "violates the uncertainty principle (smallest symplectic eigenvalue {smallest})"
            )));
        }
        Ok(cm)
    }

    /// Symmetrizes without validation; for results of operations that
    /// preserve the bona fide property.
    pub(crate) fn from_trusted(data: DMatrix<f64>) -> Self {
        let n_modes = data.nrows() / 2;
        CovarianceMatrix { n_modes, data: linalg::symmetrize(&data) }
    }

    /// The vacuum, `σ = 1`.
    pub fn vacuum(n_modes: usize) -> Result<Self> {
        check_modes(n_modes)?;
        Ok(Self::from_trusted(DMatrix::identity(2 * n_modes, 2 * n_modes)))
    }

    /// Product of thermal states with the given symplectic eigenvalues.
    pub fn thermal(nus: &[f64]) -> Result<Self> {
        check_modes(nus.len())?;
        let diag: Vec<f64> = nus.iter().flat_map(|&nu| [nu, nu]).collect();
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)))
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_data(self) -> DMatrix<f64> {
        self.data
    }

    /// Largest absolute entry, `|σ|∞`.
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.data)
    }

    /// 2×2 block between modes `i` and `j` (`σᵢ` when `i == j`, `εᵢⱼ` otherwise).
    pub fn block(&self, i: usize, j: usize) -> Result<Matrix2<f64>> {
        let a = check_mode(i, self.n_modes)?;
        let b = check_mode(j, self.n_modes)?;
        Ok(self.data.fixed_view::<2, 2>(2 * a, 2 * b).into_owned())
    }

    /// Principal submatrix on the listed modes, in the listed order.
    pub fn reduced(&self, modes: &[usize]) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mut rows = Vec::with_capacity(2 * modes.len());
        for &m in modes {
            let k = check_mode(m, self.n_modes)?;
            rows.extend([2 * k, 2 * k + 1]);
        }
        let d = rows.len();
        Ok(Self::from_trusted(DMatrix::from_fn(d, d, |r, c| self.data[(rows[r], rows[c])])))
    }

    /// Reduced state with mode `k` traced out.
    pub fn without_mode(&self, k: usize) -> Result<Self> {
        check_mode(k, self.n_modes)?;
        let rest: Vec<usize> = (1..=self.n_modes).filter(|&m| m != k).collect();
        self.reduced(&rest)
    }

    /// Congruence `SᵀσS`.
    pub fn transform(&self, s: &SymplecticMatrix) -> Result<Self> {
        if s.n_modes != self.n_modes {
            return Err(Error::DimensionMismatch { expected: self.n_modes, got: s.n_modes });
        }
        Ok(Self::from_trusted(s.data.transpose() * &self.data * &s.data))
    }

    /// Congruence by a single-mode map `m` (unit determinant) on `mode`,
    /// touching only that mode's rows and columns.
    pub(crate) fn transform_mode(&self, mode: usize, m: &Matrix2<f64>) -> Result<Self> {
        let k = 2 * check_mode(mode, self.n_modes)?;
        let mut data = self.data.clone();
        let cols = data.columns(k, 2) * m;
        data.columns_mut(k, 2).copy_from(&cols);
        let rows = m.transpose() * data.rows(k, 2);
        data.rows_mut(k, 2).copy_from(&rows);
        Ok(Self::from_trusted(data))
    }

    pub fn spectrum(&self) -> Result<SymplecticSpectrum> {
        self.spectrum_with(&Tolerances::default())
    }

    pub fn spectrum_with(&self, tol: &Tolerances) -> Result<SymplecticSpectrum> {
        let mut values = symplectic_eigenvalues(&self.data)?;
        for v in values.iter_mut() {
            if *v < 1.0 && *v >= 1.0 - tol.bona_fide {
                *v = 1.0;
            }
        }
        if let Some(&min) = values.last() {
            if min < 1.0 {
                return Err(Error::InvalidCovariance(format!(
                    "violates the uncertainty principle (smallest symplectic eigenvalue {min})"
                )));
            }
        }
        let rank = values.iter().filter(|&&v| v > 1.0 + tol.rank).count();
        Ok(SymplecticSpectrum { values, rank })
    }

    /// Number of symplectic eigenvalues different from 1.
    pub fn symplectic_rank(&self) -> Result<usize> {
        Ok(self.spectrum()?.rank)
    }

    pub fn purity(&self) -> Purity {
        self.purity_with(&Tolerances::default())
    }

    /// Residual of the pure-state identity `-ΩσΩσ = 1`.
    pub fn purity_with(&self, tol: &Tolerances) -> Purity {
        let omega = symplectic_form(self.n_modes);
        let os = &omega * &self.data;
        let r = -(&os * &os) - DMatrix::identity(2 * self.n_modes, 2 * self.n_modes);
        let residual = max_abs(&r);
        let sigma = self.max_abs();
        let tolerance = tol.purity * (1.0 + sigma * sigma);
        Purity { pure: residual <= tolerance, residual, tolerance }
    }

    pub fn is_pure(&self) -> bool {
        self.purity().pure
    }

    pub(crate) fn require_pure(&self, tol: &Tolerances) -> Result<()> {
        let p = self.purity_with(tol);
        if p.pure {
            Ok(())
        } else {
            Err(Error::NotPure { residual: p.residual, tolerance: p.tolerance })
        }
    }
}

/// Outcome of the purity test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Purity {
    pub pure: bool,
    pub residual: f64,
    pub tolerance: f64,
}

/// Symplectic eigenvalues, sorted descending, and the symplectic rank.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpectrum {
    pub values: Vec<f64>,
    pub rank: usize,
}

impl SymplecticSpectrum {
    pub fn is_pure(&self) -> bool {
        self.rank == 0
    }
}

/// Symplectic eigenvalues of any positive-definite 2N×2N matrix, without
/// clamping, sorted descending.
///
/// `σ^{1/2} Ωᵀ σ Ω σ^{1/2}` is symmetric positive definite and similar to
/// `-(Ωσ)²`, whose eigenvalues are the squared symplectic eigenvalues, each
/// twice. The 2N square roots are sorted and adjacent pairs averaged.
pub fn symplectic_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = m.nrows() / 2;
    let root = linalg::spd_sqrt(m)?;
    let omega = symplectic_form(n);
    let inner = &root * omega.transpose() * m * &omega * &root;
    let eig = SymmetricEigen::new(&inner)?;
    let mut roots: Vec<f64> = eig.values.iter().map(|&l| l.max(0.0).sqrt()).collect();
    roots.sort_by(f64::total_cmp);
    let mut nus: Vec<f64> = roots.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect();
    nus.reverse();
    Ok(nus)
}

/// Phase-space matrix of a Gaussian unitary, `SᵀΩS = Ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    n_modes: usize,
    data: DMatrix<f64>,
}

// Negated comparisons below also reject NaN residuals.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
impl SymplecticMatrix {
    pub fn new(data: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = data.shape();
        if rows != cols || rows == 0 || rows % 2 != 0 {
            return Err(Error::NotSymplectic { residual: f64::INFINITY });
        }
        let s = SymplecticMatrix { n_modes: rows / 2, data };
        let residual = s.residual();
        let scale = max_abs(&s.data);
        if !(residual <= Tolerances::default().symplectic * scale * scale) {
            return Err(Error::NotSymplectic { residual });
        }
        Ok(s)
    }

    pub fn identity(n_modes: usize) -> Result<Self> {
        check_modes(n_modes)?;
        Ok(SymplecticMatrix { n_modes, data: DMatrix::identity(2 * n_modes, 2 * n_modes) })
    }

    /// Embeds a 2×2 matrix of unit determinant acting on one mode.
    pub fn local(n_modes: usize, mode: usize, m: Matrix2<f64>) -> Result<Self> {
        let k = check_mode(mode, n_modes)?;
        let det = m.determinant();
        let scale = m.amax();
        if !((det - 1.0).abs() <= Tolerances::default().symplectic * (1.0 + scale * scale)) {
            return Err(Error::NotSymplectic { residual: (det - 1.0).abs() });
        }
        let mut data = DMatrix::identity(2 * n_modes, 2 * n_modes);
        data.fixed_view_mut::<2, 2>(2 * k, 2 * k).copy_from(&m);
        Ok(SymplecticMatrix { n_modes, data })
    }

    /// Phase rotation of one mode: `(q, p) ↦ (q cos θ + p sin θ, -q sin θ + p cos θ)`.
    pub fn rotation(n_modes: usize, mode: usize, theta: f64) -> Result<Self> {
        let (s, c) = theta.sin_cos();
        Self::local(n_modes, mode, Matrix2::new(c, s, -s, c))
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    /// `|SᵀΩS - Ω|∞`
    pub fn residual(&self) -> f64 {
        let omega = symplectic_form(self.n_modes);
        linalg::max_abs_diff(&(self.data.transpose() * &omega * &self.data), &omega)
    }

    /// Matrix product `self · other`: applying the result equals applying
    /// `self` first, then `other`.
    pub fn then(&self, other: &SymplecticMatrix) -> Result<Self> {
        if self.n_modes != other.n_modes {
            return Err(Error::DimensionMismatch { expected: self.n_modes, got: other.n_modes });
        }
        Ok(SymplecticMatrix { n_modes: self.n_modes, data: &self.data * &other.data })
    }
}

/// Single-mode squeezer: `diag(s, 1/s)` on `mode`, identity elsewhere.
pub fn squeezer(n_modes: usize, mode: usize, s: f64) -> Result<SymplecticMatrix> {
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::InvalidSqueezing(s));
    }
    SymplecticMatrix::local(n_modes, mode, Matrix2::new(s, 0.0, 0.0, 1.0 / s))
}

/// Beam splitter of transmittivity `t` between `mode_i` and `mode_j`:
/// `((√t·1, √(1-t)·1), (-√(1-t)·1, √t·1))` on `(qᵢ, pᵢ, qⱼ, pⱼ)`.
pub fn beam_splitter(n_modes: usize, mode_i: usize, mode_j: usize, t: f64) -> Result<SymplecticMatrix> {
    let a = check_mode(mode_i, n_modes)?;
    let b = check_mode(mode_j, n_modes)?;
    if a == b {
        return Err(Error::InvalidModePair(mode_i, mode_j));
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidTransmittivity(t));
    }
    let (c, s) = (t.sqrt(), (1.0 - t).sqrt());
    let mut data = DMatrix::identity(2 * n_modes, 2 * n_modes);
    for k in 0..2 {
        data[(2 * a + k, 2 * a + k)] = c;
        data[(2 * b + k, 2 * b + k)] = c;
        data[(2 * a + k, 2 * b + k)] = s;
        data[(2 * b + k, 2 * a + k)] = -s;
    }
    Ok(SymplecticMatrix { n_modes, data })
}
