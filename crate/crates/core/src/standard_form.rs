//! Standard form of pure states without q-p correlations.
//!
//! In `(q1…qN, p1…pN)` ordering such a state reads `V_Q ⊕ V_P`, purity forces
//! `V_P = V_Q⁻¹`, and after local squeezing the diagonals agree,
//! `(V_Q⁻¹)ᵢᵢ = (V_Q)ᵢᵢ`. What remains free are the `N(N-1)/2` off-diagonal
//! correlations `⟨qᵢqⱼ⟩`.

use std::f64::consts::FRAC_PI_4;

use nalgebra::{DMatrix, DVector, Matrix2};

use crate::error::{Error, Result};
use crate::linalg::{self, max_abs, max_abs_diff, SymmetricEigen};
use crate::symplectic::{from_qqpp, to_qqpp, CovarianceMatrix, SymplecticMatrix};
use crate::tolerance::Tolerances;

pub const NEWTON_MAX_ITER: usize = 200;
pub const NEWTON_MAX_HALVINGS: usize = 40;
pub const NEWTON_TOLERANCE: f64 = 1e-12;

/// `V_Q` of a pure state in standard form.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardForm {
    vq: DMatrix<f64>,
}

impl StandardForm {
    /// Checks symmetry, positive definiteness and the Williamson diagonal
    /// conditions.
    pub fn new(vq: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerances(vq, &Tolerances::default())
    }

    pub fn with_tolerances(vq: DMatrix<f64>, tol: &Tolerances) -> Result<Self> {
        if !vq.is_square() || vq.nrows() == 0 {
            return Err(Error::InvalidStandardForm(format!("V_Q must be a non-empty square matrix, got {:?}", vq.shape())));
        }
        let scale = 1.0 + max_abs(&vq);
        if max_abs_diff(&vq, &vq.transpose()) > tol.symmetry * scale {
            return Err(Error::InvalidStandardForm("V_Q is not symmetric".into()));
        }
        let vq = linalg::symmetrize(&vq);
        let vp = linalg::spd_inverse(&vq).ok_or_else(|| Error::InvalidStandardForm("V_Q is not positive definite".into()))?;
        let worst = (0..vq.nrows()).map(|i| (vp[(i, i)] - vq[(i, i)]).abs()).fold(0.0, f64::max);
        if worst > tol.williamson * scale {
            return Err(Error::InvalidStandardForm(format!(
                "diagonal conditions (V_Q⁻¹)ᵢᵢ = (V_Q)ᵢᵢ violated by {worst:e}"
            )));
        }
        Ok(StandardForm { vq })
    }

    pub fn n_modes(&self) -> usize {
        self.vq.nrows()
    }

    pub fn vq(&self) -> &DMatrix<f64> {
        &self.vq
    }

    /// `V_P = V_Q⁻¹`
    pub fn vp(&self) -> DMatrix<f64> {
        linalg::spd_inverse(&self.vq).expect("validated positive definite")
    }

    /// Strict upper triangle of `V_Q`, row-major: the `N(N-1)/2` two-point
    /// correlations.
    pub fn parameters(&self) -> Vec<f64> {
        let n = self.n_modes();
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| self.vq[(i, j)]).collect()
    }

    /// Assembles `V_Q ⊕ V_Q⁻¹` in mode-interleaved ordering.
    pub fn to_cm(&self) -> CovarianceMatrix {
        let n = self.n_modes();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&self.vq);
        m.view_mut((n, n), (n, n)).copy_from(&self.vp());
        CovarianceMatrix::from_trusted(from_qqpp(&m))
    }
}

/// Free function spelling of [`StandardForm::parameters`].
pub fn extract_parameters(sf: &StandardForm) -> Vec<f64> {
    sf.parameters()
}

/// Free function spelling of [`StandardForm::to_cm`].
pub fn standard_form_to_cm(sf: &StandardForm) -> CovarianceMatrix {
    sf.to_cm()
}

/// Result of bringing a state to standard form.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub form: StandardForm,
    /// Locally normalized state (single-mode blocks proportional to 1).
    pub cm: CovarianceMatrix,
    /// Product of the local rotations and squeezings applied.
    pub local: SymplecticMatrix,
    /// `|q-p block|∞` after normalization.
    pub qp_residual: f64,
    /// `|V_P - V_Q⁻¹|∞`.
    pub inverse_residual: f64,
}

// Rotation angle (folded into (-π/4, π/4]) that diagonalizes a symmetric
// 2×2 block under `(q, p) ↦ (q cos θ + p sin θ, -q sin θ + p cos θ)`.
fn diagonalizing_angle(alpha: f64, beta: f64, gamma: f64) -> f64 {
    if gamma.abs() <= 1e-14 * (alpha + beta) {
        return 0.0;
    }
    let mut theta = -0.5 * (2.0 * gamma).atan2(alpha - beta);
    if theta > FRAC_PI_4 {
        theta -= 2.0 * FRAC_PI_4;
    } else if theta <= -FRAC_PI_4 {
        theta += 2.0 * FRAC_PI_4;
    }
    theta
}

/// Per-mode Williamson normalization: rotate each 2×2 block diagonal, then
/// squeeze it proportional to the identity.
pub fn normalize_locally(cm: &CovarianceMatrix) -> Result<(CovarianceMatrix, SymplecticMatrix)> {
    let n = cm.n_modes();
    let mut local = DMatrix::identity(2 * n, 2 * n);
    let mut state = cm.clone();
    for k in 1..=n {
        let b = state.block(k, k)?;
        let theta = diagonalizing_angle(b[(0, 0)], b[(1, 1)], b[(0, 1)]);
        let (s, c) = theta.sin_cos();
        let rot = Matrix2::new(c, s, -s, c);
        let b = rot.transpose() * b * rot;
        let t = (b[(1, 1)] / b[(0, 0)]).powf(0.25);
        let m = rot * Matrix2::new(t, 0.0, 0.0, 1.0 / t);
        state = state.transform_mode(k, &m)?;
        local.fixed_view_mut::<2, 2>(2 * k - 2, 2 * k - 2).copy_from(&m);
    }
    Ok((state, SymplecticMatrix::new(local)?))
}

pub fn to_standard_form(cm: &CovarianceMatrix) -> Result<StandardForm> {
    reduce(cm, &Tolerances::default()).map(|r| r.form)
}

/// Normalizes `cm` locally and reads off `V_Q`, checking that the q-p block
/// vanishes and the p block is `V_Q⁻¹`.
pub fn reduce(cm: &CovarianceMatrix, tol: &Tolerances) -> Result<Reduction> {
    cm.require_pure(tol)?;
    let n = cm.n_modes();
    let (normalized, local) = normalize_locally(cm)?;
    let q = to_qqpp(normalized.data());
    let tolerance = tol.block * (1.0 + normalized.max_abs());

    let qp_residual = max_abs(&q.view((0, n), (n, n)).into_owned());
    if qp_residual > tolerance {
        return Err(Error::NotInGenericClass { residual: qp_residual, tolerance });
    }
    let vq = q.view((0, 0), (n, n)).into_owned();
    let vp = q.view((n, n), (n, n)).into_owned();
    let inverse = linalg::spd_inverse(&vq)
        .ok_or_else(|| Error::NumericalInconsistency("q block is not positive definite".into()))?;
    let inverse_residual = max_abs_diff(&inverse, &vp);
    if inverse_residual > tolerance {
        return Err(Error::NumericalInconsistency(format!(
            "p block differs from the inverse q block by {inverse_residual:e}"
        )));
    }
    let form = StandardForm::with_tolerances(vq, tol)?;
    Ok(Reduction { form, cm: normalized, local, qp_residual, inverse_residual })
}

fn symmetric_from_upper(offdiag: &[f64], n: usize, diag: &DVector<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::from_diagonal(diag);
    let mut it = offdiag.iter();
    for i in 0..n {
        for j in i + 1..n {
            let v = *it.next().expect("length checked");
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// `F(V) = diag(V⁻¹) - diag(V)`, or `None` outside the positive-definite cone.
pub fn williamson_residual(vq: &DMatrix<f64>) -> Option<DVector<f64>> {
    let w = linalg::spd_inverse(vq)?;
    Some(w.diagonal() - vq.diagonal())
}

/// Jacobian of [`williamson_residual`] with respect to the diagonal of `V`:
/// `∂(V⁻¹)ᵢᵢ/∂dⱼ = -((V⁻¹)ᵢⱼ)²`, so `J = -(W∘W) - 1` with `W = V⁻¹`.
pub fn williamson_jacobian(vq: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let w = linalg::spd_inverse(vq)?;
    let n = w.nrows();
    Some(DMatrix::from_fn(n, n, |i, j| -w[(i, j)] * w[(i, j)] - if i == j { 1.0 } else { 0.0 }))
}

/// Newton solve of the diagonal reconstruction, with iteration statistics.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub form: StandardForm,
    pub iterations: usize,
    pub residual: f64,
}

/// Recovers the diagonal of `V_Q` from its off-diagonal entries (strict
/// upper triangle, row-major) by Newton iteration on the Williamson
/// conditions. The start `dᵢ = 1 + Σⱼ|vᵢⱼ|` is diagonally dominant; steps
/// that leave the positive-definite cone are halved.
pub fn reconstruct_diagonal(offdiag: &[f64], n_modes: usize) -> Result<Reconstruction> {
    if n_modes == 0 {
        return Err(Error::TooFewModes { min: 1, got: 0 });
    }
    let expected = crate::engineering::parameter_count(n_modes);
    if offdiag.len() != expected {
        return Err(Error::DimensionMismatch { expected, got: offdiag.len() });
    }
    if offdiag.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidStandardForm("non-finite correlation".into()));
    }

    let zero = DVector::zeros(n_modes);
    let abs_rows = symmetric_from_upper(offdiag, n_modes, &zero).abs().row_sum_tr();
    let mut d = abs_rows.add_scalar(1.0);
    let mut v = symmetric_from_upper(offdiag, n_modes, &d);
    let mut f = williamson_residual(&v).expect("diagonally dominant start is positive definite");

    for iter in 0..=NEWTON_MAX_ITER {
        let residual = f.amax();
        if residual <= NEWTON_TOLERANCE * (1.0 + d.amax()) {
            let form = StandardForm::new(v)?;
            return Ok(Reconstruction { form, iterations: iter, residual });
        }
        if iter == NEWTON_MAX_ITER {
            break;
        }
        let jac = williamson_jacobian(&v).expect("iterate stays in the cone");
        let step = jac.lu().solve(&(-&f)).ok_or_else(|| Error::Infeasible {
            iterations: iter,
            residual,
            reason: "singular Jacobian".into(),
        })?;

        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=NEWTON_MAX_HALVINGS {
            let trial_d = &d + &step * lambda;
            if trial_d.iter().all(|&x| x > 0.0) {
                let trial_v = symmetric_from_upper(offdiag, n_modes, &trial_d);
                if let Some(trial_f) = williamson_residual(&trial_v) {
                    accepted = Some((trial_d, trial_v, trial_f));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let Some((nd, nv, nf)) = accepted else {
            return Err(Error::Infeasible {
                iterations: iter,
                residual,
                reason: "every damped step leaves the positive-definite cone".into(),
            });
        };
        d = nd;
        v = nv;
        f = nf;
    }
    Err(Error::Infeasible {
        iterations: NEWTON_MAX_ITER,
        residual: f.amax(),
        reason: "iteration limit reached".into(),
    })
}

/// `det σᵢ - 1 + Σⱼ≠ᵢ det εᵢⱼ`, evaluated on the locally normalized state.
pub fn det_identity_residual(cm: &CovarianceMatrix, mode: usize) -> Result<f64> {
    let r = reduce(cm, &Tolerances::default())?;
    det_identity_residual_normalized(&r.cm, mode)
}

pub(crate) fn det_identity_residual_normalized(cm: &CovarianceMatrix, mode: usize) -> Result<f64> {
    let mut sum = cm.block(mode, mode)?.determinant() - 1.0;
    for j in (1..=cm.n_modes()).filter(|&j| j != mode) {
        sum += cm.block(mode, j)?.determinant();
    }
    Ok(sum)
}

/// Ground state of `H = ½Σp² + ½qᵀVq`: q block `V^{-1/2}`, p block `V^{1/2}`.
pub fn harmonic_ground_state(potential: &DMatrix<f64>) -> Result<CovarianceMatrix> {
    if !potential.is_square() || potential.nrows() == 0 {
        return Err(Error::InvalidPotential("potential must be a non-empty square matrix".into()));
    }
    if max_abs_diff(potential, &potential.transpose()) > 1e-12 * (1.0 + max_abs(potential)) {
        return Err(Error::InvalidPotential("potential is not symmetric".into()));
    }
    if !linalg::is_positive_definite(potential) {
        return Err(Error::InvalidPotential("potential is not positive definite".into()));
    }
    let eig = SymmetricEigen::new(potential)?;
    if eig.values.iter().any(|&l| l <= 0.0) {
        return Err(Error::InvalidPotential("potential is not positive definite".into()));
    }
    let n = potential.nrows();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&eig.map(|l| 1.0 / l.sqrt()));
    m.view_mut((n, n), (n, n)).copy_from(&eig.map(f64::sqrt));
    Ok(CovarianceMatrix::from_trusted(from_qqpp(&m)))
}

/// Translationally invariant ring: `1 + 2κ` on the diagonal, `-κ` between
/// neighbours `i` and `i+1 mod N`. For `N = 2` both bonds join the same
/// pair, giving `-2κ`.
pub fn ring_potential(n_modes: usize, coupling: f64) -> Result<DMatrix<f64>> {
    if n_modes < 2 {
        return Err(Error::TooFewModes { min: 2, got: n_modes });
    }
    if !(coupling.is_finite() && coupling >= 0.0) {
        return Err(Error::InvalidCoupling(coupling));
    }
    let mut v = DMatrix::identity(n_modes, n_modes) * (1.0 + 2.0 * coupling);
    for i in 0..n_modes {
        let j = (i + 1) % n_modes;
        v[(i, j)] -= coupling;
        v[(j, i)] -= coupling;
    }
    Ok(v)
}
