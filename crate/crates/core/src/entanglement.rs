//! Bipartite entanglement of pure Gaussian states.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::standard_form::StandardForm;
use crate::symplectic::{symplectic_eigenvalues, CovarianceMatrix};
use crate::tolerance::Tolerances;

/// Logarithm base of reported entropies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EntropyUnit {
    /// log₂ (ebits)
    #[default]
    Bits,
    /// ln
    Nats,
}

impl EntropyUnit {
    fn convert_bits(self, x: f64) -> f64 {
        match self {
            EntropyUnit::Bits => x,
            EntropyUnit::Nats => x * std::f64::consts::LN_2,
        }
    }
}

/// Von Neumann entropy (ebits) of a single mode with symplectic eigenvalue
/// `a`: `f(a) = ((a+1)/2) log₂((a+1)/2) - ((a-1)/2) log₂((a-1)/2)`.
pub fn entropy_from_schmidt(a: f64) -> f64 {
    if a - 1.0 < 1e-12 {
        return 0.0;
    }
    let plus = 0.5 * (a + 1.0);
    let minus = 0.5 * (a - 1.0);
    plus * plus.log2() - minus * minus.log2()
}

fn pure_state(cm: &CovarianceMatrix) -> Result<()> {
    cm.require_pure(&Tolerances::default())
}

/// `a = √det σₖ`, the nontrivial symplectic eigenvalue of either side of the
/// `k | rest` split.
pub fn schmidt_parameter(cm: &CovarianceMatrix, mode: usize) -> Result<f64> {
    pure_state(cm)?;
    Ok(cm.block(mode, mode)?.determinant().sqrt())
}

/// Entropy of entanglement between `mode` and the remaining modes.
pub fn entropy_one_vs_rest(cm: &CovarianceMatrix, mode: usize) -> Result<f64> {
    schmidt_parameter(cm, mode).map(entropy_from_schmidt)
}

/// Same entropy, but computed only from the pairwise blocks through
/// `det σᵢ = 1 - Σⱼ≠ᵢ det εᵢⱼ`, with `det εᵢⱼ = (V_Q)ᵢⱼ (V_P)ᵢⱼ`.
pub fn entropy_via_pairwise(sf: &StandardForm, mode: usize) -> Result<f64> {
    let n = sf.n_modes();
    if mode == 0 || mode > n {
        return Err(Error::ModeOutOfRange { index: mode, n_modes: n });
    }
    let i = mode - 1;
    let (vq, vp) = (sf.vq(), sf.vp());
    let det = 1.0 - (0..n).filter(|&j| j != i).map(|j| vq[(i, j)] * vp[(i, j)]).sum::<f64>();
    if det < 1.0 - 1e-9 {
        return Err(Error::NumericalInconsistency(format!(
            "pairwise identity gives det σ{mode} = {det}, below the vacuum value"
        )));
    }
    Ok(entropy_from_schmidt(det.max(1.0).sqrt()))
}

/// Smallest symplectic eigenvalue of the partial transpose of the `(i, j)`
/// reduced state, with mode `j`'s momentum sign-flipped.
pub fn partial_transpose_min_eigenvalue(cm: &CovarianceMatrix, mode_i: usize, mode_j: usize) -> Result<f64> {
    if mode_i == mode_j {
        return Err(Error::InvalidModePair(mode_i, mode_j));
    }
    let pair = cm.reduced(&[mode_i, mode_j])?;
    let flip = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 1.0, -1.0]));
    let pt = &flip * pair.data() * &flip;
    let nus = symplectic_eigenvalues(&pt)?;
    Ok(*nus.last().expect("two modes"))
}

/// `max(0, -log₂ ν̃₋)` for the pair `(i, j)`.
pub fn log_negativity_pair(cm: &CovarianceMatrix, mode_i: usize, mode_j: usize) -> Result<f64> {
    let nu = partial_transpose_min_eigenvalue(cm, mode_i, mode_j)?;
    Ok((-nu.log2()).max(0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntanglementReport {
    pub n_modes: usize,
    /// One-mode-versus-rest entropies.
    pub per_mode_entropy: Vec<f64>,
    /// Mode whose split against the rest `schmidt_parameter` describes.
    pub schmidt_mode: usize,
    pub schmidt_parameter: f64,
    pub pairwise_logneg: Vec<Vec<f64>>,
    pub pairwise_detblocks: Vec<Vec<f64>>,
    #[serde(skip)]
    pub unit: EntropyUnit,
}

pub fn full_report(cm: &CovarianceMatrix) -> Result<EntanglementReport> {
    full_report_in(cm, EntropyUnit::Bits)
}

pub fn full_report_in(cm: &CovarianceMatrix, unit: EntropyUnit) -> Result<EntanglementReport> {
    pure_state(cm)?;
    let n = cm.n_modes();
    let per_mode_entropy = (1..=n)
        .map(|k| Ok(unit.convert_bits(entropy_from_schmidt(cm.block(k, k)?.determinant().sqrt()))))
        .collect::<Result<Vec<_>>>()?;
    let mut logneg = vec![vec![0.0; n]; n];
    let mut dets = vec![vec![0.0; n]; n];
    for i in 1..=n {
        for j in i + 1..=n {
            let ln = unit.convert_bits(log_negativity_pair(cm, i, j)?);
            let det = cm.block(i, j)?.determinant();
            logneg[i - 1][j - 1] = ln;
            logneg[j - 1][i - 1] = ln;
            dets[i - 1][j - 1] = det;
            dets[j - 1][i - 1] = det;
        }
    }
    Ok(EntanglementReport {
        n_modes: n,
        per_mode_entropy,
        schmidt_mode: 1,
        schmidt_parameter: cm.block(1, 1)?.determinant().sqrt(),
        pairwise_logneg: logneg,
        pairwise_detblocks: dets,
        unit,
    })
}
