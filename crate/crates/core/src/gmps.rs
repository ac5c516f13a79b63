//! Parameter-counting lower bounds on the number of EPR bonds per site of a
//! Gaussian matrix product state.
//!
//! A chain of N building blocks, each a pure `(2M+1)`-mode state, carries
//! `N·(2M+1)(2M)/2` parameters; it can only reach every target state if that
//! is at least the target's parameter count. All bounds are evaluated by
//! exact integer search on these inequalities.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of(n: u64) -> Self {
        if n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Odd => "odd",
            Parity::Even => "even",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BondAnalysis {
    pub n_modes: u64,
    pub theta: u64,
    pub min_bonds_general: u64,
    pub min_bonds_invariant: u64,
    pub parity: Parity,
    /// `min_bonds_general / √N`
    pub scaling: f64,
}

/// Smallest `M >= 1` with `need(M) >= target`; `need` must be increasing.
fn smallest_bonds(target: u64, need: impl Fn(u64) -> u64) -> u64 {
    // need(hi) >= hi >= target for the quadratics used here
    let (mut lo, mut hi) = (1, target.max(1));
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if need(mid) >= target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Smallest `M >= 1` with `2M(2M+1) >= N - 1`: general pure states with
/// `N(N-1)/2` parameters.
pub fn min_bonds_general(n_modes: u64) -> u64 {
    smallest_bonds(n_modes.saturating_sub(1), |m| 2 * m * (2 * m + 1))
}

/// `Θ_N = (N - N mod 2) / 2`, the number of independent pairwise
/// correlations of a translationally invariant ring.
pub fn theta(n_modes: u64) -> u64 {
    (n_modes - n_modes % 2) / 2
}

/// Smallest `M >= 1` with `M(2M+1) >= Θ_N`: translationally invariant rings.
pub fn min_bonds_invariant(n_modes: u64) -> u64 {
    smallest_bonds(theta(n_modes), |m| m * (2 * m + 1))
}

pub fn analyze(n_modes: u64) -> BondAnalysis {
    let general = min_bonds_general(n_modes);
    BondAnalysis {
        n_modes,
        theta: theta(n_modes),
        min_bonds_general: general,
        min_bonds_invariant: min_bonds_invariant(n_modes),
        parity: Parity::of(n_modes),
        scaling: general as f64 / (n_modes as f64).sqrt(),
    }
}

pub const MAX_TABLE_MODES: u64 = 1_000_000;

/// Bond analysis for every `N` in `n_min..=n_max`.
pub fn parity_table(n_min: u64, n_max: u64) -> Result<Vec<BondAnalysis>> {
    if n_min < 2 || n_min > n_max || n_max > MAX_TABLE_MODES {
        return Err(Error::InvalidRange { min: n_min as usize, max: n_max as usize });
    }
    Ok((n_min..=n_max).map(analyze).collect())
}
