//! Linear-optics preparation of generic-entangled pure Gaussian states.
//!
//! Starting from N vacua:
//!
//! 1. squeeze mode 1 by `s` and mode 2 by `1/s`, then mix them on a 50:50
//!    beam splitter, giving a two-mode squeezed state;
//! 2. for each further mode `i = 3..N`, squeeze it by `rᵢ` and couple it to
//!    modes `j = 2..i-1` (ascending) with beam splitters of transmittivity
//!    `b_{j,i}`;
//! 3. squeeze every mode locally so its 2×2 block becomes proportional to
//!    the identity. These last squeezings are fixed by the state and carry
//!    no freedom.
//!
//! The free data is `1 + (N-2) + (N-1)(N-2)/2 = N(N-1)/2` real numbers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symplectic::{beam_splitter, squeezer, CovarianceMatrix, SymplecticMatrix};

/// Transmittivities this close to 0 or 1 draw a warning.
pub const DEGENERACY_MARGIN: f64 = 1e-3;

/// Number of local-unitary invariant parameters, `N(N-1)/2`.
pub fn parameter_count(n_modes: usize) -> usize {
    n_modes * n_modes.saturating_sub(1) / 2
}

/// One beam splitter of the recipe, coupling the earlier mode `j` to the
/// newly added mode `i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub j: usize,
    pub i: usize,
    pub t: f64,
}

/// Preparation parameters; serializes to the recipe JSON format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recipe {
    pub n_modes: usize,
    /// Seed squeezing of the mode-1/mode-2 pair.
    pub s: f64,
    /// Squeezings `rᵢ` keyed by mode index `i = 3..N`.
    #[serde(default)]
    pub r: BTreeMap<usize, f64>,
    /// Beam splitters, in any order; each pair `2 <= j < i <= N` exactly once.
    #[serde(default)]
    pub b: Vec<Coupling>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    TooFewModes(usize),
    SeedSqueezing(f64),
    MissingSqueezing(usize),
    UnexpectedSqueezing(usize),
    Squeezing { mode: usize, value: f64 },
    MissingPair(usize, usize),
    DuplicatePair(usize, usize),
    InvalidPair(usize, usize),
    Transmittivity { j: usize, i: usize, t: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooFewModes(n) => write!(f, "n_modes = {n}, need at least 2"),
            Violation::SeedSqueezing(s) => write!(f, "seed squeezing s = {s} must be positive"),
            Violation::MissingSqueezing(i) => write!(f, "missing squeezing r for mode {i}"),
            Violation::UnexpectedSqueezing(i) => write!(f, "unexpected squeezing r for mode {i} (valid modes are 3..N)"),
            Violation::Squeezing { mode, value } => write!(f, "squeezing r{mode} = {value} must be positive"),
            Violation::MissingPair(j, i) => write!(f, "missing pair ({j},{i})"),
            Violation::DuplicatePair(j, i) => write!(f, "duplicate pair ({j},{i})"),
            Violation::InvalidPair(j, i) => write!(f, "invalid pair ({j},{i}): need 2 <= j < i <= N"),
            Violation::Transmittivity { j, i, t } => write!(f, "transmittivity of pair ({j},{i}) is {t}, must lie in (0,1)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// The link degenerates toward a product across the pair.
    NearlyDegenerate { j: usize, i: usize, t: f64 },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::NearlyDegenerate { j, i, t } => {
                write!(f, "transmittivity of pair ({j},{i}) is {t}, close to a degenerate splitter")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RecipeCheck {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

impl RecipeCheck {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn positive(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

impl Recipe {
    /// Every pair `(j, i)` with `2 <= j < i <= n`, in application order.
    pub fn coupling_pairs(n_modes: usize) -> impl Iterator<Item = (usize, usize)> {
        (3..=n_modes).flat_map(|i| (2..i).map(move |j| (j, i)))
    }

    pub fn validate(&self) -> RecipeCheck {
        let mut check = RecipeCheck::default();
        let n = self.n_modes;
        if n < 2 {
            check.violations.push(Violation::TooFewModes(n));
        }
        if !positive(self.s) {
            check.violations.push(Violation::SeedSqueezing(self.s));
        }
        for i in 3..=n {
            if !self.r.contains_key(&i) {
                check.violations.push(Violation::MissingSqueezing(i));
            }
        }
        for (&mode, &value) in &self.r {
            if mode < 3 || mode > n {
                check.violations.push(Violation::UnexpectedSqueezing(mode));
            } else if !positive(value) {
                check.violations.push(Violation::Squeezing { mode, value });
            }
        }

        let mut seen = BTreeSet::new();
        for c in &self.b {
            if c.j < 2 || c.j >= c.i || c.i > n {
                check.violations.push(Violation::InvalidPair(c.j, c.i));
                continue;
            }
            if !seen.insert((c.j, c.i)) {
                check.violations.push(Violation::DuplicatePair(c.j, c.i));
                continue;
            }
            if !(c.t > 0.0 && c.t < 1.0) {
                check.violations.push(Violation::Transmittivity { j: c.j, i: c.i, t: c.t });
            } else if c.t < DEGENERACY_MARGIN || c.t > 1.0 - DEGENERACY_MARGIN {
                check.warnings.push(Warning::NearlyDegenerate { j: c.j, i: c.i, t: c.t });
            }
        }
        for (j, i) in Self::coupling_pairs(n) {
            if !seen.contains(&(j, i)) {
                check.violations.push(Violation::MissingPair(j, i));
            }
        }
        check
    }

    /// Free parameters in canonical order: `s`, then `r₃..r_N`, then the
    /// transmittivities in application order. Requires a valid recipe.
    pub fn parameters(&self) -> Vec<f64> {
        let mut out = vec![self.s];
        out.extend((3..=self.n_modes).filter_map(|i| self.r.get(&i).copied()));
        for (j, i) in Self::coupling_pairs(self.n_modes) {
            if let Some(c) = self.b.iter().find(|c| c.j == j && c.i == i) {
                out.push(c.t);
            }
        }
        out
    }

    /// Inverse of [`Recipe::parameters`]; fails unless exactly
    /// `N(N-1)/2` values are given.
    pub fn from_parameters(n_modes: usize, params: &[f64]) -> Result<Self> {
        if n_modes < 2 {
            return Err(Error::TooFewModes { min: 2, got: n_modes });
        }
        if params.len() != parameter_count(n_modes) {
            return Err(Error::DimensionMismatch { expected: parameter_count(n_modes), got: params.len() });
        }
        let (r, b) = params[1..].split_at(n_modes - 2);
        Ok(Recipe {
            n_modes,
            s: params[0],
            r: (3..=n_modes).zip(r.iter().copied()).collect(),
            b: Self::coupling_pairs(n_modes).zip(b).map(|((j, i), &t)| Coupling { j, i, t }).collect(),
        })
    }

    fn transmittivity(&self, j: usize, i: usize) -> f64 {
        self.b.iter().find(|c| c.j == j && c.i == i).map(|c| c.t).unwrap_or(f64::NAN)
    }
}

/// One primitive applied by the preparation pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Step {
    Squeeze { mode: usize, amount: f64, free: bool },
    BeamSplitter { i: usize, j: usize, t: f64, free: bool },
    /// Final local squeezing, fixed by the state.
    Balance { mode: usize, amount: f64 },
}

impl Step {
    pub fn is_free(&self) -> bool {
        match *self {
            Step::Squeeze { free, .. } | Step::BeamSplitter { free, .. } => free,
            Step::Balance { .. } => false,
        }
    }
}

/// Output state together with the primitives that produced it.
#[derive(Debug, Clone)]
pub struct Engineered {
    pub cm: CovarianceMatrix,
    pub steps: Vec<Step>,
}

impl Engineered {
    /// Real degrees of freedom consumed by the pipeline.
    pub fn free_parameters(&self) -> usize {
        self.steps.iter().filter(|s| s.is_free()).count()
    }
}

struct Builder {
    n: usize,
    cm: CovarianceMatrix,
    steps: Vec<Step>,
}

impl Builder {
    fn apply(&mut self, s: SymplecticMatrix, step: Step) -> Result<()> {
        self.cm = self.cm.transform(&s)?;
        self.steps.push(step);
        Ok(())
    }

    fn squeeze(&mut self, mode: usize, amount: f64, free: bool) -> Result<()> {
        self.apply(squeezer(self.n, mode, amount)?, Step::Squeeze { mode, amount, free })
    }

    fn split(&mut self, i: usize, j: usize, t: f64, free: bool) -> Result<()> {
        self.apply(beam_splitter(self.n, i, j, t)?, Step::BeamSplitter { i, j, t, free })
    }

    fn balance(&mut self, mode: usize) -> Result<()> {
        let block = self.cm.block(mode, mode)?;
        let amount = (block[(1, 1)] / block[(0, 0)]).powf(0.25);
        self.apply(squeezer(self.n, mode, amount)?, Step::Balance { mode, amount })
    }
}

/// Runs the preparation pipeline and records every primitive applied.
pub fn engineer(recipe: &Recipe) -> Result<Engineered> {
    let check = recipe.validate();
    if !check.is_ok() {
        return Err(Error::InvalidRecipe(check.violations));
    }
    let n = recipe.n_modes;
    let mut b = Builder { n, cm: CovarianceMatrix::vacuum(n)?, steps: Vec::new() };

    b.squeeze(1, recipe.s, true)?;
    b.squeeze(2, 1.0 / recipe.s, false)?;
    b.split(1, 2, 0.5, false)?;

    for i in 3..=n {
        b.squeeze(i, recipe.r[&i], true)?;
        for j in 2..i {
            b.split(j, i, recipe.transmittivity(j, i), true)?;
        }
    }
    for k in 1..=n {
        b.balance(k)?;
    }
    Ok(Engineered { cm: b.cm, steps: b.steps })
}

/// Covariance matrix prepared by `recipe`.
pub fn engineer_state(recipe: &Recipe) -> Result<CovarianceMatrix> {
    engineer(recipe).map(|e| e.cm)
}

/// Deterministic random recipe: squeezings log-uniform in `[1/s_max, s_max]`,
/// transmittivities uniform in `[0.05, 0.95]`.
pub fn random_recipe(n_modes: usize, seed: u64, s_max: f64) -> Result<Recipe> {
    if n_modes < 2 {
        return Err(Error::TooFewModes { min: 2, got: n_modes });
    }
    if !(s_max.is_finite() && s_max > 1.0) {
        return Err(Error::InvalidSqueezingRange(s_max));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ln_max = s_max.ln();
    let mut squeeze = || rng.random_range(-ln_max..=ln_max).exp();
    let s = squeeze();
    let r = (3..=n_modes).map(|i| (i, squeeze())).collect();
    let b = Recipe::coupling_pairs(n_modes)
        .map(|(j, i)| Coupling { j, i, t: rng.random_range(0.05..=0.95) })
        .collect();
    Ok(Recipe { n_modes, s, r, b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use nalgebra::DMatrix;

    fn three_mode() -> Recipe {
        Recipe {
            n_modes: 3,
            s: 1.5,
            r: BTreeMap::from([(3, 1.2)]),
            b: vec![Coupling { j: 2, i: 3, t: 0.6 }],
        }
    }

    #[test]
    fn counts() {
        assert_eq!(parameter_count(1), 0);
        assert_eq!(parameter_count(2), 1);
        assert_eq!(parameter_count(4), 6);
        assert_eq!(parameter_count(5), 10);
    }

    #[test]
    fn valid_three_mode_recipe() {
        let check = three_mode().validate();
        assert!(check.is_ok());
        assert!(check.warnings.is_empty());
    }

    #[test]
    fn missing_pair_reported() {
        let mut r = three_mode();
        r.b.clear();
        let check = r.validate();
        assert_eq!(check.violations, vec![Violation::MissingPair(2, 3)]);
        assert_eq!(check.violations[0].to_string(), "missing pair (2,3)");
        assert!(matches!(engineer_state(&r), Err(Error::InvalidRecipe(_))));
    }

    #[test]
    fn nearly_degenerate_is_warning_only() {
        let mut r = three_mode();
        r.b[0].t = 0.9999;
        let check = r.validate();
        assert!(check.is_ok());
        assert_eq!(check.warnings.len(), 1);
        assert!(engineer_state(&r).is_ok());
    }

    #[test]
    fn structural_violations() {
        let mut r = three_mode();
        r.b.push(Coupling { j: 2, i: 3, t: 0.3 });
        r.b.push(Coupling { j: 1, i: 3, t: 0.3 });
        r.r.insert(4, 2.0);
        r.s = -1.0;
        let v = r.validate().violations;
        assert!(v.contains(&Violation::DuplicatePair(2, 3)));
        assert!(v.contains(&Violation::InvalidPair(1, 3)));
        assert!(v.contains(&Violation::UnexpectedSqueezing(4)));
        assert!(v.contains(&Violation::SeedSqueezing(-1.0)));

        let mut r = three_mode();
        r.b[0].t = 1.0;
        r.r.insert(3, 0.0);
        let v = r.validate().violations;
        assert!(v.contains(&Violation::Transmittivity { j: 2, i: 3, t: 1.0 }));
        assert!(v.contains(&Violation::Squeezing { mode: 3, value: 0.0 }));

        let one = Recipe { n_modes: 1, s: 1.0, r: BTreeMap::new(), b: vec![] };
        assert_eq!(one.validate().violations, vec![Violation::TooFewModes(1)]);
    }

    #[test]
    fn two_mode_squeezed_output() {
        let r = Recipe { n_modes: 2, s: 2f64.sqrt(), r: BTreeMap::new(), b: vec![] };
        let cm = engineer_state(&r).unwrap();
        #[rustfmt::skip]
        let expected = DMatrix::from_row_slice(4, 4, &[
            1.25, 0.0, 0.75, 0.0,
            0.0, 1.25, 0.0, -0.75,
            0.75, 0.0, 1.25, 0.0,
            0.0, -0.75, 0.0, 1.25,
        ]);
        assert!(max_abs_diff(cm.data(), &expected) < 1e-14);
    }

    #[test]
    fn three_mode_output_is_pure() {
        let cm = engineer_state(&three_mode()).unwrap();
        let p = cm.purity();
        assert!(p.pure);
        assert!(p.residual <= 1e-9);
    }

    #[test]
    fn no_qp_cross_covariances() {
        for seed in 0..20 {
            let cm = engineer_state(&random_recipe(6, seed, 4.0).unwrap()).unwrap();
            let d = cm.data();
            for r in 0..12 {
                for c in 0..12 {
                    if r % 2 != c % 2 {
                        assert!(d[(r, c)].abs() <= 1e-12, "seed {seed} ({r},{c}) = {}", d[(r, c)]);
                    }
                }
            }
        }
    }

    #[test]
    fn balanced_blocks() {
        let cm = engineer_state(&random_recipe(5, 3, 4.0).unwrap()).unwrap();
        for k in 1..=5 {
            let b = cm.block(k, k).unwrap();
            assert!((b[(0, 0)] - b[(1, 1)]).abs() < 1e-12 * b[(0, 0)]);
            assert_eq!(b[(0, 1)], 0.0);
            assert!(b[(0, 0)] >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn audit_counts_free_parameters() {
        for n in 2..=9 {
            let e = engineer(&random_recipe(n, n as u64, 3.0).unwrap()).unwrap();
            assert_eq!(e.free_parameters(), parameter_count(n));
        }
    }

    #[test]
    fn random_recipe_is_deterministic() {
        let a = random_recipe(5, 42, 4.0).unwrap();
        assert_eq!(a, random_recipe(5, 42, 4.0).unwrap());
        assert_ne!(a, random_recipe(5, 43, 4.0).unwrap());
        assert_eq!(a.parameters().len(), 10);
        assert!(a.validate().is_ok());
        assert!(a.r.values().chain([&a.s]).all(|&x| (0.25..=4.0).contains(&x)));
        assert!(a.b.iter().all(|c| (0.05..=0.95).contains(&c.t)));
    }

    #[test]
    fn random_recipe_rejects_bad_range() {
        assert_eq!(random_recipe(3, 0, 1.0), Err(Error::InvalidSqueezingRange(1.0)));
        assert!(random_recipe(1, 0, 2.0).is_err());
    }

    #[test]
    fn parameters_round_trip() {
        let r = random_recipe(6, 9, 2.0).unwrap();
        let p = r.parameters();
        assert_eq!(Recipe::from_parameters(6, &p).unwrap(), r);
        assert!(Recipe::from_parameters(6, &p[1..]).is_err());
    }

    #[test]
    fn unit_limit_decouples_added_modes() {
        let n = 5;
        let mut r = random_recipe(n, 1, 3.0).unwrap();
        r.r.values_mut().for_each(|x| *x = 1.0);
        r.b.iter_mut().for_each(|c| c.t = 1.0 - 1e-6);
        let cm = engineer_state(&r).unwrap();
        for k in 3..=n {
            let det = cm.block(k, k).unwrap().determinant();
            assert!((det - 1.0).abs() < 1e-3, "mode {k}: det {det}");
        }
    }

    #[test]
    fn recipe_json_shape() {
        let json = r#"{"n_modes": 3, "s": 1.5, "r": {"3": 1.2}, "b": [{"j": 2, "i": 3, "t": 0.6}]}"#;
        let r: Recipe = serde_json::from_str(json).unwrap();
        assert_eq!(r, three_mode());
    }
}
