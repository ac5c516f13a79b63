//! Pure multimode Gaussian states with generic entanglement.
//!
//! * [`symplectic`]: covariance matrices, Gaussian unitaries, Williamson
//!   spectra and purity.
//! * [`engineering`]: prepares states from `N(N-1)/2` squeezing and
//!   beam-splitter parameters.
//! * [`standard_form`]: the `V_Q ⊕ V_Q⁻¹` form, its two-point correlations,
//!   reconstruction from them, and ground states of harmonic lattices.
//! * [`entanglement`]: entropies and pairwise logarithmic negativity.
//! * [`gmps`]: bond-number bounds for Gaussian matrix product states.
//! * [`io`]: JSON and CSV exchange formats.

pub mod engineering;
pub mod entanglement;
pub mod error;
pub mod gmps;
pub mod io;
pub mod linalg;
pub mod standard_form;
pub mod symplectic;
pub mod tolerance;

pub use engineering::{engineer, engineer_state, parameter_count, random_recipe, Recipe};
pub use entanglement::{full_report, EntanglementReport};
pub use error::{Error, Result};
pub use standard_form::{reconstruct_diagonal, to_standard_form, StandardForm};
pub use symplectic::{beam_splitter, squeezer, symplectic_form, CovarianceMatrix, SymplecticMatrix, SymplecticSpectrum};
pub use tolerance::Tolerances;
