/// Numerical thresholds, in units where the vacuum covariance is the identity.
///
/// Residual tolerances that scale with the state are stated as a base value;
/// the scaling is applied at the point of use (see each field).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Purity test: `|-ΩσΩσ - 1| <= purity * (1 + |σ|²)`.
    pub purity: f64,
    /// Symplectic eigenvalues above `1 + rank` count toward the rank.
    pub rank: f64,
    /// Symplectic eigenvalues may undershoot 1 by this much and still be
    /// accepted (and clamped to 1).
    pub bona_fide: f64,
    /// Residual q-p covariance allowed in the standard form, times `1 + |σ|`.
    pub block: f64,
    /// Williamson diagonal conditions `|(V⁻¹)ᵢᵢ - Vᵢᵢ|`.
    pub williamson: f64,
    /// Accepted asymmetry of input matrices, times `1 + |σ|`.
    pub symmetry: f64,
    /// `|SᵀΩS - Ω| <= symplectic * |S|²`.
    pub symplectic: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            purity: 1e-9,
            rank: 1e-6,
            bona_fide: 1e-6,
            block: 1e-8,
            williamson: 1e-8,
            symmetry: 1e-12,
            symplectic: 1e-10,
        }
    }
}

impl Tolerances {
    /// Multiplies every threshold by `factor`.
    pub fn scaled(self, factor: f64) -> Self {
        Tolerances {
            purity: self.purity * factor,
            rank: self.rank * factor,
            bona_fide: self.bona_fide * factor,
            block: self.block * factor,
            williamson: self.williamson * factor,
            symmetry: self.symmetry * factor,
            symplectic: self.symplectic * factor,
        }
    }
}
