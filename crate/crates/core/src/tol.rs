//! Numerical tolerances shared across the crate.

/// Tolerance set used by every validation and criterion in the crate.
///
/// Defaults target dense double-precision problems of dimension up to a few
/// hundred. Every field can be overridden individually (the CLI exposes them
/// as `--tol-<name>` flags and model files as a `"tolerances"` object).
#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    /// Unitarity: ‖U*U − I‖_HS ≤ tol_unit.
    pub tol_unit: f64,
    /// Hermiticity, relative: ‖A − A*‖_HS ≤ tol_herm·‖A‖_HS.
    pub tol_herm: f64,
    /// Positive semi-definiteness: eigenvalues ≥ −tol_psd.
    pub tol_psd: f64,
    /// Numerical rank: directions with residual ≤ tol_rank are discarded.
    pub tol_rank: f64,
    /// Reconstruction residuals (eigendecompositions, square roots, dual
    /// formula agreement).
    pub tol_recon: f64,
    /// Eigenvalue clustering radius (single linkage, angular for unitaries).
    pub tol_cluster: f64,
    /// Completeness: ‖Σ_i Π_i − I‖_HS ≤ tol_sum, and probability sums.
    pub tol_sum: f64,
    /// Unit trace of density matrices.
    pub tol_trace: f64,
    /// Fixed-point residual ‖Φ(ρ) − ρ‖_HS of stationary densities.
    pub tol_fix: f64,
    /// Reversibility discrepancy bound (absolute; probabilities are ≤ 1).
    pub tol_rev: f64,
    /// Subspace membership and witness re-verification checks.
    pub tol_membership: f64,
    /// Outcome probabilities at or below this are the zero-probability
    /// branch of the PIFS; exact zeros appear as ~1e−17 noise in floats.
    pub zero_prob_threshold: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol_unit: 1e-10,
            tol_herm: 1e-10,
            tol_psd: 1e-10,
            tol_rank: 1e-9,
            tol_recon: 1e-9,
            tol_cluster: 1e-8,
            tol_sum: 1e-10,
            tol_trace: 1e-10,
            tol_fix: 1e-10,
            tol_rev: 1e-10,
            tol_membership: 1e-8,
            zero_prob_threshold: 1e-12,
        }
    }
}

impl Tolerances {
    /// Set a tolerance by its field name. Returns `false` for unknown names.
    pub fn set_by_name(&mut self, name: &str, value: f64) -> bool {
        match name {
            "tol_unit" => self.tol_unit = value,
            "tol_herm" => self.tol_herm = value,
            "tol_psd" => self.tol_psd = value,
            "tol_rank" => self.tol_rank = value,
            "tol_recon" => self.tol_recon = value,
            "tol_cluster" => self.tol_cluster = value,
            "tol_sum" => self.tol_sum = value,
            "tol_trace" => self.tol_trace = value,
            "tol_fix" => self.tol_fix = value,
            "tol_rev" => self.tol_rev = value,
            "tol_membership" => self.tol_membership = value,
            "zero_prob_threshold" => self.zero_prob_threshold = value,
            _ => return false,
        }
        true
    }

    /// All `(name, value)` pairs, in declaration order.
    pub fn entries(&self) -> [(&'static str, f64); 12] {
        [
            ("tol_unit", self.tol_unit),
            ("tol_herm", self.tol_herm),
            ("tol_psd", self.tol_psd),
            ("tol_rank", self.tol_rank),
            ("tol_recon", self.tol_recon),
            ("tol_cluster", self.tol_cluster),
            ("tol_sum", self.tol_sum),
            ("tol_trace", self.tol_trace),
            ("tol_fix", self.tol_fix),
            ("tol_rev", self.tol_rev),
            ("tol_membership", self.tol_membership),
            ("zero_prob_threshold", self.zero_prob_threshold),
        ]
    }
}
