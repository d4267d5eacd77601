//! Decay constants of the three-level ion.

use serde::{Deserialize, Serialize};

use crate::train::QuantumError;

/// Excited-state lifetime used for the default atom, in ns.
pub const DEFAULT_LIFETIME_NS: f64 = 6.924;
/// Default branching probability of the excited state into the dark state.
pub const DEFAULT_P52: f64 = 0.0587;

/// Decay model of the excited state `|2>`.
///
/// `|2>` decays at total rate `gamma_total`; a fraction `p52` of decays ends
/// in the metastable dark state `|3>`, the rest returns to the ground state
/// `|1>`. Repumping of auxiliary levels is folded into these effective rates,
/// so the branch rates are exactly
/// `gamma_pd = p52 * gamma_total` and `gamma_ps = (1 - p52) * gamma_total`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomModel {
    gamma_total: f64,
    p52: f64,
}

impl AtomModel {
    /// Build a model from the total decay rate (1/ns) and dark-state branch
    /// probability. `gamma_total = 0` disables in-train decay while keeping
    /// the branching of a final, complete decay.
    pub fn new(gamma_total: f64, p52: f64) -> Result<Self, QuantumError> {
        if !gamma_total.is_finite() || gamma_total < 0.0 {
            return Err(QuantumError::InvalidParameter(format!(
                "total decay rate must be finite and >= 0, got {gamma_total}"
            )));
        }
        if !p52.is_finite() || p52 <= 0.0 || p52 >= 1.0 {
            return Err(QuantumError::InvalidParameter(format!(
                "dark-state branching must lie in (0, 1), got {p52}"
            )));
        }
        Ok(Self { gamma_total, p52 })
    }

    /// Model with the default lifetime and branching ratio.
    pub fn standard() -> Self {
        Self {
            gamma_total: 1.0 / DEFAULT_LIFETIME_NS,
            p52: DEFAULT_P52,
        }
    }

    /// Same branching as [`AtomModel::standard`] but with decay disabled.
    pub fn without_decay() -> Self {
        Self {
            gamma_total: 0.0,
            p52: DEFAULT_P52,
        }
    }

    /// Total decay rate of `|2>` in 1/ns.
    pub fn gamma_total(&self) -> f64 {
        self.gamma_total
    }

    /// Branch probability into the dark state.
    pub fn p52(&self) -> f64 {
        self.p52
    }

    /// Decay rate `|2> -> |1>` in 1/ns.
    pub fn gamma_ps(&self) -> f64 {
        (1.0 - self.p52) * self.gamma_total
    }

    /// Decay rate `|2> -> |3>` in 1/ns.
    pub fn gamma_pd(&self) -> f64 {
        self.p52 * self.gamma_total
    }
}

impl Default for AtomModel {
    fn default() -> Self {
        Self::standard()
    }
}
