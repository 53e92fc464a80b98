use serde::{Deserialize, Serialize};

/// Tolerances shared by every module.
///
/// Structural checks (projector algebra, completeness) use `structural`,
/// values derivable in exact arithmetic use `exact`, truncated Fock spaces
/// must keep their discarded norm below `tail`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericPolicy {
    pub structural: f64,
    pub exact: f64,
    pub tail: f64,
    /// Outcomes below this probability are flagged as zero branches.
    pub zero_branch: f64,
    /// Finite-difference step relative to the parameter scale.
    pub fd_relative_step: f64,
}

impl NumericPolicy {
    pub const DEFAULT: NumericPolicy = NumericPolicy {
        structural: 1e-10,
        exact: 1e-12,
        tail: 1e-8,
        zero_branch: 1e-14,
        fd_relative_step: 1e-3,
    };
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self::DEFAULT
    }
}
