use serde::{Deserialize, Serialize};

/// Numerical thresholds used throughout the analysis.
///
/// `rank` is relative to the largest singular value, `cone` scales with
/// `1 + ||target||`, `eig` scales with `1 + spectral radius`, and `zero` is an
/// absolute bound on column sums and edge weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub rank: f64,
    pub cone: f64,
    pub eig: f64,
    pub zero: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rank: 1e-9, cone: 1e-8, eig: 1e-8, zero: 1e-9 }
    }
}

/// Partial override as found in spec files and on the command line.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cone: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eig: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero: Option<f64>,
}

impl Tolerances {
    pub fn apply(mut self, o: &ToleranceOverrides) -> Self {
        if let Some(v) = o.rank {
            self.rank = v;
        }
        if let Some(v) = o.cone {
            self.cone = v;
        }
        if let Some(v) = o.eig {
            self.eig = v;
        }
        if let Some(v) = o.zero {
            self.zero = v;
        }
        self
    }

    /// Residual bound for invariant-subspace and nilpotency checks on a
    /// matrix of norm `scale`.
    pub fn residual(&self, scale: f64) -> f64 {
        1e3 * self.rank * (1.0 + scale)
    }
}
