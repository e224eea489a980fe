use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical thresholds shared by all operations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Bound on normalized residuals (reconstruction, symplecticity).
    pub residual_tol: f64,
    /// Relative gap below which two eigenvalues are considered one cluster.
    pub degeneracy_gap: f64,
    /// Slack for positive-semidefiniteness checks.
    pub psd_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            residual_tol: 1e-8,
            degeneracy_gap: 1e-6,
            psd_tol: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn new(residual_tol: f64, degeneracy_gap: f64, psd_tol: f64) -> Result<Self> {
        let t = Self {
            residual_tol,
            degeneracy_gap,
            psd_tol,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("residual_tol", self.residual_tol),
            ("degeneracy_gap", self.degeneracy_gap),
            ("psd_tol", self.psd_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidTolerance(format!(
                    "{name} must be finite and strictly positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn with_residual_tol(mut self, v: f64) -> Self {
        self.residual_tol = v;
        self
    }

    pub fn with_degeneracy_gap(mut self, v: f64) -> Self {
        self.degeneracy_gap = v;
        self
    }

    pub fn with_psd_tol(mut self, v: f64) -> Self {
        self.psd_tol = v;
        self
    }
}
