//! Numerical slack used wherever an exact-real equality has to be decided in
//! floating point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerances. Probabilities live in `[0, 1]`, so no relative
/// tolerance is ever used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Slack on probability equalities such as `p(x, A) + p(x, y) = 1`.
    pub tol_eq: f64,
    /// Largest similarity still counted as orthogonal.
    pub tol_orth: f64,
    /// Threshold below which `p(x, X)` (and hence ρ) is treated as zero.
    pub rho_floor: f64,
    /// Eigenvalues closer than this are merged into one eigenspace.
    pub tol_eig: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol_eq: 1e-9,
            tol_orth: 1e-9,
            rho_floor: 1e-12,
            tol_eig: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn new(tol_eq: f64, tol_orth: f64, rho_floor: f64, tol_eig: f64) -> Result<Self> {
        let t = Self {
            tol_eq,
            tol_orth,
            rho_floor,
            tol_eig,
        };
        t.validate()?;
        Ok(t)
    }

    /// Every field must lie in `(0, 1e-3)`.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tol_eq", self.tol_eq),
            ("tol_orth", self.tol_orth),
            ("rho_floor", self.rho_floor),
            ("tol_eig", self.tol_eig),
        ] {
            if !(v > 0.0 && v < 1e-3) {
                return Err(Error::InvalidTolerances(format!("{name} = {v} must lie in (0, 1e-3)")));
            }
        }
        Ok(())
    }

    /// Sets both probability slacks (`tol_eq` and `tol_orth`) to `tol`.
    pub fn with_probability_slack(self, tol: f64) -> Result<Self> {
        let t = Self {
            tol_eq: tol,
            tol_orth: tol,
            ..self
        };
        t.validate()?;
        Ok(t)
    }
}
