use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Numerical tolerances shared across the crate.
///
/// All zero-comparisons (symmetry, positive semidefiniteness, gap
/// inequalities) go through these knobs; exact integer arithmetic is not
/// attempted anywhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative symmetry tolerance for matrix validation.
    pub sym_tol: f64,
    /// Eigenvalue slack for positive semidefiniteness tests.
    pub psd_tol: f64,
    /// Slack used when comparing inner products against gap values.
    pub gap_tol: f64,
    /// Number of standard errors allowed in Monte Carlo comparisons.
    pub mc_sigmas: f64,
}

#[derive(Debug, Error)]
pub enum ToleranceError {
    #[error("tolerance `{0}` must be strictly positive, got {1}")]
    NotPositive(&'static str, f64),
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            sym_tol: 1e-12,
            psd_tol: 1e-9,
            gap_tol: 1e-9,
            mc_sigmas: 4.0,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<(), ToleranceError> {
        let fields = [
            ("sym_tol", self.sym_tol),
            ("psd_tol", self.psd_tol),
            ("gap_tol", self.gap_tol),
            ("mc_sigmas", self.mc_sigmas),
        ];
        for (name, value) in fields {
            if !(value > 0.0) {
                return Err(ToleranceError::NotPositive(name, value));
            }
        }
        Ok(())
    }
}
