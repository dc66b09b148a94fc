use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_EQ_TOL: f64 = 1e-9;
pub const DEFAULT_RANK_TOL_FACTOR: f64 = 1.0;

/// Thresholds shared by every numerical predicate in the crate.
///
/// `rank_tol_factor` scales the rank cutoff `sigma_max * max(m, n) * eps`;
/// `eq_tol` is the relative Frobenius threshold used by [`crate::approx_eq`]
/// and by every residual-based verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rank_tol_factor: f64,
    pub eq_tol: f64,
}

impl Tolerance {
    pub fn new(rank_tol_factor: f64, eq_tol: f64) -> Result<Self> {
        let t = Tolerance {
            rank_tol_factor,
            eq_tol,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn with_eq_tol(eq_tol: f64) -> Result<Self> {
        Self::new(DEFAULT_RANK_TOL_FACTOR, eq_tol)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rank_tol_factor.is_finite() && self.rank_tol_factor > 0.0) {
            return Err(Error::InvalidTolerance(format!(
                "rank_tol_factor must be positive, got {}",
                self.rank_tol_factor
            )));
        }
        if !(self.eq_tol.is_finite() && self.eq_tol >= f64::EPSILON) {
            return Err(Error::InvalidTolerance(format!(
                "eq_tol must be at least machine epsilon, got {}",
                self.eq_tol
            )));
        }
        Ok(())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rank_tol_factor: DEFAULT_RANK_TOL_FACTOR,
            eq_tol: DEFAULT_EQ_TOL,
        }
    }
}
