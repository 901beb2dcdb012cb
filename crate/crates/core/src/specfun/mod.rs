//! Scalar special functions: Gamma, Mittag-Leffler and Wright.

pub mod gamma;
pub mod mittag_leffler;
pub mod wright;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub use gamma::{gamma, ln_gamma, rgamma};
pub use mittag_leffler::{ml_symbol, mittag_leffler, mittag_leffler_real, MlQuery};
pub use wright::{wright_m, wright_moment, WrightQuery, WrightValue};

/// Requested accuracy for special-function evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Accuracy {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for Accuracy {
    fn default() -> Self {
        Accuracy { abs_tol: 1e-10, rel_tol: 1e-9, max_terms: 2000 }
    }
}

impl Accuracy {
    pub fn new(abs_tol: f64, rel_tol: f64, max_terms: usize) -> Result<Self> {
        let acc = Accuracy { abs_tol, rel_tol, max_terms };
        acc.validate()?;
        Ok(acc)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol < 1.0) {
            return domain(format!("abs_tol must lie in (0,1), got {}", self.abs_tol));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return domain(format!("rel_tol must lie in (0,1), got {}", self.rel_tol));
        }
        if self.max_terms < 16 {
            return domain(format!("max_terms must be at least 16, got {}", self.max_terms));
        }
        Ok(())
    }
}
