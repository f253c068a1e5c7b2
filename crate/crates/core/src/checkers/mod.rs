//! One checker per bound. Each evaluates both sides from scratch and returns a
//! [`BoundReport`]; hypotheses that fail are errors, never silent passes.

mod additive;
mod angles;
mod basis;
mod dimension;
mod report;

pub use additive::{check_additive_svd_transfer, check_matrix_additive};
pub use angles::{check_angle_lower, check_angle_upper, check_combined_theorem6, AngleNorm};
pub use basis::{check_basis_perturbation, check_dominant_basis_perturbation};
pub use dimension::{check_dimension_change, check_error_matrix, check_error_matrix_rank_k, mirsky_gap};
pub use report::{BoundReport, Inequality, ReportContext};

use crate::dense::{singular_values, DenseMatrix};
use crate::error::Result;
use crate::schatten::{schatten_norm, SchattenIndex};

/// Stable identifiers of every checker, in report order.
pub const CHECKER_IDS: [&str; 11] = [
    "thm1", "cor1", "thm2", "cor2", "thm3/4/5", "thm_lc", "thm_lck", "thm_lau", "thm_lal1", "thm_lal2", "thm6",
];

/// `tol = κ · eps · max(1, ‖A‖₂)^d · max(m, n)` with `d = 1` for bounds on
/// norms and `d = 2` for bounds on squared norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceModel {
    pub kappa: f64,
}

impl Default for ToleranceModel {
    fn default() -> Self {
        Self { kappa: Self::DEFAULT_KAPPA }
    }
}

impl ToleranceModel {
    pub const DEFAULT_KAPPA: f64 = 1e3;

    pub fn new(kappa: f64) -> Self {
        Self { kappa }
    }

    pub fn linear(&self, norm2: f64, m: usize, n: usize) -> f64 {
        self.kappa * f64::EPSILON * norm2.max(1.0) * m.max(n).max(1) as f64
    }

    pub fn squared(&self, norm2: f64, m: usize, n: usize) -> f64 {
        let s = norm2.max(1.0);
        self.kappa * f64::EPSILON * s * s * m.max(n).max(1) as f64
    }
}

pub(crate) fn norm(x: &DenseMatrix, p: SchattenIndex) -> Result<f64> {
    schatten_norm(x, p)
}

pub(crate) fn two_norm(x: &DenseMatrix) -> Result<f64> {
    Ok(singular_values(x)?.first().copied().unwrap_or(0.0))
}
