//! Audit outcome types shared across checks.

use alloc::string::String;
use alloc::vec::Vec;

use crate::space::Point;

/// The sampled configuration achieving a report's worst residual.
/// Re-evaluating the corresponding residual function on these points
/// reproduces `worst_residual`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    /// Which residual family produced this witness (one check can audit
    /// several inequalities, e.g. the metric axioms).
    pub label: String,
    pub points: Vec<Point>,
    /// Blend weight, for checks sampling a `t`.
    pub t: Option<f64>,
}

/// Result of a sampling audit of one inequality. Residuals are oriented as
/// `rhs - lhs`, so negative means violation.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolationReport {
    pub check: String,
    pub checked: usize,
    /// Most negative residual seen.
    pub worst_residual: f64,
    /// Largest residual seen; strictness witnesses live here.
    pub max_residual: f64,
    pub passed: bool,
    pub witness: Option<Witness>,
}

impl ViolationReport {
    pub(crate) fn collect<I>(check: &str, tol: f64, samples: I) -> Self
    where
        I: IntoIterator<Item = (f64, Witness)>,
    {
        let mut report = ViolationReport {
            check: check.into(),
            checked: 0,
            worst_residual: f64::INFINITY,
            max_residual: f64::NEG_INFINITY,
            passed: true,
            witness: None,
        };
        for (residual, witness) in samples {
            report.checked += 1;
            if residual > report.max_residual {
                report.max_residual = residual;
            }
            if residual < report.worst_residual {
                report.worst_residual = residual;
                report.witness = Some(witness);
            }
        }
        report.passed = report.checked == 0 || report.worst_residual >= -tol;
        report
    }
}
