//! Inequality verification records.

use std::fmt;

/// How much weight a report carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    /// Both sides come from exact or certified quantities; a failure is a
    /// genuine violation.
    Certified,
    /// One side is a sampled or heuristic estimate; failures are logged only.
    Advisory,
    /// Probes an unproven statement; never counts as a failure.
    Exploratory,
    /// Preconditions of the statement do not hold for this instance.
    NotApplicable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    LessEq,
    Equal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub lhs: f64,
    pub rhs: f64,
    /// rhs − lhs (for `Equal`, −|rhs − lhs|).
    pub slack: f64,
    pub passed: bool,
    pub relation: Relation,
    pub status: CheckStatus,
    pub abs_tol: f64,
    pub context: String,
}

impl CheckReport {
    /// lhs ≤ rhs within `abs_tol`; an infinite rhs passes.
    pub fn less_eq(context: impl Into<String>, lhs: f64, rhs: f64, abs_tol: f64, status: CheckStatus) -> Self {
        let slack = if rhs == f64::INFINITY && lhs.is_finite() {
            f64::INFINITY
        } else {
            rhs - lhs
        };
        let passed = rhs == f64::INFINITY || slack >= -abs_tol;
        CheckReport {
            lhs,
            rhs,
            slack,
            passed,
            relation: Relation::LessEq,
            status,
            abs_tol,
            context: context.into(),
        }
    }

    /// |lhs − rhs| ≤ abs_tol; two infinities count as equal.
    pub fn equal(context: impl Into<String>, lhs: f64, rhs: f64, abs_tol: f64, status: CheckStatus) -> Self {
        let slack = if lhs == rhs { 0.0 } else { -(rhs - lhs).abs() };
        let passed = slack >= -abs_tol;
        CheckReport {
            lhs,
            rhs,
            slack,
            passed,
            relation: Relation::Equal,
            status,
            abs_tol,
            context: context.into(),
        }
    }

    pub fn not_applicable(context: impl Into<String>) -> Self {
        CheckReport {
            lhs: f64::NAN,
            rhs: f64::NAN,
            slack: f64::NAN,
            passed: true,
            relation: Relation::LessEq,
            status: CheckStatus::NotApplicable,
            abs_tol: 0.0,
            context: context.into(),
        }
    }

    pub fn with_status(mut self, status: CheckStatus) -> Self {
        self.status = status;
        self
    }

    /// A failed certified check.
    pub fn is_certified_failure(&self) -> bool {
        !self.passed && self.status == CheckStatus::Certified
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = match self.relation {
            Relation::LessEq => "<=",
            Relation::Equal => "==",
        };
        let verdict = match (self.status, self.passed) {
            (CheckStatus::NotApplicable, _) => "n/a",
            (_, true) => "ok",
            (_, false) => "FAIL",
        };
        write!(
            f,
            "[{verdict}] {:?} {}: {:.9} {rel} {:.9} (slack {:.3e}, tol {:.0e})",
            self.status, self.context, self.lhs, self.rhs, self.slack, self.abs_tol
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_band() {
        assert!(CheckReport::less_eq("x", 1.0, 1.0 - 1e-10, 1e-9, CheckStatus::Certified).passed);
        assert!(!CheckReport::less_eq("x", 1.0, 0.9, 1e-9, CheckStatus::Certified).passed);
        assert!(CheckReport::less_eq("x", 5.0, f64::INFINITY, 0.0, CheckStatus::Certified).passed);
        assert!(CheckReport::equal("x", 0.5, 0.5 + 1e-13, 1e-12, CheckStatus::Certified).passed);
    }

    #[test]
    fn advisory_failures_are_not_certified() {
        let r = CheckReport::less_eq("x", 2.0, 1.0, 1e-9, CheckStatus::Advisory);
        assert!(!r.passed);
        assert!(!r.is_certified_failure());
    }
}
