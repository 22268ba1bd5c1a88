use std::time::Duration;

use ahnls::weyl::CoverPoint;
use ahnls::Complex64;

use crate::config::Suite;

/// One checked instance of an invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseRow {
    pub case_id: usize,
    pub invariant: &'static str,
    pub q: Option<CoverPoint>,
    pub p: Option<CoverPoint>,
    pub value: Complex64,
    pub predicted: Complex64,
    pub abs_error: f64,
    pub rel_error: f64,
    pub budget: f64,
    pub pass: bool,
    pub detail: String,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

impl CaseRow {
    /// Passes when `|value - predicted| ≤ budget`.
    pub fn compare(invariant: &'static str, value: Complex64, predicted: Complex64, budget: f64) -> Self {
        let abs_error = (value - predicted).norm();
        let rel_error = if predicted.norm() > 0.0 { abs_error / predicted.norm() } else { abs_error };
        Self {
            case_id: 0,
            invariant,
            q: None,
            p: None,
            value,
            predicted,
            abs_error,
            rel_error,
            budget,
            pass: abs_error <= budget,
            detail: String::new(),
        }
    }

    /// Passes when the nonnegative `residual` is at most `budget`.
    pub fn bound(invariant: &'static str, residual: f64, budget: f64) -> Self {
        Self::compare(invariant, Complex64::new(residual, 0.0), ZERO, budget)
    }

    /// Passes when `value < bound` strictly; the recorded error is the excess.
    pub fn below(invariant: &'static str, value: f64, bound: f64) -> Self {
        let mut row = Self::compare(invariant, Complex64::new(value, 0.0), Complex64::new(bound, 0.0), 0.0);
        row.abs_error = (value - bound).max(0.0);
        row.rel_error = if bound != 0.0 { row.abs_error / bound.abs() } else { row.abs_error };
        row.pass = value < bound;
        row
    }

    /// Passes when `value ≥ bound`; the recorded error is the shortfall.
    pub fn at_least(invariant: &'static str, value: f64, bound: f64) -> Self {
        let mut row = Self::compare(invariant, Complex64::new(value, 0.0), Complex64::new(bound, 0.0), 0.0);
        row.abs_error = (bound - value).max(0.0);
        row.rel_error = if bound != 0.0 { row.abs_error / bound.abs() } else { row.abs_error };
        row.pass = value >= bound;
        row
    }

    /// A case whose computation failed.
    pub fn failed(invariant: &'static str, error: impl std::fmt::Display) -> Self {
        Self {
            case_id: 0,
            invariant,
            q: None,
            p: None,
            value: ZERO,
            predicted: ZERO,
            abs_error: f64::INFINITY,
            rel_error: f64::INFINITY,
            budget: 0.0,
            pass: false,
            detail: error.to_string(),
        }
    }

    pub fn points(mut self, q: Option<CoverPoint>, p: Option<CoverPoint>) -> Self {
        self.q = q;
        self.p = p;
        self
    }

    pub fn detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

/// Builds a row from a fallible computation, recording failures as failing rows.
pub fn row_or_failure(invariant: &'static str, r: ahnls::Result<CaseRow>) -> CaseRow {
    r.unwrap_or_else(|e| CaseRow::failed(invariant, e))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub potential_id: String,
    pub cases: usize,
    pub passes: usize,
    pub max_abs_residual: f64,
    pub max_rel_residual: f64,
    /// Not written to any output file.
    pub wall_time: Duration,
    pub rows: Vec<CaseRow>,
}

impl SuiteReport {
    pub fn new(suite: Suite, potential_id: String, mut rows: Vec<CaseRow>, wall_time: Duration) -> Self {
        for (i, row) in rows.iter_mut().enumerate() {
            row.case_id = i;
        }
        let finite_max = |f: fn(&CaseRow) -> f64| rows.iter().map(f).filter(|v| v.is_finite()).fold(0.0_f64, f64::max);
        Self {
            suite,
            potential_id,
            cases: rows.len(),
            passes: rows.iter().filter(|r| r.pass).count(),
            max_abs_residual: finite_max(|r| r.abs_error),
            max_rel_residual: finite_max(|r| r.rel_error),
            wall_time,
            rows,
        }
    }

    pub fn passed(&self) -> bool {
        self.passes == self.cases
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseRow> {
        self.rows.iter().filter(|r| !r.pass)
    }
}
