//! Bookkeeping for the acceptance suite: one verdict per criterion, printed as
//! a single PASS/FAIL line.

use std::fmt;
use std::time::Instant;

use lpr_jackknife::harness::summary::fmt_sig6;
use lpr_jackknife::Result;

/// Seed shared by every Monte Carlo criterion. Fixed before any run.
pub const SEED: u64 = 20_240_611;

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {:>2} {tag} {}: {}", self.id, self.title, self.detail)
    }
}

/// One sub-check of a criterion, rendered as `label=value (rule) ok|MISS`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub note: String,
}

impl Check {
    /// `value` lies in `target +- tol`.
    pub fn within(label: &str, value: f64, target: f64, tol: f64) -> Self {
        Self {
            label: label.into(),
            passed: (value - target).abs() <= tol,
            note: format!("{} in {} +- {}", fmt_sig6(value), fmt_sig6(target), fmt_sig6(tol)),
        }
    }

    /// `value <= bound`.
    pub fn at_most(label: &str, value: f64, bound: f64) -> Self {
        Self { label: label.into(), passed: value <= bound, note: format!("{value:.3e} <= {bound:.1e}") }
    }

    pub fn holds(label: &str, passed: bool, note: impl Into<String>) -> Self {
        Self { label: label.into(), passed, note: note.into() }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} [{}]", self.label, self.note, if self.passed { "ok" } else { "MISS" })
    }
}

/// Runs a criterion, folding its checks (or its error) into a verdict.
pub fn judge<F>(id: u8, title: &'static str, body: F) -> Verdict
where
    F: FnOnce() -> Result<Vec<Check>>,
{
    let start = Instant::now();
    match body() {
        Ok(checks) => {
            let passed = !checks.is_empty() && checks.iter().all(|c| c.passed);
            let parts: Vec<String> = checks.iter().map(Check::to_string).collect();
            let detail = format!("{}; {:.1}s", parts.join("; "), start.elapsed().as_secs_f64());
            Verdict { id, title, passed, detail }
        }
        Err(e) => Verdict { id, title, passed: false, detail: format!("error: {e}") },
    }
}
