//! Residual reports attached to solver runs.

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

/// One measured quantity, optionally with the tolerance it was asserted
/// against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub title: String,
    pub checks: Vec<Check>,
    pub wall_time_s: f64,
    /// Free-form echo of the configuration that produced the run.
    pub config: String,
    #[serde(skip)]
    started: Option<Instant>,
}

impl SolveReport {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            checks: Vec::new(),
            wall_time_s: 0.0,
            config: String::new(),
            started: Some(Instant::now()),
        }
    }

    /// Records `value ≤ tolerance` as an asserted check.
    pub fn check(&mut self, name: impl Into<String>, value: f64, tolerance: f64) -> bool {
        let passed = value.is_finite() && value <= tolerance;
        self.checks.push(Check {
            name: name.into(),
            value,
            tolerance: Some(tolerance),
            passed,
        });
        passed
    }

    /// Records an informational value that is not asserted.
    pub fn info(&mut self, name: impl Into<String>, value: f64) {
        self.checks.push(Check {
            name: name.into(),
            value,
            tolerance: None,
            passed: true,
        });
    }

    pub fn with_config(mut self, config: impl Into<String>) -> Self {
        self.config = config.into();
        self
    }

    pub fn merge(&mut self, prefix: &str, other: SolveReport) {
        for mut c in other.checks {
            c.name = format!("{prefix}.{}", c.name);
            self.checks.push(c);
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.value)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Stops the wall clock.
    pub fn finish(mut self) -> Self {
        if let Some(t) = self.started.take() {
            self.wall_time_s = t.elapsed().as_secs_f64();
        }
        self
    }
}

impl fmt::Display for SolveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} ({:.2} s)", self.title, self.wall_time_s)?;
        for c in &self.checks {
            match c.tolerance {
                Some(t) => writeln!(
                    f,
                    "  [{}] {:<40} {:>12.4e}  (tol {:.1e})",
                    if c.passed { "pass" } else { "FAIL" },
                    c.name,
                    c.value,
                    t
                )?,
                None => writeln!(f, "  [info] {:<40} {:>12.4e}", c.name, c.value)?,
            }
        }
        Ok(())
    }
}
