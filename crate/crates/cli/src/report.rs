//! Line-oriented verification reports. One line per check, sorted by check
//! id; the body is deterministic for a fixed spec and seed, and the wall
//! time goes on a trailing comment line excluded from the body.

use std::fmt::Write as _;

/// One verified identity.
#[derive(Debug, Clone)]
pub struct Check {
    /// Stable id, e.g. `snb.jacobi`.
    pub id: String,
    /// Short human label for the identity.
    pub label: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    pub fn from_residual(id: &str, label: &str, residual: f64, tol: f64) -> Self {
        Check {
            id: id.to_string(),
            label: label.to_string(),
            residual,
            tol,
            pass: residual <= tol,
        }
    }

    /// A boolean check: pass records residual 0, fail records 1.
    pub fn from_flag(id: &str, label: &str, pass: bool) -> Self {
        Check {
            id: id.to_string(),
            label: label.to_string(),
            residual: if pass { 0.0 } else { 1.0 },
            tol: 0.0,
            pass,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub points: usize,
    pub tol: f64,
    pub checks: Vec<Check>,
    pub elapsed_ms: u128,
}

impl Report {
    pub fn new(suite: &str, seed: u64, points: usize, tol: f64, mut checks: Vec<Check>) -> Self {
        checks.sort_by(|a, b| a.id.cmp(&b.id));
        Report {
            suite: suite.to_string(),
            seed,
            points,
            tol,
            checks,
            elapsed_ms: 0,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// The deterministic report body.
    pub fn body(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "suite={} seed={} points={} tol={:.3e}",
            self.suite, self.seed, self.points, self.tol
        );
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{} {} {} residual={:.6e} tol={:.3e} {}",
                self.suite,
                c.id,
                c.label,
                c.residual,
                c.tol,
                if c.pass { "PASS" } else { "FAIL" }
            );
        }
        let failed = self.checks.iter().filter(|c| !c.pass).count();
        let _ = writeln!(
            out,
            "result={} checks={} failed={}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.checks.len(),
            failed
        );
        out
    }

    /// Body plus the timing comment.
    pub fn render(&self) -> String {
        format!("{}# elapsed_ms={}\n", self.body(), self.elapsed_ms)
    }
}
