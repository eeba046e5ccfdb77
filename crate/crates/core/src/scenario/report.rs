use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;

/// One line of the pass/fail table.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value <= tolerance`.
    pub fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }

    /// Passes when `value >= tolerance`.
    pub fn at_least(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value >= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub name: String,
    pub mode: String,
    /// Resolved parameters, in insertion order.
    pub params: Vec<(String, String)>,
    pub notes: Vec<String>,
    pub checks: Vec<Check>,
    /// Files written next to the report.
    pub artifacts: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.params.push((key.into(), value.to_string()));
    }

    /// Plain-text rendering; identical inputs give identical bytes.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario: {}", self.name);
        let _ = writeln!(s, "mode: {}", self.mode);
        if !self.params.is_empty() {
            let _ = writeln!(s, "\nparameters:");
            for (k, v) in &self.params {
                let _ = writeln!(s, "  {k} = {v}");
            }
        }
        if !self.notes.is_empty() {
            let _ = writeln!(s, "\nnotes:");
            for n in &self.notes {
                let _ = writeln!(s, "  - {n}");
            }
        }
        let _ = writeln!(s, "\nchecks:");
        let w = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let _ = writeln!(
                s,
                "  {:<w$}  {:>12.4e}  tol {:>10.3e}  {}",
                c.name,
                c.value,
                c.tolerance,
                if c.passed { "PASS" } else { "FAIL" }
            );
        }
        if !self.artifacts.is_empty() {
            let _ = writeln!(s, "\nartifacts:");
            for a in &self.artifacts {
                let _ = writeln!(s, "  {a}");
            }
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        let _ = writeln!(
            s,
            "\nresult: {} ({} of {} checks failed)",
            if failed == 0 { "PASS" } else { "FAIL" },
            failed,
            self.checks.len()
        );
        s
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::write(dir.join("run_report.txt"), self.render())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_is_stable() {
        let mut r = Report {
            name: "demo".into(),
            mode: "eigen".into(),
            ..Default::default()
        };
        r.param("count", 3);
        r.checks.push(Check::at_most("residual", 1e-12, 1e-10));
        r.checks.push(Check::at_least("order", 1.2, 1.8));
        let a = r.render();
        assert_eq!(a, r.clone().render());
        assert!(a.contains("PASS") && a.contains("FAIL"));
        assert!(a.ends_with("result: FAIL (1 of 2 checks failed)\n"));
        assert!(!r.passed());
    }
}
