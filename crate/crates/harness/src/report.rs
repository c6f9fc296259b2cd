//! Report records and JSON output. Everything serialized here is a pure
//! function of the configuration, so seeded runs are byte-identical; timings
//! only go to standard output.

use std::path::Path;
use std::time::Duration;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{HarnessError, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// How a case takes part in the suite verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    /// Must pass.
    Check,
    /// Deliberately corrupted; must fail.
    Control,
    /// Recorded alternative whose outcome is reported but not required.
    Variant,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PassRule {
    /// residual <= max(tolerance, 3 * error_bar).
    Tolerance,
    /// abs_err <= k * error_bar.
    ErrorBars { k: f64 },
    /// Symbolic: residual must be exactly zero.
    Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub key: String,
    pub role: Role,
    pub inputs: Value,
    /// `[re, im]`; absent for symbolic cases.
    pub lhs: Option<[f64; 2]>,
    pub rhs: Option<[f64; 2]>,
    pub abs_err: f64,
    pub rel_err: f64,
    /// The quantity compared with the tolerance: abs_err / scale.
    pub residual: f64,
    pub scale: f64,
    /// Quadrature or QMC error estimate on the residual's scale.
    pub error_bar: f64,
    pub tolerance: f64,
    pub rule: PassRule,
    pub pass: bool,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

impl CaseRecord {
    /// Numeric comparison of two estimates; `scale` normalizes the residual.
    pub fn numeric(key: String, inputs: Value, lhs: Complex64, rhs: Complex64, err: f64, scale: f64, tolerance: f64) -> Self {
        let abs_err = (lhs - rhs).norm();
        let denom = lhs.norm().max(rhs.norm());
        let rel_err = if denom > 0.0 { abs_err / denom } else { 0.0 };
        let (residual, error_bar) = if scale > 0.0 { (abs_err / scale, err / scale) } else { (abs_err, err) };
        let pass = residual <= tolerance.max(3.0 * error_bar);
        Self {
            key,
            role: Role::Check,
            inputs,
            lhs: Some(pair(lhs)),
            rhs: Some(pair(rhs)),
            abs_err,
            rel_err,
            residual,
            scale,
            error_bar,
            tolerance,
            rule: PassRule::Tolerance,
            pass,
        }
    }

    /// QMC comparison: passes within `k` standard errors.
    pub fn error_bars(key: String, inputs: Value, lhs: Complex64, rhs: Complex64, se: f64, k: f64) -> Self {
        let abs_err = (lhs - rhs).norm();
        let denom = lhs.norm().max(rhs.norm());
        Self {
            key,
            role: Role::Check,
            inputs,
            lhs: Some(pair(lhs)),
            rhs: Some(pair(rhs)),
            abs_err,
            rel_err: if denom > 0.0 { abs_err / denom } else { 0.0 },
            residual: abs_err,
            scale: 1.0,
            error_bar: se,
            tolerance: 0.0,
            rule: PassRule::ErrorBars { k },
            pass: abs_err <= k * se,
        }
    }

    /// Symbolic check: `mismatches` out of `checked` items failed.
    pub fn exact(key: String, inputs: Value, mismatches: usize) -> Self {
        Self {
            key,
            role: Role::Check,
            inputs,
            lhs: None,
            rhs: None,
            abs_err: mismatches as f64,
            rel_err: 0.0,
            residual: mismatches as f64,
            scale: 1.0,
            error_bar: 0.0,
            tolerance: 0.0,
            rule: PassRule::Exact,
            pass: mismatches == 0,
        }
    }

    pub fn with_role(mut self, role: Role) -> Self {
        self.role = role;
        self
    }

    /// Both sides exactly zero: a corruption cannot show (F = 0 configs).
    pub fn degenerate(&self) -> bool {
        self.lhs == Some([0.0, 0.0]) && self.rhs == Some([0.0, 0.0])
    }

    /// Whether the case behaved as its role requires.
    pub fn as_expected(&self) -> bool {
        match self.role {
            Role::Check => self.pass,
            Role::Control => !self.pass || self.degenerate(),
            Role::Variant => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub checks: usize,
    pub checks_passed: usize,
    pub controls: usize,
    pub controls_failed: usize,
    /// Controls with both sides exactly zero.
    pub controls_degenerate: usize,
    pub variants: usize,
    /// Largest residual over the required checks.
    pub max_residual: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub summary: Summary,
    pub cases: Vec<CaseRecord>,
    /// Suite-specific structured output.
    pub extra: Value,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl SuiteReport {
    pub fn new(suite: &str, cases: Vec<CaseRecord>, extra: Value) -> Self {
        let of = |r: Role| cases.iter().filter(move |c| c.role == r);
        let summary = Summary {
            checks: of(Role::Check).count(),
            checks_passed: of(Role::Check).filter(|c| c.pass).count(),
            controls: of(Role::Control).count(),
            controls_failed: of(Role::Control).filter(|c| !c.pass).count(),
            controls_degenerate: of(Role::Control).filter(|c| c.degenerate()).count(),
            variants: of(Role::Variant).count(),
            max_residual: of(Role::Check).map(|c| c.residual).fold(0.0, f64::max),
            ok: cases.iter().all(CaseRecord::as_expected),
        };
        Self { suite: suite.to_string(), summary, cases, extra, wall_time: Duration::ZERO }
    }

    pub fn ok(&self) -> bool {
        self.summary.ok
    }

    pub fn case(&self, key: &str) -> Option<&CaseRecord> {
        self.cases.iter().find(|c| c.key == key)
    }

    pub fn checks(&self) -> impl Iterator<Item = &CaseRecord> {
        self.cases.iter().filter(|c| c.role == Role::Check)
    }

    pub fn controls(&self) -> impl Iterator<Item = &CaseRecord> {
        self.cases.iter().filter(|c| c.role == Role::Control)
    }

    /// One line for standard output.
    pub fn summary_line(&self) -> String {
        let s = &self.summary;
        format!(
            "{:<14} {}  checks {}/{}  controls failed {}/{}  max residual {:.3e}  ({:.1} s)",
            self.suite,
            if s.ok { "PASS" } else { "FAIL" },
            s.checks_passed,
            s.checks,
            s.controls_failed,
            s.controls,
            s.max_residual,
            self.wall_time.as_secs_f64()
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub seed: u64,
    pub fast: bool,
    pub ok: bool,
    pub suites: Vec<SuiteReport>,
}

impl RunReport {
    pub fn new(seed: u64, fast: bool, suites: Vec<SuiteReport>) -> Self {
        let ok = suites.iter().all(SuiteReport::ok);
        Self { schema_version: SCHEMA_VERSION, seed, fast, ok, suites }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.suite == name)
    }
}

pub fn emit_report(report: &RunReport, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, report.to_json()?).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn tolerance_rule_uses_error_bar() {
        let r = CaseRecord::numeric("a".into(), json!({}), c(1.0), c(1.0 + 1e-6), 0.0, 1.0, 1e-7);
        assert!(!r.pass);
        let r = CaseRecord::numeric("a".into(), json!({}), c(1.0), c(1.0 + 1e-6), 4e-7, 1.0, 1e-7);
        assert!(r.pass);
        let r = CaseRecord::numeric("z".into(), json!({}), c(0.0), c(0.0), 0.0, 0.0, 1e-7);
        assert!(r.pass && r.residual == 0.0);
    }

    #[test]
    fn controls_must_fail() {
        let good = CaseRecord::exact("g".into(), json!({}), 0);
        let bad = CaseRecord::exact("b".into(), json!({}), 3).with_role(Role::Control);
        let r = SuiteReport::new("s", vec![good.clone(), bad], Value::Null);
        assert!(r.ok());
        assert_eq!(r.summary.controls_failed, 1);
        let r = SuiteReport::new("s", vec![good.clone(), good.with_role(Role::Control)], Value::Null);
        assert!(!r.ok());
    }

    #[test]
    fn empty_report_is_valid() {
        let run = RunReport::new(7, false, vec![]);
        assert!(run.ok);
        let text = run.to_json().unwrap();
        let back: RunReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.schema_version, SCHEMA_VERSION);
        assert!(back.suites.is_empty());
    }

    #[test]
    fn emit_writes_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/report.json");
        emit_report(&RunReport::new(1, true, vec![]), &path).unwrap();
        assert!(std::fs::read_to_string(path).unwrap().contains("\"schema_version\": 1"));
    }
}
