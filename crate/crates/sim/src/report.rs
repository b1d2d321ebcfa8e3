//! Pass/fail ledgers written as `report.json`.

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// |measured − expected| in dB.
    Db,
    /// |measured / expected − 1|.
    Relative,
    /// |measured − expected|.
    Absolute,
    /// A yes/no property.
    Condition,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn numeric(name: String, kind: CheckKind, measured: f64, expected: f64, error: f64, tolerance: f64) -> Self {
        Self {
            name,
            kind,
            measured: Some(measured),
            expected: Some(expected),
            error: Some(error),
            tolerance: Some(tolerance),
            pass: error <= tolerance,
            note: None,
        }
    }

    /// Both values in dB.
    pub fn db(name: impl Into<String>, measured_db: f64, expected_db: f64, tolerance_db: f64) -> Self {
        let err = (measured_db - expected_db).abs();
        Self::numeric(name.into(), CheckKind::Db, measured_db, expected_db, err, tolerance_db)
    }

    /// Relative error; an expected value of exactly zero demands an exact
    /// zero.
    pub fn relative(name: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        let err = if expected == 0.0 {
            if measured == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            (measured / expected - 1.0).abs()
        };
        Self::numeric(name.into(), CheckKind::Relative, measured, expected, err, tolerance)
    }

    pub fn absolute(name: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        let err = (measured - expected).abs();
        Self::numeric(name.into(), CheckKind::Absolute, measured, expected, err, tolerance)
    }

    pub fn condition(name: impl Into<String>, pass: bool) -> Self {
        Self {
            name: name.into(),
            kind: CheckKind::Condition,
            measured: None,
            expected: None,
            error: None,
            tolerance: None,
            pass,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub experiment: String,
    pub passed: bool,
    pub metadata: Value,
    pub checks: Vec<Check>,
    /// Experiment-specific summary values.
    pub summary: Value,
}

impl Report {
    pub fn new(experiment: &str, metadata: Value) -> Self {
        Self {
            experiment: experiment.into(),
            passed: true,
            metadata,
            checks: Vec::new(),
            summary: Value::Null,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.passed &= check.pass;
        self.checks.push(check);
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Checks whose name starts with `prefix`.
    pub fn matching<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a Check> + 'a {
        self.checks.iter().filter(move |c| c.name.starts_with(prefix))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_expectation_demands_exact_zero() {
        assert!(Check::relative("z", 0.0, 0.0, 0.01).pass);
        assert!(!Check::relative("z", 1e-30, 0.0, 0.01).pass);
    }

    #[test]
    fn report_tracks_failures() {
        let mut r = Report::new("x", Value::Null);
        r.push(Check::db("a", 1.0, 1.1, 0.2));
        assert!(r.passed);
        r.push(Check::condition("b", false));
        assert!(!r.passed);
        assert_eq!(r.failures().count(), 1);
        assert!(r.to_json().contains("\"kind\": \"condition\""));
    }
}
