use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Outcome of one law checked by a validator.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub law: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

/// Pass/fail per law, with a witness for every failure.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub subject: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(subject: impl Into<String>) -> Self {
        Report { subject: subject.into(), checks: Vec::new() }
    }

    pub fn pass(&mut self, law: impl Into<String>) {
        self.checks.push(Check { law: law.into(), passed: true, witness: None });
    }

    pub fn fail(&mut self, law: impl Into<String>, witness: impl Into<String>) {
        self.checks.push(Check { law: law.into(), passed: false, witness: Some(witness.into()) });
    }

    /// Record `law` as passed unless `witness` is set.
    pub fn record(&mut self, law: impl Into<String>, witness: Option<String>) {
        match witness {
            None => self.pass(law),
            Some(w) => self.fail(law, w),
        }
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn is_ok(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self, law: &str) -> bool {
        self.checks.iter().any(|c| !c.passed && c.law == law)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn into_result(self) -> Result<Self> {
        match self.first_failure() {
            None => Ok(self),
            Some(c) => Err(Error::Validation(format!(
                "{}: {} ({})",
                self.subject,
                c.law,
                c.witness.clone().unwrap_or_default()
            ))),
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.subject)?;
        for c in &self.checks {
            let status = if c.passed { "pass" } else { "FAIL" };
            match &c.witness {
                Some(w) => writeln!(f, "  [{status}] {} -- {w}", c.law)?,
                None => writeln!(f, "  [{status}] {}", c.law)?,
            }
        }
        Ok(())
    }
}
