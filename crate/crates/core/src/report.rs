//! Per-clause pass/fail reports produced by the axiom checkers.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "witness", rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail(String),
    /// The clause quantifies over limit indices and there are none.
    Vacuous,
    /// Cardinality clause switched off for fake structures.
    Suspended,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseResult {
    pub clause: String,
    #[serde(flatten)]
    pub status: Status,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub clauses: Vec<ClauseResult>,
}

impl AxiomReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, clause: impl Into<String>, status: Status) {
        self.clauses.push(ClauseResult { clause: clause.into(), status });
    }

    /// Records `Pass`, or `Fail` with the first witness.
    pub fn check(&mut self, clause: impl Into<String>, first_failure: Option<String>) {
        let status = match first_failure {
            None => Status::Pass,
            Some(w) => Status::Fail(w),
        };
        self.push(clause, status);
    }

    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|c| !matches!(c.status, Status::Fail(_)))
    }

    pub fn failures(&self) -> impl Iterator<Item = &ClauseResult> {
        self.clauses.iter().filter(|c| matches!(c.status, Status::Fail(_)))
    }

    pub fn status_of(&self, clause: &str) -> Option<&Status> {
        self.clauses.iter().find(|c| c.clause == clause).map(|c| &c.status)
    }

    pub fn extend(&mut self, prefix: &str, other: AxiomReport) {
        for c in other.clauses {
            self.push(format!("{prefix}{}", c.clause), c.status);
        }
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            match &c.status {
                Status::Pass => writeln!(f, "{:<8} pass", c.clause)?,
                Status::Vacuous => writeln!(f, "{:<8} vacuous", c.clause)?,
                Status::Suspended => writeln!(f, "{:<8} suspended", c.clause)?,
                Status::Fail(w) => writeln!(f, "{:<8} FAIL {w}", c.clause)?,
            }
        }
        Ok(())
    }
}

/// Outcome of running one lemma suite over one fixture.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub suite: String,
    pub fixture: String,
    pub instances: u64,
    pub violations: Vec<String>,
    pub vacuous: bool,
    /// Measurements that are reported but do not decide pass/fail.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub observations: Vec<String>,
}

impl LemmaReport {
    pub fn new(suite: impl Into<String>, fixture: impl Into<String>) -> Self {
        LemmaReport { suite: suite.into(), fixture: fixture.into(), ..Default::default() }
    }

    pub fn vacuous(suite: impl Into<String>, fixture: impl Into<String>) -> Self {
        LemmaReport { vacuous: true, ..Self::new(suite, fixture) }
    }

    /// Counts one instance; records `witness` when the check failed.
    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.violations.push(witness());
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(&mut self, other: LemmaReport) {
        self.instances += other.instances;
        self.violations.extend(other.violations);
        self.observations.extend(other.observations);
        self.vacuous &= other.vacuous;
    }
}
