//! Machine-readable check reports.

use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::config::Config;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Reported for information; never affects the overall status.
    Info,
    Skip,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub residual: Option<f64>,
    pub tolerance: Option<f64>,
    pub runtime_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn exact(name: impl Into<String>, ok: bool, detail: Option<String>) -> Check {
        Check {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            residual: None,
            tolerance: None,
            runtime_ms: 0.0,
            detail,
        }
    }

    /// Passes iff residual < tolerance.
    pub fn below(name: impl Into<String>, residual: f64, tolerance: f64) -> Check {
        Check {
            name: name.into(),
            status: if residual < tolerance { Status::Pass } else { Status::Fail },
            residual: Some(residual),
            tolerance: Some(tolerance),
            runtime_ms: 0.0,
            detail: None,
        }
    }

    /// Passes iff value > bound.
    pub fn above(name: impl Into<String>, value: f64, bound: f64) -> Check {
        Check {
            status: if value > bound { Status::Pass } else { Status::Fail },
            ..Check::below(name, value, bound)
        }
    }

    pub fn info(name: impl Into<String>, value: Option<f64>, detail: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            status: Status::Info,
            residual: value,
            tolerance: None,
            runtime_ms: 0.0,
            detail: Some(detail.into()),
        }
    }

    pub fn skip(name: impl Into<String>, why: impl Into<String>) -> Check {
        Check {
            status: Status::Skip,
            ..Check::info(name, None, why)
        }
    }

    pub fn failed_with(name: impl Into<String>, err: impl std::fmt::Display) -> Check {
        Check::exact(name, false, Some(err.to_string()))
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Check {
        self.detail = Some(detail.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Collects checks, stamping each with the time since the previous one.
pub struct Timer {
    last: Instant,
}

impl Default for Timer {
    fn default() -> Self {
        Timer { last: Instant::now() }
    }
}

impl Timer {
    pub fn stamp(&mut self, mut c: Check) -> Check {
        let now = Instant::now();
        c.runtime_ms = (now - self.last).as_secs_f64() * 1e3;
        self.last = now;
        c
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub config_hash: String,
    pub config: Config,
    pub status: Status,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "serde_json::Map::is_empty")]
    pub extra: serde_json::Map<String, Value>,
}

impl Report {
    pub fn new(command: &str, config: &Config) -> Report {
        Report {
            schema: flopcheck_core::SCHEMA,
            command: command.into(),
            config_hash: config.hash(),
            config: config.clone(),
            status: Status::Pass,
            checks: Vec::new(),
            extra: serde_json::Map::new(),
        }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
        self.status = if self.checks.iter().all(Check::passed) {
            Status::Pass
        } else {
            Status::Fail
        };
    }

    pub fn extend(&mut self, cs: impl IntoIterator<Item = Check>) {
        for c in cs {
            self.push(c);
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed()).collect()
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}
