//! Machine-readable run reports.

use serde::Serialize;
use serde_json::Value;

use crate::scenario::SCHEMA_VERSION;

/// A number together with the module that produced it and the tolerance it
/// is claimed to within.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportedValue {
    pub name: String,
    pub value: f64,
    pub module: String,
    pub tolerance: f64,
}

/// An independent recomputation and how far it landed from the primary value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleDeviation {
    pub name: String,
    pub deviation: f64,
    pub module: String,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: Vec<String>,
    /// Fully resolved inputs: the run can be repeated from this and `command`.
    pub config: Value,
    pub values: Vec<ReportedValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<String>,
    pub oracle_deviations: Vec<OracleDeviation>,
    /// Command-specific detail such as optimal distributions or suite checks.
    pub details: Value,
    /// Files written by the run.
    pub outputs: Vec<String>,
    pub passed: bool,
    /// Wall-clock seconds; only present when timing was requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_seconds: Option<f64>,
}

impl RunReport {
    pub fn new(command: Vec<String>, config: Value) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command,
            config,
            values: Vec::new(),
            classification: None,
            oracle_deviations: Vec::new(),
            details: Value::Null,
            outputs: Vec::new(),
            passed: true,
            elapsed_seconds: None,
        }
    }

    pub fn value(&mut self, name: impl Into<String>, value: f64, module: &str, tolerance: f64) {
        self.values.push(ReportedValue {
            name: name.into(),
            value,
            module: module.into(),
            tolerance,
        });
    }

    /// Records `deviation` and passes it when it is at most `tolerance`.
    pub fn oracle(
        &mut self,
        name: impl Into<String>,
        deviation: f64,
        module: &str,
        tolerance: f64,
    ) {
        self.check(name, deviation, module, tolerance, deviation <= tolerance);
    }

    /// Records a check whose pass rule was decided by the caller.
    pub fn check(
        &mut self,
        name: impl Into<String>,
        deviation: f64,
        module: &str,
        tolerance: f64,
        passed: bool,
    ) {
        self.passed &= passed;
        self.oracle_deviations.push(OracleDeviation {
            name: name.into(),
            deviation,
            module: module.into(),
            tolerance,
            passed,
        });
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|v| v.name == name).map(|v| v.value)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
