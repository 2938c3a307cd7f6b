//! The JSON report shared by every command.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::verify::{Check, Classification};

use super::manifest::SCHEMA;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const VERDICT_FAILURE: i32 = 1;
    pub const INPUT_ERROR: i32 = 2;
}

/// Report of one command. Keys serialize in declaration order; `params`
/// and `details` objects are key-sorted.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<Classification>,
    /// Command-specific tables.
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
    /// Wall-clock time; `0` unless timing was requested.
    pub elapsed_ms: u64,
    /// Whether the verdict succeeded (drives the exit code).
    #[serde(skip)]
    pub success: bool,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            schema: SCHEMA,
            command: command.to_string(),
            params: BTreeMap::new(),
            checks: Vec::new(),
            classification: None,
            details: Value::Null,
            elapsed_ms: 0,
            success: true,
        }
    }

    /// Records a parameter echo.
    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.params.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    /// Appends a check built from a residual and a threshold.
    pub fn check(&mut self, name: &str, residual: f64, tol: f64, worst_point: Option<Vec<f64>>) -> bool {
        let passed = residual <= tol;
        self.checks.push(Check { name: name.to_string(), passed, max_residual: residual, worst_point });
        passed
    }

    pub fn exit_code(&self) -> i32 {
        if self.success {
            exit::SUCCESS
        } else {
            exit::VERDICT_FAILURE
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}
