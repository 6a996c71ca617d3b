//! Flat per-check records shared by every report type.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub terms: BTreeMap<String, f64>,
    pub residual: f64,
    pub quadrature_error: f64,
}

impl CheckRecord {
    pub fn new(
        name: impl Into<String>,
        passed: bool,
        residual: f64,
        quadrature_error: f64,
    ) -> Self {
        Self {
            name: name.into(),
            passed,
            terms: BTreeMap::new(),
            residual,
            quadrature_error,
        }
    }

    /// Adds a scalar term; non-finite values are left out so records stay
    /// representable in JSON.
    pub fn term(mut self, key: &str, value: f64) -> Self {
        if value.is_finite() {
            self.terms.insert(key.to_string(), value);
        }
        self
    }
}

/// Anything that can be flattened into a [`CheckRecord`].
pub trait ToRecord {
    fn to_record(&self, name: &str) -> CheckRecord;
}
