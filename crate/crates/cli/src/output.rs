//! Machine-readable records and value formatting.

use std::collections::BTreeMap;
use std::io::Write;

use matbeta::Rational;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// One result row. Values are strings: exact rationals as `num/den`
/// (integers without a denominator), floats with 17 significant digits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub values: BTreeMap<String, String>,
    pub error: Option<String>,
    pub metadata: BTreeMap<String, String>,
}

impl OutputRecord {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_owned(),
            params: BTreeMap::new(),
            values: BTreeMap::new(),
            error: None,
            metadata: BTreeMap::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_owned(), value.to_string());
        self
    }

    pub fn value(mut self, key: &str, value: impl ToString) -> Self {
        self.values.insert(key.to_owned(), value.to_string());
        self
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_owned(), value.to_string());
        self
    }
}

/// Shortest form that parses back to the same `f64`: scientific notation
/// with 17 significant digits. Independent of locale.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn format_rational(v: &Rational) -> String {
    v.to_string()
}

pub fn write_json<W: Write>(out: &mut W, records: &[OutputRecord]) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, records)?;
    writeln!(out)?;
    Ok(())
}
