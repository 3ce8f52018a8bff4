use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::tensor::Field;

/// Denominator floor for `ratio`.
pub const RATIO_GUARD: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    /// Which inequality was checked, e.g. `boolean` or `cb`.
    pub check: String,
    pub d: usize,
    pub n: usize,
    pub field: Field,
    pub lhs: f64,
    pub rhs: f64,
    /// Upper estimate of the right-hand side when only bounds are available.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs_upper: Option<f64>,
    pub ratio: f64,
    pub tolerance: f64,
    pub witness: BTreeMap<String, String>,
}

impl InequalityReport {
    pub fn new(check: &str, d: usize, n: usize, field: Field, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self {
            check: check.to_string(),
            d,
            n,
            field,
            lhs,
            rhs,
            rhs_upper: None,
            ratio: lhs / rhs.max(RATIO_GUARD),
            tolerance,
            witness: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.witness.insert(key.to_string(), value.to_string());
        self
    }

    /// `lhs ≤ rhs` up to the tolerance.
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + self.tolerance
    }
}

impl fmt::Display for InequalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "check: {}", self.check)?;
        writeln!(f, "d: {}", self.d)?;
        writeln!(f, "n: {}", self.n)?;
        writeln!(f, "field: {}", self.field.name())?;
        writeln!(f, "lhs: {:.15e}", self.lhs)?;
        writeln!(f, "rhs: {:.15e}", self.rhs)?;
        if let Some(u) = self.rhs_upper {
            writeln!(f, "rhs_upper: {u:.15e}")?;
        }
        writeln!(f, "ratio: {:.15e}", self.ratio)?;
        writeln!(f, "tolerance: {:e}", self.tolerance)?;
        for (k, v) in &self.witness {
            writeln!(f, "witness.{k}: {v}")?;
        }
        Ok(())
    }
}
