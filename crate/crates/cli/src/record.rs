//! The machine-readable outcome of one experiment run.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

/// How a scalar is compared against its tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// `value < tolerance`
    Below,
    /// `value > tolerance`
    Above,
    /// `|value − target| ≤ tolerance`
    Near,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scalar {
    pub value: f64,
    pub check: Check,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

impl Scalar {
    pub fn below(value: f64, tolerance: f64) -> Self {
        Scalar {
            value,
            check: Check::Below,
            target: None,
            tolerance,
            passed: value < tolerance,
        }
    }

    pub fn above(value: f64, tolerance: f64) -> Self {
        Scalar {
            value,
            check: Check::Above,
            target: None,
            tolerance,
            passed: value > tolerance,
        }
    }

    pub fn near(value: f64, target: f64, tolerance: f64) -> Self {
        Scalar {
            value,
            check: Check::Near,
            target: Some(target),
            tolerance,
            passed: (value - target).abs() <= tolerance,
        }
    }

    pub fn exact(value: f64, target: f64) -> Self {
        Self::near(value, target, 0.0)
    }
}

/// A table destined for `<name>.csv` (and `<name>.svg`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scan {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Scan {
    pub fn new(name: &str, columns: &[&str], rows: Vec<Vec<f64>>) -> Self {
        Scan {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub experiment: String,
    pub seed: u64,
    pub config: Value,
    pub scalars: BTreeMap<String, Scalar>,
    /// Experiment-specific structured output.
    pub report: Value,
    pub scans: Vec<Scan>,
    pub passed: bool,
    pub duration_seconds: f64,
}

impl ResultRecord {
    pub fn failed_checks(&self) -> Vec<&str> {
        self.scalars
            .iter()
            .filter(|(_, s)| !s.passed)
            .map(|(k, _)| k.as_str())
            .collect()
    }

    /// Fails on any non-finite scalar or scan entry.
    pub fn check_finite(&self) -> Result<(), CliError> {
        for (name, s) in &self.scalars {
            if !s.value.is_finite() {
                return Err(CliError::Numerical(format!("scalar {name} is {}", s.value)));
            }
        }
        for scan in &self.scans {
            if scan.rows.iter().flatten().any(|v| !v.is_finite()) {
                return Err(CliError::Numerical(format!(
                    "scan {} has non-finite entries",
                    scan.name
                )));
            }
        }
        Ok(())
    }

    /// Pretty JSON with keys in sorted order and a trailing newline.
    pub fn to_json(&self) -> String {
        // `Value` maps are ordered by key.
        let value = serde_json::to_value(self).expect("record serializes");
        let mut text = serde_json::to_string_pretty(&value).expect("value serializes");
        text.push('\n');
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks() {
        assert!(Scalar::below(1e-10, 1e-9).passed);
        assert!(!Scalar::below(1e-9, 1e-9).passed);
        assert!(Scalar::above(0.5, 0.0).passed);
        assert!(Scalar::near(2.0 + 1e-10, 2.0, 1e-9).passed);
        assert!(Scalar::exact(0.0, 0.0).passed);
        assert!(!Scalar::exact(1.0, 0.0).passed);
    }

    #[test]
    fn json_keys_are_sorted() {
        let mut scalars = BTreeMap::new();
        scalars.insert("zeta".into(), Scalar::below(0.0, 1.0));
        scalars.insert("alpha".into(), Scalar::below(0.0, 1.0));
        let rec = ResultRecord {
            experiment: "ks-check".into(),
            seed: 1,
            config: serde_json::json!({"z": 1, "a": 2}),
            scalars,
            report: Value::Null,
            scans: vec![],
            passed: true,
            duration_seconds: 0.5,
        };
        let text = rec.to_json();
        let pos = |s: &str| text.find(s).unwrap();
        assert!(pos("\"alpha\"") < pos("\"zeta\""));
        assert!(pos("\"a\"") < pos("\"z\""));
        assert!(pos("\"config\"") < pos("\"duration_seconds\""));
        assert!(text.ends_with("}\n"));
    }
}
