//! Run-report assembly: schema envelope, fitted-constant regression
//! against committed baselines, and the exit-code contract.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use hrt_core::{Error, Result};
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

/// Default tolerated growth of a fitted constant over its baseline.
pub const DEFAULT_FACTOR: f64 = 2.0;

#[derive(Debug, Serialize)]
pub struct FittedConstant {
    pub name: String,
    pub value: f64,
    /// Baseline value when one was supplied for this name.
    pub baseline: Option<f64>,
    pub factor: f64,
    /// None without a baseline; otherwise value <= baseline * factor.
    pub pass: Option<bool>,
    /// Scales used, sample counts, seed: where the value came from.
    pub provenance: String,
}

/// The report envelope every subcommand emits. Field order is fixed and all
/// maps are sorted, so identical configurations render identical bytes.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub subcommand: String,
    /// Echo of the provided flags, raw strings as given.
    pub config: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    pub result: serde_json::Value,
    pub fitted: Vec<FittedConstant>,
    /// Invariant failures; a nonempty list drives exit code 1.
    pub violations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

impl RunReport {
    pub fn new(subcommand: &str, config: BTreeMap<String, String>) -> Self {
        RunReport {
            schema_version: SCHEMA_VERSION,
            subcommand: subcommand.to_string(),
            config,
            seed: None,
            precision: None,
            result: serde_json::Value::Null,
            fitted: Vec::new(),
            violations: Vec::new(),
            timings_ms: None,
        }
    }

    pub fn set_result<T: Serialize>(&mut self, value: &T) -> Result<()> {
        self.result = serde_json::to_value(value)
            .map_err(|e| Error::Parameter(format!("report serialization: {e}")))?;
        Ok(())
    }

    /// Record a fitted constant oriented so that growth means degradation,
    /// checking it against the baseline table when one is loaded.
    pub fn push_fitted(
        &mut self,
        name: &str,
        value: f64,
        provenance: String,
        baselines: &Baselines,
    ) {
        let baseline = baselines.table.get(name).copied();
        let pass = baseline.map(|b| value <= b * baselines.factor);
        if pass == Some(false) {
            self.violations.push(format!(
                "fitted {name} = {value:.6} exceeds baseline {:.6} x factor {}",
                baseline.unwrap(),
                baselines.factor
            ));
        }
        self.fitted.push(FittedConstant {
            name: name.to_string(),
            value,
            baseline,
            factor: baselines.factor,
            pass,
            provenance,
        });
    }

    pub fn check(&mut self, ok: bool, violation: &str) {
        if !ok {
            self.violations.push(violation.to_string());
        }
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(!self.violations.is_empty())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report envelope serializes")
    }
}

/// Baseline table loaded from a committed JSON file: a flat object mapping
/// fitted-constant names to their recorded values.
#[derive(Debug, Default)]
pub struct Baselines {
    pub table: BTreeMap<String, f64>,
    pub factor: f64,
}

impl Baselines {
    pub fn none(factor: f64) -> Self {
        Baselines {
            table: BTreeMap::new(),
            factor,
        }
    }

    pub fn load(path: &Path, factor: f64) -> Result<Self> {
        let raw = fs::read_to_string(path)
            .map_err(|e| Error::Parameter(format!("baseline file {}: {e}", path.display())))?;
        let table: BTreeMap<String, f64> = serde_json::from_str(&raw)
            .map_err(|e| Error::Parse(format!("baseline file {}: {e}", path.display())))?;
        Ok(Baselines { table, factor })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn baseline_regression_flags_growth() {
        let mut baselines = Baselines::none(2.0);
        baselines.table.insert("L".into(), 1.0);
        let mut rep = RunReport::new("pair", BTreeMap::new());
        rep.push_fitted("L", 1.9, "test".into(), &baselines);
        assert_eq!(rep.fitted[0].pass, Some(true));
        assert_eq!(rep.exit_code(), 0);
        rep.push_fitted("L", 2.1, "test".into(), &baselines);
        assert_eq!(rep.fitted[1].pass, Some(false));
        assert_eq!(rep.exit_code(), 1);
    }

    #[test]
    fn unknown_constant_has_no_verdict() {
        let baselines = Baselines::none(2.0);
        let mut rep = RunReport::new("pair", BTreeMap::new());
        rep.push_fitted("L", 5.0, "test".into(), &baselines);
        assert_eq!(rep.fitted[0].pass, None);
        assert_eq!(rep.exit_code(), 0);
    }
}
