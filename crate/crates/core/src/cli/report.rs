use serde::{Deserialize, Serialize};

use crate::symbol::MultiIndex;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Check {
            name: name.to_string(),
            value,
            threshold,
            pass: value <= threshold,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientRow {
    pub r: MultiIndex,
    pub i: u32,
    pub truth: f64,
    pub recovered: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnrecoverableRow {
    pub r: MultiIndex,
    pub i: u32,
}

/// Outcome of a round trip. Timings go to the log so that the report is
/// byte-identical across runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub n: usize,
    pub u: Vec<f64>,
    pub u_recovered: Vec<f64>,
    pub resonance_order: Option<u32>,
    pub l_max: u32,
    pub hbar_grid: Vec<f64>,
    pub cutoffs: Vec<f64>,
    pub checks: Vec<Check>,
    pub coefficients: Vec<CoefficientRow>,
    pub unrecoverable: Vec<UnrecoverableRow>,
    pub warnings: Vec<String>,
    pub passed: bool,
}
