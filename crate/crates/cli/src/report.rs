//! Machine-readable experiment reports.

use serde::Serialize;

use qpip::protocol::{EstimateSummary, GiStrategy, ProverStrategy};
use qpip::stats::Interval;

use crate::config::ExperimentConfig;

/// Bumped whenever `schemas/report.schema.json` changes incompatibly.
pub const SCHEMA_VERSION: &str = "1.0.0";

#[derive(Serialize)]
pub struct Report<'a> {
    pub schema_version: &'static str,
    pub command: &'static str,
    /// The only field allowed to differ between runs of the same config.
    pub generated_at: String,
    pub tool: Tool,
    pub seed: u64,
    pub config: &'a ExperimentConfig,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub results: Vec<StrategyResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gi: Option<GiResult>,
}

#[derive(Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

impl Tool {
    pub fn current() -> Self {
        Tool { name: "qpip", version: env!("CARGO_PKG_VERSION") }
    }
}

#[derive(Serialize)]
pub struct StrategyResult {
    pub strategy: ProverStrategy,
    pub label: &'static str,
    #[serde(flatten)]
    pub summary: EstimateSummary,
    pub rejection_rate: f64,
    /// Exact key-averaged value; `None` when the enumeration is beyond the guard.
    pub oracle: Option<OraclePair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample: Option<SampleTrial>,
}

#[derive(Serialize)]
pub struct OraclePair {
    pub acceptance: f64,
    pub rejection: f64,
    pub inside_interval: bool,
}

impl OraclePair {
    pub fn new(acceptance: f64, interval: &Interval) -> Self {
        OraclePair { acceptance, rejection: 1.0 - acceptance, inside_interval: interval.contains(acceptance) }
    }
}

/// Trial 0 in detail, emitted when keys are logged.
#[derive(Serialize)]
pub struct SampleTrial {
    pub outcome: String,
    pub verifier_seed: u64,
    pub messages: usize,
    pub keys: Vec<serde_json::Value>,
}

#[derive(Serialize)]
pub struct GiResult {
    pub merlin: GiStrategy,
    pub k: usize,
    pub runs: u64,
    pub isomorphic: bool,
    pub convinced: u64,
    pub convince_rate: f64,
    pub convince_interval: Interval,
    pub oracle_convince: f64,
    pub per_round_success_rate: f64,
    pub per_round_interval: Interval,
    /// Entry `j` counts runs in which Merlin answered exactly `j` rounds correctly.
    pub correct_rounds_histogram: Vec<u64>,
    pub bijection_accepted: bool,
}
