//! Experiment configuration files.

use std::path::{Path, PathBuf};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

use qpip::config::MAX_TOTAL_DIM;
use qpip::mathcore::CodeParams;
use qpip::protocol::{Circuit, Gate, GiStrategy, Graph, ProverStrategy, RunSpec, Scheme, VerifierConfig};

use crate::error::CliError;

/// Upper limit on Monte Carlo trials per run.
pub const MAX_TRIALS: u64 = 100_000_000;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scheme: Option<Scheme>,
    pub code: Option<CodeSection>,
    pub circuit: Option<CircuitSection>,
    #[serde(default, deserialize_with = "strict_strategy")]
    pub strategy: Option<ProverStrategy>,
    #[serde(default, deserialize_with = "strict_strategies", skip_serializing_if = "Vec::is_empty")]
    pub strategies: Vec<ProverStrategy>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
    pub memory_bound: Option<usize>,
    #[serde(default)]
    pub log_keys: bool,
    pub gi: Option<GiSection>,
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub output: OutputSection,
}

/// Unit strategy variants would otherwise swallow unknown keys.
fn strict(value: toml::Value) -> Result<ProverStrategy, String> {
    let table = value.as_table().ok_or("strategy must be a table")?;
    let kind = table.get("kind").and_then(|k| k.as_str()).ok_or("strategy needs a string field `kind`")?;
    let allowed: &[&str] = match kind {
        "fixed_pauli" => &["kind", "step", "wire", "pauli"],
        "random_unitary" => &["kind", "step", "wire", "theta"],
        _ => &["kind"],
    };
    if let Some(extra) = table.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(format!("unknown field `{extra}` for strategy kind {kind:?}"));
    }
    value.try_into().map_err(|e: toml::de::Error| e.to_string())
}

fn strict_strategy<'de, D: Deserializer<'de>>(d: D) -> Result<Option<ProverStrategy>, D::Error> {
    Option::<toml::Value>::deserialize(d)?.map(strict).transpose().map_err(D::Error::custom)
}

fn strict_strategies<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<ProverStrategy>, D::Error> {
    Vec::<toml::Value>::deserialize(d)?.into_iter().map(strict).collect::<Result<_, _>>().map_err(D::Error::custom)
}

fn default_trials() -> u64 {
    1000
}

fn default_parallelism() -> usize {
    1
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSection {
    pub q: u64,
    pub d: usize,
    pub m: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitSection {
    pub width: usize,
    pub input: Vec<u64>,
    #[serde(default)]
    pub gates: Vec<GateSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSpec {
    pub gate: String,
    pub wires: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GiSection {
    pub g1: Graph,
    pub g2: Graph,
    pub merlin: GiStrategy,
    pub k: usize,
    #[serde(default = "default_gi_runs")]
    pub runs: u64,
}

fn default_gi_runs() -> u64 {
    1000
}

/// Exactly one field may be set.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub theta: Option<Vec<f64>>,
    pub trials: Option<Vec<u64>>,
    pub k: Option<Vec<usize>>,
    pub memory_bound: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SweepAxis {
    Theta(Vec<f64>),
    Trials(Vec<u64>),
    K(Vec<usize>),
    MemoryBound(Vec<usize>),
}

impl SweepSection {
    pub fn axis(&self) -> Result<SweepAxis, CliError> {
        let mut axes = Vec::new();
        if let Some(v) = &self.theta {
            axes.push(SweepAxis::Theta(v.clone()));
        }
        if let Some(v) = &self.trials {
            axes.push(SweepAxis::Trials(v.clone()));
        }
        if let Some(v) = &self.k {
            axes.push(SweepAxis::K(v.clone()));
        }
        if let Some(v) = &self.memory_bound {
            axes.push(SweepAxis::MemoryBound(v.clone()));
        }
        match axes.len() {
            1 => Ok(axes.pop().expect("one axis")),
            n => Err(CliError::Config(format!(
                "sweep: exactly one of theta, trials, k, memory_bound must be set, found {n}"
            ))),
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub report: Option<PathBuf>,
    pub transcript: Option<PathBuf>,
    pub dump_state: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| {
            // Graph sizes are guarded while deserializing.
            if e.message().starts_with("resource guard exceeded") {
                CliError::Resource(e.to_string())
            } else {
                CliError::Config(e.to_string())
            }
        })
    }

    pub fn params(&self) -> Result<CodeParams, CliError> {
        match self.code {
            Some(c) => CodeParams::new(c.q, c.d, c.m).map_err(|e| CliError::Config(format!("code: {e}"))),
            None => Ok(CodeParams::desk()),
        }
    }

    pub fn strategy_list(&self) -> Result<Vec<ProverStrategy>, CliError> {
        match (&self.strategy, self.strategies.is_empty()) {
            (Some(s), true) => Ok(vec![s.clone()]),
            (None, false) => Ok(self.strategies.clone()),
            (None, true) => Err(CliError::Config("missing field `strategy` (or `strategies`)".into())),
            (Some(_), false) => Err(CliError::Config("set either `strategy` or `strategies`, not both".into())),
        }
    }

    fn check_counts(&self) -> Result<(), CliError> {
        if self.trials == 0 {
            return Err(CliError::Config("trials: must be at least 1".into()));
        }
        if self.trials > MAX_TRIALS {
            return Err(CliError::Resource(format!("trials: {} exceeds the limit {MAX_TRIALS}", self.trials)));
        }
        if self.parallelism == 0 {
            return Err(CliError::Config("parallelism: must be at least 1".into()));
        }
        Ok(())
    }

    /// Validate everything a protocol run needs and build one spec per strategy.
    pub fn run_specs(&self) -> Result<Vec<RunSpec>, CliError> {
        self.check_counts()?;
        let scheme = self.scheme.ok_or_else(|| CliError::Config("missing field `scheme`".into()))?;
        let params = self.params()?;
        let section = self.circuit.as_ref().ok_or_else(|| CliError::Config("missing section `circuit`".into()))?;
        let circuit = build_circuit(scheme, section)?;
        let site_dim = match scheme {
            Scheme::Clifford => 4u64,
            Scheme::Polynomial => params.q().checked_pow(params.m() as u32).unwrap_or(u64::MAX),
        };
        let total = (0..circuit.width()).try_fold(1u64, |acc, _| acc.checked_mul(site_dim));
        if total.is_none_or(|t| t > MAX_TOTAL_DIM as u64) {
            return Err(CliError::Resource(format!(
                "circuit: {} wires need a state space beyond {MAX_TOTAL_DIM} amplitudes",
                circuit.width()
            )));
        }
        let dim = if scheme == Scheme::Clifford { 2 } else { params.q() };
        circuit.check_input(&section.input, dim).map_err(|e| CliError::Config(format!("circuit.input: {e}")))?;

        let minimum = VerifierConfig::minimum_memory(scheme, &params);
        let bound = self.memory_bound.unwrap_or(match scheme {
            Scheme::Clifford => 4,
            Scheme::Polynomial => params.m(),
        });
        if bound < minimum {
            return Err(CliError::Config(format!("memory_bound: {bound} is below the minimum {minimum}")));
        }
        let mut config = match scheme {
            Scheme::Clifford => VerifierConfig::clifford(self.seed),
            Scheme::Polynomial => VerifierConfig::polynomial(params, self.seed),
        }
        .with_memory_bound(bound);
        config.log_keys = self.log_keys;

        self.strategy_list()?
            .into_iter()
            .map(|strategy| {
                strategy
                    .validate(scheme, &params, &circuit)
                    .map_err(|e| CliError::Config(format!("strategy: {e}")))?;
                Ok(RunSpec { circuit: circuit.clone(), input: section.input.clone(), strategy, config: config.clone() })
            })
            .collect()
    }

    pub fn gi_section(&self) -> Result<&GiSection, CliError> {
        self.check_counts()?;
        let gi = self.gi.as_ref().ok_or_else(|| CliError::Config("missing section `gi`".into()))?;
        if gi.g1.vertices() != gi.g2.vertices() {
            return Err(CliError::Config("gi: g1 and g2 must have the same number of vertices".into()));
        }
        if gi.runs == 0 || gi.k == 0 {
            return Err(CliError::Config("gi: runs and k must be at least 1".into()));
        }
        if gi.runs > MAX_TRIALS {
            return Err(CliError::Resource(format!("gi.runs: {} exceeds the limit {MAX_TRIALS}", gi.runs)));
        }
        Ok(gi)
    }
}

fn build_circuit(scheme: Scheme, section: &CircuitSection) -> Result<Circuit, CliError> {
    let gates = section
        .gates
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let bad = |msg: String| CliError::Config(format!("circuit.gates[{i}]: {msg}"));
            match scheme {
                Scheme::Clifford => Gate::named(&g.gate, g.wires.clone()).map_err(|e| bad(e.to_string())),
                Scheme::Polynomial => {
                    let [wire] = g.wires[..] else {
                        return Err(bad("polynomial-scheme gates act on exactly one wire".into()));
                    };
                    match g.gate.as_str() {
                        "X" | "Xq" => Ok(Gate::Xq { wire }),
                        "F" => Ok(Gate::Fourier { wire }),
                        other => Err(bad(format!("unknown polynomial-scheme gate {other:?}, expected X or F"))),
                    }
                }
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Circuit::new(section.width, gates).map_err(|e| CliError::Config(format!("circuit: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    const BELL: &str = r#"
scheme = "clifford"
trials = 10
[circuit]
width = 2
input = [0, 0]
gates = [{ gate = "H⊗I", wires = [0, 1] }, { gate = "CNOT", wires = [0, 1] }]
[strategy]
kind = "honest"
"#;

    #[test]
    fn parses_a_clifford_config() {
        let cfg = ExperimentConfig::parse(BELL).unwrap();
        let specs = cfg.run_specs().unwrap();
        assert_eq!(specs.len(), 1);
        assert_eq!(specs[0].circuit.len(), 2);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = ExperimentConfig::parse(&format!("{BELL}\nbogus = 1\n")).unwrap_err();
        assert!(err.to_string().contains("bogus"));
    }

    #[test]
    fn memory_bound_below_minimum() {
        let cfg = ExperimentConfig::parse(&BELL.replace("trials = 10", "trials = 10\nmemory_bound = 2")).unwrap();
        assert!(matches!(cfg.run_specs(), Err(CliError::Config(m)) if m.contains("memory_bound")));
    }

    #[test]
    fn sweep_needs_one_axis() {
        let s = SweepSection { theta: Some(vec![0.0]), k: Some(vec![1]), ..Default::default() };
        assert!(s.axis().is_err());
        let s = SweepSection { k: Some(vec![1, 2]), ..Default::default() };
        assert_eq!(s.axis().unwrap(), SweepAxis::K(vec![1, 2]));
    }
}
