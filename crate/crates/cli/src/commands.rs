use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use qpip::config::Z_95;
use qpip::groups::{shared_clifford_table, GeneralizedPauli, PauliString};
use qpip::mathcore::{enumerate_codewords, CodeParams, SignKey};
use qpip::protocol::{
    estimate, exact_acceptance, gi_convince_probability, run_gi_bijection, run_gi_protocol, verify_factoring,
    Outcome, ProverStrategy, RunSpec,
};
use qpip::qas::{clifford_block_pass, logical_basis, poly_block_pass, BlockAttack};
use qpip::rng::RandomStream;
use qpip::stats::wilson_interval;

use crate::config::{ExperimentConfig, SweepAxis};
use crate::error::CliError;
use crate::report::{GiResult, OraclePair, Report, SampleTrial, StrategyResult, Tool, SCHEMA_VERSION};

pub fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(&text, out)
}

/// `path` itself for a single strategy, `stem.i.ext` otherwise.
fn indexed(path: &Path, i: usize, n: usize) -> PathBuf {
    if n == 1 {
        return path.to_path_buf();
    }
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("out");
    path.with_extension(format!("{i}.{ext}"))
}

fn outcome_label(o: &Outcome) -> String {
    match o {
        Outcome::Accepted => "accepted".into(),
        Outcome::Rejected => "rejected".into(),
        Outcome::Aborted(reason) => format!("aborted: {reason}"),
    }
}

fn oracle_for(spec: &RunSpec) -> Result<Option<f64>, CliError> {
    match exact_acceptance(&spec.circuit, &spec.input, &spec.strategy, &spec.config) {
        Ok(p) => Ok(Some(p)),
        Err(e @ qpip::Error::ResourceGuard(_)) => {
            log::warn!("no exact oracle for {}: {e}", spec.strategy.label());
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

pub fn run(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<(), CliError> {
    let specs = cfg.run_specs()?;
    let n = specs.len();
    let mut results = Vec::with_capacity(n);
    for (i, spec) in specs.iter().enumerate() {
        log::info!("{}: {} trials on {} threads", spec.strategy.label(), cfg.trials, cfg.parallelism);
        let summary = estimate(spec, cfg.trials, cfg.parallelism)?;
        let oracle = oracle_for(spec)?.map(|p| OraclePair::new(p, &summary.interval));
        let wants_detail = cfg.log_keys || cfg.output.transcript.is_some() || cfg.output.dump_state.is_some();
        let mut sample = None;
        if wants_detail {
            let trial = spec.run_trial(0)?;
            if let Some(path) = &cfg.output.transcript {
                std::fs::write(indexed(path, i, n), trial.transcript.to_json_lines())?;
            }
            if let (Some(path), Some(state)) = (&cfg.output.dump_state, &trial.final_state) {
                std::fs::write(indexed(path, i, n), state.dump_json())?;
            }
            if cfg.log_keys {
                sample = Some(SampleTrial {
                    outcome: outcome_label(&trial.outcome),
                    verifier_seed: trial.verifier_seed,
                    messages: trial.transcript.len(),
                    keys: trial.keys,
                });
            }
        }
        results.push(StrategyResult {
            strategy: spec.strategy.clone(),
            label: spec.strategy.label(),
            rejection_rate: 1.0 - summary.acceptance_rate,
            summary,
            oracle,
            sample,
        });
    }
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: "run",
        generated_at: timestamp(),
        tool: Tool::current(),
        seed: cfg.seed,
        config: cfg,
        results,
        gi: None,
    };
    emit_json(&report, out.or(cfg.output.report.as_deref()))
}

fn gi_result(cfg: &ExperimentConfig) -> Result<GiResult, CliError> {
    let gi = cfg.gi_section()?;
    let mut histogram = vec![0u64; gi.k + 1];
    let (mut convinced, mut correct) = (0u64, 0u64);
    for i in 0..gi.runs {
        let mut rng = RandomStream::for_trial(cfg.seed, i);
        let run = run_gi_protocol(&gi.g1, &gi.g2, gi.merlin, gi.k, &mut rng)?;
        let c = run.rounds.iter().filter(|&&r| r).count();
        histogram[c] += 1;
        correct += c as u64;
        convinced += u64::from(run.convinced);
    }
    let rounds = gi.runs * gi.k as u64;
    let bijection = run_gi_bijection(&gi.g1, &gi.g2, &mut RandomStream::for_trial(cfg.seed, gi.runs));
    Ok(GiResult {
        merlin: gi.merlin,
        k: gi.k,
        runs: gi.runs,
        isomorphic: gi.g1.is_isomorphic(&gi.g2),
        convinced,
        convince_rate: convinced as f64 / gi.runs as f64,
        convince_interval: wilson_interval(convinced, gi.runs, Z_95),
        oracle_convince: gi_convince_probability(&gi.g1, &gi.g2, gi.merlin, gi.k),
        per_round_success_rate: correct as f64 / rounds as f64,
        per_round_interval: wilson_interval(correct, rounds, Z_95),
        correct_rounds_histogram: histogram,
        bijection_accepted: bijection.accepted,
    })
}

pub fn gi_demo(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<(), CliError> {
    let gi = gi_result(cfg)?;
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: "gi-demo",
        generated_at: timestamp(),
        tool: Tool::current(),
        seed: cfg.seed,
        config: cfg,
        results: Vec::new(),
        gi: Some(gi),
    };
    emit_json(&report, out.or(cfg.output.report.as_deref()))
}

#[derive(Serialize)]
struct SweepRow {
    parameter: &'static str,
    value: String,
    trials: u64,
    accepted: u64,
    aborted: u64,
    acceptance_rate: f64,
    rejection_rate: f64,
    ci_low: f64,
    ci_high: f64,
    oracle_acceptance: Option<f64>,
}

fn protocol_row(cfg: &ExperimentConfig, parameter: &'static str, value: String) -> Result<SweepRow, CliError> {
    let specs = cfg.run_specs()?;
    let [spec] = &specs[..] else {
        return Err(CliError::Config("sweep: exactly one strategy is required".into()));
    };
    let s = estimate(spec, cfg.trials, cfg.parallelism)?;
    Ok(SweepRow {
        parameter,
        value,
        trials: s.trials,
        accepted: s.accepted,
        aborted: s.aborted,
        acceptance_rate: s.acceptance_rate,
        rejection_rate: 1.0 - s.acceptance_rate,
        ci_low: s.interval.low,
        ci_high: s.interval.high,
        oracle_acceptance: oracle_for(spec)?,
    })
}

pub fn sweep(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<(), CliError> {
    let axis = cfg.sweep.as_ref().ok_or_else(|| CliError::Config("missing section `sweep`".into()))?.axis()?;
    let mut rows = Vec::new();
    match axis {
        SweepAxis::Theta(values) => {
            for theta in values {
                let mut c = cfg.clone();
                match c.strategy_list()?.as_slice() {
                    [ProverStrategy::RandomUnitary { step, wire, .. }] => {
                        c.strategy = Some(ProverStrategy::RandomUnitary { step: *step, wire: *wire, theta });
                        c.strategies.clear();
                    }
                    _ => return Err(CliError::Config("sweep.theta: needs a single random_unitary strategy".into())),
                }
                rows.push(protocol_row(&c, "theta", theta.to_string())?);
            }
        }
        SweepAxis::Trials(values) => {
            for trials in values {
                let c = ExperimentConfig { trials, ..cfg.clone() };
                rows.push(protocol_row(&c, "trials", trials.to_string())?);
            }
        }
        SweepAxis::MemoryBound(values) => {
            for bound in values {
                let c = ExperimentConfig { memory_bound: Some(bound), ..cfg.clone() };
                rows.push(protocol_row(&c, "memory_bound", bound.to_string())?);
            }
        }
        SweepAxis::K(values) => {
            for k in values {
                let mut c = cfg.clone();
                c.gi.as_mut().ok_or_else(|| CliError::Config("sweep.k: missing section `gi`".into()))?.k = k;
                let g = gi_result(&c)?;
                rows.push(SweepRow {
                    parameter: "k",
                    value: k.to_string(),
                    trials: g.runs,
                    accepted: g.convinced,
                    aborted: 0,
                    acceptance_rate: g.convince_rate,
                    rejection_rate: 1.0 - g.convince_rate,
                    ci_low: g.convince_interval.low,
                    ci_high: g.convince_interval.high,
                    oracle_acceptance: Some(g.oracle_convince),
                });
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &rows {
        w.serialize(row).map_err(|e| CliError::Internal(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Internal(format!("csv: {e}")))?;
    emit(&String::from_utf8_lossy(&bytes), out.or(cfg.output.report.as_deref()))
}

pub fn oracle_clifford_table() -> Result<(), CliError> {
    let cert = shared_clifford_table().certificate();
    emit_json(cert, None)
}

#[derive(Serialize)]
struct Detection<'a> {
    scheme: &'static str,
    attack: &'a str,
    rejection: f64,
    acceptance: f64,
}

pub fn oracle_detection(attack: &str, params: Option<(CodeParams, u64)>) -> Result<(), CliError> {
    let (scheme, acceptance) = match params {
        None => {
            let p: PauliString = attack.parse().map_err(|e: qpip::Error| CliError::Config(e.to_string()))?;
            if p.len() != 2 {
                return Err(CliError::Config(format!("attack {attack:?} must name two qubit Paulis")));
            }
            let a = BlockAttack::Unitary { sites: vec![0, 1], matrix: p.matrix() };
            ("clifford", clifford_block_pass(shared_clifford_table(), &a)?)
        }
        Some((params, logical)) => {
            let p = GeneralizedPauli::parse(params.q(), attack).map_err(|e| CliError::Config(e.to_string()))?;
            if p.len() != params.m() {
                return Err(CliError::Config(format!("attack {attack:?} needs {} site pairs", params.m())));
            }
            let state = logical_basis(params.q(), logical);
            ("polynomial", poly_block_pass(&params, &state, &BlockAttack::Pauli(p))?)
        }
    };
    emit_json(&Detection { scheme, attack, rejection: 1.0 - acceptance, acceptance }, None)
}

#[derive(Serialize)]
struct CodeEnumeration {
    q: u64,
    d: usize,
    m: usize,
    a: u64,
    signs: Vec<i8>,
    count: usize,
    codewords: Vec<Vec<u64>>,
}

pub fn oracle_code_enum(params: CodeParams, a: u64, signs: Option<Vec<i8>>) -> Result<(), CliError> {
    let signs = signs.unwrap_or_else(|| vec![1; params.m()]);
    if signs.len() != params.m() {
        return Err(CliError::Config(format!("--signs needs {} entries", params.m())));
    }
    if a >= params.q() {
        return Err(CliError::Config(format!("--a must be below q = {}", params.q())));
    }
    let key = SignKey::from_signs(&params, &signs)?;
    let words = enumerate_codewords(&params, &key, params.field().elem(a as i64))?;
    let codewords: Vec<Vec<u64>> = words.iter().map(|w| w.values.iter().map(|v| v.value()).collect()).collect();
    emit_json(
        &CodeEnumeration { q: params.q(), d: params.d(), m: params.m(), a, signs, count: codewords.len(), codewords },
        None,
    )
}

#[derive(Serialize)]
struct FactorCheck<'a> {
    n: u64,
    factors: &'a [u64],
    valid: bool,
}

pub fn factor_verify(n: u64, factors: &[u64]) -> Result<(), CliError> {
    let valid = verify_factoring(n, factors)?;
    emit_json(&FactorCheck { n, factors, valid }, None)
}
