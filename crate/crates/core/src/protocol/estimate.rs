use rayon::prelude::*;
use serde::Serialize;

use super::circuit::Circuit;
use super::engine::{run_protocol, Outcome, TrialResult, VerifierConfig};
use super::strategy::ProverStrategy;
use crate::config::Z_95;
use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::stats::{wilson_interval, Interval};

/// Everything needed to run one trial.
#[derive(Clone, Debug)]
pub struct RunSpec {
    pub circuit: Circuit,
    pub input: Vec<u64>,
    pub strategy: ProverStrategy,
    pub config: VerifierConfig,
}

impl RunSpec {
    /// Trial `index`, drawing from the sub-stream `(config.seed, index)`.
    pub fn run_trial(&self, index: u64) -> Result<TrialResult> {
        let mut rng = RandomStream::for_trial(self.config.seed, index);
        run_protocol(&self.circuit, &self.input, &self.strategy, &self.config, &mut rng)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateSummary {
    pub trials: u64,
    pub accepted: u64,
    pub rejected: u64,
    /// Counted as rejections in the rate, reported separately here.
    pub aborted: u64,
    pub acceptance_rate: f64,
    pub interval: Interval,
    pub mean_fidelity_given_acceptance: Option<f64>,
    pub min_fidelity_given_acceptance: Option<f64>,
    pub peak_verifier_memory: usize,
}

struct TrialDigest {
    outcome: Outcome,
    fidelity: Option<f64>,
    peak: usize,
}

/// Run `trials` independent trials on `parallelism` threads. Results depend only on the
/// master seed, never on the thread count.
pub fn estimate(spec: &RunSpec, trials: u64, parallelism: usize) -> Result<EstimateSummary> {
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::Invariant(format!("thread pool: {e}")))?;
    let digests: Vec<TrialDigest> = pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|i| {
                spec.run_trial(i).map(|r| TrialDigest {
                    outcome: r.outcome,
                    fidelity: r.logical_fidelity,
                    peak: r.peak_verifier_memory,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(summarize(&digests))
}

fn summarize(digests: &[TrialDigest]) -> EstimateSummary {
    let trials = digests.len() as u64;
    let count = |f: fn(&Outcome) -> bool| digests.iter().filter(|d| f(&d.outcome)).count() as u64;
    let accepted = count(|o| *o == Outcome::Accepted);
    let rejected = count(|o| *o == Outcome::Rejected);
    let aborted = count(|o| matches!(o, Outcome::Aborted(_)));
    let fidelities: Vec<f64> = digests.iter().filter_map(|d| d.fidelity).collect();
    let mean = (!fidelities.is_empty()).then(|| fidelities.iter().sum::<f64>() / fidelities.len() as f64);
    let min = fidelities.iter().copied().reduce(f64::min);
    EstimateSummary {
        trials,
        accepted,
        rejected,
        aborted,
        acceptance_rate: accepted as f64 / trials as f64,
        interval: wilson_interval(accepted, trials, Z_95),
        mean_fidelity_given_acceptance: mean,
        min_fidelity_given_acceptance: min,
        peak_verifier_memory: digests.iter().map(|d| d.peak).max().unwrap_or(0),
    }
}
