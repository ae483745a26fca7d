//! Exact acceptance probability of a whole protocol run, assembled from the block-level
//! key-averaged oracles.
//!
//! Each time the verifier recalls a block it has just drawn (or will check against) a
//! fresh, independent key, and the key-averaged pass probability of a block does not
//! depend on what the block encodes. Acceptance is therefore the product of per-recall
//! pass probabilities. For the polynomial scheme, honest transversal gates after an
//! attack map the keyed code space onto the updated keyed code space, so the pass
//! probability is fixed at the moment of the attack.

use super::circuit::{Circuit, Scheme};
use super::engine::VerifierConfig;
use super::strategy::{one_shot_block_attack, ProverStrategy};
use crate::error::Result;
use crate::groups::shared_clifford_table;
use crate::qas::{clifford_block_pass, poly_block_pass, BlockAttack};

/// Number of times a block is handed to the prover in the Clifford protocol.
pub fn clifford_holding_periods(circuit: &Circuit) -> usize {
    circuit.width() + circuit.gates().iter().map(|g| g.wires().len()).sum::<usize>()
}

/// Exact probability that `strategy` is accepted, ignoring memory-bound aborts.
pub fn exact_acceptance(
    circuit: &Circuit,
    input: &[u64],
    strategy: &ProverStrategy,
    config: &VerifierConfig,
) -> Result<f64> {
    let params = &config.params;
    strategy.validate(config.scheme, params, circuit)?;
    let p = match (config.scheme, strategy) {
        (_, ProverStrategy::Honest) => Ok(1.0),
        (Scheme::Clifford, ProverStrategy::NoMemory | ProverStrategy::MeasureAndResend) => {
            let attack = if *strategy == ProverStrategy::NoMemory {
                BlockAttack::Fabricate
            } else {
                BlockAttack::MeasureComputational
            };
            let pass = clifford_block_pass(shared_clifford_table(), &attack)?;
            Ok(pass.powi(clifford_holding_periods(circuit) as i32))
        }
        (Scheme::Clifford, _) => {
            clifford_block_pass(shared_clifford_table(), &one_shot_block_attack(strategy, Scheme::Clifford, params)?)
        }
        (Scheme::Polynomial, ProverStrategy::NoMemory | ProverStrategy::MeasureAndResend) => {
            let attack = if *strategy == ProverStrategy::NoMemory {
                BlockAttack::Fabricate
            } else {
                BlockAttack::MeasureComputational
            };
            let mut total = 1.0;
            for logical in circuit.ideal_logical_states(input, params.q(), 0)? {
                total *= poly_block_pass(params, &logical, &attack)?;
            }
            Ok(total)
        }
        (Scheme::Polynomial, _) => {
            let (step, wire) = strategy.target().expect("one-shot strategies have a target");
            let logical = circuit.ideal_logical_states(input, params.q(), step)?.swap_remove(wire);
            poly_block_pass(params, &logical, &one_shot_block_attack(strategy, Scheme::Polynomial, params)?)
        }
    }?;
    Ok(p.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mathcore::CodeParams;
    use crate::protocol::Gate;

    #[test]
    fn bell_circuit_oracles() {
        let c = Circuit::bell();
        let cfg = VerifierConfig::clifford(0);
        assert_eq!(clifford_holding_periods(&c), 6);
        let nm = exact_acceptance(&c, &[0, 0], &ProverStrategy::NoMemory, &cfg).unwrap();
        assert!((nm - 0.5f64.powi(6)).abs() < 1e-9);
        let mr = exact_acceptance(&c, &[0, 0], &ProverStrategy::MeasureAndResend, &cfg).unwrap();
        assert!((mr - 0.6f64.powi(6)).abs() < 1e-9);
        let ru = ProverStrategy::RandomUnitary { step: 1, wire: 0, theta: std::f64::consts::FRAC_PI_2 };
        assert!((exact_acceptance(&c, &[0, 0], &ru, &cfg).unwrap() - 7.0 / 15.0).abs() < 1e-9);
    }

    #[test]
    fn zero_strength_rotation_is_harmless() {
        let params = CodeParams::desk();
        let c = Circuit::new(1, vec![Gate::Fourier { wire: 0 }]).unwrap();
        let cfg = VerifierConfig::polynomial(params, 0);
        let ru = ProverStrategy::RandomUnitary { step: 1, wire: 0, theta: 0.0 };
        assert!((exact_acceptance(&c, &[2], &ru, &cfg).unwrap() - 1.0).abs() < 1e-9);
    }
}
