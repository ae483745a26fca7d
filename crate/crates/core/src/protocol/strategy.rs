use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::circuit::{Circuit, Scheme};
use crate::error::{Error, Result};
use crate::groups::{GeneralizedPauli, PauliString};
use crate::linalg::CMatrix;
use crate::mathcore::CodeParams;
use crate::qas::BlockAttack;

/// How the prover treats the registers it holds.
///
/// `step` counts completed gates: step 0 is right after the initial encoding, step `T`
/// is just before the final recall of a `T`-gate circuit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProverStrategy {
    Honest,
    /// Apply a fixed Pauli to one block. Clifford: two letters such as `"XZ"` over
    /// `(data, check)`. Polynomial: `"l:n,…"` with one pair per block site.
    FixedPauli { step: usize, wire: usize, pauli: String },
    /// Clifford: `cos θ·I + i sin θ·G` with `G` a uniformly random non-identity two-qubit
    /// Pauli. Polynomial: `exp(iθ(P+P†)/2)` on a uniformly random site with `P` a uniformly
    /// random non-identity `X^l Z^n`.
    RandomUnitary { step: usize, wire: usize, theta: f64 },
    /// Discard every received register and return `|0…0⟩` when asked.
    NoMemory,
    /// Measure every received register in the computational basis and return the result.
    MeasureAndResend,
}

impl ProverStrategy {
    pub fn label(&self) -> &'static str {
        match self {
            ProverStrategy::Honest => "honest",
            ProverStrategy::FixedPauli { .. } => "fixed_pauli",
            ProverStrategy::RandomUnitary { .. } => "random_unitary",
            ProverStrategy::NoMemory => "no_memory",
            ProverStrategy::MeasureAndResend => "measure_and_resend",
        }
    }

    pub fn validate(&self, scheme: Scheme, params: &CodeParams, circuit: &Circuit) -> Result<()> {
        let (step, wire) = match self {
            ProverStrategy::FixedPauli { step, wire, .. } | ProverStrategy::RandomUnitary { step, wire, .. } => {
                (*step, *wire)
            }
            _ => return Ok(()),
        };
        if wire >= circuit.width() {
            return Err(Error::Config(format!("attack wire {wire} beyond circuit width {}", circuit.width())));
        }
        if step > circuit.len() {
            return Err(Error::Config(format!("attack step {step} beyond circuit length {}", circuit.len())));
        }
        if let ProverStrategy::FixedPauli { pauli, .. } = self {
            match scheme {
                Scheme::Clifford => {
                    clifford_pauli(pauli)?;
                }
                Scheme::Polynomial => {
                    poly_pauli(pauli, params)?;
                }
            }
        }
        if let ProverStrategy::RandomUnitary { theta, .. } = self {
            if !theta.is_finite() {
                return Err(Error::Config(format!("attack strength {theta} is not finite")));
            }
        }
        Ok(())
    }

    /// Step and wire of a one-shot attack.
    pub fn target(&self) -> Option<(usize, usize)> {
        match self {
            ProverStrategy::FixedPauli { step, wire, .. } | ProverStrategy::RandomUnitary { step, wire, .. } => {
                Some((*step, *wire))
            }
            _ => None,
        }
    }
}

pub(crate) fn clifford_pauli(s: &str) -> Result<PauliString> {
    let p: PauliString = s.parse()?;
    if p.len() != 2 {
        return Err(Error::Config(format!("Clifford block Pauli {s:?} must have two letters")));
    }
    Ok(p)
}

pub(crate) fn poly_pauli(s: &str, params: &CodeParams) -> Result<GeneralizedPauli> {
    let p = GeneralizedPauli::parse(params.q(), s)?;
    if p.len() != params.m() {
        return Err(Error::Config(format!("block Pauli {s:?} needs {} site pairs", params.m())));
    }
    Ok(p)
}

/// `cos θ·I + i sin θ·G` for a two-qubit Pauli `G`.
pub fn clifford_rotation(g: &PauliString, theta: f64) -> CMatrix {
    CMatrix::identity(4)
        .scale(Complex64::new(theta.cos(), 0.0))
        .add(&g.matrix().scale(Complex64::new(0.0, theta.sin())))
}

/// `exp(iθ(P+P†)/2)` for a single-site generalized Pauli `P = X^l Z^n`.
pub fn qudit_rotation(q: u64, l: u64, n: u64, theta: f64) -> CMatrix {
    let p = GeneralizedPauli::new(q, vec![(l, n)]).matrix();
    let h = p.add(&p.adjoint()).scale(Complex64::new(0.5, 0.0));
    CMatrix::expm_i_hermitian(&h, theta)
}

pub(crate) fn non_identity_two_qubit_paulis() -> Vec<PauliString> {
    PauliString::all(2).into_iter().filter(|p| !p.is_identity()).collect()
}

pub(crate) fn non_identity_site_paulis(q: u64) -> Vec<(u64, u64)> {
    (0..q).flat_map(|l| (0..q).map(move |n| (l, n))).filter(|&p| p != (0, 0)).collect()
}

/// The prover's random choice for a random-unitary attack on a Clifford block.
pub(crate) fn draw_clifford_rotation<R: Rng + ?Sized>(theta: f64, rng: &mut R) -> CMatrix {
    let all = non_identity_two_qubit_paulis();
    clifford_rotation(&all[rng.gen_range(0..all.len())], theta)
}

/// The prover's random choice for a random-unitary attack on a polynomial block:
/// returns the site and the matrix.
pub(crate) fn draw_qudit_rotation<R: Rng + ?Sized>(params: &CodeParams, theta: f64, rng: &mut R) -> (usize, CMatrix) {
    let site = rng.gen_range(0..params.m());
    let all = non_identity_site_paulis(params.q());
    let (l, n) = all[rng.gen_range(0..all.len())];
    (site, qudit_rotation(params.q(), l, n, theta))
}

/// The block-level attack a one-shot strategy amounts to, averaged over the prover's own
/// random choices. Used by the exact protocol oracle.
pub fn one_shot_block_attack(strategy: &ProverStrategy, scheme: Scheme, params: &CodeParams) -> Result<BlockAttack> {
    Ok(match (strategy, scheme) {
        (ProverStrategy::FixedPauli { pauli, .. }, Scheme::Clifford) => BlockAttack::Unitary {
            sites: vec![0, 1],
            matrix: clifford_pauli(pauli)?.matrix(),
        },
        (ProverStrategy::FixedPauli { pauli, .. }, Scheme::Polynomial) => BlockAttack::Pauli(poly_pauli(pauli, params)?),
        (ProverStrategy::RandomUnitary { theta, .. }, Scheme::Clifford) => {
            let all = non_identity_two_qubit_paulis();
            let w = 1.0 / all.len() as f64;
            BlockAttack::Mixture(
                all.iter()
                    .map(|g| (w, BlockAttack::Unitary { sites: vec![0, 1], matrix: clifford_rotation(g, *theta) }))
                    .collect(),
            )
        }
        (ProverStrategy::RandomUnitary { theta, .. }, Scheme::Polynomial) => {
            let all = non_identity_site_paulis(params.q());
            let w = 1.0 / (all.len() * params.m()) as f64;
            BlockAttack::Mixture(
                (0..params.m())
                    .flat_map(|site| {
                        all.iter().map(move |&(l, n)| {
                            (w, BlockAttack::Unitary { sites: vec![site], matrix: qudit_rotation(params.q(), l, n, *theta) })
                        })
                    })
                    .collect(),
            )
        }
        _ => return Err(Error::Config(format!("{} is not a one-shot attack", strategy.label()))),
    })
}
