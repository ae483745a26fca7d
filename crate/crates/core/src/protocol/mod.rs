//! The verifier/prover engine, adversarial provers, Monte Carlo estimation, and the
//! classical interactive-proof demos.

mod channel;
mod circuit;
mod engine;
mod estimate;
mod factoring;
mod gi;
mod oracle;
mod replay;
mod strategy;

pub use channel::{CheckRecord, MemoryViolation, Message, MessageKind, Party, Payload, Registry, Transcript};
pub use circuit::{Circuit, Gate, Scheme};
pub use engine::{run_clifford_protocol, run_poly_protocol, run_protocol, Outcome, TrialResult, VerifierConfig};
pub use estimate::{estimate, EstimateSummary, RunSpec};
pub use factoring::verify_factoring;
pub use gi::{gi_convince_probability, run_gi_bijection, run_gi_protocol, BijectionRound, GiRun, GiStrategy, Graph};
pub use oracle::{clifford_holding_periods, exact_acceptance};
pub use replay::{replay_verifier, ReplayReport};
pub use strategy::{clifford_rotation, one_shot_block_attack, qudit_rotation, ProverStrategy};
