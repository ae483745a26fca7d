//! Verifier and prover for the two circuit-execution protocols.
//!
//! Clifford scheme: the prover only stores blocks. For every gate the verifier recalls the
//! blocks involved, checks and decodes them, applies the gate, re-encodes under fresh keys
//! and sends them back.
//!
//! Polynomial scheme: the verifier encodes every input once. Afterwards only classical
//! messages flow. `X_q` is a key update and the Fourier gate is an instruction to the
//! prover plus a key update. At the end every block is recalled and checked against the
//! signed code space.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::channel::{CheckRecord, Party, Payload, Registry, Transcript};
use super::circuit::{Circuit, Gate, Scheme};
use super::strategy::{clifford_pauli, draw_clifford_rotation, draw_qudit_rotation, poly_pauli, ProverStrategy};
use crate::error::{Error, Result};
use crate::groups::{qudit_x, shared_clifford_table, CliffordTable};
use crate::linalg::CMatrix;
use crate::mathcore::{CodeParams, SignKey};
use crate::qas::{
    code_space_projector, fourier_key_update, gate_xq, remove_pauli_key, signed_code_vector,
    transversal_fourier_matrices, CliffordAuthKey, PauliKey, PolyAuthKey,
};
use crate::qsim::{LocalOperator, Projector, QuditState, SubsystemLayout};
use crate::rng::RandomStream;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug)]
pub struct VerifierConfig {
    pub scheme: Scheme,
    /// Largest number of registers the verifier may own at once.
    pub memory_bound: usize,
    pub params: CodeParams,
    /// Master seed; trial `i` uses the sub-stream `(seed, i)`.
    pub seed: u64,
    /// Record key material in each trial result.
    pub log_keys: bool,
}

impl VerifierConfig {
    pub fn clifford(seed: u64) -> Self {
        Self { scheme: Scheme::Clifford, memory_bound: 4, params: CodeParams::desk(), seed, log_keys: false }
    }

    pub fn polynomial(params: CodeParams, seed: u64) -> Self {
        Self { scheme: Scheme::Polynomial, memory_bound: 4, params, seed, log_keys: false }
    }

    pub fn with_memory_bound(mut self, c: usize) -> Self {
        self.memory_bound = c;
        self
    }

    /// Smallest bound with which every supported circuit runs: three for the sequenced
    /// Clifford verifier, one block of `m` registers for the polynomial verifier.
    pub fn minimum_memory(scheme: Scheme, params: &CodeParams) -> usize {
        match scheme {
            Scheme::Clifford => 3,
            Scheme::Polynomial => params.m(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", content = "reason", rename_all = "snake_case")]
pub enum Outcome {
    Accepted,
    Rejected,
    Aborted(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialResult {
    pub outcome: Outcome,
    pub accepted: bool,
    /// Overlap of the decoded output with the ideal circuit output, computed by the
    /// engine out of band. `None` unless the run was accepted.
    pub logical_fidelity: Option<f64>,
    /// Per wire, the probability of each logical basis value in the decoded output.
    pub output_marginals: Vec<Vec<f64>>,
    pub transcript: Transcript,
    pub verifier_seed: u64,
    pub peak_verifier_memory: usize,
    /// Key material in the order it was drawn, when key logging is on.
    pub keys: Vec<serde_json::Value>,
    #[serde(skip)]
    pub final_state: Option<QuditState>,
}

/// Early exit from a protocol run.
enum Halt {
    Reject,
    Abort(String),
    Fail(Error),
}

impl From<Error> for Halt {
    fn from(e: Error) -> Self {
        Halt::Fail(e)
    }
}

type Flow<T> = std::result::Result<T, Halt>;

/// Everything outside the verifier: the joint state, ownership, transcript and the source
/// of measurement randomness.
struct World {
    state: QuditState,
    registry: Registry,
    transcript: Transcript,
    nature: RandomStream,
    step: usize,
}

impl World {
    fn new(layout: SubsystemLayout, bound: usize, nature: RandomStream) -> Self {
        let sites = layout.num_sites();
        Self {
            state: QuditState::zero(layout),
            registry: Registry::new(sites, bound),
            transcript: Transcript::default(),
            nature,
            step: 0,
        }
    }

    fn transfer(&mut self, sites: &[usize], from: Party, to: Party) -> Flow<()> {
        self.registry.transfer(sites, from, to)?.map_err(|v| Halt::Abort(v.to_string()))
    }

    fn message(&mut self, sender: Party, receiver: Party, payload: Payload) {
        self.transcript.push(self.step, sender, receiver, payload);
    }

    fn apply(&mut self, owner: Party, op: &LocalOperator) -> Flow<()> {
        self.registry.require(op.sites(), owner)?;
        self.state.apply(op)?;
        Ok(())
    }
}

struct Prover {
    strategy: ProverStrategy,
    rng: RandomStream,
    scheme: Scheme,
    params: CodeParams,
}

impl Prover {
    fn on_receive(&mut self, world: &mut World, sites: &[usize]) -> Flow<()> {
        world.registry.require(sites, Party::Prover)?;
        match self.strategy {
            ProverStrategy::NoMemory => {
                // Discarding is indistinguishable, for everyone else, from measuring and
                // forgetting; the freed sites then hold the |0…0⟩ to be returned.
                for &s in sites {
                    world.state.reset_site(s, &mut world.nature)?;
                }
            }
            ProverStrategy::MeasureAndResend => {
                for &s in sites {
                    world.state.measure_site(s, &mut world.nature)?;
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Called once per step with the sites of every block the prover holds.
    fn act(&mut self, world: &mut World, blocks: &[(usize, Vec<usize>)]) -> Flow<()> {
        let Some((step, wire)) = self.strategy.target() else {
            return Ok(());
        };
        if step != world.step {
            return Ok(());
        }
        let sites = blocks
            .iter()
            .find(|(w, _)| *w == wire)
            .map(|(_, s)| s.clone())
            .ok_or_else(|| Error::Invariant(format!("prover does not hold wire {wire} at step {step}")))?;
        let op = match (&self.strategy, self.scheme) {
            (ProverStrategy::FixedPauli { pauli, .. }, Scheme::Clifford) => clifford_pauli(pauli)?.operator(sites),
            (ProverStrategy::FixedPauli { pauli, .. }, Scheme::Polynomial) => {
                poly_pauli(pauli, &self.params)?.operator(sites)
            }
            (ProverStrategy::RandomUnitary { theta, .. }, Scheme::Clifford) => {
                LocalOperator::unitary(sites, draw_clifford_rotation(*theta, &mut self.rng))?
            }
            (ProverStrategy::RandomUnitary { theta, .. }, Scheme::Polynomial) => {
                let (site, m) = draw_qudit_rotation(&self.params, *theta, &mut self.rng);
                LocalOperator::unitary(vec![sites[site]], m)?
            }
            _ => return Ok(()),
        };
        world.apply(Party::Prover, &op)
    }

    fn on_fourier(&mut self, world: &mut World, sites: &[usize], gates: &[CMatrix]) -> Flow<()> {
        if self.strategy == ProverStrategy::NoMemory {
            return Ok(());
        }
        for (&s, f) in sites.iter().zip(gates) {
            world.apply(Party::Prover, &LocalOperator::unitary(vec![s], f.clone())?)?;
        }
        Ok(())
    }
}

fn streams(rng: &mut RandomStream) -> (u64, RandomStream, RandomStream) {
    let verifier_seed = rng.fork_seed();
    let prover = rng.fork();
    let nature = rng.fork();
    (verifier_seed, prover, nature)
}

fn finish(
    halt: Flow<()>,
    world: World,
    verifier_seed: u64,
    keys: Vec<serde_json::Value>,
    score: impl FnOnce(&QuditState) -> Result<(f64, Vec<Vec<f64>>)>,
) -> Result<TrialResult> {
    let mut transcript = world.transcript;
    let outcome = match halt {
        Ok(()) => Outcome::Accepted,
        Err(Halt::Reject) => Outcome::Rejected,
        Err(Halt::Abort(reason)) => {
            transcript.aborted = Some(reason.clone());
            Outcome::Aborted(reason)
        }
        Err(Halt::Fail(e)) => return Err(e),
    };
    let accepted = outcome == Outcome::Accepted;
    let (logical_fidelity, output_marginals) = if accepted {
        let (f, m) = score(&world.state)?;
        (Some(f.clamp(0.0, 1.0)), m)
    } else {
        (None, Vec::new())
    };
    Ok(TrialResult {
        outcome,
        accepted,
        logical_fidelity,
        output_marginals,
        transcript,
        verifier_seed,
        peak_verifier_memory: world.registry.peak_verifier(),
        keys,
        final_state: Some(world.state),
    })
}

// ---------------------------------------------------------------------------------------
// Clifford scheme

struct CliffordVerifier<'t> {
    table: &'t CliffordTable,
    rng: RandomStream,
    keys: Vec<Option<CliffordAuthKey>>,
    log: Option<Vec<serde_json::Value>>,
}

fn data_site(wire: usize) -> usize {
    2 * wire
}

fn check_site(wire: usize) -> usize {
    2 * wire + 1
}

fn block(wire: usize) -> Vec<usize> {
    vec![data_site(wire), check_site(wire)]
}

impl CliffordVerifier<'_> {
    fn fresh_key(&mut self, wire: usize, step: usize) -> CliffordAuthKey {
        let key = CliffordAuthKey::random(self.table, &mut self.rng);
        if let Some(log) = &mut self.log {
            log.push(serde_json::json!({ "step": step, "wire": wire, "clifford": key.element().index() }));
        }
        key
    }

    /// Encode the verifier-held data and check sites of `wire` and send the block.
    fn encode_and_send(&mut self, world: &mut World, prover: &mut Prover, wire: usize) -> Flow<()> {
        let key = self.fresh_key(wire, world.step);
        world.apply(Party::Verifier, &key.encoder([data_site(wire), check_site(wire)]))?;
        self.keys[wire] = Some(key);
        world.transfer(&block(wire), Party::Verifier, Party::Prover)?;
        world.message(Party::Verifier, Party::Prover, Payload::Registers { wire, sites: block(wire) });
        prover.on_receive(world, &block(wire))
    }

    /// Recall, decode and check one block. Leaves data and check with the verifier.
    fn recall_and_check(&mut self, world: &mut World, wire: usize) -> Flow<()> {
        world.message(Party::Verifier, Party::Prover, Payload::Return { wire });
        world.transfer(&block(wire), Party::Prover, Party::Verifier)?;
        world.message(Party::Prover, Party::Verifier, Payload::Registers { wire, sites: block(wire) });
        let key = self.keys[wire].take().ok_or_else(|| Error::Invariant(format!("no key for wire {wire}")))?;
        world.apply(Party::Verifier, &key.decoder([data_site(wire), check_site(wire)]))?;
        let check = Projector::basis_state(vec![check_site(wire)], 2, 0)?;
        let (passed, _) = world.state.measure(&check, &mut world.nature)?;
        world.transcript.checks.push(CheckRecord { step: world.step, wire, passed });
        if passed {
            Ok(())
        } else {
            Err(Halt::Reject)
        }
    }
}

fn held_blocks(width: usize) -> Vec<(usize, Vec<usize>)> {
    (0..width).map(|w| (w, block(w))).collect()
}

fn run_clifford_inner(
    circuit: &Circuit,
    input: &[u64],
    verifier: &mut CliffordVerifier<'_>,
    prover: &mut Prover,
    world: &mut World,
) -> Flow<()> {
    let n = circuit.width();
    for (wire, &bit) in input.iter().enumerate() {
        world.transfer(&block(wire), Party::Pool, Party::Verifier)?;
        if bit == 1 {
            world.apply(Party::Verifier, &LocalOperator::unitary(vec![data_site(wire)], qudit_x(2))?)?;
        }
        verifier.encode_and_send(world, prover, wire)?;
    }
    prover.act(world, &held_blocks(n))?;

    for (i, gate) in circuit.gates().iter().enumerate() {
        let Gate::Unitary { wires, matrix, .. } = gate else {
            return Err(Error::Config(format!("gate {} is not a Clifford-scheme gate", gate.name())).into());
        };
        let op = LocalOperator::unitary(wires.iter().map(|&w| data_site(w)).collect(), matrix.clone())?;
        let sequenced = 2 * wires.len() > world.registry.bound();
        if sequenced && wires.len() == 2 {
            let (a, b) = (wires[0], wires[1]);
            verifier.recall_and_check(world, a)?;
            world.transfer(&[check_site(a)], Party::Verifier, Party::Pool)?;
            verifier.recall_and_check(world, b)?;
            world.apply(Party::Verifier, &op)?;
            verifier.encode_and_send(world, prover, b)?;
            world.transfer(&[check_site(a)], Party::Pool, Party::Verifier)?;
            verifier.encode_and_send(world, prover, a)?;
        } else {
            for &w in wires {
                verifier.recall_and_check(world, w)?;
            }
            world.apply(Party::Verifier, &op)?;
            for &w in wires {
                verifier.encode_and_send(world, prover, w)?;
            }
        }
        world.step = i + 1;
        prover.act(world, &held_blocks(n))?;
    }

    for wire in 0..n {
        verifier.recall_and_check(world, wire)?;
        world.transfer(&[data_site(wire)], Party::Verifier, Party::Output)?;
        world.transfer(&[check_site(wire)], Party::Verifier, Party::Pool)?;
    }
    Ok(())
}

/// Run the store-and-recall protocol of the Clifford scheme once.
pub fn run_clifford_protocol(
    circuit: &Circuit,
    input: &[u64],
    strategy: &ProverStrategy,
    config: &VerifierConfig,
    rng: &mut RandomStream,
) -> Result<TrialResult> {
    circuit.check_scheme(Scheme::Clifford)?;
    circuit.check_input(input, 2)?;
    strategy.validate(Scheme::Clifford, &config.params, circuit)?;
    let (verifier_seed, prover_rng, nature) = streams(rng);
    let mut verifier = CliffordVerifier {
        table: shared_clifford_table(),
        rng: RandomStream::new(verifier_seed),
        keys: vec![None; circuit.width()],
        log: config.log_keys.then(Vec::new),
    };
    let mut prover = Prover { strategy: strategy.clone(), rng: prover_rng, scheme: Scheme::Clifford, params: config.params };
    let mut world = World::new(SubsystemLayout::uniform(2 * circuit.width(), 2)?, config.memory_bound, nature);
    let halt = run_clifford_inner(circuit, input, &mut verifier, &mut prover, &mut world);
    let keys = verifier.log.take().unwrap_or_default();
    let n = circuit.width();
    finish(halt, world, verifier_seed, keys, |state| {
        let ideal = circuit.ideal_qubit_output(input)?;
        let data: Vec<usize> = (0..n).map(data_site).collect();
        let fidelity = state.site_overlap(&data, ideal.amplitudes())?;
        let marginals = (0..n)
            .map(|w| {
                (0..2)
                    .map(|b| {
                        let mut t = [ZERO; 2];
                        t[b] = Complex64::new(1.0, 0.0);
                        state.site_overlap(&[data_site(w)], &t)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((fidelity, marginals))
    })
}

// ---------------------------------------------------------------------------------------
// Polynomial scheme

struct PolyVerifier {
    params: CodeParams,
    sign: SignKey,
    keys: Vec<PolyAuthKey>,
    log: Option<Vec<serde_json::Value>>,
}

fn poly_block(params: &CodeParams, wire: usize) -> Vec<usize> {
    (wire * params.m()..(wire + 1) * params.m()).collect()
}

impl PolyVerifier {
    fn new(params: CodeParams, width: usize, rng: &mut RandomStream, log_keys: bool) -> Self {
        let sign = SignKey::random(&params, rng);
        let keys: Vec<PolyAuthKey> = (0..width)
            .map(|_| PolyAuthKey { sign: sign.clone(), pauli: PauliKey::random(&params, rng) })
            .collect();
        let log = log_keys.then(|| {
            let mut log = vec![serde_json::json!({ "step": 0, "sign": sign })];
            log.extend(keys.iter().enumerate().map(|(w, k)| serde_json::json!({ "step": 0, "wire": w, "pauli": k.pauli })));
            log
        });
        Self { params, sign, keys, log }
    }

    fn note(&mut self, step: usize, wire: usize) {
        if let Some(log) = &mut self.log {
            log.push(serde_json::json!({ "step": step, "wire": wire, "pauli": self.keys[wire].pauli }));
        }
    }
}

fn run_poly_inner(
    circuit: &Circuit,
    input: &[u64],
    verifier: &mut PolyVerifier,
    prover: &mut Prover,
    world: &mut World,
) -> Flow<()> {
    let params = verifier.params;
    let n = circuit.width();
    for (wire, &a) in input.iter().enumerate() {
        let sites = poly_block(&params, wire);
        world.transfer(&sites, Party::Pool, Party::Verifier)?;
        let encoded = crate::qas::poly_encode(params.field().elem(a as i64), &params, &verifier.keys[wire])?;
        world.state.prepare_sites(&sites, encoded.amplitudes())?;
        world.transfer(&sites, Party::Verifier, Party::Prover)?;
        world.message(Party::Verifier, Party::Prover, Payload::Registers { wire, sites: sites.clone() });
        prover.on_receive(world, &sites)?;
    }
    let blocks: Vec<(usize, Vec<usize>)> = (0..n).map(|w| (w, poly_block(&params, w))).collect();
    prover.act(world, &blocks)?;

    let fourier = if circuit.gates().iter().any(|g| matches!(g, Gate::Fourier { .. })) {
        transversal_fourier_matrices(&params)?
    } else {
        Vec::new()
    };
    for (i, gate) in circuit.gates().iter().enumerate() {
        match *gate {
            Gate::Xq { wire } => {
                verifier.keys[wire] = gate_xq(&verifier.keys[wire]);
            }
            Gate::Fourier { wire } => {
                world.message(Party::Verifier, Party::Prover, Payload::ApplyFourier { wire });
                prover.on_fourier(world, &poly_block(&params, wire), &fourier)?;
                verifier.keys[wire] = fourier_key_update(&params, &verifier.keys[wire])?;
            }
            Gate::Unitary { .. } => {
                return Err(Error::Config(format!("gate {} is not a polynomial-scheme gate", gate.name())).into())
            }
        }
        world.step = i + 1;
        verifier.note(world.step, gate.wires()[0]);
        prover.act(world, &blocks)?;
    }

    for wire in 0..n {
        let sites = poly_block(&params, wire);
        world.message(Party::Verifier, Party::Prover, Payload::Return { wire });
        world.transfer(&sites, Party::Prover, Party::Verifier)?;
        world.message(Party::Prover, Party::Verifier, Payload::Registers { wire, sites: sites.clone() });
        remove_pauli_key(&mut world.state, &sites, &params, &verifier.keys[wire].pauli)?;
        let projector = code_space_projector(&params, &verifier.sign, sites.clone())?;
        let (passed, _) = world.state.measure(&projector, &mut world.nature)?;
        world.transcript.checks.push(CheckRecord { step: world.step, wire, passed });
        if !passed {
            return Err(Halt::Reject);
        }
        world.transfer(&sites, Party::Verifier, Party::Output)?;
    }
    Ok(())
}

fn kron_vectors(parts: &[Vec<Complex64>]) -> Vec<Complex64> {
    parts.iter().fold(vec![Complex64::new(1.0, 0.0)], |acc, v| {
        acc.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect()
    })
}

/// Run the polynomial-scheme protocol once. After the initial encoding all interaction
/// is classical until the final recall.
pub fn run_poly_protocol(
    circuit: &Circuit,
    input: &[u64],
    strategy: &ProverStrategy,
    config: &VerifierConfig,
    rng: &mut RandomStream,
) -> Result<TrialResult> {
    let params = config.params;
    circuit.check_scheme(Scheme::Polynomial)?;
    circuit.check_input(input, params.q())?;
    strategy.validate(Scheme::Polynomial, &params, circuit)?;
    let (verifier_seed, prover_rng, nature) = streams(rng);
    let mut verifier_rng = RandomStream::new(verifier_seed);
    let mut verifier = PolyVerifier::new(params, circuit.width(), &mut verifier_rng, config.log_keys);
    let mut prover = Prover { strategy: strategy.clone(), rng: prover_rng, scheme: Scheme::Polynomial, params };
    let layout = SubsystemLayout::uniform(params.m() * circuit.width(), params.q() as usize)?;
    let mut world = World::new(layout, config.memory_bound, nature);
    let halt = run_poly_inner(circuit, input, &mut verifier, &mut prover, &mut world);
    let keys = verifier.log.take().unwrap_or_default();
    let sign = verifier.sign.clone();
    finish(halt, world, verifier_seed, keys, |state| {
        let ideal = circuit.ideal_logical_states(input, params.q(), circuit.len())?;
        let mut encoded = Vec::with_capacity(ideal.len());
        for logical in &ideal {
            let mut v = vec![ZERO; params.q().pow(params.m() as u32) as usize];
            for (b, &amp) in params.field().elements().zip(logical) {
                if amp != ZERO {
                    for (o, c) in v.iter_mut().zip(signed_code_vector(&params, &sign, b)?) {
                        *o += amp * c;
                    }
                }
            }
            encoded.push(v);
        }
        let all: Vec<usize> = (0..state.layout().num_sites()).collect();
        let fidelity = state.site_overlap(&all, &kron_vectors(&encoded))?;
        let marginals = (0..circuit.width())
            .map(|w| {
                params
                    .field()
                    .elements()
                    .map(|b| state.site_overlap(&poly_block(&params, w), &signed_code_vector(&params, &sign, b)?))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((fidelity, marginals))
    })
}

/// Dispatch on the configured scheme.
pub fn run_protocol(
    circuit: &Circuit,
    input: &[u64],
    strategy: &ProverStrategy,
    config: &VerifierConfig,
    rng: &mut RandomStream,
) -> Result<TrialResult> {
    match config.scheme {
        Scheme::Clifford => run_clifford_protocol(circuit, input, strategy, config, rng),
        Scheme::Polynomial => run_poly_protocol(circuit, input, strategy, config, rng),
    }
}
