//! Verifier-only re-execution of a recorded run.
//!
//! The replay sees what the verifier sees: its own seed, the circuit, the messages in the
//! transcript and the outcomes of its own check measurements. It re-derives the messages
//! the verifier must have sent and the accept/reject decision, and compares both with the
//! record. It shares no control flow with the engine.

use serde::Serialize;

use super::channel::{Party, Payload, Transcript};
use super::circuit::{Circuit, Gate, Scheme};
use super::engine::{Outcome, TrialResult, VerifierConfig};
use crate::error::Result;
use crate::groups::shared_clifford_table;
use crate::mathcore::SignKey;
use crate::qas::{CliffordAuthKey, PauliKey};
use crate::rng::RandomStream;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReplayReport {
    pub outcome: Outcome,
    /// Re-derived verifier messages match the transcript.
    pub messages_match: bool,
    /// Re-derived keys match the logged keys; `None` when keys were not logged.
    pub keys_match: Option<bool>,
    /// Re-derived decision matches the recorded one.
    pub decision_matches: bool,
}

impl ReplayReport {
    pub fn consistent(&self) -> bool {
        self.messages_match && self.decision_matches && self.keys_match != Some(false)
    }
}

enum End {
    Reject,
    Abort(String),
}

/// The verifier's side of the schedule, driven by recorded check outcomes.
struct Script<'a> {
    bound: usize,
    held: usize,
    step: usize,
    sent: Vec<(usize, Payload)>,
    checks: std::slice::Iter<'a, super::channel::CheckRecord>,
}

impl Script<'_> {
    fn take(&mut self, n: usize) -> std::result::Result<(), End> {
        if self.held + n > self.bound {
            return Err(End::Abort(format!("verifier would hold {} registers, bound is {}", self.held + n, self.bound)));
        }
        self.held += n;
        Ok(())
    }

    fn give(&mut self, n: usize) {
        self.held -= n;
    }

    fn send(&mut self, payload: Payload) {
        self.sent.push((self.step, payload));
    }

    fn check(&mut self, wire: usize) -> std::result::Result<(), End> {
        match self.checks.next() {
            Some(c) if c.wire != wire || c.step != self.step => {
                Err(End::Abort(format!("check record for wire {} at step {} is out of order", c.wire, c.step)))
            }
            Some(c) if c.passed => Ok(()),
            Some(_) => Err(End::Reject),
            None => Err(End::Abort("transcript ends before a required check".into())),
        }
    }
}

fn clifford_script(circuit: &Circuit, s: &mut Script<'_>, rng: &mut RandomStream, keys: &mut Vec<usize>) -> std::result::Result<(), End> {
    let table = shared_clifford_table();
    let mut draw = |keys: &mut Vec<usize>| keys.push(CliffordAuthKey::random(table, rng).element().index());
    let registers = |w: usize| Payload::Registers { wire: w, sites: vec![2 * w, 2 * w + 1] };
    for w in 0..circuit.width() {
        s.take(2)?;
        draw(keys);
        s.send(registers(w));
        s.give(2);
    }
    for (i, gate) in circuit.gates().iter().enumerate() {
        let wires = gate.wires();
        if 2 * wires.len() > s.bound && wires.len() == 2 {
            let (a, b) = (wires[0], wires[1]);
            s.send(Payload::Return { wire: a });
            s.take(2)?;
            s.check(a)?;
            s.give(1);
            s.send(Payload::Return { wire: b });
            s.take(2)?;
            s.check(b)?;
            draw(keys);
            s.send(registers(b));
            s.give(2);
            s.take(1)?;
            draw(keys);
            s.send(registers(a));
            s.give(2);
        } else {
            for &w in &wires {
                s.send(Payload::Return { wire: w });
                s.take(2)?;
                s.check(w)?;
            }
            for &w in &wires {
                draw(keys);
                s.send(registers(w));
                s.give(2);
            }
        }
        s.step = i + 1;
    }
    for w in 0..circuit.width() {
        s.send(Payload::Return { wire: w });
        s.take(2)?;
        s.check(w)?;
        s.give(2);
    }
    Ok(())
}

fn poly_script(circuit: &Circuit, m: usize, s: &mut Script<'_>) -> std::result::Result<(), End> {
    for w in 0..circuit.width() {
        s.take(m)?;
        s.send(Payload::Registers { wire: w, sites: (w * m..(w + 1) * m).collect() });
        s.give(m);
    }
    for (i, gate) in circuit.gates().iter().enumerate() {
        if let Gate::Fourier { wire } = *gate {
            s.send(Payload::ApplyFourier { wire });
        }
        s.step = i + 1;
    }
    for w in 0..circuit.width() {
        s.send(Payload::Return { wire: w });
        s.take(m)?;
        s.check(w)?;
        s.give(m);
    }
    Ok(())
}

fn same_kind(a: &Outcome, b: &Outcome) -> bool {
    std::mem::discriminant(a) == std::mem::discriminant(b)
}

fn verifier_messages(t: &Transcript) -> Vec<(usize, String)> {
    t.messages
        .iter()
        .filter(|m| m.sender == Party::Verifier && m.receiver == Party::Prover)
        .map(|m| (m.step, m.payload.digest()))
        .collect()
}

/// Re-run the verifier alone against a recorded trial.
pub fn replay_verifier(circuit: &Circuit, config: &VerifierConfig, result: &TrialResult) -> Result<ReplayReport> {
    let mut rng = RandomStream::new(result.verifier_seed);
    let mut script = Script {
        bound: config.memory_bound,
        held: 0,
        step: 0,
        sent: Vec::new(),
        checks: result.transcript.checks.iter(),
    };
    let (end, keys_match) = match config.scheme {
        Scheme::Clifford => {
            let mut drawn = Vec::new();
            let end = clifford_script(circuit, &mut script, &mut rng, &mut drawn);
            let logged: Vec<usize> = result
                .keys
                .iter()
                .filter_map(|k| k.get("clifford").and_then(|v| v.as_u64()).map(|v| v as usize))
                .collect();
            (end, (!result.keys.is_empty()).then(|| logged == drawn))
        }
        Scheme::Polynomial => {
            let params = config.params;
            let sign = SignKey::random(&params, &mut rng);
            let paulis: Vec<PauliKey> = (0..circuit.width()).map(|_| PauliKey::random(&params, &mut rng)).collect();
            let end = poly_script(circuit, params.m(), &mut script);
            let keys_match = (!result.keys.is_empty()).then(|| {
                let mut expected = vec![serde_json::json!({ "step": 0, "sign": sign })];
                expected.extend(
                    paulis.iter().enumerate().map(|(w, p)| serde_json::json!({ "step": 0, "wire": w, "pauli": p })),
                );
                result.keys.len() >= expected.len() && result.keys[..expected.len()] == expected[..]
            });
            (end, keys_match)
        }
    };
    let outcome = match end {
        Ok(()) => Outcome::Accepted,
        Err(End::Reject) => Outcome::Rejected,
        Err(End::Abort(reason)) => Outcome::Aborted(reason),
    };
    let expected: Vec<(usize, String)> = script.sent.iter().map(|(step, p)| (*step, p.digest())).collect();
    Ok(ReplayReport {
        decision_matches: same_kind(&outcome, &result.outcome),
        messages_match: expected == verifier_messages(&result.transcript),
        keys_match,
        outcome,
    })
}
