//! Register ownership and the message transcript.
//!
//! The joint state lives in one [`crate::qsim::QuditState`]. Sending a register only
//! changes who owns its sites.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Party {
    Verifier,
    Prover,
    /// Fresh or discarded qubits that nobody is using.
    Pool,
    /// Decoded output registers handed out of the verifier's working memory.
    Output,
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Party::Verifier => "verifier",
            Party::Prover => "prover",
            Party::Pool => "pool",
            Party::Output => "output",
        };
        f.write_str(s)
    }
}

/// Raised when a transfer would leave the verifier holding more than its bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemoryViolation {
    pub requested: usize,
    pub bound: usize,
}

impl fmt::Display for MemoryViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "verifier would hold {} registers, bound is {}", self.requested, self.bound)
    }
}

/// One owner per site, with the verifier's count checked against its memory bound.
#[derive(Clone, Debug)]
pub struct Registry {
    owners: Vec<Party>,
    bound: usize,
    peak: usize,
}

impl Registry {
    pub fn new(sites: usize, bound: usize) -> Self {
        Self { owners: vec![Party::Pool; sites], bound, peak: 0 }
    }

    pub fn owner(&self, site: usize) -> Party {
        self.owners[site]
    }

    pub fn held_by(&self, party: Party) -> usize {
        self.owners.iter().filter(|&&p| p == party).count()
    }

    /// Largest number of sites the verifier has held at once.
    pub fn peak_verifier(&self) -> usize {
        self.peak
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    /// Move `sites` from `from` to `to`. Ownership errors are engine bugs; exceeding the
    /// verifier's bound is a protocol abort.
    pub fn transfer(
        &mut self,
        sites: &[usize],
        from: Party,
        to: Party,
    ) -> Result<std::result::Result<(), MemoryViolation>> {
        for &s in sites {
            let owner = *self
                .owners
                .get(s)
                .ok_or_else(|| Error::Invariant(format!("site {s} does not exist")))?;
            if owner != from {
                return Err(Error::Invariant(format!("site {s} is owned by {owner}, not {from}")));
            }
        }
        if to == Party::Verifier {
            let requested = self.held_by(Party::Verifier) + sites.len();
            if requested > self.bound {
                return Ok(Err(MemoryViolation { requested, bound: self.bound }));
            }
        }
        for &s in sites {
            self.owners[s] = to;
        }
        self.peak = self.peak.max(self.held_by(Party::Verifier));
        Ok(Ok(()))
    }

    pub fn require(&self, sites: &[usize], party: Party) -> Result<()> {
        match sites.iter().find(|&&s| self.owners[s] != party) {
            Some(s) => Err(Error::Invariant(format!("{party} touched site {s} it does not own"))),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageKind {
    Quantum,
    Classical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Payload {
    /// Register handles whose ownership moves with the message.
    Registers { wire: usize, sites: Vec<usize> },
    /// Instruction to apply the transversal Fourier gate to a block.
    ApplyFourier { wire: usize },
    /// Request to hand a block back.
    Return { wire: usize },
}

impl Payload {
    pub fn kind(&self) -> MessageKind {
        match self {
            Payload::Registers { .. } => MessageKind::Quantum,
            _ => MessageKind::Classical,
        }
    }

    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("payloads serialise");
        hex::encode(Sha256::digest(bytes))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub step: usize,
    pub kind: MessageKind,
    pub sender: Party,
    pub receiver: Party,
    pub payload: Payload,
}

#[derive(Serialize)]
struct LogLine<'a> {
    step: usize,
    kind: MessageKind,
    sender: Party,
    receiver: Party,
    payload_digest: &'a str,
}

/// Result of one verifier check, as the verifier itself observed it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub step: usize,
    pub wire: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Transcript {
    pub messages: Vec<Message>,
    pub checks: Vec<CheckRecord>,
    pub aborted: Option<String>,
}

impl Transcript {
    pub fn push(&mut self, step: usize, sender: Party, receiver: Party, payload: Payload) {
        let kind = payload.kind();
        self.messages.push(Message { step, kind, sender, receiver, payload });
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    /// One JSON object per message: step, kind, sender, receiver and payload digest.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for m in &self.messages {
            let digest = m.payload.digest();
            let line = LogLine {
                step: m.step,
                kind: m.kind,
                sender: m.sender,
                receiver: m.receiver,
                payload_digest: &digest,
            };
            out.push_str(&serde_json::to_string(&line).expect("log lines serialise"));
            out.push('\n');
        }
        out
    }
}
