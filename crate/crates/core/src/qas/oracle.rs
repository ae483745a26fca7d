//! Exact key-averaged pass probabilities of a single authenticated block under an attack.
//!
//! These oracles enumerate key material exhaustively and act on plain amplitude vectors.
//! They share no code with the state-vector engine or the protocol runner, so the
//! protocol's Monte Carlo rates can be checked against them.
//!
//! For the polynomial scheme only the Pauli-key factors on the attack's support are
//! enumerated: on every other site the key and its inverse meet with nothing in between
//! and cancel exactly.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::config::TOLERANCE;
use crate::error::{Error, Result};
use crate::groups::{CliffordTable, GeneralizedPauli};
use crate::linalg::CMatrix;
use crate::mathcore::{poly_eval, CodeParams, SignKey};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Largest number of Pauli keys the polynomial oracle is willing to enumerate per sign key.
const MAX_ORACLE_KEYS: u64 = 1 << 20;

/// What the prover does to one block while holding it.
#[derive(Clone, Debug)]
pub enum BlockAttack {
    Identity,
    /// A generalized Pauli over the whole block. For the Clifford scheme use `q = 2`.
    Pauli(GeneralizedPauli),
    /// Unitary on the listed block sites, first listed site most significant.
    Unitary { sites: Vec<usize>, matrix: CMatrix },
    /// Trace-preserving channel on the listed block sites.
    Channel { sites: Vec<usize>, kraus: Vec<CMatrix> },
    /// Measure every site in the computational basis and hand back the collapsed block.
    MeasureComputational,
    /// Discard the block and hand back `|0…0⟩`.
    Fabricate,
    /// The prover picks one attack at random with the given weights.
    Mixture(Vec<(f64, BlockAttack)>),
}

fn check_weights(parts: &[(f64, BlockAttack)]) -> Result<()> {
    let total: f64 = parts.iter().map(|(w, _)| *w).sum();
    if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > TOLERANCE {
        return Err(Error::Invariant(format!("mixture weights sum to {total}")));
    }
    Ok(())
}

fn check_channel(kraus: &[CMatrix]) -> Result<()> {
    let dim = kraus.first().map_or(0, CMatrix::dim);
    let sum = kraus
        .iter()
        .fold(CMatrix::zeros(dim), |acc, k| acc.add(&k.adjoint().matmul(k)));
    if kraus.is_empty() || !sum.approx_eq(&CMatrix::identity(dim), 1e-7) {
        return Err(Error::Invariant("Kraus operators are not trace preserving".into()));
    }
    Ok(())
}

/// `digits` of a basis index, first site most significant.
fn digits(mut index: usize, q: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = index % q;
        index /= q;
    }
    out
}

fn index_of(digits: &[usize], q: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * q + d)
}

/// Apply a `q^{|sites|}`-dimensional matrix to the given sites of an `n`-site vector.
fn apply_on_sites(v: &[Complex64], q: usize, n: usize, sites: &[usize], m: &CMatrix) -> Vec<Complex64> {
    let local = q.pow(sites.len() as u32);
    debug_assert_eq!(m.dim(), local);
    let mut out = vec![ZERO; v.len()];
    for (idx, &amp) in v.iter().enumerate() {
        if amp == ZERO {
            continue;
        }
        let mut d = digits(idx, q, n);
        let col = sites.iter().fold(0, |acc, &s| acc * q + d[s]);
        for row in 0..local {
            let entry = m.get(row, col);
            if entry == ZERO {
                continue;
            }
            for (k, &s) in sites.iter().enumerate().rev() {
                d[s] = row / q.pow((sites.len() - 1 - k) as u32) % q;
            }
            out[index_of(&d, q)] += entry * amp;
        }
    }
    out
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum()
}

// ---------------------------------------------------------------------------------------
// Clifford scheme

fn clifford_pass_vec(table: &CliffordTable, prepare: impl Fn(&[Complex64]) -> Vec<Vec<Complex64>>) -> f64 {
    let input = [Complex64::new(1.0, 0.0), ZERO, ZERO, ZERO];
    let total: f64 = table
        .elements()
        .iter()
        .map(|c| {
            let u = c.matrix();
            let udag = u.adjoint();
            prepare(&u.apply(&input))
                .into_iter()
                .map(|branch| {
                    let back = udag.apply(&branch);
                    // Check qubit is site 1, the least significant bit.
                    back[0].norm_sqr() + back[2].norm_sqr()
                })
                .sum::<f64>()
        })
        .sum();
    total / table.len() as f64
}

/// Exact probability, averaged over every Clifford key, that a block encoding `|0⟩`
/// passes its check after `attack`.
///
/// The key average turns any attack into a Pauli channel that does not depend on the
/// data qubit, so `|0⟩` data is representative of every input, entangled or not.
pub fn clifford_block_pass(table: &CliffordTable, attack: &BlockAttack) -> Result<f64> {
    let branches = |v: &[Complex64], kraus: &[CMatrix], sites: &[usize]| -> Vec<Vec<Complex64>> {
        kraus.iter().map(|k| apply_on_sites(v, 2, 2, sites, k)).collect()
    };
    Ok(match attack {
        BlockAttack::Identity => clifford_pass_vec(table, |v| vec![v.to_vec()]),
        BlockAttack::Pauli(p) => {
            if p.q() != 2 || p.len() != 2 {
                return Err(Error::DimensionMismatch(format!("{p} is not a two-qubit Pauli")));
            }
            let m = p.matrix();
            clifford_pass_vec(table, |v| vec![m.apply(v)])
        }
        BlockAttack::Unitary { sites, matrix } => {
            validate_sites(sites, 2, matrix.dim(), 2)?;
            if !matrix.is_unitary(TOLERANCE) {
                return Err(Error::Invariant("block attack is not unitary".into()));
            }
            let kraus = [matrix.clone()];
            clifford_pass_vec(table, |v| branches(v, &kraus, sites))
        }
        BlockAttack::Channel { sites, kraus } => {
            check_channel(kraus)?;
            validate_sites(sites, 2, kraus[0].dim(), 2)?;
            clifford_pass_vec(table, |v| branches(v, kraus, sites))
        }
        BlockAttack::MeasureComputational => clifford_pass_vec(table, |v| {
            (0..4)
                .map(|k| {
                    let mut out = vec![ZERO; 4];
                    out[k] = v[k];
                    out
                })
                .collect()
        }),
        BlockAttack::Fabricate => {
            let total: f64 = table
                .elements()
                .iter()
                .map(|c| {
                    let back = c.matrix().adjoint().apply(&[Complex64::new(1.0, 0.0), ZERO, ZERO, ZERO]);
                    back[0].norm_sqr() + back[2].norm_sqr()
                })
                .sum();
            total / table.len() as f64
        }
        BlockAttack::Mixture(parts) => {
            check_weights(parts)?;
            let mut total = 0.0;
            for (w, a) in parts {
                total += w * clifford_block_pass(table, a)?;
            }
            total
        }
    })
}

fn validate_sites(sites: &[usize], n: usize, dim: usize, q: usize) -> Result<()> {
    let distinct = sites.iter().enumerate().all(|(i, s)| !sites[..i].contains(s));
    if !distinct || sites.iter().any(|&s| s >= n) || sites.is_empty() {
        return Err(Error::DimensionMismatch(format!("invalid attack sites {sites:?} on {n} sites")));
    }
    if q.pow(sites.len() as u32) != dim {
        return Err(Error::DimensionMismatch(format!(
            "attack matrix of dimension {dim} on {} sites of dimension {q}",
            sites.len()
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------------------
// Polynomial scheme

/// Sparse signed codeword states `|S_b|ε⟩` for every logical `b`, built directly from
/// polynomial evaluation.
struct SignedCode {
    q: usize,
    m: usize,
    /// `words[b]` lists the basis indices of the codewords with `f(0) = b`.
    words: Vec<Vec<usize>>,
    amp: f64,
}

impl SignedCode {
    fn new(params: &CodeParams, sign: &SignKey) -> Result<Self> {
        let q = params.q() as usize;
        let count = params.codewords_per_logical()? as usize;
        let field = params.field();
        let points = params.evaluation_points();
        let words = (0..q)
            .map(|b| {
                (0..count)
                    .map(|n| {
                        let mut coeffs = vec![field.elem(b as i64)];
                        let mut rest = n;
                        for _ in 0..params.d() {
                            coeffs.push(field.elem((rest % q) as i64));
                            rest /= q;
                        }
                        let values: Vec<usize> = points
                            .iter()
                            .zip(sign.epsilon())
                            .map(|(&p, &e)| (e * poly_eval(&coeffs, p)).value() as usize)
                            .collect();
                        index_of(&values, q)
                    })
                    .collect()
            })
            .collect();
        Ok(Self { q, m: params.m(), words, amp: 1.0 / (count as f64).sqrt() })
    }

    fn dim(&self) -> usize {
        self.q.pow(self.m as u32)
    }

    fn encode(&self, logical: &[Complex64]) -> Vec<Complex64> {
        let mut v = vec![ZERO; self.dim()];
        for (ws, &c) in self.words.iter().zip(logical) {
            for &w in ws {
                v[w] += c * self.amp;
            }
        }
        v
    }

    /// `‖Π v‖²` for the projector onto the span of all `|S_b|ε⟩`.
    fn projected_weight(&self, v: &[Complex64]) -> f64 {
        self.words
            .iter()
            .map(|ws| ws.iter().map(|&w| v[w]).sum::<Complex64>().norm_sqr() * self.amp * self.amp)
            .sum()
    }
}

/// `⊗_{s∈sites} X^{x_s} Z^{z_s}` (or its inverse) applied to a block vector.
fn apply_key(v: &[Complex64], q: usize, n: usize, sites: &[usize], x: &[usize], z: &[usize], inverse: bool) -> Vec<Complex64> {
    let mut out = vec![ZERO; v.len()];
    for (idx, &amp) in v.iter().enumerate() {
        if amp == ZERO {
            continue;
        }
        let mut d = digits(idx, q, n);
        let mut phase = 0usize;
        for (k, &s) in sites.iter().enumerate() {
            if inverse {
                // Z^{-z} X^{-x}|d⟩ = ω^{-z(d-x)}|d-x⟩
                d[s] = (d[s] + q - x[k]) % q;
                phase = (phase + (q - z[k]) * d[s]) % q;
            } else {
                phase = (phase + z[k] * d[s]) % q;
                d[s] = (d[s] + x[k]) % q;
            }
        }
        out[index_of(&d, q)] += amp * Complex64::from_polar(1.0, 2.0 * PI * phase as f64 / q as f64);
    }
    out
}

/// Iterate over every assignment of `F_q` values to `len` slots.
fn for_each_assignment(q: usize, len: usize, mut f: impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    let total = q.pow(len as u32);
    for i in 0..total {
        f(&digits(i, q, len))?;
    }
    Ok(())
}

/// Pass probability for one sign key, averaged over Pauli keys on the attack's support.
fn poly_pass_for_sign(code: &SignedCode, logical: &[Complex64], attack: &BlockAttack) -> Result<f64> {
    let (q, m) = (code.q, code.m);
    let base = code.encode(logical);
    let sites: Vec<usize> = match attack {
        BlockAttack::Mixture(_) => unreachable!("mixtures are expanded by the caller"),
        BlockAttack::Identity => return Ok(code.projected_weight(&base)),
        BlockAttack::Pauli(p) => p.support(),
        BlockAttack::Unitary { sites, .. } | BlockAttack::Channel { sites, .. } => sites.clone(),
        BlockAttack::MeasureComputational | BlockAttack::Fabricate => (0..m).collect(),
    };
    let keys = (q as u64).pow(2 * sites.len() as u32);
    if keys > MAX_ORACLE_KEYS {
        return Err(Error::ResourceGuard(format!("{keys} Pauli keys exceed the oracle limit")));
    }
    let k = sites.len();
    let mut total = 0.0;
    for_each_assignment(q, 2 * k, |key| {
        let (x, z) = key.split_at(k);
        let keyed = apply_key(&base, q, m, &sites, x, z, false);
        let branches: Vec<Vec<Complex64>> = match attack {
            BlockAttack::Pauli(p) => {
                let exps: Vec<(usize, usize)> = sites.iter().map(|&s| {
                    let (l, n) = p.exponents()[s];
                    (l as usize, n as usize)
                }).collect();
                let (l, n): (Vec<usize>, Vec<usize>) = exps.into_iter().unzip();
                vec![apply_key(&keyed, q, m, &sites, &l, &n, false)]
            }
            BlockAttack::Unitary { matrix, .. } => vec![apply_on_sites(&keyed, q, m, &sites, matrix)],
            BlockAttack::Channel { kraus, .. } => {
                kraus.iter().map(|a| apply_on_sites(&keyed, q, m, &sites, a)).collect()
            }
            BlockAttack::MeasureComputational => keyed
                .iter()
                .enumerate()
                .filter(|(_, a)| a.norm_sqr() > 0.0)
                .map(|(i, &a)| {
                    let mut v = vec![ZERO; keyed.len()];
                    v[i] = a;
                    v
                })
                .collect(),
            BlockAttack::Fabricate => {
                let mut v = vec![ZERO; keyed.len()];
                v[0] = Complex64::new(1.0, 0.0);
                vec![v]
            }
            BlockAttack::Identity | BlockAttack::Mixture(_) => unreachable!(),
        };
        for branch in branches {
            total += code.projected_weight(&apply_key(&branch, q, m, &sites, x, z, true));
        }
        Ok(())
    })?;
    Ok(total / keys as f64)
}

/// Exact probability, averaged over every sign key and every Pauli key, that a block
/// encoding the logical state `logical` passes verification after `attack`.
pub fn poly_block_pass(params: &CodeParams, logical: &[Complex64], attack: &BlockAttack) -> Result<f64> {
    if logical.len() != params.q() as usize || (norm_sqr(logical) - 1.0).abs() > TOLERANCE {
        return Err(Error::DimensionMismatch("logical state must be a unit vector of length q".into()));
    }
    match attack {
        BlockAttack::Mixture(parts) => {
            check_weights(parts)?;
            let mut total = 0.0;
            for (w, a) in parts {
                total += w * poly_block_pass(params, logical, a)?;
            }
            return Ok(total);
        }
        BlockAttack::Pauli(p) if p.q() != params.q() || p.len() != params.m() => {
            return Err(Error::DimensionMismatch(format!("{p} does not act on the block")));
        }
        BlockAttack::Unitary { sites, matrix } => {
            validate_sites(sites, params.m(), matrix.dim(), params.q() as usize)?;
            if !matrix.is_unitary(TOLERANCE) {
                return Err(Error::Invariant("block attack is not unitary".into()));
            }
        }
        BlockAttack::Channel { sites, kraus } => {
            check_channel(kraus)?;
            validate_sites(sites, params.m(), kraus[0].dim(), params.q() as usize)?;
        }
        _ => {}
    }
    let signs = SignKey::all(params);
    let mut total = 0.0;
    for sign in &signs {
        total += poly_pass_for_sign(&SignedCode::new(params, sign)?, logical, attack)?;
    }
    Ok(total / signs.len() as f64)
}

/// Logical basis state `|a⟩` as a length-`q` vector.
pub fn logical_basis(q: u64, a: u64) -> Vec<Complex64> {
    let mut v = vec![ZERO; q as usize];
    v[(a % q) as usize] = Complex64::new(1.0, 0.0);
    v
}
