//! Signed-polynomial authentication over `F_q`.
//!
//! A logical `a` is encoded on `m` qudits as `X^x Z^z |S_a|ε⟩`, where `|S_a|ε⟩` is the
//! normalised uniform superposition of signed codewords with `f(0) = a`.
//!
//! The transversal Fourier gate applies `F_{c_i}` on coordinate `i`, where `c_i` are the
//! public Lagrange weights that recover `p(0)` from `p(1), …, p(m)` for `deg p ≤ 2d`.
//! With these weights the code is mapped onto itself and the logical action is exactly
//! `F`; the verifier's key update is `(x_i, z_i) ↦ (−c_i⁻¹ z_i, c_i x_i)`, which is
//! `(−z, x)` on every coordinate whose weight is 1.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::groups::{qudit_x, qudit_z, weighted_fourier_matrix};
use crate::linalg::CMatrix;
use crate::mathcore::{enumerate_codewords, lagrange_weights_at, CodeParams, FieldElement, SignKey};
use crate::qsim::{LocalOperator, Projector, QuditState, SubsystemLayout};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Per-coordinate generalized Pauli `X^{x_i} Z^{z_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PauliKey {
    x: Vec<FieldElement>,
    z: Vec<FieldElement>,
}

impl PauliKey {
    pub fn new(x: Vec<FieldElement>, z: Vec<FieldElement>) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::DimensionMismatch("x and z key parts differ in length".into()));
        }
        Ok(Self { x, z })
    }

    pub fn from_ints(params: &CodeParams, x: &[i64], z: &[i64]) -> Result<Self> {
        if x.len() != params.m() || z.len() != params.m() {
            return Err(Error::DimensionMismatch(format!("Pauli key length differs from m = {}", params.m())));
        }
        let f = params.field();
        Self::new(x.iter().map(|&v| f.elem(v)).collect(), z.iter().map(|&v| f.elem(v)).collect())
    }

    pub fn trivial(params: &CodeParams) -> Self {
        let zero = params.field().zero();
        Self { x: vec![zero; params.m()], z: vec![zero; params.m()] }
    }

    pub fn random<R: Rng + ?Sized>(params: &CodeParams, rng: &mut R) -> Self {
        let f = params.field();
        let mut draw = || f.elem(rng.gen_range(0..params.q()) as i64);
        let x = (0..params.m()).map(|_| draw()).collect();
        let z = (0..params.m()).map(|_| draw()).collect();
        Self { x, z }
    }

    pub fn x(&self) -> &[FieldElement] {
        &self.x
    }

    pub fn z(&self) -> &[FieldElement] {
        &self.z
    }

    /// `X^{x_i} Z^{z_i}` for coordinate `i`.
    pub fn site_matrix(&self, q: u64, i: usize) -> CMatrix {
        qudit_x(q).pow(self.x[i].value()).matmul(&qudit_z(q).pow(self.z[i].value()))
    }
}

/// Secret of one block: the run-wide sign key and the block's Pauli key.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PolyAuthKey {
    pub sign: SignKey,
    pub pauli: PauliKey,
}

impl PolyAuthKey {
    pub fn trivial(params: &CodeParams) -> Self {
        Self { sign: SignKey::trivial(params), pauli: PauliKey::trivial(params) }
    }

    pub fn random<R: Rng + ?Sized>(params: &CodeParams, rng: &mut R) -> Self {
        let sign = SignKey::random(params, rng);
        let pauli = PauliKey::random(params, rng);
        Self { sign, pauli }
    }
}

/// Layout of one block: `m` qudits of dimension `q`.
pub fn block_layout(params: &CodeParams) -> Result<SubsystemLayout> {
    SubsystemLayout::uniform(params.m(), params.q() as usize)
}

/// Dense amplitudes of `|S_a|ε⟩` over the `q^m` block basis.
pub fn signed_code_vector(params: &CodeParams, sign: &SignKey, logical: FieldElement) -> Result<Vec<Complex64>> {
    let layout = block_layout(params)?;
    let words = enumerate_codewords(params, sign, logical)?;
    let amp = Complex64::new(1.0 / (words.len() as f64).sqrt(), 0.0);
    let mut v = vec![ZERO; layout.total_dim()];
    for w in words {
        v[w.basis_index(params.q())] = amp;
    }
    Ok(v)
}

fn pauli_key_operators(params: &CodeParams, key: &PauliKey, sites: &[usize]) -> Vec<LocalOperator> {
    sites
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            LocalOperator::unitary(vec![s], key.site_matrix(params.q(), i)).expect("Paulis are unitary")
        })
        .collect()
}

/// Apply `⊗ X^{x_i} Z^{z_i}` to the block occupying `sites`.
pub fn apply_pauli_key(state: &mut QuditState, sites: &[usize], params: &CodeParams, key: &PauliKey) -> Result<()> {
    pauli_key_operators(params, key, sites).iter().try_for_each(|op| state.apply(op))
}

/// Undo [`apply_pauli_key`].
pub fn remove_pauli_key(state: &mut QuditState, sites: &[usize], params: &CodeParams, key: &PauliKey) -> Result<()> {
    pauli_key_operators(params, key, sites).iter().try_for_each(|op| state.apply(&op.adjoint()))
}

/// `X^x Z^z |S_a|ε⟩`.
pub fn poly_encode(logical: FieldElement, params: &CodeParams, key: &PolyAuthKey) -> Result<QuditState> {
    let mut amps = vec![ZERO; params.q() as usize];
    amps[logical.value() as usize] = Complex64::new(1.0, 0.0);
    poly_encode_superposition(&amps, params, key)
}

/// Encode the logical state `Σ_b amps[b] |b⟩`.
pub fn poly_encode_superposition(amps: &[Complex64], params: &CodeParams, key: &PolyAuthKey) -> Result<QuditState> {
    if amps.len() != params.q() as usize {
        return Err(Error::DimensionMismatch(format!(
            "{} logical amplitudes for q = {}",
            amps.len(),
            params.q()
        )));
    }
    let layout = block_layout(params)?;
    let mut v = vec![ZERO; layout.total_dim()];
    for (b, &amp) in params.field().elements().zip(amps) {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        for (o, c) in v.iter_mut().zip(signed_code_vector(params, &key.sign, b)?) {
            *o += amp * c;
        }
    }
    let mut state = QuditState::from_amplitudes(layout, v)?;
    let sites: Vec<usize> = (0..params.m()).collect();
    apply_pauli_key(&mut state, &sites, params, &key.pauli)?;
    Ok(state)
}

/// Projector onto `span{|S_b|ε⟩ : b ∈ F_q}` for a block on `sites`.
pub fn code_space_projector(params: &CodeParams, sign: &SignKey, sites: Vec<usize>) -> Result<Projector> {
    let basis = params
        .field()
        .elements()
        .map(|b| signed_code_vector(params, sign, b))
        .collect::<Result<Vec<_>>>()?;
    let dim = params.q().pow(params.m() as u32) as usize;
    Projector::new(sites, dim, basis)
}

#[derive(Clone, Debug, Serialize)]
pub struct PolyVerification {
    pub accept_probability: f64,
    /// Logical-value distribution conditioned on acceptance; empty if acceptance is impossible.
    pub logical_distribution: BTreeMap<u64, f64>,
}

/// Exact verification of a standalone block: undo the Pauli key and project onto the
/// signed code space.
pub fn poly_verify(block: &QuditState, params: &CodeParams, key: &PolyAuthKey) -> Result<PolyVerification> {
    let layout = block_layout(params)?;
    if block.layout().dims() != layout.dims() {
        return Err(Error::DimensionMismatch(format!(
            "block layout {:?} does not match m = {} qudits of dimension {}",
            block.layout().dims(),
            params.m(),
            params.q()
        )));
    }
    let sites: Vec<usize> = (0..params.m()).collect();
    let mut unkeyed = block.clone();
    remove_pauli_key(&mut unkeyed, &sites, params, &key.pauli)?;
    let projector = code_space_projector(params, &key.sign, sites)?;
    let weights: Vec<f64> = projector
        .coefficients(unkeyed.amplitudes())
        .into_iter()
        .map(|c| c.norm_sqr())
        .collect();
    let accept: f64 = weights.iter().sum();
    let logical_distribution = if accept > 0.0 {
        weights.iter().enumerate().map(|(b, w)| (b as u64, w / accept)).collect()
    } else {
        BTreeMap::new()
    };
    Ok(PolyVerification { accept_probability: accept.clamp(0.0, 1.0), logical_distribution })
}

/// Key update for a logical `X_q`: `x_i ↦ x_i − ε_i`. No quantum operation occurs.
pub fn gate_xq(key: &PolyAuthKey) -> PolyAuthKey {
    let x = key.pauli.x.iter().zip(key.sign.epsilon()).map(|(&x, &e)| x - e).collect();
    PolyAuthKey { sign: key.sign.clone(), pauli: PauliKey { x, z: key.pauli.z.clone() } }
}

/// Public per-coordinate Fourier weights `c_i` (Lagrange weights at 0 for nodes `1..m`).
/// Requires `m ≥ 2d + 1`, so that products of two codeword polynomials are still
/// recovered exactly.
pub fn transversal_fourier_weights(params: &CodeParams) -> Result<Vec<FieldElement>> {
    if params.m() < 2 * params.d() + 1 {
        return Err(Error::Config(format!(
            "transversal Fourier needs m ≥ 2d + 1, got m = {} and d = {}",
            params.m(),
            params.d()
        )));
    }
    lagrange_weights_at(&params.evaluation_points(), params.field().zero())
}

/// `F_{c_i}` for every coordinate, in coordinate order.
pub fn transversal_fourier_matrices(params: &CodeParams) -> Result<Vec<CMatrix>> {
    Ok(transversal_fourier_weights(params)?
        .into_iter()
        .map(|c| weighted_fourier_matrix(params.q(), c.value()))
        .collect())
}

/// Verifier-side key correction after a transversal Fourier.
pub fn fourier_key_update(params: &CodeParams, key: &PolyAuthKey) -> Result<PolyAuthKey> {
    let weights = transversal_fourier_weights(params)?;
    let (mut x, mut z) = (Vec::with_capacity(params.m()), Vec::with_capacity(params.m()));
    for ((&xi, &zi), &c) in key.pauli.x.iter().zip(&key.pauli.z).zip(&weights) {
        let c_inv = c.inv().ok_or_else(|| Error::Invariant("zero Fourier weight".into()))?;
        x.push(-(zi * c_inv));
        z.push(c * xi);
    }
    Ok(PolyAuthKey { sign: key.sign.clone(), pauli: PauliKey { x, z } })
}

/// The prover's transversal Fourier on a standalone block, plus the verifier's key update.
pub fn gate_fourier(block: &QuditState, params: &CodeParams, key: &PolyAuthKey) -> Result<(QuditState, PolyAuthKey)> {
    let mut out = block.clone();
    for (site, f) in transversal_fourier_matrices(params)?.into_iter().enumerate() {
        out.apply(&LocalOperator::unitary(vec![site], f)?)?;
    }
    Ok((out, fourier_key_update(params, key)?))
}

/// `F` on a logical `q`-dimensional amplitude vector.
pub fn logical_fourier(amps: &[Complex64]) -> Vec<Complex64> {
    let q = amps.len();
    let scale = 1.0 / (q as f64).sqrt();
    (0..q)
        .map(|b| {
            amps.iter()
                .enumerate()
                .map(|(a, &x)| x * Complex64::from_polar(scale, 2.0 * PI * (a * b % q) as f64 / q as f64))
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::fidelity;
    use crate::rng::RandomStream;

    fn desk() -> CodeParams {
        CodeParams::desk()
    }

    fn basis_logical(q: u64, a: usize) -> Vec<Complex64> {
        let mut v = vec![ZERO; q as usize];
        v[a] = Complex64::new(1.0, 0.0);
        v
    }

    #[test]
    fn trivial_encoding_of_zero() {
        let p = desk();
        let s = poly_encode(p.field().zero(), &p, &PolyAuthKey::trivial(&p)).unwrap();
        let amp = 1.0 / 5f64.sqrt();
        for c in 0..5usize {
            let a = s.amplitude(&[c, 2 * c % 5, 3 * c % 5]).unwrap();
            assert!((a.re - amp).abs() < 1e-12 && a.im.abs() < 1e-12);
        }
        assert_eq!(s.dump().len(), 5);
    }

    #[test]
    fn degenerate_code_is_the_plain_qudit() {
        let p = CodeParams::new(5, 0, 1).unwrap();
        let s = poly_encode(p.field().elem(3), &p, &PolyAuthKey::trivial(&p)).unwrap();
        assert!((s.amplitude(&[3]).unwrap().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pauli_key_shifts_first_coordinate() {
        let p = desk();
        let key = PolyAuthKey { sign: SignKey::trivial(&p), pauli: PauliKey::from_ints(&p, &[1, 0, 0], &[0, 0, 0]).unwrap() };
        let s = poly_encode(p.field().zero(), &p, &key).unwrap();
        for c in 0..5usize {
            let a = s.amplitude(&[(c + 1) % 5, 2 * c % 5, 3 * c % 5]).unwrap();
            assert!((a.norm() - 1.0 / 5f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn untampered_blocks_verify() {
        let p = desk();
        let mut rng = RandomStream::new(21);
        for a in p.field().elements() {
            let key = PolyAuthKey::random(&p, &mut rng);
            let v = poly_verify(&poly_encode(a, &p, &key).unwrap(), &p, &key).unwrap();
            assert!((v.accept_probability - 1.0).abs() < 1e-9);
            assert!((v.logical_distribution[&a.value()] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn xq_rule_examples() {
        let p = desk();
        let key = gate_xq(&PolyAuthKey::trivial(&p));
        assert!(key.pauli.x().iter().all(|x| x.value() == 4));
        let mut k = PolyAuthKey::random(&p, &mut RandomStream::new(3));
        let original = k.clone();
        for _ in 0..p.q() {
            k = gate_xq(&k);
        }
        assert_eq!(k, original);
    }

    #[test]
    fn xq_rule_relabels_the_same_state() {
        let p = desk();
        let mut rng = RandomStream::new(4);
        for a in p.field().elements() {
            let key = PolyAuthKey::random(&p, &mut rng);
            let before = poly_encode(a, &p, &key).unwrap();
            let after = poly_encode(a + p.field().one(), &p, &gate_xq(&key)).unwrap();
            assert!((fidelity(&before, &after).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn fourier_on_trivial_zero() {
        let p = desk();
        let key = PolyAuthKey::trivial(&p);
        let (state, new_key) = gate_fourier(&poly_encode(p.field().zero(), &p, &key).unwrap(), &p, &key).unwrap();
        assert_eq!(new_key, key);
        let uniform = vec![Complex64::new(1.0 / 5f64.sqrt(), 0.0); 5];
        let expected = poly_encode_superposition(&uniform, &p, &key).unwrap();
        assert!((fidelity(&state, &expected).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fourier_twice_negates_and_four_times_restores() {
        let p = desk();
        let key = PolyAuthKey::random(&p, &mut RandomStream::new(8));
        for a in 0..5usize {
            let mut state = poly_encode(p.field().elem(a as i64), &p, &key).unwrap();
            let mut k = key.clone();
            for step in 1..=4 {
                (state, k) = gate_fourier(&state, &p, &k).unwrap();
                if step == 2 {
                    let neg = poly_encode(p.field().elem(-(a as i64)), &p, &k).unwrap();
                    assert!((fidelity(&state, &neg).unwrap() - 1.0).abs() < 1e-9);
                }
            }
            assert_eq!(k, key);
            let original = poly_encode(p.field().elem(a as i64), &p, &key).unwrap();
            assert!((fidelity(&state, &original).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn fourier_matches_logical_fourier() {
        let p = desk();
        let key = PolyAuthKey::random(&p, &mut RandomStream::new(12));
        for a in 0..5 {
            let (state, k) = gate_fourier(&poly_encode(p.field().elem(a as i64), &p, &key).unwrap(), &p, &key).unwrap();
            let expected = poly_encode_superposition(&logical_fourier(&basis_logical(5, a)), &p, &k).unwrap();
            assert!((fidelity(&state, &expected).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn fourier_needs_enough_points() {
        let p = CodeParams::new(7, 2, 3).unwrap();
        assert!(matches!(transversal_fourier_weights(&p), Err(Error::Config(_))));
    }

    #[test]
    fn unweighted_fourier_leaves_the_code_space() {
        // With plain F on every coordinate the code is not mapped to itself for nodes 1..3.
        let p = desk();
        let mut s = poly_encode(p.field().zero(), &p, &PolyAuthKey::trivial(&p)).unwrap();
        let f = weighted_fourier_matrix(5, 1);
        for site in 0..3 {
            s.apply(&LocalOperator::unitary(vec![site], f.clone()).unwrap()).unwrap();
        }
        let v = poly_verify(&s, &p, &PolyAuthKey::trivial(&p)).unwrap();
        assert!(v.accept_probability < 0.5, "{}", v.accept_probability);
    }

    #[test]
    fn single_site_shift_is_always_detected() {
        let p = desk();
        for sign in SignKey::all(&p) {
            let key = PolyAuthKey { sign, pauli: PauliKey::trivial(&p) };
            let mut s = poly_encode(p.field().elem(2), &p, &key).unwrap();
            s.apply(&LocalOperator::unitary(vec![0], qudit_x(5)).unwrap()).unwrap();
            assert!(poly_verify(&s, &p, &key).unwrap().accept_probability < 1e-12);
        }
    }
}
