//! Clifford authentication: append a `|0⟩` check qubit and apply a random two-qubit Clifford.
//!
//! Blocks are laid out as `(data, check)`, data on site 0.

use num_complex::Complex64;
use rand::Rng;
use serde::{Serialize, Serializer};

use crate::config::TOLERANCE;
use crate::error::{Error, Result};
use crate::groups::{sample_clifford, CliffordElement, CliffordTable, PauliString};
use crate::linalg::CMatrix;
use crate::qsim::{embed_product, LocalOperator, Projector, QuditState, SubsystemLayout};

pub const DATA_SITE: usize = 0;
pub const CHECK_SITE: usize = 1;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// The secret Clifford `U_R` of one block.
#[derive(Clone, Debug)]
pub struct CliffordAuthKey {
    element: CliffordElement,
}

impl CliffordAuthKey {
    pub fn new(element: CliffordElement) -> Self {
        Self { element }
    }

    pub fn random<R: Rng + ?Sized>(table: &CliffordTable, rng: &mut R) -> Self {
        Self { element: sample_clifford(table, rng) }
    }

    pub fn identity(table: &CliffordTable) -> Self {
        Self { element: table.identity().clone() }
    }

    pub fn element(&self) -> &CliffordElement {
        &self.element
    }

    pub fn matrix(&self) -> &CMatrix {
        self.element.matrix()
    }

    /// Encoding unitary placed on the given `(data, check)` sites.
    pub fn encoder(&self, sites: [usize; 2]) -> LocalOperator {
        LocalOperator::unitary(sites.to_vec(), self.matrix().clone()).expect("Cliffords are unitary")
    }

    pub fn decoder(&self, sites: [usize; 2]) -> LocalOperator {
        self.encoder(sites).adjoint()
    }
}

impl Serialize for CliffordAuthKey {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u64(self.element.index() as u64)
    }
}

fn require_single_qubit(state: &QuditState) -> Result<()> {
    if state.layout().dims() != [2] {
        return Err(Error::DimensionMismatch(format!(
            "expected one qubit, got layout {:?}",
            state.layout().dims()
        )));
    }
    Ok(())
}

fn require_block(state: &QuditState) -> Result<()> {
    if state.layout().dims() != [2, 2] {
        return Err(Error::DimensionMismatch(format!(
            "expected a two-qubit block, got layout {:?}",
            state.layout().dims()
        )));
    }
    Ok(())
}

/// `U_R(|α⟩ ⊗ |0⟩)`.
pub fn clifford_encode(data: &QuditState, key: &CliffordAuthKey) -> Result<QuditState> {
    require_single_qubit(data)?;
    let mut block = embed_product(&[data.clone(), QuditState::single(2, 0)?])?;
    block.apply(&key.encoder([DATA_SITE, CHECK_SITE]))?;
    Ok(block)
}

/// `U_R†` applied to a block, without measuring.
pub fn clifford_decode(block: &QuditState, key: &CliffordAuthKey) -> Result<QuditState> {
    require_block(block)?;
    let mut out = block.clone();
    out.apply(&key.decoder([DATA_SITE, CHECK_SITE]))?;
    Ok(out)
}

fn check_zero_projector() -> Projector {
    Projector::basis_state(vec![CHECK_SITE], 2, 0).expect("valid projector")
}

/// Exact probability that the check qubit reads `0` after decoding.
pub fn clifford_accept_probability(block: &QuditState, key: &CliffordAuthKey) -> Result<f64> {
    clifford_decode(block, key)?.projector_probability(&check_zero_projector())
}

/// Decode, measure the check qubit, accept iff it reads `0`; returns the data qubit.
pub fn clifford_decode_verify<R: Rng + ?Sized>(
    block: &QuditState,
    key: &CliffordAuthKey,
    rng: &mut R,
) -> Result<(bool, QuditState)> {
    let mut decoded = clifford_decode(block, key)?;
    let (accept, _) = decoded.measure(&check_zero_projector(), rng)?;
    let check = usize::from(!accept);
    let amps = decoded.amplitudes();
    let data = vec![amps[check], amps[2 + check]];
    Ok((accept, QuditState::from_amplitudes(SubsystemLayout::new(vec![2])?, data)?))
}

/// Key-averaged rejection probability of a linear attack on an encoded `|0⟩`, by
/// enumeration over every element of `table`.
pub fn clifford_detection_probability(table: &CliffordTable, attack: &CMatrix) -> Result<f64> {
    clifford_detection_probability_for(table, attack, &QuditState::single(2, 0)?)
}

/// Same as [`clifford_detection_probability`] for an arbitrary data qubit. Non-unitary
/// attacks are renormalised per key, matching how the protocol engine applies them.
pub fn clifford_detection_probability_for(
    table: &CliffordTable,
    attack: &CMatrix,
    data: &QuditState,
) -> Result<f64> {
    require_single_qubit(data)?;
    if attack.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "attack of dimension {} on a two-qubit block",
            attack.dim()
        )));
    }
    let input = [data.amplitudes()[0], ZERO, data.amplitudes()[1], ZERO];
    let mut total = 0.0;
    for c in table.elements() {
        let u = c.matrix();
        let attacked = attack.apply(&u.apply(&input));
        let weight: f64 = attacked.iter().map(|a| a.norm_sqr()).sum();
        if weight <= TOLERANCE * TOLERANCE {
            return Err(Error::Invariant("attack annihilates the encoded block".into()));
        }
        let decoded = u.adjoint().apply(&attacked);
        // Check qubit is the least significant bit: indices 1 and 3 carry check = 1.
        let reject = decoded[1].norm_sqr() + decoded[3].norm_sqr();
        total += reject / weight;
    }
    Ok(total / table.len() as f64)
}

/// Probability that the check-qubit factor of a uniformly random per-qubit Pauli is a bit
/// flip (`σ_x` or `σ_y`), by enumeration of all 16 two-qubit Paulis.
pub fn check_qubit_flip_marginal() -> f64 {
    let all = PauliString::all(2);
    let flips = all.iter().filter(|p| p.factors()[CHECK_SITE].flips()).count();
    flips as f64 / all.len() as f64
}

/// Exact average over every key of the encoded block's density matrix.
pub fn averaged_encoded_density(table: &CliffordTable, data: &QuditState) -> Result<CMatrix> {
    require_single_qubit(data)?;
    let input = [data.amplitudes()[0], ZERO, data.amplitudes()[1], ZERO];
    let mut rho = CMatrix::zeros(4);
    for c in table.elements() {
        let v = c.matrix().apply(&input);
        for r in 0..4 {
            for col in 0..4 {
                rho.set(r, col, rho.get(r, col) + v[r] * v[col].conj());
            }
        }
    }
    Ok(rho.scale(Complex64::new(1.0 / table.len() as f64, 0.0)))
}

/// Maximally mixed two-qubit state.
pub fn maximally_mixed_block() -> CMatrix {
    CMatrix::identity(4).scale(Complex64::new(0.25, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{shared_clifford_table, standard_gate};
    use crate::qsim::fidelity;
    use crate::rng::RandomStream;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn plus() -> QuditState {
        QuditState::from_amplitudes(
            SubsystemLayout::new(vec![2]).unwrap(),
            vec![Complex64::new(FRAC_1_SQRT_2, 0.0); 2],
        )
        .unwrap()
    }

    #[test]
    fn identity_key_appends_check_qubit() {
        let table = shared_clifford_table();
        let key = CliffordAuthKey::identity(table);
        let block = clifford_encode(&QuditState::single(2, 1).unwrap(), &key).unwrap();
        assert_eq!(block.amplitude(&[1, 0]).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn encode_decode_round_trip() {
        let table = shared_clifford_table();
        let mut rng = RandomStream::new(5);
        for _ in 0..50 {
            let key = CliffordAuthKey::random(table, &mut rng);
            let block = clifford_encode(&plus(), &key).unwrap();
            let decoded = clifford_decode(&block, &key).unwrap();
            let expected = embed_product(&[plus(), QuditState::single(2, 0).unwrap()]).unwrap();
            assert!((fidelity(&decoded, &expected).unwrap() - 1.0).abs() < 1e-12);
            let (ok, data) = clifford_decode_verify(&block, &key, &mut rng).unwrap();
            assert!(ok);
            assert!((fidelity(&data, &plus()).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn encode_matches_direct_matrix_action() {
        let table = shared_clifford_table();
        let m = standard_gate("CNOT")
            .unwrap()
            .matmul(&standard_gate("H").unwrap().kron(&CMatrix::identity(2)));
        let idx = table.find(&m).expect("CNOT·(H⊗I) is Clifford");
        let key = CliffordAuthKey::new(table.get(idx).unwrap().clone());
        let block = clifford_encode(&plus(), &key).unwrap();
        // (H⊗I)|+0⟩ = |00⟩, then CNOT leaves |00⟩: the table stores it up to phase.
        assert!((block.amplitude(&[0, 0]).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_attack_is_never_rejected() {
        let table = shared_clifford_table();
        let p = clifford_detection_probability(table, &CMatrix::identity(4)).unwrap();
        assert!(p.abs() < 1e-12);
    }

    #[test]
    fn flipped_check_after_encode_matches_key_average() {
        // σ_x on the check qubit of the encoded block, averaged over keys.
        let table = shared_clifford_table();
        let attack = "IX".parse::<PauliString>().unwrap().matrix();
        let mut total = 0.0;
        for c in table.elements() {
            let key = CliffordAuthKey::new(c.clone());
            let mut block = clifford_encode(&plus(), &key).unwrap();
            block.apply(&LocalOperator::unitary(vec![0, 1], attack.clone()).unwrap()).unwrap();
            total += 1.0 - clifford_accept_probability(&block, &key).unwrap();
        }
        let mean = total / table.len() as f64;
        let oracle = clifford_detection_probability_for(table, &attack, &plus()).unwrap();
        assert!((mean - oracle).abs() < 1e-9);
        assert!((oracle - 8.0 / 15.0).abs() < 1e-9);
    }

    #[test]
    fn marginal_is_one_half() {
        assert_eq!(check_qubit_flip_marginal(), 0.5);
    }
}
