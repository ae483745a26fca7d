//! Monte Carlo estimate of the effective error an attack becomes once it is sandwiched
//! between a random key and its inverse.

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::Serialize;
use std::collections::BTreeMap;

use super::clifford::{CliffordAuthKey, CHECK_SITE};
use super::poly::{poly_encode, poly_verify, PolyAuthKey};
use crate::error::{Error, Result};
use crate::groups::{generalized_pauli_coefficients, pauli_coefficients, CliffordTable, GeneralizedPauli};
use crate::linalg::CMatrix;
use crate::mathcore::CodeParams;
use crate::qsim::LocalOperator;

#[derive(Clone, Copy, Debug)]
pub enum TwirlScheme<'a> {
    Clifford(&'a CliffordTable),
    Polynomial(CodeParams),
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct TwirlReport {
    pub trials: u64,
    /// Sampled effective Pauli labels and how often each occurred.
    pub labels: BTreeMap<String, u64>,
    /// Trials in which the block passed verification.
    pub accepted: u64,
}

impl TwirlReport {
    pub fn frequency(&self, label: &str) -> f64 {
        *self.labels.get(label).unwrap_or(&0) as f64 / self.trials as f64
    }

    pub fn acceptance_rate(&self) -> f64 {
        self.accepted as f64 / self.trials as f64
    }
}

fn sample_label<R: Rng + ?Sized, L: ToString>(coeffs: Vec<(L, Complex64)>, rng: &mut R) -> Result<String> {
    let weights: Vec<f64> = coeffs.iter().map(|(_, c)| c.norm_sqr()).collect();
    let dist = WeightedIndex::new(&weights)
        .map_err(|e| Error::Invariant(format!("effective attack has no Pauli weight: {e}")))?;
    Ok(coeffs[dist.sample(rng)].0.to_string())
}

/// For each trial draw a fresh key, conjugate the attack by it, and sample a Pauli label
/// from the squared Pauli-expansion coefficients of the result.
///
/// For the Clifford scheme `attack` acts on the block `(data, check)` and a trial is
/// accepted when the sampled label leaves the check qubit unflipped. For the polynomial
/// scheme `attack` acts on block sites, labels are written `l:n` per site, and acceptance
/// is sampled from the exact verification probability of a random logical value.
pub fn effective_attack_twirl<R: Rng + ?Sized>(
    attack: &LocalOperator,
    scheme: TwirlScheme<'_>,
    trials: u64,
    rng: &mut R,
) -> Result<TwirlReport> {
    if trials == 0 {
        return Err(Error::Config("twirl needs at least one trial".into()));
    }
    let mut report = TwirlReport { trials, ..Default::default() };
    match scheme {
        TwirlScheme::Clifford(table) => {
            let full = clifford_block_matrix(attack)?;
            for _ in 0..trials {
                let key = CliffordAuthKey::random(table, rng);
                let effective = key.matrix().adjoint().matmul(&full).matmul(key.matrix());
                let label = sample_label(pauli_coefficients(&effective, 2), rng)?;
                let flips = matches!(label.chars().nth(CHECK_SITE), Some('X' | 'Y'));
                report.accepted += u64::from(!flips);
                *report.labels.entry(label).or_default() += 1;
            }
        }
        TwirlScheme::Polynomial(params) => {
            let sites = attack.sites();
            if sites.iter().any(|&s| s >= params.m()) {
                return Err(Error::DimensionMismatch(format!("attack sites {sites:?} outside the block")));
            }
            let q = params.q();
            for _ in 0..trials {
                let key = PolyAuthKey::random(&params, rng);
                // Key restricted to the attacked sites, as a matrix on those sites.
                let keyed = sites.iter().fold(CMatrix::identity(1), |acc, &s| acc.kron(&key.pauli.site_matrix(q, s)));
                let effective = keyed.adjoint().matmul(attack.matrix()).matmul(&keyed);
                let local = sample_label(generalized_pauli_coefficients(&effective, q, sites.len()), rng)?;
                let local = GeneralizedPauli::parse(q, &local)?;
                let mut exps = vec![(0, 0); params.m()];
                for (&s, &e) in sites.iter().zip(local.exponents()) {
                    exps[s] = e;
                }
                *report.labels.entry(GeneralizedPauli::new(q, exps).to_string()).or_default() += 1;

                let logical = params.field().elem(rng.gen_range(0..q) as i64);
                let mut block = poly_encode(logical, &params, &key)?;
                block.apply_linear(attack)?;
                let pass = poly_verify(&block, &params, &key)?.accept_probability;
                report.accepted += u64::from(rng.gen::<f64>() < pass);
            }
        }
    }
    Ok(report)
}

fn clifford_block_matrix(attack: &LocalOperator) -> Result<CMatrix> {
    let m = attack.matrix();
    let id = CMatrix::identity(2);
    match attack.sites() {
        [0, 1] => Ok(m.clone()),
        [1, 0] => {
            let swap = crate::groups::standard_gate("SWAP").expect("SWAP");
            Ok(swap.matmul(m).matmul(&swap))
        }
        [0] => Ok(m.kron(&id)),
        [1] => Ok(id.kron(m)),
        other => Err(Error::DimensionMismatch(format!("attack sites {other:?} outside a two-qubit block"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{qudit_x, shared_clifford_table, PauliString};
    use crate::rng::RandomStream;

    #[test]
    fn identity_attack_is_identity_label() {
        let mut rng = RandomStream::new(1);
        let id = LocalOperator::unitary(vec![0, 1], CMatrix::identity(4)).unwrap();
        let r = effective_attack_twirl(&id, TwirlScheme::Clifford(shared_clifford_table()), 200, &mut rng).unwrap();
        assert_eq!(r.labels.get("II"), Some(&200));
        assert_eq!(r.accepted, 200);
    }

    #[test]
    fn pauli_attack_never_maps_to_identity() {
        let mut rng = RandomStream::new(2);
        let zz = "ZZ".parse::<PauliString>().unwrap().operator(vec![0, 1]);
        let r = effective_attack_twirl(&zz, TwirlScheme::Clifford(shared_clifford_table()), 3000, &mut rng).unwrap();
        assert!(!r.labels.contains_key("II"));
        assert_eq!(r.labels.len(), 15);
    }

    #[test]
    fn polynomial_shift_is_rejected_and_relabelled() {
        let mut rng = RandomStream::new(3);
        let x = LocalOperator::unitary(vec![1], qudit_x(5)).unwrap();
        let r = effective_attack_twirl(&x, TwirlScheme::Polynomial(CodeParams::desk()), 50, &mut rng).unwrap();
        assert_eq!(r.accepted, 0);
        assert!(r.labels.keys().all(|l| l.starts_with("0:0,1:") && l.ends_with(",0:0")));
    }
}
