use rand::Rng;
use serde::Serialize;

use super::field::{FieldElement, PrimeField};
use super::poly::{degree, interpolate, poly_eval};
use crate::config::MAX_CODEWORDS;
use crate::error::{Error, Result};

/// Field size, maximum degree and number of evaluation points of a polynomial code.
///
/// Evaluation points are always `1..=m`, so `q > m` is required for them to be distinct
/// and nonzero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CodeParams {
    field: PrimeField,
    d: usize,
    m: usize,
}

impl CodeParams {
    pub fn new(q: u64, d: usize, m: usize) -> Result<Self> {
        let field = PrimeField::new(q)?;
        if m < d + 1 {
            return Err(Error::Config(format!("m = {m} must be at least d + 1 = {}", d + 1)));
        }
        if q as usize <= m {
            return Err(Error::Config(format!(
                "q = {q} must exceed m = {m} so evaluation points 1..m are distinct and nonzero"
            )));
        }
        if m != 2 * d + 1 {
            log::warn!("m = {m} differs from 2d+1 = {}; detection radius is reduced", 2 * d + 1);
        }
        Ok(Self { field, d, m })
    }

    /// Desk-scale default `q = 5, d = 1, m = 3`.
    pub fn desk() -> Self {
        Self::new(5, 1, 3).expect("default parameters are valid")
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn q(&self) -> u64 {
        self.field.order()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn evaluation_points(&self) -> Vec<FieldElement> {
        (1..=self.m as i64).map(|j| self.field.elem(j)).collect()
    }

    /// Number of codewords per logical value, `q^d`, if it fits the enumeration guard.
    pub fn codewords_per_logical(&self) -> Result<u64> {
        let count = (self.q() as u128).checked_pow(self.d as u32).unwrap_or(u128::MAX);
        if count > MAX_CODEWORDS as u128 {
            return Err(Error::ResourceGuard(format!(
                "q^d = {}^{} codewords exceed the guard of {MAX_CODEWORDS}",
                self.q(),
                self.d
            )));
        }
        Ok(count as u64)
    }
}

/// Per-coordinate signs `ε_i ∈ {+1, −1}`, stored as the residues `1` and `q − 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SignKey {
    epsilon: Vec<FieldElement>,
}

impl SignKey {
    pub fn trivial(params: &CodeParams) -> Self {
        Self { epsilon: vec![params.field.one(); params.m] }
    }

    pub fn from_signs(params: &CodeParams, signs: &[i8]) -> Result<Self> {
        if signs.len() != params.m {
            return Err(Error::DimensionMismatch(format!(
                "{} signs for m = {}",
                signs.len(),
                params.m
            )));
        }
        let epsilon = signs
            .iter()
            .map(|&s| match s {
                1 => Ok(params.field.one()),
                -1 => Ok(params.field.elem(-1)),
                other => Err(Error::Config(format!("sign entries must be ±1, got {other}"))),
            })
            .collect::<Result<_>>()?;
        Ok(Self { epsilon })
    }

    pub fn random<R: Rng + ?Sized>(params: &CodeParams, rng: &mut R) -> Self {
        let epsilon = (0..params.m)
            .map(|_| if rng.gen::<bool>() { params.field.one() } else { params.field.elem(-1) })
            .collect();
        Self { epsilon }
    }

    /// All `2^m` sign keys, in binary-counting order (bit `i` set means `ε_i = −1`).
    pub fn all(params: &CodeParams) -> Vec<Self> {
        (0..1u64 << params.m)
            .map(|mask| Self {
                epsilon: (0..params.m)
                    .map(|i| {
                        if mask >> i & 1 == 1 {
                            params.field.elem(-1)
                        } else {
                            params.field.one()
                        }
                    })
                    .collect(),
            })
            .collect()
    }

    pub fn epsilon(&self) -> &[FieldElement] {
        &self.epsilon
    }

    pub fn len(&self) -> usize {
        self.epsilon.len()
    }

    pub fn is_empty(&self) -> bool {
        self.epsilon.is_empty()
    }

    /// `word ↦ (ε_i · word_i)`; an involution since `ε_i² = 1`.
    pub fn apply(&self, word: &PolyCodeword) -> PolyCodeword {
        PolyCodeword {
            values: word.values.iter().zip(&self.epsilon).map(|(&w, &e)| w * e).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PolyCodeword {
    pub values: Vec<FieldElement>,
}

impl PolyCodeword {
    pub fn new(values: Vec<FieldElement>) -> Self {
        Self { values }
    }

    pub fn from_ints(field: PrimeField, values: &[i64]) -> Self {
        Self { values: values.iter().map(|&v| field.elem(v)).collect() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Basis index of this word among `q^m` strings, first coordinate most significant.
    pub fn basis_index(&self, q: u64) -> usize {
        self.values.iter().fold(0usize, |acc, v| acc * q as usize + v.value() as usize)
    }
}

/// Membership test for the signed code. Returns the decoded logical value `f(0)` when
/// `(ε_i⁻¹·word_i)` at points `1..m` is interpolated by a polynomial of degree `≤ d`.
pub fn is_codeword(word: &PolyCodeword, params: &CodeParams, key: &SignKey) -> Option<FieldElement> {
    if word.len() != params.m || key.len() != params.m {
        return None;
    }
    let unsigned = key.apply(word);
    let points: Vec<_> = params.evaluation_points().into_iter().zip(unsigned.values).collect();
    let coeffs = interpolate(&points).ok()?;
    match degree(&coeffs) {
        Some(deg) if deg > params.d => None,
        _ => Some(coeffs.first().copied().unwrap_or_else(|| params.field.zero())),
    }
}

/// Every signed codeword whose underlying polynomial has degree `≤ d` and `f(0) = logical`.
///
/// Words are produced in lexicographic order of the coefficients `(a_1, …, a_d)`.
pub fn enumerate_codewords(
    params: &CodeParams,
    key: &SignKey,
    logical: FieldElement,
) -> Result<Vec<PolyCodeword>> {
    let count = params.codewords_per_logical()?;
    let q = params.q();
    let points = params.evaluation_points();
    let mut coeffs = vec![params.field.zero(); params.d + 1];
    coeffs[0] = logical;
    let mut words = Vec::with_capacity(count as usize);
    for n in 0..count {
        let mut rest = n;
        for c in coeffs[1..].iter_mut().rev() {
            *c = params.field.elem((rest % q) as i64);
            rest /= q;
        }
        let plain = PolyCodeword { values: points.iter().map(|&p| poly_eval(&coeffs, p)).collect() };
        words.push(key.apply(&plain));
    }
    Ok(words)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn desk() -> CodeParams {
        CodeParams::desk()
    }

    #[test]
    fn params_validation() {
        assert!(CodeParams::new(5, 1, 3).is_ok());
        assert!(matches!(CodeParams::new(6, 1, 3), Err(Error::NotPrime(6))));
        assert!(matches!(CodeParams::new(5, 2, 2), Err(Error::Config(_))));
        // Point 3 would coincide with 0 in F_3.
        assert!(matches!(CodeParams::new(3, 1, 3), Err(Error::Config(_))));
        // m ≥ d+1 but ≠ 2d+1 is accepted.
        assert!(CodeParams::new(7, 1, 4).is_ok());
    }

    #[test]
    fn membership_examples() {
        let p = desk();
        let f = p.field();
        let trivial = SignKey::trivial(&p);
        let w = PolyCodeword::from_ints(f, &[1, 2, 3]);
        assert_eq!(is_codeword(&w, &p, &trivial), Some(f.zero()));

        let signed = SignKey::from_signs(&p, &[1, -1, 1]).unwrap();
        let w = PolyCodeword::from_ints(f, &[1, 3, 3]);
        assert_eq!(is_codeword(&w, &p, &signed), Some(f.zero()));

        let w = PolyCodeword::from_ints(f, &[1, 2, 4]);
        assert_eq!(is_codeword(&w, &p, &trivial), None);
    }

    #[test]
    fn non_codeword_agrees_with_brute_force() {
        // No (a0 + a1 x) over F_5 matches (1, 2, 4) at x = 1, 2, 3.
        let p = desk();
        let f = p.field();
        let target = PolyCodeword::from_ints(f, &[1, 2, 4]);
        let hits = f
            .elements()
            .flat_map(|a0| f.elements().map(move |a1| (a0, a1)))
            .filter(|&(a0, a1)| {
                p.evaluation_points()
                    .iter()
                    .zip(&target.values)
                    .all(|(&x, &y)| poly_eval(&[a0, a1], x) == y)
            })
            .count();
        assert_eq!(hits, 0);
    }

    #[test]
    fn enumeration_examples() {
        let p = desk();
        let f = p.field();
        let words = enumerate_codewords(&p, &SignKey::trivial(&p), f.zero()).unwrap();
        let expected: BTreeSet<_> =
            (0..5).map(|c| PolyCodeword::from_ints(f, &[c, 2 * c, 3 * c])).collect();
        assert_eq!(words.iter().cloned().collect::<BTreeSet<_>>(), expected);
        assert_eq!(words.len(), 5);

        let p0 = CodeParams::new(5, 0, 1).unwrap();
        let words = enumerate_codewords(&p0, &SignKey::trivial(&p0), p0.field().elem(2)).unwrap();
        assert_eq!(words, vec![PolyCodeword::from_ints(p0.field(), &[2])]);
    }

    #[test]
    fn signed_enumeration_decodes_under_its_own_key() {
        // q = 3 cannot host points 1..3, so the signed example runs over F_7.
        let p = CodeParams::new(7, 1, 3).unwrap();
        let key = SignKey::from_signs(&p, &[1, 1, -1]).unwrap();
        let a = p.field().one();
        let words = enumerate_codewords(&p, &key, a).unwrap();
        assert_eq!(words.len(), 7);
        assert_eq!(words.iter().collect::<BTreeSet<_>>().len(), 7);
        for w in &words {
            assert_eq!(is_codeword(w, &p, &key), Some(a));
        }
        let aligned = words.iter().filter(|w| is_codeword(w, &p, &SignKey::trivial(&p)).is_some());
        // Only f with f(3) = 0 survives the flipped third sign: f = 1 − x/3, i.e. one word.
        assert_eq!(aligned.count(), 1);
    }

    #[test]
    fn enumeration_guard() {
        assert_eq!(CodeParams::new(997, 2, 5).unwrap().codewords_per_logical().unwrap(), 994_009);
        assert!(CodeParams::new(1_000_003, 1, 3).unwrap().codewords_per_logical().is_err());
        let p = CodeParams::new(101, 4, 9).unwrap();
        assert!(matches!(
            enumerate_codewords(&p, &SignKey::trivial(&p), p.field().zero()),
            Err(Error::ResourceGuard(_))
        ));
    }
}
