use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::{HashMap, VecDeque};
use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::OnceLock;

use super::pauli::{identify_pauli, PauliString};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Known order of the two-qubit Clifford group modulo global phase.
pub const CLIFFORD2_ORDER: usize = 11520;

/// Stop the breadth-first closure if it grows past this many elements.
const CLOSURE_CAP: usize = 4 * CLIFFORD2_ORDER;

/// Rounding grid used to hash phase-normalised matrices.
const KEY_SCALE: f64 = 1e6;

type MatrixKey = [i64; 32];

#[derive(Clone, Debug)]
pub struct CliffordElement {
    index: usize,
    matrix: CMatrix,
}

impl CliffordElement {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosureCertificate {
    pub size: usize,
    pub generators: Vec<String>,
    /// Every generator times every element lands back in the table.
    pub closed_under_generators: bool,
    /// SHA-256 over the sorted element keys.
    pub digest: String,
}

/// The two-qubit Clifford group modulo global phase, in BFS discovery order.
#[derive(Debug)]
pub struct CliffordTable {
    elements: Vec<CliffordElement>,
    lookup: HashMap<MatrixKey, usize>,
    certificate: ClosureCertificate,
}

/// Phase-normalise so the first entry with non-negligible modulus is positive real.
fn canonical(m: &CMatrix) -> CMatrix {
    let pivot = m
        .data()
        .iter()
        .find(|z| z.norm() > 1e-6)
        .copied()
        .unwrap_or(Complex64::new(1.0, 0.0));
    m.scale(pivot.conj() / pivot.norm())
}

fn key_of(canonical: &CMatrix) -> MatrixKey {
    let mut key = [0i64; 32];
    for (k, z) in canonical.data().iter().enumerate() {
        key[2 * k] = (z.re * KEY_SCALE).round() as i64;
        key[2 * k + 1] = (z.im * KEY_SCALE).round() as i64;
    }
    key
}

/// Named one- and two-qubit gates. Two-qubit gates use site 0 as control where relevant.
pub fn standard_gate(name: &str) -> Option<CMatrix> {
    let r = FRAC_1_SQRT_2;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let m = match name.to_ascii_uppercase().as_str() {
        "I" => CMatrix::identity(2),
        "H" => CMatrix::from_real_rows(&[&[r, r], &[r, -r]]),
        "S" => CMatrix::diagonal(&[one, i]),
        "X" => CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
        "Z" => CMatrix::diagonal(&[one, -one]),
        // Same convention as the Pauli module.
        "Y" => CMatrix::from_vec(2, vec![zero, i, -i, zero]).expect("2x2"),
        "T" => CMatrix::diagonal(&[one, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]),
        "II" => CMatrix::identity(4),
        "CNOT" | "CX" => CMatrix::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 1.0, 0.0],
        ]),
        "CZ" => CMatrix::diagonal(&[one, one, one, -one]),
        "SWAP" => CMatrix::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ]),
        _ => return None,
    };
    Some(m)
}

fn generators() -> Vec<(String, CMatrix)> {
    let h = standard_gate("H").expect("H");
    let s = standard_gate("S").expect("S");
    let id = CMatrix::identity(2);
    vec![
        ("H⊗I".to_string(), h.kron(&id)),
        ("I⊗H".to_string(), id.kron(&h)),
        ("S⊗I".to_string(), s.kron(&id)),
        ("I⊗S".to_string(), id.kron(&s)),
        ("CNOT".to_string(), standard_gate("CNOT").expect("CNOT")),
    ]
}

/// Breadth-first closure of `{H⊗I, I⊗H, S⊗I, I⊗S, CNOT}` modulo global phase.
pub fn enumerate_clifford2() -> Result<CliffordTable> {
    let gens = generators();
    let identity = canonical(&CMatrix::identity(4));
    let mut elements = vec![CliffordElement { index: 0, matrix: identity.clone() }];
    let mut lookup = HashMap::from([(key_of(&identity), 0usize)]);
    let mut queue = VecDeque::from([0usize]);

    while let Some(idx) = queue.pop_front() {
        for (_, g) in &gens {
            let product = canonical(&g.matmul(&elements[idx].matrix));
            let key = key_of(&product);
            if lookup.contains_key(&key) {
                continue;
            }
            if elements.len() >= CLOSURE_CAP {
                return Err(Error::Invariant(format!(
                    "Clifford closure exceeded {CLOSURE_CAP} elements"
                )));
            }
            let index = elements.len();
            lookup.insert(key, index);
            elements.push(CliffordElement { index, matrix: product });
            queue.push_back(index);
        }
    }

    // The BFS only terminates once every generator product is present; re-check anyway.
    let closed_under_generators = elements.iter().all(|e| {
        gens.iter().all(|(_, g)| lookup.contains_key(&key_of(&canonical(&g.matmul(&e.matrix)))))
    });
    let mut keys: Vec<&MatrixKey> = lookup.keys().collect();
    keys.sort_unstable();
    let mut hasher = Sha256::new();
    for k in keys {
        for v in k {
            hasher.update(v.to_le_bytes());
        }
    }
    let certificate = ClosureCertificate {
        size: elements.len(),
        generators: gens.into_iter().map(|(n, _)| n).collect(),
        closed_under_generators,
        digest: hex::encode(hasher.finalize()),
    };
    Ok(CliffordTable { elements, lookup, certificate })
}

/// Process-wide table, built on first use.
pub fn shared_clifford_table() -> &'static CliffordTable {
    static TABLE: OnceLock<CliffordTable> = OnceLock::new();
    TABLE.get_or_init(|| enumerate_clifford2().expect("Clifford enumeration closes"))
}

impl CliffordTable {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[CliffordElement] {
        &self.elements
    }

    pub fn get(&self, index: usize) -> Option<&CliffordElement> {
        self.elements.get(index)
    }

    pub fn identity(&self) -> &CliffordElement {
        &self.elements[0]
    }

    pub fn certificate(&self) -> &ClosureCertificate {
        &self.certificate
    }

    /// Index of the element equal to `m` up to global phase.
    pub fn find(&self, m: &CMatrix) -> Option<usize> {
        if m.dim() != 4 {
            return None;
        }
        self.lookup.get(&key_of(&canonical(m))).copied()
    }

    /// Index of `elements[a] · elements[b]`.
    pub fn product_index(&self, a: usize, b: usize) -> Option<usize> {
        self.find(&self.elements[a].matrix.matmul(&self.elements[b].matrix))
    }

    /// Check closure on `samples` random pairs; returns how many pairs failed.
    pub fn spot_check_closure<R: Rng + ?Sized>(&self, samples: usize, rng: &mut R) -> usize {
        (0..samples)
            .filter(|_| {
                let a = rng.gen_range(0..self.len());
                let b = rng.gen_range(0..self.len());
                self.product_index(a, b).is_none()
            })
            .count()
    }
}

/// Uniform sample from the table.
pub fn sample_clifford<R: Rng + ?Sized>(table: &CliffordTable, rng: &mut R) -> CliffordElement {
    table.elements[rng.gen_range(0..table.len())].clone()
}

/// `C P C† = phase · P′`; returns `P′` and `phase`.
pub fn conjugate(c: &CliffordElement, p: &PauliString) -> Result<(PauliString, Complex64)> {
    if p.len() != 2 {
        return Err(Error::DimensionMismatch(format!("{p} is not a two-qubit Pauli")));
    }
    let m = c.matrix.matmul(&p.matrix()).matmul(&c.matrix.adjoint());
    identify_pauli(&m, 2).ok_or_else(|| {
        Error::Invariant(format!("element {} maps {p} outside the Pauli group", c.index))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn element_for(m: CMatrix) -> CliffordElement {
        CliffordElement { index: usize::MAX, matrix: m }
    }

    #[test]
    fn conjugation_examples() {
        let xi: PauliString = "XI".parse().unwrap();
        let (p, phase) = conjugate(&element_for(CMatrix::identity(4)), &xi).unwrap();
        assert_eq!(p, xi);
        assert!((phase - Complex64::new(1.0, 0.0)).norm() < 1e-12);

        let hi = standard_gate("H").unwrap().kron(&CMatrix::identity(2));
        let (p, _) = conjugate(&element_for(hi), &xi).unwrap();
        assert_eq!(p.to_string(), "ZI");

        let (p, _) = conjugate(&element_for(standard_gate("CNOT").unwrap()), &xi).unwrap();
        assert_eq!(p.to_string(), "XX");
    }

    #[test]
    fn non_clifford_is_reported() {
        let t = standard_gate("T").unwrap().kron(&CMatrix::identity(2));
        let xi: PauliString = "XI".parse().unwrap();
        assert!(matches!(conjugate(&element_for(t), &xi), Err(Error::Invariant(_))));
    }

    #[test]
    fn canonical_form_quotients_phase() {
        let h = standard_gate("H").unwrap().kron(&CMatrix::identity(2));
        let rotated = h.scale(Complex64::from_polar(1.0, 1.234));
        assert_eq!(key_of(&canonical(&h)), key_of(&canonical(&rotated)));
    }
}
