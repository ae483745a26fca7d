use num_complex::Complex64;

use crate::config::TOLERANCE;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// A matrix acting on an ordered list of sites; the first listed site is the most
/// significant factor of the matrix index.
#[derive(Clone, Debug)]
pub struct LocalOperator {
    sites: Vec<usize>,
    matrix: CMatrix,
    unitary: bool,
}

impl LocalOperator {
    /// Unitary operator; fails if `U†U ≠ I` within tolerance.
    pub fn unitary(sites: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        if !matrix.is_unitary(TOLERANCE) {
            return Err(Error::Invariant(format!("operator on sites {sites:?} is not unitary")));
        }
        Ok(Self { sites, matrix, unitary: true })
    }

    /// Arbitrary linear operator (attacks, Kraus operators, projections).
    pub fn general(sites: Vec<usize>, matrix: CMatrix) -> Self {
        let unitary = matrix.is_unitary(TOLERANCE);
        Self { sites, matrix, unitary }
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    /// The same matrix placed on different sites.
    pub fn relocated(&self, sites: Vec<usize>) -> Self {
        Self { sites, matrix: self.matrix.clone(), unitary: self.unitary }
    }

    pub fn adjoint(&self) -> Self {
        Self { sites: self.sites.clone(), matrix: self.matrix.adjoint(), unitary: self.unitary }
    }
}

/// Orthogonal projector onto the span of an orthonormal set of local vectors.
#[derive(Clone, Debug)]
pub struct Projector {
    sites: Vec<usize>,
    dim: usize,
    basis: Vec<Vec<Complex64>>,
}

impl Projector {
    pub fn new(sites: Vec<usize>, dim: usize, basis: Vec<Vec<Complex64>>) -> Result<Self> {
        for (i, v) in basis.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "projector vector of length {} on a {dim}-dimensional space",
                    v.len()
                )));
            }
            for (j, w) in basis[..=i].iter().enumerate() {
                let ip: Complex64 = w.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                if (ip - Complex64::new(expected, 0.0)).norm() > TOLERANCE {
                    return Err(Error::Invariant(format!(
                        "projector vectors {j} and {i} are not orthonormal"
                    )));
                }
            }
        }
        Ok(Self { sites, dim, basis })
    }

    /// `|k⟩⟨k|` for a single local basis index `k`.
    pub fn basis_state(sites: Vec<usize>, dim: usize, k: usize) -> Result<Self> {
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        *v.get_mut(k).ok_or_else(|| {
            Error::DimensionMismatch(format!("basis index {k} outside dimension {dim}"))
        })? = Complex64::new(1.0, 0.0);
        Self::new(sites, dim, vec![v])
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[Vec<Complex64>] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Coefficients `⟨b_i|v⟩` of a local vector.
    pub fn coefficients(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.basis
            .iter()
            .map(|b| b.iter().zip(v).map(|(x, y)| x.conj() * y).sum())
            .collect()
    }

    pub fn project(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for (b, c) in self.basis.iter().zip(self.coefficients(v)) {
            for (o, x) in out.iter_mut().zip(b) {
                *o += c * x;
            }
        }
        out
    }
}
