use num_complex::Complex64;
use serde::{Serialize, Serializer};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::config::TOLERANCE;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::qsim::LocalOperator;

/// Single-qubit Pauli. `Y` follows the convention `[[0, i], [−i, 0]]`, the negative of
/// the more common choice; every identity derived in this crate uses it consistently.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QubitPauli {
    I,
    X,
    Y,
    Z,
}

impl QubitPauli {
    pub const ALL: [QubitPauli; 4] = [QubitPauli::I, QubitPauli::X, QubitPauli::Y, QubitPauli::Z];

    pub fn matrix(self) -> CMatrix {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let data = match self {
            QubitPauli::I => vec![l, o, o, l],
            QubitPauli::X => vec![o, l, l, o],
            QubitPauli::Y => vec![o, i, -i, o],
            QubitPauli::Z => vec![l, o, o, -l],
        };
        CMatrix::from_vec(2, data).expect("2x2")
    }

    pub fn symbol(self) -> char {
        match self {
            QubitPauli::I => 'I',
            QubitPauli::X => 'X',
            QubitPauli::Y => 'Y',
            QubitPauli::Z => 'Z',
        }
    }

    /// Whether this Pauli flips a computational-basis state.
    pub fn flips(self) -> bool {
        matches!(self, QubitPauli::X | QubitPauli::Y)
    }
}

impl TryFrom<char> for QubitPauli {
    type Error = Error;

    fn try_from(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'I' => Ok(QubitPauli::I),
            'X' => Ok(QubitPauli::X),
            'Y' => Ok(QubitPauli::Y),
            'Z' => Ok(QubitPauli::Z),
            other => Err(Error::Config(format!("unknown Pauli symbol {other:?}"))),
        }
    }
}

/// Tensor product of qubit Paulis; position 0 is the most significant factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString(Vec<QubitPauli>);

impl PauliString {
    pub fn new(factors: Vec<QubitPauli>) -> Self {
        Self(factors)
    }

    pub fn identity(n: usize) -> Self {
        Self(vec![QubitPauli::I; n])
    }

    /// All `4^n` strings, in lexicographic order of `I < X < Y < Z`.
    pub fn all(n: usize) -> Vec<Self> {
        (0..4usize.pow(n as u32))
            .map(|mut k| {
                let mut v = vec![QubitPauli::I; n];
                for slot in v.iter_mut().rev() {
                    *slot = QubitPauli::ALL[k % 4];
                    k /= 4;
                }
                Self(v)
            })
            .collect()
    }

    pub fn factors(&self) -> &[QubitPauli] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&p| p == QubitPauli::I)
    }

    pub fn matrix(&self) -> CMatrix {
        self.0.iter().fold(CMatrix::identity(1), |acc, p| acc.kron(&p.matrix()))
    }

    pub fn operator(&self, sites: Vec<usize>) -> LocalOperator {
        LocalOperator::unitary(sites, self.matrix()).expect("Pauli strings are unitary")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars().map(QubitPauli::try_from).collect::<Result<Vec<_>>>().map(Self)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|p| write!(f, "{}", p.symbol()))
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `X_q`: `|a⟩ ↦ |a + 1 mod q⟩`.
pub fn qudit_x(q: u64) -> CMatrix {
    let q = q as usize;
    let mut m = CMatrix::zeros(q);
    for a in 0..q {
        m.set((a + 1) % q, a, Complex64::new(1.0, 0.0));
    }
    m
}

/// `Z_q`: `|x⟩ ↦ e^{2πi x/q} |x⟩`.
pub fn qudit_z(q: u64) -> CMatrix {
    let entries: Vec<_> = (0..q)
        .map(|x| Complex64::from_polar(1.0, 2.0 * PI * x as f64 / q as f64))
        .collect();
    CMatrix::diagonal(&entries)
}

/// Per-site `X_q^ℓ Z_q^n` with exponents reduced mod `q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneralizedPauli {
    q: u64,
    exps: Vec<(u64, u64)>,
}

impl GeneralizedPauli {
    pub fn new(q: u64, exps: Vec<(u64, u64)>) -> Self {
        let exps = exps.into_iter().map(|(l, n)| (l % q, n % q)).collect();
        Self { q, exps }
    }

    pub fn identity(q: u64, sites: usize) -> Self {
        Self { q, exps: vec![(0, 0); sites] }
    }

    /// Parse `"l:n,l:n,…"`, one pair per site.
    pub fn parse(q: u64, s: &str) -> Result<Self> {
        let exps = s
            .split(',')
            .map(|pair| {
                let (l, n) = pair
                    .trim()
                    .split_once(':')
                    .ok_or_else(|| Error::Config(format!("expected l:n, got {pair:?}")))?;
                let parse = |t: &str| {
                    t.trim()
                        .parse::<u64>()
                        .map_err(|e| Error::Config(format!("bad Pauli exponent {t:?}: {e}")))
                };
                Ok((parse(l)?, parse(n)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(q, exps))
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn exponents(&self) -> &[(u64, u64)] {
        &self.exps
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.exps.iter().all(|&(l, n)| l == 0 && n == 0)
    }

    /// Sites carrying a non-identity factor.
    pub fn support(&self) -> Vec<usize> {
        self.exps
            .iter()
            .enumerate()
            .filter(|(_, &(l, n))| l != 0 || n != 0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn matrix(&self) -> CMatrix {
        let x = qudit_x(self.q);
        let z = qudit_z(self.q);
        self.exps.iter().fold(CMatrix::identity(1), |acc, &(l, n)| {
            acc.kron(&x.pow(l).matmul(&z.pow(n)))
        })
    }

    pub fn operator(&self, sites: Vec<usize>) -> LocalOperator {
        LocalOperator::unitary(sites, self.matrix()).expect("generalized Paulis are unitary")
    }
}

impl fmt::Display for GeneralizedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.exps.iter().map(|(l, n)| format!("{l}:{n}")).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Coefficients `tr(P† M) / 2^n` of `M` in the `n`-qubit Pauli basis, in [`PauliString::all`] order.
pub fn pauli_coefficients(m: &CMatrix, n: usize) -> Vec<(PauliString, Complex64)> {
    let dim = 1usize << n;
    assert_eq!(m.dim(), dim, "matrix does not act on {n} qubits");
    PauliString::all(n)
        .into_iter()
        .map(|p| {
            let c = p.matrix().hs_inner(m) / dim as f64;
            (p, c)
        })
        .collect()
}

/// If `m = phase · P` for an `n`-qubit Pauli `P` with unit-modulus phase, return both.
pub fn identify_pauli(m: &CMatrix, n: usize) -> Option<(PauliString, Complex64)> {
    pauli_coefficients(m, n)
        .into_iter()
        .find(|(_, c)| (c.norm() - 1.0).abs() <= 1e-6)
        .filter(|(p, c)| p.matrix().scale(*c).approx_eq(m, TOLERANCE * 1e3))
}

/// Coefficients of a matrix on `k` qudits in the `X^ℓ Z^n` basis:
/// `c_{ℓ,n} = q^{-k} Σ_s ω^{−n·s} M[s+ℓ, s]`, enumerated with ℓ-major ordering.
pub fn generalized_pauli_coefficients(
    m: &CMatrix,
    q: u64,
    k: usize,
) -> Vec<(GeneralizedPauli, Complex64)> {
    let qd = q as usize;
    let dim = qd.pow(k as u32);
    assert_eq!(m.dim(), dim, "matrix does not act on {k} qudits of dimension {q}");
    let digits = |mut idx: usize| -> Vec<usize> {
        let mut v = vec![0; k];
        for slot in v.iter_mut().rev() {
            *slot = idx % qd;
            idx /= qd;
        }
        v
    };
    let index = |d: &[usize]| d.iter().fold(0usize, |acc, &x| acc * qd + x);
    let roots: Vec<Complex64> =
        (0..qd).map(|j| Complex64::from_polar(1.0, -2.0 * PI * j as f64 / q as f64)).collect();

    let mut out = Vec::with_capacity(dim * dim);
    for l_idx in 0..dim {
        let l = digits(l_idx);
        for n_idx in 0..dim {
            let n = digits(n_idx);
            let mut c = Complex64::new(0.0, 0.0);
            for s_idx in 0..dim {
                let s = digits(s_idx);
                let shifted: Vec<usize> = s.iter().zip(&l).map(|(a, b)| (a + b) % qd).collect();
                let dot = s.iter().zip(&n).map(|(a, b)| a * b).sum::<usize>() % qd;
                c += roots[dot] * m.get(index(&shifted), s_idx);
            }
            let exps = l.iter().zip(&n).map(|(&a, &b)| (a as u64, b as u64)).collect();
            out.push((GeneralizedPauli::new(q, exps), c / dim as f64));
        }
    }
    out
}
