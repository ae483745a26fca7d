use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::standard_gate;
use crate::linalg::CMatrix;
use crate::qas::logical_fourier;
use crate::qsim::{LocalOperator, QuditState, SubsystemLayout};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Clifford,
    Polynomial,
}

#[derive(Clone, Debug)]
pub enum Gate {
    /// Clifford scheme: any unitary on one or two wires, applied by the verifier.
    Unitary { name: String, wires: Vec<usize>, matrix: CMatrix },
    /// Polynomial scheme: logical `X_q` on one wire.
    Xq { wire: usize },
    /// Polynomial scheme: logical Fourier on one wire.
    Fourier { wire: usize },
}

impl Gate {
    /// A named gate from [`standard_gate`], or `"H⊗I"`-style products of one-qubit names.
    pub fn named(name: &str, wires: Vec<usize>) -> Result<Self> {
        let matrix = match name.split_once('⊗') {
            Some((a, b)) => lookup(a)?.kron(&lookup(b)?),
            None => lookup(name)?,
        };
        Self::unitary(name, wires, matrix)
    }

    pub fn unitary(name: &str, wires: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        if matrix.dim() != 1 << wires.len() || wires.is_empty() || wires.len() > 2 {
            return Err(Error::Config(format!(
                "gate {name} of dimension {} does not fit wires {wires:?}",
                matrix.dim()
            )));
        }
        if !matrix.is_unitary(crate::config::TOLERANCE) {
            return Err(Error::Config(format!("gate {name} is not unitary")));
        }
        Ok(Gate::Unitary { name: name.to_string(), wires, matrix })
    }

    pub fn wires(&self) -> Vec<usize> {
        match self {
            Gate::Unitary { wires, .. } => wires.clone(),
            Gate::Xq { wire } | Gate::Fourier { wire } => vec![*wire],
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Gate::Unitary { name, .. } => name,
            Gate::Xq { .. } => "Xq",
            Gate::Fourier { .. } => "F",
        }
    }

    fn scheme(&self) -> Scheme {
        match self {
            Gate::Unitary { .. } => Scheme::Clifford,
            _ => Scheme::Polynomial,
        }
    }
}

fn lookup(name: &str) -> Result<CMatrix> {
    standard_gate(name.trim()).ok_or_else(|| Error::Config(format!("unknown gate {name:?}")))
}

/// An ordered gate list over `width` logical wires.
#[derive(Clone, Debug)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(width: usize, gates: Vec<Gate>) -> Result<Self> {
        if width == 0 {
            return Err(Error::Config("circuit needs at least one wire".into()));
        }
        for g in &gates {
            let wires = g.wires();
            if wires.iter().any(|&w| w >= width) {
                return Err(Error::Config(format!("gate {} uses wires {wires:?} beyond width {width}", g.name())));
            }
            if wires.len() == 2 && wires[0] == wires[1] {
                return Err(Error::Config(format!("gate {} repeats wire {}", g.name(), wires[0])));
            }
        }
        Ok(Self { width, gates })
    }

    /// `(H⊗I)` then `CNOT` on two wires.
    pub fn bell() -> Self {
        let gates = vec![
            Gate::named("H⊗I", vec![0, 1]).expect("H⊗I"),
            Gate::named("CNOT", vec![0, 1]).expect("CNOT"),
        ];
        Self::new(2, gates).expect("valid circuit")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Every gate belongs to `scheme`'s gate set.
    pub fn check_scheme(&self, scheme: Scheme) -> Result<()> {
        match self.gates.iter().find(|g| g.scheme() != scheme) {
            Some(g) => Err(Error::Config(format!("gate {} is not supported by the {scheme:?} scheme", g.name()))),
            None => Ok(()),
        }
    }

    /// Ideal output of the circuit on qubit basis input `bits`, wire 0 most significant.
    pub fn ideal_qubit_output(&self, bits: &[u64]) -> Result<QuditState> {
        self.check_scheme(Scheme::Clifford)?;
        self.check_input(bits, 2)?;
        let digits: Vec<usize> = bits.iter().map(|&b| b as usize).collect();
        let mut state = QuditState::basis(SubsystemLayout::uniform(self.width, 2)?, &digits)?;
        for g in &self.gates {
            if let Gate::Unitary { wires, matrix, .. } = g {
                state.apply(&LocalOperator::unitary(wires.clone(), matrix.clone())?)?;
            }
        }
        Ok(state)
    }

    /// Per-wire ideal logical states after the first `steps` gates of a polynomial circuit.
    /// Wires never interact, so the state is a product.
    pub fn ideal_logical_states(&self, input: &[u64], q: u64, steps: usize) -> Result<Vec<Vec<Complex64>>> {
        self.check_scheme(Scheme::Polynomial)?;
        self.check_input(input, q)?;
        let mut wires: Vec<Vec<Complex64>> = input
            .iter()
            .map(|&a| {
                let mut v = vec![Complex64::new(0.0, 0.0); q as usize];
                v[a as usize] = Complex64::new(1.0, 0.0);
                v
            })
            .collect();
        for g in self.gates.iter().take(steps) {
            match *g {
                Gate::Xq { wire } => wires[wire].rotate_right(1),
                Gate::Fourier { wire } => wires[wire] = logical_fourier(&wires[wire]),
                Gate::Unitary { .. } => unreachable!("scheme checked above"),
            }
        }
        Ok(wires)
    }

    pub fn check_input(&self, input: &[u64], dim: u64) -> Result<()> {
        if input.len() != self.width {
            return Err(Error::Config(format!("{} input values for {} wires", input.len(), self.width)));
        }
        if let Some(v) = input.iter().find(|&&v| v >= dim) {
            return Err(Error::Config(format!("input value {v} outside 0..{dim}")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn bell_reference() {
        let out = Circuit::bell().ideal_qubit_output(&[0, 0]).unwrap();
        assert!((out.amplitude(&[0, 0]).unwrap().re - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((out.amplitude(&[1, 1]).unwrap().re - FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn logical_reference() {
        let c = Circuit::new(1, vec![Gate::Xq { wire: 0 }, Gate::Fourier { wire: 0 }, Gate::Fourier { wire: 0 }]).unwrap();
        let after_x = c.ideal_logical_states(&[0], 5, 1).unwrap();
        assert_eq!(after_x[0][1], Complex64::new(1.0, 0.0));
        let end = c.ideal_logical_states(&[0], 5, 3).unwrap();
        assert!((end[0][4].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scheme_and_wire_validation() {
        assert!(Circuit::new(1, vec![Gate::Xq { wire: 1 }]).is_err());
        assert!(Circuit::bell().check_scheme(Scheme::Polynomial).is_err());
        assert!(Gate::named("T", vec![0, 1]).is_err());
        assert!(Gate::named("Q", vec![0]).is_err());
    }
}
