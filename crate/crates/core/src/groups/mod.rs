//! Qubit and qudit Pauli operators, the two-qubit Clifford group, and Fourier identities.

mod clifford;
mod fourier;
mod haar;
mod pauli;

pub use clifford::{
    conjugate, enumerate_clifford2, sample_clifford, shared_clifford_table, standard_gate,
    ClosureCertificate, CliffordElement, CliffordTable,
};
pub use fourier::{
    fourier_conjugation_check, fourier_matrix, weighted_fourier_conjugation_check,
    weighted_fourier_matrix,
};
pub use haar::haar_unitary;
pub use pauli::{
    generalized_pauli_coefficients, identify_pauli, pauli_coefficients, qudit_x, qudit_z,
    GeneralizedPauli, PauliString, QubitPauli,
};
