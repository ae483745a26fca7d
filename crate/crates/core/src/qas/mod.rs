//! Quantum authentication schemes and their exact key-averaged oracles.

pub mod clifford;
pub mod oracle;
pub mod poly;
pub mod twirl;

pub use clifford::{
    averaged_encoded_density, check_qubit_flip_marginal, clifford_accept_probability, clifford_decode,
    clifford_decode_verify, clifford_detection_probability, clifford_detection_probability_for, clifford_encode,
    maximally_mixed_block, CliffordAuthKey, CHECK_SITE, DATA_SITE,
};
pub use poly::{
    apply_pauli_key, block_layout, code_space_projector, fourier_key_update, gate_fourier, gate_xq, logical_fourier,
    poly_encode, poly_encode_superposition, poly_verify, remove_pauli_key, signed_code_vector,
    transversal_fourier_matrices, transversal_fourier_weights, PauliKey, PolyAuthKey, PolyVerification,
};
pub use oracle::{clifford_block_pass, logical_basis, poly_block_pass, BlockAttack};
pub use twirl::{effective_attack_twirl, TwirlReport, TwirlScheme};
