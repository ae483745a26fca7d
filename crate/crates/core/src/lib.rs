//! Desk-scale simulator for quantum-prover interactive proofs.
//!
//! The crate is organised bottom-up:
//!
//! - [`mathcore`]: prime-field arithmetic, polynomials and the (signed) polynomial code.
//! - [`qsim`]: exact dense state-vector simulation over mixed qubit/qudit layouts.
//! - [`groups`]: qubit and generalized Pauli operators, the two-qubit Clifford group,
//!   and Fourier identities.
//! - [`qas`]: the Clifford and signed-polynomial authentication schemes together with
//!   their exact key-averaged oracles.
//! - [`protocol`]: the verifier/prover engine, adversarial provers, Monte Carlo
//!   estimation, and the classical graph-isomorphism and factoring demos.

pub mod config;
pub mod error;
pub mod groups;
pub mod linalg;
pub mod mathcore;
pub mod protocol;
pub mod qas;
pub mod qsim;
pub mod rng;
pub mod stats;

pub use error::{Error, ErrorKind, Result};
pub use num_complex::Complex64;
