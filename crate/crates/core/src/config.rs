//! Global numeric tolerances and resource guards.

/// Absolute tolerance for every floating-point identity checked by the crate.
pub const TOLERANCE: f64 = 1e-9;

/// Largest total Hilbert-space dimension a [`crate::qsim::SubsystemLayout`] may have.
pub const MAX_TOTAL_DIM: usize = 1 << 22;

/// Largest codeword set (`q^d`) the polynomial code will enumerate.
pub const MAX_CODEWORDS: u64 = 1_000_000;

/// Amplitudes at or below this magnitude are omitted from state dumps.
pub const DUMP_THRESHOLD: f64 = 1e-12;

/// Two-sided 95% standard normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Largest graph the brute-force isomorphism search accepts.
pub const MAX_GRAPH_VERTICES: usize = 12;

/// Largest integer `verify_factoring` will check by trial division.
pub const MAX_FACTORING_N: u64 = 1 << 40;
