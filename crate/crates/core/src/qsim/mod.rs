//! Exact dense state-vector simulation over mixed-dimension subsystems.
//!
//! Sites are ordered; site 0 is the most significant digit of the basis index.

mod layout;
mod operator;
mod state;

pub use layout::SubsystemLayout;
pub use operator::{LocalOperator, Projector};
pub use state::{embed_product, fidelity, measure_projector, Measurement, QuditState};
