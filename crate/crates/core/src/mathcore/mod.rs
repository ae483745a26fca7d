//! Prime-field arithmetic, polynomials over `F_q`, and the plain and signed polynomial codes.

mod code;
mod field;
mod poly;

pub use code::{enumerate_codewords, is_codeword, CodeParams, PolyCodeword, SignKey};
pub use field::{is_prime, FieldElement, PrimeField};
pub use poly::{degree, interpolate, lagrange_weights_at, poly_eval};
