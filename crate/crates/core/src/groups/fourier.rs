use num_complex::Complex64;
use std::f64::consts::PI;

use super::pauli::{qudit_x, qudit_z};
use crate::config::TOLERANCE;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::mathcore::is_prime;

/// `F|a⟩ = q^{-1/2} Σ_b e^{2πi ab/q} |b⟩`.
pub fn fourier_matrix(q: u64) -> CMatrix {
    weighted_fourier_matrix(q, 1)
}

/// `F_c|a⟩ = q^{-1/2} Σ_b e^{2πi c·ab/q} |b⟩`; unitary whenever `c` is invertible mod `q`.
pub fn weighted_fourier_matrix(q: u64, c: u64) -> CMatrix {
    let n = q as usize;
    let scale = 1.0 / (q as f64).sqrt();
    let mut m = CMatrix::zeros(n);
    for a in 0..q {
        for b in 0..q {
            let phase = 2.0 * PI * ((c % q) * a % q * b % q) as f64 / q as f64;
            m.set(b as usize, a as usize, Complex64::from_polar(scale, phase));
        }
    }
    m
}

/// Checks `Z_q F = F X_q` and `X_q^{-1} F = F Z_q`.
pub fn fourier_conjugation_check(q: u64) -> Result<bool> {
    weighted_fourier_conjugation_check(q, 1)
}

/// Checks `Z_q^c F_c = F_c X_q` and `X_q^{-c⁻¹} F_c = F_c Z_q`.
pub fn weighted_fourier_conjugation_check(q: u64, c: u64) -> Result<bool> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if c.is_multiple_of(q) {
        return Err(Error::Config("Fourier weight must be invertible".into()));
    }
    let f = weighted_fourier_matrix(q, c);
    let x = qudit_x(q);
    let z = qudit_z(q);
    let c_inv = (1..q).find(|k| k * (c % q) % q == 1).expect("prime modulus");
    let first = z.pow(c % q).matmul(&f).approx_eq(&f.matmul(&x), TOLERANCE);
    let second = x.pow(q - c_inv).matmul(&f).approx_eq(&f.matmul(&z), TOLERANCE);
    Ok(first && second)
}
