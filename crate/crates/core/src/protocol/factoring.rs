//! Checking the output of a factoring experiment.

use crate::config::MAX_FACTORING_N;
use crate::error::{Error, Result};
use crate::mathcore::is_prime;

/// True iff every claimed factor is prime and their product is `n`.
pub fn verify_factoring(n: u64, claimed: &[u64]) -> Result<bool> {
    if n < 2 {
        return Err(Error::Config(format!("cannot verify a factorization of {n}")));
    }
    if n > MAX_FACTORING_N {
        return Err(Error::ResourceGuard(format!("{n} exceeds the trial-division limit {MAX_FACTORING_N}")));
    }
    let mut product = 1u64;
    for &f in claimed {
        if !is_prime(f) {
            return Ok(false);
        }
        product = match product.checked_mul(f) {
            Some(p) if p <= n => p,
            _ => return Ok(false),
        };
    }
    Ok(product == n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert!(verify_factoring(15, &[3, 5]).unwrap());
        assert!(!verify_factoring(15, &[3, 4]).unwrap());
        assert!(verify_factoring(91, &[7, 13]).unwrap());
        assert!(!verify_factoring(91, &[91]).unwrap());
        assert!(verify_factoring(8, &[2, 2, 2]).unwrap());
        assert!(!verify_factoring(7, &[]).unwrap());
        assert!(verify_factoring(1, &[]).is_err());
    }
}
