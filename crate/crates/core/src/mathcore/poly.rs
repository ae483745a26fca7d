use super::field::FieldElement;
use crate::error::{Error, Result};

/// Evaluate `Σ coeffs[i]·point^i` by Horner's rule.
pub fn poly_eval(coeffs: &[FieldElement], point: FieldElement) -> FieldElement {
    let zero = point.zero_like();
    coeffs.iter().rev().fold(zero, |acc, &c| acc * point + c)
}

/// Degree of a coefficient vector; `None` for the zero polynomial.
pub fn degree(coeffs: &[FieldElement]) -> Option<usize> {
    coeffs.iter().rposition(|c| !c.is_zero())
}

/// Lagrange interpolation. Returns `points.len()` coefficients (low degree first) of the
/// unique polynomial of degree `< points.len()` through every point.
pub fn interpolate(points: &[(FieldElement, FieldElement)]) -> Result<Vec<FieldElement>> {
    let Some(&(x0, _)) = points.first() else {
        return Ok(Vec::new());
    };
    let zero = x0.zero_like();
    let one = zero.pow(0);
    for (i, &(xi, _)) in points.iter().enumerate() {
        if points[..i].iter().any(|&(xj, _)| xj == xi) {
            return Err(Error::DuplicatePoint(xi.value()));
        }
    }

    let n = points.len();
    let mut result = vec![zero; n];
    for (j, &(xj, yj)) in points.iter().enumerate() {
        // basis_j(x) = Π_{k≠j} (x − x_k) / (x_j − x_k)
        let mut basis = vec![one];
        let mut denom = one;
        for (k, &(xk, _)) in points.iter().enumerate() {
            if k == j {
                continue;
            }
            let mut next = vec![zero; basis.len() + 1];
            for (i, &b) in basis.iter().enumerate() {
                next[i + 1] = next[i + 1] + b;
                next[i] = next[i] - b * xk;
            }
            basis = next;
            denom = denom * (xj - xk);
        }
        let scale = yj * denom.inv().expect("distinct abscissae give a nonzero denominator");
        for (r, b) in result.iter_mut().zip(basis) {
            *r = *r + b * scale;
        }
    }
    Ok(result)
}

/// Weights `w_i` with `p(at) = Σ w_i p(x_i)` for every polynomial of degree `< xs.len()`.
pub fn lagrange_weights_at(xs: &[FieldElement], at: FieldElement) -> Result<Vec<FieldElement>> {
    for (i, &xi) in xs.iter().enumerate() {
        if xs[..i].contains(&xi) {
            return Err(Error::DuplicatePoint(xi.value()));
        }
    }
    Ok(xs
        .iter()
        .enumerate()
        .map(|(j, &xj)| {
            let (num, den) = xs.iter().enumerate().filter(|&(k, _)| k != j).fold(
                (at.pow(0), at.pow(0)),
                |(num, den), (_, &xk)| (num * (at - xk), den * (xj - xk)),
            );
            num * den.inv().expect("distinct abscissae")
        })
        .collect())
}
