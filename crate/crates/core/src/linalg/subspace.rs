use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    // <a, b> = sum conj(a_i) b_i
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthonormal basis of the span of the rows, by modified Gram–Schmidt with
/// one full re-orthogonalization pass. Rows whose residual falls below
/// `1e-12` of their norm are treated as dependent and dropped.
pub fn orthonormal_row_basis(rows: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(rows.rows());
    for i in 0..rows.rows() {
        let mut r = rows.row(i).to_vec();
        let original = norm(&r);
        if original == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &r);
                for (x, y) in r.iter_mut().zip(q) {
                    *x -= c * y;
                }
            }
        }
        let rn = norm(&r);
        if rn > 1e-12 * original {
            r.iter_mut().for_each(|x| *x /= rn);
            basis.push(r);
        }
    }
    basis
}

/// Euclidean distance from `v` to the span of `basis` (orthonormal).
pub fn distance_to_basis(basis: &[Vec<Complex64>], v: &[Complex64]) -> f64 {
    let mut r = v.to_vec();
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, &r);
            for (x, y) in r.iter_mut().zip(q) {
                *x -= c * y;
            }
        }
    }
    norm(&r)
}

/// Distance from `v` to the linear span of the rows of `rows`.
pub fn distance_to_row_span(rows: &ComplexMatrix, v: &[Complex64]) -> Result<f64> {
    if v.len() != rows.cols() {
        return Err(Error::param(
            "v",
            format!("length {} does not match row length {}", v.len(), rows.cols()),
        ));
    }
    Ok(distance_to_basis(&orthonormal_row_basis(rows), v))
}
