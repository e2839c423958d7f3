//! Self-contained dense kernels: real nonsymmetric eigenvalues, Hermitian
//! eigenvalues, singular values of complex shifts, Hermitization, distances
//! to row spans and Stieltjes transforms of real spectra.
//!
//! Complex arithmetic uses [`num_complex::Complex64`], an explicit `(re, im)`
//! pair whose products and quotients follow the textbook expansion
//! (`(a+bi)(c+di) = (ac-bd) + (ad+bc)i`), so results do not depend on FMA
//! contraction or platform intrinsics. All routines are single-threaded.

mod hermitian;
mod matrix;
mod nonsymmetric;
mod subspace;

pub use num_complex::Complex64;

pub use hermitian::{
    hermitian_eigenvalues, hermitize, operator_norm, singular_values, singular_values_shifted,
    tridiagonal_eigenvalues, tridiagonalize, SingularSpectrum,
};
pub use matrix::{ComplexMatrix, Matrix, RealMatrix};
pub use nonsymmetric::{eigenvalues, hessenberg, ComplexSpectrum, Hessenberg};
pub use subspace::{distance_to_basis, distance_to_row_span, orthonormal_row_basis};

use crate::error::{Error, Result};

/// Normalized resolvent trace `(1/n) sum_k 1/(λ_k - ξ)` of a real spectrum.
pub fn stieltjes_transform(spectrum: &[f64], xi: Complex64) -> Result<Complex64> {
    if !(xi.im > 0.0) {
        return Err(Error::Domain(format!("Stieltjes transform needs Im(xi) > 0, got {xi}")));
    }
    if spectrum.is_empty() {
        return Err(Error::EmptySample);
    }
    let sum: Complex64 = spectrum.iter().map(|&l| (Complex64::new(l, 0.0) - xi).inv()).sum();
    Ok(sum / spectrum.len() as f64)
}
