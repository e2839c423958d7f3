//! Hermitian eigenvalues and singular values.
//!
//! A complex Hermitian matrix is reduced to tridiagonal form by Householder
//! reflectors; a diagonal unitary similarity then makes the off-diagonal
//! real and nonnegative, and the real symmetric tridiagonal matrix is
//! diagonalized by implicit-shift QL iterations.
//!
//! Singular values of `M` are square roots of the eigenvalues of the Gram
//! matrix `M*M`. This squares the condition number: an eigenvalue error of
//! order `eps·‖M‖²` becomes an absolute singular value error of order
//! `eps·‖M‖²/s`. For `‖M‖ ≈ 3√n`, `n ≤ 500` and `s ≥ 1e-4` this stays below
//! `1e-8`, which is far under the thresholds the labs use.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, RealMatrix};
use crate::error::{Error, Result};

/// Singular values in nonincreasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum {
    values: Vec<f64>,
}

impl SingularSpectrum {
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        SingularSpectrum { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn operator_norm(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn smallest(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn hs_norm_sq(&self) -> f64 {
        self.values.iter().map(|s| s * s).sum()
    }
}

/// Eigenvalues of a real symmetric tridiagonal matrix, ascending.
///
/// `diag` has length `n`, `off` has length `n - 1` (`off[i]` couples `i` and `i + 1`).
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    assert_eq!(off.len(), n - 1, "off-diagonal length");
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    let eps = f64::EPSILON;
    let max_iterations = 30 * n;
    let mut total = 0usize;

    for l in 0..n {
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if total >= max_iterations {
                return Err(Error::NoConvergence { row: l, iterations: total });
            }
            total += 1;

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r } else { -r });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    log::trace!("tql: n = {n}, total iterations = {total}");
    d.sort_by(|a, b| a.total_cmp(b));
    Ok(d)
}

/// Householder reduction of a Hermitian matrix to real symmetric tridiagonal
/// form `(diag, off)` with the same eigenvalues.
pub fn tridiagonalize(a: &ComplexMatrix) -> (Vec<f64>, Vec<f64>) {
    assert!(a.is_square());
    let n = a.rows();
    let mut a = a.clone();
    let zero = Complex64::new(0.0, 0.0);
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    let mut v = vec![zero; n];
    let mut p = vec![zero; n];

    for k in 0..n.saturating_sub(1) {
        let norm = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        let x0 = a[(k + 1, k)];
        let tail_zero = (k + 2..n).all(|i| a[(i, k)] == zero);
        if norm == 0.0 || tail_zero {
            off.push(x0.norm());
            continue;
        }
        // alpha = -e^{i arg x0} |x|, v = x - alpha e1
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        for i in k + 1..n {
            v[i] = a[(i, k)];
        }
        v[k + 1] -= alpha;
        let vnorm_sq: f64 = (k + 1..n).map(|i| v[i].norm_sqr()).sum();
        let tau = 2.0 / vnorm_sq;

        // p = tau · A v on the trailing block
        for i in k + 1..n {
            let row = a.row(i);
            let mut s = zero;
            for j in k + 1..n {
                s += row[j] * v[j];
            }
            p[i] = s * tau;
        }
        // w = p - (tau/2)(v* p) v
        let mut vp = zero;
        for i in k + 1..n {
            vp += v[i].conj() * p[i];
        }
        let kfac = 0.5 * tau * vp.re;
        for i in k + 1..n {
            p[i] -= v[i] * kfac;
        }
        // A <- A - v w* - w v*
        for i in k + 1..n {
            let vi = v[i];
            let wi = p[i];
            let row = a.row_mut(i);
            for j in k + 1..n {
                row[j] -= vi * p[j].conj() + wi * v[j].conj();
            }
        }
        a[(k + 1, k)] = alpha;
        a[(k, k + 1)] = alpha.conj();
        for i in k + 2..n {
            a[(i, k)] = zero;
            a[(k, i)] = zero;
        }
        off.push(norm);
    }
    let diag = (0..n).map(|i| a[(i, i)].re).collect();
    (diag, off)
}

/// Eigenvalues of a complex Hermitian matrix, ascending. Hermitian symmetry
/// is assumed, not checked.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::InvalidDimension {
            n: a.rows(),
            reason: "hermitian eigenvalues need a square matrix",
        });
    }
    let (d, e) = tridiagonalize(a);
    tridiagonal_eigenvalues(&d, &e)
}

/// Singular values of an arbitrary complex matrix (min(rows, cols) of them).
pub fn singular_values(m: &ComplexMatrix) -> Result<SingularSpectrum> {
    if let Some(p) = m.as_slice().iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NonFinite {
            row: p / m.cols(),
            col: p % m.cols(),
        });
    }
    let gram = m.small_gram();
    let ev = hermitian_eigenvalues(&gram)?;
    Ok(SingularSpectrum::new(ev.into_iter().map(|l| l.max(0.0).sqrt()).collect()))
}

/// Singular values of `A - z·Id`.
pub fn singular_values_shifted(a: &RealMatrix, z: Complex64) -> Result<SingularSpectrum> {
    assert!(a.is_square(), "shifted singular values need a square matrix");
    singular_values(&a.shifted(z))
}

/// Largest singular value of a real matrix.
pub fn operator_norm(a: &RealMatrix) -> Result<f64> {
    Ok(singular_values(&a.to_complex())?.operator_norm())
}

/// The `2n x 2n` Hermitian matrix `[[0, M], [M*, 0]]` with `M = A - z·Id`.
pub fn hermitize(a: &RealMatrix, z: Complex64) -> ComplexMatrix {
    let n = a.rows();
    let m = a.shifted(z);
    let mut b = ComplexMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            b[(i, n + j)] = m[(i, j)];
            b[(n + j, i)] = m[(i, j)].conj();
        }
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_stream;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_complex(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
        let mut rng = rng_stream(seed, 1);
        ComplexMatrix::from_fn(rows, cols, |_, _| c(rng.standard_normal(), rng.standard_normal()))
    }

    #[test]
    fn tridiagonal_known_spectrum() {
        // path graph Laplacian-like: eigenvalues 2 - 2cos(k pi/(n+1))
        let n = 7;
        let ev = tridiagonal_eigenvalues(&vec![2.0; n], &vec![-1.0; n - 1]).unwrap();
        for (k, v) in ev.iter().enumerate() {
            let want = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((v - want).abs() < 1e-13);
        }
    }

    #[test]
    fn diagonal_shift_singular_values() {
        let a = RealMatrix::diagonal(&[3.0, -4.0]);
        let s = singular_values_shifted(&a, c(0.0, 0.0)).unwrap();
        assert!((s.values()[0] - 4.0).abs() < 1e-14);
        assert!((s.values()[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn jordan_block_singular_values() {
        let a = RealMatrix::from_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        let s = singular_values_shifted(&a, c(0.0, 0.0)).unwrap();
        let r5 = 5f64.sqrt();
        assert!((s.values()[0] - (1.0 + r5) / 2.0).abs() < 1e-14);
        assert!((s.values()[1] - (r5 - 1.0) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn hs_identity_for_shifted_matrices() {
        let mut rng = rng_stream(4, 4);
        for n in [1usize, 2, 5, 17] {
            let a = RealMatrix::from_fn(n, n, |_, _| rng.standard_normal());
            let z = c(rng.standard_normal(), rng.standard_normal());
            let s = singular_values_shifted(&a, z).unwrap();
            let hs = a.shifted(z).hs_norm_sq();
            assert!((s.hs_norm_sq() - hs).abs() <= 1e-10 * hs);
            assert!(s.values().windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn hermitian_eigenvalues_match_trace_and_frobenius() {
        let m = random_complex(6, 6, 9);
        let h = m.matmul(&m.conj_transpose());
        let ev = hermitian_eigenvalues(&h).unwrap();
        let tr: f64 = (0..6).map(|i| h[(i, i)].re).sum();
        assert!((ev.iter().sum::<f64>() - tr).abs() < 1e-10 * tr);
        let fro = h.hs_norm_sq();
        assert!((ev.iter().map(|v| v * v).sum::<f64>() - fro).abs() < 1e-10 * fro);
        assert!(ev.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn hermitize_zero_and_scalar() {
        let b = hermitize(&RealMatrix::zeros(3, 3), c(0.0, 0.0));
        assert!(hermitian_eigenvalues(&b).unwrap().iter().all(|&v| v == 0.0));
        let b = hermitize(&RealMatrix::diagonal(&[2.0]), c(0.0, 0.0));
        let ev = hermitian_eigenvalues(&b).unwrap();
        assert!((ev[0] + 2.0).abs() < 1e-15 && (ev[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn hermitization_matches_gram_route() {
        let mut rng = rng_stream(12, 0);
        let a = RealMatrix::from_fn(4, 4, |_, _| rng.standard_normal());
        let z = c(1.0, 1.0);
        let b = hermitize(&a, z);
        assert!(b.is_hermitian(0.0));
        let mut ev = hermitian_eigenvalues(&b).unwrap();
        let s = singular_values_shifted(&a, z).unwrap();
        let mut want: Vec<f64> = s.values().iter().flat_map(|&v| [v, -v]).collect();
        want.sort_by(f64::total_cmp);
        ev.sort_by(f64::total_cmp);
        for (x, y) in ev.iter().zip(&want) {
            assert!((x - y).abs() < 1e-8, "{x} vs {y}");
        }
    }

    #[test]
    fn rectangular_singular_values() {
        let m = random_complex(3, 7, 2);
        let s = singular_values(&m).unwrap();
        assert_eq!(s.len(), 3);
        assert!((s.hs_norm_sq() - m.hs_norm_sq()).abs() < 1e-10 * m.hs_norm_sq());
        let st = singular_values(&m.conj_transpose()).unwrap();
        for (a, b) in s.values().iter().zip(st.values()) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
