//! Eigenvalues of dense real nonsymmetric matrices.
//!
//! Pipeline: diagonal balancing, Householder reduction to upper Hessenberg
//! form, then Francis implicit double-shift QR (the EISPACK `hqr` scheme)
//! with 1x1 / 2x2 block extraction.

use num_complex::Complex64;

use super::matrix::RealMatrix;
use crate::error::{Error, Result};

/// Eigenvalue multiset, kept in lexicographic `(re, im)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrum {
    values: Vec<Complex64>,
}

impl ComplexSpectrum {
    pub fn new(mut values: Vec<Complex64>) -> Self {
        values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        ComplexSpectrum { values }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `sum_k λ_k^p`.
    pub fn power_sum(&self, p: i32) -> Complex64 {
        self.values.iter().map(|v| v.powi(p)).sum()
    }

    /// Whether the multiset equals its complex conjugate, pairing within `tol`.
    pub fn is_self_conjugate(&self, tol: f64) -> bool {
        let mut used = vec![false; self.values.len()];
        'outer: for (i, v) in self.values.iter().enumerate() {
            if used[i] {
                continue;
            }
            if v.im.abs() <= tol {
                used[i] = true;
                continue;
            }
            for (j, w) in self.values.iter().enumerate() {
                if !used[j] && j != i && (w - v.conj()).norm() <= tol {
                    used[i] = true;
                    used[j] = true;
                    continue 'outer;
                }
            }
            return false;
        }
        true
    }
}

/// Upper Hessenberg form `h` with `a = q h qᵀ`, `q` orthogonal.
#[derive(Debug, Clone)]
pub struct Hessenberg {
    pub h: RealMatrix,
    pub q: RealMatrix,
}

/// Orthogonal similarity reduction of `a` to upper Hessenberg form.
pub fn hessenberg(a: &RealMatrix) -> Hessenberg {
    assert!(a.is_square(), "hessenberg needs a square matrix");
    let mut h = a.clone();
    let mut q = RealMatrix::identity(a.rows());
    reduce_to_hessenberg(&mut h, Some(&mut q));
    Hessenberg { h, q }
}

fn reduce_to_hessenberg(h: &mut RealMatrix, mut q: Option<&mut RealMatrix>) {
    let n = h.rows();
    if n < 3 {
        return;
    }
    let mut u = vec![0.0; n];
    for m in 1..n - 1 {
        let scale: f64 = (m..n).map(|i| h[(i, m - 1)].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut norm_sq = 0.0;
        for i in (m..n).rev() {
            u[i] = h[(i, m - 1)] / scale;
            norm_sq += u[i] * u[i];
        }
        let mut g = norm_sq.sqrt();
        if u[m] > 0.0 {
            g = -g;
        }
        // reflector I - u uᵀ / beta
        let beta = norm_sq - u[m] * g;
        u[m] -= g;

        for j in m - 1..n {
            let f = (m..n).map(|i| u[i] * h[(i, j)]).sum::<f64>() / beta;
            for i in m..n {
                h[(i, j)] -= f * u[i];
            }
        }
        for i in 0..n {
            let f = (m..n).map(|j| u[j] * h[(i, j)]).sum::<f64>() / beta;
            for j in m..n {
                h[(i, j)] -= f * u[j];
            }
        }
        if let Some(q) = q.as_deref_mut() {
            for i in 0..n {
                let f = (m..n).map(|j| u[j] * q[(i, j)]).sum::<f64>() / beta;
                for j in m..n {
                    q[(i, j)] -= f * u[j];
                }
            }
        }
        h[(m, m - 1)] = scale * g;
        for i in m + 1..n {
            h[(i, m - 1)] = 0.0;
        }
    }
}

/// Diagonal similarity scaling by powers of two so that row and column norms
/// are comparable. Exact in floating point.
pub(crate) fn balance(a: &mut RealMatrix) {
    const RADIX: f64 = 2.0;
    const RADIX_SQ: f64 = RADIX * RADIX;
    let n = a.rows();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX_SQ;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX_SQ;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let inv = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= inv;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// All eigenvalues of a real square matrix.
pub fn eigenvalues(a: &RealMatrix) -> Result<ComplexSpectrum> {
    if !a.is_square() || a.rows() == 0 {
        return Err(Error::InvalidDimension {
            n: a.rows(),
            reason: "eigenvalues need a non-empty square matrix",
        });
    }
    a.check_finite()?;
    let mut h = a.clone();
    balance(&mut h);
    reduce_to_hessenberg(&mut h, None);
    hessenberg_qr(&mut h).map(ComplexSpectrum::new)
}

#[inline]
fn with_sign(magnitude: f64, sign_of: f64) -> f64 {
    if sign_of >= 0.0 {
        magnitude.abs()
    } else {
        -magnitude.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix (destroyed).
fn hessenberg_qr(a: &mut RealMatrix) -> Result<Vec<Complex64>> {
    let n = a.rows();
    let eps = f64::EPSILON;
    let max_iterations = 30 * n.max(1);
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];

    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[(i, j)].abs();
        }
    }

    let mut total_iterations = 0usize;
    let mut exceptional_shift = 0.0;
    let mut nn = n as isize - 1;
    while nn >= 0 {
        let top = nn as usize;
        let mut its = 0usize;
        loop {
            // look for a single small subdiagonal element
            let mut l = 0usize;
            for ll in (1..=top).rev() {
                let mut s = a[(ll - 1, ll - 1)].abs() + a[(ll, ll)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[(ll, ll - 1)].abs() <= eps * s {
                    a[(ll, ll - 1)] = 0.0;
                    l = ll;
                    break;
                }
            }
            let mut x = a[(top, top)];
            if l == top {
                wr[top] = x + exceptional_shift;
                wi[top] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = a[(top - 1, top - 1)];
            let mut w = a[(top, top - 1)] * a[(top - 1, top)];
            if l == top - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x += exceptional_shift;
                if q >= 0.0 {
                    let z = p + with_sign(z, p);
                    wr[top - 1] = x + z;
                    wr[top] = if z != 0.0 { x - w / z } else { x + z };
                    wi[top - 1] = 0.0;
                    wi[top] = 0.0;
                } else {
                    wr[top - 1] = x + p;
                    wr[top] = x + p;
                    wi[top - 1] = z;
                    wi[top] = -z;
                }
                nn -= 2;
                break;
            }

            if total_iterations >= max_iterations {
                return Err(Error::NoConvergence {
                    row: top,
                    iterations: total_iterations,
                });
            }
            if its > 0 && its.is_multiple_of(10) {
                exceptional_shift += x;
                for i in 0..=top {
                    a[(i, i)] -= x;
                }
                let s = a[(top, top - 1)].abs() + a[(top - 1, top - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
                log::trace!("hqr: exceptional shift at block end {top}, iteration {its}");
            }
            its += 1;
            total_iterations += 1;

            // look for two consecutive small subdiagonal elements
            let mut m = top - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[(m, m)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[(m + 1, m)] + a[(m, m + 1)];
                q = a[(m + 1, m + 1)] - z - rr - ss;
                r = a[(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=top {
                a[(i, i - 2)] = 0.0;
                if i != m + 2 {
                    a[(i, i - 3)] = 0.0;
                }
            }

            // double QR step on rows l..=top and columns m..=top
            for k in m..top {
                if k != m {
                    p = a[(k, k - 1)];
                    q = a[(k + 1, k - 1)];
                    r = if k != top - 1 { a[(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = with_sign((p * p + q * q + r * r).sqrt(), p);
                if s == 0.0 {
                    continue;
                }
                if k == m {
                    if l != m {
                        a[(k, k - 1)] = -a[(k, k - 1)];
                    }
                } else {
                    a[(k, k - 1)] = -s * x;
                }
                p += s;
                x = p / s;
                y = q / s;
                let z = r / s;
                q /= p;
                r /= p;
                for j in k..=top {
                    let mut pp = a[(k, j)] + q * a[(k + 1, j)];
                    if k != top - 1 {
                        pp += r * a[(k + 2, j)];
                        a[(k + 2, j)] -= pp * z;
                    }
                    a[(k + 1, j)] -= pp * y;
                    a[(k, j)] -= pp * x;
                }
                let mmin = top.min(k + 3);
                for i in l..=mmin {
                    let mut pp = x * a[(i, k)] + y * a[(i, k + 1)];
                    if k != top - 1 {
                        pp += z * a[(i, k + 2)];
                        a[(i, k + 2)] -= pp * r;
                    }
                    a[(i, k + 1)] -= pp * q;
                    a[(i, k)] -= pp;
                }
            }
        }
    }
    log::trace!("hqr: n = {n}, total iterations = {total_iterations}");
    Ok(wr.into_iter().zip(wi).map(|(re, im)| Complex64::new(re, im)).collect())
}
