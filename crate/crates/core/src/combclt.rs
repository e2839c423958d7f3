//! Combinatorial central limit theorem: `W = Σ a_i x_{π(i)}` for a uniform
//! permutation `π`, its exact variance, Berry–Esseen bounds and an exact
//! enumeration oracle for small `n`.

use crate::error::{Error, Result};
use crate::linalg::RealMatrix;
use crate::rng::{sample_permutation, Permutation, RngStream};
use crate::spectral::{ks_distance_discrete, normal_cdf};

/// Largest `n` for which the law of `W` is enumerated (8! = 40320).
pub const MAX_ENUMERATION_N: usize = 8;

/// Constant of the rank-one Berry–Esseen bound.
pub const RANK_ONE_BE_CONSTANT: f64 = 34.0;

/// Constant of the general-array bound `16.3 A/σ`.
pub const GENERAL_BE_CONSTANT: f64 = 16.3;

/// Relative variance below which an instance is flagged near-degenerate.
pub const NEAR_DEGENERATE_RATIO: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct CombCltInstance {
    a: Vec<f64>,
    x: Vec<f64>,
    k: f64,
    l: f64,
    a_norm: f64,
    sigma2: f64,
}

impl CombCltInstance {
    /// Validates `Σx = 0`, `Σx² = n` (relative `1e-9`) and a non-constant `a`.
    pub fn new(a: Vec<f64>, x: Vec<f64>) -> Result<Self> {
        let n = a.len();
        if n < 2 {
            return Err(Error::InvalidDimension {
                n,
                reason: "an instance needs n >= 2",
            });
        }
        if x.len() != n {
            return Err(Error::param("x", format!("length {} does not match a ({n})", x.len())));
        }
        if a.iter().chain(&x).any(|v| !v.is_finite()) {
            return Err(Error::param("a/x", "non-finite value"));
        }
        let nf = n as f64;
        let sum: f64 = x.iter().sum();
        let sq: f64 = x.iter().map(|v| v * v).sum();
        if sum.abs() > 1e-9 * nf || (sq - nf).abs() > 1e-9 * nf {
            return Err(Error::SeedConstraint {
                sum_residual: sum,
                square_residual: sq - nf,
                tolerance: 1e-9 * nf,
            });
        }
        let sigma2 = comb_variance_rank_one(&a, &x);
        if sigma2 <= 0.0 {
            return Err(Error::ZeroVariance("coefficient vector is constant".into()));
        }
        let a_norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        let a_max = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let k = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(CombCltInstance {
            l: nf.sqrt() * a_max / a_norm,
            a,
            x,
            k,
            a_norm,
            sigma2,
        })
    }

    /// Skewed test family: `a_i` and the raw scores are Exp(1) draws; scores
    /// are centered and rescaled to `Σx² = n`.
    pub fn random_skewed(n: usize, rng: &mut RngStream) -> Result<Self> {
        let a: Vec<f64> = (0..n).map(|_| rng.standard_exponential()).collect();
        let raw: Vec<f64> = (0..n).map(|_| rng.standard_exponential()).collect();
        let mean = raw.iter().sum::<f64>() / n as f64;
        let centered: Vec<f64> = raw.iter().map(|v| v - mean).collect();
        let scale = (n as f64 / centered.iter().map(|v| v * v).sum::<f64>()).sqrt();
        CombCltInstance::new(a, centered.into_iter().map(|v| v * scale).collect())
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// `max |x_i|`
    pub fn k(&self) -> f64 {
        self.k
    }

    /// `√n max|a_i| / |a|`
    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn a_norm(&self) -> f64 {
        self.a_norm
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    pub fn is_near_degenerate(&self) -> bool {
        self.sigma2 < NEAR_DEGENERATE_RATIO * self.a_norm * self.a_norm
    }

    /// Same scores, coefficients multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        CombCltInstance::new(self.a.iter().map(|v| v * factor).collect(), self.x.clone())
    }

    /// The rank-one array `c_ij = a_i x_j`.
    pub fn as_array(&self) -> RealMatrix {
        let n = self.n();
        RealMatrix::from_fn(n, n, |i, j| self.a[i] * self.x[j])
    }
}

/// `E W² = (n Σa² − (Σa)²)/(n − 1)`, exactly `0` for constant `a`.
pub fn comb_variance_rank_one(a: &[f64], x: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), x.len());
    let n = a.len() as f64;
    let sum: f64 = a.iter().sum();
    let sq: f64 = a.iter().map(|v| v * v).sum();
    let v = (n * sq - sum * sum) / (n - 1.0);
    let first = a.first().copied().unwrap_or(0.0);
    if a.iter().all(|&ai| ai == first) || v <= 1e-14 * n * sq / (n - 1.0) {
        0.0
    } else {
        v
    }
}

/// Hoeffding's variance of `Σ c_{iπ(i)}` and the largest doubly-centered entry.
pub fn comb_variance_general(c: &RealMatrix) -> Result<(f64, f64)> {
    if !c.is_square() || c.rows() < 2 {
        return Err(Error::InvalidDimension {
            n: c.rows(),
            reason: "the array must be square with n >= 2",
        });
    }
    let n = c.rows();
    let nf = n as f64;
    let row_means: Vec<f64> = (0..n).map(|i| c.row(i).iter().sum::<f64>() / nf).collect();
    let col_means: Vec<f64> = (0..n).map(|j| (0..n).map(|i| c[(i, j)]).sum::<f64>() / nf).collect();
    let grand = row_means.iter().sum::<f64>() / nf;
    let mut ss = 0.0;
    let mut a_max: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d = c[(i, j)] - row_means[i] - col_means[j] + grand;
            ss += d * d;
            a_max = a_max.max(d.abs());
        }
    }
    Ok((ss / (nf - 1.0), a_max))
}

/// `34 L K |a| / (σ √n)`.
pub fn be_bound_value(l: f64, k: f64, a_norm: f64, sigma: f64, n: usize) -> f64 {
    RANK_ONE_BE_CONSTANT * l * k * a_norm / (sigma * (n as f64).sqrt())
}

pub fn be_bound(inst: &CombCltInstance) -> f64 {
    be_bound_value(inst.l, inst.k, inst.a_norm, inst.sigma(), inst.n())
}

/// `16.3 A / σ` for a general array.
pub fn be_bound_general(c: &RealMatrix) -> Result<f64> {
    let (sigma2, a_max) = comb_variance_general(c)?;
    if sigma2 <= 0.0 {
        return Err(Error::ZeroVariance("doubly-centered array vanishes".into()));
    }
    Ok(GENERAL_BE_CONSTANT * a_max / sigma2.sqrt())
}

pub fn w_for_permutation(inst: &CombCltInstance, perm: &[usize]) -> f64 {
    inst.a.iter().zip(perm).map(|(a, &p)| a * inst.x[p]).sum()
}

pub fn sample_w(inst: &CombCltInstance, rng: &mut RngStream) -> f64 {
    let perm = sample_permutation(rng, inst.n()).expect("n >= 2");
    w_for_permutation(inst, perm.as_slice())
}

/// Exact law of `W` as sorted `(value, probability)` atoms. Values that agree
/// to `1e-12` relative to `|a|·√n` are merged.
pub fn exact_distribution(inst: &CombCltInstance) -> Result<Vec<(f64, f64)>> {
    let n = inst.n();
    if n > MAX_ENUMERATION_N {
        return Err(Error::EnumerationTooLarge {
            what: "exact law of W",
            count: format!("{n}!"),
        });
    }
    let mut values = Vec::new();
    Permutation::for_each_of(n, |p| values.push(w_for_permutation(inst, p)));
    values.sort_by(f64::total_cmp);
    let total = values.len() as f64;
    let tol = 1e-12 * inst.a_norm * (n as f64).sqrt();
    let mut atoms: Vec<(f64, usize)> = Vec::new();
    for v in values {
        match atoms.last_mut() {
            Some((last, count)) if v - *last <= tol => *count += 1,
            _ => atoms.push((v, 1)),
        }
    }
    Ok(atoms.into_iter().map(|(v, c)| (v, c as f64 / total)).collect())
}

/// Mean and variance of a discrete law.
pub fn atoms_mean_variance(atoms: &[(f64, f64)]) -> (f64, f64) {
    let mean: f64 = atoms.iter().map(|(v, p)| v * p).sum();
    let var: f64 = atoms.iter().map(|(v, p)| p * (v - mean) * (v - mean)).sum();
    (mean, var)
}

/// Kolmogorov distance between the exact law of `W` and `N(0, σ²)`.
pub fn exact_ks_to_gaussian(inst: &CombCltInstance) -> Result<f64> {
    let atoms = exact_distribution(inst)?;
    let sigma = inst.sigma();
    Ok(ks_distance_discrete(&atoms, |t| normal_cdf(t / sigma)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_stream;

    fn three_point() -> Vec<f64> {
        let c = 1.5f64.sqrt();
        vec![c, 0.0, -c]
    }

    #[test]
    fn variance_examples() {
        let x = three_point();
        assert!((comb_variance_rank_one(&[1.0, 0.0, 0.0], &x) - 1.0).abs() < 1e-15);
        let n = 9;
        let flat = vec![1.0 / (n as f64).sqrt(); n];
        assert_eq!(comb_variance_rank_one(&flat, &vec![0.0; n]), 0.0);
        assert_eq!(comb_variance_rank_one(&[1.0, -1.0], &[1.0, -1.0]), 4.0);
    }

    #[test]
    fn constant_coefficients_are_rejected() {
        let err = CombCltInstance::new(vec![0.5; 3], three_point()).unwrap_err();
        assert!(matches!(err, Error::ZeroVariance(_)));
        assert!(CombCltInstance::new(vec![1.0, 0.0, 0.0], vec![1.0, 1.0, -1.0]).is_err());
    }

    #[test]
    fn general_variance_examples() {
        let inst = CombCltInstance::new(vec![0.3, -1.2, 2.0, 0.1], vec![1.0, 1.0, -1.0, -1.0]).unwrap();
        let (s2, _) = comb_variance_general(&inst.as_array()).unwrap();
        assert!((s2 - inst.sigma2()).abs() < 1e-12);
        let constant = RealMatrix::from_fn(4, 4, |_, _| 2.5);
        assert_eq!(comb_variance_general(&constant).unwrap(), (0.0, 0.0));
        let u = [1.0, -2.0, 0.5, 3.0];
        let v = [0.25, 7.0, -1.0, 2.0];
        let additive = RealMatrix::from_fn(4, 4, |i, j| u[i] + v[j]);
        let (s2, a) = comb_variance_general(&additive).unwrap();
        assert!(s2 < 1e-28 && a < 1e-14);
        assert!(be_bound_general(&constant).is_err());
    }

    #[test]
    fn be_bound_examples() {
        let x = vec![1.0, 1.0, -1.0, -1.0];
        let inst = CombCltInstance::new(vec![1.0, 0.0, 0.0, 0.0], x.clone()).unwrap();
        assert_eq!(inst.l(), 2.0);
        assert!((be_bound(&inst) - 34.0).abs() < 1e-12);

        let n = 16;
        let s = 1.0 / (n as f64).sqrt();
        let a: Vec<f64> = (0..n).map(|i| if i < n / 2 { s } else { -s }).collect();
        let x: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let inst = CombCltInstance::new(a, x).unwrap();
        assert!((inst.l() - 1.0).abs() < 1e-15);
        let sigma = (n as f64 / (n as f64 - 1.0)).sqrt();
        assert!((be_bound(&inst) - 34.0 / (sigma * (n as f64).sqrt())).abs() < 1e-12);

        let r = be_bound_value(1.5, 2.0, 1.0, 0.9, 400) / be_bound_value(1.5, 2.0, 1.0, 0.9, 100);
        assert!((r - 0.5).abs() < 1e-15);
    }

    #[test]
    fn identity_permutation_gives_inner_product() {
        let inst = CombCltInstance::new(vec![0.5, 2.0, -1.0], three_point()).unwrap();
        let want: f64 = inst.a().iter().zip(inst.x()).map(|(a, x)| a * x).sum();
        assert_eq!(w_for_permutation(&inst, &[0, 1, 2]), want);
    }

    #[test]
    fn sample_w_is_deterministic() {
        let inst = CombCltInstance::random_skewed(20, &mut rng_stream(1, 1)).unwrap();
        let a: Vec<f64> = {
            let mut r = rng_stream(5, 0);
            (0..10).map(|_| sample_w(&inst, &mut r)).collect()
        };
        let b: Vec<f64> = {
            let mut r = rng_stream(5, 0);
            (0..10).map(|_| sample_w(&inst, &mut r)).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn exact_law_examples() {
        let inst = CombCltInstance::new(vec![1.0, -1.0], vec![1.0, -1.0]).unwrap();
        assert_eq!(exact_distribution(&inst).unwrap(), vec![(-2.0, 0.5), (2.0, 0.5)]);

        let x = three_point();
        let inst = CombCltInstance::new(vec![1.0, 0.0, 0.0], x.clone()).unwrap();
        let law = exact_distribution(&inst).unwrap();
        assert_eq!(law.len(), 3);
        for ((v, p), want) in law.iter().zip([x[2], x[1], x[0]]) {
            assert_eq!(*v, want);
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }

        let inst = CombCltInstance::random_skewed(9, &mut rng_stream(0, 0)).unwrap();
        assert!(exact_distribution(&inst).is_err());
    }

    #[test]
    fn exact_mean_zero_and_variance_match() {
        let mut rng = rng_stream(77, 0);
        for n in 2..=7 {
            let inst = CombCltInstance::random_skewed(n, &mut rng).unwrap();
            let (mean, var) = atoms_mean_variance(&exact_distribution(&inst).unwrap());
            assert!(mean.abs() < 1e-12 * inst.a_norm());
            assert!((var - inst.sigma2()).abs() < 1e-10 * inst.sigma2());
        }
    }

    #[test]
    fn near_degenerate_flag() {
        let mut a = vec![1.0; 6];
        a[0] += 1e-5;
        let x = vec![1.0, -1.0, 1.0, -1.0, 1.0, -1.0];
        let inst = CombCltInstance::new(a, x).unwrap();
        assert!(inst.is_near_degenerate());
    }
}
