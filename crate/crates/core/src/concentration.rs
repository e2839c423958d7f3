//! Concentration harness for convex Lipschitz functionals of shuffled entries.
//!
//! Each functional is convex and Lipschitz in the entry vector of the matrix
//! (Euclidean metric on `R^{n²}`, i.e. the Hilbert–Schmidt metric):
//!
//! * operator norm: a norm, and `‖X‖ ≤ ‖X‖_HS`, so `L = 1`;
//! * linear `⟨v, vec X⟩`: affine, `L = |v|`;
//! * distance of the first row to a fixed subspace: `|P⊥ x|` is a seminorm
//!   and `P⊥` is a contraction, so `L = 1`;
//! * HS norm of a row-submatrix: a seminorm bounded by the full HS norm, `L = 1`.
//!
//! Entries live in `[−K, K]`; mapping them affinely onto `[0, 1]` multiplies
//! the Lipschitz constant by `2K`, and every tail statement is made on the
//! original scale with `L' = 2K·L`.

use rayon::prelude::*;

use crate::ensemble::{shuffle, SeedMatrix};
use crate::error::{Error, Result};
use crate::linalg::{distance_to_basis, operator_norm, orthonormal_row_basis, Complex64, RealMatrix};
use crate::rng::rng_stream;

/// Minimum number of draws accepted by [`tail_fit`].
pub const MIN_TAIL_SAMPLES: usize = 1000;

/// Number of points in the tail grid.
pub const TAIL_GRID_POINTS: usize = 20;

/// Moment orders used by the moment-growth fit.
pub const MOMENT_ORDERS: [u32; 3] = [2, 4, 8];

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionalKind {
    OperatorNorm,
    /// Coefficients over the row-major entry vector (length `n²`).
    Linear(Vec<f64>),
    /// Distance from row 0 of `X` to the span of the given rows (each of length `n`).
    DistanceToFixedSubspace(RealMatrix),
    /// HS norm of the rows of `X` listed here.
    HsNormOfSubmatrix(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalSpec {
    kind: FunctionalKind,
    lipschitz: f64,
}

impl FunctionalSpec {
    pub fn new(kind: FunctionalKind) -> Self {
        let lipschitz = match &kind {
            FunctionalKind::Linear(v) => v.iter().map(|c| c * c).sum::<f64>().sqrt(),
            _ => 1.0,
        };
        FunctionalSpec { kind, lipschitz }
    }

    pub fn kind(&self) -> &FunctionalKind {
        &self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            FunctionalKind::OperatorNorm => "operator_norm",
            FunctionalKind::Linear(_) => "linear",
            FunctionalKind::DistanceToFixedSubspace(_) => "distance_to_fixed_subspace",
            FunctionalKind::HsNormOfSubmatrix(_) => "hs_norm_of_submatrix",
        }
    }

    /// Lipschitz constant in the entry vector (zero only for `linear(0)`).
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// Width `2K` of the entry range of `seed`.
    pub fn domain_scale(seed: &SeedMatrix) -> f64 {
        2.0 * seed.k()
    }

    /// `2K·L`, the constant on the original scale.
    pub fn scaled_lipschitz(&self, seed: &SeedMatrix) -> f64 {
        Self::domain_scale(seed) * self.lipschitz
    }

    fn check(&self, n: usize) -> Result<()> {
        match &self.kind {
            FunctionalKind::Linear(v) if v.len() != n * n => Err(Error::param(
                "v",
                format!("linear functional needs {} coefficients, got {}", n * n, v.len()),
            )),
            FunctionalKind::DistanceToFixedSubspace(rows) if rows.cols() != n || rows.rows() >= n => Err(
                Error::param("rows", format!("subspace rows must be k x {n} with k < {n}")),
            ),
            FunctionalKind::HsNormOfSubmatrix(rows) if rows.iter().any(|&r| r >= n) => {
                Err(Error::param("rows_set", format!("row index out of range for n = {n}")))
            }
            _ => Ok(()),
        }
    }

    pub fn evaluate(&self, x: &RealMatrix) -> Result<f64> {
        self.check(x.rows())?;
        match &self.kind {
            FunctionalKind::OperatorNorm => operator_norm(x),
            FunctionalKind::Linear(v) => Ok(v.iter().zip(x.as_slice()).map(|(a, b)| a * b).sum()),
            FunctionalKind::DistanceToFixedSubspace(rows) => {
                let basis = orthonormal_row_basis(&rows.to_complex());
                let row: Vec<Complex64> = x.row(0).iter().map(|&v| Complex64::new(v, 0.0)).collect();
                Ok(distance_to_basis(&basis, &row))
            }
            FunctionalKind::HsNormOfSubmatrix(rows) => Ok(rows
                .iter()
                .map(|&r| x.row(r).iter().map(|v| v * v).sum::<f64>())
                .sum::<f64>()
                .sqrt()),
        }
    }
}

/// `trials` independent draws of the functional; trial `t` shuffles with
/// substream `t` of `master_seed`. Runs trial-parallel, ordered by trial.
pub fn sample_functional(spec: &FunctionalSpec, seed: &SeedMatrix, master_seed: u64, trials: usize) -> Result<Vec<f64>> {
    if trials == 0 {
        return Err(Error::param("trials", "must be at least 1"));
    }
    spec.check(seed.n())?;
    (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let x = shuffle(seed, &mut rng_stream(master_seed, t));
            spec.evaluate(x.matrix())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailRow {
    pub t: f64,
    pub empirical_tail: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailFit {
    /// Fitted sub-Gaussian rate; `+∞` when degenerate.
    pub c_hat: f64,
    /// Fitted moment-growth constant.
    pub c_hat_moment: f64,
    pub samples: usize,
    pub degenerate: bool,
    pub mean: f64,
    pub sd: f64,
    pub lipschitz: f64,
    pub tail_table: Vec<TailRow>,
    /// `(p, ‖Z‖_p)` for `p = 1, 2, 4, 8`.
    pub moment_table: Vec<(u32, f64)>,
}

/// `3 √(log N / N)`, the slack added to the fitted curve in tail checks.
pub fn dkw_slack(samples: usize) -> f64 {
    let n = samples as f64;
    3.0 * (n.ln() / n).sqrt()
}

fn abs_moment(samples: &[f64], p: u32) -> f64 {
    let m = samples.iter().map(|z| z.abs().powi(p as i32)).sum::<f64>() / samples.len() as f64;
    m.powf(1.0 / p as f64)
}

/// Fits `P(|Z − EZ| ≥ t) ≤ 2 exp(−c t²/L²)` and `‖Z‖_p ≤ ‖Z‖_1 + C L √p`.
pub fn tail_fit(samples: &[f64], lipschitz: f64) -> Result<TailFit> {
    if samples.len() < MIN_TAIL_SAMPLES {
        return Err(Error::TooFewSamples {
            got: samples.len(),
            need: MIN_TAIL_SAMPLES,
        });
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let sd = (samples.iter().map(|z| (z - mean).powi(2)).sum::<f64>() / n).sqrt();
    let deviations: Vec<f64> = samples.iter().map(|z| (z - mean).abs()).collect();
    let max_dev = deviations.iter().fold(0.0f64, |m, &d| m.max(d));

    let mut moment_table: Vec<(u32, f64)> = vec![(1, abs_moment(samples, 1))];
    moment_table.extend(MOMENT_ORDERS.iter().map(|&p| (p, abs_moment(samples, p))));

    let degenerate = max_dev == 0.0 || sd <= 1e-15 * mean.abs();
    if degenerate {
        return Ok(TailFit {
            c_hat: f64::INFINITY,
            c_hat_moment: 0.0,
            samples: samples.len(),
            degenerate,
            mean,
            sd,
            lipschitz,
            tail_table: Vec::new(),
            moment_table,
        });
    }
    if !(lipschitz > 0.0) {
        return Err(Error::param("lipschitz", "non-constant samples need a positive Lipschitz constant"));
    }

    let l2 = lipschitz * lipschitz;
    let lo = 0.5 * sd;
    let step = (max_dev - lo) / (TAIL_GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..TAIL_GRID_POINTS).map(|i| lo + step * i as f64).collect();
    let tails: Vec<f64> = grid
        .iter()
        .map(|&t| deviations.iter().filter(|&&d| d >= t).count() as f64 / n)
        .collect();
    let c_hat = grid
        .iter()
        .zip(&tails)
        .filter(|(_, &tail)| tail > 0.0)
        .map(|(&t, &tail)| -l2 * (tail / 2.0).ln() / (t * t))
        .fold(f64::INFINITY, f64::min);
    let tail_table = grid
        .iter()
        .zip(&tails)
        .map(|(&t, &empirical_tail)| TailRow {
            t,
            empirical_tail,
            bound: 2.0 * (-c_hat * t * t / l2).exp(),
        })
        .collect();

    let norm1 = moment_table[0].1;
    let c_hat_moment = moment_table[1..]
        .iter()
        .map(|&(p, np)| (np - norm1) / (lipschitz * (p as f64).sqrt()))
        .fold(f64::NEG_INFINITY, f64::max);

    Ok(TailFit {
        c_hat,
        c_hat_moment,
        samples: samples.len(),
        degenerate,
        mean,
        sd,
        lipschitz,
        tail_table,
        moment_table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{make_seed, SeedKind};

    #[test]
    fn zero_linear_functional_is_constant() {
        let seed = make_seed(&SeedKind::Rademacher, 4, None).unwrap();
        let spec = FunctionalSpec::new(FunctionalKind::Linear(vec![0.0; 16]));
        assert_eq!(spec.lipschitz(), 0.0);
        let draws = sample_functional(&spec, &seed, 1, 1200).unwrap();
        assert!(draws.iter().all(|&d| d == 0.0));
        let fit = tail_fit(&draws, spec.scaled_lipschitz(&seed)).unwrap();
        assert!(fit.degenerate);
        assert_eq!(fit.c_hat, f64::INFINITY);
    }

    #[test]
    fn sampling_is_deterministic() {
        let seed = make_seed(&SeedKind::Rademacher, 6, None).unwrap();
        let spec = FunctionalSpec::new(FunctionalKind::OperatorNorm);
        let a = sample_functional(&spec, &seed, 9, 40).unwrap();
        let b = sample_functional(&spec, &seed, 9, 40).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn functional_shape_errors() {
        let seed = make_seed(&SeedKind::Rademacher, 3, None).unwrap();
        let bad = FunctionalSpec::new(FunctionalKind::Linear(vec![1.0; 4]));
        assert!(sample_functional(&bad, &seed, 0, 5).is_err());
        let bad = FunctionalSpec::new(FunctionalKind::HsNormOfSubmatrix(vec![3]));
        assert!(sample_functional(&bad, &seed, 0, 5).is_err());
        let good = FunctionalSpec::new(FunctionalKind::OperatorNorm);
        assert!(sample_functional(&good, &seed, 0, 0).is_err());
        assert!(tail_fit(&[1.0; 10], 1.0).is_err());
    }

    #[test]
    fn hs_and_distance_functionals() {
        let x = RealMatrix::from_rows(&[&[3.0, 4.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 0.0, 2.0]]).unwrap();
        let hs = FunctionalSpec::new(FunctionalKind::HsNormOfSubmatrix(vec![0, 2]));
        assert!((hs.evaluate(&x).unwrap() - 29f64.sqrt()).abs() < 1e-15);
        let rows = RealMatrix::from_rows(&[&[1.0, 0.0, 0.0]]).unwrap();
        let dist = FunctionalSpec::new(FunctionalKind::DistanceToFixedSubspace(rows));
        assert!((dist.evaluate(&x).unwrap() - 4.0).abs() < 1e-15);
        assert_eq!(dist.lipschitz(), 1.0);
    }

    #[test]
    fn tail_fit_is_self_consistent() {
        let seed = make_seed(&SeedKind::Rademacher, 10, None).unwrap();
        let mut v = vec![0.0; 100];
        v[..10].iter_mut().for_each(|c| *c = 1.0 / 10f64.sqrt());
        let spec = FunctionalSpec::new(FunctionalKind::Linear(v));
        let draws = sample_functional(&spec, &seed, 3, 4000).unwrap();
        let fit = tail_fit(&draws, spec.scaled_lipschitz(&seed)).unwrap();
        assert!(fit.c_hat > 0.0 && fit.c_hat.is_finite());
        assert_eq!(fit.tail_table.len(), TAIL_GRID_POINTS);
        for row in &fit.tail_table {
            assert!(row.empirical_tail <= row.bound + 1e-12);
        }
        let norms: Vec<f64> = fit.moment_table.iter().map(|m| m.1).collect();
        assert!(norms.windows(2).all(|w| w[0] <= w[1] + 1e-12));
    }
}
