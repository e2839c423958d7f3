//! Monte-Carlo lab for the smallest singular value of `X − z√n·Id`, the
//! distance of a row to the span of the previous rows, and the intermediate
//! singular values.

use rayon::prelude::*;

use crate::ensemble::{make_seed, shuffle, SeedKind, SeedMatrix};
use crate::error::{Error, Result};
use crate::linalg::{
    distance_to_basis, orthonormal_row_basis, singular_values, singular_values_shifted, Complex64, ComplexMatrix,
    RealMatrix,
};
use crate::rng::rng_stream;

/// Substream reserved for seed construction; trials use substreams `0..trials`.
pub const SEED_SUBSTREAM: u64 = u64::MAX;

/// Default probe exponent for [`intermediate_sv_check`].
pub const DEFAULT_GAMMA: f64 = 0.6;

/// Default probe constant for [`intermediate_sv_check`].
pub const DEFAULT_C_PROBE: f64 = 0.05;

/// Two-sided 95% normal quantile used for Wilson intervals.
pub const WILSON_Z: f64 = 1.959_963_984_540_054;

/// Builds the seed of an experiment from its reserved substream.
pub fn experiment_seed(kind: &SeedKind, n: usize, master_seed: u64) -> Result<SeedMatrix> {
    make_seed(kind, n, Some(&mut rng_stream(master_seed, SEED_SUBSTREAM)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SsvExperiment {
    pub n: usize,
    pub seed_kind: SeedKind,
    pub z: Complex64,
    pub epsilons: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
}

impl SsvExperiment {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidDimension {
                n: self.n,
                reason: "experiments need n >= 2",
            });
        }
        if self.trials == 0 {
            return Err(Error::param("trials", "must be at least 1"));
        }
        if self.epsilons.is_empty() || self.epsilons.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
            return Err(Error::param("epsilons", "need at least one positive finite value"));
        }
        if self.epsilons.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("epsilons", "must be strictly increasing"));
        }
        Ok(())
    }
}

/// Wilson score interval for `successes / trials`.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailPoint {
    pub epsilon: f64,
    pub threshold: f64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SsvTailCurve {
    pub points: Vec<TailPoint>,
    pub trials: usize,
    /// Trials whose singular value computation failed.
    pub failures: usize,
    /// `min √n·s_n` over successful trials, with the trial index.
    pub min_scaled_sn: f64,
    pub min_trial: Option<u64>,
    pub k: f64,
    /// `s_n` per trial, `None` for failed trials.
    pub smallest: Vec<Option<f64>>,
}

/// Empirical `P(s_n(X − z√n·Id) ≤ ε n^{-1/2}/(K + |z|))` over the ε grid.
pub fn ssv_tail_curve(exp: &SsvExperiment) -> Result<SsvTailCurve> {
    exp.validate()?;
    let seed = experiment_seed(&exp.seed_kind, exp.n, exp.master_seed)?;
    let sqrt_n = (exp.n as f64).sqrt();
    let shift = exp.z * sqrt_n;
    let smallest: Vec<Option<f64>> = (0..exp.trials as u64)
        .into_par_iter()
        .map(|t| {
            let x = shuffle(&seed, &mut rng_stream(exp.master_seed, t));
            match singular_values_shifted(x.matrix(), shift) {
                Ok(sv) => Some(sv.smallest()),
                Err(e) => {
                    log::warn!("trial {t}: {e}");
                    None
                }
            }
        })
        .collect();

    let ok: Vec<f64> = smallest.iter().flatten().copied().collect();
    let failures = smallest.len() - ok.len();
    let (min_trial, min_sn) = smallest
        .iter()
        .enumerate()
        .filter_map(|(t, s)| s.map(|s| (t as u64, s)))
        .fold((None, f64::INFINITY), |(bt, bs), (t, s)| if s < bs { (Some(t), s) } else { (bt, bs) });

    let scale = 1.0 / (sqrt_n * (seed.k() + exp.z.norm()));
    let points = exp
        .epsilons
        .iter()
        .map(|&epsilon| {
            let threshold = epsilon * scale;
            let hits = ok.iter().filter(|&&s| s <= threshold).count();
            let p_hat = if ok.is_empty() { 0.0 } else { hits as f64 / ok.len() as f64 };
            let (ci_lo, ci_hi) = wilson_interval(hits, ok.len());
            TailPoint {
                epsilon,
                threshold,
                p_hat,
                ci_lo,
                ci_hi,
            }
        })
        .collect();

    Ok(SsvTailCurve {
        points,
        trials: exp.trials,
        failures,
        min_scaled_sn: min_sn * sqrt_n,
        min_trial,
        k: seed.k(),
        smallest,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSummary {
    pub min: f64,
    pub median: f64,
    pub mean: f64,
    /// `dist(Z_{k+1}, H)/√(n−k)` per trial.
    pub ratios: Vec<f64>,
    /// Trials where the row lay numerically inside the span.
    pub degenerate: usize,
}

/// Distance from row `k` (0-based) of `X − √n z·Id` to the span of rows `0..k`,
/// divided by `√(n − k)`.
pub fn distance_ratio_stats(
    n: usize,
    k: usize,
    seed_kind: &SeedKind,
    z: Complex64,
    trials: usize,
    master_seed: u64,
) -> Result<DistanceSummary> {
    if n < 2 || k + 2 > n {
        return Err(Error::param("k", format!("need k <= n - 2, got k = {k}, n = {n}")));
    }
    if trials == 0 {
        return Err(Error::param("trials", "must be at least 1"));
    }
    let seed = experiment_seed(seed_kind, n, master_seed)?;
    let shift = z * (n as f64).sqrt();
    let norm_factor = 1.0 / ((n - k) as f64).sqrt();
    let results: Vec<(f64, bool)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let x = shuffle(&seed, &mut rng_stream(master_seed, t));
            let m = x.matrix().shifted(shift);
            let basis = orthonormal_row_basis(&m.top_rows(k));
            let row = m.row(k);
            let d = distance_to_basis(&basis, row);
            let row_norm = row.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            (d * norm_factor, d <= 1e-9 * row_norm)
        })
        .collect();
    let ratios: Vec<f64> = results.iter().map(|r| r.0).collect();
    let degenerate = results.iter().filter(|r| r.1).count();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let mut sorted = ratios.clone();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    };
    Ok(DistanceSummary {
        min: sorted[0],
        median,
        mean,
        ratios,
        degenerate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntermediateCheck {
    pub holds: bool,
    /// `min s_{n−i}·n/i` over `⌈n^γ⌉ ≤ i ≤ n − 1`; `+∞` if the range is empty.
    pub worst_ratio: f64,
}

/// Checks `s_{n−i}(A − z·Id) ≥ c_probe·i/n` for all `⌈n^γ⌉ ≤ i ≤ n − 1`.
pub fn intermediate_sv_check(a: &RealMatrix, z: Complex64, gamma: f64, c_probe: f64) -> Result<IntermediateCheck> {
    if !(c_probe > 0.0) {
        return Err(Error::param("c_probe", "must be positive"));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::param("gamma", "must lie in (0, 1)"));
    }
    let n = a.rows();
    let sv = singular_values_shifted(a, z)?;
    let start = (n as f64).powf(gamma).ceil() as usize;
    let nf = n as f64;
    let worst_ratio = (start.max(1)..n)
        .map(|i| sv.values()[n - i - 1] * nf / i as f64)
        .fold(f64::INFINITY, f64::min);
    Ok(IntermediateCheck {
        holds: worst_ratio >= c_probe,
        worst_ratio,
    })
}

/// Relative gap between `Σ s_j(B)^{-2}` and `Σ dist(B_j, span of the other rows)^{-2}`
/// for a full-rank `k x n` matrix, `k ≤ n`.
///
/// Gram-based singular values cannot resolve `s_k` below about `√ε·s_1`, so
/// rank deficiency is also detected through the row distances, which are
/// accurate to `ε·s_1`.
pub fn neg_second_moment_check(b: &ComplexMatrix) -> Result<f64> {
    let (k, n) = (b.rows(), b.cols());
    if k == 0 || k > n {
        return Err(Error::param("b", format!("need 1 <= k <= n, got {k} x {n}")));
    }
    let sv = singular_values(b)?;
    let (s_max, s_min) = (sv.operator_norm(), sv.smallest());
    if s_min <= 1e-10 * s_max {
        return Err(Error::RankDeficient { s_min, s_max });
    }
    let distances: Vec<f64> = (0..k)
        .map(|j| {
            let others = ComplexMatrix::from_fn(k - 1, n, |i, c| b[(if i < j { i } else { i + 1 }, c)]);
            distance_to_basis(&orthonormal_row_basis(&others), b.row(j))
        })
        .collect();
    let d_min = distances.iter().copied().fold(f64::INFINITY, f64::min);
    if d_min <= 1e-10 * s_max {
        return Err(Error::RankDeficient { s_min: d_min, s_max });
    }
    let lhs: f64 = sv.values().iter().map(|s| s.powi(-2)).sum();
    let rhs: f64 = distances.iter().map(|d| d.powi(-2)).sum();
    Ok((lhs - rhs).abs() / lhs)
}
