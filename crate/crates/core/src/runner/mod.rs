//! Declarative experiment runner: parse a config, dispatch to the matching
//! lab, and write deterministic CSV/JSON artifacts.
//!
//! Trial `t` always draws from substream `t` of the master seed. Trials run
//! in parallel on the current rayon pool; results are assembled in trial
//! order, so the written files depend only on the config.

pub mod config;
pub mod report;
pub mod selftest;

use std::time::Instant;

use rayon::prelude::*;

pub use config::{Experiment, ExperimentConfig, FunctionalChoice, SeedSpec};
pub use report::{
    validate_summary, write_report, CsvTable, ReportFormat, Results, RunReport, Summary, SCHEMA_VERSION,
    SUMMARY_FILE,
};

use crate::combclt::{be_bound, exact_ks_to_gaussian, sample_w, CombCltInstance, MAX_ENUMERATION_N};
use crate::concentration::{dkw_slack, sample_functional, tail_fit, FunctionalKind, FunctionalSpec};
use crate::ensemble::{exact_pair_moments, make_seed, shuffle, SeedMatrix};
use crate::error::{Error, Result};
use crate::linalg::{singular_values_shifted, Complex64, RealMatrix};
use crate::rng::rng_stream;
use crate::spectral::{
    esd, ks_distance, ks_statistic, log_potential_from_singular_values, log_potential_limit, normal_cdf,
    ReferenceLaw,
};
use crate::ssv::{experiment_seed, ssv_tail_curve, SsvExperiment};
use report::{
    fmt_f64, CircularLawRow, CombCltRow, ConcentrationRow, LogPotentialRow, MomentsRow, QuarterCircleRow, SsvPoint,
    SsvSummary,
};

/// Trials above this fraction of failed kernel calls abort the run.
pub const KERNEL_FAILURE_BUDGET: f64 = 0.01;

/// `√n·s_n` must stay above this for `n >= POSITIVITY_MIN_N`.
pub const POSITIVITY_FLOOR: f64 = 1e-6;
pub const POSITIVITY_MIN_N: usize = 100;

struct Outcome {
    results: Results,
    tables: Vec<CsvTable>,
    trials: usize,
    failures: usize,
}

fn seed_for(config: &ExperimentConfig, n: usize) -> Result<SeedMatrix> {
    experiment_seed(&config.seed.kind(), n, config.master_seed)
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn max(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn or_nan(values: &[f64], f: fn(&[f64]) -> f64) -> f64 {
    if values.is_empty() {
        f64::NAN
    } else {
        f(values)
    }
}

/// All `(n, trial)` pairs of a grid in output order.
fn grid(config: &ExperimentConfig) -> Vec<(usize, u64)> {
    config
        .n
        .iter()
        .flat_map(|&n| (0..config.trials as u64).map(move |t| (n, t)))
        .collect()
}

fn circular_law(config: &ExperimentConfig) -> Result<Outcome> {
    let seeds: Vec<SeedMatrix> = config.n.iter().map(|&n| seed_for(config, n)).collect::<Result<_>>()?;
    let cells = grid(config);
    let spectra: Vec<Option<Vec<Complex64>>> = cells
        .par_iter()
        .map(|&(n, t)| {
            let seed = &seeds[config.n.iter().position(|&m| m == n).expect("n in grid")];
            let sample = shuffle(seed, &mut rng_stream(config.master_seed, t));
            esd(&sample)
                .map_err(|e| log::warn!("circular-law n={n} trial {t}: {e}"))
                .ok()
                .map(|e| e.points().to_vec())
        })
        .collect();

    let mut tables = Vec::new();
    let mut ks = CsvTable::new("ks.csv", &["n", "trial", "radial_ks", "angular_ks", "second_moment"]);
    let mut rows = Vec::new();
    for &n in &config.n {
        let mut eig = CsvTable::new(format!("eigenvalues_n{n}.csv"), &["trial", "index", "re", "im"]);
        let (mut radial, mut angular, mut second) = (Vec::new(), Vec::new(), Vec::new());
        for ((_, t), points) in cells.iter().zip(&spectra).filter(|((m, _), _)| *m == n) {
            let Some(points) = points else { continue };
            for (i, z) in points.iter().enumerate() {
                eig.push(vec![t.to_string(), i.to_string(), fmt_f64(z.re), fmt_f64(z.im)]);
            }
            let radii: Vec<f64> = points.iter().map(|z| z.norm()).collect();
            let angles: Vec<f64> = points.iter().map(|z| z.arg()).collect();
            let r = ks_statistic(&radii, ReferenceLaw::CircularRadial)?.statistic;
            let a = ks_statistic(&angles, ReferenceLaw::UniformAngle)?.statistic;
            let m2 = points.iter().map(|z| z.norm_sqr()).sum::<f64>() / points.len() as f64;
            ks.push(vec![n.to_string(), t.to_string(), fmt_f64(r), fmt_f64(a), fmt_f64(m2)]);
            radial.push(r);
            angular.push(a);
            second.push(m2);
        }
        rows.push(CircularLawRow {
            n,
            trials_ok: radial.len(),
            mean_radial_ks: or_nan(&radial, mean),
            max_radial_ks: or_nan(&radial, max),
            mean_angular_ks: or_nan(&angular, mean),
            max_angular_ks: or_nan(&angular, max),
            mean_second_moment: or_nan(&second, mean),
        });
        tables.push(eig);
    }
    tables.push(ks);
    Ok(Outcome {
        results: Results::CircularLaw(rows),
        tables,
        trials: cells.len(),
        failures: spectra.iter().filter(|s| s.is_none()).count(),
    })
}

fn quarter_circle(config: &ExperimentConfig) -> Result<Outcome> {
    let seeds: Vec<SeedMatrix> = config.n.iter().map(|&n| seed_for(config, n)).collect::<Result<_>>()?;
    let cells = grid(config);
    let spectra: Vec<Option<Vec<f64>>> = cells
        .par_iter()
        .map(|&(n, t)| {
            let seed = &seeds[config.n.iter().position(|&m| m == n).expect("n in grid")];
            let sample = shuffle(seed, &mut rng_stream(config.master_seed, t));
            singular_values_shifted(&sample.normalized(), Complex64::new(0.0, 0.0))
                .map_err(|e| log::warn!("quarter-circle n={n} trial {t}: {e}"))
                .ok()
                .map(|s| s.values().to_vec())
        })
        .collect();

    let mut tables = Vec::new();
    let mut ks_table = CsvTable::new("ks.csv", &["n", "trial", "ks"]);
    let mut rows = Vec::new();
    for &n in &config.n {
        let mut sv_table = CsvTable::new(format!("singular_values_n{n}.csv"), &["trial", "index", "s"]);
        let mut ks = Vec::new();
        for ((_, t), values) in cells.iter().zip(&spectra).filter(|((m, _), _)| *m == n) {
            let Some(values) = values else { continue };
            for (i, s) in values.iter().enumerate() {
                sv_table.push(vec![t.to_string(), i.to_string(), fmt_f64(*s)]);
            }
            let d = ks_statistic(values, ReferenceLaw::QuarterCircle)?.statistic;
            ks_table.push(vec![n.to_string(), t.to_string(), fmt_f64(d)]);
            ks.push(d);
        }
        rows.push(QuarterCircleRow {
            n,
            trials_ok: ks.len(),
            mean_ks: or_nan(&ks, mean),
            max_ks: or_nan(&ks, max),
        });
        tables.push(sv_table);
    }
    tables.push(ks_table);
    Ok(Outcome {
        results: Results::QuarterCircle(rows),
        tables,
        trials: cells.len(),
        failures: spectra.iter().filter(|s| s.is_none()).count(),
    })
}

enum Potential {
    Value(f64),
    Singular,
    Failed,
}

fn log_potential(config: &ExperimentConfig) -> Result<Outcome> {
    let seeds: Vec<SeedMatrix> = config.n.iter().map(|&n| seed_for(config, n)).collect::<Result<_>>()?;
    let cells = grid(config);
    // one sample per (n, trial); every z reuses it
    let values: Vec<Vec<Potential>> = cells
        .par_iter()
        .map(|&(n, t)| {
            let seed = &seeds[config.n.iter().position(|&m| m == n).expect("n in grid")];
            let a = shuffle(seed, &mut rng_stream(config.master_seed, t)).normalized();
            config
                .z
                .iter()
                .map(|&z| match singular_values_shifted(&a, z) {
                    Ok(sv) => match log_potential_from_singular_values(&sv) {
                        Ok(u) => Potential::Value(u),
                        Err(_) => Potential::Singular,
                    },
                    Err(e) => {
                        log::warn!("log-potential n={n} trial {t} z={z}: {e}");
                        Potential::Failed
                    }
                })
                .collect()
        })
        .collect();

    let mut table = CsvTable::new("log_potential.csv", &["n", "trial", "z_re", "z_im", "U_n", "U_limit", "singular"]);
    let mut rows = Vec::new();
    for &n in &config.n {
        for (zi, &z) in config.z.iter().enumerate() {
            let limit = log_potential_limit(z);
            let (mut us, mut singular) = (Vec::new(), 0);
            for ((_, t), per_z) in cells.iter().zip(&values).filter(|((m, _), _)| *m == n) {
                let (u, flag) = match per_z[zi] {
                    Potential::Value(u) => {
                        us.push(u);
                        (fmt_f64(u), "0")
                    }
                    Potential::Singular => {
                        singular += 1;
                        ("nan".to_string(), "1")
                    }
                    Potential::Failed => continue,
                };
                table.push(vec![
                    n.to_string(),
                    t.to_string(),
                    fmt_f64(z.re),
                    fmt_f64(z.im),
                    u,
                    fmt_f64(limit),
                    flag.to_string(),
                ]);
            }
            let errors: Vec<f64> = us.iter().map(|u| (u - limit).abs()).collect();
            rows.push(LogPotentialRow {
                n,
                z_re: z.re,
                z_im: z.im,
                u_limit: limit,
                mean_u_n: (!us.is_empty()).then(|| mean(&us)),
                max_abs_error: (!errors.is_empty()).then(|| max(&errors)),
                singular_shifts: singular,
            });
        }
    }
    let failures = values
        .iter()
        .flatten()
        .filter(|p| matches!(p, Potential::Failed))
        .count();
    Ok(Outcome {
        results: Results::LogPotential(rows),
        tables: vec![table],
        trials: cells.len() * config.z.len(),
        failures,
    })
}

fn tail_slope(points: &[SsvPoint]) -> Option<f64> {
    let xy: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.p_hat > 0.0 && p.p_hat < 1.0)
        .map(|p| (p.epsilon.ln(), p.p_hat.ln()))
        .collect();
    if xy.len() < 2 {
        return None;
    }
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / xy.len() as f64;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / xy.len() as f64;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

fn ssv(config: &ExperimentConfig) -> Result<(Outcome, Option<Error>)> {
    let (n, z) = (config.n[0], config.z[0]);
    let exp = SsvExperiment {
        n,
        seed_kind: config.seed.kind(),
        z,
        epsilons: config.epsilons.clone(),
        trials: config.trials,
        master_seed: config.master_seed,
    };
    let curve = ssv_tail_curve(&exp)?;
    let sqrt_n = (n as f64).sqrt();
    let mut tail = CsvTable::new("ssv_tail.csv", &["epsilon", "threshold", "p_hat", "ci_lo", "ci_hi", "trials"]);
    let ok_trials = curve.trials - curve.failures;
    let points: Vec<SsvPoint> = curve
        .points
        .iter()
        .map(|p| {
            tail.push(vec![
                fmt_f64(p.epsilon),
                fmt_f64(p.threshold),
                fmt_f64(p.p_hat),
                fmt_f64(p.ci_lo),
                fmt_f64(p.ci_hi),
                ok_trials.to_string(),
            ]);
            SsvPoint {
                epsilon: p.epsilon,
                threshold: p.threshold,
                p_hat: p.p_hat,
                ci_lo: p.ci_lo,
                ci_hi: p.ci_hi,
            }
        })
        .collect();
    let mut smallest = CsvTable::new("smallest_sv.csv", &["trial", "s_n", "sqrt_n_s_n"]);
    for (t, s) in curve.smallest.iter().enumerate() {
        if let Some(s) = s {
            smallest.push(vec![t.to_string(), fmt_f64(*s), fmt_f64(s * sqrt_n)]);
        }
    }
    let min_scaled = curve.min_trial.map(|_| curve.min_scaled_sn);
    let violation = match (min_scaled, curve.min_trial) {
        (Some(v), Some(trial)) if n >= POSITIVITY_MIN_N && v <= POSITIVITY_FLOOR => Some(Error::PositivityViolation {
            n,
            trial,
            master_seed: config.master_seed,
            scaled_sn: v,
        }),
        _ => None,
    };
    let summary = SsvSummary {
        n,
        z_re: z.re,
        z_im: z.im,
        k: curve.k,
        min_scaled_sn: min_scaled,
        min_trial: curve.min_trial,
        failures: curve.failures,
        tail_slope: tail_slope(&points),
        points,
    };
    Ok((
        Outcome {
            results: Results::Ssv(summary),
            tables: vec![tail, smallest],
            trials: curve.trials,
            failures: curve.failures,
        },
        violation,
    ))
}

fn comb_clt(config: &ExperimentConfig) -> Result<Outcome> {
    let mut table = CsvTable::new("comb_clt.csv", &["n", "instance", "sigma", "ks", "be_bound"]);
    let mut rows = Vec::new();
    for &n in &config.n {
        let exact = n <= MAX_ENUMERATION_N;
        let per_instance: Vec<(f64, f64, f64, bool)> = (0..config.instances as u64)
            .into_par_iter()
            .map(|j| {
                let mut rng = rng_stream(config.master_seed, j);
                let inst = CombCltInstance::random_skewed(n, &mut rng)?;
                let sigma = inst.sigma();
                let ks = if exact {
                    exact_ks_to_gaussian(&inst)?
                } else {
                    let draws: Vec<f64> = (0..config.draws).map(|_| sample_w(&inst, &mut rng)).collect();
                    ks_distance(&draws, |t| normal_cdf(t / sigma))?
                };
                Ok((sigma, ks, be_bound(&inst), inst.is_near_degenerate()))
            })
            .collect::<Result<_>>()?;
        for (j, (sigma, ks, bound, _)) in per_instance.iter().enumerate() {
            table.push(vec![n.to_string(), j.to_string(), fmt_f64(*sigma), fmt_f64(*ks), fmt_f64(*bound)]);
        }
        let ks: Vec<f64> = per_instance.iter().map(|r| r.1).collect();
        rows.push(CombCltRow {
            n,
            instances: config.instances,
            exact,
            mean_ks: mean(&ks),
            max_ks: max(&ks),
            min_be_bound: per_instance.iter().map(|r| r.2).fold(f64::INFINITY, f64::min),
            all_within_bound: per_instance.iter().all(|r| r.1 <= r.2),
            near_degenerate: per_instance.iter().filter(|r| r.3).count(),
        });
    }
    Ok(Outcome {
        results: Results::CombClt(rows),
        tables: vec![table],
        trials: config.n.len() * config.instances,
        failures: 0,
    })
}

fn functional_spec(choice: &FunctionalChoice, n: usize) -> FunctionalSpec {
    let kind = match choice {
        FunctionalChoice::OperatorNorm => FunctionalKind::OperatorNorm,
        FunctionalChoice::Linear => {
            let mut v = vec![0.0; n * n];
            v[..n].iter_mut().for_each(|c| *c = 1.0 / (n as f64).sqrt());
            FunctionalKind::Linear(v)
        }
        FunctionalChoice::HsNormOfSubmatrix(rows) => FunctionalKind::HsNormOfSubmatrix(rows.clone()),
        FunctionalChoice::DistanceToFixedSubspace(k) => {
            FunctionalKind::DistanceToFixedSubspace(RealMatrix::from_fn(*k, n, |i, j| if i == j { 1.0 } else { 0.0 }))
        }
    };
    FunctionalSpec::new(kind)
}

fn concentration(config: &ExperimentConfig) -> Result<Outcome> {
    let mut tail = CsvTable::new("tail.csv", &["n", "t", "empirical_tail", "bound"]);
    let mut moments = CsvTable::new("moments.csv", &["n", "p", "norm_p"]);
    let mut rows = Vec::new();
    for &n in &config.n {
        let seed = seed_for(config, n)?;
        let spec = functional_spec(&config.functional, n);
        let draws = sample_functional(&spec, &seed, config.master_seed, config.trials)?;
        let scaled = spec.scaled_lipschitz(&seed);
        let fit = tail_fit(&draws, scaled)?;
        let slack = dkw_slack(draws.len());
        for row in &fit.tail_table {
            tail.push(vec![n.to_string(), fmt_f64(row.t), fmt_f64(row.empirical_tail), fmt_f64(row.bound)]);
        }
        for &(p, norm) in &fit.moment_table {
            moments.push(vec![n.to_string(), p.to_string(), fmt_f64(norm)]);
        }
        rows.push(ConcentrationRow {
            n,
            functional: spec.name().to_string(),
            lipschitz: spec.lipschitz(),
            scaled_lipschitz: scaled,
            mean: fit.mean,
            sd: fit.sd,
            c_hat: fit.c_hat.is_finite().then_some(fit.c_hat),
            c_hat_moment: fit.c_hat_moment,
            degenerate: fit.degenerate,
            dkw_slack: slack,
            tails_dominated: fit.tail_table.iter().all(|r| r.empirical_tail <= r.bound + slack),
        });
    }
    Ok(Outcome {
        results: Results::Concentration(rows),
        tables: vec![tail, moments],
        trials: config.n.len() * config.trials,
        failures: 0,
    })
}

fn moments_oracle(config: &ExperimentConfig) -> Result<Outcome> {
    let n = config.n[0];
    let seed = match &config.seed {
        SeedSpec::Gaussian => seed_for(config, n)?,
        other => make_seed(&other.kind(), n, None)?,
    };
    let m = exact_pair_moments(&seed)?;
    let expected = -1.0 / ((n * n - 1) as f64);
    let mut table = CsvTable::new(
        "moments.csv",
        &["n", "mean", "second_moment", "cross_covariance", "expected_cross_covariance"],
    );
    table.push(vec![
        n.to_string(),
        fmt_f64(m.mean),
        fmt_f64(m.second_moment),
        fmt_f64(m.cross_covariance),
        fmt_f64(expected),
    ]);
    Ok(Outcome {
        results: Results::MomentsOracle(MomentsRow {
            n,
            mean: m.mean,
            second_moment: m.second_moment,
            cross_covariance: m.cross_covariance,
            expected_cross_covariance: expected,
        }),
        tables: vec![table],
        trials: 1,
        failures: 0,
    })
}

fn build_report(config: &ExperimentConfig, outcome: Outcome, started: Instant) -> RunReport {
    let summary = Summary {
        schema_version: SCHEMA_VERSION,
        experiment: config.experiment.name().to_string(),
        config: config.echo(),
        trials: outcome.trials,
        kernel_failures: outcome.failures,
        artifacts: outcome.tables.iter().map(|t| t.file_name.clone()).collect(),
        results: outcome.results,
    };
    RunReport {
        config: config.clone(),
        summary,
        tables: outcome.tables,
        wall_clock: started.elapsed(),
        artifact_paths: Vec::new(),
    }
}

/// Runs the experiment without touching the filesystem.
///
/// A positivity violation in the ssv lab is returned alongside the report so
/// the caller can still write the provenance before failing.
pub fn execute(config: &ExperimentConfig) -> Result<(RunReport, Option<Error>)> {
    config.validate()?;
    let started = Instant::now();
    let (outcome, violation) = match config.experiment {
        Experiment::CircularLaw => (circular_law(config)?, None),
        Experiment::QuarterCircle => (quarter_circle(config)?, None),
        Experiment::LogPotential => (log_potential(config)?, None),
        Experiment::Ssv => ssv(config)?,
        Experiment::CombClt => (comb_clt(config)?, None),
        Experiment::Concentration => (concentration(config)?, None),
        Experiment::MomentsOracle => (moments_oracle(config)?, None),
    };
    Ok((build_report(config, outcome, started), violation))
}

/// Runs the experiment and writes every artifact into `config.output_dir`.
///
/// Files are written even when the run then fails the kernel budget or the
/// positivity floor, so the failure can be inspected.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunReport> {
    let (mut report, violation) = execute(config)?;
    let dir = &config.output_dir;
    let mut paths = write_report(&report, ReportFormat::Csv, dir)?;
    paths.extend(write_report(&report, ReportFormat::Json, dir)?);
    report.artifact_paths = paths;
    let s = &report.summary;
    if s.kernel_failures as f64 > KERNEL_FAILURE_BUDGET * s.trials as f64 {
        return Err(Error::KernelBudget {
            failures: s.kernel_failures,
            trials: s.trials,
        });
    }
    if let Some(err) = violation {
        return Err(err);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    fn config(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(text, "test", Path::new(".")).unwrap()
    }

    #[test]
    fn circular_law_shape_contract() {
        let c = config("experiment = circular-law\nn = 100\ntrials = 1\nmaster_seed = 42\n");
        let (report, violation) = execute(&c).unwrap();
        assert!(violation.is_none());
        let eig = &report.tables[0];
        assert_eq!(eig.file_name, "eigenvalues_n100.csv");
        assert_eq!(eig.header, ["trial", "index", "re", "im"]);
        assert_eq!(eig.rows.len(), 100);
        assert!(matches!(&report.summary.results, Results::CircularLaw(rows) if rows.len() == 1));
    }

    #[test]
    fn moments_oracle_small() {
        let c = config("experiment = moments-oracle\nn = 2\n");
        let (report, _) = execute(&c).unwrap();
        let Results::MomentsOracle(m) = &report.summary.results else {
            panic!("wrong results variant")
        };
        assert!((m.cross_covariance + 1.0 / 3.0).abs() < 1e-12);
        let json = report.summary.to_json();
        assert_eq!(validate_summary(&json).unwrap(), report.summary);
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<SsvPoint> = [0.01, 0.1, 0.5]
            .iter()
            .map(|&e| SsvPoint {
                epsilon: e,
                threshold: e,
                p_hat: 0.8 * e,
                ci_lo: 0.0,
                ci_hi: 1.0,
            })
            .collect();
        assert!((tail_slope(&pts).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(tail_slope(&pts[..1]), None);
    }
}
