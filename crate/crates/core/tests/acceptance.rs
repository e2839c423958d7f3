//! Acceptance suite. Every criterion prints one `[PASS]`/`[FAIL]` line to
//! stderr (bypassing the harness capture) before asserting.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use exchmat::combclt::{comb_variance_general, comb_variance_rank_one, w_for_permutation, CombCltInstance};
use exchmat::concentration::{dkw_slack, sample_functional, tail_fit, FunctionalKind, FunctionalSpec};
use exchmat::ensemble::{exact_pair_moments, make_seed, SeedKind};
use exchmat::linalg::{
    eigenvalues, hermitian_eigenvalues, hermitize, singular_values_shifted, Complex64, ComplexMatrix, RealMatrix,
};
use exchmat::rng::{rng_stream, Permutation};
use exchmat::runner::{execute, run_experiment, ExperimentConfig, Results};
use exchmat::ssv::{experiment_seed, neg_second_moment_check};

// AC1
const MOMENT_TOL: f64 = 1e-12;
const AC1_LIMIT: Duration = Duration::from_secs(30);
// AC2
const VARIANCE_REL_TOL: f64 = 1e-10;
const RANK_ONE_VS_GENERAL_TOL: f64 = 1e-12;
const AC2_INSTANCES: u64 = 50;
const AC2_LIMIT: Duration = Duration::from_secs(60);
// AC3
const AC3_LIMIT: Duration = Duration::from_secs(300);
// AC4
const RADIAL_KS_MAX: f64 = 0.1;
const ANGULAR_KS_MAX: f64 = 0.1;
const AC4_LIMIT: Duration = Duration::from_secs(600);
// AC5
const QUARTER_CIRCLE_KS_MAX: f64 = 0.08;
const AC5_LIMIT: Duration = Duration::from_secs(180);
// AC6
const LOG_POTENTIAL_TOL: f64 = 0.1;
const AC6_LIMIT: Duration = Duration::from_secs(120);
// AC7
const SCALED_SN_FLOOR: f64 = 1e-6;
const SMALL_BALL_EPSILON: f64 = 0.01;
const SMALL_BALL_P_MAX: f64 = 0.1;
const AC7_LIMIT: Duration = Duration::from_secs(300);
// AC8
const TRACE_REL_TOL: f64 = 1e-8;
const HS_REL_TOL: f64 = 1e-10;
const NEG_MOMENT_REL_TOL: f64 = 1e-8;
const HERMITIZATION_TOL: f64 = 1e-8;
const AC8_LIMIT: Duration = Duration::from_secs(60);
// AC9
const MOMENT_CONSTANT_MAX: f64 = 10.0;
const AC9_LIMIT: Duration = Duration::from_secs(300);

fn report(id: &str, name: &str, passed: bool, elapsed: Duration, detail: String) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(
        err,
        "[{}] {id} {name} ({:.1}s): {detail}",
        if passed { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    assert!(passed, "{id} {name}: {detail}");
}

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn load(name: &str, out: &Path) -> ExperimentConfig {
    let mut c = ExperimentConfig::from_file(&config_path(name)).unwrap();
    c.output_dir = out.to_path_buf();
    c
}

fn results(name: &str) -> Results {
    let c = load(name, Path::new("unused"));
    let (report, violation) = execute(&c).unwrap();
    assert!(violation.is_none(), "{violation:?}");
    assert_eq!(report.summary.kernel_failures, 0);
    report.summary.results
}

#[test]
fn ac01_exact_exchangeability_moments() {
    let start = Instant::now();
    let mut seeds = vec![
        make_seed(&SeedKind::Rademacher, 2, None).unwrap(),
        make_seed(&SeedKind::Rademacher, 3, None).unwrap(),
        make_seed(&SeedKind::GaussianNormalized, 3, Some(&mut rng_stream(11, 0))).unwrap(),
    ];
    seeds.push(make_seed(&SeedKind::Sparse { density: 0.5, k_target: 1.0 }, 3, None).unwrap());
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for seed in &seeds {
        let n = seed.n();
        let m = exact_pair_moments(seed).unwrap();
        let cross = -1.0 / ((n * n - 1) as f64);
        let err = m.mean.abs().max((m.second_moment - 1.0).abs()).max((m.cross_covariance - cross).abs());
        worst = worst.max(err);
        detail.push(format!("{} n={n}: cross {:.15}", seed.label(), m.cross_covariance));
    }
    let elapsed = start.elapsed();
    report(
        "AC1",
        "exact exchangeability moments",
        worst < MOMENT_TOL && elapsed < AC1_LIMIT,
        elapsed,
        format!("max error {worst:e}; {}", detail.join("; ")),
    );
}

#[test]
fn ac02_combinatorial_variance_exact() {
    let start = Instant::now();
    let (mut worst_enum, mut worst_general): (f64, f64) = (0.0, 0.0);
    for i in 0..AC2_INSTANCES {
        let n = 4 + (i % 5) as usize;
        let mut rng = rng_stream(2002, i);
        let a: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
        let raw: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
        let mean = raw.iter().sum::<f64>() / n as f64;
        let norm = (raw.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
        let x: Vec<f64> = raw.iter().map(|v| (v - mean) / norm).collect();
        let inst = CombCltInstance::new(a.clone(), x.clone()).unwrap();

        // oracle: raw enumeration of all n! permutations
        let (mut count, mut s1, mut s2) = (0.0, 0.0, 0.0);
        Permutation::for_each_of(n, |p| {
            let w = w_for_permutation(&inst, p);
            count += 1.0;
            s1 += w;
            s2 += w * w;
        });
        let var_enum = s2 / count - (s1 / count).powi(2);
        let rank_one = comb_variance_rank_one(&a, &x);
        let (general, _) = comb_variance_general(&inst.as_array()).unwrap();
        worst_enum = worst_enum.max((var_enum - rank_one).abs() / rank_one);
        worst_general = worst_general.max((general - rank_one).abs() / rank_one);
    }
    let elapsed = start.elapsed();
    report(
        "AC2",
        "combinatorial CLT variance",
        worst_enum < VARIANCE_REL_TOL && worst_general < RANK_ONE_VS_GENERAL_TOL && elapsed < AC2_LIMIT,
        elapsed,
        format!("enumeration vs formula {worst_enum:e}, rank-one vs general {worst_general:e} over {AC2_INSTANCES} instances"),
    );
}

#[test]
fn ac03_berry_esseen() {
    let start = Instant::now();
    let Results::CombClt(rows) = results("comb_clt.conf") else {
        panic!("wrong results variant")
    };
    let elapsed = start.elapsed();
    let by_n = |n: usize| rows.iter().find(|r| r.n == n).unwrap();
    let (small, large) = (by_n(25), by_n(100));
    let passed = small.all_within_bound
        && large.all_within_bound
        && small.instances == 20
        && large.mean_ks < small.mean_ks
        && elapsed < AC3_LIMIT;
    report(
        "AC3",
        "Berry-Esseen bound and decay",
        passed,
        elapsed,
        format!(
            "mean KS n=25 {:.4} (max {:.4}, min bound {:.1}), n=100 {:.4} (max {:.4}, min bound {:.1})",
            small.mean_ks, small.max_ks, small.min_be_bound, large.mean_ks, large.max_ks, large.min_be_bound
        ),
    );
}

#[test]
fn ac04_circular_law_trend() {
    let start = Instant::now();
    let Results::CircularLaw(rows) = results("circular_law.conf") else {
        panic!("wrong results variant")
    };
    let elapsed = start.elapsed();
    let ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    let radial: Vec<f64> = rows.iter().map(|r| r.mean_radial_ks).collect();
    let last = rows.last().unwrap();
    let passed = ns == [100, 200, 400]
        && rows.iter().all(|r| r.trials_ok == 5)
        && radial.windows(2).all(|w| w[1] < w[0])
        && last.max_radial_ks < RADIAL_KS_MAX
        && last.max_angular_ks < ANGULAR_KS_MAX
        && elapsed < AC4_LIMIT;
    report(
        "AC4",
        "circular law trend",
        passed,
        elapsed,
        format!(
            "mean radial KS {:?}; n=400 max radial {:.4}, max angular {:.4}",
            radial.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>(),
            last.max_radial_ks,
            last.max_angular_ks
        ),
    );
}

#[test]
fn ac05_quarter_circle() {
    let start = Instant::now();
    let Results::QuarterCircle(rows) = results("quarter_circle.conf") else {
        panic!("wrong results variant")
    };
    let elapsed = start.elapsed();
    let r = &rows[0];
    report(
        "AC5",
        "quarter-circle law",
        r.n == 400 && r.trials_ok == 5 && r.max_ks < QUARTER_CIRCLE_KS_MAX && elapsed < AC5_LIMIT,
        elapsed,
        format!("n=400 max KS {:.4}, mean {:.4}", r.max_ks, r.mean_ks),
    );
}

#[test]
fn ac06_log_potential() {
    let start = Instant::now();
    let Results::LogPotential(rows) = results("log_potential.conf") else {
        panic!("wrong results variant")
    };
    let elapsed = start.elapsed();
    let expected = [(0.0, 0.5), (0.5, 0.375), (2.0, -(2f64.ln()))];
    let mut passed = rows.len() == 3 && elapsed < AC6_LIMIT;
    let mut detail = Vec::new();
    for (row, (z, u)) in rows.iter().zip(expected) {
        let err = row.max_abs_error.unwrap_or(f64::INFINITY);
        passed &= row.n == 500 && row.z_re == z && row.u_limit == u && row.singular_shifts == 0 && err < LOG_POTENTIAL_TOL;
        detail.push(format!("z={z}: U_n {:.5} vs {u:.5}", row.mean_u_n.unwrap_or(f64::NAN)));
    }
    report("AC6", "log potential", passed, elapsed, detail.join("; "));
}

#[test]
fn ac07_smallest_singular_value() {
    let start = Instant::now();
    let Results::Ssv(s) = results("ssv.conf") else {
        panic!("wrong results variant")
    };
    let elapsed = start.elapsed();
    let threshold = SMALL_BALL_EPSILON / ((s.n as f64).sqrt() * (s.k + (s.z_re.hypot(s.z_im))));
    let at_eps = s.points.iter().find(|p| p.epsilon == SMALL_BALL_EPSILON).unwrap();
    let monotone = s.points.windows(2).all(|w| w[0].p_hat <= w[1].p_hat);
    let min_scaled = s.min_scaled_sn.unwrap_or(0.0);
    let passed = s.n == 200
        && s.failures == 0
        && min_scaled > SCALED_SN_FLOOR
        && (at_eps.threshold - threshold).abs() <= 1e-15 * threshold
        && at_eps.p_hat <= SMALL_BALL_P_MAX
        && monotone
        && elapsed < AC7_LIMIT;
    report(
        "AC7",
        "smallest singular value",
        passed,
        elapsed,
        format!(
            "min sqrt(n) s_n {min_scaled:.4}, P(s_n <= {threshold:.3e}) = {:.3}, curve {:?}",
            at_eps.p_hat,
            s.points.iter().map(|p| p.p_hat).collect::<Vec<_>>()
        ),
    );
}

#[test]
fn ac08_linear_algebra_oracles() {
    let start = Instant::now();
    let (mut trace, mut hs, mut neg, mut herm): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..100u64 {
        let mut rng = rng_stream(8008, i);
        let a = RealMatrix::from_fn(8, 8, |_, _| rng.standard_normal());
        let spec = eigenvalues(&a).unwrap();
        let mut ap = RealMatrix::identity(8);
        for p in 1..=3 {
            ap = ap.matmul(&a);
            let scale: f64 = spec.values().iter().map(|v| v.norm().powi(p)).sum();
            trace = trace.max((spec.power_sum(p) - Complex64::new(ap.trace(), 0.0)).norm() / scale);
        }

        let z = Complex64::new(rng.standard_normal(), rng.standard_normal());
        let sv = singular_values_shifted(&a, z).unwrap();
        let target = a.shifted(z).hs_norm_sq();
        hs = hs.max((sv.hs_norm_sq() - target).abs() / target);

        let mut ev = hermitian_eigenvalues(&hermitize(&a, z)).unwrap();
        ev.sort_by(|x, y| y.total_cmp(x));
        for (s, e) in sv.values().iter().zip(&ev) {
            herm = herm.max((s - e).abs());
        }

        let b = ComplexMatrix::from_fn(5, 8, |_, _| Complex64::new(rng.standard_normal(), rng.standard_normal()));
        neg = neg.max(neg_second_moment_check(&b).unwrap());
    }
    let elapsed = start.elapsed();
    report(
        "AC8",
        "linear-algebra oracles",
        trace < TRACE_REL_TOL && hs < HS_REL_TOL && neg < NEG_MOMENT_REL_TOL && herm < HERMITIZATION_TOL && elapsed < AC8_LIMIT,
        elapsed,
        format!("trace {trace:e}, HS {hs:e}, negative second moment {neg:e}, hermitization {herm:e}"),
    );
}

#[test]
fn ac09_concentration() {
    let start = Instant::now();
    let mut passed = true;
    let mut detail = Vec::new();
    for name in ["concentration.conf", "concentration_linear.conf"] {
        let c = load(name, Path::new("unused"));
        let Results::Concentration(rows) = execute(&c).unwrap().0.summary.results else {
            panic!("wrong results variant")
        };
        for row in rows {
            // independent recount of the tails from fresh draws of the same streams
            let seed = experiment_seed(&c.seed.kind(), row.n, c.master_seed).unwrap();
            let kind = if row.functional == "linear" {
                let mut v = vec![0.0; row.n * row.n];
                v[..row.n].iter_mut().for_each(|x| *x = 1.0 / (row.n as f64).sqrt());
                FunctionalKind::Linear(v)
            } else {
                FunctionalKind::OperatorNorm
            };
            let spec = FunctionalSpec::new(kind);
            let draws = sample_functional(&spec, &seed, c.master_seed, c.trials).unwrap();
            let fit = tail_fit(&draws, spec.scaled_lipschitz(&seed)).unwrap();
            let mean = draws.iter().sum::<f64>() / draws.len() as f64;
            let slack = dkw_slack(draws.len());
            let l2 = fit.lipschitz * fit.lipschitz;
            let dominated = fit.tail_table.iter().all(|r| {
                let tail = draws.iter().filter(|&&d| (d - mean).abs() >= r.t).count() as f64 / draws.len() as f64;
                tail <= 2.0 * (-fit.c_hat * r.t * r.t / l2).exp() + slack
            });
            let c_hat = row.c_hat.unwrap_or(f64::INFINITY);
            let ok = !row.degenerate
                && c_hat > 0.0
                && c_hat.is_finite()
                && row.c_hat_moment <= MOMENT_CONSTANT_MAX
                && row.tails_dominated
                && dominated
                && fit.c_hat == c_hat;
            passed &= ok;
            detail.push(format!(
                "{} n={}: c_hat {:.3}, C_hat {:.4}",
                row.functional, row.n, c_hat, row.c_hat_moment
            ));
        }
    }
    let elapsed = start.elapsed();
    report("AC9", "concentration harness", passed && elapsed < AC9_LIMIT, elapsed, detail.join("; "));
}

#[test]
fn ac10_byte_determinism() {
    let start = Instant::now();
    let tmp = tempfile::tempdir().unwrap();
    let configs = [
        "moments_oracle.conf",
        "comb_clt.conf",
        "circular_law.conf",
        "quarter_circle.conf",
        "log_potential.conf",
        "ssv.conf",
        "concentration.conf",
        "concentration_linear.conf",
    ];
    let mut mismatched = Vec::new();
    let mut compared = 0;
    for name in configs {
        let a = tmp.path().join(format!("{name}.a"));
        let b = tmp.path().join(format!("{name}.b"));
        let ra = run_experiment(&load(name, &a)).unwrap();
        run_experiment(&load(name, &b)).unwrap();
        for path in &ra.artifact_paths {
            let file = path.file_name().unwrap();
            compared += 1;
            if std::fs::read(path).unwrap() != std::fs::read(b.join(file)).unwrap() {
                mismatched.push(format!("{name}/{}", file.to_string_lossy()));
            }
        }
    }
    let elapsed = start.elapsed();
    report(
        "AC10",
        "byte determinism",
        mismatched.is_empty() && compared > configs.len(),
        elapsed,
        format!("{compared} files compared, mismatches: {mismatched:?}"),
    );
}
