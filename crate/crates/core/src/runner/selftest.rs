//! Fast oracle suite behind `exchmat selftest`.

use crate::combclt::{atoms_mean_variance, comb_variance_rank_one, exact_distribution, CombCltInstance};
use crate::ensemble::{exact_pair_moments, make_seed, SeedKind};
use crate::linalg::{
    eigenvalues, hermitian_eigenvalues, hermitize, singular_values_shifted, Complex64, ComplexMatrix, RealMatrix,
};
use crate::rng::rng_stream;
use crate::spectral::{log_potential_limit, reference_cdf, ReferenceLaw};
use crate::ssv::neg_second_moment_check;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn rng_streams() -> Check {
    let draw = |s| {
        let mut r = rng_stream(42, s);
        (0..100).map(|_| r.next_u64()).collect::<Vec<_>>()
    };
    let (a, b, c) = (draw(0), draw(0), draw(1));
    let differ = a.iter().zip(&c).filter(|(x, y)| x != y).count();
    check("rng streams", a == b && differ >= 90, format!("{differ}/100 outputs differ across streams"))
}

fn exact_moments() -> Check {
    let seed = make_seed(&SeedKind::Rademacher, 2, None).expect("n = 2 seed");
    match exact_pair_moments(&seed) {
        Ok(m) => {
            let err = (m.mean.abs())
                .max((m.second_moment - 1.0).abs())
                .max((m.cross_covariance + 1.0 / 3.0).abs());
            check("exact moments n=2", err < 1e-12, format!("max error {err:e}"))
        }
        Err(e) => check("exact moments n=2", false, e.to_string()),
    }
}

fn comb_variance() -> Check {
    let mut rng = rng_stream(7, 0);
    let result = CombCltInstance::random_skewed(6, &mut rng).and_then(|inst| {
        let (_, var) = atoms_mean_variance(&exact_distribution(&inst)?);
        let formula = comb_variance_rank_one(inst.a(), inst.x());
        Ok((var - formula).abs() / formula)
    });
    match result {
        Ok(rel) => check("combinatorial variance", rel < 1e-10, format!("relative error {rel:e}")),
        Err(e) => check("combinatorial variance", false, e.to_string()),
    }
}

fn trace_identity() -> Check {
    let mut rng = rng_stream(8, 0);
    let a = RealMatrix::from_fn(8, 8, |_, _| rng.standard_normal());
    let Ok(spec) = eigenvalues(&a) else {
        return check("trace identities", false, "eigenvalue kernel failed".into());
    };
    let mut ap = RealMatrix::identity(8);
    let mut worst: f64 = 0.0;
    for p in 1..=3 {
        ap = ap.matmul(&a);
        let scale: f64 = spec.values().iter().map(|v| v.norm().powi(p)).sum();
        worst = worst.max((spec.power_sum(p) - Complex64::new(ap.trace(), 0.0)).norm() / scale);
    }
    check("trace identities", worst < 1e-8, format!("max relative error {worst:e}"))
}

fn singular_value_identities() -> Check {
    let mut rng = rng_stream(9, 0);
    let a = RealMatrix::from_fn(6, 6, |_, _| rng.standard_normal());
    let z = Complex64::new(0.3, -0.2);
    let (Ok(sv), Ok(mut ev)) = (singular_values_shifted(&a, z), hermitian_eigenvalues(&hermitize(&a, z))) else {
        return check("singular value identities", false, "kernel failed".into());
    };
    let hs = a.shifted(z).hs_norm_sq();
    let hs_err = (sv.hs_norm_sq() - hs).abs() / hs;
    ev.sort_by(|x, y| y.total_cmp(x));
    let herm_err = sv
        .values()
        .iter()
        .zip(&ev)
        .map(|(s, e)| (s - e).abs())
        .fold(0.0, f64::max);
    check(
        "singular value identities",
        hs_err < 1e-10 && herm_err < 1e-8,
        format!("HS relative error {hs_err:e}, hermitization gap {herm_err:e}"),
    )
}

fn negative_second_moment() -> Check {
    let mut rng = rng_stream(10, 0);
    let b = ComplexMatrix::from_fn(5, 8, |_, _| Complex64::new(rng.standard_normal(), rng.standard_normal()));
    match neg_second_moment_check(&b) {
        Ok(d) => check("negative second moment", d < 1e-8, format!("relative discrepancy {d:e}")),
        Err(e) => check("negative second moment", false, e.to_string()),
    }
}

fn limit_laws() -> Check {
    let u = [
        log_potential_limit(Complex64::new(0.0, 0.0)) - 0.5,
        log_potential_limit(Complex64::new(0.5, 0.0)) - 0.375,
        log_potential_limit(Complex64::new(2.0, 0.0)) + 2f64.ln(),
    ];
    let qc = reference_cdf(ReferenceLaw::QuarterCircle, 2.0) - 1.0;
    let worst = u.iter().chain([qc].iter()).map(|v| v.abs()).fold(0.0, f64::max);
    check("limit laws", worst < 1e-15, format!("max error {worst:e}"))
}

/// Runs every check; the suite passes when all do.
pub fn selftest() -> Vec<Check> {
    vec![
        rng_streams(),
        exact_moments(),
        comb_variance(),
        trace_identity(),
        singular_value_identities(),
        negative_second_moment(),
        limit_laws(),
    ]
}
