//! Small-ball probabilities of `s_n(X − z√n·Id)`, row distances and the
//! intermediate singular values.

use exchmat::ensemble::{make_seed, shuffle, SeedKind};
use exchmat::linalg::Complex64;
use exchmat::rng::rng_stream;
use exchmat::ssv::{
    distance_ratio_stats, intermediate_sv_check, ssv_tail_curve, SsvExperiment, DEFAULT_C_PROBE, DEFAULT_GAMMA,
};

fn main() -> exchmat::Result<()> {
    let z = Complex64::new(1.0, 0.0);
    let exp = SsvExperiment {
        n: 120,
        seed_kind: SeedKind::Rademacher,
        z,
        epsilons: vec![0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0],
        trials: 60,
        master_seed: 11,
    };
    let curve = ssv_tail_curve(&exp)?;
    println!("n = 120, z = 1: min sqrt(n) s_n = {:.4} (trial {:?})", curve.min_scaled_sn, curve.min_trial);
    println!("  eps    p_hat   95% CI");
    for p in &curve.points {
        println!("{:6.2}  {:.3}   [{:.3}, {:.3}]", p.epsilon, p.p_hat, p.ci_lo, p.ci_hi);
    }

    for k in [0, 30, 60, 90] {
        let d = distance_ratio_stats(120, k, &SeedKind::Rademacher, Complex64::new(0.0, 0.0), 20, 12)?;
        println!("dist(row {k}, previous rows)/sqrt(n-k): min {:.3}  median {:.3}", d.min, d.median);
    }

    let seed = make_seed(&SeedKind::Rademacher, 120, None)?;
    let a = shuffle(&seed, &mut rng_stream(13, 0)).normalized();
    let check = intermediate_sv_check(&a, Complex64::new(0.5, 0.0), DEFAULT_GAMMA, DEFAULT_C_PROBE)?;
    println!("intermediate singular values: holds = {}, worst s_(n-i)·n/i = {:.3}", check.holds, check.worst_ratio);
    Ok(())
}
