//! Exact moments of shuffled entries by enumerating every permutation.

use exchmat::ensemble::{exact_pair_moments, make_seed, SeedKind};
use exchmat::rng::rng_stream;

fn main() -> exchmat::Result<()> {
    let seeds = [
        make_seed(&SeedKind::Rademacher, 2, None)?,
        make_seed(&SeedKind::Rademacher, 3, None)?,
        make_seed(&SeedKind::GaussianNormalized, 3, Some(&mut rng_stream(9, 0)))?,
    ];
    println!("seed             n   E X11      E X11²    E X11 X12   -1/(n²-1)");
    for seed in &seeds {
        let n = seed.n();
        let m = exact_pair_moments(seed)?;
        println!(
            "{:<15} {n:2}   {:+.2e}  {:.6}  {:+.6}   {:+.6}",
            seed.label(),
            m.mean,
            m.second_moment,
            m.cross_covariance,
            -1.0 / ((n * n - 1) as f64)
        );
    }
    Ok(())
}
