//! Eigenvalues of shuffled seeds fill the unit disc.
//!
//! Also runs the second model: a general exchangeable matrix is centered and
//! rescaled before its spectrum is taken.

use exchmat::ensemble::{make_seed, normalize_exchangeable, shuffle, SeedKind};
use exchmat::linalg::eigenvalues;
use exchmat::rng::rng_stream;
use exchmat::spectral::{esd, ks_statistic, Esd, ReferenceLaw};

fn describe(label: &str, e: &Esd) -> exchmat::Result<()> {
    let radial = ks_statistic(&e.radii(), ReferenceLaw::CircularRadial)?;
    let angular = ks_statistic(&e.angles(), ReferenceLaw::UniformAngle)?;
    println!(
        "{label:<28} radial KS {:.4}  angular KS {:.4}  mean |λ|² {:.4}",
        radial.statistic,
        angular.statistic,
        e.second_moment()
    );
    Ok(())
}

fn main() -> exchmat::Result<()> {
    let n = 300;
    for kind in [
        SeedKind::Rademacher,
        SeedKind::Sparse { density: 0.2, k_target: 1.0 },
        SeedKind::GaussianNormalized,
    ] {
        let seed = make_seed(&kind, n, Some(&mut rng_stream(1, u64::MAX)))?;
        let sample = shuffle(&seed, &mut rng_stream(1, 0));
        describe(&format!("{} (K = {:.2})", kind.label().split('(').next().unwrap(), seed.k()), &esd(&sample)?)?;
    }

    // Y = 5 + 3X has mean 5 and spread 3; normalization recovers X/√n
    let seed = make_seed(&SeedKind::Rademacher, n, None)?;
    let x = shuffle(&seed, &mut rng_stream(2, 0));
    let y = x.matrix().scaled(3.0);
    let y = exchmat::linalg::RealMatrix::from_fn(n, n, |i, j| 5.0 + y[(i, j)]);
    let (b, stats) = normalize_exchangeable(&y)?;
    println!("normalized Y: mu = {:.3}, sigma = {:.3}", stats.mu, stats.sigma);
    describe("exchangeable Y", &Esd::from_points(eigenvalues(&b)?.values().to_vec()))?;
    Ok(())
}
