//! Singular values of `X/√n` against the quarter-circle law on `[0, 2]`.

use exchmat::ensemble::{make_seed, shuffle, SeedKind};
use exchmat::linalg::{singular_values_shifted, stieltjes_transform, Complex64};
use exchmat::rng::rng_stream;
use exchmat::spectral::{ks_statistic, reference_cdf, ReferenceLaw};

fn main() -> exchmat::Result<()> {
    let seed = make_seed(&SeedKind::Rademacher, 400, None)?;
    let a = shuffle(&seed, &mut rng_stream(7, 0)).normalized();
    let sv = singular_values_shifted(&a, Complex64::new(0.0, 0.0))?;
    let ks = ks_statistic(sv.values(), ReferenceLaw::QuarterCircle)?;
    println!("n = 400: KS to quarter circle = {:.4}", ks.statistic);
    println!("largest s = {:.4} (edge at 2), mean s² = {:.6}", sv.operator_norm(), sv.hs_norm_sq() / 400.0);

    println!("   x   empirical   limit");
    for x in [0.25, 0.5, 1.0, 1.5, 1.9] {
        let emp = sv.values().iter().filter(|&&s| s <= x).count() as f64 / sv.len() as f64;
        println!("{x:5.2}   {emp:.4}     {:.4}", reference_cdf(ReferenceLaw::QuarterCircle, x));
    }

    let xi = Complex64::new(1.0, 0.1);
    println!("Stieltjes transform at {xi}: {:.4}", stieltjes_transform(sv.values(), xi)?);
    Ok(())
}
