//! Combinatorial CLT: exact and sampled laws of `W = Σ a_i x_π(i)`.

use exchmat::combclt::{
    be_bound, be_bound_general, comb_variance_general, exact_ks_to_gaussian, sample_w, CombCltInstance,
};
use exchmat::rng::rng_stream;
use exchmat::spectral::{ks_distance, normal_cdf};

fn main() -> exchmat::Result<()> {
    for n in [5, 6, 7, 8] {
        let inst = CombCltInstance::random_skewed(n, &mut rng_stream(5, n as u64))?;
        let (sigma2, _) = comb_variance_general(&inst.as_array())?;
        println!(
            "n = {n} exact: sigma = {:.4} (general formula {:.4}), KS = {:.4}, bound = {:.1}, general bound = {:.1}",
            inst.sigma(),
            sigma2.sqrt(),
            exact_ks_to_gaussian(&inst)?,
            be_bound(&inst),
            be_bound_general(&inst.as_array())?
        );
    }
    for n in [25, 100, 400] {
        let mut rng = rng_stream(6, n as u64);
        let inst = CombCltInstance::random_skewed(n, &mut rng)?;
        let draws: Vec<f64> = (0..20_000).map(|_| sample_w(&inst, &mut rng)).collect();
        let sigma = inst.sigma();
        let ks = ks_distance(&draws, |t| normal_cdf(t / sigma))?;
        println!("n = {n} sampled: KS = {ks:.4}, bound = {:.1}", be_bound(&inst));
    }
    Ok(())
}
