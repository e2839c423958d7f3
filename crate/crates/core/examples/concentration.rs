//! Sub-Gaussian tail and moment fits for Lipschitz functionals.

use exchmat::concentration::{dkw_slack, sample_functional, tail_fit, FunctionalKind, FunctionalSpec};
use exchmat::ensemble::{make_seed, SeedKind};
use exchmat::linalg::RealMatrix;

fn main() -> exchmat::Result<()> {
    let n = 40;
    let seed = make_seed(&SeedKind::Sparse { density: 0.3, k_target: 1.0 }, n, None)?;
    let mut v = vec![0.0; n * n];
    v.iter_mut().step_by(n + 1).for_each(|c| *c = 1.0 / (n as f64).sqrt());
    let kinds = [
        FunctionalKind::OperatorNorm,
        FunctionalKind::Linear(v),
        FunctionalKind::HsNormOfSubmatrix((0..5).collect()),
        FunctionalKind::DistanceToFixedSubspace(RealMatrix::from_fn(10, n, |i, j| (i == j) as u8 as f64)),
    ];
    for kind in kinds {
        let spec = FunctionalSpec::new(kind);
        let draws = sample_functional(&spec, &seed, 21, 2000)?;
        let fit = tail_fit(&draws, spec.scaled_lipschitz(&seed))?;
        let slack = dkw_slack(draws.len());
        let dominated = fit.tail_table.iter().all(|r| r.empirical_tail <= r.bound + slack);
        println!(
            "{:<28} mean {:8.4}  sd {:.4}  c_hat {:8.3}  C_hat {:.4}  dominated {dominated}",
            spec.name(),
            fit.mean,
            fit.sd,
            fit.c_hat,
            fit.c_hat_moment
        );
    }
    Ok(())
}
