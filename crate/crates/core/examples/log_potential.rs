//! Empirical log potential `−(1/n) Σ log s_k(A − z)` against the disc limit.

use exchmat::ensemble::{make_seed, shuffle, SeedKind};
use exchmat::linalg::{singular_values_shifted, Complex64};
use exchmat::rng::rng_stream;
use exchmat::spectral::{log_potential_from_singular_values, log_potential_limit, uniform_integrability_stat};

fn main() -> exchmat::Result<()> {
    let n = 300;
    let seed = make_seed(&SeedKind::Rademacher, n, None)?;
    let a = shuffle(&seed, &mut rng_stream(3, 0)).normalized();
    println!("     z            U_n       U      UI(t=2)");
    for z in [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.5, 0.0),
        Complex64::new(0.3, 0.6),
        Complex64::new(1.0, 0.0),
        Complex64::new(2.0, 0.0),
        Complex64::new(0.0, -3.0),
    ] {
        let sv = singular_values_shifted(&a, z)?;
        let u = log_potential_from_singular_values(&sv)?;
        let ui = uniform_integrability_stat(&sv, 2.0)?;
        println!("{:>12}  {u:8.4}  {:8.4}  {ui:.2e}", z.to_string(), log_potential_limit(z));
    }
    Ok(())
}
