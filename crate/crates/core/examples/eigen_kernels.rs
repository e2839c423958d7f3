//! The dense kernels on their own: Hessenberg reduction, nonsymmetric
//! eigenvalues, singular values, hermitization and row distances.

use exchmat::linalg::{
    distance_to_row_span, eigenvalues, hermitian_eigenvalues, hermitize, hessenberg, singular_values_shifted,
    Complex64, ComplexMatrix, RealMatrix,
};
use exchmat::rng::rng_stream;
use exchmat::ssv::neg_second_moment_check;

fn main() -> exchmat::Result<()> {
    let mut rng = rng_stream(4, 0);
    let a = RealMatrix::from_fn(6, 6, |_, _| rng.standard_normal());

    let h = hessenberg(&a);
    let back = h.q.matmul(&h.h).matmul(&h.q.transpose());
    let residual = back.as_slice().iter().zip(a.as_slice()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    println!("Hessenberg: max |Q H Qᵀ − A| = {residual:.2e}");

    let spec = eigenvalues(&a)?;
    println!("eigenvalues:");
    for v in spec.values() {
        println!("  {v:.6}");
    }
    println!("sum of eigenvalues {:.6} vs trace {:.6}", spec.power_sum(1), a.trace());

    let z = Complex64::new(0.5, 0.5);
    let sv = singular_values_shifted(&a, z)?;
    let mut ev = hermitian_eigenvalues(&hermitize(&a, z))?;
    ev.sort_by(|x, y| y.total_cmp(x));
    println!("singular values of A − z: {:?}", sv.values().iter().map(|s| format!("{s:.5}")).collect::<Vec<_>>());
    println!("top half of hermitization: {:?}", ev[..6].iter().map(|s| format!("{s:.5}")).collect::<Vec<_>>());

    let b = ComplexMatrix::from_fn(4, 7, |_, _| Complex64::new(rng.standard_normal(), rng.standard_normal()));
    let d = distance_to_row_span(&b.top_rows(3), b.row(3))?;
    println!("distance of row 3 to rows 0..3: {d:.5}");
    println!("negative second moment identity, relative gap: {:.2e}", neg_second_moment_check(&b)?);
    Ok(())
}
