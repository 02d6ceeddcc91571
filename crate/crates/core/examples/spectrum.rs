//! Distinct eigenvalues with multiplicities, their ordering and the
//! restriction of A* to each generalized eigenspace.

use nalgebra::dmatrix;
use relact::report::fmt_mu;
use relact::spectral::distinct_eigenvalues;
use relact::Tolerances;

fn main() -> relact::Result<()> {
    let a = dmatrix![
        0.0, 1.0, 0.0, 0.0, 0.0;
        -1.0, 0.0, 0.0, 0.0, 0.0;
        0.0, 0.0, -1.0, 1.0, 0.0;
        0.0, 0.0, 0.0, -1.0, 0.0;
        0.0, 0.0, 0.0, 0.0, 0.0
    ];
    let spec = distinct_eigenvalues(&a, &Tolerances::default())?;
    println!("clustering tolerance {:.1e}", spec.tol_eig);
    for (k, c) in spec.components.iter().enumerate() {
        println!(
            "k={} mu={:<8} alg={} geo={} ||restriction - mu||={:.1e} conjugate={:?}",
            k + 1,
            fmt_mu(c.mu),
            c.alg_mult,
            c.geo_mult,
            c.lambda.norm(),
            spec.conjugate_of(k).map(|j| j + 1)
        );
    }
    Ok(())
}
