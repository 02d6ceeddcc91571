//! Every eigenvector graph is (2,3)-connected, yet inputs cannot steer
//! systems 2 and 3 apart: the generalized eigenvectors decide.

use relact::controllability::{is_pairwise_controllable, Context, GraphKind};
use relact::corpus;
use relact::Tolerances;

fn main() -> relact::Result<()> {
    let spec = corpus::by_name("counterexample-23").expect("built-in");
    let ctx = Context::new(&spec, &Tolerances::default())?;
    let c = &ctx.spectrum.components[0];
    println!("single eigenvalue {} with algebraic multiplicity {} and geometric multiplicity {}", c.mu, c.alg_mult, c.geo_mult);
    let (holds, rows) = is_pairwise_controllable(&ctx, 2, 3)?;
    for r in &rows {
        let kind = if r.graph_kind == GraphKind::V { "eigenvector graph" } else { "chain graph" };
        println!("  {kind:<17} k={} (2,3)-connected: {:?}", r.kappa, r.kl_connected.unwrap_or(false));
    }
    println!("(2,3)-controllable: {holds}");
    Ok(())
}
