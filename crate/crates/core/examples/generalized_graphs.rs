//! Generalized graphs on their own: connectivity, cone tests, lineality
//! space, DOT output and effective conductance.

use nalgebra::dmatrix;
use relact::corpus::triangle;
use relact::genographe::{
    effective_conductance, is_connected, is_kl_connected, is_strongly_connected, is_strongly_kl_connected,
    lineality_space, to_dot, GenGraph,
};
use relact::Tolerances;

fn main() -> relact::Result<()> {
    let tol = Tolerances::default();
    let path = dmatrix![1.0, 0.0; -1.0, 1.0; 0.0, -1.0];
    for (name, m) in [("path", path), ("triangle", triangle())] {
        let g = GenGraph::from_real(3, 1, &m)?;
        println!("{name}:");
        println!("  connected={} strongly={}", is_connected(&g, tol.rank)?, is_strongly_connected(&g, tol.cone)?.holds);
        println!(
            "  (1,3)-connected={} strongly (1,3)={}",
            is_kl_connected(&g, 1, 3, tol.rank)?,
            is_strongly_kl_connected(&g, 1, 3, tol.cone)?.holds
        );
        let lin = lineality_space(&g, tol.cone, tol.rank)?;
        println!("  lineality dim={} generators={:?}", lin.dim(), lin.generators);
        println!("  conductance(1,3)={:.4}", effective_conductance(&g, 1, 3, tol.rank)?);
        let labels: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        print!("{}", to_dot(&g, &labels, tol.zero)?);
    }

    // two systems with two states each, joined by a single input column
    let m = dmatrix![1.0; 0.0; -1.0; 0.0];
    let g = GenGraph::from_real(2, 2, &m)?;
    println!("block graph connected={}", is_connected(&g, tol.rank)?);
    Ok(())
}
