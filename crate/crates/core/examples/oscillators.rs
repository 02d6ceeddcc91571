//! Coupled LC ladders: moving one coupling resistor by a single node
//! destroys controllability.

use relact::controllability::{is_controllable, Context};
use relact::corpus;
use relact::genographe::{detect_scalar_edges, is_connected};
use relact::report::fmt_mu;
use relact::Tolerances;

fn main() -> relact::Result<()> {
    let tol = Tolerances::default();
    for name in ["oscillators-a", "oscillators-b"] {
        let spec = corpus::by_name(name).expect("built-in");
        let ctx = Context::new(&spec, &tol)?;
        println!("{name}");
        let graphs = relact::controllability::v_graphs(&ctx)?;
        for (k, (c, g)) in ctx.spectrum.components.iter().zip(&graphs).enumerate() {
            if c.mu.im < 0.0 {
                continue;
            }
            let edges = detect_scalar_edges(g, tol.zero).map(|e| e.len()).unwrap_or(0);
            let conn = if is_connected(g, tol.rank)? { "connected" } else { "not connected" };
            println!("  k={:<2} mu={:<16} edges={edges}  {conn}", k + 1, fmt_mu(c.mu));
        }
        let (ok, _) = is_controllable(&ctx)?;
        println!("  controllable: {}\n", if ok { "YES" } else { "NO" });
    }
    Ok(())
}
