//! Positive pairwise controllability with the index-set recursion, on the
//! double-integrator ring and the two-pump tanks.

use relact::controllability::{is_positive_pairwise_controllable, Context};
use relact::corpus;
use relact::Tolerances;

fn main() -> relact::Result<()> {
    let tol = Tolerances::default();
    for (name, pair) in [("integrator-chain-ring", (1, 3)), ("watertanks", (1, 2)), ("watertanks", (1, 3))] {
        let spec = corpus::by_name(name).expect("built-in");
        let ctx = Context::new(&spec, &tol)?;
        let r = is_positive_pairwise_controllable(&ctx, pair.0, pair.1)?;
        println!("{name} {:?}: holds={} conditional={}", r.pair, r.holds, r.conditional);
        for s in &r.trace.steps {
            println!("  k={} inputs={:?} removed={:?} lineality_dim={:?}", s.kappa, s.index_set, s.removed, s.lineality_dim);
        }
        println!("  assumption1={:?} assumption2={:?}", r.assumption1, r.assumption2);
    }
    Ok(())
}
