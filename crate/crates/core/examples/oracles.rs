//! Independent cross-checks: Kalman rank, cone test, direct range test,
//! reach simulation and the polar falsifier.

use relact::controllability::Context;
use relact::corpus;
use relact::oracle::{default_grid, polar_falsifier, reach_simulator, run_oracles, OracleSettings, ReachProblem};
use relact::Tolerances;

fn main() -> relact::Result<()> {
    let tol = Tolerances::default();
    let ring = corpus::by_name("watertanks-ring").expect("built-in");
    let ctx = Context::new(&ring, &tol)?;
    let settings = OracleSettings { pairs: vec![(1, 2)], samples: 20, horizon: 2.0, steps: 20, seed: 7, tol_hit: 1e-6 };
    for v in run_oracles(&ctx, &settings)? {
        println!("{:<26} agrees={:<12} {}", v.name, format!("{:?}", v.agrees), v.detail);
    }

    let prob = ReachProblem::new(&ring, 1, 2, 2.0, 20)?;
    for r in reach_simulator(&prob, 1e-6)? {
        println!("target {:?} residual {:.2e}", r.target, r.residual);
    }

    let tanks = corpus::by_name("watertanks").expect("built-in");
    match polar_falsifier(&tanks, 1, 2, &default_grid(&tanks), 20, 0, &tol)? {
        Some(w) => println!("two-pump tanks: separating direction {:?} (attempt {})", w.eta, w.attempt),
        None => println!("two-pump tanks: no witness"),
    }
    Ok(())
}
