//! Three water tanks with one-way pumps: two pumps in a row, then a ring.

use relact::corpus;
use relact::report::analyze;
use relact::Tolerances;

fn main() -> relact::Result<()> {
    let tol = Tolerances::default();
    for name in ["watertanks", "watertanks-ring"] {
        let spec = corpus::by_name(name).expect("built-in");
        let report = analyze(&spec, &tol, &[(1, 2), (3, 1)])?;
        println!("{}", report.to_text());
    }
    Ok(())
}
