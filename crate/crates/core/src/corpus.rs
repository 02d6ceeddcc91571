//! Built-in example arrays.

use nalgebra::dmatrix;

use crate::array_model::ArraySpec;
use crate::linalg::{identity, RMat};

pub const NAMES: [&str; 6] = [
    "watertanks",
    "watertanks-ring",
    "oscillators-a",
    "oscillators-b",
    "counterexample-23",
    "integrator-chain-ring",
];

pub fn by_name(name: &str) -> Option<ArraySpec> {
    let spec = match name {
        "watertanks" => watertanks(),
        "watertanks-ring" => watertanks_ring(),
        "oscillators-a" => oscillators(5),
        "oscillators-b" => oscillators(4),
        "counterexample-23" => counterexample_23(),
        "integrator-chain-ring" => integrator_chain_ring(),
        _ => return None,
    };
    Some(spec.with_name(name))
}

/// Directed triangle `1 → 2 → 3 → 1` as an incidence matrix.
pub fn triangle() -> RMat {
    dmatrix![1.0, 0.0, -1.0; -1.0, 1.0, 0.0; 0.0, -1.0, 1.0]
}

/// Three tanks in a row, two one-way pumps between neighbours.
pub fn watertanks() -> ArraySpec {
    let inc = dmatrix![1.0, 0.0; -1.0, 1.0; 0.0, -1.0];
    ArraySpec::from_incidence(dmatrix![0.0], &inc, 3).expect("static shape")
}

/// Three tanks with a third pump closing the ring.
pub fn watertanks_ring() -> ArraySpec {
    ArraySpec::from_incidence(dmatrix![0.0], &triangle(), 3).expect("static shape")
}

/// Inverse of the 5×5 matrix `tridiag(-1, 2, -1)`, in closed form.
fn capacitance_inverse() -> RMat {
    RMat::from_fn(5, 5, |i, j| {
        let (a, b) = ((i.min(j) + 1) as f64, (i.max(j) + 1) as f64);
        a * (6.0 - b) / 6.0
    })
}

/// Three 10th-order LC oscillators coupled by resistors; the third coupling
/// attaches at node `last` (1-based) of the ladder.
pub fn oscillators(last: usize) -> ArraySpec {
    let cinv = capacitance_inverse();
    let mut a = RMat::zeros(10, 10);
    a.view_mut((0, 5), (5, 5)).copy_from(&(-&cinv));
    a.view_mut((5, 0), (5, 5)).copy_from(&identity(5));
    let port = |node: usize| {
        let mut v = RMat::zeros(10, 1);
        v.view_mut((0, 0), (5, 1)).copy_from(&cinv.column(node - 1));
        v
    };
    let (b11, b22, b33) = (port(2), port(3), port(last));
    let mut inc = RMat::zeros(30, 3);
    let place = |inc: &mut RMat, i: usize, s: usize, v: &RMat| {
        inc.view_mut((10 * i, s), (10, 1)).copy_from(v);
    };
    place(&mut inc, 0, 0, &b11);
    place(&mut inc, 1, 0, &(-&b11));
    place(&mut inc, 1, 1, &b22);
    place(&mut inc, 2, 1, &(-&b22));
    place(&mut inc, 0, 2, &(-&b33));
    place(&mut inc, 2, 2, &b33);
    ArraySpec::from_incidence(a, &inc, 3).expect("static shape")
}

/// Two decoupled 2-chains per system; pairwise (2,3) fails although every
/// eigenvector graph is (2,3)-connected.
pub fn counterexample_23() -> ArraySpec {
    let a = dmatrix![
        0.0, 0.0, 0.0, 0.0;
        1.0, 0.0, 0.0, 0.0;
        0.0, 0.0, 0.0, 0.0;
        0.0, 0.0, 1.0, 0.0
    ];
    let inc = dmatrix![
        0.0, 0.0, 0.0;
        0.0, 0.0, -1.0;
        1.0, 0.0, -1.0;
        0.0, 0.0, 0.0;
        0.0, 1.0, 0.0;
        0.0, 0.0, 0.0;
        -1.0, 0.0, 0.0;
        0.0, 0.0, 0.0;
        0.0, -1.0, 0.0;
        0.0, 0.0, 1.0;
        0.0, 0.0, 1.0;
        0.0, 0.0, 0.0
    ];
    ArraySpec::from_incidence(a, &inc, 3).expect("static shape")
}

/// Double integrators on a directed triangle, actuated at the velocity.
pub fn integrator_chain_ring() -> ArraySpec {
    let a = dmatrix![0.0, 1.0; 0.0, 0.0];
    let inc = triangle().kronecker(&dmatrix![0.0; 1.0]);
    ArraySpec::from_incidence(a, &inc, 3).expect("static shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array_model::validate_array;

    #[test]
    fn all_examples_validate() {
        for name in NAMES {
            let spec = by_name(name).unwrap();
            assert!(validate_array(&spec, 1e-12).ok, "{name}");
            assert_eq!(spec.name.as_deref(), Some(name));
        }
        assert!(by_name("nope").is_none());
    }

    #[test]
    fn capacitance_inverse_is_exact() {
        let c = RMat::from_fn(5, 5, |i, j| match i.abs_diff(j) {
            0 => 2.0,
            1 => -1.0,
            _ => 0.0,
        });
        assert!((c * capacitance_inverse() - identity(5)).norm() < 1e-14);
    }
}
