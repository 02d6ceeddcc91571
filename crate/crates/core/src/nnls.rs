//! Nonnegative least squares, `min ||A x - b||` subject to `x >= 0`.
//!
//! Lawson–Hanson active-set iteration. The entering variable is the lowest
//! index with a positive dual, which makes runs reproducible independent of
//! tiny rounding differences in the dual vector.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{lstsq, RMat};

#[derive(Debug, Clone)]
pub struct NnlsSolution {
    pub x: DVector<f64>,
    pub residual: f64,
    pub iterations: usize,
}

fn solve_passive(a: &RMat, b: &DVector<f64>, passive: &[usize]) -> DVector<f64> {
    let m = a.nrows();
    let mut sub = RMat::zeros(m, passive.len());
    for (k, &j) in passive.iter().enumerate() {
        sub.set_column(k, &a.column(j));
    }
    let z = lstsq(&sub, b, 1e-13);
    let mut full = DVector::zeros(a.ncols());
    for (k, &j) in passive.iter().enumerate() {
        full[j] = z[k];
    }
    full
}

/// Solves the problem with an outer-iteration cap of `50 * ncols`.
pub fn nnls(a: &RMat, b: &DVector<f64>) -> Result<NnlsSolution> {
    nnls_capped(a, b, 50 * a.ncols().max(1))
}

pub fn nnls_capped(a: &RMat, b: &DVector<f64>, max_iter: usize) -> Result<NnlsSolution> {
    assert_eq!(a.nrows(), b.len(), "row mismatch in nnls");
    let c = a.ncols();
    let mut x = DVector::<f64>::zeros(c);
    if c == 0 {
        return Ok(NnlsSolution { x, residual: b.norm(), iterations: 0 });
    }
    let tol_w = 1e3 * f64::EPSILON * a.norm() * b.norm().max(1.0);
    let mut passive = vec![false; c];
    let mut iterations = 0;

    loop {
        let r = b - a * &x;
        let w = a.transpose() * &r;
        let mut blocked = vec![false; c];
        let mut accepted = false;
        // lowest index with positive dual whose inclusion yields a positive
        // coefficient; the second condition guards against rounding stalls
        while let Some(j) = (0..c).find(|&j| !passive[j] && !blocked[j] && w[j] > tol_w) {
            iterations += 1;
            if iterations > max_iter {
                return Err(Error::SolverFailure(max_iter));
            }
            passive[j] = true;
            let set: Vec<usize> = (0..c).filter(|&i| passive[i]).collect();
            let mut z = solve_passive(a, b, &set);
            if z[j] <= 0.0 {
                passive[j] = false;
                blocked[j] = true;
                continue;
            }
            // inner loop: step back until the passive solution is feasible
            loop {
                let set: Vec<usize> = (0..c).filter(|&i| passive[i]).collect();
                if set.iter().all(|&i| z[i] > 0.0) {
                    x = z;
                    break;
                }
                let mut alpha = f64::INFINITY;
                for &i in &set {
                    if z[i] <= 0.0 {
                        let t = x[i] / (x[i] - z[i]);
                        if t < alpha {
                            alpha = t;
                        }
                    }
                }
                x = &x + (&z - &x) * alpha;
                for &i in &set {
                    if x[i] <= 1e-15 * (1.0 + x.amax()) {
                        x[i] = 0.0;
                        passive[i] = false;
                    }
                }
                let set: Vec<usize> = (0..c).filter(|&i| passive[i]).collect();
                z = solve_passive(a, b, &set);
                iterations += 1;
                if iterations > max_iter {
                    return Err(Error::SolverFailure(max_iter));
                }
            }
            accepted = true;
            break;
        }
        if !accepted {
            break;
        }
    }
    let residual = (b - a * &x).norm();
    Ok(NnlsSolution { x, residual, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector};
    use proptest::prelude::*;

    #[test]
    fn exact_column() {
        let a = dmatrix![1.0, 0.0; -1.0, 1.0; 0.0, -1.0];
        let s = nnls(&a, &dvector![1.0, -1.0, 0.0]).unwrap();
        assert!(s.residual < 1e-14);
        assert!((s.x - dvector![1.0, 0.0]).norm() < 1e-14);
    }

    #[test]
    fn reverse_direction_is_projected() {
        let a = dmatrix![1.0, 0.0; -1.0, 1.0; 0.0, -1.0];
        let s = nnls(&a, &dvector![-1.0, 1.0, 0.0]).unwrap();
        assert!((s.x - dvector![0.0, 0.5]).norm() < 1e-14);
        assert!((s.residual - 1.5_f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn triangle_reaches_reverse_edge() {
        let a = dmatrix![1.0, 0.0, -1.0; -1.0, 1.0, 0.0; 0.0, -1.0, 1.0];
        let s = nnls(&a, &dvector![-1.0, 1.0, 0.0]).unwrap();
        assert!(s.residual < 1e-12);
        assert!(s.x.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn cap_is_enforced() {
        let a = dmatrix![1.0, 0.0; 0.0, 1.0];
        assert!(matches!(nnls_capped(&a, &dvector![1.0, 1.0], 1), Err(Error::SolverFailure(1))));
    }

    proptest! {
        #[test]
        fn kkt_conditions_hold(
            entries in prop::collection::vec(-3.0f64..3.0, 20),
            rhs in prop::collection::vec(-3.0f64..3.0, 4),
        ) {
            let a = RMat::from_vec(4, 5, entries);
            let b = DVector::from_vec(rhs);
            let s = nnls(&a, &b).unwrap();
            prop_assert!(s.x.iter().all(|&v| v >= 0.0));
            let w = a.transpose() * (&b - &a * &s.x);
            for j in 0..5 {
                prop_assert!(w[j] <= 1e-9);
                if s.x[j] > 0.0 {
                    prop_assert!(w[j].abs() <= 1e-9);
                }
            }
        }
    }
}
