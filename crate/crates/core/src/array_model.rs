//! The array `[A, (B_iσ)]`: `q` identical copies of `ẋ = A x` driven by `p`
//! scalar inputs through relative actuators, `Σ_i B_iσ = 0` for every `σ`.
//!
//! This module validates an array and assembles the stacked operators
//! `I_q ⊗ A`, `inc(B)`, the disagreement basis `D` and the reduced pair
//! `(I_{q-1} ⊗ A, [D* ⊗ I_n] inc(B))`.

use std::fmt;

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{identity, RMat};

/// An array of `q` identical `n`-th order systems with `p` scalar inputs.
///
/// `blocks[i][σ]` is the `n`-vector `B_iσ` (both indices 0-based here; the
/// user-facing surfaces are 1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct ArraySpec {
    pub name: Option<String>,
    pub n: usize,
    pub q: usize,
    pub p: usize,
    pub a: RMat,
    pub blocks: Vec<Vec<DVector<f64>>>,
}

impl ArraySpec {
    /// Builds a spec from block form. Dimensions are taken from the inputs
    /// and are not checked here; see [`validate_array`].
    pub fn from_blocks(a: RMat, blocks: Vec<Vec<DVector<f64>>>) -> Self {
        let n = a.nrows();
        let q = blocks.len();
        let p = blocks.first().map(|r| r.len()).unwrap_or(0);
        ArraySpec { name: None, n, q, p, a, blocks }
    }

    /// Builds a spec from the stacked `(q n) × p` incidence matrix.
    pub fn from_incidence(a: RMat, inc: &RMat, q: usize) -> Result<Self> {
        let n = a.nrows();
        if q == 0 || inc.nrows() != q * n {
            return Err(Error::Dimension(format!(
                "incidence has {} rows, expected q*n = {}*{}",
                inc.nrows(),
                q,
                n
            )));
        }
        let p = inc.ncols();
        let blocks = (0..q)
            .map(|i| {
                (0..p)
                    .map(|s| DVector::from_iterator(n, (0..n).map(|r| inc[(i * n + r, s)])))
                    .collect()
            })
            .collect();
        Ok(ArraySpec { name: None, n, q, p, a, blocks })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// `inc(B_::)`: the `(q n) × p` matrix whose block `(i, σ)` is `B_iσ`.
    pub fn incidence(&self) -> RMat {
        let mut m = RMat::zeros(self.q * self.n, self.p);
        for (i, row) in self.blocks.iter().enumerate() {
            for (s, b) in row.iter().enumerate() {
                for r in 0..self.n.min(b.len()) {
                    m[(i * self.n + r, s)] = b[r];
                }
            }
        }
        m
    }

    /// Block column `B_:σ` stacked into a `q n`-vector.
    pub fn input_column(&self, sigma: usize) -> DVector<f64> {
        self.incidence().column(sigma).into_owned()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Dimension,
    ColumnSum,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Human-readable location, e.g. `sigma=2` (1-based) or `A`.
    pub location: String,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| match v.kind {
                ViolationKind::ColumnSum => {
                    format!("column sum at {} has norm {:.3e}", v.location, v.magnitude)
                }
                ViolationKind::Dimension => format!("dimension mismatch at {}", v.location),
            })
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Checks dimensions and the relative-actuation constraint.
///
/// Every problem becomes a report entry; nothing here returns an error.
pub fn validate_array(spec: &ArraySpec, tol_zero: f64) -> ValidationReport {
    let mut violations = Vec::new();
    let mut dim = |location: String, magnitude: f64| {
        violations.push(Violation { kind: ViolationKind::Dimension, location, magnitude })
    };
    if spec.n == 0 {
        dim("n".into(), 0.0);
    }
    if spec.q < 2 {
        dim("q".into(), spec.q as f64);
    }
    if spec.p == 0 {
        dim("p".into(), 0.0);
    }
    if spec.a.nrows() != spec.n || spec.a.ncols() != spec.n {
        dim("A".into(), spec.a.nrows().max(spec.a.ncols()) as f64);
    }
    if spec.blocks.len() != spec.q {
        dim("B".into(), spec.blocks.len() as f64);
    }
    let mut shapes_ok = spec.blocks.len() == spec.q;
    for (i, row) in spec.blocks.iter().enumerate() {
        if row.len() != spec.p {
            dim(format!("B[i={}]", i + 1), row.len() as f64);
            shapes_ok = false;
        }
        for (s, b) in row.iter().enumerate() {
            if b.len() != spec.n {
                dim(format!("B[i={},sigma={}]", i + 1, s + 1), b.len() as f64);
                shapes_ok = false;
            }
        }
    }
    if shapes_ok {
        for s in 0..spec.p {
            let mut sum = DVector::<f64>::zeros(spec.n);
            for row in &spec.blocks {
                sum += &row[s];
            }
            let norm = sum.norm();
            if !(norm <= tol_zero) {
                violations.push(Violation {
                    kind: ViolationKind::ColumnSum,
                    location: format!("sigma={}", s + 1),
                    magnitude: norm,
                });
            }
        }
    }
    ValidationReport { ok: violations.is_empty(), violations }
}

/// Stacked and reduced operators of an array.
#[derive(Debug, Clone)]
pub struct BigOperators {
    pub n: usize,
    pub q: usize,
    pub p: usize,
    /// `I_q ⊗ A`
    pub abig: RMat,
    /// `inc(B_::)`
    pub bbig: RMat,
    /// `1_q / √q` as a `q × 1` matrix.
    pub s: RMat,
    /// Orthonormal basis of the disagreement subspace `1_q^⊥`, `q × (q-1)`.
    pub d: RMat,
    /// `I_{q-1} ⊗ A`
    pub ared: RMat,
    /// `[D* ⊗ I_n] inc(B_::)`
    pub bred: RMat,
}

/// Orthonormal `q × (q-1)` basis of `{x : 1ᵀx = 0}`.
///
/// Built from the Householder reflector that maps `e_1` to `1_q/√q`: its
/// first column is `1_q/√q`, the remaining columns form `D`.
pub fn disagreement_basis(q: usize) -> Result<RMat> {
    if q < 2 {
        return Err(Error::Dimension(format!("need q >= 2, got {q}")));
    }
    let s = 1.0 / (q as f64).sqrt();
    let mut v = DVector::from_element(q, -s);
    v[0] += 1.0;
    let vv = v.dot(&v);
    let h = identity(q) - (&v * v.transpose()) * (2.0 / vv);
    Ok(h.columns(1, q - 1).into_owned())
}

pub fn build_big(spec: &ArraySpec) -> Result<BigOperators> {
    let report = validate_array(spec, f64::INFINITY);
    if !report.ok {
        return Err(Error::Validation(report));
    }
    let (n, q, p) = (spec.n, spec.q, spec.p);
    let d = disagreement_basis(q)?;
    let s = RMat::from_element(q, 1, 1.0 / (q as f64).sqrt());
    let bbig = spec.incidence();
    let abig = identity(q).kronecker(&spec.a);
    let ared = identity(q - 1).kronecker(&spec.a);
    let bred = d.transpose().kronecker(&identity(n)) * &bbig;
    Ok(BigOperators { n, q, p, abig, bbig, s, d, ared, bred })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    fn tanks() -> ArraySpec {
        let inc = dmatrix![1.0, 0.0; -1.0, 1.0; 0.0, -1.0];
        ArraySpec::from_incidence(dmatrix![0.0], &inc, 3).unwrap()
    }

    #[test]
    fn water_tanks_validate() {
        let r = validate_array(&tanks(), 1e-9);
        assert!(r.ok);
        assert!(r.violations.is_empty());
    }

    #[test]
    fn nonzero_column_sum_is_reported() {
        let inc = dmatrix![1.0; 0.0; 0.0];
        let spec = ArraySpec::from_incidence(dmatrix![0.0], &inc, 3).unwrap();
        let r = validate_array(&spec, 1e-9);
        assert!(!r.ok);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].kind, ViolationKind::ColumnSum);
        assert_eq!(r.violations[0].location, "sigma=1");
        assert!((r.violations[0].magnitude - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_problems_are_reported() {
        let mut spec = tanks();
        spec.blocks[1].pop();
        spec.q = 1;
        let r = validate_array(&spec, 1e-9);
        assert!(!r.ok);
        assert!(r.violations.iter().all(|v| v.kind == ViolationKind::Dimension));
        assert!(r.violations.len() >= 2);
    }

    #[test]
    fn disagreement_basis_q2() {
        let d = disagreement_basis(2).unwrap();
        assert_eq!(d.shape(), (2, 1));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((d[(0, 0)].abs() - h).abs() < 1e-15);
        assert!((d[(0, 0)] + d[(1, 0)]).abs() < 1e-15);
    }

    #[test]
    fn disagreement_basis_rejects_q1() {
        assert!(matches!(disagreement_basis(1), Err(Error::Dimension(_))));
    }

    #[test]
    fn disagreement_identities() {
        for q in 2..9 {
            let d = disagreement_basis(q).unwrap();
            let s = RMat::from_element(q, 1, 1.0 / (q as f64).sqrt());
            assert!((d.transpose() * &d - identity(q - 1)).norm() < 1e-12);
            assert!((&d * d.transpose() + &s * s.transpose() - identity(q)).norm() < 1e-12);
            assert!(d.row_sum().norm() < 1e-12);
        }
    }

    #[test]
    fn big_operators_of_water_tanks() {
        let big = build_big(&tanks()).unwrap();
        assert_eq!(big.bbig, dmatrix![1.0, 0.0; -1.0, 1.0; 0.0, -1.0]);
        assert_eq!(big.abig, RMat::zeros(3, 3));
        let sync = big.s.kronecker(&identity(1));
        assert!((sync.transpose() * &big.bbig).norm() < 1e-12);
    }

    #[test]
    fn reduced_input_for_two_systems() {
        // [D* ⊗ I_1] (1, -1)ᵀ with D = (1, -1)/√2 gives √2.
        let inc = dmatrix![1.0; -1.0];
        let spec = ArraySpec::from_incidence(dmatrix![0.0], &inc, 2).unwrap();
        let big = build_big(&spec).unwrap();
        let d = disagreement_basis(2).unwrap();
        let expected = 2.0_f64.sqrt() * d[(0, 0)].signum();
        assert!((big.bred[(0, 0)] - expected).abs() < 1e-15);
    }
}
