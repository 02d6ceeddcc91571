//! Generalized graphs.
//!
//! A generalized graph on `q` vertices with block size `d` is a `(q d) × c`
//! matrix whose columns (edges) lie in the disagreement subspace: the `d`-row
//! blocks of every column sum to zero. Ordinary weighted digraphs are the
//! case `d = 1` with columns `w (e_i - e_j)`.
//!
//! Vertex indices in this module's public functions are 1-based.

use std::fmt::Write as _;

use nalgebra::DVector;

use crate::array_model::disagreement_basis;
use crate::error::{Error, Result};
use crate::linalg::{
    column_space, equilibrate_columns, fro, identity, max_imag, pair_selector, pseudo_inverse, range_includes,
    real_part, to_complex, CMat, RMat, C64,
};
use crate::nnls::nnls;

/// Columns whose norm falls below this fraction of the largest column norm
/// are treated as zero edges by the cone tests.
const DROP_REL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct GenGraph {
    pub q: usize,
    pub blocksize: usize,
    pub m: CMat,
    pub is_real: bool,
    /// Absolute column norm at or below which an edge counts as absent.
    pub floor: f64,
}

impl GenGraph {
    pub fn new(q: usize, blocksize: usize, m: CMat) -> Result<Self> {
        if m.nrows() != q * blocksize {
            return Err(Error::Dimension(format!(
                "graph has {} rows, expected q*d = {}*{}",
                m.nrows(),
                q,
                blocksize
            )));
        }
        let is_real = max_imag(&m) == 0.0;
        Ok(GenGraph { q, blocksize, m, is_real, floor: 0.0 })
    }

    pub fn from_real(q: usize, blocksize: usize, m: &RMat) -> Result<Self> {
        Self::new(q, blocksize, to_complex(m))
    }

    pub fn with_floor(mut self, floor: f64) -> Self {
        self.floor = floor;
        self
    }

    pub fn edges(&self) -> usize {
        self.m.ncols()
    }

    /// Norm of `(1_qᵀ ⊗ I_d) M`; zero for a class-`G` matrix.
    pub fn class_residual(&self) -> f64 {
        let sum = RMat::from_element(1, self.q, 1.0).kronecker(&identity(self.blocksize));
        fro(&(to_complex(&sum) * &self.m))
    }

    fn real_matrix(&self) -> Result<RMat> {
        if !self.is_real {
            return Err(Error::Domain("strong connectivity needs a real graph".into()));
        }
        Ok(real_part(&self.m))
    }

    fn check_pair(&self, k: usize, l: usize) -> Result<()> {
        if k == 0 || l == 0 || k > self.q || l > self.q || k == l {
            return Err(Error::Domain(format!("invalid vertex pair ({k},{l}) for q = {}", self.q)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Feasibility {
    pub member: bool,
    /// Nonnegative weights on the original columns, present when `member`.
    pub certificate: Option<DVector<f64>>,
    pub residual: f64,
    /// Residual within a factor ten above the threshold.
    pub marginal: bool,
}

/// Outcome of a cone-containment query over a whole subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConeVerdict {
    pub holds: bool,
    pub marginal: bool,
}

#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    /// Orthonormal columns.
    pub columns: RMat,
    /// Indices (0-based) of the generators whose negation lies in the cone.
    pub generators: Vec<usize>,
}

impl SubspaceBasis {
    pub fn dim(&self) -> usize {
        self.columns.ncols()
    }
}

pub fn range_contains(g: &GenGraph, target: &CMat, tol_rank: f64) -> bool {
    range_includes(&g.m, target, tol_rank, g.floor)
}

/// Decides `v ∈ cone(M)` by nonnegative least squares on the
/// column-equilibrated matrix.
pub fn cone_member(g: &GenGraph, v: &DVector<f64>, tol_cone: f64) -> Result<Feasibility> {
    let m = g.real_matrix()?;
    if v.len() != m.nrows() {
        return Err(Error::Dimension(format!("vector has {} entries, graph has {} rows", v.len(), m.nrows())));
    }
    cone_member_real(&m, v, tol_cone, g.floor)
}

pub(crate) fn cone_member_real(m: &RMat, v: &DVector<f64>, tol_cone: f64, floor: f64) -> Result<Feasibility> {
    let norms: Vec<f64> = m.column_iter().map(|c| c.norm()).collect();
    let top = norms.iter().copied().fold(0.0, f64::max);
    let cut = floor.max(DROP_REL * top);
    let kept: Vec<usize> = (0..m.ncols()).filter(|&j| norms[j] > cut).collect();
    let mut eq = RMat::zeros(m.nrows(), kept.len());
    for (k, &j) in kept.iter().enumerate() {
        eq.set_column(k, &(m.column(j) / norms[j]));
    }
    let sol = nnls(&eq, v)?;
    let thr = tol_cone * (1.0 + v.norm());
    let member = sol.residual <= thr;
    let certificate = member.then(|| {
        let mut alpha = DVector::zeros(m.ncols());
        for (k, &j) in kept.iter().enumerate() {
            alpha[j] = sol.x[k] / norms[j];
        }
        alpha
    });
    Ok(Feasibility {
        member,
        certificate,
        residual: sol.residual,
        marginal: !member && sol.residual <= 10.0 * thr,
    })
}

fn cone_contains_subspace(g: &GenGraph, basis: &RMat, tol_cone: f64) -> Result<ConeVerdict> {
    let m = g.real_matrix()?;
    let mut marginal = false;
    for b in basis.column_iter() {
        for sign in [1.0, -1.0] {
            let f = cone_member_real(&m, &(b * sign), tol_cone, g.floor)?;
            marginal |= f.marginal;
            if !f.member {
                return Ok(ConeVerdict { holds: false, marginal });
            }
        }
    }
    Ok(ConeVerdict { holds: true, marginal })
}

/// `D ⊗ I_d`: a basis of the disagreement subspace in block form.
pub fn disagreement_block_basis(q: usize, d: usize) -> Result<RMat> {
    Ok(disagreement_basis(q)?.kronecker(&identity(d)))
}

/// `range M ⊇ S^⊥`.
pub fn is_connected(g: &GenGraph, tol_rank: f64) -> Result<bool> {
    let t = disagreement_block_basis(g.q, g.blocksize)?;
    Ok(range_contains(g, &to_complex(&t), tol_rank))
}

/// `range M ⊇ range[(e_k - e_l) ⊗ I_d]`.
pub fn is_kl_connected(g: &GenGraph, k: usize, l: usize, tol_rank: f64) -> Result<bool> {
    g.check_pair(k, l)?;
    let t = pair_selector(g.q, g.blocksize, k - 1, l - 1);
    Ok(range_contains(g, &to_complex(&t), tol_rank))
}

/// `cone M ⊇ S^⊥`; real graphs only.
pub fn is_strongly_connected(g: &GenGraph, tol_cone: f64) -> Result<ConeVerdict> {
    let t = disagreement_block_basis(g.q, g.blocksize)?;
    cone_contains_subspace(g, &t, tol_cone)
}

/// `cone M ⊇ range[(e_k - e_l) ⊗ I_d]`; real graphs only.
pub fn is_strongly_kl_connected(g: &GenGraph, k: usize, l: usize, tol_cone: f64) -> Result<ConeVerdict> {
    g.check_pair(k, l)?;
    let t = pair_selector(g.q, g.blocksize, k - 1, l - 1);
    cone_contains_subspace(g, &t, tol_cone)
}

/// Largest subspace inside `cone M`, spanned by the generators whose
/// negation is itself in the cone.
pub fn lineality_space(g: &GenGraph, tol_cone: f64, tol_rank: f64) -> Result<SubspaceBasis> {
    let m = g.real_matrix()?;
    let eq = equilibrate_columns(&m, DROP_REL, g.floor);
    let norms: Vec<f64> = m.column_iter().map(|c| c.norm()).collect();
    let top = norms.iter().copied().fold(0.0, f64::max);
    let cut = g.floor.max(DROP_REL * top);
    let kept: Vec<usize> = (0..m.ncols()).filter(|&j| norms[j] > cut).collect();
    // absent columns are zero, and the negation of zero is in every cone
    let mut generators: Vec<usize> = (0..m.ncols()).filter(|j| !kept.contains(j)).collect();
    let mut chosen = Vec::new();
    for (k, &j) in kept.iter().enumerate() {
        let neg = -eq.column(k).into_owned();
        if cone_member_real(&eq, &neg, tol_cone, 0.0)?.member {
            generators.push(j);
            chosen.push(k);
        }
    }
    generators.sort_unstable();
    let mut span = RMat::zeros(m.nrows(), chosen.len());
    for (c, &k) in chosen.iter().enumerate() {
        span.set_column(c, &eq.column(k));
    }
    Ok(SubspaceBasis { columns: column_space(&span, tol_rank), generators })
}

/// One edge `w (e_tail - e_head)` of a scalar-edge graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarEdge {
    /// 0-based column of the generalized graph.
    pub column: usize,
    /// 1-based vertex indices.
    pub tail: usize,
    pub head: usize,
    pub weight: DVector<C64>,
}

/// Factors every nonzero column as `(e_i - e_j) ⊗ w`, or returns `None` when
/// some column touches a number of vertices other than two.
///
/// Real scalar weights are oriented to be positive; otherwise the tail is
/// the smaller vertex index.
pub fn detect_scalar_edges(g: &GenGraph, tol_zero: f64) -> Option<Vec<ScalarEdge>> {
    let d = g.blocksize;
    let mut out = Vec::new();
    for (col, c) in g.m.column_iter().enumerate() {
        let cn = c.norm();
        if cn <= g.floor.max(0.0) || cn == 0.0 {
            continue;
        }
        let cut = tol_zero * cn;
        let touched: Vec<usize> =
            (0..g.q).filter(|&i| c.rows(i * d, d).norm() > cut).collect();
        if touched.len() != 2 {
            return None;
        }
        let (i, j) = (touched[0], touched[1]);
        let wi: DVector<C64> = c.rows(i * d, d).into_owned();
        let wj: DVector<C64> = c.rows(j * d, d).into_owned();
        if (&wi + &wj).norm() > cut {
            return None;
        }
        let real_scalar = d == 1 && wi[0].im.abs() <= cut;
        let (tail, head, weight) = if real_scalar && wi[0].re < 0.0 {
            (j, i, wj)
        } else {
            (i, j, wi)
        };
        out.push(ScalarEdge { column: col, tail: tail + 1, head: head + 1, weight });
    }
    Some(out)
}

/// `x` with four significant digits, without exponent for moderate values.
pub fn sig4(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".into() } else { format!("{x}") };
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        let decimals = (3 - mag).max(0) as usize;
        format!("{:.*}", decimals, x)
    } else {
        format!("{:.3e}", x)
    }
}

fn fmt_weight(w: &DVector<C64>, tol: f64) -> String {
    let one = |z: C64| {
        let re = if z.re.abs() <= tol { 0.0 } else { z.re };
        let im = if z.im.abs() <= tol { 0.0 } else { z.im };
        if im == 0.0 {
            sig4(re)
        } else if re == 0.0 {
            format!("{}j", sig4(im))
        } else {
            let sign = if im < 0.0 { "-" } else { "+" };
            format!("{}{}{}j", sig4(re), sign, sig4(im.abs()))
        }
    };
    if w.len() == 1 {
        one(w[0])
    } else {
        let parts: Vec<String> = w.iter().map(|&z| one(z)).collect();
        format!("[{}]", parts.join(", "))
    }
}

/// Graphviz rendering of a scalar-edge graph, one arc per nonzero column.
pub fn to_dot(g: &GenGraph, labels: &[String], tol_zero: f64) -> Result<String> {
    let edges = detect_scalar_edges(g, tol_zero)
        .ok_or_else(|| Error::UnsupportedRender("graph has hyperedges".into()))?;
    let label = |i: usize| labels.get(i - 1).cloned().unwrap_or_else(|| i.to_string());
    let scale = g.m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut s = String::from("digraph G {\n  node [shape=circle];\n");
    for i in 1..=g.q {
        let _ = writeln!(s, "  v{i} [label=\"{}\"];", label(i));
    }
    for e in &edges {
        let _ = writeln!(
            s,
            "  v{} -> v{} [label=\"{}\"];",
            e.tail,
            e.head,
            fmt_weight(&e.weight, tol_zero * scale)
        );
    }
    s.push_str("}\n");
    Ok(s)
}

/// Effective conductance between vertices `k` and `l` of a real graph with
/// block size one; zero when the pair is not connected.
pub fn effective_conductance(g: &GenGraph, k: usize, l: usize, tol_rank: f64) -> Result<f64> {
    if g.blocksize != 1 {
        return Err(Error::Domain("effective conductance needs block size 1".into()));
    }
    g.check_pair(k, l)?;
    let mut m = g.real_matrix()?;
    for mut c in m.column_iter_mut() {
        if c.norm() <= g.floor {
            c.fill(0.0);
        }
    }
    let lap = &m * m.transpose();
    let b = pair_selector(g.q, 1, k - 1, l - 1);
    if !range_includes(&lap, &b, tol_rank, g.floor) {
        return Ok(0.0);
    }
    let pinv = pseudo_inverse(&lap, tol_rank);
    let bb = b.column(0);
    Ok(1.0 / bb.dot(&(pinv * bb)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector};

    fn tanks() -> GenGraph {
        GenGraph::from_real(3, 1, &dmatrix![1.0, 0.0; -1.0, 1.0; 0.0, -1.0]).unwrap()
    }

    fn ring() -> GenGraph {
        GenGraph::from_real(3, 1, &dmatrix![1.0, 0.0, -1.0; -1.0, 1.0, 0.0; 0.0, -1.0, 1.0]).unwrap()
    }

    fn hyperedge() -> GenGraph {
        GenGraph::from_real(3, 1, &dmatrix![1.0; 1.0; -2.0]).unwrap()
    }

    #[test]
    fn tanks_predicates() {
        let g = tanks();
        assert!(g.class_residual() < 1e-15);
        assert!(is_connected(&g, 1e-9).unwrap());
        assert!(!is_strongly_connected(&g, 1e-8).unwrap().holds);
        assert!(is_kl_connected(&g, 1, 3, 1e-9).unwrap());
        // one-way pumps: +(e1-e2) is reachable, -(e1-e2) is not
        assert!(!is_strongly_kl_connected(&g, 1, 2, 1e-8).unwrap().holds);
        assert!(!is_strongly_kl_connected(&g, 2, 1, 1e-8).unwrap().holds);
    }

    #[test]
    fn tanks_cone_membership() {
        let g = tanks();
        let f = cone_member(&g, &dvector![1.0, -1.0, 0.0], 1e-8).unwrap();
        assert!(f.member);
        assert!((f.certificate.unwrap() - dvector![1.0, 0.0]).norm() < 1e-12);
        let f = cone_member(&g, &dvector![-1.0, 1.0, 0.0], 1e-8).unwrap();
        assert!(!f.member);
        assert!(f.certificate.is_none());
        assert!(f.residual > 0.1);
    }

    #[test]
    fn ring_reverse_edge_certificate() {
        let f = cone_member(&ring(), &dvector![-1.0, 1.0, 0.0], 1e-8).unwrap();
        assert!(f.member);
        assert!((f.certificate.unwrap() - dvector![0.0, 1.0, 1.0]).norm() < 1e-10);
        assert!(is_strongly_connected(&ring(), 1e-8).unwrap().holds);
    }

    #[test]
    fn hyperedge_connects_nothing() {
        let g = hyperedge();
        for (k, l) in [(1, 2), (1, 3), (2, 3), (2, 1)] {
            assert!(!is_kl_connected(&g, k, l, 1e-9).unwrap());
            assert_eq!(effective_conductance(&g, k, l, 1e-9).unwrap(), 0.0);
        }
        assert!(detect_scalar_edges(&g, 1e-9).is_none());
        assert!(matches!(to_dot(&g, &[], 1e-9), Err(Error::UnsupportedRender(_))));
    }

    #[test]
    fn strong_tests_reject_complex_graphs() {
        let m = CMat::from_row_slice(2, 1, &[C64::new(0.0, 1.0), C64::new(0.0, -1.0)]);
        let g = GenGraph::new(2, 1, m).unwrap();
        assert!(!g.is_real);
        assert!(is_connected(&g, 1e-9).unwrap());
        assert!(matches!(is_strongly_connected(&g, 1e-8), Err(Error::Domain(_))));
    }

    #[test]
    fn invalid_pair_is_a_domain_error() {
        assert!(matches!(is_kl_connected(&tanks(), 1, 1, 1e-9), Err(Error::Domain(_))));
        assert!(matches!(is_kl_connected(&tanks(), 0, 1, 1e-9), Err(Error::Domain(_))));
        assert!(matches!(is_kl_connected(&tanks(), 1, 4, 1e-9), Err(Error::Domain(_))));
    }

    #[test]
    fn lineality_examples() {
        let g = GenGraph::from_real(3, 1, &dmatrix![1.0, -1.0, 0.0; -1.0, 1.0, 1.0; 0.0, 0.0, -1.0]).unwrap();
        let l = lineality_space(&g, 1e-8, 1e-9).unwrap();
        assert_eq!(l.dim(), 1);
        assert_eq!(l.generators, vec![0, 1]);
        let e = dvector![1.0, -1.0, 0.0] / 2.0_f64.sqrt();
        assert!((l.columns.column(0).dot(&e).abs() - 1.0).abs() < 1e-12);
        assert_eq!(lineality_space(&ring(), 1e-8, 1e-9).unwrap().dim(), 2);
        assert_eq!(lineality_space(&tanks(), 1e-8, 1e-9).unwrap().dim(), 0);
    }

    #[test]
    fn scalar_edges_of_tanks() {
        let e = detect_scalar_edges(&tanks(), 1e-9).unwrap();
        let got: Vec<(usize, usize, f64)> = e.iter().map(|e| (e.tail, e.head, e.weight[0].re)).collect();
        assert_eq!(got, vec![(1, 2, 1.0), (2, 3, 1.0)]);
    }

    #[test]
    fn negative_real_weight_is_reoriented() {
        let g = GenGraph::from_real(2, 1, &dmatrix![-2.0; 2.0]).unwrap();
        let e = detect_scalar_edges(&g, 1e-9).unwrap();
        assert_eq!((e[0].tail, e[0].head, e[0].weight[0].re), (2, 1, 2.0));
    }

    #[test]
    fn dot_output_is_stable() {
        let dot = to_dot(&tanks(), &[], 1e-9).unwrap();
        assert_eq!(
            dot,
            "digraph G {\n  node [shape=circle];\n  v1 [label=\"1\"];\n  v2 [label=\"2\"];\n  v3 [label=\"3\"];\n  v1 -> v2 [label=\"1.000\"];\n  v2 -> v3 [label=\"1.000\"];\n}\n"
        );
        assert_eq!(to_dot(&ring(), &[], 1e-9).unwrap().matches("->").count(), 3);
    }

    #[test]
    fn conductances() {
        let single = GenGraph::from_real(2, 1, &dmatrix![1.0; -1.0]).unwrap();
        assert!((effective_conductance(&single, 1, 2, 1e-9).unwrap() - 1.0).abs() < 1e-12);
        for (k, l) in [(1, 2), (1, 3), (2, 3)] {
            assert!((effective_conductance(&ring(), k, l, 1e-9).unwrap() - 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn significant_digits() {
        assert_eq!(sig4(1.0), "1.000");
        assert_eq!(sig4(-0.70710678), "-0.7071");
        assert_eq!(sig4(123.456), "123.5");
        assert_eq!(sig4(1.5e-7), "1.500e-7");
        assert_eq!(sig4(0.0), "0");
    }
}
