//! Controllability verdicts from eigenvalue-indexed generalized graphs.
//!
//! For each distinct eigenvalue `µ_κ` of `A*` three graphs are built:
//!
//! * the V-graph `[I_q ⊗ V_κ*] inc(B)`,
//! * the W-graph `inc(W^[κ])` with `W^[κ]_iσ = [B^[κ], A_κ B^[κ], …]`,
//! * the Q-graph with columns `[I_q ⊗ Λ_κ^r] B^[κ]_:σ` over an index set of
//!   inputs that shrinks along the spectrum.
//!
//! Their connectivity decides plain, positive, pairwise and positive pairwise
//! controllability. Pairs `(k, l)` are 1-based vertex indices.

use serde::Serialize;

use crate::array_model::{build_big, validate_array, ArraySpec, BigOperators};
use crate::error::{Error, Result};
use crate::genographe::{
    disagreement_block_basis, is_connected, is_kl_connected, is_strongly_connected,
    is_strongly_kl_connected, lineality_space, GenGraph,
};
use crate::linalg::{
    fro, hcat, identity, krylov_basis, pair_selector, range_includes, to_complex, CMat, RMat, C64,
};
use crate::spectral::{distinct_eigenvalues, Spectrum};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GraphKind {
    #[serde(rename = "V-graph")]
    V,
    #[serde(rename = "W-graph")]
    W,
    #[serde(rename = "Q-graph")]
    Q,
}

impl GraphKind {
    pub fn tag(self) -> &'static str {
        match self {
            GraphKind::V => "v",
            GraphKind::W => "w",
            GraphKind::Q => "q",
        }
    }
}

/// One row of the per-eigenvalue verdict table.
#[derive(Debug, Clone, PartialEq)]
pub struct EigGraphVerdict {
    /// 1-based position in the spectrum ordering.
    pub kappa: usize,
    pub mu: C64,
    pub graph_kind: GraphKind,
    pub pair: Option<(usize, usize)>,
    pub connected: Option<bool>,
    pub strongly_connected: Option<bool>,
    pub kl_connected: Option<bool>,
    pub strongly_kl_connected: Option<bool>,
    pub marginal: bool,
}

impl EigGraphVerdict {
    fn empty(kappa: usize, mu: C64, graph_kind: GraphKind, pair: Option<(usize, usize)>) -> Self {
        EigGraphVerdict {
            kappa,
            mu,
            graph_kind,
            pair,
            connected: None,
            strongly_connected: None,
            kl_connected: None,
            strongly_kl_connected: None,
            marginal: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexStep {
    pub kappa: usize,
    /// 1-based input indices.
    pub index_set: Vec<usize>,
    pub removed: Vec<usize>,
    /// Dimension of the lineality space; real eigenvalues only.
    pub lineality_dim: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexRecursionTrace {
    pub steps: Vec<IndexStep>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Assumption1 {
    Holds,
    Violated { kappas: Vec<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Assumption2 {
    StructurallyVerified,
    Unverified,
}

/// Everything the analyses share: the validated array, its stacked
/// operators and its spectrum.
#[derive(Debug, Clone)]
pub struct Context {
    pub spec: ArraySpec,
    pub big: BigOperators,
    pub spectrum: Spectrum,
    pub tol: Tolerances,
}

impl Context {
    pub fn new(spec: &ArraySpec, tol: &Tolerances) -> Result<Self> {
        let report = validate_array(spec, tol.zero);
        if !report.ok {
            return Err(Error::Validation(report));
        }
        let big = build_big(spec)?;
        let spectrum = distinct_eigenvalues(&spec.a, tol)?;
        Ok(Context { spec: spec.clone(), big, spectrum, tol: *tol })
    }

    fn b_scale(&self) -> f64 {
        fro(&self.big.bbig)
    }

    fn check_pair(&self, k: usize, l: usize) -> Result<()> {
        let q = self.spec.q;
        if k == 0 || l == 0 || k > q || l > q || k == l {
            return Err(Error::Domain(format!("invalid vertex pair ({k},{l}) for q = {q}")));
        }
        Ok(())
    }

    /// Index of an earlier component whose verdicts can be reused.
    fn earlier_conjugate(&self, k: usize) -> Option<usize> {
        self.spectrum.conjugate_of(k).filter(|&c| c < k)
    }
}

/// `W = [B, A B, …, A^{n-1} B]` for the stacked system, as a graph with
/// block size `n`.
pub fn controllability_matrix(big: &BigOperators) -> Result<GenGraph> {
    let mut blocks = vec![big.bbig.clone()];
    for r in 1..big.n {
        let next = &big.abig * &blocks[r - 1];
        blocks.push(next);
    }
    let refs: Vec<&RMat> = blocks.iter().collect();
    GenGraph::from_real(big.q, big.n, &hcat(&refs))
}

fn w_floor(ctx: &Context) -> f64 {
    let a = fro(&ctx.spec.a).max(1.0);
    ctx.tol.zero * ctx.b_scale() * a.powi(ctx.spec.n as i32 - 1)
}

/// Orthonormal basis of `range W`.
pub fn controllability_range(ctx: &Context) -> RMat {
    krylov_basis(&ctx.big.abig, &ctx.big.bbig, ctx.spec.n, ctx.tol.rank, w_floor(ctx))
}

fn w_connected(ctx: &Context) -> Result<bool> {
    let t = disagreement_block_basis(ctx.spec.q, ctx.spec.n)?;
    Ok(range_includes(&controllability_range(ctx), &t, ctx.tol.rank, 0.0))
}

fn w_kl_connected(ctx: &Context, k: usize, l: usize) -> bool {
    let t = pair_selector(ctx.spec.q, ctx.spec.n, k - 1, l - 1);
    range_includes(&controllability_range(ctx), &t, ctx.tol.rank, 0.0)
}

/// `B^[κ]` stacked: `[I_q ⊗ U_κ*] inc(B)`.
fn projected_inputs(ctx: &Context, kappa: usize) -> CMat {
    let c = &ctx.spectrum.components[kappa];
    let proj = to_complex(&identity(ctx.spec.q)).kronecker(&c.u.adjoint());
    proj * to_complex(&ctx.big.bbig)
}

/// One V-graph per distinct eigenvalue.
pub fn v_graphs(ctx: &Context) -> Result<Vec<GenGraph>> {
    let b = to_complex(&ctx.big.bbig);
    let floor = ctx.tol.zero * ctx.b_scale();
    ctx.spectrum
        .components
        .iter()
        .map(|c| {
            let proj = to_complex(&identity(ctx.spec.q)).kronecker(&c.v.adjoint());
            Ok(GenGraph::new(ctx.spec.q, c.geo_mult, proj * &b)?.with_floor(floor))
        })
        .collect()
}

/// Krylov-type graph `[X, M X, …, M^{n_κ-1} X]` per input, σ-major.
fn chain_graph(ctx: &Context, kappa: usize, step: &CMat, inputs: &[usize]) -> Result<GenGraph> {
    let q = ctx.spec.q;
    let nk = ctx.spectrum.components[kappa].alg_mult;
    let bk = projected_inputs(ctx, kappa);
    let lift = to_complex(&identity(q)).kronecker(step);
    let mut cols = CMat::zeros(q * nk, inputs.len() * nk);
    let mut at = 0;
    for &s in inputs {
        let mut v = bk.column(s).into_owned();
        for r in 0..nk {
            if r > 0 {
                v = &lift * v;
            }
            cols.set_column(at, &v);
            at += 1;
        }
    }
    let growth = fro(step).max(1.0).powi(nk as i32 - 1);
    let floor = ctx.tol.zero * ctx.b_scale() * growth;
    Ok(GenGraph::new(q, nk, cols)?.with_floor(floor))
}

/// One W-graph per distinct eigenvalue, `p n_κ` columns each.
pub fn w_graphs(ctx: &Context) -> Result<Vec<GenGraph>> {
    let all: Vec<usize> = (0..ctx.spec.p).collect();
    (0..ctx.spectrum.components.len())
        .map(|k| chain_graph(ctx, k, &ctx.spectrum.components[k].a_k, &all))
        .collect()
}

/// Q-graphs restricted to the recursively shrinking input sets.
pub fn q_graphs_and_index_sets(ctx: &Context) -> Result<(Vec<GenGraph>, IndexRecursionTrace)> {
    let mut index_set: Vec<usize> = (0..ctx.spec.p).collect();
    let mut graphs = Vec::new();
    let mut steps = Vec::new();
    for (k, c) in ctx.spectrum.components.iter().enumerate() {
        let g = chain_graph(ctx, k, &c.lambda, &index_set)?;
        let mut removed = Vec::new();
        let mut lineality_dim = None;
        if c.is_real {
            let lin = lineality_space(&g, ctx.tol.cone, ctx.tol.rank)?;
            lineality_dim = Some(lin.dim());
            let nk = c.alg_mult;
            let basis = to_complex(&lin.columns);
            for (pos, &s) in index_set.iter().enumerate() {
                let outside = (0..nk).any(|r| {
                    let col = g.m.columns(pos * nk + r, 1).into_owned();
                    if col.norm() <= g.floor {
                        return false;
                    }
                    lin.dim() == 0 || !range_includes(&basis, &col, ctx.tol.rank, 0.0)
                });
                if outside {
                    removed.push(s);
                }
            }
        }
        steps.push(IndexStep {
            kappa: k + 1,
            index_set: index_set.iter().map(|s| s + 1).collect(),
            removed: removed.iter().map(|s| s + 1).collect(),
            lineality_dim,
        });
        index_set.retain(|s| !removed.contains(s));
        graphs.push(g);
    }
    Ok((graphs, IndexRecursionTrace { steps }))
}

/// Whether non-real eigenvalues sharing their real part with a real
/// eigenvalue are semisimple.
pub fn check_assumption_eigen(ctx: &Context) -> Assumption1 {
    let s = &ctx.spectrum;
    let tol_res = ctx.tol.residual(fro(&ctx.spec.a));
    let mut kappas = Vec::new();
    for (k, c) in s.components.iter().enumerate() {
        if c.is_real {
            continue;
        }
        let shares = s
            .components
            .iter()
            .any(|o| o.is_real && (o.mu.re - c.mu.re).abs() <= s.tol_eig);
        if shares && fro(&c.lambda) > tol_res {
            kappas.push(k + 1);
        }
    }
    if kappas.is_empty() {
        Assumption1::Holds
    } else {
        Assumption1::Violated { kappas }
    }
}

fn snap(x: f64, tol: f64) -> Option<i64> {
    let r = x.round();
    ((x - r).abs() <= tol).then_some(r as i64)
}

/// Recognises a chain of integrators driven at its last state through a
/// `±1` incidence matrix, up to a relabelling of states.
pub fn check_assumption_closed_structural(spec: &ArraySpec, tol_zero: f64) -> Assumption2 {
    let n = spec.n;
    let mut next = vec![None; n];
    let mut prev = vec![None; n];
    let mut ones = 0;
    for i in 0..n {
        for j in 0..n {
            match snap(spec.a[(i, j)], tol_zero) {
                Some(0) => {}
                Some(1) if i != j && next[i].is_none() && prev[j].is_none() => {
                    next[i] = Some(j);
                    prev[j] = Some(i);
                    ones += 1;
                }
                _ => return Assumption2::Unverified,
            }
        }
    }
    if ones + 1 != n {
        return Assumption2::Unverified;
    }
    let Some(start) = (0..n).find(|&i| prev[i].is_none()) else {
        return Assumption2::Unverified;
    };
    let mut seen = 1;
    let mut at = start;
    while let Some(j) = next[at] {
        at = j;
        seen += 1;
        if seen > n {
            return Assumption2::Unverified;
        }
    }
    if seen != n {
        return Assumption2::Unverified;
    }
    let end = at;
    for s in 0..spec.p {
        let mut plus = 0;
        let mut minus = 0;
        for i in 0..spec.q {
            let b = &spec.blocks[i][s];
            for r in 0..n {
                match (snap(b[r], tol_zero), r == end) {
                    (Some(0), _) => {}
                    (Some(1), true) => plus += 1,
                    (Some(-1), true) => minus += 1,
                    _ => return Assumption2::Unverified,
                }
            }
        }
        if plus != 1 || minus != 1 {
            return Assumption2::Unverified;
        }
    }
    Assumption2::StructurallyVerified
}

/// Every V-graph connected; cross-checked against `range W`.
pub fn is_controllable(ctx: &Context) -> Result<(bool, Vec<EigGraphVerdict>)> {
    let graphs = v_graphs(ctx)?;
    let mut rows: Vec<EigGraphVerdict> = Vec::with_capacity(graphs.len());
    for (k, g) in graphs.iter().enumerate() {
        let mu = ctx.spectrum.components[k].mu;
        let mut row = EigGraphVerdict::empty(k + 1, mu, GraphKind::V, None);
        row.connected = Some(match ctx.earlier_conjugate(k) {
            Some(c) => rows[c].connected.unwrap_or(false),
            None => is_connected(g, ctx.tol.rank)?,
        });
        rows.push(row);
    }
    let verdict = rows.iter().all(|r| r.connected == Some(true));
    let direct = w_connected(ctx)?;
    if verdict != direct {
        return Err(Error::InternalConsistency(format!(
            "eigenvalue graphs say controllable={verdict}, controllability matrix says {direct}"
        )));
    }
    Ok((verdict, rows))
}

/// Controllable, and every real-eigenvalue V-graph strongly connected.
pub fn is_positively_controllable(ctx: &Context) -> Result<(bool, Vec<EigGraphVerdict>)> {
    let (controllable, mut rows) = is_controllable(ctx)?;
    let graphs = v_graphs(ctx)?;
    let mut all_strong = true;
    for (k, g) in graphs.iter().enumerate() {
        if !ctx.spectrum.components[k].is_real {
            continue;
        }
        let v = is_strongly_connected(g, ctx.tol.cone)?;
        rows[k].strongly_connected = Some(v.holds);
        rows[k].marginal |= v.marginal;
        all_strong &= v.holds;
    }
    Ok((controllable && all_strong, rows))
}

/// Pairwise verdict with W-graph rows followed by V-graph rows for the same
/// pair (the latter are informational).
pub fn is_pairwise_controllable(ctx: &Context, k: usize, l: usize) -> Result<(bool, Vec<EigGraphVerdict>)> {
    ctx.check_pair(k, l)?;
    let mut rows: Vec<EigGraphVerdict> = Vec::new();
    for (kind, graphs) in [(GraphKind::W, w_graphs(ctx)?), (GraphKind::V, v_graphs(ctx)?)] {
        let base = rows.len();
        for (kap, g) in graphs.iter().enumerate() {
            let mu = ctx.spectrum.components[kap].mu;
            let mut row = EigGraphVerdict::empty(kap + 1, mu, kind, Some((k, l)));
            row.kl_connected = Some(match ctx.earlier_conjugate(kap) {
                Some(c) => rows[base + c].kl_connected.unwrap_or(false),
                None => is_kl_connected(g, k, l, ctx.tol.rank)?,
            });
            rows.push(row);
        }
    }
    let verdict = rows
        .iter()
        .filter(|r| r.graph_kind == GraphKind::W)
        .all(|r| r.kl_connected == Some(true));
    let direct = w_kl_connected(ctx, k, l);
    if verdict != direct {
        return Err(Error::InternalConsistency(format!(
            "eigenvalue graphs say ({k},{l})-controllable={verdict}, controllability matrix says {direct}"
        )));
    }
    Ok((verdict, rows))
}

#[derive(Debug, Clone)]
pub struct PositivePairwise {
    pub pair: (usize, usize),
    pub holds: bool,
    /// True unless both side assumptions are known to hold.
    pub conditional: bool,
    pub rows: Vec<EigGraphVerdict>,
    pub assumption1: Assumption1,
    pub assumption2: Assumption2,
    pub trace: IndexRecursionTrace,
}

/// Real eigenvalues need strongly `(k,l)`-connected Q-graphs, the others
/// `(k,l)`-connected ones.
pub fn is_positive_pairwise_controllable(ctx: &Context, k: usize, l: usize) -> Result<PositivePairwise> {
    ctx.check_pair(k, l)?;
    let (graphs, trace) = q_graphs_and_index_sets(ctx)?;
    let mut rows: Vec<EigGraphVerdict> = Vec::with_capacity(graphs.len());
    let mut holds = true;
    for (kap, g) in graphs.iter().enumerate() {
        let c = &ctx.spectrum.components[kap];
        let mut row = EigGraphVerdict::empty(kap + 1, c.mu, GraphKind::Q, Some((k, l)));
        if c.is_real {
            let v = is_strongly_kl_connected(g, k, l, ctx.tol.cone)?;
            row.strongly_kl_connected = Some(v.holds);
            row.marginal = v.marginal;
            holds &= v.holds;
        } else {
            let v = match ctx.earlier_conjugate(kap) {
                Some(cj) => rows[cj].kl_connected.unwrap_or(false),
                None => is_kl_connected(g, k, l, ctx.tol.rank)?,
            };
            row.kl_connected = Some(v);
            holds &= v;
        }
        rows.push(row);
    }
    let assumption1 = check_assumption_eigen(ctx);
    let assumption2 = check_assumption_closed_structural(&ctx.spec, ctx.tol.zero);
    let conditional =
        !(assumption1 == Assumption1::Holds && assumption2 == Assumption2::StructurallyVerified);
    Ok(PositivePairwise { pair: (k, l), holds, conditional, rows, assumption1, assumption2, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, DVector};

    fn ctx(a: RMat, inc: RMat, q: usize) -> Context {
        let spec = ArraySpec::from_incidence(a, &inc, q).unwrap();
        Context::new(&spec, &Tolerances::default()).unwrap()
    }

    fn tanks() -> Context {
        ctx(dmatrix![0.0], dmatrix![1.0, 0.0; -1.0, 1.0; 0.0, -1.0], 3)
    }

    fn ring() -> Context {
        ctx(dmatrix![0.0], dmatrix![1.0, 0.0, -1.0; -1.0, 1.0, 0.0; 0.0, -1.0, 1.0], 3)
    }

    fn chain_ring() -> Context {
        let g = dmatrix![1.0, 0.0, -1.0; -1.0, 1.0, 0.0; 0.0, -1.0, 1.0];
        ctx(dmatrix![0.0, 1.0; 0.0, 0.0], g.kronecker(&dmatrix![0.0; 1.0]), 3)
    }

    #[test]
    fn tanks_verdicts() {
        let c = tanks();
        assert!(is_controllable(&c).unwrap().0);
        assert!(!is_positively_controllable(&c).unwrap().0);
        assert!(is_pairwise_controllable(&c, 1, 3).unwrap().0);
        let p = is_positive_pairwise_controllable(&c, 1, 2).unwrap();
        assert!(!p.holds);
        assert_eq!(p.assumption2, Assumption2::StructurallyVerified);
        assert_eq!(p.trace.steps[0].index_set, vec![1, 2]);
        assert_eq!(p.trace.steps[0].removed, vec![1, 2]);
        assert_eq!(p.trace.steps[0].lineality_dim, Some(0));
    }

    #[test]
    fn ring_verdicts() {
        let c = ring();
        assert!(is_positively_controllable(&c).unwrap().0);
        let (graphs, trace) = q_graphs_and_index_sets(&c).unwrap();
        assert_eq!(graphs.len(), 1);
        assert_eq!(trace.steps[0].lineality_dim, Some(2));
        assert!(trace.steps[0].removed.is_empty());
        for (k, l) in [(1, 2), (2, 1), (1, 3), (3, 2)] {
            let p = is_positive_pairwise_controllable(&c, k, l).unwrap();
            assert!(p.holds && !p.conditional);
        }
    }

    #[test]
    fn chain_ring_is_unconditionally_positive_pairwise() {
        let c = chain_ring();
        assert_eq!(controllability_range(&c).ncols(), 4);
        for (k, l) in [(1, 2), (2, 3), (3, 1)] {
            let p = is_positive_pairwise_controllable(&c, k, l).unwrap();
            assert!(p.holds && !p.conditional, "{k},{l}");
        }
    }

    #[test]
    fn zero_input_is_not_controllable() {
        let c = ctx(dmatrix![0.0], dmatrix![0.0; 0.0], 2);
        assert!(!is_controllable(&c).unwrap().0);
    }

    #[test]
    fn controllability_matrix_of_tanks_is_b() {
        let w = controllability_matrix(&tanks().big).unwrap();
        assert_eq!(w.m, to_complex(&tanks().big.bbig));
        assert!(w.class_residual() < 1e-15);
    }

    #[test]
    fn w_graph_shape() {
        let c = chain_ring();
        let w = w_graphs(&c).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].m.shape(), (6, 6));
    }

    #[test]
    fn assumption_eigen_cases() {
        let tol = Tolerances::default();
        // eigenvalues {0, ±j}, semisimple
        let a = dmatrix![0.0, 0.0, 0.0; 0.0, 0.0, 1.0; 0.0, -1.0, 0.0];
        let inc = DVector::from_vec(vec![1.0, 0.0, 0.0, -1.0, 0.0, 0.0]);
        let spec = ArraySpec::from_incidence(a, &RMat::from_column_slice(6, 1, inc.as_slice()), 2).unwrap();
        assert_eq!(check_assumption_eigen(&Context::new(&spec, &tol).unwrap()), Assumption1::Holds);
        // {0} plus a 2-chain at ±j
        let rot = dmatrix![0.0, 1.0; -1.0, 0.0];
        let mut a = RMat::zeros(5, 5);
        a.view_mut((1, 1), (2, 2)).copy_from(&rot);
        a.view_mut((3, 3), (2, 2)).copy_from(&rot);
        a.view_mut((1, 3), (2, 2)).copy_from(&identity(2));
        let inc = RMat::from_fn(10, 1, |r, _| if r == 0 { 1.0 } else if r == 5 { -1.0 } else { 0.0 });
        let spec = ArraySpec::from_incidence(a, &inc, 2).unwrap();
        let c = Context::new(&spec, &tol).unwrap();
        match check_assumption_eigen(&c) {
            Assumption1::Violated { kappas } => assert_eq!(kappas, vec![2, 3]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn structural_assumption_cases() {
        assert_eq!(
            check_assumption_closed_structural(&tanks().spec, 1e-9),
            Assumption2::StructurallyVerified
        );
        assert_eq!(
            check_assumption_closed_structural(&chain_ring().spec, 1e-9),
            Assumption2::StructurallyVerified
        );
        // relabelled chain: state 1 feeds state 0, input at state 0
        let g = dmatrix![1.0; -1.0];
        let spec = ArraySpec::from_incidence(dmatrix![0.0, 0.0; 1.0, 0.0], &g.kronecker(&dmatrix![1.0; 0.0]), 2).unwrap();
        assert_eq!(check_assumption_closed_structural(&spec, 1e-9), Assumption2::StructurallyVerified);
        // input at the wrong end
        let spec = ArraySpec::from_incidence(dmatrix![0.0, 1.0; 0.0, 0.0], &g.kronecker(&dmatrix![1.0; 0.0]), 2).unwrap();
        assert_eq!(check_assumption_closed_structural(&spec, 1e-9), Assumption2::Unverified);
        // two separate chains
        let a = dmatrix![0.0, 0.0, 0.0, 0.0; 1.0, 0.0, 0.0, 0.0; 0.0, 0.0, 0.0, 0.0; 0.0, 0.0, 1.0, 0.0];
        let spec = ArraySpec::from_incidence(a, &RMat::zeros(8, 1), 2).unwrap();
        assert_eq!(check_assumption_closed_structural(&spec, 1e-9), Assumption2::Unverified);
    }
}
