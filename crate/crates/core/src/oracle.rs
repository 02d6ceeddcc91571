//! Independent checks of the graph-based verdicts.
//!
//! Rank and cone oracles work on the reduced pair `(I_{q-1} ⊗ A,
//! [D* ⊗ I_n] inc B)` or on `W` directly; the path oracle is a BFS on an
//! ordinary digraph; the falsifier and the reach simulator sample the polar
//! cone and the positively reachable set.

use std::collections::VecDeque;

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::array_model::{build_big, ArraySpec};
use crate::controllability::{
    controllability_matrix, is_controllable, is_pairwise_controllable,
    is_positive_pairwise_controllable, is_positively_controllable, Context,
};
use crate::error::{Error, Result};
use crate::genographe::{
    cone_member_real, disagreement_block_basis, is_connected, is_kl_connected,
    is_strongly_connected, is_strongly_kl_connected, GenGraph,
};
use crate::linalg::{
    eigenvalues, equilibrate_columns, fro, hcat, identity, krylov_basis, pair_selector, range_includes, real_part,
    RMat,
};
use crate::nnls::nnls;
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleVerdict {
    pub name: String,
    /// Agreement with the corresponding analysis verdict, when one exists.
    pub agrees: Option<bool>,
    pub detail: String,
    pub witness: Option<Vec<f64>>,
}

/// `rank [B_r, A_r B_r, …] = (q-1) n`.
pub fn kalman_reduced(spec: &ArraySpec, tol: &Tolerances) -> Result<bool> {
    let big = build_big(spec)?;
    let floor = tol.zero * fro(&big.bred);
    let k = krylov_basis(&big.ared, &big.bred, spec.n, tol.rank, floor);
    Ok(k.ncols() == (spec.q - 1) * spec.n)
}

/// Kalman condition plus, for every real eigenvalue of `A*`, a cone of
/// `[I_{q-1} ⊗ V*] B_r` that covers `±` every coordinate direction.
pub fn brammer_positive(spec: &ArraySpec, tol: &Tolerances) -> Result<bool> {
    if !kalman_reduced(spec, tol)? {
        return Ok(false);
    }
    let ctx = Context::new(spec, tol)?;
    let q1 = spec.q - 1;
    for c in ctx.spectrum.components.iter().filter(|c| c.is_real) {
        let v = real_part(&c.v);
        let g = identity(q1).kronecker(&v.transpose()) * &ctx.big.bred;
        let floor = tol.zero * fro(&ctx.big.bred);
        let dim = q1 * c.geo_mult;
        for j in 0..dim {
            for sign in [1.0, -1.0] {
                let mut e = DVector::zeros(dim);
                e[j] = sign;
                if !cone_member_real(&g, &e, tol.cone, floor)?.member {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Direct test `range W ⊇ range[(e_k - e_l) ⊗ I_n]` on the equilibrated
/// explicit stack.
pub fn pairwise_range(spec: &ArraySpec, k: usize, l: usize, tol: &Tolerances) -> Result<bool> {
    if k == 0 || l == 0 || k > spec.q || l > spec.q || k == l {
        return Err(Error::Domain(format!("invalid vertex pair ({k},{l}) for q = {}", spec.q)));
    }
    let big = build_big(spec)?;
    let w = real_part(&controllability_matrix(&big)?.m);
    let floor = tol.zero * fro(&big.bbig) * fro(&spec.a).max(1.0).powi(spec.n as i32 - 1);
    let t = pair_selector(spec.q, spec.n, k - 1, l - 1);
    Ok(range_includes(&w, &t, tol.rank, floor))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathQuery {
    Connected,
    StronglyConnected,
    /// 1-based pair.
    Kl(usize, usize),
    StronglyKl(usize, usize),
}

/// Edges `(i, j)` (0-based) of a unit incidence matrix, column `e_i - e_j`.
fn unit_edges(g: &RMat) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for (c, col) in g.column_iter().enumerate() {
        let mut plus = None;
        let mut minus = None;
        for (r, &x) in col.iter().enumerate() {
            match x {
                0.0 => {}
                1.0 if plus.is_none() => plus = Some(r),
                -1.0 if minus.is_none() => minus = Some(r),
                _ => return Err(Error::Domain(format!("column {} is not e_i - e_j", c + 1))),
            }
        }
        match (plus, minus) {
            (Some(i), Some(j)) => out.push((i, j)),
            _ => return Err(Error::Domain(format!("column {} is not e_i - e_j", c + 1))),
        }
    }
    Ok(out)
}

fn reach_from(q: usize, edges: &[(usize, usize)], start: usize, directed: bool) -> Vec<bool> {
    let mut seen = vec![false; q];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &(i, j) in edges {
            let next = if i == v {
                Some(j)
            } else if !directed && j == v {
                Some(i)
            } else {
                None
            };
            if let Some(w) = next {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    seen
}

/// Path-based answer for a `q × p` unit incidence matrix. Column
/// `e_i - e_j` is the arc `i → j`.
pub fn path_oracle(g: &RMat, query: PathQuery) -> Result<bool> {
    let q = g.nrows();
    let edges = unit_edges(g)?;
    let pair_ok = |k: usize, l: usize| k >= 1 && l >= 1 && k <= q && l <= q && k != l;
    Ok(match query {
        PathQuery::Connected => q > 0 && reach_from(q, &edges, 0, false).iter().all(|&s| s),
        PathQuery::StronglyConnected => (0..q).all(|v| reach_from(q, &edges, v, true).iter().all(|&s| s)),
        PathQuery::Kl(k, l) => {
            if !pair_ok(k, l) {
                return Err(Error::Domain(format!("invalid vertex pair ({k},{l})")));
            }
            reach_from(q, &edges, k - 1, false)[l - 1]
        }
        PathQuery::StronglyKl(k, l) => {
            if !pair_ok(k, l) {
                return Err(Error::Domain(format!("invalid vertex pair ({k},{l})")));
            }
            reach_from(q, &edges, k - 1, true)[l - 1] && reach_from(q, &edges, l - 1, true)[k - 1]
        }
    })
}

/// `N` Chebyshev–Lobatto points on `[0, horizon]`, endpoints included.
pub fn chebyshev_grid(horizon: f64, points: usize) -> Vec<f64> {
    if points < 2 {
        return vec![0.0];
    }
    (0..points)
        .map(|i| {
            let th = std::f64::consts::PI * i as f64 / (points - 1) as f64;
            0.5 * horizon * (1.0 - th.cos())
        })
        .collect()
}

/// Default falsifier grid: 64 points on `[0, 4 / max(1, max |Re µ|)]`.
pub fn default_grid(spec: &ArraySpec) -> Vec<f64> {
    let eig = eigenvalues(&spec.a);
    let re = eig.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    chebyshev_grid(4.0 / re.max(1.0), 64)
}

/// Unit-normalized rows of `B* e^{A* t}` over the grid, restricted to the
/// disagreement subspace through `E = D ⊗ I_n`.
fn polar_rows(spec: &ArraySpec, grid: &[f64], e: &RMat) -> Result<RMat> {
    let big = build_big(spec)?;
    let bt = big.bbig.transpose();
    let p = big.p;
    let mut stacked = RMat::zeros(grid.len() * p, e.ncols());
    for (i, &t) in grid.iter().enumerate() {
        let block = &bt * (big.abig.transpose() * t).exp() * e;
        stacked.view_mut((i * p, 0), (p, e.ncols())).copy_from(&block);
    }
    // rows as columns so the shared equilibration helper applies
    Ok(equilibrate_columns(&stacked.transpose(), 1e-12, 0.0).transpose())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolarWitness {
    /// `η` in stacked coordinates, unit norm.
    pub eta: Vec<f64>,
    /// 0-based attempt that found it.
    pub attempt: usize,
    /// Largest normalized entry of `B* e^{A* t} η` on the dense grid.
    pub max_violation: f64,
    /// `||[(e_k - e_l)* ⊗ I_n] η||`.
    pub pair_component: f64,
}

struct PolarCost<'a> {
    h: &'a RMat,
    p: &'a RMat,
    phase: u8,
}

impl PolarCost<'_> {
    fn parts(&self, u: &[f64]) -> (f64, f64, f64) {
        let z = DVector::from_column_slice(u);
        let n = z.norm();
        if n == 0.0 {
            return (f64::INFINITY, f64::INFINITY, 0.0);
        }
        let z = z / n;
        let hz = self.h * &z;
        let pos: f64 = hz.iter().map(|&x| x.max(0.0).powi(2)).sum();
        let top = hz.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (pos, top, (self.p * &z).norm())
    }
}

impl CostFunction for PolarCost<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, u: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        let (pos, top, pc) = self.parts(u);
        Ok(match self.phase {
            1 => pos - 0.1 * pc * pc,
            _ => {
                let top = if top.is_finite() { top } else { -1.0 };
                top + 10.0 * (0.15 - pc).max(0.0)
            }
        })
    }
}

fn nelder_mead(cost: PolarCost<'_>, start: &[f64], iters: u64) -> Vec<f64> {
    let dim = start.len();
    let mut simplex = vec![start.to_vec()];
    for i in 0..dim {
        let mut v = start.to_vec();
        v[i] += 0.5;
        simplex.push(v);
    }
    let solver = match NelderMead::new(simplex).with_sd_tolerance(1e-14) {
        Ok(s) => s,
        Err(_) => return start.to_vec(),
    };
    match Executor::new(cost, solver).configure(|s| s.max_iters(iters)).run() {
        Ok(res) => res.state().get_best_param().cloned().unwrap_or_else(|| start.to_vec()),
        Err(_) => start.to_vec(),
    }
}

/// Searches for `η` in the polar of the positively reachable set with a
/// nonzero `(k,l)` component. A validated witness refutes positive
/// `(k,l)`-controllability; finding none proves nothing.
pub fn polar_falsifier(
    spec: &ArraySpec,
    k: usize,
    l: usize,
    grid: &[f64],
    attempts: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Option<PolarWitness>> {
    if k == 0 || l == 0 || k > spec.q || l > spec.q || k == l {
        return Err(Error::Domain(format!("invalid vertex pair ({k},{l}) for q = {}", spec.q)));
    }
    let e = disagreement_block_basis(spec.q, spec.n)?;
    let h = polar_rows(spec, grid, &e)?;
    let horizon = grid.iter().copied().fold(0.0, f64::max);
    let dense = polar_rows(spec, &chebyshev_grid(horizon, grid.len().max(2) * 10), &e)?;
    let sel = pair_selector(spec.q, spec.n, k - 1, l - 1).transpose() * &e;
    let dim = e.ncols();
    let feasible_tol = tol.cone;
    let check = |m: &RMat, z: &DVector<f64>| {
        (m * z).iter().copied().fold(f64::NEG_INFINITY, f64::max)
    };
    for attempt in 0..attempts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt as u64);
        let start: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let u = nelder_mead(PolarCost { h: &h, p: &sel, phase: 1 }, &start, 400);
        let u = nelder_mead(PolarCost { h: &h, p: &sel, phase: 2 }, &u, 400);
        let z = DVector::from_vec(u);
        if z.norm() == 0.0 {
            continue;
        }
        let z = &z / z.norm();
        let pc = (&sel * &z).norm();
        if pc < 0.1 || check(&h, &z) > feasible_tol {
            continue;
        }
        let worst = check(&dense, &z);
        if worst > feasible_tol {
            continue;
        }
        let eta = &e * &z;
        return Ok(Some(PolarWitness {
            eta: eta.iter().copied().collect(),
            attempt,
            max_violation: if worst.is_finite() { worst } else { 0.0 },
            pair_component: pc,
        }));
    }
    Ok(None)
}

/// Targets `±(e_k - e_l) ⊗ e_b` for the positive reach simulator.
#[derive(Debug, Clone)]
pub struct ReachProblem {
    pub spec: ArraySpec,
    /// 1-based pair.
    pub pair: (usize, usize),
    pub horizon: f64,
    pub steps: usize,
    pub targets: Vec<DVector<f64>>,
}

impl ReachProblem {
    pub fn new(spec: &ArraySpec, k: usize, l: usize, horizon: f64, steps: usize) -> Result<Self> {
        if k == 0 || l == 0 || k > spec.q || l > spec.q || k == l {
            return Err(Error::Domain(format!("invalid vertex pair ({k},{l}) for q = {}", spec.q)));
        }
        if steps < 2 || horizon.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::Domain("reach problem needs steps >= 2 and horizon > 0".into()));
        }
        let sel = pair_selector(spec.q, spec.n, k - 1, l - 1);
        let mut targets = Vec::new();
        for b in 0..spec.n {
            for sign in [1.0, -1.0] {
                targets.push(sel.column(b) * sign);
            }
        }
        Ok(ReachProblem { spec: spec.clone(), pair: (k, l), horizon, steps, targets })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReachResult {
    pub target: Vec<f64>,
    pub residual: f64,
    pub hit: bool,
}

/// Piecewise-constant nonnegative inputs on `steps` equal intervals; the
/// interval integrals are exact (augmented matrix exponential).
pub fn reach_simulator(prob: &ReachProblem, tol_hit: f64) -> Result<Vec<ReachResult>> {
    let big = build_big(&prob.spec)?;
    let (dim, p) = (big.abig.nrows(), big.p);
    let dt = prob.horizon / prob.steps as f64;
    let mut aug = RMat::zeros(dim + p, dim + p);
    aug.view_mut((0, 0), (dim, dim)).copy_from(&(&big.abig * dt));
    aug.view_mut((0, dim), (dim, p)).copy_from(&(&big.bbig * dt));
    let ea = aug.exp();
    let phi = ea.view((0, 0), (dim, dim)).into_owned();
    let gamma = ea.view((0, dim), (dim, p)).into_owned();
    // block j acts on interval j; the last interval ends at the horizon
    let mut blocks = vec![gamma];
    for _ in 1..prob.steps {
        let next = &phi * blocks.last().expect("nonempty");
        blocks.push(next);
    }
    blocks.reverse();
    let refs: Vec<&RMat> = blocks.iter().collect();
    let k = hcat(&refs);
    prob.targets
        .iter()
        .map(|v| {
            let s = nnls(&k, v)?;
            Ok(ReachResult { target: v.iter().copied().collect(), residual: s.residual, hit: s.residual <= tol_hit })
        })
        .collect()
}

/// Settings for [`run_oracles`].
#[derive(Debug, Clone)]
pub struct OracleSettings {
    pub pairs: Vec<(usize, usize)>,
    pub samples: usize,
    pub horizon: f64,
    pub steps: usize,
    pub seed: u64,
    pub tol_hit: f64,
}

fn verdict(name: impl Into<String>, oracle: bool, theorem: Option<bool>, detail: String) -> OracleVerdict {
    OracleVerdict { name: name.into(), agrees: theorem.map(|t| t == oracle), detail, witness: None }
}

/// Runs every applicable oracle against the analysis verdicts.
pub fn run_oracles(ctx: &Context, settings: &OracleSettings) -> Result<Vec<OracleVerdict>> {
    let spec = &ctx.spec;
    let tol = &ctx.tol;
    let mut out = Vec::new();

    let ctrl = is_controllable(ctx)?.0;
    let kal = kalman_reduced(spec, tol)?;
    out.push(verdict("kalman_reduced", kal, Some(ctrl), format!("oracle={kal} theorem={ctrl}")));

    let pos = is_positively_controllable(ctx)?.0;
    let bram = brammer_positive(spec, tol)?;
    out.push(verdict("brammer_positive", bram, Some(pos), format!("oracle={bram} theorem={pos}")));

    let inc = spec.incidence();
    let unit = spec.n == 1 && unit_edges(&inc).is_ok();
    if unit {
        let g = GenGraph::from_real(spec.q, 1, &inc)?;
        let conn = is_connected(&g, tol.rank)?;
        let path = path_oracle(&inc, PathQuery::Connected)?;
        out.push(verdict("path_connected", path, Some(conn), format!("oracle={path} graph={conn}")));
        let strong = is_strongly_connected(&g, tol.cone)?.holds;
        let path = path_oracle(&inc, PathQuery::StronglyConnected)?;
        out.push(verdict("path_strongly_connected", path, Some(strong), format!("oracle={path} graph={strong}")));
    }

    for &(k, l) in &settings.pairs {
        let tag = format!("({k},{l})");
        let pw = is_pairwise_controllable(ctx, k, l)?.0;
        let pr = pairwise_range(spec, k, l, tol)?;
        out.push(verdict(format!("pairwise_range {tag}"), pr, Some(pw), format!("oracle={pr} theorem={pw}")));

        if unit {
            let g = GenGraph::from_real(spec.q, 1, &inc)?;
            let kl = is_kl_connected(&g, k, l, tol.rank)?;
            let path = path_oracle(&inc, PathQuery::Kl(k, l))?;
            out.push(verdict(format!("path_kl {tag}"), path, Some(kl), format!("oracle={path} graph={kl}")));
            let skl = is_strongly_kl_connected(&g, k, l, tol.cone)?.holds;
            let path = path_oracle(&inc, PathQuery::StronglyKl(k, l))?;
            out.push(verdict(format!("path_strong_kl {tag}"), path, Some(skl), format!("oracle={path} graph={skl}")));
        }

        let ppc = is_positive_pairwise_controllable(ctx, k, l)?;
        let unconditional_yes = ppc.holds && !ppc.conditional;
        let grid = default_grid(spec);
        let wit = polar_falsifier(spec, k, l, &grid, settings.samples, settings.seed, tol)?;
        let mut v = match &wit {
            Some(w) => OracleVerdict {
                name: format!("polar_falsifier {tag}"),
                agrees: if unconditional_yes { Some(false) } else if !ppc.holds { Some(true) } else { None },
                detail: format!("witness at attempt {} (pair component {:.4})", w.attempt, w.pair_component),
                witness: Some(w.eta.clone()),
            },
            None => OracleVerdict {
                name: format!("polar_falsifier {tag}"),
                agrees: None,
                detail: format!("no witness in {} attempts", settings.samples),
                witness: None,
            },
        };
        if let Some(w) = &mut v.witness {
            for x in w.iter_mut() {
                if x.abs() < 1e-12 {
                    *x = 0.0;
                }
            }
        }
        out.push(v);

        if ppc.holds {
            let prob = ReachProblem::new(spec, k, l, settings.horizon, settings.steps)?;
            let res = reach_simulator(&prob, settings.tol_hit)?;
            let worst = res.iter().map(|r| r.residual).fold(0.0, f64::max);
            let all = res.iter().all(|r| r.hit);
            out.push(OracleVerdict {
                name: format!("reach_simulator {tag}"),
                agrees: (!ppc.conditional).then_some(all),
                detail: format!("evidence: worst residual {worst:.3e} over {} targets", res.len()),
                witness: None,
            });
        }
    }
    Ok(out)
}
