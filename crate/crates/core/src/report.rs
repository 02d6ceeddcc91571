//! End-to-end analysis and its text / JSON renderings.

use std::fmt::Write as _;

use serde::Serialize;

use crate::array_model::ArraySpec;
use crate::controllability::{
    check_assumption_closed_structural, check_assumption_eigen, is_controllable,
    is_pairwise_controllable, is_positive_pairwise_controllable, is_positively_controllable,
    q_graphs_and_index_sets, Assumption1, Assumption2, Context, EigGraphVerdict, GraphKind,
    IndexRecursionTrace,
};
use crate::error::Result;
use crate::linalg::C64;
use crate::tolerances::Tolerances;

pub const REPORT_VERSION: u32 = 1;

/// JSON schema of the report document.
pub const REPORT_SCHEMA: &str = include_str!("../schema/report-v1.json");

/// `x` rounded to nine significant digits; `-0` becomes `0`.
pub fn round9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { 0.0 } else { x };
    }
    let r: f64 = format!("{:.8e}", x).parse().unwrap_or(x);
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

/// Both parts rounded to nine significant digits of `|z|`, so rounding
/// noise in a negligible part disappears.
pub fn round9_complex(z: C64) -> C64 {
    let m = z.norm();
    if m == 0.0 || !m.is_finite() {
        return C64::new(round9(z.re), round9(z.im));
    }
    let quantum = 10f64.powi(m.log10().floor() as i32 - 8);
    let snap = |x: f64| round9((x / quantum).round() * quantum);
    C64::new(snap(z.re), snap(z.im))
}

impl From<C64> for ComplexJson {
    fn from(z: C64) -> Self {
        let r = round9_complex(z);
        ComplexJson { re: r.re, im: r.im }
    }
}

pub fn fmt_mu(z: C64) -> String {
    let r = round9_complex(z);
    let (re, im) = (r.re, r.im);
    if im == 0.0 {
        format!("{re}")
    } else {
        let sign = if im < 0.0 { '-' } else { '+' };
        format!("{re}{sign}{}j", im.abs())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpecEcho {
    pub name: Option<String>,
    pub n: usize,
    pub q: usize,
    pub p: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: IncidenceEcho,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncidenceEcho {
    pub incidence: Vec<Vec<f64>>,
}

impl SpecEcho {
    pub fn from_spec(spec: &ArraySpec) -> Self {
        let rows = |m: &crate::linalg::RMat| -> Vec<Vec<f64>> {
            m.row_iter().map(|r| r.iter().copied().collect()).collect()
        };
        SpecEcho {
            name: spec.name.clone(),
            n: spec.n,
            q: spec.q,
            p: spec.p,
            a: rows(&spec.a),
            b: IncidenceEcho { incidence: rows(&spec.incidence()) },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub kappa: usize,
    pub mu: ComplexJson,
    pub alg_mult: usize,
    pub geo_mult: usize,
    pub is_real: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphRow {
    pub kappa: usize,
    pub mu: ComplexJson,
    pub graph_kind: GraphKind,
    pub pair: Option<[usize; 2]>,
    pub connected: Option<bool>,
    pub strongly_connected: Option<bool>,
    pub kl_connected: Option<bool>,
    pub strongly_kl_connected: Option<bool>,
    pub marginal: bool,
}

impl From<&EigGraphVerdict> for GraphRow {
    fn from(v: &EigGraphVerdict) -> Self {
        GraphRow {
            kappa: v.kappa,
            mu: v.mu.into(),
            graph_kind: v.graph_kind,
            pair: v.pair.map(|(k, l)| [k, l]),
            connected: v.connected,
            strongly_connected: v.strongly_connected,
            kl_connected: v.kl_connected,
            strongly_kl_connected: v.strongly_kl_connected,
            marginal: v.marginal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairVerdict {
    pub pair: [usize; 2],
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivePairVerdict {
    pub pair: [usize; 2],
    pub holds: bool,
    pub conditional: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdicts {
    pub controllable: bool,
    pub positively_controllable: bool,
    pub pairwise: Vec<PairVerdict>,
    pub positive_pairwise: Vec<PositivePairVerdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub report_version: u32,
    pub spec: SpecEcho,
    pub tolerances: Tolerances,
    pub spectrum: Vec<SpectrumRow>,
    pub eigen_graphs: Vec<GraphRow>,
    pub verdicts: Verdicts,
    pub index_recursion: IndexRecursionTrace,
    pub assumption1: Assumption1,
    pub assumption2: Assumption2,
    pub caveats: Vec<String>,
}

/// Runs every analysis; pairwise analyses only for the requested 1-based
/// pairs, in the order given.
pub fn analyze(spec: &ArraySpec, tol: &Tolerances, pairs: &[(usize, usize)]) -> Result<AnalysisReport> {
    let ctx = Context::new(spec, tol)?;
    let (controllable, _) = is_controllable(&ctx)?;
    let (positively_controllable, base_rows) = is_positively_controllable(&ctx)?;
    let mut rows: Vec<GraphRow> = base_rows.iter().map(GraphRow::from).collect();
    let mut caveats = Vec::new();
    let mut pairwise = Vec::new();
    let mut positive_pairwise = Vec::new();

    for &(k, l) in pairs {
        let (holds, pw_rows) = is_pairwise_controllable(&ctx, k, l)?;
        pairwise.push(PairVerdict { pair: [k, l], holds });
        let v_rows: Vec<_> = pw_rows.iter().filter(|r| r.graph_kind == GraphKind::V).collect();
        if !holds && !v_rows.is_empty() && v_rows.iter().all(|r| r.kl_connected == Some(true)) {
            caveats.push(format!(
                "every eigenvector graph is ({k},{l})-connected although the array is not ({k},{l})-controllable; generalized eigenvectors matter here"
            ));
        }
        rows.extend(pw_rows.iter().map(GraphRow::from));
        let ppc = is_positive_pairwise_controllable(&ctx, k, l)?;
        positive_pairwise.push(PositivePairVerdict { pair: [k, l], holds: ppc.holds, conditional: ppc.conditional });
        rows.extend(ppc.rows.iter().map(GraphRow::from));
    }

    let kind_rank = |k: GraphKind| match k {
        GraphKind::V => 0,
        GraphKind::W => 1,
        GraphKind::Q => 2,
    };
    let pair_rank = |p: Option<[usize; 2]>| p.map(|[k, l]| pairs.iter().position(|&x| x == (k, l)).unwrap_or(0) + 1);
    rows.sort_by_key(|r| (r.kappa, pair_rank(r.pair), kind_rank(r.graph_kind)));

    let (_, index_recursion) = q_graphs_and_index_sets(&ctx)?;
    let assumption1 = check_assumption_eigen(&ctx);
    let assumption2 = check_assumption_closed_structural(spec, tol.zero);
    if let Assumption1::Violated { kappas } = &assumption1 {
        caveats.push(format!(
            "non-real eigenvalues at kappa={kappas:?} share their real part with a real eigenvalue and are defective; positive pairwise verdicts may be unsound"
        ));
    }
    if !pairs.is_empty() && assumption2 == Assumption2::Unverified {
        caveats.push(
            "closedness of the positively reachable set is not structurally verified; positive pairwise verdicts are conditional"
                .into(),
        );
    }
    caveats.push("edge weights of the eigenvalue graphs depend on the chosen eigenspace bases; the verdicts do not".into());
    for r in rows.iter().filter(|r| r.marginal) {
        caveats.push(format!(
            "cone membership residual within ten times the tolerance at kappa={} ({:?})",
            r.kappa, r.graph_kind
        ));
    }

    let spectrum = ctx
        .spectrum
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| SpectrumRow {
            kappa: i + 1,
            mu: c.mu.into(),
            alg_mult: c.alg_mult,
            geo_mult: c.geo_mult,
            is_real: c.is_real,
        })
        .collect();

    Ok(AnalysisReport {
        report_version: REPORT_VERSION,
        spec: SpecEcho::from_spec(spec),
        tolerances: *tol,
        spectrum,
        eigen_graphs: rows,
        verdicts: Verdicts { controllable, positively_controllable, pairwise, positive_pairwise },
        index_recursion,
        assumption1,
        assumption2,
        caveats,
    })
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "YES"
    } else {
        "NO"
    }
}

fn cell(v: Option<bool>, yes: &str, no: &str) -> String {
    match v {
        Some(true) => yes.into(),
        Some(false) => no.into(),
        None => "-".into(),
    }
}

fn strong_cell(row: Option<&GraphRow>, pick: impl Fn(&GraphRow) -> Option<bool>) -> String {
    let Some(r) = row else { return "-".into() };
    let base = cell(pick(r), "yes", "no");
    if r.marginal {
        format!("{base} (marginal)")
    } else {
        base
    }
}

impl AnalysisReport {
    fn row(&self, kappa: usize, kind: GraphKind, pair: Option<[usize; 2]>) -> Option<&GraphRow> {
        self.eigen_graphs.iter().find(|r| r.kappa == kappa && r.graph_kind == kind && r.pair == pair)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let name = self.spec.name.as_deref().unwrap_or("array");
        let _ = writeln!(s, "array: {name} (n={}, q={}, p={})", self.spec.n, self.spec.q, self.spec.p);

        let _ = writeln!(s, "\neigenvalues and V-graphs:");
        let _ = writeln!(s, "  {:>3}  {:<28} {:>3} {:>3}  {:<14} {}", "k", "mu", "alg", "geo", "V-graph", "strong");
        for r in &self.spectrum {
            let v = self.row(r.kappa, GraphKind::V, None);
            let conn = cell(v.and_then(|v| v.connected), "connected", "not connected");
            let strong = strong_cell(v, |v| v.strongly_connected);
            let _ = writeln!(
                s,
                "  {:>3}  {:<28} {:>3} {:>3}  {:<14} {}",
                r.kappa,
                fmt_mu(C64::new(r.mu.re, r.mu.im)),
                r.alg_mult,
                r.geo_mult,
                conn,
                strong
            );
        }
        for v in &self.verdicts.pairwise {
            let pair = Some(v.pair);
            let _ = writeln!(s, "\npair ({},{}):", v.pair[0], v.pair[1]);
            let _ = writeln!(s, "  {:>3}  {:<14} {:<14} {:<14} {}", "k", "W-graph", "V-graph", "Q-graph", "Q strong");
            for r in &self.spectrum {
                let w = self.row(r.kappa, GraphKind::W, pair);
                let vv = self.row(r.kappa, GraphKind::V, pair);
                let qq = self.row(r.kappa, GraphKind::Q, pair);
                let _ = writeln!(
                    s,
                    "  {:>3}  {:<14} {:<14} {:<14} {}",
                    r.kappa,
                    cell(w.and_then(|g| g.kl_connected), "connected", "not connected"),
                    cell(vv.and_then(|g| g.kl_connected), "connected", "not connected"),
                    cell(qq.and_then(|g| g.kl_connected), "connected", "not connected"),
                    strong_cell(qq, |g| g.strongly_kl_connected)
                );
            }
        }
        // trailing spaces from the fixed-width grid are noise
        s = s.lines().map(|l| l.trim_end()).collect::<Vec<_>>().join("\n") + "\n";

        let _ = writeln!(s, "\nindex recursion:");
        for st in &self.index_recursion.steps {
            let lin = st.lineality_dim.map(|d| d.to_string()).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                s,
                "  k={:<3} inputs={:?} removed={:?} lineality_dim={}",
                st.kappa, st.index_set, st.removed, lin
            );
        }
        let a1 = match &self.assumption1 {
            Assumption1::Holds => "holds".to_string(),
            Assumption1::Violated { kappas } => format!("violated at kappa={kappas:?}"),
        };
        let a2 = match self.assumption2 {
            Assumption2::StructurallyVerified => "structurally verified",
            Assumption2::Unverified => "unverified",
        };
        let _ = writeln!(s, "assumption1: {a1}");
        let _ = writeln!(s, "assumption2: {a2}");

        let _ = writeln!(s, "\ncontrollable: {}", yes_no(self.verdicts.controllable));
        let _ = writeln!(s, "positively controllable: {}", yes_no(self.verdicts.positively_controllable));
        for v in &self.verdicts.pairwise {
            let _ = writeln!(s, "pairwise ({},{}): {}", v.pair[0], v.pair[1], yes_no(v.holds));
        }
        for v in &self.verdicts.positive_pairwise {
            let cond = if v.conditional { " (conditional)" } else { "" };
            let _ = writeln!(s, "positive ({},{}): {}{cond}", v.pair[0], v.pair[1], yes_no(v.holds));
        }
        if !self.caveats.is_empty() {
            let _ = writeln!(s, "\ncaveats:");
            for c in &self.caveats {
                let _ = writeln!(s, "  - {c}");
            }
        }
        s
    }
}
