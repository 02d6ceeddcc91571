//! Command-line front end: `analyze`, `examples` and `oracle`.
//!
//! Exit codes: 0 success, 1 parse or validation error, 2 numerical failure,
//! 3 oracle disagreement.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::array_model::ArraySpec;
use crate::controllability::{q_graphs_and_index_sets, v_graphs, w_graphs, Context, GraphKind};
use crate::corpus;
use crate::error::{Error, Result};
use crate::genographe::{detect_scalar_edges, to_dot};
use crate::linalg::RMat;
use crate::oracle::{run_oracles, OracleSettings};
use crate::report::analyze;
use crate::tolerances::{ToleranceOverrides, Tolerances};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_NUMERICAL: u8 = 2;
pub const EXIT_DISAGREE: u8 = 3;

/// `B` as either per-system blocks or the stacked incidence matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<Vec<Vec<f64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub incidence: Option<Vec<Vec<f64>>>,
}

/// On-disk JSON form of an array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n: usize,
    pub q: usize,
    pub p: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: InputSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
}

fn rows_of(m: &RMat) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn matrix(rows: &[Vec<f64>], nrows: usize, ncols: usize, what: &str) -> Result<RMat> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Parse(format!("{what} must be {nrows}x{ncols}")));
    }
    Ok(RMat::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

impl SpecFile {
    pub fn from_spec(spec: &ArraySpec) -> Self {
        SpecFile {
            name: spec.name.clone(),
            n: spec.n,
            q: spec.q,
            p: spec.p,
            a: rows_of(&spec.a),
            b: InputSpec { blocks: None, incidence: Some(rows_of(&spec.incidence())) },
            tolerances: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_spec(&self) -> Result<ArraySpec> {
        let (n, q, p) = (self.n, self.q, self.p);
        if n == 0 || q < 2 || p == 0 {
            return Err(Error::Parse(format!("need n >= 1, q >= 2, p >= 1; got n={n}, q={q}, p={p}")));
        }
        let a = matrix(&self.a, n, n, "A")?;
        let spec = match (&self.b.blocks, &self.b.incidence) {
            (Some(blocks), None) => {
                if blocks.len() != q {
                    return Err(Error::Parse(format!("B.blocks has {} systems, expected q={q}", blocks.len())));
                }
                let mut out = Vec::with_capacity(q);
                for (i, row) in blocks.iter().enumerate() {
                    if row.len() != p {
                        return Err(Error::Parse(format!("B.blocks[{}] has {} inputs, expected p={p}", i + 1, row.len())));
                    }
                    let mut cols = Vec::with_capacity(p);
                    for (s, v) in row.iter().enumerate() {
                        if v.len() != n {
                            return Err(Error::Parse(format!(
                                "B.blocks[{}][sigma={}] has length {}, expected n={n}",
                                i + 1,
                                s + 1,
                                v.len()
                            )));
                        }
                        cols.push(DVector::from_column_slice(v));
                    }
                    out.push(cols);
                }
                ArraySpec::from_blocks(a, out)
            }
            (None, Some(inc)) => ArraySpec::from_incidence(a, &matrix(inc, q * n, p, "B.incidence")?, q)?,
            _ => return Err(Error::Parse("B needs exactly one of \"blocks\" or \"incidence\"".into())),
        };
        Ok(match &self.name {
            Some(name) => spec.with_name(name.clone()),
            None => spec,
        })
    }
}

/// Reads a spec file and returns the array with its effective tolerances.
pub fn load_spec(path: &Path, flags: &ToleranceOverrides) -> Result<(ArraySpec, Tolerances)> {
    let text = fs::read_to_string(path)?;
    let file = SpecFile::parse(&text)?;
    let tol = Tolerances::default().apply(&file.tolerances.unwrap_or_default()).apply(flags);
    Ok((file.to_spec()?, tol))
}

#[derive(Debug, Parser)]
#[command(name = "relact", version, about = "Controllability of arrays of linear systems with relative actuators")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analyze a spec file and print the verdict grid.
    Analyze(AnalyzeArgs),
    /// Write one of the built-in arrays as a spec file.
    Examples {
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cross-check the analysis against independent oracles.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
struct TolFlags {
    #[arg(long)]
    tol_rank: Option<f64>,
    #[arg(long)]
    tol_cone: Option<f64>,
    #[arg(long)]
    tol_eig: Option<f64>,
    #[arg(long)]
    tol_zero: Option<f64>,
}

impl TolFlags {
    fn overrides(&self) -> ToleranceOverrides {
        ToleranceOverrides { rank: self.tol_rank, cone: self.tol_cone, eig: self.tol_eig, zero: self.tol_zero }
    }
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    path: PathBuf,
    /// Vertex pair (1-based); repeatable.
    #[arg(long = "pair", num_args = 2, value_names = ["K", "L"], action = clap::ArgAction::Append)]
    pair: Vec<usize>,
    #[arg(long)]
    json: bool,
    /// Directory for DOT files of the scalar-edge graphs.
    #[arg(long)]
    dot: Option<PathBuf>,
    #[command(flatten)]
    tol: TolFlags,
}

#[derive(Debug, Args)]
struct OracleArgs {
    path: PathBuf,
    #[arg(long = "pair", num_args = 2, value_names = ["K", "L"], action = clap::ArgAction::Append)]
    pair: Vec<usize>,
    /// Falsifier restarts per pair.
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long, default_value_t = 5.0)]
    horizon: f64,
    #[arg(long, default_value_t = 60)]
    steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    tol: TolFlags,
}

fn pairs(flat: &[usize]) -> Vec<(usize, usize)> {
    flat.chunks_exact(2).map(|c| (c[0], c[1])).collect()
}

fn exit_for(e: &Error) -> u8 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_INPUT
    }
}

fn write_dots(ctx: &Context, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let name = ctx.spec.name.clone().unwrap_or_else(|| "array".into());
    let labels: Vec<String> = (1..=ctx.spec.q).map(|i| i.to_string()).collect();
    let families = [
        (GraphKind::V, v_graphs(ctx)?),
        (GraphKind::W, w_graphs(ctx)?),
        (GraphKind::Q, q_graphs_and_index_sets(ctx)?.0),
    ];
    for (kind, graphs) in families {
        for (i, g) in graphs.iter().enumerate() {
            if detect_scalar_edges(g, ctx.tol.zero).is_none() {
                continue;
            }
            let text = to_dot(g, &labels, ctx.tol.zero)?;
            fs::write(dir.join(format!("{name}_{}_k{}.dot", kind.tag(), i + 1)), text)?;
        }
    }
    Ok(())
}

fn cmd_analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> Result<()> {
    let (spec, tol) = load_spec(&args.path, &args.tol.overrides())?;
    let report = analyze(&spec, &tol, &pairs(&args.pair))?;
    if let Some(dir) = &args.dot {
        write_dots(&Context::new(&spec, &tol)?, dir)?;
    }
    let text = if args.json { report.to_json() } else { report.to_text() };
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn cmd_examples(name: &str, path: &Path) -> Result<()> {
    let spec = corpus::by_name(name).ok_or_else(|| {
        Error::Parse(format!("unknown example {name:?}; available: {}", corpus::NAMES.join(", ")))
    })?;
    let text = serde_json::to_string_pretty(&SpecFile::from_spec(&spec)).expect("spec serializes") + "\n";
    fs::write(path, text)?;
    Ok(())
}

fn cmd_oracle(args: &OracleArgs, out: &mut dyn Write) -> Result<bool> {
    let (spec, tol) = load_spec(&args.path, &args.tol.overrides())?;
    let ctx = Context::new(&spec, &tol)?;
    let settings = OracleSettings {
        pairs: pairs(&args.pair),
        samples: args.samples,
        horizon: args.horizon,
        steps: args.steps,
        seed: args.seed,
        tol_hit: 1e-6,
    };
    for &(k, l) in &settings.pairs {
        if k == 0 || l == 0 || k > spec.q || l > spec.q || k == l {
            return Err(Error::Domain(format!("invalid vertex pair ({k},{l}) for q = {}", spec.q)));
        }
    }
    let verdicts = run_oracles(&ctx, &settings)?;
    let all_agree = verdicts.iter().all(|v| v.agrees != Some(false));
    if args.json {
        let text = serde_json::to_string_pretty(&verdicts).expect("verdicts serialize") + "\n";
        out.write_all(text.as_bytes())?;
    } else {
        let width = verdicts.iter().map(|v| v.name.len()).max().unwrap_or(6).max(6);
        writeln!(out, "{:<width$}  {:<8}  detail", "oracle", "agrees")?;
        for v in &verdicts {
            let mark = match v.agrees {
                Some(true) => "yes",
                Some(false) => "NO",
                None => "n/a",
            };
            writeln!(out, "{:<width$}  {:<8}  {}", v.name, mark, v.detail)?;
        }
        writeln!(out, "{}", if all_agree { "all oracles agree" } else { "DISAGREEMENT" })?;
    }
    Ok(all_agree)
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.cmd {
        Command::Analyze(a) => cmd_analyze(a, out).map(|_| EXIT_OK),
        Command::Examples { name, out: path } => cmd_examples(name, path).map(|_| EXIT_OK),
        Command::Oracle(a) => cmd_oracle(a, out).map(|ok| if ok { EXIT_OK } else { EXIT_DISAGREE }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_for(&e)
        }
    }
}

pub fn main() -> std::process::ExitCode {
    let code = run(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::ExitCode::from(code)
}
