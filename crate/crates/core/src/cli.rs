//! Command-line front end: argument parsing, grid-function files, command
//! dispatch and the JSON report.
//!
//! Grid functions are read from CSV or JSON:
//!
//! * CSV: the first row holds the s-axis points after an empty corner
//!   cell, every following row starts with a t-axis point and continues
//!   with `f(s_i, t)` for each `s_i`.
//! * JSON: `{"xs": [...], "ys": [...], "values": [[...], ...]}` with
//!   `values[j][i] = f(xs[i], ys[j])`.
//!
//! Exit codes: 0 when every check is consistent with the theory (expected
//! counterexamples included), 1 when a guaranteed inequality fails, 2 on
//! usage or parse errors, 3 when a search cap is exceeded.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::controls::{
    almost_subadd_check, almost_subadd_sweep, check_superadditive, control_from_cpvar,
    dominates_increments, table_from_vp, ControlTable,
};
use crate::error::{Error, Result};
use crate::fbm::{
    fbm_cov, fbm_rect_cov, fbm_variation_scan, neg_correlation_check, superadditivity_counterexample,
    HurstKernel, DEFAULT_POINTS_PER_UNIT,
};
use crate::geometry::{enumerate_rect_partitions, validate_partition, Dissection, Limits, Rect, RectPartition};
use crate::gridfunc::GridFunction;
use crate::random;
use crate::report::{InequalityReport, Tolerance};
use crate::variation::{controlled_pvar_exact, evaluate_witness, sandwich_constant_parts, verify_sandwich, vp_2d_alternating, vp_2d_exact};
use crate::young::{crucial_lemma_check, verify_young_1d, verify_yt_2d, ExponentTriple};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Parser, Clone, Debug, Serialize)]
#[command(name = "pvar2d", version, about = "Two-parameter p-variation and its inequalities")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Cell cap for rectangulation enumeration.
    #[arg(long, global = true, env = "PVAR2D_MAX_CELLS", default_value_t = Limits::DEFAULT_MAX_CELLS)]
    pub max_cells: usize,

    /// Interior-point cap per axis for exact grid-like variation.
    #[arg(long, global = true, env = "PVAR2D_MAX_INTERIOR", default_value_t = Limits::DEFAULT_MAX_INTERIOR)]
    pub max_interior: usize,

    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol_abs: f64,

    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol_rel: f64,

    /// Seed for randomly generated inputs.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Leave out the timing record, making reports byte-comparable.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub no_timing: bool,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct GridInput {
    /// Grid function file (.csv or .json). A random grid is used when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Cells per axis of the random grid.
    #[arg(long, default_value_t = 3)]
    pub cells: usize,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct Exponents {
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    /// Symmetric exponents `p = q = 2 / theta`.
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlKind {
    /// `R -> |f|^p_{p-var; R}`
    Cpvar,
    /// `R -> V_p(f; R)^p`
    Vp,
    /// `R -> area(R)`
    Area,
}

#[derive(Subcommand, Clone, Debug, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Grid-like variation V_p.
    Vp {
        #[command(flatten)]
        grid: GridInput,
        #[arg(long)]
        p: f64,
        /// Sub-rectangle `a,b,c,d` (defaults to the whole grid).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        rect: Option<Vec<f64>>,
        /// Use coordinate ascent (a lower bound) instead of the exact search.
        #[arg(long)]
        heuristic: bool,
    },
    /// Controlled p-variation over all rectangulations.
    Cvp {
        #[command(flatten)]
        grid: GridInput,
        #[arg(long)]
        p: f64,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        rect: Option<Vec<f64>>,
    },
    /// Sandwich between controlled and grid-like variation.
    Sandwich {
        #[command(flatten)]
        grid: GridInput,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        eps: f64,
    },
    /// Super-additivity and domination checks for a rectangle function.
    CheckControl {
        #[command(flatten)]
        grid: GridInput,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, value_enum, default_value_t = ControlKind::Cpvar)]
        kind: ControlKind,
    },
    /// Almost-subadditivity of `|f|^p_{p-var}`; every split unless `--split a,b,s,t,u` is given.
    AlmostSubadd {
        #[command(flatten)]
        grid: GridInput,
        #[arg(long)]
        p: f64,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        split: Option<Vec<f64>>,
    },
    /// Young's maximal inequality for paths.
    Young1d {
        #[command(flatten)]
        exps: Exponents,
        /// Integrand samples, comma separated; must start at 0.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        y: Option<Vec<f64>>,
        /// Integrator samples, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Option<Vec<f64>>,
        /// Length of random paths when --x/--y are absent.
        #[arg(long, default_value_t = 8)]
        len: usize,
    },
    /// Young-Towghi maximal inequality for grid functions.
    Young2d {
        #[command(flatten)]
        exps: Exponents,
        /// Integrator file; random when absent.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Integrand file (must vanish on the axes); random when absent.
        #[arg(long)]
        integrand: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        cells: usize,
    },
    /// Dual step-function bound for a partition.
    CrucialLemma {
        #[command(flatten)]
        grid: GridInput,
        #[arg(long)]
        p: f64,
        /// JSON partition `{"target": {...}, "rects": [...]}`; random when absent.
        #[arg(long)]
        partition: Option<PathBuf>,
    },
    /// fBM covariance values and the negative-correlation check.
    FbmCov {
        #[arg(long = "H")]
        h: f64,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        rect: Option<Vec<f64>>,
        /// Right end of the uniform grid `[0, T]` for the correlation check.
        #[arg(long = "T", default_value_t = 2.0)]
        t_end: f64,
        #[arg(long, default_value_t = 9)]
        points: usize,
    },
    /// V_{1/(2H)} of the fBM covariance on squares of growing resolution.
    FbmScan {
        #[arg(long = "H")]
        h: f64,
        #[arg(long, default_value_t = 0.0)]
        s: f64,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, value_delimiter = ',', default_values_t = vec![4, 6, 8, 10])]
        sizes: Vec<usize>,
    },
    /// Failure of super-additivity for V_p^p of the fBM covariance.
    FbmCounterexample {
        #[arg(long = "H")]
        h: f64,
        #[arg(long, default_value_t = DEFAULT_POINTS_PER_UNIT)]
        points_per_unit: usize,
    },
    /// Count (and optionally list) rectangulations of a cell grid.
    EnumeratePartitions {
        #[arg(long)]
        nx: usize,
        #[arg(long)]
        ny: usize,
        #[arg(long)]
        list: bool,
    },
    /// Randomized property suite.
    Selftest {
        /// Random instances per property.
        #[arg(long, default_value_t = 5)]
        cases: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Vp { .. } => "vp",
            Command::Cvp { .. } => "cvp",
            Command::Sandwich { .. } => "sandwich",
            Command::CheckControl { .. } => "check-control",
            Command::AlmostSubadd { .. } => "almost-subadd",
            Command::Young1d { .. } => "young1d",
            Command::Young2d { .. } => "young2d",
            Command::CrucialLemma { .. } => "crucial-lemma",
            Command::FbmCov { .. } => "fbm-cov",
            Command::FbmScan { .. } => "fbm-scan",
            Command::FbmCounterexample { .. } => "fbm-counterexample",
            Command::EnumeratePartitions { .. } => "enumerate-partitions",
            Command::Selftest { .. } => "selftest",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    /// Whether failed checks contradict a proven bound (as opposed to
    /// exploratory checks that may legitimately fail).
    pub guaranteed: bool,
    pub passed: bool,
    pub checks: Vec<InequalityReport>,
    pub data: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.passed || !self.guaranteed {
            EXIT_OK
        } else {
            EXIT_VIOLATION
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::CapExceeded { .. } => EXIT_CAP,
        _ => EXIT_USAGE,
    }
}

#[derive(Deserialize, Serialize)]
struct GridJson {
    xs: Vec<f64>,
    ys: Vec<f64>,
    values: Vec<Vec<f64>>,
}

fn is_json(path: &Path, text: &str) -> bool {
    match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("json") => true,
        Some(e) if e.eq_ignore_ascii_case("csv") => false,
        _ => text.trim_start().starts_with('{'),
    }
}

fn parse_float(field: &str, line: usize, column: usize) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|e| Error::Parse {
        line,
        column,
        message: format!("{e} in {field:?}"),
    })
}

fn grid_from_rows(xs: Vec<f64>, ys: Vec<f64>, rows: Vec<Vec<f64>>) -> Result<GridFunction> {
    // rows[j][i] = f(xs[i], ys[j])
    if rows.len() != ys.len() {
        return Err(Error::Dimension(format!(
            "{} value rows for {} t-axis points",
            rows.len(),
            ys.len()
        )));
    }
    for (j, row) in rows.iter().enumerate() {
        if row.len() != xs.len() {
            return Err(Error::Dimension(format!(
                "value row {j} has {} entries for {} s-axis points",
                row.len(),
                xs.len()
            )));
        }
    }
    let table: Vec<Vec<f64>> = (0..xs.len()).map(|i| rows.iter().map(|r| r[i]).collect()).collect();
    GridFunction::new(Dissection::new(xs)?, Dissection::new(ys)?, table)
}

pub fn parse_grid_csv(text: &str) -> Result<GridFunction> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut xs = None;
    let mut ys = Vec::new();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::Parse {
                line,
                column: 1,
                message: e.to_string(),
            }
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        match xs {
            None => {
                if !rec.get(0).is_some_and(|f| f.is_empty()) {
                    return Err(Error::Parse {
                        line,
                        column: 1,
                        message: "header row must start with an empty corner cell".into(),
                    });
                }
                let pts = rec
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, f)| parse_float(f, line, k + 1))
                    .collect::<Result<Vec<_>>>()?;
                xs = Some(pts);
            }
            Some(_) => {
                let mut fields = rec.iter().enumerate();
                let (_, t) = fields.next().expect("non-empty record");
                ys.push(parse_float(t, line, 1)?);
                rows.push(fields.map(|(k, f)| parse_float(f, line, k + 1)).collect::<Result<Vec<_>>>()?);
            }
        }
    }
    let xs = xs.ok_or_else(|| Error::Parse {
        line: 1,
        column: 1,
        message: "empty grid file".into(),
    })?;
    grid_from_rows(xs, ys, rows)
}

pub fn parse_grid_json(text: &str) -> Result<GridFunction> {
    let g: GridJson = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    grid_from_rows(g.xs, g.ys, g.values)
}

/// Read a grid function from CSV or JSON, chosen by extension (or by
/// content when the extension is neither).
pub fn load_grid_function(path: &Path) -> Result<GridFunction> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    if is_json(path, &text) {
        parse_grid_json(&text)
    } else {
        parse_grid_csv(&text)
    }
}

pub fn grid_to_csv(f: &GridFunction) -> String {
    let mut out = String::new();
    for s in f.xs().points() {
        out.push(',');
        out.push_str(&s.to_string());
    }
    out.push('\n');
    for (j, t) in f.ys().points().iter().enumerate() {
        out.push_str(&t.to_string());
        for i in 0..f.nx() {
            out.push(',');
            out.push_str(&f.value(i, j).to_string());
        }
        out.push('\n');
    }
    out
}

pub fn grid_to_json(f: &GridFunction) -> String {
    let g = GridJson {
        xs: f.xs().points().to_vec(),
        ys: f.ys().points().to_vec(),
        values: (0..f.ny()).map(|j| (0..f.nx()).map(|i| f.value(i, j)).collect()).collect(),
    };
    let mut s = serde_json::to_string(&g).expect("grid serializes");
    s.push('\n');
    s
}

/// Write a grid function as JSON when the extension is `.json`, CSV otherwise.
pub fn save_grid_function(f: &GridFunction, path: &Path) -> Result<()> {
    let json = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let text = if json { grid_to_json(f) } else { grid_to_csv(f) };
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

struct Ctx {
    limits: Limits,
    tol: Tolerance,
    rng: random::SuiteRng,
}

impl Ctx {
    fn grid(&mut self, g: &GridInput) -> Result<GridFunction> {
        match &g.input {
            Some(path) => load_grid_function(path),
            None => random::grid_function(&mut self.rng, g.cells, g.cells),
        }
    }
}

fn rect_from(v: &[f64]) -> Result<Rect> {
    match v {
        [a, b, c, d] => Rect::new(*a, *b, *c, *d),
        _ => Err(Error::Usage(format!("--rect takes a,b,c,d (got {} values)", v.len()))),
    }
}

fn rect_arg(f: &GridFunction, rect: &Option<Vec<f64>>) -> Result<Rect> {
    match rect {
        None => Ok(f.domain()),
        Some(v) => rect_from(v),
    }
}

fn exponent_triple(e: &Exponents) -> Result<ExponentTriple> {
    let base = match (e.p, e.q, e.theta) {
        (Some(p), Some(q), None) => ExponentTriple::new(p, q)?,
        (None, None, Some(theta)) => ExponentTriple::symmetric(theta)?,
        _ => return Err(Error::Usage("give either --p and --q, or --theta".into())),
    };
    match e.alpha {
        Some(a) => base.with_alpha(a),
        None => Ok(base),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

/// Outcome of one command before it is wrapped in a [`Report`].
struct Outcome {
    guaranteed: bool,
    checks: Vec<InequalityReport>,
    data: Value,
}

impl Outcome {
    fn data(data: Value) -> Self {
        Outcome {
            guaranteed: true,
            checks: Vec::new(),
            data,
        }
    }

    fn checks(checks: Vec<InequalityReport>, data: Value) -> Self {
        Outcome {
            guaranteed: true,
            checks,
            data,
        }
    }
}

/// Run the configured command.
pub fn run(config: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let limits = Limits::new(config.max_cells, config.max_interior)?;
    if !(config.tol_abs >= 0.0 && config.tol_rel >= 0.0) {
        return Err(Error::Usage("tolerances must be nonnegative".into()));
    }
    let mut ctx = Ctx {
        limits,
        tol: Tolerance::new(config.tol_abs, config.tol_rel),
        rng: random::rng(config.seed),
    };
    let out = dispatch(&config.command, &mut ctx)?;
    let passed = out.checks.iter().all(|c| c.passed());
    Ok(Report {
        command: config.command.name().to_string(),
        config: config.clone(),
        guaranteed: out.guaranteed,
        passed,
        checks: out.checks,
        data: out.data,
        timing: (!config.no_timing).then(|| Timing {
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        }),
    })
}

fn dispatch(cmd: &Command, ctx: &mut Ctx) -> Result<Outcome> {
    match cmd {
        Command::Vp { grid, p, rect, heuristic } => {
            let f = ctx.grid(grid)?;
            let r = rect_arg(&f, rect)?;
            let v = if *heuristic {
                vp_2d_alternating(&f, *p, &r)?
            } else {
                vp_2d_exact(&f, *p, &r, &ctx.limits)?
            };
            Ok(Outcome::data(to_value(&v)))
        }
        Command::Cvp { grid, p, rect } => {
            let f = ctx.grid(grid)?;
            let r = rect_arg(&f, rect)?;
            Ok(Outcome::data(to_value(&controlled_pvar_exact(&f, *p, &r, &ctx.limits)?)))
        }
        Command::Sandwich { grid, p, eps } => {
            let f = ctx.grid(grid)?;
            let rep = verify_sandwich(&f, *p, *eps, &f.domain(), &ctx.limits, ctx.tol)?;
            let c = sandwich_constant_parts(*p, *eps)?;
            Ok(Outcome::checks(vec![rep], json!({ "constant": c })))
        }
        Command::CheckControl { grid, p, kind } => {
            let f = ctx.grid(grid)?;
            let (w, guaranteed): (ControlTable, bool) = match kind {
                ControlKind::Cpvar => (control_from_cpvar(&f, *p, &ctx.limits)?, true),
                ControlKind::Vp => (table_from_vp(&f, *p, &ctx.limits)?, false),
                ControlKind::Area => (ControlTable::area(f.xs().clone(), f.ys().clone())?, true),
            };
            let mut checks = vec![check_superadditive(&w, &ctx.limits, ctx.tol)?];
            if *kind != ControlKind::Area {
                checks.push(dominates_increments(&w, &f, *p, ctx.tol)?);
            }
            let full = w.get(&f.full_index_rect());
            Ok(Outcome {
                guaranteed,
                checks,
                data: json!({ "kind": kind, "full_domain_value": full, "notion": "control (finite-grid sense)" }),
            })
        }
        Command::AlmostSubadd { grid, p, split } => {
            let f = ctx.grid(grid)?;
            let w = control_from_cpvar(&f, *p, &ctx.limits)?;
            let rep = match split {
                Some(v) => match v.as_slice() {
                    [a, b, s, t, u] => almost_subadd_check(&w, *a, *b, *s, *t, *u, *p, ctx.tol)?,
                    _ => return Err(Error::Usage("--split takes a,b,s,t,u".into())),
                },
                None => almost_subadd_sweep(&w, *p, ctx.tol)?,
            };
            Ok(Outcome::checks(vec![rep], Value::Null))
        }
        Command::Young1d { exps, y, x, len } => {
            let e = exponent_triple(exps)?;
            let (y, x) = match (y, x) {
                (Some(y), Some(x)) => (y.clone(), x.clone()),
                (None, None) => {
                    let y = random::path_from_zero(&mut ctx.rng, *len);
                    let x = random::path(&mut ctx.rng, *len);
                    (y, x)
                }
                _ => return Err(Error::Usage("give both --x and --y, or neither".into())),
            };
            let rep = verify_young_1d(&y, &x, &e, ctx.tol)?;
            Ok(Outcome::checks(vec![rep], json!({ "exponents": e, "y": y, "x": x })))
        }
        Command::Young2d { exps, input, integrand, cells } => {
            let e = exponent_triple(exps)?;
            let x = match input {
                Some(path) => load_grid_function(path)?,
                None => random::grid_function(&mut ctx.rng, *cells, *cells)?,
            };
            let y = match integrand {
                Some(path) => load_grid_function(path)?,
                None => random::axis_zeroed(&mut ctx.rng, x.nx() - 1, x.ny() - 1)?
                    .with_axes(x.xs().clone(), x.ys().clone())?,
            };
            let e = match e.alpha {
                Some(_) => e,
                None => e.with_optimal_alpha()?,
            };
            let rep = verify_yt_2d(&y, &x, &e, &ctx.limits, ctx.tol)?;
            Ok(Outcome::checks(vec![rep], json!({ "exponents": e })))
        }
        Command::CrucialLemma { grid, p, partition } => {
            let f = ctx.grid(grid)?;
            let q = match partition {
                Some(path) => {
                    let text = fs::read_to_string(path)?;
                    let q: RectPartition = serde_json::from_str(&text).map_err(|e| Error::Parse {
                        line: e.line(),
                        column: e.column(),
                        message: e.to_string(),
                    })?;
                    if !validate_partition(&q) {
                        return Err(Error::InvalidPartition("partition file is not a valid partition".into()));
                    }
                    q
                }
                None => random::rectangulation(&mut ctx.rng, &f, &ctx.limits)?,
            };
            let rep = crucial_lemma_check(&f, &q, *p, &ctx.limits, ctx.tol)?;
            Ok(Outcome::checks(vec![rep], json!({ "partition": q })))
        }
        Command::FbmCov { h, rect, t_end, points } => {
            let k = HurstKernel::new(*h)?;
            let grid = Dissection::uniform(0.0, *t_end, *points)?;
            let rep = neg_correlation_check(&k, &grid, ctx.tol)?;
            let data = match rect {
                Some(v) => {
                    let r = rect_from(v)?;
                    json!({ "rect": r, "rect_cov": fbm_rect_cov(&k, &r)?, "corner_cov": fbm_cov(&k, r.b, r.d)? })
                }
                None => Value::Null,
            };
            Ok(Outcome::checks(vec![rep], data))
        }
        Command::FbmScan { h, s, t, sizes } => {
            let k = HurstKernel::new(*h)?;
            let scan = fbm_variation_scan(&k, *s, *t, sizes, &ctx.limits)?;
            Ok(Outcome::data(to_value(&scan)))
        }
        Command::FbmCounterexample { h, points_per_unit } => {
            let k = HurstKernel::new(*h)?;
            let c = superadditivity_counterexample(&k, *points_per_unit, &ctx.limits, ctx.tol)?;
            let data = json!({
                "pieces": c.pieces,
                "whole": c.whole,
                "sum": c.sum,
                "excess": c.excess,
                "violation_found": c.violation_found,
            });
            Ok(Outcome::checks(vec![c.report], data))
        }
        Command::EnumeratePartitions { nx, ny, list } => {
            let mut count = 0usize;
            let mut all = Vec::new();
            for part in enumerate_rect_partitions(*nx, *ny, &ctx.limits)? {
                count += 1;
                if *list {
                    all.push(part.canonical());
                }
            }
            let mut data = json!({ "nx": nx, "ny": ny, "count": count });
            if *list {
                data["partitions"] = to_value(&all);
            }
            Ok(Outcome::data(data))
        }
        Command::Selftest { cases } => selftest(ctx, *cases),
    }
}

/// A compact randomized run of every property the crate verifies.
fn selftest(ctx: &mut Ctx, cases: usize) -> Result<Outcome> {
    let tol = ctx.tol;
    let limits = ctx.limits;
    let rng = &mut ctx.rng;
    let mut variation = InequalityReport::new("variation engines", tol);
    let mut checks = Vec::new();
    let mut strict_found = false;
    for _ in 0..cases {
        let f = random::grid_function(rng, 3, 3)?;
        let dom = f.domain();
        let v1 = vp_2d_exact(&f, 1.0, &dom, &limits)?;
        let c1 = controlled_pvar_exact(&f, 1.0, &dom, &limits)?;
        variation.check_eq("V_1 == controlled 1-variation", v1.value, c1.value, Some(c1.witness.clone()));
        for p in [1.5, 2.0, 3.0] {
            let v = vp_2d_exact(&f, p, &dom, &limits)?;
            let c = controlled_pvar_exact(&f, p, &dom, &limits)?;
            strict_found |= v.value < c.value * (1.0 - 1e-9);
            variation.check_le(format!("V_{p} <= controlled {p}-variation"), v.value, c.value, None, Some(v.witness.clone()));
            for r in [&v, &c] {
                let again = evaluate_witness(&f, p, &r.witness)?;
                variation.check_eq("witness re-evaluates to the reported power sum", again, r.power_sum, Some(r.witness.clone()));
            }
        }
        for (p, eps) in [(1.2, 0.3), (2.0, 1.0)] {
            checks.push(verify_sandwich(&f, p, eps, &dom, &limits, tol)?);
        }
        let w = control_from_cpvar(&f, 2.0, &limits)?;
        checks.push(check_superadditive(&w, &limits, tol)?);
        checks.push(dominates_increments(&w, &f, 2.0, tol)?);
        checks.push(almost_subadd_sweep(&w, 2.0, tol)?);
        let q = random::rectangulation(rng, &f, &limits)?;
        checks.push(crucial_lemma_check(&f, &q, 2.0, &limits, tol)?);

        let y = random::path_from_zero(rng, 8);
        let x = random::path(rng, 8);
        checks.push(verify_young_1d(&y, &x, &ExponentTriple::symmetric(4.0 / 3.0)?, tol)?);
        let x2 = random::grid_function(rng, 3, 3)?;
        let y2 = random::axis_zeroed(rng, 3, 3)?;
        checks.push(verify_yt_2d(&y2, &x2, &ExponentTriple::symmetric(1.5)?, &limits, tol)?);
    }
    checks.insert(0, variation);
    let k = HurstKernel::new(0.25)?;
    checks.push(neg_correlation_check(&k, &Dissection::uniform(0.0, 2.0, 9)?, tol)?);
    checks.push(superadditivity_counterexample(&k, 3, &limits, tol)?.report);
    Ok(Outcome::checks(checks, json!({ "cases": cases, "strict_ordering_found": strict_found })))
}

/// Parse arguments, run, write the report and return the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("pvar2d: {e}");
            return exit_code_for(&e);
        }
    };
    let text = report.to_json();
    let written = match &config.output {
        Some(path) => fs::write(path, &text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(Error::from),
    };
    if let Err(e) = written {
        eprintln!("pvar2d: {e}");
        return EXIT_USAGE;
    }
    report.exit_code()
}
