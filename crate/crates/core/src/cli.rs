//! `ptstokes` command-line front end: plot-ready CSV/JSON datasets.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::asymptotic::{
    bender_en, branch_near_one, delta_prediction, quartic_closeoff, quartic_real_roots, real_roots, solve_condition,
    solve_quartic, Condition, EigRecord, Method,
};
use crate::action::find_a_star;
use crate::error::Error;
use crate::geometry::{real_phi_path, seed_directions, trace_stokes_line, wedge_angles, Family, ModelSpec, Termination, R_ESCAPE};
use crate::shooting::{find_eigen, scan_spectrum, ShootConfig};
use crate::special::CScalar;
use crate::verify::run_suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "ptstokes", version, about = "Eigenvalues of -f'' - (iz)^p f = E f and the quartic variant")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues over a grid of p.
    Bifurcation(CommonArgs),
    /// Stokes lines and wedges of one model.
    Stokes(CommonArgs),
    /// Lowest branches as p approaches 1.
    #[command(name = "p1-scaling")]
    P1Scaling(CommonArgs),
    /// Quartic eigenvalues over a grid of the coupling A.
    Quartic(CommonArgs),
    /// Late-term constant checks.
    Verify(CommonArgs),
    /// A single eigenvalue.
    Eigen(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Power-law exponent.
    #[arg(long, conflicts_with = "a")]
    pub p: Option<f64>,
    /// Quartic coupling (`a` itself for `stokes`).
    #[arg(long = "A", id = "a")]
    pub a: Option<f64>,
    /// Parameter range `MIN:MAX`.
    #[arg(long)]
    pub range: Option<String>,
    /// Parameter grid step.
    #[arg(long)]
    pub step: Option<f64>,
    /// Largest eigenvalue kept.
    #[arg(long)]
    pub emax: Option<f64>,
    /// Comma-separated methods: wkb, full, numeric.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Relative tolerance of the numerical integrator.
    #[arg(long)]
    pub rtol: Option<f64>,
    /// Mode number for `eigen`.
    #[arg(long, default_value_t = 0)]
    pub n: usize,
    /// Number of branches for `p1-scaling`.
    #[arg(long, default_value_t = 6)]
    pub branches: usize,
}

/// A table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// Columns, rows and run metadata of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub meta: Map<String, Value>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub warnings: Vec<String>,
}

impl Dataset {
    fn new(command: &str, columns: Vec<&'static str>) -> Self {
        let mut meta = Map::new();
        meta.insert("command".into(), json!(command));
        meta.insert("columns".into(), json!(columns));
        Dataset { meta, columns, rows: Vec::new(), warnings: Vec::new() }
    }

    fn param(&mut self, key: &str, value: Value) {
        self.meta.insert(key.into(), value);
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match cell {
                    Cell::Num(x) => out.push_str(&format_float(*x)),
                    Cell::Int(k) => write!(out, "{k}").expect("string write"),
                    Cell::Text(s) => out.push_str(&csv_escape(s)),
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(k, cell)| {
                        let v = match cell {
                            Cell::Num(x) => json!(x),
                            Cell::Int(k) => json!(k),
                            Cell::Text(s) => json!(s),
                        };
                        (k.to_string(), v)
                    })
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&json!({ "meta": self.meta, "rows": rows })).expect("serializable");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Seventeen significant digits, so every `f64` survives a round trip.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Failure of a command, split by exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(m) => Failure::Usage(m),
            other => Failure::Compute(other.to_string()),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn parse_range(s: Option<&str>, default: (f64, f64)) -> std::result::Result<(f64, f64), Failure> {
    let Some(s) = s else { return Ok(default) };
    let (lo, hi) = s.split_once(':').ok_or_else(|| usage(format!("range '{s}' is not MIN:MAX")))?;
    let lo: f64 = lo.trim().parse().map_err(|_| usage(format!("bad range start '{lo}'")))?;
    let hi: f64 = hi.trim().parse().map_err(|_| usage(format!("bad range end '{hi}'")))?;
    if !(lo <= hi) {
        return Err(usage(format!("range {lo}:{hi} is not ordered")));
    }
    Ok((lo, hi))
}

/// `lo, lo + step, ...` up to `hi` inclusive.
fn grid(lo: f64, hi: f64, step: f64) -> std::result::Result<Vec<f64>, Failure> {
    if !(step > 0.0) {
        return Err(usage(format!("step must be positive, got {step}")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| lo + k as f64 * step).collect())
}

fn parse_methods(s: Option<&str>, default: &[Method]) -> std::result::Result<Vec<Method>, Failure> {
    let Some(s) = s else { return Ok(default.to_vec()) };
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let m: Method = part.parse().map_err(|e: Error| usage(e.to_string()))?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(usage("method list is empty"));
    }
    Ok(out)
}

fn positive(name: &str, x: Option<f64>, default: f64) -> std::result::Result<f64, Failure> {
    let v = x.unwrap_or(default);
    if !(v > 0.0) || !v.is_finite() {
        return Err(usage(format!("{name} must be positive, got {v}")));
    }
    Ok(v)
}

fn shoot_config(model: &ModelSpec, rtol: Option<f64>) -> std::result::Result<ShootConfig, Failure> {
    let cfg = ShootConfig::for_model(model);
    match rtol {
        None => Ok(cfg),
        Some(r) if r > 0.0 && r < 1.0 => Ok(cfg.with_rtol(r)),
        Some(r) => Err(usage(format!("rtol must lie in (0, 1), got {r}"))),
    }
}

fn eig_row(rec: &EigRecord, status: &str) -> Vec<Cell> {
    vec![rec.param.into(), rec.n.into(), rec.method.as_str().into(), rec.e.re.into(), rec.e.im.into(), rec.residual.into(), status.into()]
}

fn failed_row(param: f64, method: Method, err: &Error) -> Vec<Cell> {
    vec![param.into(), Cell::Int(-1), method.as_str().into(), f64::NAN.into(), f64::NAN.into(), f64::NAN.into(), format!("failed: {err}").into()]
}

const EIG_COLUMNS: [&str; 7] = ["param", "n", "method", "re_e", "im_e", "residual", "status"];

/// Real asymptotic or numerical eigenvalues of the power law at one `p`.
fn power_law_rows(p: f64, method: Method, e_max: f64, rtol: Option<f64>) -> std::result::Result<Vec<EigRecord>, Error> {
    match method {
        Method::Wkb => {
            let mut out = Vec::new();
            for n in 0.. {
                let e = bender_en(n, p)?;
                if e > e_max {
                    break;
                }
                out.push(EigRecord { n, param: p, eps: crate::asymptotic::e_to_eps(CScalar::new(e, 0.0), p), e: CScalar::new(e, 0.0), method, residual: 0.0 });
            }
            Ok(out)
        }
        Method::Full => real_roots(p, Condition::Big3, 0.01, e_max),
        Method::Numeric => {
            let model = ModelSpec::power_law(p)?;
            let cfg = shoot_config(&model, rtol).map_err(|f| match f {
                Failure::Usage(m) | Failure::Compute(m) => Error::InvalidParameter(m),
            })?;
            scan_spectrum(&model, e_max, &cfg)
        }
    }
}

pub fn cmd_bifurcation(args: &CommonArgs) -> std::result::Result<Dataset, Failure> {
    let (lo, hi) = match args.p {
        Some(p) => (p, p),
        None => parse_range(args.range.as_deref(), (1.05, 5.0))?,
    };
    if !(lo > 1.0) {
        return Err(usage(format!("p must exceed 1, got {lo}")));
    }
    let ps = grid(lo, hi, positive("step", args.step, 0.05)?)?;
    let e_max = positive("emax", args.emax, 20.0)?;
    let methods = parse_methods(args.method.as_deref(), &[Method::Wkb, Method::Full])?;
    if args.rtol.is_some() {
        shoot_config(&ModelSpec::power_law(lo)?, args.rtol)?;
    }
    let jobs: Vec<(f64, Method)> = ps.iter().flat_map(|&p| methods.iter().map(move |&m| (p, m))).collect();
    let results: Vec<_> = jobs.par_iter().map(|&(p, m)| power_law_rows(p, m, e_max, args.rtol)).collect();

    let mut ds = Dataset::new("bifurcation", EIG_COLUMNS.to_vec());
    ds.param("p_range", json!([lo, hi]));
    ds.param("e_max", json!(e_max));
    ds.param("methods", json!(methods.iter().map(|m| m.as_str()).collect::<Vec<_>>()));
    let mut failures = 0;
    for ((p, m), res) in jobs.iter().zip(results) {
        match res {
            Ok(recs) => recs.iter().for_each(|r| ds.push(eig_row(r, "ok"))),
            Err(e) => {
                failures += 1;
                ds.warnings.push(format!("p = {p}, {}: {e}", m.as_str()));
                ds.push(failed_row(*p, *m, &e));
            }
        }
    }
    if failures == jobs.len() {
        return Err(Failure::Compute("every grid point failed".into()));
    }
    Ok(ds)
}

fn model_from(args: &CommonArgs, default_p: f64) -> std::result::Result<ModelSpec, Failure> {
    Ok(match (args.p, args.a) {
        (_, Some(a)) => ModelSpec::quartic(a)?,
        (p, None) => ModelSpec::power_law(p.unwrap_or(default_p))?,
    })
}

pub fn cmd_stokes(args: &CommonArgs) -> std::result::Result<Dataset, Failure> {
    let model = model_from(args, 3.0)?;
    let columns = vec!["origin", "line", "kind", "index", "re_z", "im_z", "re_chi", "im_chi", "status"];
    let mut ds = Dataset::new("stokes", columns);
    let mut origins: Vec<(String, CScalar)> = Vec::new();
    match model.family {
        Family::PowerLaw { p } => {
            ds.param("p", json!(p));
            let tps = model.turning_points()?;
            for (label, z) in ["A", "B"].iter().zip(&tps) {
                origins.push((label.to_string(), *z));
            }
            if let Some(z) = model.branch_point() {
                origins.push(("0".into(), z));
            }
        }
        Family::Quartic { a } => {
            ds.param("a", json!(a));
            let tps = model.turning_points()?;
            for (label, z) in ["A", "B", "C", "D"].iter().zip(&tps) {
                origins.push((label.to_string(), *z));
            }
        }
    }
    let max_arclen = positive("emax", args.emax, 6.0)?;

    let traced: Vec<Vec<(usize, std::result::Result<crate::geometry::StokesTrace, Error>)>> = origins
        .par_iter()
        .map(|(_, z)| {
            seed_directions(*z, &model)
                .into_iter()
                .enumerate()
                .map(|(k, dir)| (k, trace_stokes_line(*z, &model, dir, max_arclen)))
                .collect()
        })
        .collect();

    let mut failures = 0;
    let mut total = 0;
    for ((label, origin), lines) in origins.iter().zip(traced) {
        for (k, res) in lines {
            total += 1;
            match res {
                Ok(tr) => {
                    let status = termination_label(&tr.termination);
                    ds.push(vec![label.as_str().into(), k.into(), "stokes".into(), 0usize.into(), origin.re.into(), origin.im.into(), 0.0.into(), 0.0.into(), status.clone().into()]);
                    for (i, (z, chi)) in tr.points.iter().zip(&tr.chi).enumerate() {
                        ds.push(vec![label.as_str().into(), k.into(), "stokes".into(), (i + 1).into(), z.re.into(), z.im.into(), chi.re.into(), chi.im.into(), status.clone().into()]);
                    }
                }
                Err(e) => {
                    failures += 1;
                    ds.warnings.push(format!("origin {label}, line {k}: {e}"));
                    ds.push(vec![label.as_str().into(), k.into(), "stokes".into(), 0usize.into(), origin.re.into(), origin.im.into(), f64::NAN.into(), f64::NAN.into(), format!("failed: {e}").into()]);
                }
            }
        }
    }
    if total > 0 && failures == total {
        return Err(Failure::Compute("every Stokes trace failed".into()));
    }

    if let Family::PowerLaw { p } = model.family {
        match real_phi_path(p) {
            Ok(path) => {
                for (i, z) in path.nodes.iter().enumerate() {
                    ds.push(vec!["A".into(), 0usize.into(), "real_phi_path".into(), i.into(), z.re.into(), z.im.into(), f64::NAN.into(), f64::NAN.into(), "ok".into()]);
                }
            }
            Err(e) => ds.warnings.push(format!("real-phi path: {e}")),
        }
    }

    let (centres, width) = match model.family {
        Family::PowerLaw { p } => {
            let (l, r, w) = wedge_angles(p);
            ([l, r], w)
        }
        Family::Quartic { .. } => {
            let (l, r) = model.wedge_centres();
            ([l, r], std::f64::consts::PI / 3.0)
        }
    };
    for (k, theta) in centres.iter().enumerate() {
        for (kind, angle) in [("wedge_centre", *theta), ("wedge_boundary", theta - width / 2.0), ("wedge_boundary", theta + width / 2.0)] {
            let tip = CScalar::from_polar(R_ESCAPE, angle);
            for (i, z) in [CScalar::new(0.0, 0.0), tip].iter().enumerate() {
                ds.push(vec!["wedge".into(), k.into(), kind.into(), i.into(), z.re.into(), z.im.into(), f64::NAN.into(), f64::NAN.into(), "ok".into()]);
            }
        }
    }
    Ok(ds)
}

fn termination_label(t: &Termination) -> String {
    match t {
        Termination::ArcLength => "arclength".into(),
        Termination::Escaped => "escaped".into(),
        Termination::CutHit(z) => format!("cut_hit {} {}", format_float(z.re), format_float(z.im)),
        Termination::Singularity(z) => format!("singularity {} {}", format_float(z.re), format_float(z.im)),
        Termination::Stopped => "stopped".into(),
    }
}

pub fn cmd_p1_scaling(args: &CommonArgs) -> std::result::Result<Dataset, Failure> {
    let p_floor = args.p.unwrap_or(1.001);
    if !(p_floor > 1.0 && p_floor < 2.0) {
        return Err(usage(format!("p floor must lie in (1, 2), got {p_floor}")));
    }
    if args.branches == 0 {
        return Err(usage("branch count must be positive"));
    }
    // ten points per decade of delta, from 1 down to the floor
    let d_floor = p_floor - 1.0;
    let decades = -d_floor.log10();
    let count = (decades * 10.0).round() as usize + 1;
    let deltas: Vec<f64> = (0..count).map(|k| 10f64.powf(-decades * k as f64 / (count - 1).max(1) as f64)).collect();

    let results: Vec<_> = (0..args.branches).into_par_iter().map(|n| branch_near_one(n, &deltas)).collect();
    let columns = vec![
        "branch", "p", "delta", "re_e", "im_e", "log_e", "loglog_delta", "log_fig9", "pred_delta", "pred_loglog_delta", "pred_log_fig9",
    ];
    let mut ds = Dataset::new("p1-scaling", columns);
    ds.param("p_floor", json!(p_floor));
    ds.param("branches", json!(args.branches));
    let mut failures = 0;
    for (n, res) in results.into_iter().enumerate() {
        match res {
            Ok(recs) => {
                for r in recs {
                    let delta = r.param - 1.0;
                    let e = r.e.re;
                    let e32 = e.powf(1.5);
                    let fig9 = delta.ln() + 4.0 / 3.0 * e32;
                    let pred = delta_prediction(e);
                    let pred_fig9 = (8.0 / std::f64::consts::PI).ln() + e32.ln();
                    ds.push(vec![
                        n.into(),
                        r.param.into(),
                        delta.into(),
                        e.into(),
                        r.e.im.into(),
                        e.ln().into(),
                        delta.ln().abs().ln().into(),
                        fig9.into(),
                        pred.into(),
                        (4.0 / 3.0 * e32 - (8.0 * e32 / std::f64::consts::PI).ln()).abs().ln().into(),
                        pred_fig9.into(),
                    ]);
                }
            }
            Err(e) => {
                failures += 1;
                ds.warnings.push(format!("branch {n}: {e}"));
            }
        }
    }
    if failures == args.branches {
        return Err(Failure::Compute("every branch failed".into()));
    }
    Ok(ds)
}

pub fn cmd_quartic(args: &CommonArgs) -> std::result::Result<Dataset, Failure> {
    let (lo, hi) = match args.a {
        Some(a) => (a, a),
        None => parse_range(args.range.as_deref(), (0.0, 3.0))?,
    };
    if !(lo >= 0.0) {
        return Err(usage(format!("A must be >= 0, got {lo}")));
    }
    let grid_a = grid(lo, hi, positive("step", args.step, 0.1)?)?;
    let e_max = positive("emax", args.emax, 20.0)?;
    let methods = parse_methods(args.method.as_deref(), &[Method::Full, Method::Numeric])?;
    if methods.contains(&Method::Wkb) {
        return Err(usage("the quartic supports the full and numeric methods"));
    }
    if args.rtol.is_some() {
        shoot_config(&ModelSpec::quartic(0.0)?, args.rtol)?;
    }
    let a_star = find_a_star()?;
    let jobs: Vec<(f64, Method)> = grid_a.iter().flat_map(|&a| methods.iter().map(move |&m| (a, m))).collect();
    let results: Vec<std::result::Result<Vec<EigRecord>, Error>> = jobs
        .par_iter()
        .map(|&(a, m)| match m {
            Method::Full => quartic_real_roots(a, 0.05, e_max),
            _ => {
                let model = ModelSpec::quartic(a)?;
                let mut cfg = ShootConfig::for_model(&model);
                if let Some(r) = args.rtol {
                    cfg = cfg.with_rtol(r);
                }
                scan_spectrum(&model, e_max, &cfg)
            }
        })
        .collect();
    let mut columns = EIG_COLUMNS.to_vec();
    columns.push("closeoff_e");
    let mut ds = Dataset::new("quartic", columns);
    ds.param("a_range", json!([lo, hi]));
    ds.param("e_max", json!(e_max));
    ds.param("a_star", json!(a_star));
    let mut failures = 0;
    for ((a, m), res) in jobs.iter().zip(results) {
        let closeoff = quartic_closeoff(*a, a_star);
        match res {
            Ok(recs) => {
                for r in recs {
                    let mut row = eig_row(&r, "ok");
                    row.push(closeoff.into());
                    ds.push(row);
                }
            }
            Err(e) => {
                failures += 1;
                ds.warnings.push(format!("A = {a}, {}: {e}", m.as_str()));
                let mut row = failed_row(*a, *m, &e);
                row.push(closeoff.into());
                ds.push(row);
            }
        }
    }
    if failures == jobs.len() {
        return Err(Failure::Compute("every grid point failed".into()));
    }
    Ok(ds)
}

/// The verification table; the second value is whether every check passed.
pub fn cmd_verify() -> std::result::Result<(Dataset, bool), Failure> {
    let rows = run_suite()?;
    let mut ds = Dataset::new("verify", vec!["check", "value", "target", "deviation", "tolerance", "status"]);
    let all = rows.iter().all(|r| r.passed);
    for r in rows {
        ds.push(vec![
            r.name.into(),
            r.value.into(),
            r.target.into(),
            r.deviation.into(),
            r.tolerance.into(),
            (if r.passed { "pass" } else { "fail" }).into(),
        ]);
    }
    Ok((ds, all))
}

pub fn cmd_eigen(args: &CommonArgs) -> std::result::Result<Dataset, Failure> {
    let methods = parse_methods(args.method.as_deref(), &[Method::Full])?;
    let model = model_from(args, 3.0)?;
    let n = args.n;
    let cfg = shoot_config(&model, args.rtol)?;
    let mut ds = Dataset::new("eigen", vec!["param", "n", "method", "re_e", "im_e", "re_eps", "im_eps", "residual"]);
    ds.param("n", json!(n));
    for m in methods {
        let rec = match (model.family, m) {
            (Family::PowerLaw { p }, Method::Wkb) => solve_condition(n, p, Condition::Big2)?,
            (Family::PowerLaw { p }, Method::Full) => solve_condition(n, p, Condition::Big3)?,
            (Family::PowerLaw { p }, Method::Numeric) => {
                let seed = solve_condition(n, p, Condition::Big3).or_else(|_| solve_condition(n, p, Condition::Big2))?;
                EigRecord { n, ..find_eigen(seed.e, &model, &cfg)? }
            }
            (Family::Quartic { .. }, Method::Wkb) => return Err(usage("the quartic supports the full and numeric methods")),
            (Family::Quartic { a }, Method::Full) => solve_quartic(n, a)?,
            (Family::Quartic { a }, Method::Numeric) => {
                let seed = solve_quartic(n, a)?;
                EigRecord { n, ..find_eigen(seed.e, &model, &cfg)? }
            }
        };
        ds.push(vec![rec.param.into(), rec.n.into(), rec.method.as_str().into(), rec.e.re.into(), rec.e.im.into(), rec.eps.re.into(), rec.eps.im.into(), rec.residual.into()]);
    }
    match model.family {
        Family::PowerLaw { p } => ds.param("p", json!(p)),
        Family::Quartic { a } => ds.param("A", json!(a)),
    }
    Ok(ds)
}

/// Runs one parsed command; returns the dataset and the exit code it earns.
pub fn execute(cli: &Cli) -> std::result::Result<(Dataset, i32), Failure> {
    Ok(match &cli.command {
        Command::Bifurcation(a) => (cmd_bifurcation(a)?, EXIT_OK),
        Command::Stokes(a) => (cmd_stokes(a)?, EXIT_OK),
        Command::P1Scaling(a) => (cmd_p1_scaling(a)?, EXIT_OK),
        Command::Quartic(a) => (cmd_quartic(a)?, EXIT_OK),
        Command::Verify(_) => {
            let (ds, ok) = cmd_verify()?;
            (ds, if ok { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Eigen(a) => (cmd_eigen(a)?, EXIT_OK),
    })
}

fn common(cli: &Cli) -> &CommonArgs {
    match &cli.command {
        Command::Bifurcation(a)
        | Command::Stokes(a)
        | Command::P1Scaling(a)
        | Command::Quartic(a)
        | Command::Verify(a)
        | Command::Eigen(a) => a,
    }
}

/// Parses `args` (program name first), runs the command, writes the output
/// and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let opts = common(&cli).clone();
    match execute(&cli) {
        Ok((ds, code)) => {
            for w in &ds.warnings {
                eprintln!("warning: {w}");
            }
            let text = ds.render(opts.format);
            let written = match &opts.out {
                Some(path) => std::fs::write(path, text),
                None => {
                    use std::io::Write;
                    std::io::stdout().write_all(text.as_bytes())
                }
            };
            if let Err(e) = written {
                eprintln!("error: cannot write output: {e}");
                return EXIT_FAILURE;
            }
            code
        }
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Compute(m)) => {
            eprintln!("error: {m}");
            EXIT_FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("ptstokes").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn floats_keep_seventeen_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(3.0), "3.0000000000000000e0");
        assert_eq!(format_float(f64::NAN), "nan");
    }

    #[test]
    fn ranges_and_grids() {
        assert_eq!(parse_range(Some("1:2"), (0.0, 0.0)).unwrap(), (1.0, 2.0));
        assert!(matches!(parse_range(Some("2:1"), (0.0, 0.0)), Err(Failure::Usage(_))));
        assert!(matches!(parse_range(Some("2"), (0.0, 0.0)), Err(Failure::Usage(_))));
        assert_eq!(grid(1.05, 1.2, 0.05).unwrap().len(), 4);
        assert!(grid(1.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn empty_method_list_is_a_usage_error() {
        assert!(matches!(parse_methods(Some(""), &[Method::Wkb]), Err(Failure::Usage(_))));
        assert!(matches!(parse_methods(Some("wkb,bogus"), &[Method::Wkb]), Err(Failure::Usage(_))));
        assert_eq!(parse_methods(Some("numeric, wkb"), &[]).unwrap(), vec![Method::Numeric, Method::Wkb]);
        assert_eq!(run(["ptstokes", "bifurcation", "--method", ""]), EXIT_USAGE);
        assert_eq!(run(["ptstokes", "bifurcation", "--bogus"]), EXIT_USAGE);
        assert_eq!(run(["ptstokes", "bifurcation", "--range", "3:2"]), EXIT_USAGE);
    }

    #[test]
    fn wkb_bifurcation_at_two_is_the_odd_ladder() {
        let ds = cmd_bifurcation(&common(&parse(&["bifurcation", "--p", "2", "--method", "wkb", "--emax", "12"])).clone()).unwrap();
        assert_eq!(ds.rows.len(), 6);
        for (k, row) in ds.rows.iter().enumerate() {
            let Cell::Num(e) = row[3] else { panic!("eigenvalue column") };
            assert!((e - (2 * k + 1) as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn csv_and_json_shapes() {
        let mut ds = Dataset::new("t", vec!["a", "b"]);
        ds.push(vec![1.5.into(), "x,y".into()]);
        assert_eq!(ds.to_csv(), "a,b\n1.5000000000000000e0,\"x,y\"\n");
        let v: Value = serde_json::from_str(&ds.to_json()).unwrap();
        assert_eq!(v["rows"][0]["a"], json!(1.5));
        assert_eq!(v["meta"]["command"], json!("t"));
    }

    #[test]
    fn eigen_full_at_three() {
        let ds = cmd_eigen(&common(&parse(&["eigen", "--p", "3", "--n", "4", "--method", "wkb,full"])).clone()).unwrap();
        assert_eq!(ds.rows.len(), 2);
        assert_eq!(ds.rows[0][3], ds.rows[1][3]);
    }

    #[test]
    fn quartic_closeoff_column_is_one_at_a_star() {
        let a_star = find_a_star().unwrap();
        assert!((quartic_closeoff(a_star, a_star) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn output_is_deterministic() {
        let args = ["ptstokes", "stokes", "--p", "3", "--format", "json"];
        let a = cmd_stokes(common(&parse(&args[1..]))).unwrap().to_json();
        let b = cmd_stokes(common(&parse(&args[1..]))).unwrap().to_json();
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn csv_floats_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let s = format_float(x);
            prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
        }

        #[test]
        fn json_rows_round_trip(xs in proptest::collection::vec(-1e300f64..1e300, 1..8)) {
            let mut ds = Dataset::new("t", vec!["x"]);
            for &x in &xs {
                ds.push(vec![x.into()]);
            }
            let v: Value = serde_json::from_str(&ds.to_json()).unwrap();
            for (k, &x) in xs.iter().enumerate() {
                prop_assert_eq!(v["rows"][k]["x"].as_f64().unwrap().to_bits(), x.to_bits());
            }
        }
    }
}
