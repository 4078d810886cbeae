//! Finite-n confirmation of the late-term constants: the branch-point
//! recurrence `h_n`, its prefactor, the turning-point Gamma ratio, and the
//! agreement of the two-turning-point condition with the closed-form WKB
//! eigenvalues.

use std::f64::consts::PI;

use crate::asymptotic::{bender_en, branch_lambda, solve_condition, Condition};
use crate::error::{Error, Result};
use crate::special::{ln_gamma, ln_gamma_signed};

/// A real number stored as `sign * exp(ln_abs)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub sign: f64,
    pub ln_abs: f64,
}

impl SignedLog {
    pub fn value(&self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub n_values: Vec<usize>,
    pub estimates: Vec<f64>,
    pub limit: f64,
    /// Largest `|estimate - limit|` over the last quartile of `n_values`.
    pub max_dev_tail: f64,
}

impl ConvergenceReport {
    fn new(n_values: Vec<usize>, estimates: Vec<f64>, limit: f64) -> Self {
        let start = n_values.len() - n_values.len().div_ceil(4);
        let max_dev_tail = estimates[start..].iter().map(|e| (e - limit).abs()).fold(0.0, f64::max);
        ConvergenceReport { n_values, estimates, limit, max_dev_tail }
    }

    /// Largest deviation over all terms.
    pub fn max_dev(&self) -> f64 {
        self.estimates.iter().map(|e| (e - self.limit).abs()).fold(0.0, f64::max)
    }
}

fn check_non_integer(p: f64) -> Result<()> {
    if p.fract() == 0.0 || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("p must be a non-integer, got {p}")));
    }
    Ok(())
}

/// `h_0 = 1`, `h_{n+1} = ((n - p) / 2) h_n` for `n = 0..N`, in log space,
/// cross-checked against `Gamma(n - p) / (2^n Gamma(-p))`.
pub fn h_sequence(p: f64, n_max: usize) -> Result<Vec<SignedLog>> {
    check_non_integer(p)?;
    if n_max > 400 {
        return Err(Error::InvalidParameter(format!("N must be <= 400, got {n_max}")));
    }
    let mut out = Vec::with_capacity(n_max + 1);
    let mut cur = SignedLog { sign: 1.0, ln_abs: 0.0 };
    out.push(cur);
    for n in 0..n_max {
        let k = (n as f64 - p) / 2.0;
        cur = SignedLog { sign: cur.sign * k.signum(), ln_abs: cur.ln_abs + k.abs().ln() };
        out.push(cur);
    }
    let (l0, s0) = ln_gamma_signed(-p)?;
    for (n, h) in out.iter().enumerate() {
        let (l, s) = ln_gamma_signed(n as f64 - p)?;
        let closed = SignedLog { sign: s * s0, ln_abs: l - l0 - n as f64 * 2f64.ln() };
        if closed.sign != h.sign || (closed.ln_abs - h.ln_abs).abs() > 1e-10 {
            return Err(Error::Domain(format!("h_{n} disagrees with its closed form at p = {p}")));
        }
    }
    Ok(out)
}

/// Plain-valued recurrence, for the range where it is representable.
pub fn h_sequence_direct(p: f64, n_max: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    for n in 0..n_max {
        let last = *out.last().expect("non-empty");
        out.push(last * (n as f64 - p) / 2.0);
    }
    out
}

/// `-(h_n 2^n / Gamma(n - p)) / 2^{p+2}` for `n = 1..=N`, converging to
/// `-1 / (2^{p+2} Gamma(-p))`.
pub fn lambda_branch_point(p: f64, n_max: usize) -> Result<ConvergenceReport> {
    if n_max < 50 {
        return Err(Error::InvalidParameter(format!("N must be >= 50, got {n_max}")));
    }
    let h = h_sequence(p, n_max)?;
    let pref = 2f64.powf(p + 2.0);
    let mut ns = Vec::with_capacity(n_max);
    let mut est = Vec::with_capacity(n_max);
    for (n, hn) in h.iter().enumerate().skip(1) {
        let (l, s) = ln_gamma_signed(n as f64 - p)?;
        let ratio = SignedLog { sign: hn.sign * s, ln_abs: hn.ln_abs + n as f64 * 2f64.ln() - l };
        ns.push(n);
        est.push(-ratio.value() / pref);
    }
    Ok(ConvergenceReport::new(ns, est, branch_lambda(p)))
}

/// `2 h_{n+1} / h_n - n`, the late-term exponent at the branch point.
pub fn gamma_branch_point(p: f64, n_max: usize) -> Result<ConvergenceReport> {
    let h = h_sequence(p, n_max)?;
    let mut ns = Vec::new();
    let mut est = Vec::new();
    for n in 0..n_max {
        let r = h[n + 1].sign * h[n].sign * (h[n + 1].ln_abs - h[n].ln_abs).exp();
        ns.push(n);
        est.push(2.0 * r - n as f64);
    }
    Ok(ConvergenceReport::new(ns, est, -p))
}

/// `Gamma(3n + 1/2) / (27^n Gamma(n) Gamma(n+1) Gamma(n+1/2))` for
/// `n = 1..=N` against `1 / (2 pi)`.
pub fn lambda_turning_point(n_max: usize) -> Result<ConvergenceReport> {
    if n_max == 0 || n_max > 60 {
        return Err(Error::InvalidParameter(format!("N must be in 1..=60, got {n_max}")));
    }
    let mut ns = Vec::with_capacity(n_max);
    let mut est = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let x = n as f64;
        let l = ln_gamma(3.0 * x + 0.5)? - x * 27f64.ln() - ln_gamma(x)? - ln_gamma(x + 1.0)? - ln_gamma(x + 0.5)?;
        ns.push(n);
        est.push(l.exp());
    }
    Ok(ConvergenceReport::new(ns, est, 1.0 / (2.0 * PI)))
}

/// The same ratio times `Gamma(n) Gamma(n+1) / (Gamma(n+1/6) Gamma(n+5/6))`,
/// which the triplication formula makes exactly `1 / (2 pi)`.
pub fn lambda_turning_point_triplication(n_max: usize) -> Result<ConvergenceReport> {
    let base = lambda_turning_point(n_max)?;
    let mut est = Vec::with_capacity(n_max);
    for (&n, &b) in base.n_values.iter().zip(&base.estimates) {
        let x = n as f64;
        let corr = ln_gamma(x)? + ln_gamma(x + 1.0)? - ln_gamma(x + 1.0 / 6.0)? - ln_gamma(x + 5.0 / 6.0)?;
        est.push(b * corr.exp());
    }
    Ok(ConvergenceReport::new(base.n_values, est, base.limit))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceRow {
    pub n: usize,
    pub root_e: f64,
    pub closed_form_e: f64,
    pub rel_dev: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub p: f64,
    pub rows: Vec<EquivalenceRow>,
    pub max_rel_dev: f64,
}

/// Roots of the two-turning-point condition against the closed-form WKB
/// eigenvalues.
pub fn equivalence_big2_vs_airy(p: f64, n_range: std::ops::RangeInclusive<usize>) -> Result<EquivalenceReport> {
    let mut rows = Vec::new();
    for n in n_range {
        let r = solve_condition(n, p, Condition::Big2)?;
        let b = bender_en(n, p)?;
        let rel_dev = (r.e.re - b).abs() / b + r.e.im.abs() / b;
        rows.push(EquivalenceRow { n, root_e: r.e.re, closed_form_e: b, rel_dev });
    }
    let max_rel_dev = rows.iter().map(|r| r.rel_dev).fold(0.0, f64::max);
    Ok(EquivalenceReport { p, rows, max_rel_dev })
}

/// One line of the verification table.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub name: String,
    pub value: f64,
    pub target: f64,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn row(name: String, value: f64, target: f64, deviation: f64, tolerance: f64) -> CheckRow {
    CheckRow { name, value, target, deviation, tolerance, passed: deviation <= tolerance }
}

/// Every constant check, in a fixed order.
pub fn run_suite() -> Result<Vec<CheckRow>> {
    let mut out = Vec::new();
    let tp = lambda_turning_point(60)?;
    out.push(row("lambda_turning_point n=1".into(), tp.estimates[0], tp.limit, (tp.estimates[0] - tp.limit).abs(), 1e-11));
    out.push(row("lambda_turning_point n=20".into(), tp.estimates[19], tp.limit, (tp.estimates[19] - tp.limit).abs(), 1e-11));
    out.push(row("lambda_turning_point n=1..60".into(), tp.estimates[59], tp.limit, tp.max_dev(), 1e-11));
    let tri = lambda_turning_point_triplication(60)?;
    out.push(row("lambda_turning_point triplication n=1..60".into(), tri.estimates[59], tri.limit, tri.max_dev(), 1e-11));
    for p in [1.3, 1.5, 1.7, 2.5, 3.5] {
        let lb = lambda_branch_point(p, 200)?;
        out.push(row(format!("lambda_branch_point p={p}"), lb.estimates[lb.estimates.len() - 1], lb.limit, lb.max_dev(), 1e-9));
        let gb = gamma_branch_point(p, 200)?;
        out.push(row(format!("gamma_branch_point p={p}"), gb.estimates[gb.estimates.len() - 1], gb.limit, gb.max_dev(), 1e-9));
    }
    for p in [2.5, 3.0, 5.0] {
        let eq = equivalence_big2_vs_airy(p, 5..=15)?;
        out.push(row(format!("big2 vs closed form p={p} n=5..15"), eq.max_rel_dev, 0.0, eq.max_rel_dev, 1e-9));
    }
    let eq = equivalence_big2_vs_airy(2.0, 0..=20)?;
    let harmonic = eq.rows.iter().map(|r| (r.root_e - (2 * r.n + 1) as f64).abs() / r.root_e).fold(0.0, f64::max);
    out.push(row("big2 harmonic ladder p=2 n=0..20".into(), harmonic, 0.0, harmonic, 1e-12));
    Ok(out)
}
