//! Eigenvalue conditions (plain WKB and exponentially corrected), their root
//! solvers, branch continuation in `p`, and the limit formulas.

use std::f64::consts::PI;

use crate::action::{phi_a_closed_form, phi_between, quartic_uv_complex, r_of_p, ContourPath};
use crate::error::{Error, Result};
use crate::geometry::{turning_points, ModelSpec};
use crate::roots::{bisect, muller, newton, NewtonOptions, Scaled};
use crate::special::{gamma_real, recip_gamma, sin_pi, CScalar};

fn c(re: f64, im: f64) -> CScalar {
    CScalar::new(re, im)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Wkb,
    Full,
    Numeric,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Wkb => "wkb",
            Method::Full => "full",
            Method::Numeric => "numeric",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wkb" => Ok(Method::Wkb),
            "full" => Ok(Method::Full),
            "numeric" => Ok(Method::Numeric),
            _ => Err(Error::InvalidParameter(format!("unknown method '{s}'"))),
        }
    }
}

/// One eigenvalue observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigRecord {
    pub n: usize,
    /// `p` for the power-law family, the coupling for the quartic.
    pub param: f64,
    pub eps: CScalar,
    pub e: CScalar,
    pub method: Method,
    pub residual: f64,
}

impl EigRecord {
    pub fn is_real(&self, tol: f64) -> bool {
        self.e.im.abs() <= tol * self.e.norm().max(1.0)
    }
}

/// Which eigenvalue condition to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// Two turning-point contributions only.
    Big2,
    /// With the branch-point contribution from `z = 0`.
    Big3,
}

impl Condition {
    pub fn method(self) -> Method {
        match self {
            Condition::Big2 => Method::Wkb,
            Condition::Big3 => Method::Full,
        }
    }
}

/// Late-term constants attached to one singularity of the early terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularityData {
    pub location: CScalar,
    pub gamma: f64,
    pub lambda: f64,
    /// `phi(location) - phi(0)`.
    pub chi_base: CScalar,
}

/// `z_A`, `z_B` and the branch point `z = 0`.
pub fn singularities(p: f64) -> [SingularityData; 3] {
    let (za, zb) = turning_points(p);
    let (pa, pb) = phi_a_closed_form(p);
    let tp = 1.0 / (2.0 * PI);
    [
        SingularityData { location: za, gamma: 0.0, lambda: tp, chi_base: pa },
        SingularityData { location: zb, gamma: 0.0, lambda: tp, chi_base: pb },
        SingularityData { location: c(0.0, 0.0), gamma: -p, lambda: branch_lambda(p), chi_base: c(0.0, 0.0) },
    ]
}

/// `-1 / (2^{p+2} Gamma(-p))`, zero at integer `p`.
pub fn branch_lambda(p: f64) -> f64 {
    -recip_gamma(-p) / 2f64.powf(p + 2.0)
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("exponent p must be >= 1, got {p}")));
    }
    Ok(())
}

/// Closed-form WKB eigenvalue `E_n(p)`.
pub fn bender_en(n: usize, p: f64) -> Result<f64> {
    check_p(p)?;
    let s = sin_pi(1.0 / p);
    if s == 0.0 {
        return Err(Error::GammaPole(p));
    }
    let num = PI.sqrt() * (n as f64 + 0.5) * gamma_real(1.5 + 1.0 / p)?;
    let den = gamma_real(1.0 + 1.0 / p)? * s;
    Ok((num / den).powf(2.0 * p / (p + 2.0)))
}

/// `E = eps^{-2p/(p+2)}`, principal branch.
pub fn eps_to_e(eps: CScalar, p: f64) -> CScalar {
    eps.powf(-2.0 * p / (p + 2.0))
}

/// `eps = E^{-(p+2)/(2p)}`, principal branch.
pub fn e_to_eps(e: CScalar, p: f64) -> CScalar {
    e.powf(-(p + 2.0) / (2.0 * p))
}

/// `E = eps^{-4/3}` for the quartic family.
pub fn eps_to_e_quartic(eps: CScalar) -> CScalar {
    eps.powf(-4.0 / 3.0)
}

pub fn e_to_eps_quartic(e: CScalar) -> CScalar {
    e.powf(-0.75)
}

/// `2 i exp(2 R cos(pi/p) / eps) cos(2 R sin(pi/p) / eps)`.
pub fn condition_big2(eps: CScalar, p: f64) -> CScalar {
    let r = r_of_p(p);
    let (s, co) = (PI / p).sin_cos();
    2.0 * CScalar::i() * (2.0 * r * co / eps).exp() * (2.0 * r * s / eps).cos()
}

/// Coefficient of `eps^p` in the branch-point term, `2 pi i / (2^{p+2} Gamma(-p))`.
fn branch_coefficient(p: f64) -> CScalar {
    c(0.0, 2.0 * PI * recip_gamma(-p) / 2f64.powf(p + 2.0))
}

/// `condition_big2 - 2 pi i eps^p / (2^{p+2} Gamma(-p))`.
pub fn condition_big3(eps: CScalar, p: f64) -> CScalar {
    condition_big2(eps, p) - branch_coefficient(p) * eps.powf(p)
}

/// The condition divided by `2 i exp(2 R cos(pi/p) / eps)`:
/// `cos(2 R sin / eps) - K eps^p exp(-2 R cos / eps)`.
pub fn reduced_condition(eps: CScalar, p: f64, cond: Condition) -> Scaled {
    let r = r_of_p(p);
    let (s, co) = (PI / p).sin_cos();
    let cosine = (2.0 * r * s / eps).cos();
    let k = PI * recip_gamma(-p) / 2f64.powf(p + 2.0);
    if cond == Condition::Big2 || k == 0.0 {
        return Scaled { value: cosine, scale: cosine.norm() };
    }
    let tail = k * eps.powf(p) * (-2.0 * r * co / eps).exp();
    Scaled { value: cosine - tail, scale: cosine.norm().max(tail.norm()) }
}

/// Phase `2 R sin(pi/p) / eps` whose cosine drives the condition.
pub fn phase(eps: CScalar, p: f64) -> CScalar {
    2.0 * r_of_p(p) * (PI / p).sin() / eps
}

/// Mode index of a real root: the cell `(n pi, (n+1) pi)` holding the phase.
pub fn cell_index(theta: f64) -> Option<usize> {
    if theta > 0.0 && theta.is_finite() {
        Some((theta / PI).floor() as usize)
    } else {
        None
    }
}

/// `eps_0` from `2 R sin(pi/p) / eps_0 = (n + 1/2) pi`.
pub fn seed_eps(n: usize, p: f64) -> f64 {
    2.0 * r_of_p(p) * (PI / p).sin() / ((n as f64 + 0.5) * PI)
}

/// Whether a mode of index `n` pairs with `n + 1` (odd `n`) or `n - 1`.
pub fn merge_partner(n: usize) -> Option<usize> {
    match n {
        0 => None,
        n if n % 2 == 1 => Some(n + 1),
        n => Some(n - 1),
    }
}

/// Sign of `Im eps` assigned to a mode after merging: the lower member of a
/// pair carries `Im E > 0`, i.e. `Im eps < 0`.
pub fn complex_eps_sign(n: usize) -> f64 {
    if n % 2 == 1 || n == 0 {
        -1.0
    } else {
        1.0
    }
}

fn record(n: usize, p: f64, eps: CScalar, cond: Condition, residual: f64) -> EigRecord {
    let eps = if eps.im.abs() <= 1e-14 * eps.norm() { c(eps.re, 0.0) } else { eps };
    EigRecord { n, param: p, eps, e: eps_to_e(eps, p), method: cond.method(), residual }
}

fn real_in_cell(eps: CScalar, n: usize, p: f64) -> bool {
    eps.im == 0.0 && cell_index(phase(eps, p).re) == Some(n)
}

/// Real Newton on the reduced condition, accepted only inside cell `n`.
fn solve_real(n: usize, p: f64, cond: Condition, seed: f64) -> Option<(CScalar, f64)> {
    let f = |e: CScalar| Ok(reduced_condition(e, p, cond));
    let opts = NewtonOptions { real_only: true, ..Default::default() };
    let r = newton(f, c(seed, 0.0), opts).ok()?;
    real_in_cell(r.x, n, p).then_some((r.x, r.residual))
}

fn solve_complex(p: f64, cond: Condition, seed: CScalar) -> Result<(CScalar, f64)> {
    let f = |e: CScalar| Ok(reduced_condition(e, p, cond));
    match newton(f, seed, NewtonOptions::default()) {
        Ok(r) => Ok((r.x, r.residual)),
        Err(_) => {
            let d = 0.01 * seed.norm();
            let r = muller(f, [seed - d, seed + c(0.0, d), seed], 1e-12, 200)?;
            if r.x.re <= 0.0 {
                return Err(Error::NoConvergence { what: "Muller", iterations: 200 });
            }
            Ok((r.x, r.residual))
        }
    }
}

/// Root of the condition for mode `n` at fixed `p`, real when possible.
pub fn solve_condition(n: usize, p: f64, cond: Condition) -> Result<EigRecord> {
    check_p(p)?;
    if sin_pi(1.0 / p) == 0.0 {
        return Err(Error::GammaPole(p));
    }
    let seed = seed_eps(n, p);
    if let Some((eps, res)) = solve_real(n, p, cond, seed) {
        return Ok(record(n, p, eps, cond, res));
    }
    let sign = complex_eps_sign(n);
    let mut last_err = Error::NoConvergence { what: "condition solver", iterations: 100 };
    for offset in [0.05, 0.2, 0.01] {
        for s in [sign, -sign] {
            match solve_complex(p, cond, c(seed, s * offset * seed)) {
                Ok((eps, res)) => {
                    if eps.im.abs() > 1e-10 * eps.norm() {
                        if eps.im.signum() == sign {
                            return Ok(record(n, p, eps, cond, res));
                        }
                        // conjugate partner; its mirror image is the root we want
                        let (eps, res) = solve_complex(p, cond, eps.conj())?;
                        return Ok(record(n, p, eps, cond, res));
                    }
                    let real = c(eps.re, 0.0);
                    if real_in_cell(real, n, p) {
                        return Ok(record(n, p, real, cond, res));
                    }
                    last_err = Error::RootCollision { n, eps };
                }
                Err(e) => last_err = e,
            }
        }
    }
    Err(last_err)
}

/// Roots of the condition with real `eps` and `E` in `(e_min, e_max]`,
/// located by sign changes on a logarithmic `E` grid.
pub fn real_roots(p: f64, cond: Condition, e_min: f64, e_max: f64) -> Result<Vec<EigRecord>> {
    check_p(p)?;
    let g = |e: f64| -> Result<f64> { Ok(reduced_condition(e_to_eps(c(e, 0.0), p), p, cond).value.re) };
    let steps = 20_000;
    let (l0, l1) = (e_min.ln(), e_max.ln());
    let mut out: Vec<EigRecord> = Vec::new();
    let mut prev = (e_min, g(e_min)?);
    for k in 1..=steps {
        let e = (l0 + (l1 - l0) * k as f64 / steps as f64).exp();
        let v = g(e)?;
        if v == 0.0 || v.signum() != prev.1.signum() {
            let root = if v == 0.0 { e } else { bisect(g, prev.0, e, 1e-15)? };
            let eps = e_to_eps(c(root, 0.0), p);
            let eps = c(eps.re, 0.0);
            let n = cell_index(phase(eps, p).re).unwrap_or(0);
            let res = reduced_condition(eps, p, cond).residual();
            out.push(record(n, p, eps, cond, res));
        }
        prev = (e, v);
    }
    Ok(out)
}

/// Natural-parameter continuation of mode `n` from `p_start` to `p_end`.
/// Real roots that merge with their partner continue into complex `eps`.
pub fn trace_branch(n: usize, p_start: f64, p_end: f64, dp: f64) -> Result<Vec<EigRecord>> {
    let first = solve_condition(n, p_start, Condition::Big3)?;
    continue_branch(first, p_end, dp)
}

/// Continues an existing record of the full condition to `p_end`.
pub fn continue_branch(first: EigRecord, p_end: f64, dp: f64) -> Result<Vec<EigRecord>> {
    if !(dp > 0.0) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {dp}")));
    }
    check_p(p_end)?;
    let n = first.n;
    let dir = if p_end >= first.param { 1.0 } else { -1.0 };
    let mut out = vec![first];
    let mut h = dp;
    let mut halvings = 0;
    let cond = Condition::Big3;
    while (p_end - out.last().expect("non-empty").param) * dir > 1e-13 {
        let prev = *out.last().expect("non-empty");
        let step = h.min((p_end - prev.param).abs());
        let p = prev.param + dir * step;
        let seed = if out.len() >= 2 {
            let pp = out[out.len() - 2];
            let t = (p - prev.param) / (prev.param - pp.param);
            let s = prev.eps + (prev.eps - pp.eps) * t;
            if s.re > 0.0 { s } else { prev.eps }
        } else {
            prev.eps
        };
        let next = if sin_pi(1.0 / p) == 0.0 {
            None
        } else if prev.eps.im == 0.0 {
            match solve_real(n, p, cond, seed.re) {
                Some((eps, res)) => Some(record(n, p, eps, cond, res)),
                None => {
                    // past a merge: leave the axis on this mode's side
                    let s = complex_eps_sign(n);
                    let kick = c(seed.re, s * 0.05 * seed.re);
                    solve_complex(p, cond, kick)
                        .ok()
                        .filter(|(e, _)| e.im.signum() == s && e.im.abs() > 1e-9 * e.norm())
                        .map(|(e, r)| record(n, p, e, cond, r))
                }
            }
        } else {
            let s = prev.eps.im.signum();
            solve_complex(p, cond, seed)
                .ok()
                .and_then(|(e, r)| {
                    let real = c(e.re, 0.0);
                    if e.im.abs() <= 1e-10 * e.norm() && real_in_cell(real, n, p) {
                        Some(record(n, p, real, cond, r))
                    } else if e.im.signum() == s && (e - prev.eps).norm() < 0.5 * prev.eps.norm() {
                        Some(record(n, p, e, cond, r))
                    } else {
                        None
                    }
                })
        };
        match next {
            Some(rec) => {
                out.push(rec);
                halvings = 0;
                h = (h * 1.5).min(dp);
            }
            None => {
                halvings += 1;
                if halvings > 10 {
                    return Err(Error::NoConvergence { what: "branch continuation", iterations: halvings });
                }
                h *= 0.5;
            }
        }
    }
    out.sort_by(|a, b| a.param.total_cmp(&b.param));
    Ok(out)
}

/// Predicted `p - 1` at which the lowest branch reaches energy `E`.
pub fn delta_prediction(e: f64) -> f64 {
    let e32 = e.powf(1.5);
    8.0 * e32 / PI * (-4.0 / 3.0 * e32).exp()
}

/// `ln` of [`delta_prediction`], finite where the value itself underflows.
pub fn ln_delta_prediction(e: f64) -> f64 {
    let e32 = e.powf(1.5);
    (8.0 * e32 / PI).ln() - 4.0 / 3.0 * e32
}

/// Mode-0 full-condition eigenvalues at `p = 1 + delta` for each delta,
/// continued down from `p = 2`.
pub fn lowest_branch_near_one(deltas: &[f64]) -> Result<Vec<EigRecord>> {
    branch_near_one(0, deltas)
}

/// Mode-`n` full-condition eigenvalues at `p = 1 + delta`, largest delta
/// first.
pub fn branch_near_one(n: usize, deltas: &[f64]) -> Result<Vec<EigRecord>> {
    let mut sorted = deltas.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cur = solve_condition(n, 2.0, Condition::Big3)?;
    let mut out = Vec::with_capacity(sorted.len());
    for d in sorted {
        let p = 1.0 + d;
        let gap = (cur.param - p).abs();
        if gap > 0.0 {
            let dp = (gap / 8.0).max(1e-12);
            cur = *continue_branch(cur, p, dp)?
                .iter()
                .min_by(|a, b| (a.param - p).abs().total_cmp(&(b.param - p).abs()))
                .expect("non-empty");
        }
        out.push(cur);
    }
    Ok(out)
}

/// `U + i V` at complex coupling `a = A eps`.
fn quartic_uv_at(eps: CScalar, big_a: f64) -> Result<CScalar> {
    quartic_uv_complex(big_a * eps)
}

/// `2 e^{2V/eps} cos(2U/eps) + 1` with `a = A eps`.
pub fn quartic_condition(eps: CScalar, big_a: f64) -> Result<CScalar> {
    let uv = quartic_uv_at(eps, big_a)?;
    Ok(2.0 * (2.0 * uv.im / eps).exp() * (2.0 * uv.re / eps).cos() + 1.0)
}

/// `cos(2U/eps) + e^{-2V/eps} / 2`.
pub fn quartic_reduced(eps: CScalar, big_a: f64) -> Result<Scaled> {
    let uv = quartic_uv_at(eps, big_a)?;
    let cosine = (2.0 * uv.re / eps).cos();
    let tail = 0.5 * (-2.0 * uv.im / eps).exp();
    Ok(Scaled { value: cosine + tail, scale: cosine.norm().max(tail.norm()) })
}

fn quartic_phase(eps: f64, big_a: f64) -> Result<f64> {
    Ok(2.0 * quartic_uv_at(c(eps, 0.0), big_a)?.re / eps)
}

fn quartic_record(n: usize, big_a: f64, eps: CScalar, residual: f64) -> EigRecord {
    let eps = if eps.im.abs() <= 1e-14 * eps.norm() { c(eps.re, 0.0) } else { eps };
    EigRecord { n, param: big_a, eps, e: eps_to_e_quartic(eps), method: Method::Full, residual }
}

/// Root of the quartic condition for mode `n`, real when possible.
pub fn solve_quartic(n: usize, big_a: f64) -> Result<EigRecord> {
    if !(big_a >= 0.0) {
        return Err(Error::InvalidParameter(format!("coupling must be >= 0, got {big_a}")));
    }
    let target = (n as f64 + 0.5) * PI;
    let mut seed = 2.0 * quartic_uv_at(c(1.0, 0.0), 0.0)?.re / target;
    for _ in 0..30 {
        let u = quartic_uv_at(c(seed, 0.0), big_a)?.re;
        seed = 2.0 * u / target;
    }
    let f = |e: CScalar| quartic_reduced(e, big_a);
    let real = newton(f, c(seed, 0.0), NewtonOptions { real_only: true, ..Default::default() });
    if let Ok(r) = real {
        if cell_index(quartic_phase(r.x.re, big_a)?) == Some(n) {
            return Ok(quartic_record(n, big_a, r.x, r.residual));
        }
    }
    let sign = complex_eps_sign(n);
    let mut last_err = Error::NoConvergence { what: "quartic condition", iterations: 100 };
    for offset in [0.05, 0.2] {
        match newton(f, c(seed, sign * offset * seed), NewtonOptions::default()) {
            Ok(r) if r.x.im.abs() > 1e-10 * r.x.norm() => {
                let r = if r.x.im.signum() == sign { r } else { newton(f, r.x.conj(), NewtonOptions::default())? };
                return Ok(quartic_record(n, big_a, r.x, r.residual));
            }
            Ok(r) => last_err = Error::RootCollision { n, eps: r.x },
            Err(e) => last_err = e,
        }
    }
    Err(last_err)
}

/// Real roots of the quartic condition with `E` in `(e_min, e_max]`.
pub fn quartic_real_roots(big_a: f64, e_min: f64, e_max: f64) -> Result<Vec<EigRecord>> {
    let g = |e: f64| -> Result<f64> {
        let eps = e_to_eps_quartic(c(e, 0.0)).re;
        Ok(quartic_reduced(c(eps, 0.0), big_a)?.value.re)
    };
    let steps = 4000;
    let (l0, l1) = (e_min.ln(), e_max.ln());
    let mut out = Vec::new();
    let mut prev = (e_min, g(e_min)?);
    for k in 1..=steps {
        let e = (l0 + (l1 - l0) * k as f64 / steps as f64).exp();
        let v = g(e)?;
        if v == 0.0 || v.signum() != prev.1.signum() {
            let root = if v == 0.0 { e } else { bisect(g, prev.0, e, 1e-14)? };
            let eps = e_to_eps_quartic(c(root, 0.0)).re;
            let n = cell_index(quartic_phase(eps, big_a)?).unwrap_or(0);
            let res = quartic_reduced(c(eps, 0.0), big_a)?.residual();
            out.push(quartic_record(n, big_a, c(eps, 0.0), res));
        }
        prev = (e, v);
    }
    Ok(out)
}

/// Energy `(A / a*)^{4/3}` below which quartic branches turn complex.
pub fn quartic_closeoff(big_a: f64, a_star: f64) -> f64 {
    (big_a / a_star).powf(4.0 / 3.0)
}

/// The three exponentials switched on across the Stokes lines from `z_A`,
/// `z_B` and `0`, evaluated at `z`.
pub fn three_term_switch(z: CScalar, eps: CScalar, p: f64) -> Result<CScalar> {
    let model = ModelSpec::power_law(p)?;
    let o = c(0.0, 0.0);
    let phi = phi_between(o, z, &model, &ContourPath::straight(o, z))?;
    let (pa, pb) = phi_a_closed_form(p);
    let i = CScalar::i();
    let chi_a = 2.0 * i * (phi - pa);
    let chi_b = 2.0 * i * (phi - pb);
    let chi_0 = 2.0 * i * phi;
    Ok(i * (-chi_a / eps).exp() + i * (-chi_b / eps).exp() - branch_coefficient(p) * eps.powf(p) * (-chi_0 / eps).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn harmonic_ladder() {
        assert!((bender_en(0, 2.0).unwrap() - 1.0).abs() < 1e-13);
        assert!((bender_en(3, 2.0).unwrap() - 7.0).abs() < 1e-13);
        assert!(matches!(bender_en(0, 1.0), Err(Error::GammaPole(_))));
    }

    #[test]
    fn bender_increasing_at_p4() {
        let v: Vec<f64> = (0..20).map(|n| bender_en(n, 4.0).unwrap()).collect();
        assert!(v.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn big2_zero_at_cosine_zero() {
        for n in 0..5 {
            let eps = 1.0 / (2.0 * n as f64 + 1.0);
            assert!(condition_big2(c(eps, 0.0), 2.0).norm() < 1e-12);
        }
        let eps = c(seed_eps(0, 3.3) * 0.99 + 0.0, 0.0);
        let _ = eps;
        let p = 3.3;
        let eps = 2.0 * r_of_p(p) * (PI / p).sin() / (PI / 2.0);
        assert!(condition_big2(c(eps, 0.0), p).norm() < 1e-14);
    }

    #[test]
    fn big2_conjugate_symmetry() {
        let e = c(0.3, 0.07);
        for p in [1.5, 2.5, 3.0] {
            let a = condition_big2(e.conj(), p);
            let b = -condition_big2(e, p).conj();
            assert!((a - b).norm() <= 1e-12 * a.norm());
        }
    }

    #[test]
    fn big3_equals_big2_at_integers() {
        for p in [2.0, 3.0, 4.0, 5.0] {
            for e in [c(0.2, 0.0), c(0.4, -0.1)] {
                assert_eq!(condition_big3(e, p), condition_big2(e, p));
            }
        }
    }

    #[test]
    fn correction_dominance() {
        let p = 1.5;
        let e = c(0.05, 0.0);
        let first = condition_big2(e, p).norm();
        let corr = (condition_big3(e, p) - condition_big2(e, p)).norm();
        assert!(corr > 1e3 * first.max(1e-300));
        let p = 3.0;
        let e = c(0.1, 0.0);
        let ratio = (condition_big3(e, p) - condition_big2(e, p)).norm();
        assert_eq!(ratio, 0.0);
        // non-integer neighbour: exponentially small
        let p = 3.3;
        let big = condition_big2(c(0.1, 0.0), p);
        let corr = (condition_big3(c(0.1, 0.0), p) - big).norm();
        let cexp = 2.0 * r_of_p(p) * (PI / p).cos();
        // compare against the envelope of the first term
        let envelope = 2.0 * (cexp / 0.1).exp();
        assert!(corr / envelope < (-cexp / 0.1).exp());
    }

    #[test]
    fn big2_roots_reproduce_bender() {
        for p in [2.5, 3.0, 4.0, 5.0] {
            for n in 5..=15 {
                let r = solve_condition(n, p, Condition::Big2).unwrap();
                let b = bender_en(n, p).unwrap();
                assert!((r.e.re - b).abs() / b < 1e-10, "p = {p}, n = {n}");
                assert_eq!(r.method, Method::Wkb);
            }
        }
    }

    #[test]
    fn harmonic_full_condition() {
        let r = solve_condition(0, 2.0, Condition::Big3).unwrap();
        assert!((r.e.re - 1.0).abs() < 1e-10);
        assert_eq!(r.method, Method::Full);
    }

    #[test]
    fn high_modes_leave_axis_below_two() {
        let r = solve_condition(80, 1.9, Condition::Big3).unwrap();
        assert!(r.e.im.abs() > 1e-6, "{:?}", r);
        assert!(r.residual <= 1e-9);
    }

    #[test]
    fn e_eps_round_trip() {
        assert!((eps_to_e(c(0.25, 0.0), 2.0) - c(4.0, 0.0)).norm() < 1e-14);
        assert!((eps_to_e_quartic(c(0.125, 0.0)) - c(16.0, 0.0)).norm() < 1e-12);
        for p in [1.1, 2.0, 3.7] {
            assert!((eps_to_e(c(1.0, 0.0), p) - c(1.0, 0.0)).norm() < 1e-15);
            let e = c(3.2, -0.4);
            assert!((eps_to_e(e_to_eps(e, p), p) - e).norm() < 1e-12);
        }
    }

    #[test]
    fn delta_values() {
        assert!((delta_prediction(1.0) - 8.0 / PI * (-4.0f64 / 3.0).exp()).abs() < 1e-15);
        assert!((delta_prediction(1.0) - 0.6712).abs() < 1e-4);
        for e in [2.0, 5.0, 9.0] {
            let d = delta_prediction(e);
            let lhs = d * (4.0 / 3.0 * e.powf(1.5)).exp();
            assert!((lhs - 8.0 / PI * e.powf(1.5)).abs() < 1e-10 * lhs);
        }
        // log|log delta| against log E has slope -> 3/2
        let slope = |e: f64| {
            let h = 1e-4;
            let f = |x: f64| ln_delta_prediction(x).abs().ln();
            (f(e * (1.0 + h)) - f(e * (1.0 - h))) / ((1.0 + h).ln() - (1.0 - h).ln())
        };
        assert!((slope(400.0) - 1.5).abs() < 0.01);
        assert!((ln_delta_prediction(3.0) - delta_prediction(3.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn closeoff() {
        let a = 1.18384;
        assert!((quartic_closeoff(a, a) - 1.0).abs() < 1e-15);
        assert!((quartic_closeoff(2.0 * a, a) - 2f64.powf(4.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn merging_pair_becomes_conjugate() {
        let a = trace_branch(1, 2.0, 1.3, 0.02).unwrap();
        let b = trace_branch(2, 2.0, 1.3, 0.02).unwrap();
        assert!((a[a.len() - 1].e.re - 3.0).abs() < 1e-8);
        assert!((b[b.len() - 1].e.re - 5.0).abs() < 1e-8);
        let (la, lb) = (a[0], b[0]);
        assert!((la.param - 1.3).abs() < 1e-12 && (lb.param - 1.3).abs() < 1e-12);
        assert!(la.e.im > 0.0, "{la:?}");
        assert!((la.e - lb.e.conj()).norm() < 1e-9, "{la:?} {lb:?}");
    }

    #[test]
    fn three_term_factorization() {
        let p = 2.5;
        let eps = c(0.3, 0.02);
        let o = c(0.0, 0.0);
        let model = ModelSpec::power_law(p).unwrap();
        let big = condition_big3(eps, p);
        for z in [c(0.2, -0.5), c(-0.6, -0.8), c(1.0, -0.3), c(0.0, -1.0), c(-1.2, -0.2)] {
            let phi = phi_between(o, z, &model, &ContourPath::straight(o, z)).unwrap();
            let v = three_term_switch(z, eps, p).unwrap() * (2.0 * CScalar::i() * phi / eps).exp();
            assert!((v - big).norm() <= 1e-9 * big.norm(), "{v} vs {big}");
        }
        let r = solve_condition(3, 1.8, Condition::Big3).unwrap();
        let z = c(0.3, -0.6);
        let phi = phi_between(o, z, &model, &ContourPath::straight(o, z)).unwrap();
        let _ = phi;
        let terms = three_term_switch(z, r.eps, 1.8).unwrap();
        let m = ModelSpec::power_law(1.8).unwrap();
        let phi = phi_between(o, z, &m, &ContourPath::straight(o, z)).unwrap();
        let scale = ((2.0 * r_of_p(1.8) * (PI / 1.8).cos() / r.eps).exp() * (-2.0 * CScalar::i() * phi / r.eps).exp()).norm();
        assert!(terms.norm() <= 1e-9 * scale.max(1.0) * 4.0, "{terms}");
    }

    proptest! {
        #[test]
        fn conjugate_roots_pair_up(p in 1.3f64..1.95, n in 3usize..8) {
            if let Ok(r) = solve_condition(n, p, Condition::Big3) {
                if r.eps.im.abs() > 1e-8 {
                    let f = |e: CScalar| Ok(reduced_condition(e, p, Condition::Big3));
                    let m = newton(f, r.eps.conj(), NewtonOptions::default()).unwrap();
                    prop_assert!((m.x - r.eps.conj()).norm() < 1e-9);
                }
            }
        }

        #[test]
        fn dominance_exchanges_at_two(p in 1.01f64..6.0) {
            prop_assume!((p - 2.0).abs() > 1e-9);
            let sgn = r_of_p(p) * (PI / p).cos();
            prop_assert_eq!(sgn > 0.0, p > 2.0);
        }

        #[test]
        fn round_trip(p in 1.0f64..6.0, re in 0.05f64..3.0, im in -1.0f64..1.0) {
            let e = c(re, im);
            prop_assert!((eps_to_e(e_to_eps(e, p), p) - e).norm() <= 1e-12 * e.norm().max(1.0));
        }
    }
}
