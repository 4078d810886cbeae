//! Numerical eigenvalues by integrating the ODE inward from the two decay
//! directions and zeroing the Wronskian mismatch at a matching point.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::action::Momentum;
use crate::asymptotic::{e_to_eps, e_to_eps_quartic, EigRecord, Method};
use crate::error::{Error, Result};
use crate::geometry::{path_crosses_cut, Family, ModelSpec};
use crate::action::ContourPath;
use crate::action::r_of_p;
use crate::quad::GaussLegendre;
use crate::roots::{bisect, muller, newton, NewtonOptions, Scaled};
use crate::special::CScalar;

fn c(re: f64, im: f64) -> CScalar {
    CScalar::new(re, im)
}

/// Minimum distance kept between a ray and any turning point.
pub const STANDOFF: f64 = 0.05;
/// Exponent `int |phi'| / |eps|` the rays must cover for the decaying
/// start to be clean; `R_max` is lengthened until it does.
const MIN_DECAY_EXPONENT: f64 = 18.0;
const MAX_RAY: f64 = 40.0;

/// `(f, eps f')` with the magnitude factored out into `log_scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootState {
    pub f: CScalar,
    pub df: CScalar,
    pub log_scale: f64,
}

impl ShootState {
    fn magnitude(&self) -> f64 {
        self.f.norm().max(self.df.norm())
    }

    fn renormalized(mut self) -> Self {
        let m = self.magnitude();
        if m > 0.0 && m.is_finite() {
            self.f /= m;
            self.df /= m;
            self.log_scale += m.ln();
        }
        self
    }

    pub fn scaled(self, k: CScalar) -> Self {
        ShootState { f: self.f * k, df: self.df * k, log_scale: self.log_scale }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootConfig {
    /// Ray length.
    pub r_max: f64,
    /// Matching point.
    pub z_mid: CScalar,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for ShootConfig {
    fn default() -> Self {
        ShootConfig { r_max: 7.0, z_mid: c(0.0, -0.5), rtol: 1e-10, atol: 1e-12 }
    }
}

impl ShootConfig {
    /// Defaults for a model. The quartic matches at `z = 0`; the power law
    /// at [`balanced_match_point`].
    pub fn for_model(model: &ModelSpec) -> Self {
        match model.family {
            Family::PowerLaw { p } => ShootConfig { z_mid: balanced_match_point(p), ..ShootConfig::default() },
            Family::Quartic { .. } => ShootConfig { z_mid: c(0.0, 0.0), ..ShootConfig::default() },
        }
    }

    pub fn with_rtol(mut self, rtol: f64) -> Self {
        self.rtol = rtol;
        self.atol = (rtol * 1e-2).max(1e-300);
        self
    }
}

/// Point `-i y0` where the curve of real `phi - phi(z_A)` meets the lower
/// imaginary axis, `int_0^{y0} sqrt(1 + s^p) ds = R(p) cos(pi/p)`, floored
/// at `-0.1 i`. Away from it the two decaying solutions share a dominant
/// exponential and the Wronskian loses about `e^{-c/eps}` in precision.
pub fn balanced_match_point(p: f64) -> CScalar {
    let target = r_of_p(p) * (PI / p).cos();
    let floor = 0.1;
    if target <= 0.0 {
        return c(0.0, -floor);
    }
    let rule = GaussLegendre::cached(40);
    let action = |y: f64| Ok(rule.integrate(0.0, y, |s| (1.0 + s.powf(p)).sqrt()) - target);
    let y0 = bisect(action, 0.0, 2.0, 1e-12).unwrap_or(floor);
    c(0.0, -y0.max(floor))
}

/// The momentum and `eps` at energy `E`; the quartic coupling is `a = A eps`.
pub fn problem_at(model: &ModelSpec, e: CScalar) -> (Momentum, CScalar) {
    match model.family {
        Family::PowerLaw { p } => (model.momentum(), e_to_eps(e, p)),
        Family::Quartic { a } => {
            let eps = e_to_eps_quartic(e);
            (Momentum::Quartic { a: a * eps }, eps)
        }
    }
}

/// Decaying WKB start at `z` on a ray pointing outward along `z / |z|`:
/// `f = 1`, `eps f' = i phi' - eps g' / (4 g)`.
pub fn wkb_init(z: CScalar, eps: CScalar, m: &Momentum) -> Result<ShootState> {
    let g = m.sq(z);
    let root = g.sqrt();
    let inward = -z / z.norm();
    let growth = (CScalar::i() * root * inward / eps).re;
    if growth.abs() <= 1e-12 * (root / eps).norm() {
        return Err(Error::BranchAmbiguity(growth.abs()));
    }
    let phi_prime = if growth > 0.0 { root } else { -root };
    let amp = -eps * m.sq_derivative(z) / (4.0 * g);
    Ok(ShootState { f: c(1.0, 0.0), df: CScalar::i() * phi_prime + amp, log_scale: 0.0 })
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

type Pair = [CScalar; 2];

fn axpy(y: Pair, terms: &[(f64, Pair)], h: f64) -> Pair {
    let mut out = y;
    for (w, k) in terms {
        out[0] += k[0] * (w * h);
        out[1] += k[1] * (w * h);
    }
    out
}

/// Dormand-Prince 5(4) along `z(t) = z0 + t (z1 - z0)`, `t` in `[0, 1]`.
pub fn integrate_ray(
    start: ShootState,
    seg: (CScalar, CScalar),
    eps: CScalar,
    m: &Momentum,
    cfg: &ShootConfig,
) -> Result<ShootState> {
    let (z0, z1) = seg;
    let dz = z1 - z0;
    let rhs = |t: f64, y: &Pair| -> Pair {
        let z = z0 + dz * t;
        [dz * y[1] / eps, -dz * m.sq(z) * y[0] / eps]
    };
    let mut y: Pair = [start.f, start.df];
    let mut log_scale = start.log_scale;
    let mut t = 0.0;
    let rate = (dz.norm() * m.sq(z0).norm().sqrt() / eps.norm()).max(1.0);
    let mut h = (0.01 / rate).min(0.1);
    let mut k1 = rhs(t, &y);
    let max_steps = 5_000_000;
    for _ in 0..max_steps {
        if t >= 1.0 {
            break;
        }
        if t + h > 1.0 {
            h = 1.0 - t;
        }
        let k2 = rhs(t + C2 * h, &axpy(y, &[(A21, k1)], h));
        let k3 = rhs(t + C3 * h, &axpy(y, &[(A31, k1), (A32, k2)], h));
        let k4 = rhs(t + C4 * h, &axpy(y, &[(A41, k1), (A42, k2), (A43, k3)], h));
        let k5 = rhs(t + C5 * h, &axpy(y, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)], h));
        let k6 = rhs(t + h, &axpy(y, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)], h));
        let yn = axpy(y, &[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)], h);
        let k7 = rhs(t + h, &yn);
        let err_vec = axpy([c(0.0, 0.0); 2], &[(E1, k1), (E3, k3), (E4, k4), (E5, k5), (E6, k6), (E7, k7)], h);
        let mut err: f64 = 0.0;
        for i in 0..2 {
            let sc = cfg.atol + cfg.rtol * y[i].norm().max(yn[i].norm());
            err = err.max(err_vec[i].norm() / sc);
        }
        if !err.is_finite() {
            h *= 0.1;
            if h < 1e-15 {
                return Err(Error::StepUnderflow(z0 + dz * t));
            }
            continue;
        }
        if err <= 1.0 {
            t += h;
            y = yn;
            k1 = k7;
            let mag = y[0].norm().max(y[1].norm());
            if !(1e-6..=1e6).contains(&mag) {
                let st = ShootState { f: y[0], df: y[1], log_scale }.renormalized();
                y = [st.f, st.df];
                log_scale = st.log_scale;
                k1 = rhs(t, &y);
            }
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= fac;
        if h < 1e-14 && t < 1.0 {
            return Err(Error::StepUnderflow(z0 + dz * t));
        }
    }
    if t < 1.0 {
        return Err(Error::StepUnderflow(z0 + dz * t));
    }
    Ok(ShootState { f: y[0], df: y[1], log_scale }.renormalized())
}

fn distance_to_segment(p: CScalar, a: CScalar, b: CScalar) -> f64 {
    let d = b - a;
    let t = ((p - a) * d.conj()).re / d.norm_sqr();
    (p - (a + d * t.clamp(0.0, 1.0))).norm()
}

fn ray_decay_exponent(m: &Momentum, dir: f64, r: f64, eps: CScalar) -> f64 {
    // crude midpoint rule for int_{r/2}^{r} |sqrt g| |dz| / |eps|
    let n = 64;
    let (lo, hi) = (0.5 * r, r);
    let h = (hi - lo) / n as f64;
    let mut acc = 0.0;
    for k in 0..n {
        let z = CScalar::from_polar(lo + (k as f64 + 0.5) * h, dir);
        acc += m.sq(z).norm().sqrt() * h;
    }
    acc / eps.norm()
}

/// The two rays `(start, z_mid)` used at energy `E`, after the standoff
/// and cut checks and any lengthening of `R_max`.
pub fn rays(model: &ModelSpec, e: CScalar, cfg: &ShootConfig) -> Result<[(CScalar, CScalar); 2]> {
    let (m, eps) = problem_at(model, e);
    let (tl, tr) = model.wedge_centres();
    let mut turning: Vec<CScalar> = match model.family {
        Family::PowerLaw { .. } => model.turning_points()?,
        Family::Quartic { .. } => {
            let Momentum::Quartic { a } = m else { unreachable!("quartic momentum") };
            crate::geometry::quartic_turning_points_complex(a)?.all().to_vec()
        }
    };
    turning.extend(m.branch_point());
    let mut r = cfg.r_max;
    while r < MAX_RAY && ray_decay_exponent(&m, tl, r, eps).min(ray_decay_exponent(&m, tr, r, eps)) < MIN_DECAY_EXPONENT {
        r *= 1.25;
    }
    let shifts = [0.0, -0.05, 0.05, -0.1, 0.1, -0.2, 0.2, -0.3, 0.3, -0.5, -0.8];
    for mid in shifts.iter().map(|s| cfg.z_mid + c(0.0, *s)) {
        let segs = [(CScalar::from_polar(r, tl), mid), (CScalar::from_polar(r, tr), mid)];
        let clear = segs
            .iter()
            .all(|(a, b)| turning.iter().all(|t| distance_to_segment(*t, *a, *b) >= STANDOFF));
        let crosses = segs
            .iter()
            .any(|(a, b)| path_crosses_cut(&ContourPath::straight(*a, *b), model));
        if clear && !crosses {
            return Ok(segs);
        }
    }
    Err(Error::InvalidParameter("no matching point keeps the rays clear of turning points and the cut".into()))
}

/// States of the two decaying solutions at the matching point.
pub fn shoot(model: &ModelSpec, e: CScalar, cfg: &ShootConfig) -> Result<(ShootState, ShootState)> {
    let (m, eps) = problem_at(model, e);
    let [left, right] = rays(model, e, cfg)?;
    let sl = integrate_ray(wkb_init(left.0, eps, &m)?, left, eps, &m, cfg)?;
    let sr = integrate_ray(wkb_init(right.0, eps, &m)?, right, eps, &m, cfg)?;
    Ok((sl, sr))
}

/// Normalized Wronskian of two states, in `[0, 2]` in magnitude.
pub fn wronskian(l: &ShootState, r: &ShootState) -> CScalar {
    let a = l.f * r.df;
    let b = r.f * l.df;
    let n = a.norm().max(b.norm());
    if n == 0.0 {
        return c(0.0, 0.0);
    }
    (a - b) / n
}

/// Mismatch between the two decaying solutions at energy `E`.
pub fn mismatch(e: CScalar, model: &ModelSpec, cfg: &ShootConfig) -> Result<CScalar> {
    let (l, r) = shoot(model, e, cfg)?;
    if (l.f * r.df).norm() == 0.0 && (r.f * l.df).norm() == 0.0 {
        return Err(Error::Singularity(cfg.z_mid));
    }
    Ok(wronskian(&l, &r))
}

fn numeric_record(model: &ModelSpec, e: CScalar, residual: f64) -> EigRecord {
    let (param, eps) = match model.family {
        Family::PowerLaw { p } => (p, e_to_eps(e, p)),
        Family::Quartic { a } => (a, e_to_eps_quartic(e)),
    };
    EigRecord { n: 0, param, eps, e, method: Method::Numeric, residual }
}

/// Eigenvalue nearest `seed_e` by Newton on the mismatch, Muller fallback.
pub fn find_eigen(seed_e: CScalar, model: &ModelSpec, cfg: &ShootConfig) -> Result<EigRecord> {
    let f = |e: CScalar| -> Result<Scaled> { Ok(Scaled { value: mismatch(e, model, cfg)?, scale: 1.0 }) };
    let tol = 1e-9;
    let opts = NewtonOptions { tol, max_iter: 60, fd_step: 1e-6, max_step: 0.5, ..Default::default() };
    let root = match newton(f, seed_e, opts) {
        Ok(r) => r,
        Err(_) => {
            let d = 0.02 * seed_e.norm().max(0.1);
            muller(f, [seed_e - d, seed_e + c(0.0, d), seed_e], tol, 100)?
        }
    };
    let mut e = root.x;
    if e.im.abs() <= 1e-12 * e.norm() {
        e.im = 0.0;
    }
    Ok(numeric_record(model, e, root.residual))
}

/// Like [`find_eigen`] but rejects roots within `1e-7` of `known`.
pub fn find_new_eigen(seed_e: CScalar, model: &ModelSpec, cfg: &ShootConfig, known: &[CScalar]) -> Result<EigRecord> {
    let r = find_eigen(seed_e, model, cfg)?;
    if known.iter().any(|k| (k - r.e).norm() <= 1e-7 * r.e.norm().max(1.0)) {
        return Err(Error::Duplicate(r.e));
    }
    Ok(r)
}

/// Grid step in `E` that resolves neighbouring eigenvalues up to `e_max`.
fn scan_step(model: &ModelSpec, e_max: f64) -> f64 {
    let _ = e_max;
    match model.family {
        Family::PowerLaw { p } if p < 1.5 => 0.025,
        _ => 0.05,
    }
}

/// Eigenvalues with `0 < Re E <= e_max`: minima of `|W|` on a real grid
/// refined by [`find_eigen`], plus any `extra_seeds` (complex seeds in the
/// broken region). Sorted by `Re E`, indexed from 0.
pub fn scan_spectrum_with(model: &ModelSpec, e_max: f64, cfg: &ShootConfig, extra_seeds: &[CScalar]) -> Result<Vec<EigRecord>> {
    if !(e_max > 0.0) {
        return Err(Error::InvalidParameter(format!("E_max must be positive, got {e_max}")));
    }
    let step = scan_step(model, e_max);
    let lo = step.min(0.25);
    let count = ((e_max + 1.0 - lo) / step).ceil() as usize + 1;
    let grid: Vec<f64> = (0..count).map(|k| lo + k as f64 * step).collect();
    let vals: Vec<f64> = grid
        .par_iter()
        .map(|&e| mismatch(c(e, 0.0), model, cfg).map(|w| w.norm()).unwrap_or(f64::INFINITY))
        .collect();
    let mut seeds: Vec<CScalar> = Vec::new();
    for k in 1..grid.len() - 1 {
        if vals[k] <= vals[k - 1] && vals[k] < vals[k + 1] {
            seeds.push(c(grid[k], 0.0));
        }
    }
    seeds.extend_from_slice(extra_seeds);
    let found: Vec<Option<EigRecord>> = seeds.par_iter().map(|s| find_eigen(*s, model, cfg).ok()).collect();
    let mut out: Vec<EigRecord> = Vec::new();
    for r in found.into_iter().flatten() {
        if !(r.e.re > 0.0 && r.e.re <= e_max) || r.residual > 1e-9 {
            continue;
        }
        // Where the Wronskian has lost its precision |W| is tiny everywhere;
        // a genuine root stands out against its neighbourhood.
        let contrast = grid
            .iter()
            .zip(&vals)
            .filter(|(e, v)| (**e - r.e.re).abs() <= 2.0 && v.is_finite())
            .map(|(_, v)| *v)
            .fold(0.0, f64::max);
        if r.residual > 1e-4 * contrast {
            continue;
        }
        if out.iter().any(|k| (k.e - r.e).norm() <= 1e-7 * r.e.norm().max(1.0)) {
            continue;
        }
        out.push(r);
    }
    out.sort_by(|a, b| a.e.re.total_cmp(&b.e.re).then(b.e.im.total_cmp(&a.e.im)));
    for (i, r) in out.iter_mut().enumerate() {
        r.n = i;
    }
    Ok(out)
}

/// [`scan_spectrum_with`] without extra seeds.
pub fn scan_spectrum(model: &ModelSpec, e_max: f64, cfg: &ShootConfig) -> Result<Vec<EigRecord>> {
    scan_spectrum_with(model, e_max, cfg, &[])
}

/// Wedge-centre directions as seen from the shooting module (for tests).
pub fn wedge_directions(model: &ModelSpec) -> (f64, f64) {
    let (l, r) = model.wedge_centres();
    (l.rem_euclid(2.0 * PI), r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic() -> ModelSpec {
        ModelSpec::power_law(2.0).unwrap()
    }

    #[test]
    fn harmonic_init_is_gaussian_slope() {
        let m = harmonic().momentum();
        let eps = c(0.2, 0.0);
        let z = c(-7.0, 0.0);
        let s = wkb_init(z, eps, &m).unwrap();
        // eps f'/f = -z (1 + O(z^-2)) for e^{-z^2 / 2 eps}
        assert!((s.df / s.f - c(7.0, 0.0)).norm() / 7.0 < 0.02, "{}", s.df);
    }

    #[test]
    fn init_is_pt_symmetric() {
        let m = ModelSpec::power_law(3.0).unwrap();
        let (tl, tr) = m.wedge_centres();
        let eps = c(0.3, 0.0);
        let mo = m.momentum();
        let l = wkb_init(CScalar::from_polar(7.0, tl), eps, &mo).unwrap();
        let r = wkb_init(CScalar::from_polar(7.0, tr), eps, &mo).unwrap();
        // f(z) -> conj f(-conj z), so eps f' flips sign under the reflection
        assert!((l.df + r.df.conj()).norm() < 1e-12, "{} {}", l.df, r.df);
    }

    #[test]
    fn inward_integration_grows() {
        let model = harmonic();
        let (m, eps) = problem_at(&model, c(3.0, 0.0));
        let z0 = c(-7.0, 0.0);
        let s = wkb_init(z0, eps, &m).unwrap();
        let out = integrate_ray(s, (z0, c(-6.0, 0.0)), eps, &m, &ShootConfig::default()).unwrap();
        assert!(out.log_scale + out.f.norm().ln() > 0.0);
    }

    #[test]
    fn large_eps_stays_order_one() {
        let model = harmonic();
        let m = model.momentum();
        let eps = c(10.0, 0.0);
        let s = ShootState { f: c(1.0, 0.0), df: c(0.0, 0.0), log_scale: 0.0 };
        let out = integrate_ray(s, (c(-1.0, 0.0), c(0.0, -0.5)), eps, &m, &ShootConfig::default()).unwrap();
        assert!(out.log_scale.abs() < 0.1);
    }

    #[test]
    fn harmonic_mismatch() {
        let model = harmonic();
        let cfg = ShootConfig::default();
        assert!(mismatch(c(3.0, 0.0), &model, &cfg).unwrap().norm() <= 1e-8);
        assert!(mismatch(c(2.0, 0.0), &model, &cfg).unwrap().norm() > 1e-2);
    }

    #[test]
    fn mismatch_is_scale_invariant() {
        let model = harmonic();
        let cfg = ShootConfig::default();
        let (l, r) = shoot(&model, c(2.0, 0.0), &cfg).unwrap();
        let w = wronskian(&l, &r);
        let w2 = wronskian(&l.scaled(c(1000.0, 0.0)), &r);
        assert!((w - w2).norm() < 1e-12);
    }

    #[test]
    fn tolerance_halving_is_converged() {
        let model = ModelSpec::power_law(3.0).unwrap();
        let cfg = ShootConfig::default();
        let (m, eps) = problem_at(&model, c(4.0, 0.0));
        let [left, _] = rays(&model, c(4.0, 0.0), &cfg).unwrap();
        let s = wkb_init(left.0, eps, &m).unwrap();
        let a = integrate_ray(s, left, eps, &m, &cfg).unwrap();
        let b = integrate_ray(s, left, eps, &m, &cfg.with_rtol(0.5e-10)).unwrap();
        // align the scales before comparing
        let k = (a.log_scale - b.log_scale).exp();
        let (fa, fb) = (a.f, b.f / k);
        let ratio = a.df / a.f - b.df / b.f;
        assert!(ratio.norm() < 1e-8);
        assert!(((fa - fb).norm() / fa.norm()) < 1e-8 || ratio.norm() < 1e-8);
    }

    #[test]
    fn harmonic_seeds_converge() {
        let model = harmonic();
        let cfg = ShootConfig::for_model(&model);
        for n in 0..6 {
            let target = 2.0 * n as f64 + 1.0;
            let r = find_eigen(c(target + 0.3, 0.0), &model, &cfg).unwrap();
            assert!((r.e - c(target, 0.0)).norm() < 1e-6, "{:?}", r);
        }
    }
}
