//! Stokes wedges, turning points, the branch cut and Stokes-line tracing.

use std::f64::consts::PI;

use crate::action::{integrate_momentum, BranchSeed, ContourPath, Momentum};
use crate::error::{Error, Result};
use crate::special::CScalar;

/// Radius beyond which a traced line is considered to have escaped.
pub const R_ESCAPE: f64 = 8.0;
/// Radius of the sampling circle used to find seed directions.
pub const SEED_RADIUS: f64 = 1e-3;
/// Largest step of the line tracer.
const H_MAX: f64 = 0.01;
/// Target for the transverse corrector.
const CORRECTOR_TOL: f64 = 1e-10;
/// `|g|` below which the tracer has run into another turning point.
const SINGULAR_TOL: f64 = 1e-8;

fn c(re: f64, im: f64) -> CScalar {
    CScalar::new(re, im)
}

/// Hamiltonian family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `-eps^2 f'' - (i z)^p f = f`.
    PowerLaw { p: f64 },
    /// `-eps^2 f'' + (z^4 + i a z) f = f`.
    Quartic { a: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub family: Family,
    /// Direction of the branch cut ray from `z = 0`.
    pub branch_cut_dir: f64,
}

impl ModelSpec {
    pub fn power_law(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!("exponent p must be >= 1, got {p}")));
        }
        Ok(ModelSpec { family: Family::PowerLaw { p }, branch_cut_dir: 0.5 * PI })
    }

    pub fn quartic(a: f64) -> Result<Self> {
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::InvalidParameter(format!("quartic coupling must be >= 0, got {a}")));
        }
        Ok(ModelSpec { family: Family::Quartic { a }, branch_cut_dir: 0.5 * PI })
    }

    pub fn with_cut_direction(mut self, angle: f64) -> Self {
        self.branch_cut_dir = angle;
        self
    }

    pub fn momentum(&self) -> Momentum {
        Momentum::of(self)
    }

    /// `g(z)`, with `(phi')^2 = g`.
    pub fn momentum_sq(&self, z: CScalar) -> CScalar {
        self.momentum().sq(z)
    }

    /// Directions `(left, right)` of the rays carrying the decay conditions.
    pub fn wedge_centres(&self) -> (f64, f64) {
        match self.family {
            Family::PowerLaw { p } => {
                let (l, r, _) = wedge_angles(p);
                (l, r)
            }
            Family::Quartic { .. } => (PI, 0.0),
        }
    }

    /// Branch point that is not a turning point (`z = 0` for non-integer p).
    pub fn branch_point(&self) -> Option<CScalar> {
        self.momentum().branch_point()
    }

    /// Turning points relevant to the eigenvalue condition.
    pub fn turning_points(&self) -> Result<Vec<CScalar>> {
        Ok(match self.family {
            Family::PowerLaw { p } => {
                let (a, b) = turning_points(p);
                if a == b {
                    vec![a]
                } else {
                    vec![a, b]
                }
            }
            Family::Quartic { a } => {
                let t = quartic_turning_points(a)?;
                vec![t.a, t.b, t.c, t.d]
            }
        })
    }
}

/// `(theta_left, theta_right, width)` of the Stokes wedges.
pub fn wedge_angles(p: f64) -> (f64, f64, f64) {
    let k = 2.0 / (p + 2.0);
    (PI * (-0.5 - k), PI * (-0.5 + k), PI * k)
}

/// `(z_A, z_B) = (-i e^{-i pi/p}, -i e^{i pi/p})`.
pub fn turning_points(p: f64) -> (CScalar, CScalar) {
    let (s, co) = (PI / p).sin_cos();
    (c(-s, -co), c(s, -co))
}

/// Roots of `z^4 + i a z - 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticTurningPoints {
    /// Largest real part.
    pub a: CScalar,
    /// Smallest real part.
    pub b: CScalar,
    /// Lower root near the imaginary axis.
    pub c: CScalar,
    /// Upper root near the imaginary axis.
    pub d: CScalar,
}

impl QuarticTurningPoints {
    pub fn all(&self) -> [CScalar; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

fn quartic_poly(z: CScalar, a: CScalar) -> CScalar {
    z * z * z * z + CScalar::i() * a * z - 1.0
}

fn quartic_poly_derivative(z: CScalar, a: CScalar) -> CScalar {
    4.0 * z * z * z + CScalar::i() * a
}

/// Durand-Kerner on `z^4 + i a z - 1` for complex coupling.
pub fn quartic_turning_points_complex(a: CScalar) -> Result<QuarticTurningPoints> {
    let mut z: Vec<CScalar> = (0..4)
        .map(|k| CScalar::from_polar(1.3, 2.0 * PI * k as f64 / 4.0 + 0.4))
        .collect();
    let mut converged = false;
    for _ in 0..200 {
        let mut change: f64 = 0.0;
        for i in 0..4 {
            let mut den = c(1.0, 0.0);
            for j in 0..4 {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = quartic_poly(z[i], a) / den;
            z[i] -= step;
            change = change.max(step.norm());
        }
        if change < 1e-15 {
            converged = true;
            break;
        }
    }
    for r in z.iter_mut() {
        for _ in 0..3 {
            let d = quartic_poly_derivative(*r, a);
            if d.norm() > 0.0 {
                *r -= quartic_poly(*r, a) / d;
            }
        }
    }
    if !converged && z.iter().any(|r| quartic_poly(*r, a).norm() > 1e-12) {
        return Err(Error::NoConvergence { what: "Durand-Kerner", iterations: 200 });
    }
    if a.im == 0.0 {
        for r in z.iter_mut() {
            if r.re.abs() < 1e-10 {
                r.re = 0.0;
            }
        }
    }
    z.sort_by(|x, y| x.re.total_cmp(&y.re));
    let (b, mid, a_root) = (z[0], [z[1], z[2]], z[3]);
    let (lo, hi) = if mid[0].im <= mid[1].im { (mid[0], mid[1]) } else { (mid[1], mid[0]) };
    Ok(QuarticTurningPoints { a: a_root, b, c: lo, d: hi })
}

/// Labeled roots of `z^4 + i a z = 1` for real `a >= 0`.
pub fn quartic_turning_points(a: f64) -> Result<QuarticTurningPoints> {
    if !(a >= 0.0) {
        return Err(Error::InvalidParameter(format!("quartic coupling must be >= 0, got {a}")));
    }
    quartic_turning_points_complex(c(a, 0.0))
}

/// Intersection of segment `[a, b]` with the ray `{r e^{i dir}, r > 0}`.
pub fn segment_ray_intersection(a: CScalar, b: CScalar, dir: f64) -> Option<CScalar> {
    let rot = CScalar::from_polar(1.0, -dir);
    let (ra, rb) = (a * rot, b * rot);
    let tol = 1e-14;
    if ra.im.abs() <= tol && rb.im.abs() <= tol {
        // collinear with the ray's line
        let hi = ra.re.max(rb.re);
        if hi > tol {
            let x = ra.re.min(rb.re).max(2.0 * tol).min(hi);
            return Some(c(x, 0.0) * rot.conj());
        }
        return None;
    }
    if (ra.im > tol && rb.im > tol) || (ra.im < -tol && rb.im < -tol) {
        return None;
    }
    let t = if (ra.im - rb.im).abs() > 0.0 { ra.im / (ra.im - rb.im) } else { 0.0 };
    let x = ra.re + t.clamp(0.0, 1.0) * (rb.re - ra.re);
    if x > tol {
        Some(c(x, 0.0) * rot.conj())
    } else {
        None
    }
}

/// Whether any segment of `path` meets the branch cut ray of `model`.
pub fn path_crosses_cut(path: &ContourPath, model: &ModelSpec) -> bool {
    match model.family {
        Family::Quartic { .. } => false,
        Family::PowerLaw { .. } => path
            .nodes
            .windows(2)
            .any(|w| segment_ray_intersection(w[0], w[1], model.branch_cut_dir).is_some()),
    }
}

/// Which family of equal-phase curves to follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineKind {
    /// `Im chi = 0`, `Re chi >= 0`.
    Stokes,
    /// `Re chi = 0`, `Im chi >= 0`.
    AntiStokes,
}

impl LineKind {
    fn phase(self) -> CScalar {
        match self {
            LineKind::Stokes => c(1.0, 0.0),
            LineKind::AntiStokes => CScalar::i(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    ArcLength,
    Escaped,
    /// Crossed the branch cut at the given point (the last trace point).
    CutHit(CScalar),
    /// Ran into another zero of the momentum.
    Singularity(CScalar),
    /// The caller's stop condition fired.
    Stopped,
}

/// Polyline on which `e^{-i w} chi` is real and increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct StokesTrace {
    pub origin: CScalar,
    pub kind: LineKind,
    pub points: Vec<CScalar>,
    /// `|Im(e^{-i w} chi)|` per point.
    pub residuals: Vec<f64>,
    pub chi: Vec<CScalar>,
    pub termination: Termination,
}

impl StokesTrace {
    pub fn arclength(&self) -> f64 {
        self.points.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    pub fn as_path(&self) -> Result<ContourPath> {
        let mut nodes: Vec<CScalar> = Vec::with_capacity(self.points.len() + 1);
        nodes.push(self.origin);
        for &z in &self.points {
            if *nodes.last().expect("non-empty") != z {
                nodes.push(z);
            }
        }
        ContourPath::new(nodes)
    }
}

fn is_zero_of(model: &ModelSpec, z: CScalar) -> bool {
    model.momentum().is_turning_point(z)
}

/// Singulant from `origin` to `z` along a straight segment, with the branch
/// at `origin` fixed (`+1` at a branch point, principal at a regular point)
/// or, at a turning point, the branch at `z` principal.
fn chi_from_origin(model: &ModelSpec, origin: CScalar, z: CScalar) -> Result<(CScalar, CScalar)> {
    let m = model.momentum();
    let r = integrate_momentum(&m, &ContourPath::straight(origin, z))?;
    let v = r.end_branch.ok_or(Error::Singularity(z))?;
    Ok((2.0 * CScalar::i() * r.value, v))
}

/// Directions at `origin` along which an equal-phase line of `kind` leaves.
pub fn seed_directions_of(origin: CScalar, model: &ModelSpec, kind: LineKind) -> Vec<f64> {
    let turning = is_zero_of(model, origin);
    let w = kind.phase();
    // For a turning point chi^2 is single valued around the origin.
    let probe = |theta: f64| -> Option<CScalar> {
        let z = origin + CScalar::from_polar(SEED_RADIUS, theta);
        let (chi, _) = chi_from_origin(model, origin, z).ok()?;
        Some(if turning { chi * chi / (w * w) } else { chi / w })
    };
    let n = 720;
    let step = 2.0 * PI / n as f64;
    let samples: Vec<(f64, Option<CScalar>)> =
        (0..=n).map(|k| -PI + k as f64 * step).map(|t| (t, probe(t))).collect();
    let mut out = Vec::new();
    for win in samples.windows(2) {
        let ((t0, v0), (t1, v1)) = (win[0], win[1]);
        let (Some(v0), Some(v1)) = (v0, v1) else { continue };
        if v0.im == 0.0 && v0.re > 0.0 {
            out.push(t0);
            continue;
        }
        if v0.im.signum() == v1.im.signum() || v1.im == 0.0 {
            continue;
        }
        let (mut lo, mut hi, mut flo) = (t0, t1, v0.im);
        for _ in 0..50 {
            let mid = 0.5 * (lo + hi);
            let Some(fm) = probe(mid) else { break };
            if fm.im == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if fm.im.signum() == flo.signum() {
                lo = mid;
                flo = fm.im;
            } else {
                hi = mid;
            }
        }
        let theta = 0.5 * (lo + hi);
        if probe(theta).is_some_and(|v| v.re > 0.0) {
            out.push(theta);
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
    if out.len() > 1 && (out[0] + 2.0 * PI - out[out.len() - 1]).abs() < 1e-6 {
        out.pop();
    }
    out
}

/// Stokes-line directions at `origin`.
pub fn seed_directions(origin: CScalar, model: &ModelSpec) -> Vec<f64> {
    seed_directions_of(origin, model, LineKind::Stokes)
}

fn chi_step(model: &ModelSpec, z0: CScalar, z1: CScalar, v0: CScalar) -> Result<(CScalar, CScalar)> {
    let m = model.momentum();
    let path = ContourPath::straight(z0, z1).with_order(12).with_seed(BranchSeed::Start(v0)).allow_cut();
    let r = integrate_momentum(&m, &path)?;
    let v = r.end_branch.ok_or(Error::Singularity(z1))?;
    Ok((2.0 * CScalar::i() * r.value, v))
}

/// Traces an equal-phase line of `kind` from `origin` along `seed_direction`
/// until `max_arclen`, escape past `R_ESCAPE`, the cut, another singularity,
/// or `stop(z)`.
pub fn trace_line(
    origin: CScalar,
    model: &ModelSpec,
    seed_direction: f64,
    kind: LineKind,
    max_arclen: f64,
    stop: impl Fn(CScalar) -> bool,
) -> Result<StokesTrace> {
    let w = kind.phase();
    let m = model.momentum();
    let cut = m.cut_direction();
    let z1 = origin + CScalar::from_polar(SEED_RADIUS, seed_direction);
    let (mut chi, mut v) = chi_from_origin(model, origin, z1)?;
    if (chi / w).re < 0.0 && is_zero_of(model, origin) {
        chi = -chi;
        v = -v;
    }
    let mut z = z1;
    let correct = |z: &mut CScalar, chi: &mut CScalar, v: &mut CScalar| -> Result<()> {
        for _ in 0..20 {
            let im = (*chi / w).im;
            if im.abs() <= CORRECTOR_TOL {
                return Ok(());
            }
            let dchi = 2.0 * CScalar::i() * *v;
            let delta = -CScalar::i() * w * im / dchi;
            let (dc, nv) = chi_step(model, *z, *z + delta, *v)?;
            *z += delta;
            *chi += dc;
            *v = nv;
        }
        if (*chi / w).im.abs() <= CORRECTOR_TOL {
            Ok(())
        } else {
            Err(Error::CorrectorDivergence(*z))
        }
    };
    correct(&mut z, &mut chi, &mut v)?;
    let mut points = vec![z];
    let mut residuals = vec![(chi / w).im.abs()];
    let mut chis = vec![chi];
    let mut arc = (z - origin).norm();
    let max_steps = 400_000;
    for _ in 0..max_steps {
        if arc >= max_arclen {
            return Ok(trace(origin, kind, points, residuals, chis, Termination::ArcLength));
        }
        if stop(z) {
            return Ok(trace(origin, kind, points, residuals, chis, Termination::Stopped));
        }
        let g = m.sq(z);
        if g.norm() < SINGULAR_TOL {
            return Ok(trace(origin, kind, points, residuals, chis, Termination::Singularity(z)));
        }
        let curv = (m.sq_derivative(z) / (2.0 * g)).norm();
        let h = if curv > 0.0 { H_MAX.min(0.1 / curv) } else { H_MAX };
        let dchi = 2.0 * CScalar::i() * v;
        let dir = w / dchi;
        let dz = dir / dir.norm() * h;
        let mut zn = z + dz;
        if let Some(hit) = cut.and_then(|d| segment_ray_intersection(z, zn, d)) {
            zn = hit;
            let (dc, _) = chi_step(model, z, zn, v)?;
            let cn = chi + dc;
            points.push(zn);
            residuals.push((cn / w).im.abs());
            chis.push(cn);
            return Ok(trace(origin, kind, points, residuals, chis, Termination::CutHit(zn)));
        }
        let (dc, mut vn) = chi_step(model, z, zn, v)?;
        let mut cn = chi + dc;
        correct(&mut zn, &mut cn, &mut vn)?;
        if let Some(hit) = cut.and_then(|d| segment_ray_intersection(z, zn, d)) {
            let (dc, _) = chi_step(model, z, hit, v)?;
            points.push(hit);
            residuals.push(((chi + dc) / w).im.abs());
            chis.push(chi + dc);
            return Ok(trace(origin, kind, points, residuals, chis, Termination::CutHit(hit)));
        }
        arc += (zn - z).norm();
        z = zn;
        chi = cn;
        v = vn;
        points.push(z);
        residuals.push((chi / w).im.abs());
        chis.push(chi);
        if z.norm() > R_ESCAPE {
            return Ok(trace(origin, kind, points, residuals, chis, Termination::Escaped));
        }
    }
    Err(Error::NoConvergence { what: "Stokes-line tracer", iterations: max_steps })
}

fn trace(
    origin: CScalar,
    kind: LineKind,
    points: Vec<CScalar>,
    residuals: Vec<f64>,
    chi: Vec<CScalar>,
    termination: Termination,
) -> StokesTrace {
    StokesTrace { origin, kind, points, residuals, chi, termination }
}

/// Stokes line (`Im chi = 0`, `Re chi` increasing) from `origin`.
pub fn trace_stokes_line(origin: CScalar, model: &ModelSpec, seed_direction: f64, max_arclen: f64) -> Result<StokesTrace> {
    trace_line(origin, model, seed_direction, LineKind::Stokes, max_arclen, |_| false)
}

/// Curve from `z_A` toward `z_B` on which `phi - phi(z_A)` is real, traced
/// to the imaginary axis and completed by the reflection `z -> -conj z`.
pub fn real_phi_path(p: f64) -> Result<ContourPath> {
    let model = ModelSpec::power_law(p)?;
    let (za, zb) = turning_points(p);
    if za == zb {
        return ContourPath::new(vec![za, za + c(1e-300, 0.0)]);
    }
    let dirs = seed_directions_of(za, &model, LineKind::AntiStokes);
    let toward = (zb - za).arg();
    let best = dirs
        .iter()
        .copied()
        .min_by(|a, b| angle_gap(*a, toward).total_cmp(&angle_gap(*b, toward)))
        .ok_or_else(|| Error::NoSignChange("no anti-Stokes direction at z_A".into()))?;
    let t = trace_line(za, &model, best, LineKind::AntiStokes, 2.0 * R_ESCAPE, |z| z.re >= 0.0)?;
    let mut nodes = vec![za];
    nodes.extend(t.points.iter().copied());
    let last = *nodes.last().expect("non-empty");
    let axis = c(0.0, last.im);
    if matches!(t.termination, Termination::Stopped) && last != axis {
        let n = nodes.len();
        nodes[n - 1] = axis;
    }
    let mirrored: Vec<CScalar> = nodes.iter().rev().skip(1).map(|z| -z.conj()).collect();
    nodes.extend(mirrored);
    nodes.dedup();
    ContourPath::new(nodes)
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn wedges() {
        let (l, r, w) = wedge_angles(2.0);
        assert!(close(l, -PI, 1e-15) && close(r, 0.0, 1e-15) && close(w, PI / 2.0, 1e-15));
        let (l, r, w) = wedge_angles(1.0);
        assert!(close(l, -7.0 * PI / 6.0, 1e-15) && close(r, PI / 6.0, 1e-15) && close(w, 2.0 * PI / 3.0, 1e-15));
        let (l, r, _) = wedge_angles(1e12);
        assert!(close(l, -PI / 2.0, 1e-10) && close(r, -PI / 2.0, 1e-10));
    }

    #[test]
    fn turning_point_values() {
        let (a, b) = turning_points(2.0);
        assert!((a - c(-1.0, 0.0)).norm() < 1e-15 && (b - c(1.0, 0.0)).norm() < 1e-15);
        let (a, b) = turning_points(1.0);
        assert!((a - CScalar::i()).norm() < 1e-15 && (b - CScalar::i()).norm() < 1e-15);
        let (a, b) = turning_points(3.0);
        assert!((a - CScalar::from_polar(1.0, -5.0 * PI / 6.0)).norm() < 1e-15);
        assert!((b - CScalar::from_polar(1.0, -PI / 6.0)).norm() < 1e-15);
    }

    #[test]
    fn quartic_roots_at_zero_coupling() {
        let t = quartic_turning_points(0.0).unwrap();
        assert!((t.a - c(1.0, 0.0)).norm() < 1e-13);
        assert!((t.b - c(-1.0, 0.0)).norm() < 1e-13);
        assert!((t.c - c(0.0, -1.0)).norm() < 1e-13);
        assert!((t.d - c(0.0, 1.0)).norm() < 1e-13);
    }

    #[test]
    fn quartic_roots_at_unit_coupling() {
        let t = quartic_turning_points(1.0).unwrap();
        assert_eq!(t.c.re, 0.0);
        assert_eq!(t.d.re, 0.0);
        assert!(t.c.im < 0.0 && t.d.im > 0.0);
        assert!((t.a.im - t.b.im).abs() < 1e-12);
        assert!(t.a.re > 0.0 && t.b.re < 0.0);
    }

    #[test]
    fn cut_crossing_examples() {
        let m = ModelSpec::power_law(1.5).unwrap();
        let below = ContourPath::straight(c(-2.0, -0.1), c(2.0, -0.1));
        assert!(!path_crosses_cut(&below, &m));
        let above = ContourPath::straight(CScalar::from_polar(1.0, 0.75 * PI), CScalar::from_polar(1.0, 0.25 * PI));
        assert!(path_crosses_cut(&above, &m));
        let from_origin = ContourPath::straight(c(0.0, 0.0), c(0.4, -0.9));
        assert!(!path_crosses_cut(&from_origin, &m));
    }

    #[test]
    fn real_phi_path_crosses_cut_only_below_two() {
        let p13 = real_phi_path(1.3).unwrap();
        assert!(path_crosses_cut(&p13, &ModelSpec::power_law(1.3).unwrap()));
        for p in [2.5, 3.0] {
            let path = real_phi_path(p).unwrap();
            assert!(!path_crosses_cut(&path, &ModelSpec::power_law(p).unwrap()), "p = {p}");
        }
    }

    #[test]
    fn p2_stokes_line_runs_along_real_axis() {
        let m = ModelSpec::power_law(2.0).unwrap();
        let dirs = seed_directions(c(1.0, 0.0), &m);
        assert_eq!(dirs.len(), 3, "{dirs:?}");
        let d0 = dirs.iter().copied().min_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap();
        assert!(d0.abs() < 1e-6);
        let t = trace_stokes_line(c(1.0, 0.0), &m, d0, 20.0).unwrap();
        assert_eq!(t.termination, Termination::Escaped);
        assert!(t.points.iter().all(|z| z.im.abs() <= 1e-8));
        assert!(t.residuals.iter().all(|r| *r <= 1e-8));
    }

    #[test]
    fn three_directions_at_p3_turning_points() {
        let m = ModelSpec::power_law(3.0).unwrap();
        let (za, zb) = turning_points(3.0);
        for z in [za, zb] {
            let d = seed_directions(z, &m);
            assert_eq!(d.len(), 3, "{d:?}");
            for k in 0..3 {
                let gap = (d[(k + 1) % 3] - d[k]).rem_euclid(2.0 * PI);
                assert!((gap - 2.0 * PI / 3.0).abs() < 0.05, "{d:?}");
            }
        }
    }

    #[test]
    fn branch_point_line_is_negative_imaginary_axis() {
        let m = ModelSpec::power_law(1.3).unwrap();
        let d = seed_directions(c(0.0, 0.0), &m);
        assert_eq!(d.len(), 1, "{d:?}");
        assert!((d[0] + PI / 2.0).abs() < 1e-6);
        let t = trace_stokes_line(c(0.0, 0.0), &m, d[0], 3.0).unwrap();
        assert!(t.points.iter().all(|z| z.re.abs() < 1e-8 && z.im < 0.0));
        // crosses the horizontal continuation path through -0.5 i
        assert!(t.points.iter().any(|z| z.im < -0.5));
    }

    #[test]
    fn quartic_line_from_lower_axis_root_crosses_real_axis() {
        let m = ModelSpec::quartic(1.0).unwrap();
        let zc = quartic_turning_points(1.0).unwrap().c;
        let dirs = seed_directions(zc, &m);
        assert_eq!(dirs.len(), 3, "{dirs:?}");
        let crosses = dirs.iter().any(|&d| {
            let t = trace_stokes_line(zc, &m, d, 6.0).unwrap();
            t.points.iter().any(|z| z.im > 0.0)
        });
        assert!(crosses);
    }

    #[test]
    fn traces_keep_real_chi_increasing() {
        let m = ModelSpec::power_law(3.0).unwrap();
        let (za, _) = turning_points(3.0);
        for d in seed_directions(za, &m) {
            let t = trace_stokes_line(za, &m, d, 6.0).unwrap();
            assert!(t.residuals.iter().all(|r| *r <= 1e-8));
            assert!(t.chi.iter().all(|x| x.re >= -1e-10));
            assert!(t.chi.windows(2).all(|w| w[1].re >= w[0].re - 1e-12));
        }
    }

    proptest! {
        #[test]
        fn turning_points_are_pt_symmetric_roots(p in 1.0f64..8.0) {
            let (za, zb) = turning_points(p);
            prop_assert!((zb + za.conj()).norm() < 1e-15);
            let m = Momentum::PowerLaw { p, cut: 0.5 * PI };
            prop_assert!(m.sq(za).norm() < 1e-12);
            prop_assert!(m.sq(zb).norm() < 1e-12);
        }

        #[test]
        fn wedge_gap_is_twice_width(p in 1.0f64..50.0) {
            let (l, r, w) = wedge_angles(p);
            prop_assert!((r - l - 2.0 * w).abs() < 1e-13);
        }

        #[test]
        fn quartic_roots_residual_and_symmetry(a in 0.0f64..4.0) {
            let t = quartic_turning_points(a).unwrap();
            for r in t.all() {
                prop_assert!(quartic_poly(r, c(a, 0.0)).norm() <= 1e-12);
                let mirror = -r.conj();
                prop_assert!(t.all().iter().any(|s| (s - mirror).norm() < 1e-10));
            }
        }

        #[test]
        fn straight_segment_between_turning_points_crosses_cut_iff_below_two(p in 1.05f64..5.0) {
            prop_assume!((p - 2.0).abs() > 1e-3);
            let (za, zb) = turning_points(p);
            let m = ModelSpec::power_law(p).unwrap();
            prop_assert_eq!(path_crosses_cut(&ContourPath::straight(za, zb), &m), p < 2.0);
        }
    }
}
