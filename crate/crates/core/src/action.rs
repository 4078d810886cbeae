//! Contour integrals of the local momentum `sqrt(1 + (i t)^p)` (or
//! `sqrt(1 - t^4 - i a t)`): the WKB action, the singulant, `R(p)` and the
//! quartic `U(a) + i V(a)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{self, Family, ModelSpec};
use crate::quad::GaussLegendre;
use crate::special::{gamma_real, principal_sqrt, BranchState, CScalar};

/// Default Gauss-Legendre order per path piece.
pub const DEFAULT_ORDER: usize = 40;

/// `|g(t)|` below which a path end point is treated as a turning point.
const ZERO_TOL: f64 = 1e-9;
/// Longest straight piece integrated with one rule; keeps branch tracking
/// samples dense.
const MAX_PIECE: f64 = 0.5;
/// Fraction of a segment given to an end-point substitution.
const END_FRACTION: f64 = 0.1;

fn c(re: f64, im: f64) -> CScalar {
    CScalar::new(re, im)
}

/// The integrand family, with the coupling allowed to be complex so the
/// quartic action can be continued into complex `eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Momentum {
    /// `1 + (i t)^p`, cut of `(i t)^p` along the ray at angle `cut`.
    PowerLaw { p: f64, cut: f64 },
    /// `1 - t^4 - i a t`.
    Quartic { a: CScalar },
}

impl Momentum {
    pub fn of(model: &ModelSpec) -> Self {
        match model.family {
            Family::PowerLaw { p } => Momentum::PowerLaw { p, cut: model.branch_cut_dir },
            Family::Quartic { a } => Momentum::Quartic { a: c(a, 0.0) },
        }
    }

    /// `(i t)^p` with the branch cut along the configured ray.
    pub fn ipow(p: f64, cut: f64, t: CScalar) -> CScalar {
        let w = CScalar::i() * t;
        if w.re == 0.0 && w.im == 0.0 {
            return c(0.0, 0.0);
        }
        // arg(i t) lies in (cut + pi/2 - 2 pi, cut + pi/2]
        let hi = cut + 0.5 * PI;
        let mut arg = w.im.atan2(w.re);
        while arg > hi {
            arg -= 2.0 * PI;
        }
        while arg <= hi - 2.0 * PI {
            arg += 2.0 * PI;
        }
        if (cut - 0.5 * PI).abs() < 1e-15 && w.im == 0.0 && w.re < 0.0 {
            arg = PI;
        }
        CScalar::from_polar((p * w.norm().ln()).exp(), p * arg)
    }

    /// Squared momentum `g(t)`; the eikonal reads `(phi')^2 = g`.
    pub fn sq(&self, t: CScalar) -> CScalar {
        match *self {
            Momentum::PowerLaw { p, cut } => 1.0 + Self::ipow(p, cut, t),
            Momentum::Quartic { a } => 1.0 - t * t * t * t - CScalar::i() * a * t,
        }
    }

    /// `g'(t)`.
    pub fn sq_derivative(&self, t: CScalar) -> CScalar {
        match *self {
            Momentum::PowerLaw { p, cut } => {
                if t.norm() == 0.0 {
                    return if p == 1.0 { CScalar::i() } else { c(0.0, 0.0) };
                }
                // d/dt (i t)^p = p (i t)^p / t
                p * Self::ipow(p, cut, t) / t
            }
            Momentum::Quartic { a } => -4.0 * t * t * t - CScalar::i() * a,
        }
    }

    /// Branch point of the integrand that is not a turning point.
    pub fn branch_point(&self) -> Option<CScalar> {
        match *self {
            Momentum::PowerLaw { p, .. } if p.fract() != 0.0 => Some(c(0.0, 0.0)),
            _ => None,
        }
    }

    pub fn cut_direction(&self) -> Option<f64> {
        match *self {
            Momentum::PowerLaw { p, cut } if p.fract() != 0.0 => Some(cut),
            _ => None,
        }
    }

    pub fn is_turning_point(&self, t: CScalar) -> bool {
        self.sq(t).norm() < ZERO_TOL
    }
}

/// Where the square-root branch of the integrand is fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BranchSeed {
    /// Principal root at the first node, or at the last node when the
    /// first one is a turning point.
    Principal,
    /// Integrand value at the first node.
    Start(CScalar),
    /// Integrand value at the last node.
    End(CScalar),
}

/// Polyline in the complex plane along which the action is integrated.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourPath {
    pub nodes: Vec<CScalar>,
    /// Gauss-Legendre order per piece.
    pub order: usize,
    pub seed: BranchSeed,
    /// Set when the path is allowed to cross the branch cut.
    pub cut_allowed: bool,
}

impl ContourPath {
    pub fn new(nodes: Vec<CScalar>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidParameter("a contour needs at least two nodes".into()));
        }
        if nodes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("contour node is not finite".into()));
        }
        if nodes.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("consecutive contour nodes coincide".into()));
        }
        Ok(ContourPath { nodes, order: DEFAULT_ORDER, seed: BranchSeed::Principal, cut_allowed: false })
    }

    /// Straight segment; `a == b` is allowed and integrates to zero.
    pub fn straight(a: CScalar, b: CScalar) -> Self {
        ContourPath { nodes: vec![a, b], order: DEFAULT_ORDER, seed: BranchSeed::Principal, cut_allowed: false }
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }

    pub fn with_seed(mut self, seed: BranchSeed) -> Self {
        self.seed = seed;
        self
    }

    pub fn allow_cut(mut self) -> Self {
        self.cut_allowed = true;
        self
    }

    pub fn start(&self) -> CScalar {
        self.nodes[0]
    }

    pub fn end(&self) -> CScalar {
        *self.nodes.last().expect("non-empty path")
    }

    pub fn reversed(&self) -> Self {
        let mut nodes = self.nodes.clone();
        nodes.reverse();
        let seed = match self.seed {
            BranchSeed::Principal => BranchSeed::Principal,
            BranchSeed::Start(v) => BranchSeed::End(v),
            BranchSeed::End(v) => BranchSeed::Start(v),
        };
        ContourPath { nodes, order: self.order, seed, cut_allowed: self.cut_allowed }
    }

    /// Concatenation; the branch seed of `self` is kept.
    pub fn join(&self, other: &ContourPath) -> Result<Self> {
        if (self.end() - other.start()).norm() > 1e-14 {
            return Err(Error::InvalidParameter("joined contours do not meet".into()));
        }
        let mut nodes = self.nodes.clone();
        nodes.extend_from_slice(&other.nodes[1..]);
        Ok(ContourPath {
            nodes,
            order: self.order,
            seed: self.seed,
            cut_allowed: self.cut_allowed || other.cut_allowed,
        })
    }
}

/// Result of an integration together with the branch value at the end.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: CScalar,
    /// Square-root value at the last node; `None` when it is a turning point.
    pub end_branch: Option<CScalar>,
}

#[derive(Debug, Clone, Copy)]
enum Map {
    Linear,
    /// Fourth-power grading toward the start (branch point there).
    GradedStart,
    /// Square-root substitution toward the end (turning point there).
    SqrtEnd,
    /// Fourth-power grading toward the end (branch point there).
    GradedEnd,
}

fn map_point(map: Map, t0: CScalar, t1: CScalar, tau: f64) -> (CScalar, CScalar) {
    let d = t1 - t0;
    match map {
        Map::Linear => (t0 + d * tau, d),
        Map::GradedStart => (t0 + d * tau.powi(4), d * (4.0 * tau.powi(3))),
        Map::SqrtEnd => {
            let s = 1.0 - tau;
            (t1 - d * (s * s), d * (2.0 * s))
        }
        Map::GradedEnd => {
            let s = 1.0 - tau;
            (t1 - d * s.powi(4), d * (4.0 * s.powi(3)))
        }
    }
}

fn integrate_piece(
    m: &Momentum,
    rule: &GaussLegendre,
    map: Map,
    t0: CScalar,
    t1: CScalar,
    state: &mut BranchState,
) -> Result<CScalar> {
    let mut acc = c(0.0, 0.0);
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let tau = 0.5 * (x + 1.0);
        let (t, jac) = map_point(map, t0, t1, tau);
        let root = state.sqrt(m.sq(t))?;
        acc += root * jac * *w;
    }
    Ok(acc * 0.5)
}

fn is_branch_point(m: &Momentum, t: CScalar) -> bool {
    m.branch_point().is_some_and(|b| (t - b).norm() < 1e-300)
}

fn integrate_segment(
    m: &Momentum,
    rule: &GaussLegendre,
    a: CScalar,
    b: CScalar,
    state: &mut BranchState,
) -> Result<CScalar> {
    if a == b {
        return Ok(c(0.0, 0.0));
    }
    let d = b - a;
    let mut pieces: Vec<(Map, f64, f64)> = Vec::new();
    let mut s0 = 0.0;
    let mut s1 = 1.0;
    let start_piece = if is_branch_point(m, a) {
        s0 = END_FRACTION;
        Some((Map::GradedStart, 0.0, END_FRACTION))
    } else {
        None
    };
    let end_piece = if m.is_turning_point(b) {
        s1 = 1.0 - END_FRACTION;
        Some((Map::SqrtEnd, s1, 1.0))
    } else if is_branch_point(m, b) {
        s1 = 1.0 - END_FRACTION;
        Some((Map::GradedEnd, s1, 1.0))
    } else {
        None
    };
    if let Some(pc) = start_piece {
        pieces.push(pc);
    }
    let len = d.norm() * (s1 - s0);
    let chunks = ((len / MAX_PIECE).ceil() as usize).max(1);
    for k in 0..chunks {
        let u0 = s0 + (s1 - s0) * k as f64 / chunks as f64;
        let u1 = s0 + (s1 - s0) * (k + 1) as f64 / chunks as f64;
        pieces.push((Map::Linear, u0, u1));
    }
    if let Some(pc) = end_piece {
        pieces.push(pc);
    }
    let mut acc = c(0.0, 0.0);
    for (map, u0, u1) in pieces {
        acc += integrate_piece(m, rule, map, a + d * u0, a + d * u1, state)?;
    }
    Ok(acc)
}

/// First point where the polyline meets the cut ray, if any.
pub fn cut_hit(m: &Momentum, nodes: &[CScalar]) -> Option<CScalar> {
    let dir = m.cut_direction()?;
    nodes
        .windows(2)
        .find_map(|w| geometry::segment_ray_intersection(w[0], w[1], dir))
}

/// Integral of the momentum along `path`, tracking the square-root branch.
pub fn integrate_momentum(m: &Momentum, path: &ContourPath) -> Result<Integral> {
    if !path.cut_allowed {
        if let Some(z) = cut_hit(m, &path.nodes) {
            return Err(Error::CutCrossing(z));
        }
    }
    let start = path.start();
    let seed = match path.seed {
        BranchSeed::Principal if m.is_turning_point(start) => {
            if m.is_turning_point(path.end()) {
                return Err(Error::BranchAmbiguity(m.sq(start).norm()));
            }
            BranchSeed::End(principal_sqrt(m.sq(path.end())))
        }
        BranchSeed::Principal => BranchSeed::Start(principal_sqrt(m.sq(start))),
        s => s,
    };
    let seed_value = match seed {
        BranchSeed::Start(v) => v,
        BranchSeed::End(v) => {
            let rev = ContourPath {
                nodes: path.nodes.iter().rev().copied().collect(),
                order: path.order,
                seed: BranchSeed::Start(v),
                cut_allowed: true,
            };
            let r = integrate_momentum(m, &rev)?;
            return Ok(Integral { value: -r.value, end_branch: Some(v) });
        }
        BranchSeed::Principal => unreachable!("principal seed resolved above"),
    };
    if m.is_turning_point(start) {
        return Err(Error::BranchAmbiguity(m.sq(start).norm()));
    }
    let rule = GaussLegendre::cached(path.order);
    let mut state = BranchState::new(seed_value);
    let mut acc = c(0.0, 0.0);
    let n = path.nodes.len();
    for (k, w) in path.nodes.windows(2).enumerate() {
        acc += integrate_segment(m, &rule, w[0], w[1], &mut state)?;
        let last = k + 2 == n;
        if m.is_turning_point(w[1]) {
            if !last {
                return Err(Error::BranchAmbiguity(m.sq(w[1]).norm()));
            }
        } else {
            state.sqrt(m.sq(w[1]))?;
        }
    }
    let end_branch = if m.is_turning_point(path.end()) { None } else { Some(state.last_value) };
    Ok(Integral { value: acc, end_branch })
}

/// `phi(z1) - phi(z0)` along `path`.
pub fn phi_between(z0: CScalar, z1: CScalar, model: &ModelSpec, path: &ContourPath) -> Result<CScalar> {
    if z0 == z1 {
        return Ok(c(0.0, 0.0));
    }
    if (path.start() - z0).norm() > 1e-12 || (path.end() - z1).norm() > 1e-12 {
        return Err(Error::InvalidParameter("path end points do not match the limits".into()));
    }
    Ok(integrate_momentum(&Momentum::of(model), path)?.value)
}

/// `R(p) = sqrt(pi) Gamma(1 + 1/p) / (2 Gamma(3/2 + 1/p))`.
pub fn r_of_p(p: f64) -> f64 {
    let g1 = gamma_real(1.0 + 1.0 / p).expect("positive argument");
    let g2 = gamma_real(1.5 + 1.0 / p).expect("positive argument");
    PI.sqrt() * g1 / (2.0 * g2)
}

/// Closed forms of `phi(z_A) - phi(0)` and `phi(z_B) - phi(0)`.
pub fn phi_a_closed_form(p: f64) -> (CScalar, CScalar) {
    let r = r_of_p(p);
    let (s, co) = (PI / p).sin_cos();
    let a = c(-s, -co) * r;
    (a, -a.conj())
}

/// Singulant `chi = 2 i [phi(z) - phi(z*)]` along a path from `z_star` to `z`.
pub fn chi_of(z: CScalar, z_star: CScalar, model: &ModelSpec, path: &ContourPath) -> Result<CScalar> {
    if z == z_star {
        return Ok(c(0.0, 0.0));
    }
    Ok(2.0 * CScalar::i() * phi_between(z_star, z, model, path)?)
}

/// `U + i V = -int_{z_C}^{z_A} sqrt(1 - t^4 - i a t) dt`, branch fixed so
/// that `Re U > 0`.
pub fn quartic_uv_complex(a: CScalar) -> Result<CScalar> {
    let tp = geometry::quartic_turning_points_complex(a)?;
    let m = Momentum::Quartic { a };
    let mid = 0.5 * (tp.c + tp.a);
    let seed = principal_sqrt(m.sq(mid));
    let to_a = integrate_momentum(
        &m,
        &ContourPath::straight(mid, tp.a).with_seed(BranchSeed::Start(seed)),
    )?;
    let to_c = integrate_momentum(
        &m,
        &ContourPath::straight(mid, tp.c).with_seed(BranchSeed::Start(seed)),
    )?;
    let uv = -(to_a.value - to_c.value);
    Ok(if uv.re < 0.0 { -uv } else { uv })
}

/// `(U(a), V(a))` for real `a >= 0`.
pub fn quartic_uv(a: f64) -> Result<(f64, f64)> {
    if !(a >= 0.0) {
        return Err(Error::InvalidParameter(format!("quartic coupling must be >= 0, got {a}")));
    }
    let uv = quartic_uv_complex(c(a, 0.0))?;
    Ok((uv.re, uv.im))
}

/// Root of `V(a)` on `[1.0, 1.4]` by bisection.
pub fn find_a_star() -> Result<f64> {
    let (mut lo, mut hi) = (1.0, 1.4);
    let mut v_lo = quartic_uv(lo)?.1;
    let v_hi = quartic_uv(hi)?.1;
    if v_lo.signum() == v_hi.signum() {
        return Err(Error::NoSignChange(format!("V(1.0) = {v_lo}, V(1.4) = {v_hi}")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = quartic_uv(mid)?.1;
        if v.abs() <= 1e-10 || hi - lo < 1e-15 {
            return Ok(mid);
        }
        if v.signum() == v_lo.signum() {
            lo = mid;
            v_lo = v;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::turning_points;

    fn pl(p: f64) -> ModelSpec {
        ModelSpec::power_law(p).unwrap()
    }

    #[test]
    fn zero_length_is_zero() {
        let z = c(0.3, -0.2);
        assert_eq!(phi_between(z, z, &pl(2.5), &ContourPath::straight(z, z)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn quarter_circle_area_at_p2() {
        // int_0^1 sqrt(1 - t^2) dt = pi / 4
        let v = phi_between(c(0.0, 0.0), c(1.0, 0.0), &pl(2.0), &ContourPath::straight(c(0.0, 0.0), c(1.0, 0.0)))
            .unwrap();
        assert!((v - c(PI / 4.0, 0.0)).norm() < 1e-13, "{v}");
    }

    #[test]
    fn r_of_p_values() {
        assert!((r_of_p(1.0) - 2.0 / 3.0).abs() < 1e-14);
        assert!((r_of_p(2.0) - PI / 4.0).abs() < 1e-14);
        assert!((r_of_p(1e8) - 1.0).abs() < 1e-7);
        assert!((1.0..6.0).contains(&1.0) && r_of_p(3.7) > 0.0);
    }

    #[test]
    fn closed_form_special_cases() {
        let (a, b) = phi_a_closed_form(2.0);
        assert!((a - c(-PI / 4.0, 0.0)).norm() < 1e-15);
        assert!((b - c(PI / 4.0, 0.0)).norm() < 1e-15);
        let (a, _) = phi_a_closed_form(1.0);
        // z_A = i, and int_0^i sqrt(1 + i t) dt = 2i/3
        assert!((a - c(0.0, 2.0 / 3.0)).norm() < 1e-14);
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for p in [1.3, 1.7, 2.5, 3.0, 5.0] {
            let (za, zb) = turning_points(p);
            let m = pl(p);
            let o = c(0.0, 0.0);
            let qa = phi_between(o, za, &m, &ContourPath::straight(o, za)).unwrap();
            let qb = phi_between(o, zb, &m, &ContourPath::straight(o, zb)).unwrap();
            let (ca, cb) = phi_a_closed_form(p);
            assert!((qa - ca).norm() < 1e-10, "p = {p}: {qa} vs {ca}");
            assert!((qb - cb).norm() < 1e-10, "p = {p}: {qb} vs {cb}");
            assert!((qb + qa.conj()).norm() < 1e-10);
        }
    }

    #[test]
    fn doubling_order_is_converged() {
        for p in [1.3, 2.5, 4.0] {
            let (za, _) = turning_points(p);
            let o = c(0.0, 0.0);
            for path in [
                ContourPath::straight(o, za),
                ContourPath::new(vec![o, c(-0.4, -0.9), c(0.8, -1.1)]).unwrap(),
            ] {
                let end = path.end();
                let v40 = phi_between(o, end, &pl(p), &path).unwrap();
                let v80 = phi_between(o, end, &pl(p), &path.clone().with_order(80)).unwrap();
                assert!((v40 - v80).norm() < 1e-11, "p = {p}");
            }
        }
    }

    #[test]
    fn homotopic_paths_agree() {
        let p = 2.5;
        let (za, _) = turning_points(p);
        let o = c(0.0, 0.0);
        let straight = phi_between(o, za, &pl(p), &ContourPath::straight(o, za)).unwrap();
        let bent = ContourPath::new(vec![o, c(0.2, -0.7), c(-0.5, -1.2), za]).unwrap();
        let v = phi_between(o, za, &pl(p), &bent).unwrap();
        assert!((v - straight).norm() < 1e-10);
    }

    #[test]
    fn cut_crossing_is_refused() {
        let path = ContourPath::straight(c(-1.0, 0.5), c(1.0, 0.5));
        let r = phi_between(c(-1.0, 0.5), c(1.0, 0.5), &pl(1.5), &path);
        assert!(matches!(r, Err(Error::CutCrossing(_))));
        // integer p has no cut
        assert!(phi_between(c(-1.0, 0.5), c(1.0, 0.5), &pl(3.0), &path).is_ok());
    }

    #[test]
    fn chi_vanishes_at_base_and_is_real_on_the_p2_stokes_line() {
        let m = pl(2.0);
        let one = c(1.0, 0.0);
        assert_eq!(chi_of(one, one, &m, &ContourPath::straight(one, one)).unwrap(), c(0.0, 0.0));
        // brute-force oracle: 2 int_1^2 sqrt(t^2 - 1) dt = 2 sqrt(3) - ln(2 + sqrt 3)
        let oracle = 2.0 * 3f64.sqrt() - (2.0 + 3f64.sqrt()).ln();
        let path = ContourPath::straight(one, c(2.0, 0.0));
        let chi = chi_of(c(2.0, 0.0), one, &m, &path).unwrap();
        assert!(chi.im.abs() < 1e-12);
        assert!((chi.re.abs() - oracle).abs() < 1e-12, "{chi}");
        // with the branch seeded at z = 2 on -i sqrt(3) the singulant is positive
        let seeded = path.with_seed(BranchSeed::End(c(0.0, -3f64.sqrt())));
        let chi = chi_of(c(2.0, 0.0), one, &m, &seeded).unwrap();
        assert!((chi - c(oracle, 0.0)).norm() < 1e-12, "{chi}");
    }

    #[test]
    fn chi_differences_are_position_independent() {
        let p = 3.0;
        let m = pl(p);
        let (za, zb) = turning_points(p);
        let o = c(0.0, 0.0);
        let (pa, pb) = phi_a_closed_form(p);
        let mut first = None;
        for z in [c(0.1, -0.3), c(-0.7, -0.9), c(1.2, -0.4)] {
            let phi = phi_between(o, z, &m, &ContourPath::straight(o, z)).unwrap();
            let chi_a = 2.0 * CScalar::i() * (phi - pa);
            let chi_b = 2.0 * CScalar::i() * (phi - pb);
            let diff = chi_a - chi_b;
            match first {
                None => first = Some(diff),
                Some(d) => assert!((diff - d).norm() < 1e-12),
            }
        }
        let _ = (za, zb);
    }

    #[test]
    fn quartic_constants() {
        let (u0, v0) = quartic_uv(0.0).unwrap();
        assert!((v0 - 0.87402).abs() < 1e-4, "V(0) = {v0}");
        assert!(u0 > 0.0);
        let a_star = find_a_star().unwrap();
        assert!((a_star - 1.18384).abs() < 1e-4, "a* = {a_star}");
        assert!(quartic_uv(a_star - 0.1).unwrap().1 > 0.0);
        assert!(quartic_uv(a_star + 0.1).unwrap().1 < 0.0);
    }

    #[test]
    fn quartic_v_decreases() {
        let mut prev = f64::INFINITY;
        for k in 0..=30 {
            let a = 0.05 * k as f64;
            let v = quartic_uv(a).unwrap().1;
            assert!(v < prev, "a = {a}");
            prev = v;
        }
    }

    #[test]
    fn end_point_substitution_matches_trapezoid_oracle() {
        // straight segment from 0 to the turning point z_A at p = 2.5,
        // brute force with 10^6 trapezoid panels and no substitution
        let p = 2.5;
        let (za, _) = turning_points(p);
        let m = Momentum::PowerLaw { p, cut: 0.5 * PI };
        let n = 1_000_000;
        let mut st = BranchState::new(c(1.0, 0.0));
        let mut acc = c(0.0, 0.0);
        let mut prev = c(1.0, 0.0);
        for k in 1..=n {
            let t = za * (k as f64 / n as f64);
            let g = m.sq(t);
            let v = if k == n { c(0.0, 0.0) } else { st.sqrt(g).unwrap() };
            acc += 0.5 * (prev + v);
            prev = v;
        }
        let oracle = acc * za / n as f64;
        let o = c(0.0, 0.0);
        let v = phi_between(o, za, &pl(p), &ContourPath::straight(o, za)).unwrap();
        assert!((v - oracle).norm() < 1e-8, "{v} vs {oracle}");
    }
}
