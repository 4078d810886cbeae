//! Complex root polishing shared by the asymptotic and shooting solvers.

use crate::error::{Error, Result};
use crate::special::CScalar;

/// Function value with the magnitude scale used to normalise the residual.
#[derive(Debug, Clone, Copy)]
pub struct Scaled {
    pub value: CScalar,
    pub scale: f64,
}

impl Scaled {
    pub fn residual(&self) -> f64 {
        self.value.norm() / self.scale.max(1.0)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Root {
    pub x: CScalar,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Relative central-difference step.
    pub fd_step: f64,
    /// Keep iterates on the real axis.
    pub real_only: bool,
    /// Reject iterates with non-positive real part.
    pub positive: bool,
    /// Cap on the length of one step.
    pub max_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tol: 1e-12, max_iter: 100, fd_step: 1e-7, real_only: false, positive: true, max_step: f64::INFINITY }
    }
}

fn admissible(x: CScalar, opts: &NewtonOptions) -> bool {
    x.re.is_finite() && x.im.is_finite() && (!opts.positive || x.re > 0.0)
}

/// Damped Newton with a central-difference derivative.
pub fn newton<F>(f: F, seed: CScalar, opts: NewtonOptions) -> Result<Root>
where
    F: Fn(CScalar) -> Result<Scaled>,
{
    let mut x = if opts.real_only { CScalar::new(seed.re, 0.0) } else { seed };
    let mut fx = f(x)?;
    for _ in 0..opts.max_iter {
        if fx.residual() <= opts.tol {
            return Ok(Root { x, residual: fx.residual() });
        }
        let h = opts.fd_step * x.norm().max(1e-300);
        let d = (f(x + h)?.value - f(x - h)?.value) / (2.0 * h);
        if d.norm() == 0.0 || !d.re.is_finite() || !d.im.is_finite() {
            break;
        }
        let mut step = fx.value / d;
        if opts.real_only {
            step.im = 0.0;
        }
        if step.norm() > opts.max_step {
            step *= opts.max_step / step.norm();
        }
        let mut accepted = false;
        for _ in 0..30 {
            let trial = x - step;
            if admissible(trial, &opts) {
                if let Ok(ft) = f(trial) {
                    if ft.residual().is_finite() && ft.residual() < fx.residual() {
                        x = trial;
                        fx = ft;
                        accepted = true;
                        break;
                    }
                }
            }
            step *= 0.5;
        }
        if !accepted {
            // flat residual near the floor: accept a tiny final step
            if fx.residual() <= opts.tol * 100.0 {
                return Ok(Root { x, residual: fx.residual() });
            }
            break;
        }
        if step.norm() <= 1e-15 * x.norm() && fx.residual() <= opts.tol * 100.0 {
            return Ok(Root { x, residual: fx.residual() });
        }
    }
    if fx.residual() <= opts.tol {
        return Ok(Root { x, residual: fx.residual() });
    }
    Err(Error::NoConvergence { what: "Newton", iterations: opts.max_iter })
}

/// Muller's three-point method.
pub fn muller<F>(f: F, seeds: [CScalar; 3], tol: f64, max_iter: usize) -> Result<Root>
where
    F: Fn(CScalar) -> Result<Scaled>,
{
    let [mut x0, mut x1, mut x2] = seeds;
    let (mut f0, mut f1, mut f2) = (f(x0)?.value, f(x1)?.value, f(x2)?);
    for _ in 0..max_iter {
        if f2.residual() <= tol {
            return Ok(Root { x: x2, residual: f2.residual() });
        }
        let h1 = x1 - x0;
        let h2 = x2 - x1;
        let d1 = (f1 - f0) / h1;
        let d2 = (f2.value - f1) / h2;
        let a = (d2 - d1) / (h2 + h1);
        let b = a * h2 + d2;
        let disc = (b * b - 4.0 * f2.value * a).sqrt();
        let den = if (b + disc).norm() > (b - disc).norm() { b + disc } else { b - disc };
        let dx = if den.norm() == 0.0 { CScalar::new(1e-3 * (1.0 + x2.norm()), 0.0) } else { -2.0 * f2.value / den };
        let x3 = x2 + dx;
        if !x3.re.is_finite() || !x3.im.is_finite() {
            break;
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2.value;
        x2 = x3;
        f2 = f(x2)?;
        if dx.norm() <= 1e-15 * x2.norm() && f2.residual() <= tol * 100.0 {
            return Ok(Root { x: x2, residual: f2.residual() });
        }
    }
    if f2.residual() <= tol {
        return Ok(Root { x: x2, residual: f2.residual() });
    }
    Err(Error::NoConvergence { what: "Muller", iterations: max_iter })
}

/// Bisection on a real bracket with a sign change.
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoSignChange(format!("f({lo}) = {flo}, f({hi}) = {fhi}")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol * mid.abs().max(1e-300) {
            return Ok(mid);
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scaled(v: CScalar) -> Result<Scaled> {
        Ok(Scaled { value: v, scale: 1.0 })
    }

    #[test]
    fn newton_finds_cube_root_of_unity() {
        let r = newton(|z| scaled(z * z * z - 1.0), CScalar::new(-0.4, 0.9), NewtonOptions { positive: false, ..Default::default() })
            .unwrap();
        assert!((r.x - CScalar::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0)).norm() < 1e-10);
    }

    #[test]
    fn newton_real_only_stays_real() {
        let r = newton(|z| scaled(z.cos()), CScalar::new(1.3, 0.0), NewtonOptions { real_only: true, ..Default::default() })
            .unwrap();
        assert_eq!(r.x.im, 0.0);
        assert!((r.x.re - std::f64::consts::FRAC_PI_2).abs() < 1e-11);
    }

    #[test]
    fn muller_finds_complex_pair_member() {
        let r = muller(|z| scaled(z * z + 1.0), [CScalar::new(0.1, 0.5), CScalar::new(0.2, 0.7), CScalar::new(0.0, 0.8)], 1e-13, 100)
            .unwrap();
        assert!((r.x - CScalar::i()).norm() < 1e-10);
    }

    #[test]
    fn bisect_sqrt_two() {
        let x = bisect(|x| Ok(x * x - 2.0), 1.0, 2.0, 1e-15).unwrap();
        assert!((x - 2f64.sqrt()).abs() < 1e-14);
    }
}
