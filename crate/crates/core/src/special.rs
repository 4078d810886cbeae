//! Real Gamma function, principal complex powers and square roots that stay
//! on one branch while a path is traversed.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used for every coordinate, parameter and action value.
pub type CScalar = Complex64;

/// Lanczos approximation, g = 7 with nine coefficients.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Magnitude below which a square root has no usable sign.
pub const BRANCH_AMBIGUITY: f64 = 1e-14;

/// `sin(pi x)` with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    if r == 0.0 || r.abs() == 1.0 {
        return 0.0;
    }
    // r in (-1, 1); fold onto [-1/2, 1/2] for accuracy
    if r > 0.5 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.5 {
        -(PI * (1.0 + r)).sin()
    } else {
        (PI * r).sin()
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

fn lanczos_sum(x: f64) -> f64 {
    // x is the shifted argument (Gamma(x + 1) form)
    let mut acc = LANCZOS_COEF[0];
    for (k, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + k as f64);
    }
    acc
}

/// Gamma function on the real line.
///
/// Negative arguments go through the reflection formula. Nonpositive
/// integers are poles and return [`Error::GammaPole`].
pub fn gamma_real(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("gamma of non-finite {x}")));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::GammaPole(x));
    }
    if x < 0.5 {
        let s = sin_pi(x);
        return Ok(PI / (s * gamma_real(1.0 - x)?));
    }
    if x == x.floor() && x <= 171.0 {
        // exact factorials where f64 can hold them
        let mut acc = 1.0;
        let mut k = 2.0;
        while k < x {
            acc *= k;
            k += 1.0;
        }
        return Ok(acc);
    }
    let xm = x - 1.0;
    let t = xm + LANCZOS_G + 0.5;
    Ok((2.0 * PI).sqrt() * t.powf(xm + 0.5) * (-t).exp() * lanczos_sum(xm))
}

/// `1 / Gamma(x)`, a total function: exactly zero at the poles of Gamma.
pub fn recip_gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x < 0.5 {
        // 1/Gamma(x) = sin(pi x) Gamma(1 - x) / pi, smooth through the poles
        return match gamma_real(1.0 - x) {
            Ok(g) => sin_pi(x) * g / PI,
            Err(_) => 0.0,
        };
    }
    if x > 171.7 {
        return 0.0;
    }
    match gamma_real(x) {
        Ok(g) => 1.0 / g,
        Err(_) => 0.0,
    }
}

/// `(ln |Gamma(x)|, sign Gamma(x))`.
pub fn ln_gamma_signed(x: f64) -> Result<(f64, f64)> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("ln_gamma of non-finite {x}")));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::GammaPole(x));
    }
    if x < 0.5 {
        let s = sin_pi(x);
        let (lg, sg) = ln_gamma_signed(1.0 - x)?;
        return Ok((PI.ln() - s.abs().ln() - lg, s.signum() * sg));
    }
    if x < 15.0 {
        let g = gamma_real(x)?;
        return Ok((g.abs().ln(), g.signum()));
    }
    Ok((ln_gamma_stirling(x), 1.0))
}

/// Stirling series for large x; eight correction terms reach machine
/// precision for x >= 15.
fn ln_gamma_stirling(x: f64) -> f64 {
    const B: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
        -3617.0 / 122_400.0,
    ];
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut pow = inv;
    for b in B {
        corr += b * pow;
        pow *= inv2;
    }
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + corr
}

/// `ln Gamma(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Err(Error::Domain(format!("ln_gamma needs x > 0, got {x}")));
    }
    Ok(ln_gamma_signed(x)?.0)
}

/// Principal argument in `(-pi, pi]`; a negative real axis with a signed
/// zero imaginary part maps to `+pi`.
pub fn principal_arg(w: CScalar) -> f64 {
    if w.im == 0.0 && w.re < 0.0 {
        PI
    } else {
        w.im.atan2(w.re)
    }
}

/// `w^p = exp(p (ln|w| + i Arg w))` on the principal branch.
pub fn principal_power(w: CScalar, p: f64) -> Result<CScalar> {
    if w.re == 0.0 && w.im == 0.0 {
        return if p > 0.0 {
            Ok(CScalar::new(0.0, 0.0))
        } else {
            Err(Error::Domain(format!("0^{p} is undefined")))
        };
    }
    let ln_r = w.norm().ln();
    let arg = principal_arg(w);
    Ok(CScalar::from_polar((p * ln_r).exp(), p * arg))
}

/// Complex exponent version of [`principal_power`].
pub fn principal_cpow(w: CScalar, p: CScalar) -> Result<CScalar> {
    if w.re == 0.0 && w.im == 0.0 {
        return if p.re > 0.0 {
            Ok(CScalar::new(0.0, 0.0))
        } else {
            Err(Error::Domain(format!("0^{p} is undefined")))
        };
    }
    let ln_w = CScalar::new(w.norm().ln(), principal_arg(w));
    Ok((p * ln_w).exp())
}

/// Principal square root with the `Arg in (-pi, pi]` convention.
pub fn principal_sqrt(w: CScalar) -> CScalar {
    if w.re == 0.0 && w.im == 0.0 {
        return w;
    }
    CScalar::from_polar(w.norm().sqrt(), 0.5 * principal_arg(w))
}

/// Previous square-root sample along a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchState {
    pub last_value: CScalar,
}

impl BranchState {
    pub fn new(seed: CScalar) -> Self {
        BranchState { last_value: seed }
    }

    /// Seeds the branch with the principal root of `w`.
    pub fn principal(w: CScalar) -> Self {
        BranchState::new(principal_sqrt(w))
    }

    /// Square root of `w` on the branch continuous with the previous sample.
    pub fn sqrt(&mut self, w: CScalar) -> Result<CScalar> {
        let mag = w.norm();
        if !(mag >= BRANCH_AMBIGUITY) {
            return Err(Error::BranchAmbiguity(mag));
        }
        let r = principal_sqrt(w);
        let v = if (r - self.last_value).norm_sqr() <= (r + self.last_value).norm_sqr() {
            r
        } else {
            -r
        };
        self.last_value = v;
        Ok(v)
    }
}

/// Functional form of [`BranchState::sqrt`].
pub fn tracked_sqrt(w: CScalar, state: BranchState) -> Result<(CScalar, BranchState)> {
    let mut s = state;
    let v = s.sqrt(w)?;
    Ok((v, s))
}
