//! Sine and cosine integrals.
//!
//! `Si(x) = ∫₀ˣ sin t / t dt` and `Ci(x) = -∫ₓ^∞ cos t / t dt`. Small
//! arguments use the power series; larger ones go through the auxiliary
//! functions `f`, `g`, obtained from the continued fraction of
//! `e^{ix} E₁(ix)`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use thiserror::Error;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_LIMIT: f64 = 4.0;
const EPS: f64 = 1e-16;
const MAX_ITER: usize = 200;
const CF_EPS: f64 = 4.0 * f64::EPSILON;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum SpecialError {
    #[error("Ci(x) is undefined for x = {0} (requires x > 0)")]
    CiDomain(f64),
    #[error("continued fraction for x = {0} did not converge")]
    NoConvergence(f64),
}

/// Returns `(Si(x), Ci(x))` for `x > 0`.
pub fn sine_cosine_integrals(x: f64) -> Result<(f64, f64), SpecialError> {
    if !(x > 0.0) {
        return Err(SpecialError::CiDomain(x));
    }
    if x < SERIES_LIMIT {
        Ok(series(x))
    } else {
        let (f, g) = auxiliary(x)?;
        let (s, c) = x.sin_cos();
        Ok((FRAC_PI_2 - f * c - g * s, f * s - g * c))
    }
}

/// Sine integral for any real argument (odd function, `Si(0) = 0`).
pub fn si(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let (s, _) = sine_cosine_integrals(x.abs()).expect("positive argument");
    s.copysign(x)
}

/// Cosine integral, defined for `x > 0`.
pub fn ci(x: f64) -> Result<f64, SpecialError> {
    sine_cosine_integrals(x).map(|(_, c)| c)
}

/// `Ci(u) - j·Si(u)`, the antiderivative of `e^{-ju}/u`.
pub(crate) fn exp_integral_kernel(u: f64) -> Result<Complex64, SpecialError> {
    let (s, c) = sine_cosine_integrals(u)?;
    Ok(Complex64::new(c, -s))
}

fn series(x: f64) -> (f64, f64) {
    let x2 = x * x;

    // Si: Σ (-1)^k x^{2k+1} / ((2k+1)(2k+1)!)
    let mut term = x; // (-1)^k x^{2k+1} / (2k+1)!
    let mut si_sum = x;
    // Ci: Σ_{k≥1} (-1)^k x^{2k} / (2k (2k)!)
    let mut cterm = 1.0; // (-1)^k x^{2k} / (2k)!
    let mut ci_sum = 0.0;
    for k in 1..MAX_ITER {
        let n = 2 * k;
        cterm *= -x2 / ((n - 1) as f64 * n as f64);
        let ci_add = cterm / n as f64;
        ci_sum += ci_add;

        term *= -x2 / (n as f64 * (n + 1) as f64);
        let si_add = term / (n + 1) as f64;
        si_sum += si_add;

        if ci_add.abs() < EPS * ci_sum.abs().max(1e-300) && si_add.abs() < EPS * si_sum.abs() {
            break;
        }
    }
    (si_sum, EULER_GAMMA + x.ln() + ci_sum)
}

/// Auxiliary functions `(f(x), g(x))` via modified Lentz evaluation of the
/// continued fraction for `e^{ix} E₁(ix) = g(x) - i f(x)`.
fn auxiliary(x: f64) -> Result<(f64, f64), SpecialError> {
    let mut b = Complex64::new(1.0, x);
    // 1/tiny, written out: complex division would square the denominator
    let mut c = Complex64::new(1e300, 0.0);
    let mut d = Complex64::new(1.0, 0.0) / b;
    let mut h = d;
    for i in 2..MAX_ITER {
        let a = -(((i - 1) * (i - 1)) as f64);
        b += 2.0;
        d = Complex64::new(1.0, 0.0) / (d * a + b);
        c = b + Complex64::new(a, 0.0) / c;
        let del = c * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < CF_EPS {
            return Ok((-h.im, h.re));
        }
    }
    Err(SpecialError::NoConvergence(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn si_at_zero_is_zero() {
        assert_eq!(si(0.0), 0.0);
    }

    #[test]
    fn si_is_odd() {
        for &x in &[0.3, 2.5, 7.0, 42.0] {
            assert_eq!(si(-x), -si(x));
        }
    }

    #[test]
    fn known_values() {
        assert!((si(PI) - 1.851_937_051_982_466).abs() < 1e-12);
        assert!((ci(1.0).unwrap() - 0.337_403_922_900_968_1).abs() < 1e-12);
    }

    #[test]
    fn ci_rejects_non_positive() {
        assert_eq!(ci(0.0), Err(SpecialError::CiDomain(0.0)));
        assert!(ci(-1.0).is_err());
        assert!(sine_cosine_integrals(f64::NAN).is_err());
    }

    #[test]
    fn branches_agree_at_switch_point() {
        let below = series(SERIES_LIMIT);
        let (f, g) = auxiliary(SERIES_LIMIT).unwrap();
        let (s, c) = SERIES_LIMIT.sin_cos();
        let above = (FRAC_PI_2 - f * c - g * s, f * s - g * c);
        assert!((below.0 - above.0).abs() < 1e-13);
        assert!((below.1 - above.1).abs() < 1e-13);
    }

    #[test]
    fn large_argument_limits() {
        let (s, c) = sine_cosine_integrals(1e4).unwrap();
        assert!((s - FRAC_PI_2).abs() < 1e-3);
        assert!(c.abs() < 1e-3);
    }
}
