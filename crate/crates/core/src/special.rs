//! Special functions used by the closed-form copula formulas.
//!
//! Every function here is a pure function of its arguments. Checked public
//! entry points return [`Error::Domain`] for arguments outside the domain;
//! the unchecked `pub(crate)` kernels are used internally where the domain
//! is already guaranteed.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const LN_SQRT_PI: f64 = 0.572_364_942_924_700_1;
const EPS: f64 = f64::EPSILON;
const FPMIN: f64 = f64::MIN_POSITIVE / EPS;
const MAX_CF_ITER: usize = 100_000;

fn check_positive(function: &'static str, name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(
            function,
            format!("{name} must be finite and > 0, got {x}"),
        ))
    }
}

fn check_probability(function: &'static str, p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(
            function,
            format!("probability must lie in (0, 1), got {p}"),
        ))
    }
}

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    check_positive("log_gamma", "x", x)?;
    Ok(ln_gamma(x))
}

/// Digamma `ψ(x) = d/dx ln Γ(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    check_positive("digamma", "x", x)?;
    Ok(psi(x))
}

/// `ln B(x, y) = ln Γ(x) + ln Γ(y) − ln Γ(x + y)`.
pub fn log_beta(x: f64, y: f64) -> Result<f64> {
    check_positive("log_beta", "x", x)?;
    check_positive("log_beta", "y", y)?;
    Ok(ln_beta(x, y))
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> Result<f64> {
    check_positive("regularized_incomplete_beta", "a", a)?;
    check_positive("regularized_incomplete_beta", "b", b)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(
            "regularized_incomplete_beta",
            format!("x must lie in [0, 1], got {x}"),
        ));
    }
    Ok(inc_beta(a, b, x, 1.0 - x))
}

/// Standard normal distribution function `Φ(x)`.
///
/// Evaluated through the complementary error function so that the lower
/// tail keeps full relative precision.
pub fn std_normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal density.
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x - LN_SQRT_2PI).exp()
}

/// Inverse of [`std_normal_cdf`] on `(0, 1)`.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    check_probability("std_normal_quantile", p)?;
    Ok(norm_quantile(p))
}

/// Student-t distribution function with `nu > 0` degrees of freedom (real `nu`).
pub fn student_t_cdf(x: f64, nu: f64) -> Result<f64> {
    check_positive("student_t_cdf", "nu", nu)?;
    if x.is_nan() {
        return Err(Error::domain("student_t_cdf", "x is NaN"));
    }
    Ok(t_cdf(x, nu))
}

/// Student-t density with `nu > 0` degrees of freedom.
pub fn student_t_pdf(x: f64, nu: f64) -> Result<f64> {
    check_positive("student_t_pdf", "nu", nu)?;
    Ok(t_ln_pdf(x, nu).exp())
}

/// Inverse of [`student_t_cdf`] on `(0, 1)`; `quantile(0.5, nu) == 0` exactly.
pub fn student_t_quantile(p: f64, nu: f64) -> Result<f64> {
    check_positive("student_t_quantile", "nu", nu)?;
    check_probability("student_t_quantile", p)?;
    Ok(t_quantile(p, nu))
}

// ---------------------------------------------------------------------------
// Unchecked kernels
// ---------------------------------------------------------------------------

/// `ln Γ(x) − [(x − ½) ln x − x + ½ ln 2π]`, full double precision for `x >= 10`.
fn stirling_correction(x: f64) -> f64 {
    let r = 1.0 / x;
    let r2 = r * r;
    r * (1.0 / 12.0
        - r2 * (1.0 / 360.0
            - r2 * (1.0 / 1260.0
                - r2 * (1.0 / 1680.0
                    - r2 * (1.0 / 1188.0 - r2 * (691.0 / 360_360.0 - r2 / 156.0))))))
}

fn ln_gamma_stirling(x: f64) -> f64 {
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + stirling_correction(x)
}

pub(crate) fn ln_gamma(x: f64) -> f64 {
    if x >= 10.0 {
        return ln_gamma_stirling(x);
    }
    // Shift up with Γ(x) = Γ(x + m) / (x (x+1) ... (x+m-1)).
    let mut shifted = x;
    let mut product = 1.0;
    while shifted < 10.0 {
        product *= shifted;
        shifted += 1.0;
    }
    ln_gamma_stirling(shifted) - product.ln()
}

pub(crate) fn psi(x: f64) -> f64 {
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let r = 1.0 / x;
    let r2 = r * r;
    let tail = r2
        * (1.0 / 12.0
            - r2 * (1.0 / 120.0
                - r2 * (1.0 / 252.0
                    - r2 * (1.0 / 240.0
                        - r2 * (1.0 / 132.0 - r2 * (691.0 / 32_760.0 - r2 / 12.0))))));
    acc + x.ln() - 0.5 * r - tail
}

pub(crate) fn ln_beta(a: f64, b: f64) -> f64 {
    let (big, small) = if a >= b { (a, b) } else { (b, a) };
    // The large Stirling terms cancel analytically; what is left is evaluated
    // through ln_1p.
    if small >= 10.0 {
        LN_SQRT_2PI
            - 0.5 * small.ln()
            - (big - 0.5) * (small / big).ln_1p()
            - small * (big / small).ln_1p()
            + stirling_correction(big)
            + stirling_correction(small)
            - stirling_correction(big + small)
    } else if big >= 10.0 {
        ln_gamma(small) - (big - 0.5) * (small / big).ln_1p() - small * (big + small).ln()
            + small
            + stirling_correction(big)
            - stirling_correction(big + small)
    } else {
        ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
    }
}

/// Regularized incomplete gamma functions `(P(a, x), Q(a, x))`.
fn gamma_pq(a: f64, x: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 1.0);
    }
    let log_prefactor = -x + a * x.ln() - ln_gamma(a);
    if x < a + 1.0 {
        let mut ap = a;
        let mut term = 1.0 / a;
        let mut sum = term;
        for _ in 0..MAX_CF_ITER {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * EPS {
                break;
            }
        }
        let p = sum * log_prefactor.exp();
        (p, 1.0 - p)
    } else {
        // Modified Lentz evaluation of the continued fraction for Q.
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / FPMIN;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_CF_ITER {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < FPMIN {
                d = FPMIN;
            }
            c = b + an / c;
            if c.abs() < FPMIN {
                c = FPMIN;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < EPS {
                break;
            }
        }
        let q = log_prefactor.exp() * h;
        (1.0 - q, q)
    }
}

/// Complementary error function via `erfc(z) = Q(1/2, z²)`.
pub(crate) fn erfc(z: f64) -> f64 {
    if z.is_infinite() {
        return if z > 0.0 { 0.0 } else { 2.0 };
    }
    let (p, q) = gamma_pq(0.5, z * z);
    if z >= 0.0 {
        q
    } else {
        1.0 + p
    }
}

pub(crate) fn norm_quantile(p: f64) -> f64 {
    if p > 0.5 {
        // 1 - p is exact for p >= 0.5.
        return -norm_quantile(1.0 - p);
    }
    if p == 0.5 {
        return 0.0;
    }
    // Rational starting point (absolute error < 4.5e-4), then Halley steps.
    let t = (-2.0 * p.ln()).sqrt();
    let mut x = -(t
        - (2.515_517 + 0.802_853 * t + 0.010_328 * t * t)
            / (1.0 + 1.432_788 * t + 0.189_269 * t * t + 0.001_308 * t * t * t));
    for _ in 0..50 {
        let r = (std_normal_cdf(x) - p) / std_normal_pdf(x);
        if !r.is_finite() {
            break;
        }
        let step = r / (1.0 + 0.5 * x * r);
        x -= step;
        if step.abs() <= 4.0 * EPS * x.abs().max(1.0) {
            break;
        }
    }
    x
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..MAX_CF_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// `I_x(a, b)` with `y = 1 - x` supplied separately to avoid cancellation.
pub(crate) fn inc_beta(a: f64, b: f64, x: f64, y: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    let log_bt = a * x.ln() + b * y.ln() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        log_bt.exp() * beta_cf(a, b, x) / a
    } else {
        1.0 - log_bt.exp() * beta_cf(b, a, y) / b
    }
}

/// Initial inverse of `I_x(a, b) = p`, refined by Halley steps.
fn inv_inc_beta(p: f64, a: f64, b: f64) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let mut x = if a >= 1.0 && b >= 1.0 {
        let pp = if p < 0.5 { p } else { 1.0 - p };
        let t = (-2.0 * pp.ln()).sqrt();
        let mut z = (2.307_53 + t * 0.270_61) / (1.0 + t * (0.992_29 + t * 0.044_81)) - t;
        if p < 0.5 {
            z = -z;
        }
        let al = (z * z - 3.0) / 6.0;
        let h = 2.0 / (1.0 / (2.0 * a - 1.0) + 1.0 / (2.0 * b - 1.0));
        let w = z * (al + h).sqrt() / h
            - (1.0 / (2.0 * b - 1.0) - 1.0 / (2.0 * a - 1.0)) * (al + 5.0 / 6.0 - 2.0 / (3.0 * h));
        a / (a + b * (2.0 * w).exp())
    } else {
        let lna = (a / (a + b)).ln();
        let lnb = (b / (a + b)).ln();
        let t = (a * lna).exp() / a;
        let u = (b * lnb).exp() / b;
        let w = t + u;
        if p < t / w {
            (a * w * p).powf(1.0 / a)
        } else {
            1.0 - (b * w * (1.0 - p)).powf(1.0 / b)
        }
    };
    let a1 = a - 1.0;
    let b1 = b - 1.0;
    let afac = -ln_beta(a, b);
    for j in 0..20 {
        if x <= 0.0 || x >= 1.0 {
            break;
        }
        let err = inc_beta(a, b, x, 1.0 - x) - p;
        let t = (a1 * x.ln() + b1 * (1.0 - x).ln() + afac).exp();
        let u = err / t;
        let step = u / (1.0 - 0.5 * f64::min(1.0, u * (a1 / x - b1 / (1.0 - x))));
        x -= step;
        if x <= 0.0 {
            x = 0.5 * (x + step);
        }
        if x >= 1.0 {
            x = 0.5 * (x + step + 1.0);
        }
        if step.abs() < 1e-10 * x && j > 0 {
            break;
        }
    }
    x.clamp(0.0, 1.0)
}

pub(crate) fn t_ln_pdf(x: f64, nu: f64) -> f64 {
    ln_gamma(0.5 * (nu + 1.0))
        - ln_gamma(0.5 * nu)
        - 0.5 * (nu * PI).ln()
        - 0.5 * (nu + 1.0) * (x * x / nu).ln_1p()
}

/// Lower-tail mass `P(T <= -|x|)`.
fn t_tail(x: f64, nu: f64) -> f64 {
    let x2 = x * x;
    // z = nu / (nu + x²) and 1 - z, each formed without subtraction.
    let z = 1.0 / (1.0 + x2 / nu);
    let one_minus_z = 1.0 / (1.0 + nu / x2);
    0.5 * inc_beta(0.5 * nu, 0.5, z, one_minus_z)
}

pub(crate) fn t_cdf(x: f64, nu: f64) -> f64 {
    if x == 0.0 {
        return 0.5;
    }
    if x.is_infinite() {
        return if x > 0.0 { 1.0 } else { 0.0 };
    }
    let tail = t_tail(x, nu);
    if x < 0.0 {
        tail
    } else {
        1.0 - tail
    }
}

pub(crate) fn t_quantile(p: f64, nu: f64) -> f64 {
    if p == 0.5 {
        return 0.0;
    }
    if p > 0.5 {
        return -t_quantile(1.0 - p, nu);
    }
    // 2p = I_z(nu/2, 1/2) with z = nu / (nu + x²), x < 0.
    let z = inv_inc_beta(2.0 * p, 0.5 * nu, 0.5);
    let mut x = if z > 0.0 && z < 1.0 {
        -(nu * (1.0 - z) / z).sqrt()
    } else {
        -1.0
    };
    if !x.is_finite() {
        x = -1.0;
    }

    // Safeguarded Newton polish on the distribution function itself.
    let mut hi = 0.0_f64;
    let mut lo = x.min(-1.0);
    while t_cdf(lo, nu) > p {
        hi = lo;
        lo *= 2.0;
    }
    if !(x > lo && x < hi) {
        x = 0.5 * (lo + hi);
    }
    for _ in 0..200 {
        let f = t_cdf(x, nu) - p;
        if f == 0.0 {
            return x;
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let step = f / t_ln_pdf(x, nu).exp();
        let mut next = x - step;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 2.0 * EPS * x.abs() || next == lo || next == hi {
            return next;
        }
        x = next;
    }
    x
}

/// `ln Γ(1/2) = ln √π`.
pub(crate) const LN_GAMMA_HALF: f64 = LN_SQRT_PI;

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn log_gamma_spot_values() {
        assert!(log_gamma(1.0).unwrap().abs() < 1e-14);
        assert!(close(log_gamma(0.5).unwrap(), 0.5 * PI.ln(), 1e-14));
        assert!(close(log_gamma(5.0).unwrap(), 24f64.ln(), 1e-13));
        assert!(close(log_gamma(2.0).unwrap(), 0.0, 1e-14));
    }

    #[test]
    fn log_gamma_rejects_non_positive() {
        assert!(matches!(log_gamma(0.0), Err(Error::Domain { .. })));
        assert!(log_gamma(-1.5).is_err());
        assert!(log_gamma(f64::NAN).is_err());
    }

    #[test]
    fn digamma_spot_values() {
        assert!(close(digamma(1.0).unwrap(), -EULER_GAMMA, 1e-13));
        assert!(close(
            digamma(0.5).unwrap(),
            -EULER_GAMMA - 2.0 * LN_2,
            1e-13
        ));
        assert!(close(digamma(2.0).unwrap(), 1.0 - EULER_GAMMA, 1e-13));
        assert!(digamma(0.0).is_err());
    }

    #[test]
    fn log_beta_spot_values() {
        assert!(close(log_beta(0.5, 0.5).unwrap(), PI.ln(), 1e-13));
        assert!(close(log_beta(3.0, 1.0).unwrap(), -(3f64.ln()), 1e-13));
        assert!(close(
            log_beta(2.0, 3.0).unwrap(),
            (1.0f64 / 12.0).ln(),
            1e-13
        ));
        assert!(log_beta(1.0, 0.0).is_err());
    }

    #[test]
    fn normal_symmetry_points() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert_eq!(std_normal_quantile(0.5).unwrap(), 0.0);
        assert!(close(std_normal_cdf(1.959_964), 0.975, 1e-6));
        assert!(std_normal_quantile(0.0).is_err());
        assert!(std_normal_quantile(1.0).is_err());
    }

    #[test]
    fn student_t_spot_values() {
        for nu in [0.5, 1.0, 3.0, 30.0] {
            assert_eq!(student_t_cdf(0.0, nu).unwrap(), 0.5);
            assert_eq!(student_t_quantile(0.5, nu).unwrap(), 0.0);
        }
        assert!(close(student_t_quantile(0.75, 1.0).unwrap(), 1.0, 1e-12));
        let gap = (student_t_cdf(1.0, 1e6).unwrap() - std_normal_cdf(1.0)).abs();
        assert!(gap < 1e-3, "gap {gap}");
        assert!(student_t_cdf(1.0, 0.0).is_err());
        assert!(student_t_quantile(1.0, 3.0).is_err());
    }

    #[test]
    fn cauchy_quantile_matches_tangent() {
        for p in [1e-6, 0.01, 0.2, 0.4, 0.6, 0.9, 0.999] {
            let expected = (PI * (p - 0.5)).tan();
            let got = student_t_quantile(p, 1.0).unwrap();
            assert!(
                (got - expected).abs() <= 1e-9 * expected.abs().max(1.0),
                "p={p}: {got} vs {expected}"
            );
        }
    }

    #[test]
    fn incomplete_beta_endpoints_and_symmetry() {
        assert_eq!(regularized_incomplete_beta(2.0, 3.0, 0.0).unwrap(), 0.0);
        assert_eq!(regularized_incomplete_beta(2.0, 3.0, 1.0).unwrap(), 1.0);
        let a = regularized_incomplete_beta(2.5, 0.7, 0.3).unwrap();
        let b = regularized_incomplete_beta(0.7, 2.5, 0.7).unwrap();
        assert!(close(a + b, 1.0, 1e-14));
        // I_x(1, 1) = x.
        assert!(close(
            regularized_incomplete_beta(1.0, 1.0, 0.37).unwrap(),
            0.37,
            1e-15
        ));
        assert!(regularized_incomplete_beta(1.0, 1.0, 1.5).is_err());
    }
}
