//! Closed-form entropy and mutual information of Gaussian and Student-T models.

use std::f64::consts::PI;

use crate::special::{ln_beta, ln_gamma, psi, LN_GAMMA_HALF};
use crate::{Error, Result};

/// Above this `nu` the excess is evaluated from its asymptotic series; the
/// closed form loses digits to cancellation between O(ln nu) terms.
const EXCESS_SERIES_NU: f64 = 100.0;

/// Coefficients of `excess(nu) = Σ c_j nu^{-j}`, `j = 2..=9`.
const EXCESS_SERIES: [f64; 8] = [
    1.0 / 2.0,
    -1.0 / 3.0,
    -1.0 / 4.0,
    3.0 / 5.0,
    1.0 / 2.0,
    -17.0 / 7.0,
    -17.0 / 8.0,
    155.0 / 9.0,
];

fn check_rho(function: &'static str, rho: f64) -> Result<()> {
    if rho.abs() < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(
            function,
            format!("|rho| must be < 1, got {rho}"),
        ))
    }
}

fn check_nu(function: &'static str, nu: f64) -> Result<()> {
    if nu > 0.0 && nu.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(
            function,
            format!("nu must be finite and > 0, got {nu}"),
        ))
    }
}

/// Mutual information of the Gaussian copula, `−½ ln(1 − ρ²)`.
pub fn mi_gaussian(rho: f64) -> Result<f64> {
    check_rho("mi_gaussian", rho)?;
    Ok(-0.5 * (-rho * rho).ln_1p())
}

pub(crate) fn excess_closed_form(nu: f64) -> f64 {
    (nu / (2.0 * PI)).ln() + 2.0 * ln_beta(0.5 * nu, 0.5) - (2.0 + nu) / nu
        + (1.0 + nu) * (psi(0.5 * (nu + 1.0)) - psi(0.5 * nu))
}

fn excess_series(nu: f64) -> f64 {
    let r = 1.0 / nu;
    let poly = EXCESS_SERIES.iter().rev().fold(0.0, |acc, &c| acc * r + c);
    poly * r * r
}

/// Information excess of the Student-T copula over the Gaussian copula with
/// the same `rho`. Depends on `nu` only; decreases to 0 as `nu → ∞`.
pub fn excess_information(nu: f64) -> Result<f64> {
    check_nu("excess_information", nu)?;
    Ok(if nu >= EXCESS_SERIES_NU {
        excess_series(nu)
    } else {
        excess_closed_form(nu)
    })
}

/// Mutual information of the Student-T copula: `mi_gaussian(ρ) + excess(ν)`.
pub fn mi_t(rho: f64, nu: f64) -> Result<f64> {
    Ok(mi_gaussian(rho)? + excess_information(nu)?)
}

/// Symmetric positive-definite matrix with unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    d: usize,
    entries: Vec<f64>,
    log_det: f64,
}

impl CorrelationMatrix {
    /// Row-major `d × d` entries.
    pub fn new(d: usize, entries: Vec<f64>) -> Result<Self> {
        if d == 0 || entries.len() != d * d {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {d}x{d} matrix, got {}",
                d * d,
                entries.len()
            )));
        }
        for i in 0..d {
            if entries[i * d + i] != 1.0 {
                return Err(Error::domain(
                    "CorrelationMatrix",
                    format!("diagonal entry {i} is {}, expected 1", entries[i * d + i]),
                ));
            }
            for j in 0..i {
                if entries[i * d + j] != entries[j * d + i] || !entries[i * d + j].is_finite() {
                    return Err(Error::domain(
                        "CorrelationMatrix",
                        format!("entries ({i},{j}) and ({j},{i}) differ or are not finite"),
                    ));
                }
            }
        }
        let log_det = cholesky_log_det(d, &entries)
            .ok_or_else(|| Error::domain("CorrelationMatrix", "matrix is not positive definite"))?;
        Ok(CorrelationMatrix {
            d,
            entries,
            log_det,
        })
    }

    pub fn identity(d: usize) -> Result<Self> {
        let mut entries = vec![0.0; d * d];
        for i in 0..d {
            entries[i * d + i] = 1.0;
        }
        CorrelationMatrix::new(d, entries)
    }

    /// The 2 × 2 matrix with off-diagonal `rho`.
    pub fn bivariate(rho: f64) -> Result<Self> {
        CorrelationMatrix::new(2, vec![1.0, rho, rho, 1.0])
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.d + j]
    }

    /// `ln |Σ|`.
    pub fn log_det(&self) -> f64 {
        self.log_det
    }
}

/// `ln det` through a Cholesky factorization; `None` unless positive definite.
fn cholesky_log_det(d: usize, a: &[f64]) -> Option<f64> {
    let mut l = vec![0.0; d * d];
    let mut log_det = 0.0;
    for j in 0..d {
        let mut diag = a[j * d + j];
        for k in 0..j {
            diag -= l[j * d + k] * l[j * d + k];
        }
        if !(diag > 0.0) {
            return None;
        }
        let ljj = diag.sqrt();
        l[j * d + j] = ljj;
        log_det += 2.0 * ljj.ln();
        for i in j + 1..d {
            let mut s = a[i * d + j];
            for k in 0..j {
                s -= l[i * d + k] * l[j * d + k];
            }
            l[i * d + j] = s / ljj;
        }
    }
    Some(log_det)
}

/// Differential entropy (nats) of the `d`-dimensional standard Student-t
/// distribution with correlation matrix `sigma` and `nu` degrees of freedom.
pub fn student_entropy(sigma: &CorrelationMatrix, nu: f64) -> Result<f64> {
    check_nu("student_entropy", nu)?;
    let d = sigma.dim() as f64;
    Ok(
        0.5 * (d * (PI * nu).ln() + sigma.log_det()) + ln_beta(0.5 * nu, 0.5 * d)
            - ln_gamma(0.5 * d)
            + 0.5 * (nu + d) * (psi(0.5 * (nu + d)) - psi(0.5 * nu)),
    )
}

/// Total correlation (multi-information, nats) of the `d`-dimensional
/// Student-t distribution, `d ≥ 2`. Only `−½ ln|Σ|` depends on `sigma`.
pub fn mi_t_multivariate(sigma: &CorrelationMatrix, nu: f64) -> Result<f64> {
    check_nu("mi_t_multivariate", nu)?;
    if sigma.dim() < 2 {
        return Err(Error::InvalidArgument(
            "mutual information needs dimension >= 2".into(),
        ));
    }
    let d = sigma.dim() as f64;
    let log_braces = d * ln_beta(0.5 * nu, 0.5) + ln_gamma(0.5 * d)
        - d * LN_GAMMA_HALF
        - ln_beta(0.5 * nu, 0.5 * d);
    Ok(
        -0.5 * sigma.log_det() + log_braces - 0.5 * nu * (d - 1.0) * psi(0.5 * nu)
            + 0.5 * d * (nu + 1.0) * psi(0.5 * (nu + 1.0))
            - 0.5 * (nu + d) * psi(0.5 * (nu + d)),
    )
}
