//! Parametric copulas: Gaussian and Student-T.
//!
//! Densities are evaluated in log space. For small `nu` the Student-T copula
//! density diverges in the corners of the unit square and the direct ratio
//! overflows long before its logarithm does.

mod info;
mod sample;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rank::PseudoObservations;
use crate::special::{ln_gamma, norm_quantile, t_quantile};
use crate::{Error, Result};

pub use info::{
    excess_information, mi_gaussian, mi_t, mi_t_multivariate, student_entropy, CorrelationMatrix,
};
pub use sample::{apply_marginals, sample_copula, MarginalSpec};

/// Gaussian copula `Gaussian(rho)` or Student-T copula `StudentT(rho, nu)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CopulaModel {
    Gaussian { rho: f64 },
    StudentT { rho: f64, nu: f64 },
}

impl CopulaModel {
    pub fn gaussian(rho: f64) -> Result<Self> {
        let m = CopulaModel::Gaussian { rho };
        m.validate()?;
        Ok(m)
    }

    pub fn student_t(rho: f64, nu: f64) -> Result<Self> {
        let m = CopulaModel::StudentT { rho, nu };
        m.validate()?;
        Ok(m)
    }

    pub fn rho(&self) -> f64 {
        match *self {
            CopulaModel::Gaussian { rho } | CopulaModel::StudentT { rho, .. } => rho,
        }
    }

    /// Degrees of freedom; `None` for the Gaussian copula (`nu = ∞`).
    pub fn nu(&self) -> Option<f64> {
        match *self {
            CopulaModel::Gaussian { .. } => None,
            CopulaModel::StudentT { nu, .. } => Some(nu),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let rho = self.rho();
        if !(rho.abs() < 1.0) {
            return Err(Error::domain(
                "CopulaModel",
                format!("|rho| must be < 1, got {rho}"),
            ));
        }
        if let Some(nu) = self.nu() {
            if !(nu > 0.0 && nu.is_finite()) {
                return Err(Error::domain(
                    "CopulaModel",
                    format!("nu must be finite and > 0, got {nu}"),
                ));
            }
        }
        Ok(())
    }

    /// Closed-form mutual information of the copula (nats).
    pub fn mutual_information(&self) -> Result<f64> {
        match *self {
            CopulaModel::Gaussian { rho } => mi_gaussian(rho),
            CopulaModel::StudentT { rho, nu } => mi_t(rho, nu),
        }
    }

    /// Population Kendall's tau, `(2/π) asin ρ` for both families.
    pub fn kendall_tau(&self) -> Result<f64> {
        self.validate()?;
        crate::rank::rho_to_tau(self.rho())
    }
}

/// Precomputed constants for repeated density evaluation.
struct LogDensity {
    model: CopulaModel,
    one_minus_rho2: f64,
    log_norm: f64,
}

impl LogDensity {
    fn new(model: CopulaModel) -> Result<Self> {
        model.validate()?;
        let rho = model.rho();
        let one_minus_rho2 = 1.0 - rho * rho;
        let log_norm = match model {
            CopulaModel::Gaussian { .. } => -0.5 * one_minus_rho2.ln(),
            CopulaModel::StudentT { nu, .. } => {
                ln_gamma(0.5 * (nu + 2.0)) + ln_gamma(0.5 * nu)
                    - 2.0 * ln_gamma(0.5 * (nu + 1.0))
                    - 0.5 * one_minus_rho2.ln()
            }
        };
        Ok(LogDensity {
            model,
            one_minus_rho2,
            log_norm,
        })
    }

    fn eval(&self, u: f64, v: f64) -> Result<f64> {
        let inside = |w: f64| w > 0.0 && w < 1.0;
        if !inside(u) || !inside(v) {
            return Err(Error::domain(
                "copula_density",
                format!("(u, v) = ({u}, {v}) must lie strictly inside the unit square"),
            ));
        }
        let rho = self.model.rho();
        Ok(match self.model {
            CopulaModel::Gaussian { .. } => {
                let a = norm_quantile(u);
                let b = norm_quantile(v);
                self.log_norm
                    - (rho * rho * (a * a + b * b) - 2.0 * rho * a * b)
                        / (2.0 * self.one_minus_rho2)
            }
            CopulaModel::StudentT { nu, .. } => {
                let a = t_quantile(u, nu);
                let b = t_quantile(v, nu);
                let q = (a * a + b * b - 2.0 * rho * a * b) / self.one_minus_rho2;
                self.log_norm - 0.5 * (nu + 2.0) * (q / nu).ln_1p()
                    + 0.5 * (nu + 1.0) * ((a * a / nu).ln_1p() + (b * b / nu).ln_1p())
            }
        })
    }
}

/// `ln c[u, v]`.
pub fn copula_log_density(m: &CopulaModel, u: f64, v: f64) -> Result<f64> {
    LogDensity::new(*m)?.eval(u, v)
}

/// Copula density `c[u, v]` for `(u, v)` strictly inside the unit square.
pub fn copula_density(m: &CopulaModel, u: f64, v: f64) -> Result<f64> {
    copula_log_density(m, u, v).map(f64::exp)
}

/// Mean log copula density over the pseudo-observations (nats per observation).
pub fn copula_log_likelihood(m: &CopulaModel, p: &PseudoObservations) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::TooFewObservations {
            required: 1,
            actual: 0,
        });
    }
    let density = LogDensity::new(*m)?;
    let terms = p
        .u()
        .par_iter()
        .zip(p.v().par_iter())
        .with_min_len(128)
        .map(|(&u, &v)| density.eval(u, v))
        .collect::<Result<Vec<f64>>>()?;
    Ok(terms.iter().sum::<f64>() / terms.len() as f64)
}
