//! Copula samplers and marginal transforms.
//!
//! Random numbers come from ChaCha8 seeded with `seed`; the output is a pure
//! function of `(model, n, seed)`. Normal variates use the Ziggurat sampler
//! and chi-square variates the Marsaglia–Tsang gamma sampler (valid for any
//! shape > 0) from `rand_distr`.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::CopulaModel;
use crate::rank::{PseudoObservations, SamplePairs};
use crate::special::{norm_quantile, std_normal_cdf, t_cdf, t_quantile};
use crate::{Error, Result};

fn open_unit(w: f64) -> f64 {
    // Clamp to the open interval; only reachable for astronomically rare draws.
    w.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

/// Draws `n` points from the copula.
pub fn sample_copula(m: &CopulaModel, n: usize, seed: u64) -> Result<PseudoObservations> {
    m.validate()?;
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho = m.rho();
    let c = (1.0 - rho * rho).sqrt();
    let chi2 = match *m {
        CopulaModel::StudentT { nu, .. } => Some((
            nu,
            ChiSquared::new(nu).map_err(|e| Error::domain("sample_copula", e.to_string()))?,
        )),
        CopulaModel::Gaussian { .. } => None,
    };
    let mut u = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    for _ in 0..n {
        let z1: f64 = StandardNormal.sample(&mut rng);
        let z2: f64 = StandardNormal.sample(&mut rng);
        let x = z1;
        let y = rho * z1 + c * z2;
        match &chi2 {
            None => {
                u.push(open_unit(std_normal_cdf(x)));
                v.push(open_unit(std_normal_cdf(y)));
            }
            Some((nu, dist)) => {
                let g: f64 = dist.sample(&mut rng);
                let scale = (nu / g).sqrt();
                u.push(open_unit(t_cdf(x * scale, *nu)));
                v.push(open_unit(t_cdf(y * scale, *nu)));
            }
        }
    }
    PseudoObservations::new(u, v)
}

/// A univariate marginal distribution, used through its quantile function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum MarginalSpec {
    Uniform,
    Gaussian { mu: f64, sigma: f64 },
    StudentT { nu: f64 },
    LogNormal { mu: f64, sigma: f64 },
}

impl MarginalSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            MarginalSpec::Uniform => true,
            MarginalSpec::Gaussian { mu, sigma } | MarginalSpec::LogNormal { mu, sigma } => {
                mu.is_finite() && sigma > 0.0 && sigma.is_finite()
            }
            MarginalSpec::StudentT { nu } => nu > 0.0 && nu.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(
                "MarginalSpec",
                format!("invalid parameters in {self}"),
            ))
        }
    }

    /// Inverse distribution function on `(0, 1)`.
    pub fn quantile(&self, p: f64) -> f64 {
        match *self {
            MarginalSpec::Uniform => p,
            MarginalSpec::Gaussian { mu, sigma } => mu + sigma * norm_quantile(p),
            MarginalSpec::StudentT { nu } => t_quantile(p, nu),
            MarginalSpec::LogNormal { mu, sigma } => (mu + sigma * norm_quantile(p)).exp(),
        }
    }
}

impl fmt::Display for MarginalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            MarginalSpec::Uniform => write!(f, "uniform"),
            MarginalSpec::Gaussian { mu, sigma } => write!(f, "gaussian:{mu},{sigma}"),
            MarginalSpec::StudentT { nu } => write!(f, "student:{nu}"),
            MarginalSpec::LogNormal { mu, sigma } => write!(f, "lognormal:{mu},{sigma}"),
        }
    }
}

/// Parses `uniform`, `gaussian[:mu,sigma]`, `student:nu`, `lognormal[:mu,sigma]`.
impl FromStr for MarginalSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a)),
            None => (s.trim(), None),
        };
        let params: Vec<f64> = match args {
            Some(a) => a
                .split(',')
                .map(|t| {
                    t.trim().parse::<f64>().map_err(|_| {
                        Error::InvalidArgument(format!("bad marginal parameter {t:?} in {s:?}"))
                    })
                })
                .collect::<Result<_>>()?,
            None => Vec::new(),
        };
        let spec = match (name.to_ascii_lowercase().as_str(), params.as_slice()) {
            ("uniform", []) => MarginalSpec::Uniform,
            ("gaussian" | "normal", []) => MarginalSpec::Gaussian {
                mu: 0.0,
                sigma: 1.0,
            },
            ("gaussian" | "normal", [mu, sigma]) => MarginalSpec::Gaussian {
                mu: *mu,
                sigma: *sigma,
            },
            ("student" | "t", [nu]) => MarginalSpec::StudentT { nu: *nu },
            ("lognormal", []) => MarginalSpec::LogNormal {
                mu: 0.0,
                sigma: 1.0,
            },
            ("lognormal", [mu, sigma]) => MarginalSpec::LogNormal {
                mu: *mu,
                sigma: *sigma,
            },
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unrecognised marginal {s:?}; expected uniform, gaussian[:mu,sigma], \
                     student:nu or lognormal[:mu,sigma]"
                )))
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Builds a joint sample from copula draws and marginals by inverse CDF.
pub fn apply_marginals(
    p: &PseudoObservations,
    mx: &MarginalSpec,
    my: &MarginalSpec,
) -> Result<SamplePairs> {
    mx.validate()?;
    my.validate()?;
    SamplePairs::new(
        p.u().iter().map(|&u| mx.quantile(u)).collect(),
        p.v().iter().map(|&v| my.quantile(v)).collect(),
    )
}
