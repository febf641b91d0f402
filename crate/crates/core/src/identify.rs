//! T-copula identification in the (Kendall's tau, mutual information) plane.
//!
//! Kendall's tau fixes `rho` through `ρ = sin(πτ/2)`. The KSG estimate of the
//! mutual information minus the Gaussian-copula information `−½ ln(1 − ρ²)`
//! is the information excess, which for a T-copula depends on `nu` alone and
//! is inverted for `nu`. The map from tau to `rho` holds for elliptical
//! copulas only; the pipeline assumes a Gaussian or Student-T model.
//!
//! The excess interval is the MI bootstrap interval shifted by the Gaussian
//! term, treating `ρ̂` as exact. The Gaussian verdict is one-sided: the model
//! is declared Gaussian unless the lower bound of the one-sided interval at
//! the bootstrap level is strictly positive.

use serde::{Serialize, Serializer};

use crate::copula::{copula_log_likelihood, excess_information, mi_gaussian, CopulaModel};
use crate::ksg::{bootstrap_mi, BootstrapConfig, KsgConfig, MiEstimate};
use crate::rank::{
    kendall_tau, pseudo_observations, spearman_rho, tau_to_rho, SamplePairs, TiePolicy,
};
use crate::{Error, Result};

/// Lower end of the degrees-of-freedom search bracket.
pub const NU_MIN: f64 = 0.5;
/// Upper end of the bracket; smaller excesses are reported as Gaussian.
pub const NU_MAX: f64 = 1e6;
/// Fewer observations than this are rejected by the fit.
pub const MIN_OBSERVATIONS: usize = 100;

/// Estimated degrees of freedom, or the Gaussian limit `nu = ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NuHat {
    Finite(f64),
    Gaussian,
}

impl NuHat {
    pub fn value(&self) -> f64 {
        match *self {
            NuHat::Finite(nu) => nu,
            NuHat::Gaussian => f64::INFINITY,
        }
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self, NuHat::Gaussian)
    }
}

impl std::fmt::Display for NuHat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NuHat::Finite(nu) => write!(f, "{nu}"),
            NuHat::Gaussian => write!(f, "gaussian"),
        }
    }
}

/// Serialized as a number, or the string `"gaussian"`.
impl Serialize for NuHat {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            NuHat::Finite(nu) => serializer.serialize_f64(nu),
            NuHat::Gaussian => serializer.serialize_str("gaussian"),
        }
    }
}

/// Inverts the excess curve: the `nu` in `[NU_MIN, NU_MAX]` whose excess is `e`.
///
/// Non-positive `e`, or `e` below the excess at `NU_MAX`, gives
/// [`NuHat::Gaussian`]. `e` above the excess at `NU_MIN` is an error.
pub fn invert_excess(e: f64) -> Result<NuHat> {
    if e.is_nan() {
        return Err(Error::InvalidArgument("excess is NaN".into()));
    }
    if e <= 0.0 {
        return Ok(NuHat::Gaussian);
    }
    let ceiling = excess_information(NU_MIN)?;
    if e > ceiling {
        return Err(Error::ExcessOutOfRange {
            value: e,
            ceiling,
            nu_min: NU_MIN,
        });
    }
    if e < excess_information(NU_MAX)? {
        return Ok(NuHat::Gaussian);
    }
    // Bisection on ln nu; the excess is strictly decreasing.
    let (mut lo, mut hi) = (NU_MIN.ln(), NU_MAX.ln());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess_information(mid.exp())? > e {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (nu_lo, nu_hi) = (lo.exp(), hi.exp());
    let pick = if (excess_information(nu_lo)? - e).abs() <= (excess_information(nu_hi)? - e).abs() {
        nu_lo
    } else {
        nu_hi
    };
    Ok(NuHat::Finite(pick))
}

/// Estimator settings of the identification pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FitConfig {
    pub ksg: KsgConfig,
    pub bootstrap: BootstrapConfig,
    /// Invert the point excess even when its interval does not exclude zero.
    pub force_nu: bool,
}

/// Result of [`fit_t_copula`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub n: usize,
    /// Kendall's tau-b.
    pub tau: f64,
    /// `sin(π τ / 2)`.
    pub rho_hat: f64,
    /// Reported for reference only; never inverted.
    pub spearman: f64,
    pub mi: MiEstimate,
    /// `mi.value − mi_gaussian(rho_hat)`.
    pub excess: f64,
    pub excess_ci: (f64, f64),
    /// One-sided lower bound at the bootstrap level; drives the verdict.
    pub excess_lower_bound: f64,
    pub nu_hat: NuHat,
    /// Mean log copula density of the fitted model on the pseudo-observations.
    pub loglik_at_fit: f64,
    /// `mi.value − loglik_at_fit`, the estimated relative entropy between the
    /// data copula and the fitted model. Nonnegative in the population.
    pub kl_diagnostic: f64,
}

impl FitReport {
    pub fn model(&self) -> CopulaModel {
        match self.nu_hat {
            NuHat::Finite(nu) => CopulaModel::StudentT {
                rho: self.rho_hat,
                nu,
            },
            NuHat::Gaussian => CopulaModel::Gaussian { rho: self.rho_hat },
        }
    }
}

/// Output of [`gaussianity_test`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianityReport {
    pub excess: f64,
    pub excess_ci: (f64, f64),
    pub excess_lower_bound: f64,
    pub is_gaussian: bool,
}

struct Measured {
    tau: f64,
    rho_hat: f64,
    mi: MiEstimate,
    gaussian_mi: f64,
}

impl Measured {
    fn excess(&self) -> f64 {
        self.mi.value - self.gaussian_mi
    }

    fn excess_ci(&self) -> (f64, f64) {
        (
            self.mi.ci_low - self.gaussian_mi,
            self.mi.ci_high - self.gaussian_mi,
        )
    }

    fn excess_lower_bound(&self) -> f64 {
        self.mi.one_sided_low - self.gaussian_mi
    }
}

fn measure(s: &SamplePairs, cfg: &FitConfig) -> Result<Measured> {
    if s.len() < MIN_OBSERVATIONS {
        return Err(Error::TooFewObservations {
            required: MIN_OBSERVATIONS,
            actual: s.len(),
        });
    }
    let tau = kendall_tau(s)?;
    let rho_hat = tau_to_rho(tau).map_err(|_| {
        Error::Degenerate(format!(
            "Kendall's tau is {tau}; perfectly (anti)monotone data have no T-copula fit"
        ))
    })?;
    let mi = bootstrap_mi(s, &cfg.ksg, &cfg.bootstrap)?;
    Ok(Measured {
        tau,
        rho_hat,
        gaussian_mi: mi_gaussian(rho_hat)?,
        mi,
    })
}

/// Fits the best T-copula (or the Gaussian limit) to a sample.
pub fn fit_t_copula(s: &SamplePairs, cfg: &FitConfig) -> Result<FitReport> {
    let m = measure(s, cfg)?;
    let excess = m.excess();
    let lower = m.excess_lower_bound();
    let nu_hat = if lower > 0.0 || cfg.force_nu {
        invert_excess(excess)?
    } else {
        NuHat::Gaussian
    };
    let model = match nu_hat {
        NuHat::Finite(nu) => CopulaModel::student_t(m.rho_hat, nu)?,
        NuHat::Gaussian => CopulaModel::gaussian(m.rho_hat)?,
    };
    let pseudo = pseudo_observations(s, TiePolicy::AverageRank);
    let loglik_at_fit = copula_log_likelihood(&model, &pseudo)?;
    Ok(FitReport {
        n: s.len(),
        tau: m.tau,
        rho_hat: m.rho_hat,
        spearman: spearman_rho(s)?,
        excess,
        excess_ci: m.excess_ci(),
        excess_lower_bound: lower,
        nu_hat,
        loglik_at_fit,
        kl_diagnostic: m.mi.value - loglik_at_fit,
        mi: m.mi,
    })
}

/// Information-excess test of the Gaussian-copula hypothesis.
pub fn gaussianity_test(s: &SamplePairs, cfg: &FitConfig) -> Result<GaussianityReport> {
    let m = measure(s, cfg)?;
    let lower = m.excess_lower_bound();
    Ok(GaussianityReport {
        excess: m.excess(),
        excess_ci: m.excess_ci(),
        excess_lower_bound: lower,
        is_gaussian: lower <= 0.0,
    })
}
