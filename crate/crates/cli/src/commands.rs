//! The subcommands as library functions returning serializable rows.

use std::path::Path;

use copinfo::copula::{
    apply_marginals, excess_information, mi_gaussian, sample_copula, CopulaModel, MarginalSpec,
};
use copinfo::identify::{fit_t_copula, FitConfig, FitReport, NuHat, MIN_OBSERVATIONS};
use copinfo::ksg::{bootstrap_mi, ksg_mi, BootstrapConfig, InputTransform, KsgConfig};
use copinfo::rank::{kendall_tau, tau_to_rho};
use copinfo::SamplePairs;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::input::{ingest_returns, pairwise_complete, PricePanel, ReturnMode};

pub const UNITS: &str = "nats";

/// Seed of sub-stream `stream` of `master`, by two splitmix64 rounds.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    splitmix(master ^ splitmix(stream))
}

/// Sub-seed of a ticker pair; depends on the names only, so adding tickers
/// to a panel leaves existing rows unchanged.
pub fn pair_seed(master: u64, a: &str, b: &str) -> u64 {
    // FNV-1a over "a\0b".
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in a.bytes().chain([0]).chain(b.bytes()) {
        h = (h ^ u64::from(byte)).wrapping_mul(0x0100_0000_01b3);
    }
    derive_seed(master, h)
}

fn transform_name(t: InputTransform) -> &'static str {
    match t {
        InputTransform::Raw => "raw",
        InputTransform::Ranks => "ranks",
    }
}

fn pairs(x: Vec<f64>, y: Vec<f64>) -> Result<SamplePairs> {
    Ok(SamplePairs::new(x, y)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MiRow {
    pub n: usize,
    pub value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub one_sided_low: f64,
    pub k: usize,
    pub transform: &'static str,
    pub tie_seed: u64,
    pub replicates: usize,
    pub level: f64,
    pub seed: u64,
    pub units: &'static str,
}

pub fn mi(x: Vec<f64>, y: Vec<f64>, ksg: &KsgConfig, boot: &BootstrapConfig) -> Result<MiRow> {
    let est = bootstrap_mi(&pairs(x, y)?, ksg, boot)?;
    Ok(MiRow {
        n: est.n,
        value: est.value,
        ci_low: est.ci_low,
        ci_high: est.ci_high,
        one_sided_low: est.one_sided_low,
        k: est.k,
        transform: transform_name(est.transform),
        tie_seed: ksg.tie_seed,
        replicates: est.replicates,
        level: est.level,
        seed: est.seed,
        units: UNITS,
    })
}

/// Flat view of a [`FitReport`]; `ci_*` bound the mutual information.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitRow {
    pub n: usize,
    pub tau: f64,
    pub rho_hat: f64,
    pub spearman: f64,
    pub mi: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub one_sided_low: f64,
    pub excess: f64,
    pub excess_ci_low: f64,
    pub excess_ci_high: f64,
    pub excess_lower_bound: f64,
    pub nu_hat: NuHat,
    pub is_gaussian: bool,
    pub loglik_at_fit: f64,
    pub kl_diagnostic: f64,
    pub k: usize,
    pub transform: &'static str,
    pub tie_seed: u64,
    pub replicates: usize,
    pub level: f64,
    pub seed: u64,
    pub force_nu: bool,
    pub units: &'static str,
}

impl FitRow {
    fn new(r: &FitReport, cfg: &FitConfig) -> Self {
        FitRow {
            n: r.n,
            tau: r.tau,
            rho_hat: r.rho_hat,
            spearman: r.spearman,
            mi: r.mi.value,
            ci_low: r.mi.ci_low,
            ci_high: r.mi.ci_high,
            one_sided_low: r.mi.one_sided_low,
            excess: r.excess,
            excess_ci_low: r.excess_ci.0,
            excess_ci_high: r.excess_ci.1,
            excess_lower_bound: r.excess_lower_bound,
            nu_hat: r.nu_hat,
            is_gaussian: r.nu_hat.is_gaussian(),
            loglik_at_fit: r.loglik_at_fit,
            kl_diagnostic: r.kl_diagnostic,
            k: cfg.ksg.k,
            transform: transform_name(cfg.ksg.transform),
            tie_seed: cfg.ksg.tie_seed,
            replicates: cfg.bootstrap.replicates,
            level: cfg.bootstrap.level,
            seed: cfg.bootstrap.seed,
            force_nu: cfg.force_nu,
            units: UNITS,
        }
    }
}

pub fn fit(x: Vec<f64>, y: Vec<f64>, cfg: &FitConfig) -> Result<FitRow> {
    let report = fit_t_copula(&pairs(x, y)?, cfg)?;
    Ok(FitRow::new(&report, cfg))
}

/// One unordered ticker pair. The estimate columns are empty when the pair
/// was skipped, and `skip_reason` says why.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub ticker_a: String,
    pub ticker_b: String,
    pub n: usize,
    pub seed: u64,
    pub tau: Option<f64>,
    pub rho_hat: Option<f64>,
    pub spearman: Option<f64>,
    pub mi: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub one_sided_low: Option<f64>,
    pub excess: Option<f64>,
    pub excess_ci_low: Option<f64>,
    pub excess_ci_high: Option<f64>,
    pub excess_lower_bound: Option<f64>,
    pub nu_hat: Option<NuHat>,
    pub is_gaussian: Option<bool>,
    pub loglik_at_fit: Option<f64>,
    pub kl_diagnostic: Option<f64>,
    pub skip_reason: Option<String>,
}

impl ScanRow {
    fn skipped(a: &str, b: &str, n: usize, seed: u64, reason: String) -> Self {
        ScanRow {
            ticker_a: a.into(),
            ticker_b: b.into(),
            n,
            seed,
            tau: None,
            rho_hat: None,
            spearman: None,
            mi: None,
            ci_low: None,
            ci_high: None,
            one_sided_low: None,
            excess: None,
            excess_ci_low: None,
            excess_ci_high: None,
            excess_lower_bound: None,
            nu_hat: None,
            is_gaussian: None,
            loglik_at_fit: None,
            kl_diagnostic: None,
            skip_reason: Some(reason),
        }
    }

    fn fitted(a: &str, b: &str, seed: u64, f: FitRow) -> Self {
        ScanRow {
            ticker_a: a.into(),
            ticker_b: b.into(),
            n: f.n,
            seed,
            tau: Some(f.tau),
            rho_hat: Some(f.rho_hat),
            spearman: Some(f.spearman),
            mi: Some(f.mi),
            ci_low: Some(f.ci_low),
            ci_high: Some(f.ci_high),
            one_sided_low: Some(f.one_sided_low),
            excess: Some(f.excess),
            excess_ci_low: Some(f.excess_ci_low),
            excess_ci_high: Some(f.excess_ci_high),
            excess_lower_bound: Some(f.excess_lower_bound),
            nu_hat: Some(f.nu_hat),
            is_gaussian: Some(f.is_gaussian),
            loglik_at_fit: Some(f.loglik_at_fit),
            kl_diagnostic: Some(f.kl_diagnostic),
            skip_reason: None,
        }
    }
}

/// Fits every unordered pair of tickers on pairwise-complete returns.
///
/// Pair `(a, b)` with `a < b` runs with seed `pair_seed(cfg seed, a, b)`, so
/// `fit --seed <row seed>` on the same observations reproduces the row.
pub fn scan(panel: &PricePanel, mode: ReturnMode, cfg: &FitConfig) -> Result<Vec<ScanRow>> {
    let mut series = ingest_returns(panel, mode);
    if series.len() < 2 {
        return Err(CliError::Data(format!(
            "a scan needs at least 2 tickers, found {}",
            series.len()
        )));
    }
    series.sort_by(|a, b| a.ticker.cmp(&b.ticker));
    let jobs: Vec<(usize, usize)> = (0..series.len())
        .flat_map(|i| (i + 1..series.len()).map(move |j| (i, j)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = (&series[i], &series[j]);
            let seed = pair_seed(cfg.bootstrap.seed, &a.ticker, &b.ticker);
            let (x, y) = pairwise_complete(a, b);
            let n = x.len();
            if n < MIN_OBSERVATIONS {
                return ScanRow::skipped(
                    &a.ticker,
                    &b.ticker,
                    n,
                    seed,
                    format!("{n} common observations, need {MIN_OBSERVATIONS}"),
                );
            }
            let mut pair_cfg = *cfg;
            pair_cfg.bootstrap.seed = seed;
            match fit(x, y, &pair_cfg) {
                Ok(f) => ScanRow::fitted(&a.ticker, &b.ticker, seed, f),
                Err(e) => ScanRow::skipped(&a.ticker, &b.ticker, n, seed, e.to_string()),
            }
        })
        .collect();
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateSpec {
    pub model: CopulaModel,
    pub marginal_x: MarginalSpec,
    pub marginal_y: MarginalSpec,
    pub n: usize,
    pub runs: usize,
    pub ksg: KsgConfig,
    pub seed: u64,
}

/// One simulated sample. `excess` subtracts the Gaussian information of the
/// true correlation, so its mean tracks `excess_analytic`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulateRow {
    pub run: usize,
    pub seed: u64,
    pub n: usize,
    pub tau: f64,
    pub rho_hat: f64,
    pub mi: f64,
    pub mi_analytic: f64,
    pub excess: f64,
    pub excess_analytic: f64,
}

/// Runs the study; returns the rows and, per run, the sample that produced it.
pub fn simulate(spec: &SimulateSpec) -> Result<Vec<(SimulateRow, SamplePairs)>> {
    let rho = spec.model.rho();
    let mi_analytic = spec.model.mutual_information()?;
    let excess_analytic = match spec.model.nu() {
        Some(nu) => excess_information(nu)?,
        None => 0.0,
    };
    let gauss = mi_gaussian(rho)?;
    (0..spec.runs)
        .into_par_iter()
        .map(|run| {
            let seed = derive_seed(spec.seed, run as u64);
            let p = sample_copula(&spec.model, spec.n, seed)?;
            let s = apply_marginals(&p, &spec.marginal_x, &spec.marginal_y)?;
            let tau = kendall_tau(&s)?;
            let mi = ksg_mi(&s, &spec.ksg)?;
            let row = SimulateRow {
                run,
                seed,
                n: spec.n,
                tau,
                rho_hat: tau_to_rho(tau)?,
                mi,
                mi_analytic,
                excess: mi - gauss,
                excess_analytic,
            };
            Ok((row, s))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveRow {
    pub nu: f64,
    pub excess: f64,
}

/// Excess information on `steps` log-spaced points from `nu_min` to `nu_max`.
pub fn excess_curve(nu_min: f64, nu_max: f64, steps: usize) -> Result<Vec<CurveRow>> {
    if !(nu_min > 0.0 && nu_min < nu_max && nu_max.is_finite()) || steps < 2 {
        return Err(CliError::Usage(format!(
            "need 0 < nu-min < nu-max and steps >= 2, got {nu_min}, {nu_max}, {steps}"
        )));
    }
    let (lo, hi) = (nu_min.ln(), nu_max.ln());
    let grid = (0..steps).map(|i| {
        if i + 1 == steps {
            nu_max
        } else {
            (lo + (hi - lo) * i as f64 / (steps - 1) as f64).exp()
        }
    });
    excess_at(grid)
}

pub fn excess_at(nus: impl IntoIterator<Item = f64>) -> Result<Vec<CurveRow>> {
    nus.into_iter()
        .map(|nu| {
            Ok(CurveRow {
                nu,
                excess: excess_information(nu)?,
            })
        })
        .collect()
}

/// Writes a sample as a two-column pair file.
pub fn write_pair_file(path: &Path, s: &SamplePairs) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Output(e.to_string()))?;
    w.write_record(["x", "y"])?;
    for (x, y) in s.pairs() {
        w.write_record([x.to_string(), y.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
