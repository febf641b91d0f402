//! Library side of the `copinfo` command-line tool.
//!
//! | Subcommand | Input | Output |
//! |------------|-------|--------|
//! | `mi` | pair file | KSG mutual information with a bootstrap interval |
//! | `fit` | pair file | T-copula fit report |
//! | `scan` | price panel | one fit row per unordered ticker pair |
//! | `simulate` | model flags | per-run estimates against the analytic values |
//! | `excess-curve` | grid flags | `(nu, excess)` table |
//!
//! All information quantities are in nats.

pub mod commands;
pub mod error;
pub mod input;
pub mod output;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use copinfo::copula::{CopulaModel, MarginalSpec};
use copinfo::identify::{FitConfig, NuHat};
use copinfo::ksg::{BootstrapConfig, InputTransform, KsgConfig};
use serde::Serialize;

use crate::commands::UNITS;
pub use crate::error::{CliError, Result};
use crate::input::ReturnMode;
use crate::output::{write_report, write_table, Format};

#[derive(Debug, Parser)]
#[command(
    name = "copinfo",
    version,
    about = "Marginal-invariant dependence measurement"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Transform {
    /// Pseudo-observations; exactly invariant under monotone marginal maps.
    Ranks,
    Raw,
}

impl From<Transform> for InputTransform {
    fn from(t: Transform) -> Self {
        match t {
            Transform::Ranks => InputTransform::Ranks,
            Transform::Raw => InputTransform::Raw,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct KsgArgs {
    /// Neighbour order of the KSG estimator.
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = Transform::Ranks)]
    pub transform: Transform,
    /// Seed of the rank tie-breaking.
    #[arg(long, default_value_t = 0)]
    pub tie_seed: u64,
}

impl KsgArgs {
    fn config(&self) -> KsgConfig {
        KsgConfig {
            k: self.k,
            transform: self.transform.into(),
            tie_seed: self.tie_seed,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct EstimatorArgs {
    #[command(flatten)]
    pub ksg: KsgArgs,
    /// Bootstrap replicates.
    #[arg(long, default_value_t = 200)]
    pub replicates: usize,
    /// Confidence level of the bootstrap interval.
    #[arg(long, default_value_t = 0.90)]
    pub level: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

impl EstimatorArgs {
    fn bootstrap(&self) -> BootstrapConfig {
        BootstrapConfig {
            replicates: self.replicates,
            level: self.level,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mutual information of a pair file.
    Mi {
        file: PathBuf,
        #[command(flatten)]
        est: EstimatorArgs,
        /// Output format [default: json]
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// T-copula identification on a pair file.
    Fit {
        file: PathBuf,
        #[command(flatten)]
        est: EstimatorArgs,
        /// Estimate nu even when the excess interval does not exclude zero.
        #[arg(long)]
        force_nu: bool,
        /// Output format [default: json]
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Fit every ticker pair of a price panel.
    Scan {
        panel: PathBuf,
        #[arg(long, value_enum, default_value_t = ReturnMode::CloseOpen)]
        mode: ReturnMode,
        #[command(flatten)]
        est: EstimatorArgs,
        #[arg(long)]
        force_nu: bool,
        /// Output format [default: csv]
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Simulation study from a known copula.
    Simulate {
        #[arg(long, allow_hyphen_values = true)]
        rho: f64,
        /// Degrees of freedom, or `gaussian`.
        #[arg(long, default_value = "gaussian", value_parser = parse_nu)]
        nu: NuHat,
        /// One marginal for both coordinates, or two: `uniform`,
        /// `gaussian[:mu,sigma]`, `student:nu`, `lognormal[:mu,sigma]`.
        #[arg(long, num_args = 1..=2, default_value = "gaussian")]
        marginals: Vec<MarginalSpec>,
        #[arg(long, default_value_t = 4700)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        runs: usize,
        #[command(flatten)]
        ksg: KsgArgs,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Directory receiving each run's sample as `run_<i>.csv`.
        #[arg(long)]
        samples: Option<PathBuf>,
        /// Output format [default: csv]
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Excess information of the T-copula over the Gaussian one.
    ExcessCurve {
        #[arg(long, default_value_t = 0.5)]
        nu_min: f64,
        #[arg(long, default_value_t = 1000.0)]
        nu_max: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// Evaluate at these points instead of the grid.
        #[arg(long, num_args = 1.., conflicts_with_all = ["nu_min", "nu_max", "steps"])]
        nu: Vec<f64>,
        /// Output format [default: csv]
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

fn parse_nu(s: &str) -> std::result::Result<NuHat, String> {
    match s.to_ascii_lowercase().as_str() {
        "gaussian" | "inf" | "infinity" => Ok(NuHat::Gaussian),
        other => other
            .parse::<f64>()
            .map(NuHat::Finite)
            .map_err(|_| format!("expected a number or `gaussian`, got {s:?}")),
    }
}

#[derive(Serialize)]
struct ScanMeta {
    command: &'static str,
    mode: ReturnMode,
    k: usize,
    transform: &'static str,
    tie_seed: u64,
    replicates: usize,
    level: f64,
    seed: u64,
    force_nu: bool,
    units: &'static str,
}

#[derive(Serialize)]
struct SimulateMeta {
    command: &'static str,
    rho: f64,
    nu: NuHat,
    marginal_x: String,
    marginal_y: String,
    n: usize,
    runs: usize,
    k: usize,
    transform: &'static str,
    tie_seed: u64,
    seed: u64,
    units: &'static str,
}

#[derive(Serialize)]
struct CurveMeta {
    command: &'static str,
    units: &'static str,
}

fn transform_name(t: Transform) -> &'static str {
    match t {
        Transform::Ranks => "ranks",
        Transform::Raw => "raw",
    }
}

/// Executes a parsed command, writing its output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Mi { file, est, format } => {
            let (x, y) = input::read_pair_file(&file)?;
            let row = commands::mi(x, y, &est.ksg.config(), &est.bootstrap())?;
            write_report(out, format.unwrap_or(Format::Json), &row)
        }
        Command::Fit {
            file,
            est,
            force_nu,
            format,
        } => {
            let (x, y) = input::read_pair_file(&file)?;
            let cfg = FitConfig {
                ksg: est.ksg.config(),
                bootstrap: est.bootstrap(),
                force_nu,
            };
            let row = commands::fit(x, y, &cfg)?;
            write_report(out, format.unwrap_or(Format::Json), &row)
        }
        Command::Scan {
            panel,
            mode,
            est,
            force_nu,
            format,
        } => {
            let cfg = FitConfig {
                ksg: est.ksg.config(),
                bootstrap: est.bootstrap(),
                force_nu,
            };
            // Reject bad settings up front instead of once per pair.
            if cfg.bootstrap.replicates == 0
                || !(cfg.bootstrap.level > 0.0 && cfg.bootstrap.level < 1.0)
                || cfg.ksg.k == 0
            {
                return Err(CliError::Usage(
                    "need --k >= 1, --replicates >= 1 and --level in (0, 1)".into(),
                ));
            }
            let rows = commands::scan(&input::read_panel(&panel)?, mode, &cfg)?;
            let meta = ScanMeta {
                command: "scan",
                mode,
                k: est.ksg.k,
                transform: transform_name(est.ksg.transform),
                tie_seed: est.ksg.tie_seed,
                replicates: est.replicates,
                level: est.level,
                seed: est.seed,
                force_nu,
                units: UNITS,
            };
            write_table(out, format.unwrap_or(Format::Csv), &meta, &rows)
        }
        Command::Simulate {
            rho,
            nu,
            marginals,
            n,
            runs,
            ksg,
            seed,
            samples,
            format,
        } => {
            let model = match nu {
                NuHat::Finite(nu) => CopulaModel::student_t(rho, nu),
                NuHat::Gaussian => CopulaModel::gaussian(rho),
            }
            .map_err(|e| CliError::Usage(e.to_string()))?;
            let (mx, my) = (marginals[0], *marginals.last().unwrap_or(&marginals[0]));
            for m in [mx, my] {
                m.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            }
            if n == 0 || runs == 0 {
                return Err(CliError::Usage("--n and --runs must be >= 1".into()));
            }
            let spec = commands::SimulateSpec {
                model,
                marginal_x: mx,
                marginal_y: my,
                n,
                runs,
                ksg: ksg.config(),
                seed,
            };
            let results = commands::simulate(&spec)?;
            if let Some(dir) = samples {
                std::fs::create_dir_all(&dir).map_err(|source| CliError::Io {
                    path: dir.clone(),
                    source,
                })?;
                for (row, s) in &results {
                    commands::write_pair_file(&dir.join(format!("run_{:03}.csv", row.run)), s)?;
                }
            }
            let rows: Vec<_> = results.into_iter().map(|(r, _)| r).collect();
            let meta = SimulateMeta {
                command: "simulate",
                rho,
                nu,
                marginal_x: mx.to_string(),
                marginal_y: my.to_string(),
                n,
                runs,
                k: ksg.k,
                transform: transform_name(ksg.transform),
                tie_seed: ksg.tie_seed,
                seed,
                units: UNITS,
            };
            write_table(out, format.unwrap_or(Format::Csv), &meta, &rows)
        }
        Command::ExcessCurve {
            nu_min,
            nu_max,
            steps,
            nu,
            format,
        } => {
            let rows = if nu.is_empty() {
                commands::excess_curve(nu_min, nu_max, steps)?
            } else {
                commands::excess_at(nu).map_err(|e| CliError::Usage(e.to_string()))?
            };
            let meta = CurveMeta {
                command: "excess-curve",
                units: UNITS,
            };
            write_table(out, format.unwrap_or(Format::Csv), &meta, &rows)
        }
    }
}
