//! Marginal-invariant dependence measurement.
//!
//! The crate is organised around the copula view of a bivariate sample:
//! dependence lives in the copula density `c[u, v]`, and the mutual
//! information of the pair is the negative entropy of that density. The
//! modules cover the pieces needed to measure and model it:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`special`] | log-gamma, digamma, beta, normal and Student-t distribution functions |
//! | [`rank`] | pseudo-observations, Kendall's tau-b, Spearman's rho, Pearson correlation |
//! | [`ksg`] | KSG (algorithm 1) mutual information with a percentile bootstrap |
//! | [`copula`] | Gaussian / Student-T copula densities, closed-form information, samplers |
//! | [`identify`] | T-copula identification from (Kendall's tau, information excess) |
//!
//! All information quantities are in nats.
//!
//! ```
//! use copinfo::copula::{excess_information, mi_gaussian, mi_t};
//!
//! let total = mi_t(0.5, 4.0).unwrap();
//! let split = mi_gaussian(0.5).unwrap() + excess_information(4.0).unwrap();
//! assert!((total - split).abs() < 1e-15);
//! ```

// Guards such as `!(x > 0.0)` are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod copula;
pub mod identify;
pub mod ksg;
pub mod rank;
pub mod special;

mod error;

pub use error::{Error, Result};
pub use rank::{PseudoObservations, SamplePairs, TiePolicy};
