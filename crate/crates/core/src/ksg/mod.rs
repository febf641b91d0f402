//! Kraskov–Stögbauer–Grassberger mutual information estimation.
//!
//! Algorithm 1 of the KSG family: for every point, `ε_i` is the max-norm
//! distance to its k-th nearest neighbour in the joint space, `n_x(i)` and
//! `n_y(i)` count the other points strictly closer than `ε_i` along each axis,
//! and
//!
//! ```text
//! Î = ψ(k) + ψ(n) − ⟨ψ(n_x + 1) + ψ(n_y + 1)⟩
//! ```
//!
//! The per-point digamma terms are accumulated through an integer histogram
//! of the counts, so the estimate does not depend on the order of the pairs
//! or on which coordinate is called `x`.

mod bootstrap;
mod tree;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rank::{rank_pairs, SamplePairs, TiePolicy};
use crate::special::psi;
use crate::{Error, Result};

pub use bootstrap::{bootstrap_mi, percentile, BootstrapConfig, MiEstimate};

use tree::KdTree;

/// Default neighbour order.
pub const DEFAULT_K: usize = 3;

/// Coordinates handed to the neighbour search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputTransform {
    /// Use the observations as given.
    Raw,
    /// Replace each coordinate by its ranks (pseudo-observations up to scale).
    /// Ties are broken by a seeded jitter so no duplicate points arise from
    /// ties in a single coordinate.
    Ranks,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KsgConfig {
    pub k: usize,
    pub transform: InputTransform,
    /// Seed of the jitter tie-breaking used by [`InputTransform::Ranks`].
    pub tie_seed: u64,
}

impl Default for KsgConfig {
    fn default() -> Self {
        KsgConfig {
            k: DEFAULT_K,
            transform: InputTransform::Ranks,
            tie_seed: 0,
        }
    }
}

impl KsgConfig {
    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_transform(mut self, transform: InputTransform) -> Self {
        self.transform = transform;
        self
    }
}

/// Neighbour statistics of one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborCounts {
    /// Max-norm distance to the k-th nearest neighbour.
    pub eps: f64,
    /// Other points with `|x_j − x_i| < eps`.
    pub nx: usize,
    /// Other points with `|y_j − y_i| < eps`.
    pub ny: usize,
}

fn count_duplicates(xs: &[f64], ys: &[f64]) -> usize {
    let mut pts: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.windows(2).filter(|w| w[0] == w[1]).count()
}

/// Points strictly within `eps` of `sorted[at]`'s value, excluding itself.
///
/// `fl(a − b)` is monotone in `b`, so both predicates partition the sorted
/// axis and the count agrees exactly with a direct `|v − c| < eps` scan.
fn count_within(sorted: &[f64], center: f64, eps: f64) -> usize {
    let start = sorted.partition_point(|&v| center - v >= eps);
    let end = sorted.partition_point(|&v| v - center < eps);
    end - start - 1
}

fn validate_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k >= n {
        return Err(Error::InvalidArgument(format!(
            "neighbour order k must satisfy 1 <= k <= n - 1 (n = {n}, k = {k})"
        )));
    }
    Ok(())
}

/// KSG neighbour statistics for every point of `(xs, ys)`.
///
/// Fails if `k` is out of range or the input contains identical points.
pub fn neighbor_counts(xs: &[f64], ys: &[f64], k: usize) -> Result<Vec<NeighborCounts>> {
    let n = xs.len();
    if ys.len() != n {
        return Err(Error::InvalidArgument("coordinate lengths differ".into()));
    }
    validate_k(n, k)?;
    let duplicates = count_duplicates(xs, ys);
    if duplicates > 0 {
        return Err(Error::DuplicatePoints { count: duplicates });
    }
    let tree = KdTree::build(xs, ys);
    let mut sx = xs.to_vec();
    let mut sy = ys.to_vec();
    sx.sort_by(f64::total_cmp);
    sy.sort_by(f64::total_cmp);
    Ok((0..n)
        .into_par_iter()
        .with_min_len(256)
        .map(|i| {
            let eps = tree.kth_distance([xs[i], ys[i]], i, k);
            NeighborCounts {
                eps,
                nx: count_within(&sx, xs[i], eps),
                ny: count_within(&sy, ys[i], eps),
            }
        })
        .collect())
}

/// KSG estimate from precomputed neighbour counts.
pub fn estimate_from_counts(counts: &[NeighborCounts], k: usize) -> f64 {
    let n = counts.len();
    // histogram[m] = number of marginal counts equal to m, over both axes.
    let mut histogram = vec![0u64; n];
    for c in counts {
        histogram[c.nx] += 1;
        histogram[c.ny] += 1;
    }
    let marginal: f64 = histogram
        .iter()
        .enumerate()
        .filter(|(_, &h)| h > 0)
        .map(|(m, &h)| h as f64 * psi(m as f64 + 1.0))
        .sum();
    psi(k as f64) + psi(n as f64) - marginal / n as f64
}

/// Coordinates seen by the neighbour search under `cfg`.
pub(crate) fn transformed(s: &SamplePairs, cfg: &KsgConfig) -> (Vec<f64>, Vec<f64>) {
    match cfg.transform {
        InputTransform::Raw => (s.x().to_vec(), s.y().to_vec()),
        InputTransform::Ranks => {
            let (mut xs, mut ys) = rank_pairs(s, TiePolicy::Jitter { seed: cfg.tie_seed });
            // Integer ranks put every marginal distance on a lattice, so the
            // strict counts lose the points sitting exactly at eps. Rank r is
            // moved to r - u_r with one offset table for both axes, which is a
            // fixed increasing map and keeps the symmetries exact.
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.tie_seed);
            let offsets: Vec<f64> = (0..s.len()).map(|_| rng.random::<f64>()).collect();
            for r in xs.iter_mut().chain(ys.iter_mut()) {
                *r -= offsets[*r as usize - 1];
            }
            (xs, ys)
        }
    }
}

/// KSG (algorithm 1) mutual information in nats.
///
/// The value is not clipped at zero; small negative values are normal for
/// independent data.
pub fn ksg_mi(s: &SamplePairs, cfg: &KsgConfig) -> Result<f64> {
    validate_k(s.len(), cfg.k)?;
    let (xs, ys) = transformed(s, cfg);
    let counts = neighbor_counts(&xs, &ys, cfg.k)?;
    Ok(estimate_from_counts(&counts, cfg.k))
}
