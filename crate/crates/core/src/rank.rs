//! Rank-based, marginal-invariant statistics.
//!
//! Kendall's tau and Spearman's rho depend on the data only through ranks,
//! so they are functionals of the copula alone. Pearson correlation is
//! included for comparison: it also depends on the marginals.

use std::f64::consts::PI;

use crate::{Error, Result};

/// Raw bivariate observations `(x_t, y_t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePairs {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl SamplePairs {
    /// Validates equal lengths, `n >= 2` and finite values.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidArgument(format!(
                "coordinate lengths differ: {} vs {}",
                x.len(),
                y.len()
            )));
        }
        if x.len() < 2 {
            return Err(Error::TooFewObservations {
                required: 2,
                actual: x.len(),
            });
        }
        if let Some(t) = x
            .iter()
            .zip(&y)
            .position(|(a, b)| !a.is_finite() || !b.is_finite())
        {
            return Err(Error::InvalidArgument(format!(
                "non-finite value in pair {t}"
            )));
        }
        Ok(SamplePairs { x, y })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let (x, y) = pairs.iter().copied().unzip();
        SamplePairs::new(x, y)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn pairs(&self) -> impl ExactSizeIterator<Item = (f64, f64)> + '_ {
        self.x.iter().copied().zip(self.y.iter().copied())
    }

    /// The same sample with the coordinates exchanged.
    pub fn swapped(&self) -> SamplePairs {
        SamplePairs {
            x: self.y.clone(),
            y: self.x.clone(),
        }
    }

    /// Applies `fx` and `fy` coordinatewise. Fails if a result is not finite.
    pub fn map(&self, fx: impl Fn(f64) -> f64, fy: impl Fn(f64) -> f64) -> Result<SamplePairs> {
        SamplePairs::new(
            self.x.iter().map(|&v| fx(v)).collect(),
            self.y.iter().map(|&v| fy(v)).collect(),
        )
    }

    /// Subsample by index (indices may repeat).
    pub fn select(&self, indices: &[usize]) -> Result<SamplePairs> {
        SamplePairs::new(
            indices.iter().map(|&i| self.x[i]).collect(),
            indices.iter().map(|&i| self.y[i]).collect(),
        )
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<f64>) {
        (self.x, self.y)
    }
}

/// Rank-transformed pairs `(u_t, v_t)` in the open unit square.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoObservations {
    u: Vec<f64>,
    v: Vec<f64>,
}

impl PseudoObservations {
    /// Validates equal, non-zero lengths and coordinates strictly inside `(0, 1)`.
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::InvalidArgument(format!(
                "coordinate lengths differ: {} vs {}",
                u.len(),
                v.len()
            )));
        }
        if u.is_empty() {
            return Err(Error::TooFewObservations {
                required: 1,
                actual: 0,
            });
        }
        let inside = |w: &f64| *w > 0.0 && *w < 1.0;
        if !u.iter().all(inside) || !v.iter().all(inside) {
            return Err(Error::domain(
                "PseudoObservations::new",
                "coordinates must lie strictly inside (0, 1)",
            ));
        }
        Ok(PseudoObservations { u, v })
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn pairs(&self) -> impl ExactSizeIterator<Item = (f64, f64)> + '_ {
        self.u.iter().copied().zip(self.v.iter().copied())
    }

    /// Views the pseudo-observations as plain sample pairs.
    pub fn to_sample_pairs(&self) -> Result<SamplePairs> {
        SamplePairs::new(self.u.clone(), self.v.clone())
    }
}

/// How tied values are ranked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TiePolicy {
    /// Tied values share their mean rank.
    #[default]
    AverageRank,
    /// Ties are broken by a deterministic pseudo-random order keyed by `seed`,
    /// equivalent to adding infinitesimal noise before ranking.
    Jitter { seed: u64 },
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Ranks `1..=n` of `values` under the given tie policy (average ranks may be
/// half-integers).
pub fn ranks(values: &[f64], policy: TiePolicy) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut out = vec![0.0; n];
    match policy {
        TiePolicy::AverageRank => {
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            let mut start = 0;
            while start < n {
                let mut end = start + 1;
                while end < n && values[order[end]] == values[order[start]] {
                    end += 1;
                }
                // Positions start..end hold ranks start+1..=end.
                let mean = (start + 1 + end) as f64 / 2.0;
                for &i in &order[start..end] {
                    out[i] = mean;
                }
                start = end;
            }
        }
        TiePolicy::Jitter { seed } => {
            let stream = splitmix64(seed);
            let keys: Vec<u64> = (0..n as u64).map(|i| splitmix64(stream ^ i)).collect();
            order.sort_by(|&a, &b| {
                values[a]
                    .total_cmp(&values[b])
                    .then(keys[a].cmp(&keys[b]))
                    .then(a.cmp(&b))
            });
            for (r, &i) in order.iter().enumerate() {
                out[i] = (r + 1) as f64;
            }
        }
    }
    out
}

/// Coordinatewise ranks of a sample; the y coordinate uses its own jitter stream.
pub fn rank_pairs(s: &SamplePairs, policy: TiePolicy) -> (Vec<f64>, Vec<f64>) {
    let y_policy = match policy {
        TiePolicy::Jitter { seed } => TiePolicy::Jitter {
            seed: splitmix64(seed ^ 0x5555_5555_5555_5555),
        },
        p => p,
    };
    (ranks(s.x(), policy), ranks(s.y(), y_policy))
}

/// Empirical-CDF transform `u_t = rank(x_t) / (n + 1)`, `v_t = rank(y_t) / (n + 1)`.
pub fn pseudo_observations(s: &SamplePairs, policy: TiePolicy) -> PseudoObservations {
    let denom = s.len() as f64 + 1.0;
    let (rx, ry) = rank_pairs(s, policy);
    PseudoObservations {
        u: rx.into_iter().map(|r| r / denom).collect(),
        v: ry.into_iter().map(|r| r / denom).collect(),
    }
}

/// Number of tied pairs `Σ t (t - 1) / 2` over runs of equal adjacent items.
fn tied_pairs<T>(sorted: &[T], eq: impl Fn(&T, &T) -> bool) -> u64 {
    let mut total = 0u64;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if eq(&w[0], &w[1]) {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Merge sort that returns the number of strict inversions.
fn sort_counting_inversions(values: &mut [f64], scratch: &mut [f64]) -> u64 {
    let n = values.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = {
        let (left, right) = values.split_at_mut(mid);
        let (sl, sr) = scratch.split_at_mut(mid);
        sort_counting_inversions(left, sl) + sort_counting_inversions(right, sr)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if values[j] < values[i] {
            scratch[k] = values[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            scratch[k] = values[i];
            i += 1;
        }
        k += 1;
    }
    scratch[k..k + mid - i].copy_from_slice(&values[i..mid]);
    k += mid - i;
    scratch[k..k + n - j].copy_from_slice(&values[j..n]);
    values.copy_from_slice(&scratch[..n]);
    swaps
}

/// Pair counts behind Kendall's tau-b.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConcordanceCounts {
    /// `n (n - 1) / 2`.
    pub pairs: u64,
    /// Pairs tied in x (including joint ties).
    pub tied_x: u64,
    /// Pairs tied in y (including joint ties).
    pub tied_y: u64,
    /// Concordant minus discordant pairs.
    pub concordant_minus_discordant: i64,
}

impl ConcordanceCounts {
    /// Tie-corrected tau-b from the counts.
    pub fn tau_b(&self) -> Result<f64> {
        let dx = self.pairs - self.tied_x;
        let dy = self.pairs - self.tied_y;
        if dx == 0 || dy == 0 {
            return Err(Error::Degenerate(
                "all values tied in one coordinate; Kendall's tau is undefined".into(),
            ));
        }
        Ok(self.concordant_minus_discordant as f64 / (dx as f64 * dy as f64).sqrt())
    }
}

/// O(n log n) pair counting (Knight's merge-sort algorithm).
pub fn concordance_counts(s: &SamplePairs) -> ConcordanceCounts {
    let n = s.len();
    let (x, y) = (s.x(), s.y());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(y[a].total_cmp(&y[b])));

    let tied_x = tied_pairs(&order, |&a, &b| x[a] == x[b]);
    let tied_xy = tied_pairs(&order, |&a, &b| x[a] == x[b] && y[a] == y[b]);

    let mut ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();
    let mut scratch = vec![0.0; n];
    let discordant = sort_counting_inversions(&mut ys, &mut scratch);
    let tied_y = tied_pairs(&ys, |a, b| a == b);

    let pairs = (n as u64) * (n as u64 - 1) / 2;
    let concordant_minus_discordant =
        pairs as i64 - tied_x as i64 - tied_y as i64 + tied_xy as i64 - 2 * discordant as i64;
    ConcordanceCounts {
        pairs,
        tied_x,
        tied_y,
        concordant_minus_discordant,
    }
}

/// Kendall's tau-b.
pub fn kendall_tau(s: &SamplePairs) -> Result<f64> {
    concordance_counts(s).tau_b()
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate(
            "zero sample variance in one coordinate".into(),
        ));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's rho: Pearson correlation of average ranks, on the empirical scale.
pub fn spearman_rho(s: &SamplePairs) -> Result<f64> {
    pearson(
        &ranks(s.x(), TiePolicy::AverageRank),
        &ranks(s.y(), TiePolicy::AverageRank),
    )
}

/// Pearson product-moment correlation.
pub fn linear_correlation(s: &SamplePairs) -> Result<f64> {
    pearson(s.x(), s.y())
}

/// `ρ = sin(π τ / 2)`, the inverse of `τ = (2/π) asin ρ` for elliptical copulas.
pub fn tau_to_rho(tau: f64) -> Result<f64> {
    if !(tau.abs() < 1.0) {
        return Err(Error::domain(
            "tau_to_rho",
            format!("|tau| must be < 1, got {tau}"),
        ));
    }
    Ok((0.5 * PI * tau).sin())
}

/// `τ = (2/π) asin ρ`.
pub fn rho_to_tau(rho: f64) -> Result<f64> {
    if !(rho.abs() < 1.0) {
        return Err(Error::domain(
            "rho_to_tau",
            format!("|rho| must be < 1, got {rho}"),
        ));
    }
    Ok(2.0 / PI * rho.asin())
}

/// `ρ = 2 sin(π ρ_rank / 6)`, the Gaussian-copula inverse of `ρ_rank = (6/π) asin(ρ/2)`.
pub fn rank_to_rho_gaussian(rho_rank: f64) -> Result<f64> {
    if !(rho_rank.abs() < 1.0) {
        return Err(Error::domain(
            "rank_to_rho_gaussian",
            format!("|rho_rank| must be < 1, got {rho_rank}"),
        ));
    }
    Ok(2.0 * (PI * rho_rank / 6.0).sin())
}

/// `ρ_rank = (6/π) asin(ρ / 2)` for the Gaussian copula.
pub fn rho_to_rank_gaussian(rho: f64) -> Result<f64> {
    if !(rho.abs() < 1.0) {
        return Err(Error::domain(
            "rho_to_rank_gaussian",
            format!("|rho| must be < 1, got {rho}"),
        ));
    }
    Ok(6.0 / PI * (0.5 * rho).asin())
}
