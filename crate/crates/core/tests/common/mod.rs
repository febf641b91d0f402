//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use copinfo::rank::ConcordanceCounts;

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1], non-negative half.
const XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the Kronrod points with odd index.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 15 nodes on [-1, 1] with Kronrod and embedded Gauss weights.
fn rule() -> [(f64, f64, f64); 15] {
    let mut out = [(0.0, 0.0, 0.0); 15];
    for i in 0..8 {
        let g = if i % 2 == 1 { WG[i / 2] } else { 0.0 };
        out[i] = (-XK[i], WK[i], g);
        out[14 - i] = (XK[i], WK[i], g);
    }
    out
}

/// Globally adaptive Gauss-Kronrod on `[a, b]`.
pub fn integrate_1d(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let r = rule();
    let piece = |a: f64, b: f64| {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        let (mut k, mut g) = (0.0, 0.0);
        for &(x, wk, wg) in &r {
            let fx = f(c + h * x);
            k += wk * fx;
            g += wg * fx;
        }
        Cell {
            x0: a,
            x1: b,
            y0: 0.0,
            y1: 0.0,
            value: k * h,
            error: ((k - g) * h).abs(),
        }
    };
    let mut heap = BinaryHeap::new();
    heap.push(piece(a, b));
    loop {
        let err: f64 = heap.iter().map(|c| c.error).sum();
        if err <= tol || heap.len() >= 4000 {
            break;
        }
        let c = heap.pop().unwrap();
        let m = 0.5 * (c.x0 + c.x1);
        heap.push(piece(c.x0, m));
        heap.push(piece(m, c.x1));
    }
    heap.iter().map(|c| c.value).sum()
}

struct Cell {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive tensor-product Gauss-Kronrod cubature on a rectangle.
///
/// The cell with the largest error estimate is split in four until the total
/// estimate drops below `tol` or `max_cells` is reached. Returns the value and
/// the final error estimate.
pub fn integrate_2d(
    f: &dyn Fn(f64, f64) -> f64,
    (x0, x1): (f64, f64),
    (y0, y1): (f64, f64),
    tol: f64,
    max_cells: usize,
) -> (f64, f64) {
    let r = rule();
    let cell = |x0: f64, x1: f64, y0: f64, y1: f64| {
        let (cx, hx) = (0.5 * (x0 + x1), 0.5 * (x1 - x0));
        let (cy, hy) = (0.5 * (y0 + y1), 0.5 * (y1 - y0));
        let (mut k, mut g) = (0.0, 0.0);
        for &(a, wka, wga) in &r {
            for &(b, wkb, wgb) in &r {
                let v = f(cx + hx * a, cy + hy * b);
                k += wka * wkb * v;
                g += wga * wgb * v;
            }
        }
        let area = hx * hy;
        Cell {
            x0,
            x1,
            y0,
            y1,
            value: k * area,
            error: ((k - g) * area).abs(),
        }
    };
    let mut heap = BinaryHeap::new();
    heap.push(cell(x0, x1, y0, y1));
    let mut err = heap.peek().unwrap().error;
    while err > tol && heap.len() < max_cells {
        let c = heap.pop().unwrap();
        err -= c.error;
        let (mx, my) = (0.5 * (c.x0 + c.x1), 0.5 * (c.y0 + c.y1));
        for q in [
            cell(c.x0, mx, c.y0, my),
            cell(mx, c.x1, c.y0, my),
            cell(c.x0, mx, my, c.y1),
            cell(mx, c.x1, my, c.y1),
        ] {
            err += q.error;
            heap.push(q);
        }
    }
    // Re-sum to shed the drift of the running error total.
    let value = heap.iter().map(|c| c.value).sum();
    let error = heap.iter().map(|c| c.error).sum();
    (value, error)
}

/// Integral of `g(x, y)` over the plane through `x = tan(πs/2)`, `y = tan(πt/2)`.
pub fn integrate_plane(g: &dyn Fn(f64, f64) -> f64, tol: f64, max_cells: usize) -> (f64, f64) {
    let h = std::f64::consts::FRAC_PI_2;
    let mapped = |s: f64, t: f64| {
        let (x, y) = ((h * s).tan(), (h * t).tan());
        let jac = h * (1.0 + x * x) * h * (1.0 + y * y);
        let v = g(x, y) * jac;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate_2d(&mapped, (-1.0, 1.0), (-1.0, 1.0), tol, max_cells)
}

/// Integral of `g(x)` over the line through `x = tan(πs/2)`.
pub fn integrate_line(g: &dyn Fn(f64) -> f64, tol: f64) -> f64 {
    let h = std::f64::consts::FRAC_PI_2;
    let mapped = |s: f64| {
        let x = (h * s).tan();
        let v = g(x) * h * (1.0 + x * x);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate_1d(&mapped, -1.0, 1.0, tol)
}

/// Integral of `g` over `[0, ∞)`; the tail goes through `x = 1 / r²`, which
/// keeps power-law tails down to `|x|^-1.5` free of endpoint singularities.
pub fn integrate_half_line(g: &dyn Fn(f64) -> f64, tol: f64) -> f64 {
    let tail = |r: f64| {
        let v = g(1.0 / (r * r)) * 2.0 / (r * r * r);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate_1d(g, 0.0, 1.0, 0.5 * tol) + integrate_1d(&tail, 0.0, 1.0, 0.5 * tol)
}

/// Kendall pair counts by direct enumeration of all pairs.
pub fn brute_concordance(x: &[f64], y: &[f64]) -> ConcordanceCounts {
    let n = x.len();
    let (mut s, mut tx, mut ty, mut pairs) = (0i64, 0u64, 0u64, 0u64);
    for i in 0..n {
        for j in i + 1..n {
            pairs += 1;
            let dx = (x[i] - x[j]).partial_cmp(&0.0).unwrap() as i64;
            let dy = (y[i] - y[j]).partial_cmp(&0.0).unwrap() as i64;
            s += dx * dy;
            tx += u64::from(dx == 0);
            ty += u64::from(dy == 0);
        }
    }
    ConcordanceCounts {
        pairs,
        tied_x: tx,
        tied_y: ty,
        concordant_minus_discordant: s,
    }
}

/// `(eps, n_x, n_y)` per point by exhaustive search.
pub fn brute_neighbor_counts(xs: &[f64], ys: &[f64], k: usize) -> Vec<(f64, usize, usize)> {
    let n = xs.len();
    (0..n)
        .map(|i| {
            let mut d: Vec<f64> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (xs[i] - xs[j]).abs().max((ys[i] - ys[j]).abs()))
                .collect();
            d.sort_by(f64::total_cmp);
            let eps = d[k - 1];
            let nx = (0..n)
                .filter(|&j| j != i && (xs[i] - xs[j]).abs() < eps)
                .count();
            let ny = (0..n)
                .filter(|&j| j != i && (ys[i] - ys[j]).abs() < eps)
                .count();
            (eps, nx, ny)
        })
        .collect()
}

/// Kolmogorov-Smirnov distance between a sample and the uniform law on (0, 1).
pub fn ks_uniform(sample: &[f64]) -> f64 {
    let mut v = sample.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &u)| (u - i as f64 / n).max((i + 1) as f64 / n - u))
        .fold(0.0, f64::max)
}

/// 1% critical value of the one-sample KS statistic (asymptotic).
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn std_dev(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}
