//! Static 2-d tree for k-nearest-neighbour distances in the max norm.
//!
//! Implicit layout: the median of each range sits at its midpoint, the left
//! half holds coordinates `<=` the median along the split axis and the right
//! half `>=`. Axes alternate with depth; ranges of at most [`LEAF_SIZE`]
//! points are scanned linearly.

const LEAF_SIZE: usize = 12;

#[derive(Debug, Clone)]
pub(crate) struct KdTree {
    points: Vec<[f64; 2]>,
    ids: Vec<usize>,
}

#[inline]
pub(crate) fn chebyshev(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).abs().max((a[1] - b[1]).abs())
}

impl KdTree {
    pub(crate) fn build(xs: &[f64], ys: &[f64]) -> Self {
        let mut items: Vec<([f64; 2], usize)> = xs
            .iter()
            .zip(ys)
            .enumerate()
            .map(|(i, (&x, &y))| ([x, y], i))
            .collect();
        build_range(&mut items, 0);
        let (points, ids) = items.into_iter().unzip();
        KdTree { points, ids }
    }

    /// Distance from point `id` (located at `query`) to its `k`-th nearest
    /// other point.
    pub(crate) fn kth_distance(&self, query: [f64; 2], id: usize, k: usize) -> f64 {
        let mut best = Vec::with_capacity(k + 1);
        self.search(0, self.points.len(), 0, query, id, k, &mut best);
        best[k - 1]
    }

    #[inline]
    fn offer(&self, i: usize, query: [f64; 2], id: usize, k: usize, best: &mut Vec<f64>) {
        if self.ids[i] == id {
            return;
        }
        let d = chebyshev(query, self.points[i]);
        if best.len() == k {
            if d >= best[k - 1] {
                return;
            }
            best.pop();
        }
        let at = best.partition_point(|&b| b <= d);
        best.insert(at, d);
    }

    #[allow(clippy::too_many_arguments)]
    fn search(
        &self,
        lo: usize,
        hi: usize,
        depth: usize,
        query: [f64; 2],
        id: usize,
        k: usize,
        best: &mut Vec<f64>,
    ) {
        if hi - lo <= LEAF_SIZE {
            for i in lo..hi {
                self.offer(i, query, id, k, best);
            }
            return;
        }
        let mid = lo + (hi - lo) / 2;
        let axis = depth % 2;
        self.offer(mid, query, id, k, best);
        let diff = query[axis] - self.points[mid][axis];
        let (near, far) = if diff < 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.search(near.0, near.1, depth + 1, query, id, k, best);
        // Points across the split are at least |diff| away; only strictly
        // closer points can lower the k-th distance.
        if best.len() < k || diff.abs() < best[k - 1] {
            self.search(far.0, far.1, depth + 1, query, id, k, best);
        }
    }
}

fn build_range(items: &mut [([f64; 2], usize)], depth: usize) {
    let len = items.len();
    if len <= LEAF_SIZE {
        return;
    }
    let mid = len / 2;
    let axis = depth % 2;
    items.select_nth_unstable_by(mid, |a, b| a.0[axis].total_cmp(&b.0[axis]));
    let (left, rest) = items.split_at_mut(mid);
    build_range(left, depth + 1);
    build_range(&mut rest[1..], depth + 1);
}
