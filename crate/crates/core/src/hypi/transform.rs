//! Exact Chebyshev distance maps on rectilinear rasters.
//!
//! For a set `B` the map `D(p) = min_{q in B} max_j |p_j - q_j|` factorises
//! over axes: starting from `0` on `B` and `+inf` elsewhere, each axis pass
//! replaces `g` by `min_i max(|p_j - i| h_j, g(.., i, ..))`. One pass on a
//! line of length `m` costs `O(m log m)` with a sparse-table range minimum
//! and a binary search over the window radius.

use crate::gridfn::{map_lines, GridDomain};

struct SparseMin {
    levels: Vec<Vec<f64>>,
}

impl SparseMin {
    fn new(x: &[f64]) -> Self {
        let mut levels = vec![x.to_vec()];
        let mut w = 1;
        while 2 * w <= x.len() {
            let prev = levels.last().expect("non-empty");
            let next = (0..=x.len() - 2 * w)
                .map(|i| prev[i].min(prev[i + w]))
                .collect();
            levels.push(next);
            w *= 2;
        }
        Self { levels }
    }

    /// Minimum over the inclusive range `[a, b]`.
    fn query(&self, a: usize, b: usize) -> f64 {
        let len = b - a + 1;
        let k = usize::BITS as usize - 1 - len.leading_zeros() as usize;
        let lv = &self.levels[k];
        lv[a].min(lv[b + 1 - (1 << k)])
    }
}

/// One axis pass: `out[i] = min_j max(|i - j| h, g[j])`.
pub(crate) fn min_plus_line(g: &mut [f64], h: f64) {
    let m = g.len();
    if m < 2 {
        return;
    }
    let table = SparseMin::new(g);
    let window = |i: usize, r: usize| table.query(i.saturating_sub(r), (i + r).min(m - 1));
    let out: Vec<f64> = (0..m)
        .map(|i| {
            let rmax = i.max(m - 1 - i);
            // Smallest radius whose window minimum is already within reach.
            let ok = |r: usize| window(i, r) <= r as f64 * h;
            if !ok(rmax) {
                return window(i, rmax);
            }
            let (mut lo, mut hi) = (0usize, rmax);
            while lo < hi {
                let mid = (lo + hi) / 2;
                if ok(mid) {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            let reach = lo as f64 * h;
            if lo == 0 {
                reach.min(window(i, 0))
            } else {
                reach.min(window(i, lo - 1))
            }
        })
        .collect();
    g.copy_from_slice(&out);
}

/// Distance from every raster point to the nearest member of `members`,
/// in the max metric on physical coordinates. `+inf` when the set is empty.
pub(crate) fn chebyshev_distance_map(domain: &GridDomain, members: &[bool]) -> Vec<f64> {
    let mut g: Vec<f64> = members
        .iter()
        .map(|&b| if b { 0.0 } else { f64::INFINITY })
        .collect();
    for axis in 0..domain.dim() {
        let h = domain.spacing(axis);
        map_lines(domain.shape(), &mut g, axis, |line| min_plus_line(line, h));
    }
    g
}
