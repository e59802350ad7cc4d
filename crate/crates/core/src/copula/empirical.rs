//! Rank transforms and the (weighted) empirical copula.
//!
//! Everything is done in rank space. For a column with ranks `1..=n` and
//! observation weights `w`, let `W(r)` be the total weight of ranks `<= r`.
//! The generalized inverse of the weighted marginal at `u > 0` is the order
//! statistic of rank `min{r : W(r) >= n u}` (`+inf`, i.e. rank `n`, if the
//! set is empty), and at `u = 0` it is `sup{x : F(x) = 0}`, the order
//! statistic of rank `min{r : W(r) > 0}`. Composing the joint weighted
//! distribution with these inverses only needs the rank thresholds.

use ndarray::Array2;

use super::{check_unit_grid, Copula};
use crate::error::{invalid, Error, Result};
use crate::gridfn::{cumulate_axes, GridDomain, GridFunction};

/// Relative slack when comparing cumulative weights with `n u`.
const THRESHOLD_TOL: f64 = 1e-9;

/// Column-wise ranks of a sample, `1..=n` in every column.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoSample {
    ranks: Array2<usize>,
    /// `by_rank[j][r]` is the observation holding rank `r + 1` in column `j`.
    by_rank: Vec<Vec<usize>>,
}

impl PseudoSample {
    /// Builds from a rank matrix; each column must be a permutation of `1..=n`.
    pub fn from_ranks(ranks: Array2<usize>) -> Result<Self> {
        let (n, d) = ranks.dim();
        if n == 0 || d == 0 {
            return Err(invalid("ranks", "sample must be non-empty"));
        }
        let mut by_rank = vec![vec![usize::MAX; n]; d];
        for j in 0..d {
            for i in 0..n {
                let r = ranks[[i, j]];
                if r == 0 || r > n || by_rank[j][r - 1] != usize::MAX {
                    return Err(Error::Ties { column: j });
                }
                by_rank[j][r - 1] = i;
            }
        }
        Ok(Self { ranks, by_rank })
    }

    pub fn n(&self) -> usize {
        self.ranks.nrows()
    }

    pub fn dim(&self) -> usize {
        self.ranks.ncols()
    }

    pub fn ranks(&self) -> &Array2<usize> {
        &self.ranks
    }

    /// The pseudo-observations `rank / n`.
    pub fn u(&self) -> Array2<f64> {
        let n = self.n() as f64;
        self.ranks.mapv(|r| r as f64 / n)
    }

    pub(crate) fn by_rank(&self, j: usize) -> &[usize] {
        &self.by_rank[j]
    }
}

/// Column-wise ranks divided by `n`. Ties and non-finite entries are errors.
pub fn pseudo_observations(x: &Array2<f64>) -> Result<PseudoSample> {
    let (n, d) = x.dim();
    if n == 0 || d == 0 {
        return Err(invalid("x", "sample must be non-empty"));
    }
    let mut ranks = Array2::zeros((n, d));
    let mut order: Vec<usize> = (0..n).collect();
    for j in 0..d {
        let col = x.column(j);
        if col.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteObservation { column: j });
        }
        order.sort_by(|&a, &b| col[a].total_cmp(&col[b]));
        for w in order.windows(2) {
            if col[w[0]] == col[w[1]] {
                return Err(Error::Ties { column: j });
            }
        }
        for (r, &i) in order.iter().enumerate() {
            ranks[[i, j]] = r + 1;
        }
    }
    PseudoSample::from_ranks(ranks)
}

/// `max(1, ceil(n u))`, the rank threshold of the unweighted inverse.
fn unit_threshold(n: usize, u: f64) -> usize {
    let t = n as f64 * u;
    let k = (t - THRESHOLD_TOL * t.max(1.0)).ceil();
    (k.max(1.0) as usize).min(n)
}

/// `C_n(u)` at a single point.
pub fn empirical_copula(s: &PseudoSample, u: &[f64]) -> f64 {
    let n = s.n();
    let t: Vec<usize> = u.iter().map(|&v| unit_threshold(n, v)).collect();
    let count = s
        .ranks
        .rows()
        .into_iter()
        .filter(|row| row.iter().zip(&t).all(|(r, t)| r <= t))
        .count();
    count as f64 / n as f64
}

/// Rank thresholds of the weighted inverse at every coordinate of `axis`.
fn weighted_thresholds(
    s: &PseudoSample,
    weights: Option<&[f64]>,
    grid: &GridDomain,
    axis: usize,
) -> Vec<usize> {
    let n = s.n();
    let coords = grid.axis_coords(axis);
    match weights {
        None => coords.iter().map(|&u| unit_threshold(n, u)).collect(),
        Some(w) => {
            let mut cum = Vec::with_capacity(n);
            let mut acc = 0.0;
            for &i in s.by_rank(axis) {
                acc += w[i];
                cum.push(acc);
            }
            let first_positive = cum.partition_point(|&c| c <= 0.0);
            coords
                .iter()
                .map(|&u| {
                    let target = n as f64 * u;
                    let target = target - THRESHOLD_TOL * target.max(1.0);
                    let r = cum.partition_point(|&c| c < target).max(first_positive);
                    (r + 1).min(n)
                })
                .collect()
        }
    }
}

/// `C_n` (or its weighted variant) at every point of a unit-cube grid.
///
/// With weights `w`, returns `(1/n) Σ_i w_i 1{R_i <= t(u)}` where `t(u)` are
/// the rank thresholds of the weighted marginal inverses; no renormalization
/// of the weights takes place. Cost `O(n d log m + m^d d)`.
pub fn weighted_copula_grid(
    s: &PseudoSample,
    weights: Option<&[f64]>,
    grid: &GridDomain,
) -> Result<GridFunction> {
    let (n, d) = (s.n(), s.dim());
    check_unit_grid(grid, d)?;
    if let Some(w) = weights {
        if w.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: w.len(),
            });
        }
        if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(invalid("weights", "must be finite and non-negative"));
        }
    }
    let thresholds: Vec<Vec<usize>> = (0..d)
        .map(|j| weighted_thresholds(s, weights, grid, j))
        .collect();
    let mut hist = vec![0.0; grid.len()];
    let strides = grid.strides();
    'obs: for i in 0..n {
        let mut flat = 0;
        for j in 0..d {
            let r = s.ranks[[i, j]];
            let k = thresholds[j].partition_point(|&t| t < r);
            if k == thresholds[j].len() {
                continue 'obs;
            }
            flat += k * strides[j];
        }
        hist[flat] += weights.map_or(1.0, |w| w[i]);
    }
    cumulate_axes(grid.shape(), &mut hist, true);
    let inv_n = 1.0 / n as f64;
    for v in &mut hist {
        *v *= inv_n;
    }
    GridFunction::new(grid.clone(), hist)
}

/// `C_n` at every point of a unit-cube grid.
pub fn empirical_copula_grid(s: &PseudoSample, grid: &GridDomain) -> Result<GridFunction> {
    weighted_copula_grid(s, None, grid)
}

/// The empirical copula process `√n (C_n - C)` on a unit-cube grid.
pub fn empirical_copula_process(
    s: &PseudoSample,
    c: &dyn Copula,
    grid: &GridDomain,
) -> Result<GridFunction> {
    if c.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            got: s.dim(),
        });
    }
    let cn = empirical_copula_grid(s, grid)?;
    let root_n = (s.n() as f64).sqrt();
    let mut u = vec![0.0; grid.dim()];
    let values = cn
        .values()
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            grid.point_into(k, &mut u);
            root_n * (v - c.cdf(&u))
        })
        .collect();
    GridFunction::new(grid.clone(), values)
}

/// Upper bound on the radius-1 hull gap of `√n (C_n - C)` on a grid with
/// cell size `h`: the jump bound `d/√n` plus two cells of Lipschitz slack
/// `2 d h √n` each.
///
/// Within one cell each rank threshold crosses at most `2hn + 1` ranks, so
/// `C_n` moves by at most `d (2h + 1/n)` and `C` by at most `2 d h`.
pub fn hull_gap_bound(dim: usize, n: usize, h: f64) -> f64 {
    let d = dim as f64;
    let root_n = (n as f64).sqrt();
    d / root_n + 4.0 * d * h * root_n
}
