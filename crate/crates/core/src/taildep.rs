//! Stable tail dependence functions, the rank-based estimator `L̂_n` and the
//! extension `dL_a`.
//!
//! The estimator counts observations with a rank above `n + 1/2 - k x_j` in
//! at least one coordinate. The same threshold is used in every coordinate.

use ndarray::Array2;
use rand::{Rng, RngCore};

use crate::copula::{pseudo_observations, PseudoSample};
use crate::error::{invalid, Error, Result};
use crate::gridfn::{cumulate_axes, GridDomain, GridFunction};
use crate::hypi::{gradient_extension, ScExtension};

/// Default truncation `T` of `[0, ∞)^d` to `[0, T]^d`.
pub const DEFAULT_TRUNCATION: f64 = 3.0;

/// `⌊n^0.4⌋`, at least 1.
pub fn default_k(n: usize) -> usize {
    ((n as f64).powf(0.4).floor() as usize).max(1)
}

/// A stable tail dependence function with a gradient oracle and a sampler
/// of data whose tail dependence it is.
pub trait TailModel: Send + Sync {
    fn dim(&self) -> usize;

    /// `L(x)` for `x` in `[0, ∞)^dim`.
    fn l(&self, x: &[f64]) -> f64;

    /// `∂L/∂x_j` at `x`, or `None` where `L` is not differentiable.
    fn grad(&self, j: usize, x: &[f64]) -> Option<f64>;

    fn in_differentiability_set(&self, x: &[f64]) -> bool;

    /// `n` raw observations, one per row.
    fn sample(&self, n: usize, rng: &mut dyn RngCore) -> Array2<f64>;
}

/// `L(x) = max_j x_j`, the tail of the comonotone copula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaxModel {
    dim: usize,
}

impl MaxModel {
    pub fn new(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { dim })
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(invalid("dim", format!("need dim >= 2, got {dim}")));
    }
    Ok(())
}

/// Index of the unique largest coordinate, if there is one.
fn unique_argmax(x: &[f64]) -> Option<usize> {
    let m = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut hits = x.iter().enumerate().filter(|&(_, &v)| v == m);
    let first = hits.next()?.0;
    hits.next().is_none().then_some(first)
}

impl TailModel for MaxModel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn l(&self, x: &[f64]) -> f64 {
        x.iter().copied().fold(0.0, f64::max)
    }

    fn grad(&self, j: usize, x: &[f64]) -> Option<f64> {
        unique_argmax(x).map(|a| if a == j { 1.0 } else { 0.0 })
    }

    fn in_differentiability_set(&self, x: &[f64]) -> bool {
        unique_argmax(x).is_some()
    }

    /// Rows `(V, …, V)` with `V` uniform.
    fn sample(&self, n: usize, rng: &mut dyn RngCore) -> Array2<f64> {
        let mut out = Array2::zeros((n, self.dim));
        for mut row in out.rows_mut() {
            row.fill(rng.random::<f64>());
        }
        out
    }
}

/// `L(x) = x_1 + … + x_d`, the tail of independent margins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndependenceModel {
    dim: usize,
}

impl IndependenceModel {
    pub fn new(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { dim })
    }
}

impl TailModel for IndependenceModel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn l(&self, x: &[f64]) -> f64 {
        x.iter().sum()
    }

    fn grad(&self, _j: usize, _x: &[f64]) -> Option<f64> {
        Some(1.0)
    }

    fn in_differentiability_set(&self, _x: &[f64]) -> bool {
        true
    }

    fn sample(&self, n: usize, rng: &mut dyn RngCore) -> Array2<f64> {
        Array2::from_shape_simple_fn((n, self.dim), || rng.random::<f64>())
    }
}

/// A ranked sample together with the tail fraction `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailSample {
    ranks: PseudoSample,
    k: usize,
}

impl TailSample {
    /// Ranks the raw data; ties, non-finite entries and `k ∉ [1, n)` are
    /// errors.
    pub fn new(x: &Array2<f64>, k: usize) -> Result<Self> {
        Self::from_ranks(pseudo_observations(x)?, k)
    }

    pub fn from_ranks(ranks: PseudoSample, k: usize) -> Result<Self> {
        let n = ranks.n();
        if k == 0 || k >= n {
            return Err(invalid("k", format!("need 1 <= k < n = {n}, got {k}")));
        }
        Ok(Self { ranks, k })
    }

    pub fn n(&self) -> usize {
        self.ranks.n()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.ranks.dim()
    }

    fn level(&self, xj: f64) -> f64 {
        self.n() as f64 + 0.5 - self.k as f64 * xj
    }

    /// `L̂_n(x)`.
    pub fn estimate(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        let levels: Vec<f64> = x.iter().map(|&v| self.level(v)).collect();
        let count = self
            .ranks
            .ranks()
            .rows()
            .into_iter()
            .filter(|row| row.iter().zip(&levels).any(|(&r, &t)| r as f64 > t))
            .count();
        Ok(count as f64 / self.k as f64)
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        if x.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(invalid("x", "coordinates must be finite and >= 0"));
        }
        Ok(())
    }

    /// `L̂_n` at every point of a grid over a box in `[0, ∞)^d`.
    ///
    /// An observation stays below all levels at grid index `i` iff
    /// `i_j <= last_j(R_ij)` for every `j`, so a histogram at `last` followed
    /// by suffix sums counts those observations everywhere at once.
    pub fn estimate_grid(&self, grid: &GridDomain) -> Result<GridFunction> {
        let d = self.dim();
        if grid.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: grid.dim(),
            });
        }
        if grid.lower().iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidDomain("tail grids must lie in [0, ∞)^d".into()));
        }
        let n = self.n();
        // floor(level) per coordinate, nonincreasing along the axis: rank r
        // stays below the level at index i iff r <= cap[i].
        let caps: Vec<Vec<f64>> = (0..d)
            .map(|j| {
                grid.axis_coords(j)
                    .iter()
                    .map(|&x| self.level(x).floor())
                    .collect()
            })
            .collect();
        let strides = grid.strides();
        let mut hist = vec![0.0; grid.len()];
        'obs: for row in self.ranks.ranks().rows() {
            let mut flat = 0;
            for j in 0..d {
                let r = row[j] as f64;
                let below = caps[j].partition_point(|&c| r <= c);
                if below == 0 {
                    continue 'obs;
                }
                flat += (below - 1) * strides[j];
            }
            hist[flat] += 1.0;
        }
        cumulate_axes(grid.shape(), &mut hist, false);
        let k = self.k as f64;
        let values = hist.iter().map(|&c| (n as f64 - c) / k).collect();
        GridFunction::new(grid.clone(), values)
    }
}

/// The estimator process `√k (L̂_n - L)` on a grid.
pub fn estimator_process(
    sample: &TailSample,
    model: &dyn TailModel,
    grid: &GridDomain,
) -> Result<GridFunction> {
    if model.dim() != sample.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: sample.dim(),
        });
    }
    let est = sample.estimate_grid(grid)?;
    let root_k = (sample.k() as f64).sqrt();
    let mut x = vec![0.0; grid.dim()];
    let values = est
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            grid.point_into(i, &mut x);
            root_k * (v - model.l(&x))
        })
        .collect();
    GridFunction::new(grid.clone(), values)
}

/// Semicontinuous extensions of `x ↦ Σ_j L̇_j(x) a_j(x_j)` from the
/// differentiability set to a grid over `[0, T]^d`; `lower` is `dL_a`.
pub fn dl_extension(
    model: &dyn TailModel,
    a: &[GridFunction],
    grid: &GridDomain,
    radius: usize,
) -> Result<ScExtension> {
    if grid.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: grid.dim(),
        });
    }
    if grid.lower().iter().any(|&v| v != 0.0) || grid.upper().iter().any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidDomain("dL grids must span [0, T]^d with T > 0".into()));
    }
    gradient_extension(grid, a, radius, |j, x| {
        if model.in_differentiability_set(x) {
            model.grad(j, x)
        } else {
            None
        }
    })
}

/// Tail grid `[0, T]^dim` with `points` per axis.
pub fn tail_grid(dim: usize, t: f64, points: usize) -> Result<GridDomain> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid("T", format!("must be finite and > 0, got {t}")));
    }
    GridDomain::new(vec![0.0; dim], vec![t; dim], vec![points; dim])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copula::hull_gap_bound;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn max2() -> MaxModel {
        MaxModel::new(2).unwrap()
    }

    fn ind2() -> IndependenceModel {
        IndependenceModel::new(2).unwrap()
    }

    #[test]
    fn model_values() {
        let m = max2();
        assert_eq!(m.l(&[1.0, 1.0]), 1.0);
        assert_eq!(m.l(&[2.0, 3.0]), 3.0);
        assert_eq!(m.l(&[1.0, 1.5]), 1.5);
        assert_eq!(m.grad(0, &[2.0, 1.0]), Some(1.0));
        assert_eq!(m.grad(1, &[2.0, 1.0]), Some(0.0));
        assert_eq!(m.grad(0, &[1.0, 1.0]), None);
        let i = ind2();
        assert_eq!(i.l(&[1.0, 1.0]), 2.0);
        assert_eq!(i.l(&[0.0, 0.7]), 0.7);
        // Bounds max <= L <= sum are attained by the two models.
        let x = [0.4, 1.3];
        assert_eq!(m.l(&x), 1.3);
        assert_eq!(i.l(&x), 0.4 + 1.3);
    }

    fn check_model_shape(m: &dyn TailModel) {
        let grid = tail_grid(2, 3.0, 13).unwrap();
        for k in 0..grid.len() {
            let x = grid.point(k);
            let l = m.l(&x);
            let mx = x[0].max(x[1]);
            assert!(mx <= l + 1e-15 && l <= x[0] + x[1] + 1e-15);
            for t in [0.0, 0.5, 2.0] {
                let tx: Vec<f64> = x.iter().map(|v| t * v).collect();
                assert!((m.l(&tx) - t * l).abs() < 1e-12);
            }
            for k2 in 0..grid.len() {
                let y = grid.point(k2);
                let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
                assert!(m.l(&mid) <= 0.5 * (l + m.l(&y)) + 1e-12);
            }
        }
    }

    #[test]
    fn models_are_stable_tail_functions() {
        check_model_shape(&max2());
        check_model_shape(&ind2());
    }

    #[test]
    fn estimator_errors_and_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = ind2().sample(50, &mut rng);
        assert!(TailSample::new(&x, 50).is_err());
        assert!(TailSample::new(&x, 0).is_err());
        let s = TailSample::new(&x, 10).unwrap();
        assert_eq!(s.estimate(&[0.0, 0.0]).unwrap(), 0.0);
        assert!(s.estimate(&[-1.0, 0.0]).is_err());
        let mut tied = x.clone();
        tied[[1, 0]] = tied[[0, 0]];
        assert!(matches!(TailSample::new(&tied, 10), Err(Error::Ties { column: 0 })));
    }

    #[test]
    fn grid_matches_pointwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for model in [&max2() as &dyn TailModel, &ind2()] {
            let x = model.sample(300, &mut rng);
            let s = TailSample::new(&x, 17).unwrap();
            let grid = tail_grid(2, 3.0, 31).unwrap();
            let g = s.estimate_grid(&grid).unwrap();
            for k in 0..grid.len() {
                assert_eq!(g.get(k), s.estimate(&grid.point(k)).unwrap());
            }
        }
    }

    #[test]
    fn comonotone_with_integer_levels_is_exact() {
        // k x is an integer at every grid point, so L̂ = max exactly.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = max2().sample(200, &mut rng);
        let s = TailSample::new(&x, 20).unwrap();
        let grid = tail_grid(2, 3.0, 61).unwrap();
        let p = estimator_process(&s, &max2(), &grid).unwrap();
        assert!(p.values().iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn comonotone_gap_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let grid = tail_grid(2, 3.0, 41).unwrap();
        for _ in 0..20 {
            let x = max2().sample(5000, &mut rng);
            let s = TailSample::new(&x, default_k(5000)).unwrap();
            let p = estimator_process(&s, &max2(), &grid).unwrap();
            let bound = hull_gap_bound(2, s.k(), grid.cell_size());
            assert!(p.hull_gap(1) <= bound + 1e-12);
        }
    }

    #[test]
    fn dl_examples() {
        let grid = tail_grid(2, 3.0, 31).unwrap();
        let axis = grid.axis_domain(0);
        let one = GridFunction::constant(axis.clone(), 1.0).unwrap();
        let ext = dl_extension(&ind2(), &[one.clone(), one.clone()], &grid, 1).unwrap();
        assert!(ext.lower.values().iter().all(|&v| v == 2.0));
        assert!(ext.upper.values().iter().all(|&v| v == 2.0));

        let minus = GridFunction::constant(axis.clone(), -1.0).unwrap();
        let ext = dl_extension(&max2(), &[one, minus], &grid, 1).unwrap();
        for i in 0..31 {
            assert_eq!(ext.lower.at(&[i, i]), -1.0);
            assert_eq!(ext.upper.at(&[i, i]), 1.0);
        }
        assert_eq!(ext.lower.at(&[10, 3]), 1.0);
        assert_eq!(ext.lower.at(&[3, 10]), -1.0);

        let zero = GridFunction::zeros(axis);
        let ext = dl_extension(&max2(), &[zero.clone(), zero], &grid, 1).unwrap();
        assert!(ext.lower.values().iter().chain(ext.upper.values()).all(|&v| v == 0.0));
    }

    #[test]
    fn default_settings() {
        assert_eq!(default_k(100_000), 100);
        assert_eq!(default_k(1), 1);
        assert!(tail_grid(2, 0.0, 5).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn estimator_range_and_monotonicity(seed in 0u64..10_000, n in 20usize..200, kf in 0.05f64..0.9) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = ind2().sample(n, &mut rng);
            let k = ((n as f64 * kf) as usize).clamp(1, n - 1);
            let s = TailSample::new(&x, k).unwrap();
            let grid = tail_grid(2, 3.0, 16).unwrap();
            let g = s.estimate_grid(&grid).unwrap();
            let (nf, kf) = (n as f64, k as f64);
            for i in 0..16 {
                for j in 0..16 {
                    let v = g.at(&[i, j]);
                    let p = grid.point(grid.ravel(&[i, j]));
                    prop_assert!(v >= 0.0);
                    prop_assert!(v <= (nf / kf).min(p[0] + p[1] + 2.0 / kf) + 1e-12);
                    if i + 1 < 16 {
                        prop_assert!(g.at(&[i + 1, j]) >= v);
                    }
                    if j + 1 < 16 {
                        prop_assert!(g.at(&[i, j + 1]) >= v);
                    }
                }
            }
        }

        #[test]
        fn monotone_transforms_do_not_matter(seed in 0u64..10_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = ind2().sample(120, &mut rng);
            let mut y = x.clone();
            y.column_mut(0).mapv_inplace(|v| (v * 7.0).exp());
            y.column_mut(1).mapv_inplace(|v| -1.0 / (v + 0.1));
            let grid = tail_grid(2, 3.0, 11).unwrap();
            let a = TailSample::new(&x, 12).unwrap().estimate_grid(&grid).unwrap();
            let b = TailSample::new(&y, 12).unwrap().estimate_grid(&grid).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
