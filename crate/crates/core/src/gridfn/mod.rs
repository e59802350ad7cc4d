//! Locally bounded functions on compact boxes, sampled on regular grids.
//!
//! A [`GridFunction`] is the computational stand-in for an element of
//! `ℓ^∞(T)` with `T` a compact box. All distances on the ambient space use
//! the max metric, so "within `r` cells" means a Chebyshev neighbourhood in
//! index space and hulls decompose exactly into one sliding min/max per axis.

mod csv;
mod lines;

pub(crate) use lines::{cumulate_axes, map_lines, sliding_max, sliding_min};

use crate::error::{invalid, Error, Result};

/// Relative tolerance, in units of grid spacing, for coordinate comparisons.
const ALIGN_TOL: f64 = 1e-9;

/// A regular rectangular grid over a compact box.
///
/// Axes are stored row-major: the last axis varies fastest. An axis may be
/// degenerate (a single point) only when its lower and upper bounds coincide.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
    shape: Vec<usize>,
    strides: Vec<usize>,
}

impl GridDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, shape: Vec<usize>) -> Result<Self> {
        let dim = lower.len();
        if dim == 0 {
            return Err(Error::InvalidDomain("dimension must be positive".into()));
        }
        if upper.len() != dim || shape.len() != dim {
            return Err(Error::InvalidDomain(format!(
                "lower/upper/shape lengths differ: {}/{}/{}",
                dim,
                upper.len(),
                shape.len()
            )));
        }
        for j in 0..dim {
            let (lo, hi, m) = (lower[j], upper[j], shape[j]);
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidDomain(format!("axis {j}: bounds must be finite")));
            }
            match m {
                0 => return Err(Error::InvalidDomain(format!("axis {j}: no grid points"))),
                1 if lo != hi => {
                    return Err(Error::InvalidDomain(format!(
                        "axis {j}: a single-point axis needs lower == upper"
                    )))
                }
                1 => {}
                _ if lo >= hi => {
                    return Err(Error::InvalidDomain(format!(
                        "axis {j}: lower {lo} must be below upper {hi}"
                    )))
                }
                _ => {
                    let h = (hi - lo) / (m - 1) as f64;
                    if !(h > 0.0 && h.is_finite()) {
                        return Err(Error::InvalidDomain(format!("axis {j}: bad spacing {h}")));
                    }
                }
            }
        }
        let mut strides = vec![1; dim];
        for j in (0..dim - 1).rev() {
            strides[j] = strides[j + 1] * shape[j + 1];
        }
        Ok(Self {
            lower,
            upper,
            shape,
            strides,
        })
    }

    /// `[0, 1]^dim` with `points` grid points per axis.
    pub fn unit_cube(dim: usize, points: usize) -> Result<Self> {
        Self::new(vec![0.0; dim], vec![1.0; dim], vec![points; dim])
    }

    /// One-dimensional grid on `[lower, upper]`.
    pub fn interval(lower: f64, upper: f64, points: usize) -> Result<Self> {
        Self::new(vec![lower], vec![upper], vec![points])
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid spacing along `axis`; zero on a degenerate axis.
    pub fn spacing(&self, axis: usize) -> f64 {
        let m = self.shape[axis];
        if m < 2 {
            0.0
        } else {
            (self.upper[axis] - self.lower[axis]) / (m - 1) as f64
        }
    }

    /// Side of one grid cell in the max metric: the largest spacing.
    pub fn cell_size(&self) -> f64 {
        (0..self.dim()).map(|j| self.spacing(j)).fold(0.0, f64::max)
    }

    /// Coordinate of index `i` along `axis`. Endpoints are reproduced exactly.
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        let m = self.shape[axis];
        if m < 2 {
            return self.lower[axis];
        }
        if i == m - 1 {
            return self.upper[axis];
        }
        let t = i as f64 / (m - 1) as f64;
        self.lower[axis] + (self.upper[axis] - self.lower[axis]) * t
    }

    /// All coordinates along `axis`.
    pub fn axis_coords(&self, axis: usize) -> Vec<f64> {
        (0..self.shape[axis]).map(|i| self.coord(axis, i)).collect()
    }

    /// Lebesgue volume of the box, taken over non-degenerate axes only.
    pub fn volume(&self) -> f64 {
        (0..self.dim())
            .filter(|&j| self.shape[j] > 1)
            .map(|j| self.upper[j] - self.lower[j])
            .product()
    }

    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for j in 0..self.dim() {
            idx[j] = flat / self.strides[j];
            flat %= self.strides[j];
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    /// Physical coordinates of the grid point with flat index `flat`.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.point_into(flat, &mut out);
        out
    }

    pub fn point_into(&self, mut flat: usize, out: &mut [f64]) {
        for j in 0..self.dim() {
            let i = flat / self.strides[j];
            flat %= self.strides[j];
            out[j] = self.coord(j, i);
        }
    }

    /// Index of the grid coordinate equal to `x` along `axis`, if any.
    pub fn index_of(&self, axis: usize, x: f64) -> Option<usize> {
        let m = self.shape[axis];
        if m < 2 {
            return ((x - self.lower[axis]).abs() <= ALIGN_TOL).then_some(0);
        }
        let h = self.spacing(axis);
        let t = (x - self.lower[axis]) / h;
        let i = t.round();
        if (t - i).abs() > ALIGN_TOL || i < 0.0 || i > (m - 1) as f64 {
            None
        } else {
            Some(i as usize)
        }
    }

    /// Returns the one-dimensional domain of a single axis.
    pub fn axis_domain(&self, axis: usize) -> GridDomain {
        GridDomain::new(
            vec![self.lower[axis]],
            vec![self.upper[axis]],
            vec![self.shape[axis]],
        )
        .expect("axis of a valid domain is valid")
    }

    /// This domain with one more axis appended (used for `T × [y_low, y_high]`).
    pub fn with_axis(&self, lower: f64, upper: f64, points: usize) -> Result<GridDomain> {
        let mut lo = self.lower.clone();
        let mut hi = self.upper.clone();
        let mut sh = self.shape.clone();
        lo.push(lower);
        hi.push(upper);
        sh.push(points);
        GridDomain::new(lo, hi, sh)
    }

    /// Whether the two domains describe the same grid up to coordinate rounding.
    pub fn same_grid(&self, other: &GridDomain) -> bool {
        if self.shape != other.shape {
            return false;
        }
        (0..self.dim()).all(|j| {
            let tol = ALIGN_TOL * self.spacing(j).max(f64::MIN_POSITIVE);
            (self.lower[j] - other.lower[j]).abs() <= tol
                && (self.upper[j] - other.upper[j]).abs() <= tol
        })
    }

    fn check_same(&self, other: &GridDomain) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::DomainMismatch)
        }
    }
}

/// Closed axis-aligned box used to select grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Region {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        Self { lower, upper }
    }

    /// The whole box of `domain`.
    pub fn of(domain: &GridDomain) -> Self {
        Self::new(domain.lower().to_vec(), domain.upper().to_vec())
    }
}

/// Real values on every point of a [`GridDomain`], all finite.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    domain: GridDomain,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(domain: GridDomain, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::LengthMismatch {
                expected: domain.len(),
                got: values.len(),
            });
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self { domain, values })
    }

    pub fn from_fn(domain: GridDomain, mut f: impl FnMut(&[f64]) -> f64) -> Result<Self> {
        let mut x = vec![0.0; domain.dim()];
        let values = (0..domain.len())
            .map(|k| {
                domain.point_into(k, &mut x);
                f(&x)
            })
            .collect();
        Self::new(domain, values)
    }

    pub fn constant(domain: GridDomain, c: f64) -> Result<Self> {
        let n = domain.len();
        Self::new(domain, vec![c; n])
    }

    pub fn zeros(domain: GridDomain) -> Self {
        let n = domain.len();
        Self {
            domain,
            values: vec![0.0; n],
        }
    }

    /// Builds without the finiteness scan; callers guarantee finite values.
    pub(crate) fn from_parts(domain: GridDomain, values: Vec<f64>) -> Self {
        debug_assert_eq!(domain.len(), values.len());
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self { domain, values }
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, flat: usize) -> f64 {
        self.values[flat]
    }

    pub fn at(&self, idx: &[usize]) -> f64 {
        self.values[self.domain.ravel(idx)]
    }

    /// Value at the grid point with the given physical coordinates.
    pub fn value_at_point(&self, x: &[f64]) -> Option<f64> {
        let mut idx = Vec::with_capacity(x.len());
        for (j, &xj) in x.iter().enumerate() {
            idx.push(self.domain.index_of(j, xj)?);
        }
        Some(self.at(&idx))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.domain.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn neg(&self) -> Self {
        Self::from_parts(self.domain.clone(), self.values.iter().map(|v| -v).collect())
    }

    pub fn abs(&self) -> Self {
        Self::from_parts(self.domain.clone(), self.values.iter().map(|v| v.abs()).collect())
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        self.map(|v| c * v)
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.domain.check_same(&other.domain)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::new(self.domain.clone(), values)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Lower semicontinuous hull on the grid: the minimum over the Chebyshev
    /// neighbourhood of `radius_cells` cells. Radius 0 is the identity.
    pub fn lsc_hull(&self, radius_cells: usize) -> Self {
        let mut values = self.values.clone();
        if radius_cells > 0 {
            for axis in 0..self.domain.dim() {
                map_lines(self.domain.shape(), &mut values, axis, |line| {
                    sliding_min(line, radius_cells)
                });
            }
        }
        Self::from_parts(self.domain.clone(), values)
    }

    /// Upper semicontinuous hull; the mirror of [`lsc_hull`](Self::lsc_hull).
    pub fn usc_hull(&self, radius_cells: usize) -> Self {
        let mut values = self.values.clone();
        if radius_cells > 0 {
            for axis in 0..self.domain.dim() {
                map_lines(self.domain.shape(), &mut values, axis, |line| {
                    sliding_max(line, radius_cells)
                });
            }
        }
        Self::from_parts(self.domain.clone(), values)
    }

    /// `max(usc_hull - lsc_hull)` over the grid.
    pub fn hull_gap(&self, radius_cells: usize) -> f64 {
        let lo = self.lsc_hull(radius_cells);
        let hi = self.usc_hull(radius_cells);
        hi.values
            .iter()
            .zip(&lo.values)
            .map(|(a, b)| a - b)
            .fold(0.0, f64::max)
    }

    /// Restriction to a sub-grid whose points are a subset of this grid.
    ///
    /// Every axis of `sub` must start on a grid coordinate of `self` and step
    /// by an integer multiple of the parent spacing.
    pub fn restrict(&self, sub: &GridDomain) -> Result<Self> {
        let dim = self.domain.dim();
        if sub.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: sub.dim(),
            });
        }
        let mut start = vec![0; dim];
        let mut step = vec![1; dim];
        for j in 0..dim {
            let i0 = self
                .domain
                .index_of(j, sub.lower()[j])
                .ok_or(Error::Misaligned { axis: j })?;
            start[j] = i0;
            let m = sub.shape()[j];
            if m > 1 {
                let h = self.domain.spacing(j);
                if h == 0.0 {
                    return Err(Error::Misaligned { axis: j });
                }
                let ratio = sub.spacing(j) / h;
                let s = ratio.round();
                if s < 1.0 || (ratio - s).abs() > ALIGN_TOL * ratio.max(1.0) {
                    return Err(Error::Misaligned { axis: j });
                }
                let s = s as usize;
                if i0 + (m - 1) * s >= self.domain.shape()[j] {
                    return Err(Error::Misaligned { axis: j });
                }
                step[j] = s;
            }
        }
        let mut idx = vec![0; dim];
        let values = (0..sub.len())
            .map(|k| {
                let sub_idx = sub.unravel(k);
                for j in 0..dim {
                    idx[j] = start[j] + sub_idx[j] * step[j];
                }
                self.at(&idx)
            })
            .collect();
        Ok(Self::from_parts(sub.clone(), values))
    }

    /// Uniform distance `max |f - g|` over the grid.
    pub fn sup_distance(&self, other: &Self) -> Result<f64> {
        self.domain.check_same(&other.domain)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// `L^p` distance with respect to Lebesgue measure on the box, using
    /// uniform grid weights: `(mean |f-g|^p * volume)^(1/p)`.
    pub fn lp_distance(&self, other: &Self, p: f64) -> Result<f64> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(invalid("p", format!("must be a finite real >= 1, got {p}")));
        }
        self.domain.check_same(&other.domain)?;
        let n = self.values.len() as f64;
        let mean = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs().powf(p))
            .sum::<f64>()
            / n;
        Ok((mean * self.domain.volume()).powf(1.0 / p))
    }

    /// `(min, max)` of the function over grid points inside the closed box.
    pub fn extremum_over_region(&self, region: &Region) -> Result<(f64, f64)> {
        let dim = self.domain.dim();
        if region.lower.len() != dim || region.upper.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: region.lower.len(),
            });
        }
        // Per-axis index ranges of points inside the box.
        let mut ranges = Vec::with_capacity(dim);
        for j in 0..dim {
            let tol = ALIGN_TOL * self.domain.spacing(j).max(f64::MIN_POSITIVE);
            let inside: Vec<usize> = (0..self.domain.shape()[j])
                .filter(|&i| {
                    let x = self.domain.coord(j, i);
                    x >= region.lower[j] - tol && x <= region.upper[j] + tol
                })
                .collect();
            match (inside.first(), inside.last()) {
                (Some(&a), Some(&b)) => ranges.push((a, b)),
                _ => return Err(Error::EmptyRegion),
            }
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (k, &v) in self.values.iter().enumerate() {
            let idx = self.domain.unravel(k);
            if idx
                .iter()
                .zip(&ranges)
                .all(|(&i, &(a, b))| i >= a && i <= b)
            {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        Ok((lo, hi))
    }
}

/// A grid function defined only on a subset of the grid points.
///
/// The defined points play the role of a dense subset `A` of the domain; as
/// the grid is refined the caller is responsible for keeping them dense.
/// Values at undefined points are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedGridFunction {
    base: GridFunction,
    defined: Vec<bool>,
}

impl MaskedGridFunction {
    pub fn new(base: GridFunction, defined: Vec<bool>) -> Result<Self> {
        if defined.len() != base.domain.len() {
            return Err(Error::LengthMismatch {
                expected: base.domain.len(),
                got: defined.len(),
            });
        }
        Ok(Self { base, defined })
    }

    /// Evaluates `f` where it returns `Some`, leaving the rest undefined.
    pub fn from_partial_fn(
        domain: GridDomain,
        mut f: impl FnMut(&[f64]) -> Option<f64>,
    ) -> Result<Self> {
        let mut x = vec![0.0; domain.dim()];
        let mut values = Vec::with_capacity(domain.len());
        let mut defined = Vec::with_capacity(domain.len());
        for k in 0..domain.len() {
            domain.point_into(k, &mut x);
            match f(&x) {
                Some(v) => {
                    values.push(v);
                    defined.push(true);
                }
                None => {
                    values.push(0.0);
                    defined.push(false);
                }
            }
        }
        Self::new(GridFunction::new(domain, values)?, defined)
    }

    pub fn base(&self) -> &GridFunction {
        &self.base
    }

    pub fn defined(&self) -> &[bool] {
        &self.defined
    }

    pub fn domain(&self) -> &GridDomain {
        &self.base.domain
    }

    pub fn defined_count(&self) -> usize {
        self.defined.iter().filter(|&&d| d).count()
    }
}
