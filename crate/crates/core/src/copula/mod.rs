//! Copula models, the empirical copula process and its non-Gaussian limit.

mod empirical;
mod limit;

pub use empirical::{
    empirical_copula, empirical_copula_grid, empirical_copula_process, hull_gap_bound,
    pseudo_observations, weighted_copula_grid, PseudoSample,
};
pub use limit::{
    dc_extension, mixture_diagonal_limit, simulate_alpha, simulate_alpha_at, simulate_limit,
    LimitDraw, MIN_N_APPROX,
};

use ndarray::Array2;
use rand::{Rng, RngCore};

use crate::error::{invalid, Error, Result};
use crate::gridfn::{GridDomain, GridFunction};

/// A copula with closed-form evaluation, sampler and derivative oracle.
pub trait Copula: Send + Sync {
    fn dim(&self) -> usize;

    /// `C(u)` for `u` in `[0, 1]^dim`.
    fn cdf(&self, u: &[f64]) -> f64;

    /// `∂C/∂u_j` at `u`, or `None` off the differentiability set.
    fn partial(&self, j: usize, u: &[f64]) -> Option<f64>;

    /// Membership in the set where all partial derivatives exist and are
    /// continuous.
    fn in_differentiability_set(&self, u: &[f64]) -> bool;

    /// `n` rows drawn from the copula.
    fn sample(&self, n: usize, rng: &mut dyn RngCore) -> Array2<f64>;
}

/// The independence copula `Π(u) = u_1 ⋯ u_d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Independence {
    dim: usize,
}

impl Independence {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(invalid("dim", format!("need dim >= 2, got {dim}")));
        }
        Ok(Self { dim })
    }
}

impl Copula for Independence {
    fn dim(&self) -> usize {
        self.dim
    }

    fn cdf(&self, u: &[f64]) -> f64 {
        u.iter().product()
    }

    fn partial(&self, j: usize, u: &[f64]) -> Option<f64> {
        Some(
            u.iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, v)| v)
                .product(),
        )
    }

    fn in_differentiability_set(&self, _u: &[f64]) -> bool {
        true
    }

    fn sample(&self, n: usize, rng: &mut dyn RngCore) -> Array2<f64> {
        Array2::from_shape_simple_fn((n, self.dim), || rng.random::<f64>())
    }
}

/// `C(u_1, u_2) = (1 - λ) u_1 u_2 + λ min(u_1, u_2)`.
///
/// Not differentiable on the diagonal, where the limit of the empirical
/// copula process is non-Gaussian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mixture {
    lambda: f64,
}

/// Points closer than this to the diagonal count as on it.
const DIAGONAL_TOL: f64 = 1e-12;

impl Mixture {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(invalid("lambda", format!("must lie in (0, 1), got {lambda}")));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

impl Copula for Mixture {
    fn dim(&self) -> usize {
        2
    }

    fn cdf(&self, u: &[f64]) -> f64 {
        // Written around the minimum so margins and C(1, 1) = 1 come out exact.
        let m = u[0].min(u[1]);
        m + (1.0 - self.lambda) * (u[0] * u[1] - m)
    }

    fn partial(&self, j: usize, u: &[f64]) -> Option<f64> {
        if !self.in_differentiability_set(u) {
            return None;
        }
        let other = u[1 - j];
        let below = if u[j] < other { 1.0 } else { 0.0 };
        Some((1.0 - self.lambda) * other + self.lambda * below)
    }

    fn in_differentiability_set(&self, u: &[f64]) -> bool {
        (u[0] - u[1]).abs() > DIAGONAL_TOL
    }

    fn sample(&self, n: usize, rng: &mut dyn RngCore) -> Array2<f64> {
        let mut out = Array2::zeros((n, 2));
        for mut row in out.rows_mut() {
            let a = rng.random::<f64>();
            let b = if rng.random_bool(self.lambda) {
                a
            } else {
                rng.random::<f64>()
            };
            row[0] = a;
            row[1] = b;
        }
        out
    }
}

/// Checks that `grid` is a regular grid on the unit cube of dimension `dim`.
pub(crate) fn check_unit_grid(grid: &GridDomain, dim: usize) -> Result<()> {
    if grid.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: grid.dim(),
        });
    }
    for j in 0..dim {
        if grid.lower()[j] != 0.0 || grid.upper()[j] != 1.0 || grid.shape()[j] < 2 {
            return Err(Error::InvalidDomain(format!(
                "axis {j}: copula grids must span [0, 1]"
            )));
        }
    }
    Ok(())
}

/// The model evaluated on every grid point.
pub fn copula_grid(c: &dyn Copula, grid: &GridDomain) -> Result<GridFunction> {
    check_unit_grid(grid, c.dim())?;
    GridFunction::from_fn(grid.clone(), |u| c.cdf(u))
}
