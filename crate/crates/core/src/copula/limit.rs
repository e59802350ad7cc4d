//! The directional-derivative extension `dC_a` and draws of the limit
//! `ℂ = α + dC_{(-α_1, …, -α_d)}`.

use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use super::{check_unit_grid, Copula};
use crate::error::{invalid, Error, Result};
use crate::gridfn::{cumulate_axes, GridDomain, GridFunction};
use crate::hypi::{gradient_extension, ScExtension};

/// Smallest multiplier sample size accepted for simulating `α`.
pub const MIN_N_APPROX: usize = 1000;

/// Semicontinuous extensions of `v ↦ Σ_j Ċ_j(v) a_j(v_j)` from the
/// differentiability set to the whole grid. `lower` is `dC_a`.
///
/// `a[j]` must live on the grid of axis `j`.
pub fn dc_extension(
    c: &dyn Copula,
    a: &[GridFunction],
    grid: &GridDomain,
    radius: usize,
) -> Result<ScExtension> {
    check_unit_grid(grid, c.dim())?;
    gradient_extension(grid, a, radius, |j, u| {
        if c.in_differentiability_set(u) {
            c.partial(j, u)
        } else {
            None
        }
    })
}

fn check_n_approx(n_approx: usize) -> Result<()> {
    if n_approx < MIN_N_APPROX {
        return Err(invalid(
            "n_approx",
            format!("need at least {MIN_N_APPROX}, got {n_approx}"),
        ));
    }
    Ok(())
}

/// One draw of `α` on a grid via the normal-multiplier construction
/// `α(u) ≈ N^{-1/2} Σ_i ξ_i (1{U_i <= u} - C(u))` with `U_i ~ C`.
pub fn simulate_alpha(
    c: &dyn Copula,
    grid: &GridDomain,
    n_approx: usize,
    rng: &mut dyn RngCore,
) -> Result<GridFunction> {
    check_unit_grid(grid, c.dim())?;
    check_n_approx(n_approx)?;
    let d = c.dim();
    let u = c.sample(n_approx, rng);
    let coords: Vec<Vec<f64>> = (0..d).map(|j| grid.axis_coords(j)).collect();
    let strides = grid.strides();
    let mut hist = vec![0.0; grid.len()];
    'obs: for row in u.rows() {
        let xi: f64 = StandardNormal.sample(rng);
        let mut flat = 0;
        for j in 0..d {
            let k = coords[j].partition_point(|&x| x < row[j]);
            if k == coords[j].len() {
                continue 'obs;
            }
            flat += k * strides[j];
        }
        hist[flat] += xi;
    }
    cumulate_axes(grid.shape(), &mut hist, true);
    // Every draw lies below the top corner, so the corner holds the total and
    // α(1, …, 1) cancels exactly.
    let total = hist[grid.len() - 1];
    let scale = 1.0 / (n_approx as f64).sqrt();
    let mut p = vec![0.0; d];
    let values = hist
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            grid.point_into(k, &mut p);
            scale * (s - c.cdf(&p) * total)
        })
        .collect();
    GridFunction::new(grid.clone(), values)
}

/// Joint draw of `α` at a handful of points, same construction as
/// [`simulate_alpha`] without a grid.
pub fn simulate_alpha_at(
    c: &dyn Copula,
    points: &[Vec<f64>],
    n_approx: usize,
    rng: &mut dyn RngCore,
) -> Result<Vec<f64>> {
    check_n_approx(n_approx)?;
    for p in points {
        if p.len() != c.dim() {
            return Err(Error::DimensionMismatch {
                expected: c.dim(),
                got: p.len(),
            });
        }
    }
    let u = c.sample(n_approx, rng);
    let mut sums = vec![0.0; points.len()];
    let mut total = 0.0;
    for row in u.rows() {
        let xi: f64 = StandardNormal.sample(rng);
        total += xi;
        for (s, p) in sums.iter_mut().zip(points) {
            if row.iter().zip(p).all(|(x, q)| x <= q) {
                *s += xi;
            }
        }
    }
    let scale = 1.0 / (n_approx as f64).sqrt();
    Ok(sums
        .iter()
        .zip(points)
        .map(|(s, p)| scale * (s - c.cdf(p) * total))
        .collect())
}

/// One realization of the limit of the empirical copula process.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitDraw {
    pub alpha: GridFunction,
    /// `α_j(u_j) = α(1, …, u_j, …, 1)` on the grid of axis `j`.
    pub margins: Vec<GridFunction>,
    /// `α + dC_{-α}` with the lower extension; the canonical representative.
    pub lower: GridFunction,
    /// Same with the upper extension.
    pub upper: GridFunction,
}

/// Draws `α` on `grid` and assembles `α + dC_{(-α_1, …, -α_d)}`.
pub fn simulate_limit(
    c: &dyn Copula,
    grid: &GridDomain,
    n_approx: usize,
    rng: &mut dyn RngCore,
) -> Result<LimitDraw> {
    let alpha = simulate_alpha(c, grid, n_approx, rng)?;
    let d = c.dim();
    let mut margins = Vec::with_capacity(d);
    for j in 0..d {
        let m = grid.shape()[j];
        let mut idx: Vec<usize> = grid.shape().iter().map(|s| s - 1).collect();
        let values = (0..m)
            .map(|i| {
                idx[j] = i;
                alpha.at(&idx)
            })
            .collect();
        margins.push(GridFunction::new(grid.axis_domain(j), values)?);
    }
    let neg: Vec<GridFunction> = margins.iter().map(GridFunction::neg).collect();
    let ext = dc_extension(c, &neg, grid, 1)?;
    let lower = alpha.add(&ext.lower)?;
    let upper = alpha.add(&ext.upper)?;
    Ok(LimitDraw {
        alpha,
        margins,
        lower,
        upper,
    })
}

/// The limit at a diagonal point `(u, u)` of the mixture copula:
/// `α(u,u) - (1-λ) u (α_1(u) + α_2(u)) - λ max(α_1(u), α_2(u))`.
pub fn mixture_diagonal_limit(lambda: f64, u: f64, alpha_uu: f64, alpha_1: f64, alpha_2: f64) -> f64 {
    alpha_uu - (1.0 - lambda) * u * (alpha_1 + alpha_2) - lambda * alpha_1.max(alpha_2)
}
