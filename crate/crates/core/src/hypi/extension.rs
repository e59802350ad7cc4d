//! Semicontinuous extensions from dense subsets and pointwise convergence
//! diagnostics.

use super::{hypi_distance, HypiConfig};
use crate::error::{Error, Result};
use crate::gridfn::{map_lines, sliding_max, sliding_min, GridDomain, GridFunction, MaskedGridFunction};

/// Lower and upper semicontinuous extensions of a partially defined function.
#[derive(Debug, Clone, PartialEq)]
pub struct ScExtension {
    /// `inf f(B(x, r) ∩ A)` at every grid point.
    pub lower: GridFunction,
    /// `sup f(B(x, r) ∩ A)` at every grid point.
    pub upper: GridFunction,
    /// Neighbourhood radius actually used at each grid point. Larger than the
    /// requested radius only where no defined point was close enough.
    pub radius_used: Vec<usize>,
}

impl ScExtension {
    pub fn max_radius_used(&self) -> usize {
        self.radius_used.iter().copied().max().unwrap_or(0)
    }
}

fn filtered(
    shape: &[usize],
    masked: &[f64],
    r: usize,
    op: fn(&mut [f64], usize),
) -> Vec<f64> {
    let mut v = masked.to_vec();
    if r > 0 {
        for axis in 0..shape.len() {
            map_lines(shape, &mut v, axis, |line| op(line, r));
        }
    }
    v
}

/// Extends `f` from its defined points to the whole grid by neighbourhood
/// infimum and supremum over defined points within `radius` cells.
///
/// Where the neighbourhood holds no defined point the radius is grown for
/// that point alone until it does; the radius used is recorded.
pub fn sc_extension(f: &MaskedGridFunction, radius: usize) -> Result<ScExtension> {
    if f.defined_count() == 0 {
        return Err(Error::EmptyMask);
    }
    let domain = f.domain();
    let shape = domain.shape();
    let vals = f.base().values();
    let def = f.defined();
    let for_min: Vec<f64> = vals
        .iter()
        .zip(def)
        .map(|(&v, &d)| if d { v } else { f64::INFINITY })
        .collect();
    let for_max: Vec<f64> = vals
        .iter()
        .zip(def)
        .map(|(&v, &d)| if d { v } else { f64::NEG_INFINITY })
        .collect();

    let mut lower = filtered(shape, &for_min, radius, sliding_min);
    let mut upper = filtered(shape, &for_max, radius, sliding_max);
    let mut radius_used = vec![radius; domain.len()];
    let mut pending: Vec<usize> = (0..lower.len()).filter(|&k| lower[k].is_infinite()).collect();
    let mut r = radius;
    while !pending.is_empty() {
        r += 1;
        let lo = filtered(shape, &for_min, r, sliding_min);
        let hi = filtered(shape, &for_max, r, sliding_max);
        pending.retain(|&k| {
            if lo[k].is_finite() {
                lower[k] = lo[k];
                upper[k] = hi[k];
                radius_used[k] = r;
                false
            } else {
                true
            }
        });
    }
    Ok(ScExtension {
        lower: GridFunction::new(domain.clone(), lower)?,
        upper: GridFunction::new(domain.clone(), upper)?,
        radius_used,
    })
}

/// Extension of `x ↦ Σ_j ∂_j(x) a_j(x_j)` from the points where `partial`
/// is defined to the whole grid. `a[j]` must live on the grid of axis `j`.
///
/// The `a_j` are continuous, so the sum is continuous on the open set where
/// the gradient exists and both extensions equal it there. Off that set the
/// extensions are the min and max of `Σ_j ∂_j(y) a_j(x_j)` over defined `y`
/// within `radius` cells (grown per point until one exists): the one-sided
/// gradients come from the neighbours while `a` stays at `x`. Taking the hull
/// of the sum itself would bias rough inputs such as Brownian paths by a
/// whole cell's oscillation.
pub(crate) fn gradient_extension(
    grid: &GridDomain,
    a: &[GridFunction],
    radius: usize,
    partial: impl Fn(usize, &[f64]) -> Option<f64>,
) -> Result<ScExtension> {
    let d = grid.dim();
    if a.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: a.len(),
        });
    }
    for (j, aj) in a.iter().enumerate() {
        if !aj.domain().same_grid(&grid.axis_domain(j)) {
            return Err(Error::DomainMismatch);
        }
    }
    let gradients: Vec<Option<Vec<f64>>> = (0..grid.len())
        .map(|k| {
            let x = grid.point(k);
            (0..d).map(|j| partial(j, &x)).collect()
        })
        .collect();
    if gradients.iter().all(Option::is_none) {
        return Err(Error::EmptyMask);
    }
    let shape = grid.shape();
    let reach = shape.iter().copied().max().unwrap_or(1);
    let mut lower = Vec::with_capacity(grid.len());
    let mut upper = Vec::with_capacity(grid.len());
    let mut radius_used = Vec::with_capacity(grid.len());
    for (k, grad) in gradients.iter().enumerate() {
        let idx = grid.unravel(k);
        let at_x = |g: &[f64]| -> f64 { g.iter().zip(a).zip(&idx).map(|((gj, aj), &i)| gj * aj.get(i)).sum() };
        if let Some(g) = grad {
            let v = at_x(g);
            lower.push(v);
            upper.push(v);
            radius_used.push(0);
            continue;
        }
        let mut r = radius.max(1);
        loop {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            let lo_idx: Vec<usize> = idx.iter().map(|&i| i.saturating_sub(r)).collect();
            let hi_idx: Vec<usize> = idx.iter().zip(shape).map(|(&i, &m)| (i + r).min(m - 1)).collect();
            let mut cur = lo_idx.clone();
            loop {
                if let Some(g) = &gradients[grid.ravel(&cur)] {
                    let v = at_x(g);
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                // Odometer step over the box lo_idx..=hi_idx.
                let mut axis = 0;
                while axis < d && cur[axis] == hi_idx[axis] {
                    cur[axis] = lo_idx[axis];
                    axis += 1;
                }
                if axis == d {
                    break;
                }
                cur[axis] += 1;
            }
            if lo.is_finite() || r >= reach {
                lower.push(lo);
                upper.push(hi);
                radius_used.push(r);
                break;
            }
            r += 1;
        }
    }
    Ok(ScExtension {
        lower: GridFunction::new(grid.clone(), lower)?,
        upper: GridFunction::new(grid.clone(), upper)?,
        radius_used,
    })
}

/// Diagnostics for a sequence `f_1, f_2, ...` against a candidate limit `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    /// `d_hypi(f_n, f)` for every element.
    pub hypi: Vec<f64>,
    /// `sup |f_n - f|` for every element.
    pub sup: Vec<f64>,
    /// Worst violation over the tail of the two epigraphical pointwise
    /// conditions, per grid point.
    pub epi_residual: GridFunction,
    /// Same for the hypographical conditions.
    pub hypo_residual: GridFunction,
    /// Index of the first sequence element counted in the tail.
    pub tail_start: usize,
    pub tolerance: f64,
    pub hypi_converged: bool,
    pub uniform_converged: bool,
    pub pointwise_converged: bool,
}

impl ConvergenceReport {
    pub fn max_epi_residual(&self) -> f64 {
        self.epi_residual.max()
    }

    pub fn max_hypo_residual(&self) -> f64 {
        self.hypo_residual.max()
    }
}

fn tail_max(a: &[f64]) -> f64 {
    a.iter().copied().fold(0.0, f64::max)
}

/// Compares a sequence with its candidate limit in the hypi, uniform and
/// pointwise epi/hypo senses. The "tail" is the last half of the sequence.
///
/// A sequence `x_n -> x` is discretised as staying within `r = hull_radius`
/// cells of `x`, and the limit's own hull gets one extra radius of slack, so
/// at every grid point the epigraphical residual is the larger of
///
/// * `lsc(f, 2r) - min_tail lsc(f_n, r)` (the liminf inequality), and
/// * `max_tail lsc(f_n, 2r) - lsc(f, r)` (existence of a recovery sequence),
///
/// clipped at zero. The hypographical residual mirrors this with upper hulls.
/// The approximation tightens as the grid is refined.
pub fn check_hypi_convergence(
    seq: &[GridFunction],
    f: &GridFunction,
    cfg: &HypiConfig,
    tolerance: f64,
) -> Result<ConvergenceReport> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    for g in seq {
        if !g.domain().same_grid(f.domain()) {
            return Err(Error::DomainMismatch);
        }
    }
    let hypi = seq
        .iter()
        .map(|g| hypi_distance(g, f, cfg))
        .collect::<Result<Vec<_>>>()?;
    let sup = seq
        .iter()
        .map(|g| g.sup_distance(f))
        .collect::<Result<Vec<_>>>()?;

    let r = cfg.hull_radius;
    let tail_start = seq.len() / 2;
    let tail = &seq[tail_start..];
    let n = f.domain().len();

    let f_lo_r = f.lsc_hull(r);
    let f_lo_2r = f.lsc_hull(2 * r);
    let f_hi_r = f.usc_hull(r);
    let f_hi_2r = f.usc_hull(2 * r);
    let mut epi = vec![0.0f64; n];
    let mut hypo = vec![0.0f64; n];
    for g in tail {
        let (g_lo_r, g_lo_2r) = (g.lsc_hull(r), g.lsc_hull(2 * r));
        let (g_hi_r, g_hi_2r) = (g.usc_hull(r), g.usc_hull(2 * r));
        for k in 0..n {
            let liminf = f_lo_2r.get(k) - g_lo_r.get(k);
            let recovery = g_lo_2r.get(k) - f_lo_r.get(k);
            epi[k] = epi[k].max(liminf).max(recovery);
            let limsup = g_hi_r.get(k) - f_hi_2r.get(k);
            let recovery = f_hi_r.get(k) - g_hi_2r.get(k);
            hypo[k] = hypo[k].max(limsup).max(recovery);
        }
    }
    let epi_residual = GridFunction::new(f.domain().clone(), epi)?;
    let hypo_residual = GridFunction::new(f.domain().clone(), hypo)?;

    let hypi_converged = tail_max(&hypi[tail_start..]) <= tolerance;
    let uniform_converged = tail_max(&sup[tail_start..]) <= tolerance;
    let pointwise_converged =
        epi_residual.max() <= tolerance && hypo_residual.max() <= tolerance;
    Ok(ConvergenceReport {
        hypi,
        sup,
        epi_residual,
        hypo_residual,
        tail_start,
        tolerance,
        hypi_converged,
        uniform_converged,
        pointwise_converged,
    })
}
