//! The residual empirical process `𝔽_n = √n (F̂_n - F)`, draws of its limit
//! and the spike diagnostics at density jumps.

use nalgebra::DVector;
use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use super::{g_gamma_hulls, part_means, DesignLaw, ErrorLaw, GGamma, Ladlag, RegressionSample, DEFAULT_MC_DRAWS};
use crate::copula::MIN_N_APPROX;
use crate::error::{invalid, Error, Result};
use crate::gridfn::{GridDomain, GridFunction};
use crate::hypi::{hypi_distance, HypiConfig};

/// A function on the extended real line: a grid over `[-Z, Z]` plus the two
/// sentinel values at `-∞` and `+∞`, which behave as isolated points.
#[derive(Debug, Clone, PartialEq)]
pub struct SentinelFunction {
    finite: GridFunction,
    minus_inf: f64,
    plus_inf: f64,
}

impl SentinelFunction {
    pub fn new(finite: GridFunction, minus_inf: f64, plus_inf: f64) -> Result<Self> {
        if finite.domain().dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: finite.domain().dim(),
            });
        }
        if !(minus_inf.is_finite() && plus_inf.is_finite()) {
            return Err(invalid("sentinels", "values at ±∞ must be finite"));
        }
        Ok(Self {
            finite,
            minus_inf,
            plus_inf,
        })
    }

    pub fn finite(&self) -> &GridFunction {
        &self.finite
    }

    pub fn minus_inf(&self) -> f64 {
        self.minus_inf
    }

    pub fn plus_inf(&self) -> f64 {
        self.plus_inf
    }

    /// Values in order `-∞`, grid points, `+∞`.
    pub fn values_with_sentinels(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.finite.values().len() + 2);
        v.push(self.minus_inf);
        v.extend_from_slice(self.finite.values());
        v.push(self.plus_inf);
        v
    }

    pub fn sup_abs(&self) -> f64 {
        self.values_with_sentinels().iter().fold(0.0, |m: f64, v| m.max(v.abs()))
    }

    /// Lower and upper hulls; the sentinels keep their values.
    pub fn hulls(&self, radius_cells: usize) -> (Self, Self) {
        let lo = Self {
            finite: self.finite.lsc_hull(radius_cells),
            ..self.clone()
        };
        let hi = Self {
            finite: self.finite.usc_hull(radius_cells),
            ..self.clone()
        };
        (lo, hi)
    }

    pub fn sup_distance(&self, other: &Self) -> Result<f64> {
        Ok(self
            .finite
            .sup_distance(&other.finite)?
            .max((self.minus_inf - other.minus_inf).abs())
            .max((self.plus_inf - other.plus_inf).abs()))
    }

    /// Hypi distance of the finite parts, combined with the sentinel gaps:
    /// at an isolated point the epigraph and hypograph distances reduce to
    /// the difference of the values.
    pub fn hypi_distance(&self, other: &Self, cfg: &HypiConfig) -> Result<f64> {
        Ok(hypi_distance(&self.finite, &other.finite, cfg)?
            .max((self.minus_inf - other.minus_inf).abs())
            .max((self.plus_inf - other.plus_inf).abs()))
    }
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// `F̂_n` of the residuals on a grid, with `0` at `-∞` and `1` at `+∞`.
pub fn residual_ecdf(residuals: &[f64], zgrid: &GridDomain) -> Result<SentinelFunction> {
    if residuals.is_empty() {
        return Err(invalid("residuals", "need at least one residual"));
    }
    let r = sorted(residuals.to_vec());
    let n = r.len() as f64;
    let values = zgrid
        .axis_coords(0)
        .iter()
        .map(|&z| r.partition_point(|&e| e <= z) as f64 / n)
        .collect();
    SentinelFunction::new(GridFunction::new(zgrid.clone(), values)?, 0.0, 1.0)
}

fn process_values(sorted_res: &[f64], law: &dyn ErrorLaw, zs: &[f64]) -> Vec<f64> {
    let n = sorted_res.len() as f64;
    let root_n = n.sqrt();
    zs.iter()
        .map(|&z| root_n * (sorted_res.partition_point(|&e| e <= z) as f64 / n - law.cdf(z)))
        .collect()
}

fn residuals_of(sample: &RegressionSample, beta_hat: &[f64]) -> Result<Vec<f64>> {
    if beta_hat.len() != sample.p() {
        return Err(Error::DimensionMismatch {
            expected: sample.p(),
            got: beta_hat.len(),
        });
    }
    Ok(sample
        .residuals(&DVector::from_column_slice(beta_hat))
        .iter()
        .copied()
        .collect())
}

/// `𝔽_n = √n (F̂_n - F)` on a grid over `[-Z, Z]`, pinned to `0` at `±∞`.
pub fn residual_process(
    sample: &RegressionSample,
    beta_hat: &[f64],
    law: &dyn ErrorLaw,
    zgrid: &GridDomain,
) -> Result<SentinelFunction> {
    if zgrid.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: zgrid.dim(),
        });
    }
    let r = sorted(residuals_of(sample, beta_hat)?);
    let values = process_values(&r, law, &zgrid.axis_coords(0));
    SentinelFunction::new(GridFunction::new(zgrid.clone(), values)?, 0.0, 0.0)
}

/// `𝔽_n` at arbitrary finite points.
pub fn residual_process_at(
    sample: &RegressionSample,
    beta_hat: &[f64],
    law: &dyn ErrorLaw,
    zs: &[f64],
) -> Result<Vec<f64>> {
    let r = sorted(residuals_of(sample, beta_hat)?);
    Ok(process_values(&r, law, zs))
}

/// The classical linear representation
/// `n^{-1/2} Σ (1{ε_i <= z} - F(z)) + f(z) E[X]' √n (β̂ - β)`
/// built from the true errors.
pub fn classical_representation(
    errors: &[f64],
    x_mean: &[f64],
    root_n_delta: &[f64],
    law: &dyn ErrorLaw,
    zs: &[f64],
) -> Result<Vec<f64>> {
    if x_mean.len() != root_n_delta.len() {
        return Err(Error::DimensionMismatch {
            expected: x_mean.len(),
            got: root_n_delta.len(),
        });
    }
    let drift: f64 = x_mean.iter().zip(root_n_delta).map(|(a, b)| a * b).sum();
    let e = sorted(errors.to_vec());
    Ok(process_values(&e, law, zs)
        .into_iter()
        .zip(zs)
        .map(|(v, &z)| v + law.density(z) * drift)
        .collect())
}

/// `center - (left + right) / 2`: zero in expectation for a process whose
/// mean is locally linear, and the spike depth at a density jump.
pub fn local_dip(left: f64, center: f64, right: f64) -> f64 {
    center - 0.5 * (left + right)
}

/// `dip(at) - dip(reference)` of `𝔽_n` with half-width `h`. Negative when
/// the process dips at `at` more than at the continuity point `reference`.
pub fn spike_contrast(
    sample: &RegressionSample,
    beta_hat: &[f64],
    law: &dyn ErrorLaw,
    at: f64,
    reference: f64,
    h: f64,
) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(invalid("h", format!("must be finite and > 0, got {h}")));
    }
    let zs = [at - h, at, at + h, reference - h, reference, reference + h];
    let v = residual_process_at(sample, beta_hat, law, &zs)?;
    Ok(local_dip(v[0], v[1], v[2]) - local_dip(v[3], v[4], v[5]))
}

/// Influence function `ψ(x, ε)` of an estimator.
pub type Influence = dyn Fn(&[f64], f64) -> Vec<f64> + Sync;

/// `ψ(x, ε) = E[XX']^{-1} x ε`, the influence function of least squares.
pub fn ols_influence(design: &dyn DesignLaw) -> Result<Box<Influence>> {
    let m = design.second_moment();
    let inv = m.try_inverse().ok_or(Error::SingularDesign)?;
    Ok(Box::new(move |x: &[f64], e: f64| {
        let v = &inv * DVector::from_column_slice(x);
        v.iter().map(|c| c * e).collect()
    }))
}

/// One draw of the limit `𝔽 = 𝔾f_{·,0} + g(𝔾ψ)` with its semicontinuous
/// hulls on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualLimitDraw {
    /// `𝔾f_{z,0} + g(𝔾ψ)(z)`.
    pub draw: SentinelFunction,
    /// `𝔾f_{z,0}` plus the lower hull of `g(𝔾ψ)` at `z`.
    pub lower: SentinelFunction,
    /// Same with the upper hull.
    pub upper: SentinelFunction,
    /// The realized `𝔾ψ`.
    pub gamma: Vec<f64>,
}

/// Simulates `(𝔾f_{·,0}, 𝔾ψ)` jointly by normal multipliers over a latent
/// sample of `n_approx` pairs `(X_i, ε_i)`, then assembles the limit.
///
/// Every density discontinuity inside the grid range must be a grid point,
/// otherwise the spike would be skipped.
pub fn limit_process_draw(
    law: &dyn ErrorLaw,
    design: &dyn DesignLaw,
    psi: &Influence,
    zgrid: &GridDomain,
    n_approx: usize,
    rng: &mut dyn RngCore,
) -> Result<ResidualLimitDraw> {
    if n_approx < MIN_N_APPROX {
        return Err(invalid(
            "n_approx",
            format!("need at least {MIN_N_APPROX}, got {n_approx}"),
        ));
    }
    if zgrid.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: zgrid.dim(),
        });
    }
    let (lo, hi) = (zgrid.lower()[0], zgrid.upper()[0]);
    for z in law.discontinuities() {
        if z >= lo && z <= hi && zgrid.index_of(0, z).is_none() {
            return Err(Error::InvalidDomain(format!(
                "density jump at {z} is not a grid point"
            )));
        }
    }
    let p = design.dim();
    let mut x = vec![0.0; p];
    let mut pairs = Vec::with_capacity(n_approx);
    let mut gamma = vec![0.0; p];
    let mut total = 0.0;
    let errors = law.sample(n_approx, rng);
    for &e in &errors {
        design.sample_into(rng, &mut x);
        let xi: f64 = StandardNormal.sample(rng);
        for (g, v) in gamma.iter_mut().zip(psi(&x, e)) {
            *g += xi * v;
        }
        total += xi;
        pairs.push((e, xi));
    }
    let scale = 1.0 / (n_approx as f64).sqrt();
    for g in &mut gamma {
        *g *= scale;
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut cum = Vec::with_capacity(n_approx + 1);
    cum.push(0.0);
    for &(_, xi) in &pairs {
        cum.push(cum.last().copied().unwrap_or(0.0) + xi);
    }
    let zs = zgrid.axis_coords(0);
    let bridge: Vec<f64> = zs
        .iter()
        .map(|&z| {
            let k = pairs.partition_point(|&(e, _)| e <= z);
            scale * (cum[k] - law.cdf(z) * total)
        })
        .collect();
    let g = GGamma::new(law, part_means(design, &gamma, DEFAULT_MC_DRAWS, rng)?);
    let mut draw = Vec::with_capacity(zs.len());
    let mut lower = Vec::with_capacity(zs.len());
    let mut upper = Vec::with_capacity(zs.len());
    for (&z, &b) in zs.iter().zip(&bridge) {
        let (l, u) = g_gamma_hulls(&g, z);
        draw.push(b + g.value(z));
        lower.push(b + l);
        upper.push(b + u);
    }
    let wrap = |v: Vec<f64>| -> Result<SentinelFunction> {
        SentinelFunction::new(GridFunction::new(zgrid.clone(), v)?, 0.0, 0.0)
    };
    Ok(ResidualLimitDraw {
        draw: wrap(draw)?,
        lower: wrap(lower)?,
        upper: wrap(upper)?,
        gamma,
    })
}
