//! Residual empirical processes of linear models with possibly
//! discontinuous error densities.
//!
//! The error law supplies its density's one-sided limits and its
//! discontinuity points; nothing is detected numerically. The extended real
//! line is a finite grid on `[-Z, Z]` plus two sentinel points at `±∞`.

mod ols;
mod process;

pub use ols::{ols_fit, simulate_regression, OlsFit, RegressionSample};
pub use process::{
    classical_representation, limit_process_draw, local_dip, ols_influence, residual_ecdf,
    residual_process, residual_process_at, spike_contrast, Influence, ResidualLimitDraw,
    SentinelFunction,
};

use nalgebra::DMatrix;
use rand::{Rng, RngCore};
use rand_distr::{Distribution, Exp1, StandardNormal};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{invalid, Error, Result};

/// Default half-width `Z` of the finite part of the `z` grid.
pub const DEFAULT_ZMAX: f64 = 10.0;

/// Draws used for `E[max(±X'γ, 0)]` when no closed form exists.
pub const DEFAULT_MC_DRAWS: usize = 1_000_000;

/// A real function with left and right limits everywhere and values at
/// `±∞`. Evaluators accept infinite arguments.
pub trait Ladlag {
    fn value(&self, z: f64) -> f64;
    fn left_limit(&self, z: f64) -> f64;
    fn right_limit(&self, z: f64) -> f64;
}

/// Law of the regression errors.
pub trait ErrorLaw: Send + Sync {
    fn density(&self, z: f64) -> f64;
    fn density_left(&self, z: f64) -> f64;
    fn density_right(&self, z: f64) -> f64;
    fn cdf(&self, z: f64) -> f64;
    fn quantile(&self, p: f64) -> f64;
    fn sample(&self, n: usize, rng: &mut dyn RngCore) -> Vec<f64>;
    /// Points where the density jumps.
    fn discontinuities(&self) -> Vec<f64>;
}

/// Two exponential halves glued at zero with mean zero:
/// `w/θ₋ e^{z/θ₋}` for `z < 0` and `(1-w)/θ₊ e^{-z/θ₊}` for `z > 0`,
/// `w = θ₊/(θ₋ + θ₊)`. The density at zero is taken right-continuous.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedExponential {
    theta_minus: f64,
    theta_plus: f64,
}

impl MixedExponential {
    pub fn new(theta_minus: f64, theta_plus: f64) -> Result<Self> {
        for (name, v) in [("theta_minus", theta_minus), ("theta_plus", theta_plus)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        Ok(Self {
            theta_minus,
            theta_plus,
        })
    }

    pub fn theta_minus(&self) -> f64 {
        self.theta_minus
    }

    pub fn theta_plus(&self) -> f64 {
        self.theta_plus
    }

    /// Mass of the negative half.
    pub fn weight(&self) -> f64 {
        self.theta_plus / (self.theta_minus + self.theta_plus)
    }

    pub fn variance(&self) -> f64 {
        let w = self.weight();
        2.0 * (w * self.theta_minus.powi(2) + (1.0 - w) * self.theta_plus.powi(2))
    }

    fn left_branch(&self, z: f64) -> f64 {
        self.weight() / self.theta_minus * (z / self.theta_minus).exp()
    }

    fn right_branch(&self, z: f64) -> f64 {
        (1.0 - self.weight()) / self.theta_plus * (-z / self.theta_plus).exp()
    }
}

impl ErrorLaw for MixedExponential {
    fn density(&self, z: f64) -> f64 {
        if z.is_infinite() {
            0.0
        } else if z < 0.0 {
            self.left_branch(z)
        } else {
            self.right_branch(z)
        }
    }

    fn density_left(&self, z: f64) -> f64 {
        if z.is_infinite() {
            0.0
        } else if z <= 0.0 {
            self.left_branch(z)
        } else {
            self.right_branch(z)
        }
    }

    fn density_right(&self, z: f64) -> f64 {
        self.density(z)
    }

    fn cdf(&self, z: f64) -> f64 {
        let w = self.weight();
        if z < 0.0 {
            w * (z / self.theta_minus).exp()
        } else {
            1.0 - (1.0 - w) * (-z / self.theta_plus).exp()
        }
    }

    fn quantile(&self, p: f64) -> f64 {
        let w = self.weight();
        if p <= 0.0 {
            f64::NEG_INFINITY
        } else if p >= 1.0 {
            f64::INFINITY
        } else if p <= w {
            self.theta_minus * (p / w).ln()
        } else {
            -self.theta_plus * ((1.0 - p) / (1.0 - w)).ln()
        }
    }

    fn sample(&self, n: usize, rng: &mut dyn RngCore) -> Vec<f64> {
        let w = self.weight();
        (0..n)
            .map(|_| {
                let e: f64 = Exp1.sample(rng);
                if rng.random_bool(w) {
                    -self.theta_minus * e
                } else {
                    self.theta_plus * e
                }
            })
            .collect()
    }

    fn discontinuities(&self) -> Vec<f64> {
        if self.theta_minus == self.theta_plus {
            Vec::new()
        } else {
            vec![0.0]
        }
    }
}

/// Law of the covariate vector `X`.
pub trait DesignLaw: Send + Sync {
    fn dim(&self) -> usize;
    /// One draw written into `out`.
    fn sample_into(&self, rng: &mut dyn RngCore, out: &mut [f64]);
    fn mean(&self) -> Vec<f64>;
    /// `E[X X']`.
    fn second_moment(&self) -> DMatrix<f64>;
    /// `E[max(X'γ, 0)]` in closed form, when available.
    fn positive_part_mean(&self, _gamma: &[f64]) -> Option<f64> {
        None
    }
}

/// Independent normal covariates `X_j ~ N(μ_j, σ_j²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianDesign {
    mean: Vec<f64>,
    sd: Vec<f64>,
}

impl GaussianDesign {
    pub fn new(mean: Vec<f64>, sd: Vec<f64>) -> Result<Self> {
        if mean.len() != sd.len() || mean.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: mean.len(),
                got: sd.len(),
            });
        }
        if sd.iter().any(|s| !(s.is_finite() && *s >= 0.0)) || mean.iter().any(|m| !m.is_finite()) {
            return Err(invalid("sd", "means must be finite and sds finite and >= 0"));
        }
        Ok(Self { mean, sd })
    }

    /// `p` independent standard normal covariates.
    pub fn standard(p: usize) -> Result<Self> {
        Self::new(vec![0.0; p], vec![1.0; p])
    }
}

/// `E[max(Y, 0)]` for `Y ~ N(m, s²)`.
fn normal_positive_part(m: f64, s: f64) -> f64 {
    if s == 0.0 {
        return m.max(0.0);
    }
    let std = Normal::new(0.0, 1.0).expect("standard normal");
    m * std.cdf(m / s) + s * std.pdf(m / s)
}

impl DesignLaw for GaussianDesign {
    fn dim(&self) -> usize {
        self.mean.len()
    }

    fn sample_into(&self, rng: &mut dyn RngCore, out: &mut [f64]) {
        for ((o, m), s) in out.iter_mut().zip(&self.mean).zip(&self.sd) {
            let z: f64 = StandardNormal.sample(rng);
            *o = m + s * z;
        }
    }

    fn mean(&self) -> Vec<f64> {
        self.mean.clone()
    }

    fn second_moment(&self) -> DMatrix<f64> {
        let p = self.dim();
        DMatrix::from_fn(p, p, |i, j| {
            self.mean[i] * self.mean[j] + if i == j { self.sd[i].powi(2) } else { 0.0 }
        })
    }

    fn positive_part_mean(&self, gamma: &[f64]) -> Option<f64> {
        let m: f64 = self.mean.iter().zip(gamma).map(|(a, g)| a * g).sum();
        let s = self
            .sd
            .iter()
            .zip(gamma)
            .map(|(a, g)| (a * g).powi(2))
            .sum::<f64>()
            .sqrt();
        Some(normal_positive_part(m, s))
    }
}

/// Independent covariates `X_j ~ U(lo_j, hi_j)`; no closed form for the
/// positive-part means, which are then simulated.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformDesign {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl UniformDesign {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a.is_finite() && b.is_finite() && a < b)) {
            return Err(invalid("bounds", "need finite lo < hi on every axis"));
        }
        Ok(Self { lo, hi })
    }
}

impl DesignLaw for UniformDesign {
    fn dim(&self) -> usize {
        self.lo.len()
    }

    fn sample_into(&self, rng: &mut dyn RngCore, out: &mut [f64]) {
        for ((o, a), b) in out.iter_mut().zip(&self.lo).zip(&self.hi) {
            *o = a + (b - a) * rng.random::<f64>();
        }
    }

    fn mean(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    fn second_moment(&self) -> DMatrix<f64> {
        let mu = self.mean();
        let p = self.dim();
        DMatrix::from_fn(p, p, |i, j| {
            let var = if i == j { (self.hi[i] - self.lo[i]).powi(2) / 12.0 } else { 0.0 };
            mu[i] * mu[j] + var
        })
    }
}

/// `E[max(X'γ, 0)]` and `E[max(-X'γ, 0)]` with the larger of their two
/// Monte Carlo standard errors (zero for closed forms).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartMeans {
    pub positive: f64,
    pub negative: f64,
    pub std_error: f64,
}

/// Positive and negative part means of `X'γ`, by closed form if the design
/// offers one, else from `mc_draws` simulated covariates.
pub fn part_means(
    design: &dyn DesignLaw,
    gamma: &[f64],
    mc_draws: usize,
    rng: &mut dyn RngCore,
) -> Result<PartMeans> {
    if gamma.len() != design.dim() {
        return Err(Error::DimensionMismatch {
            expected: design.dim(),
            got: gamma.len(),
        });
    }
    let neg: Vec<f64> = gamma.iter().map(|g| -g).collect();
    if let (Some(positive), Some(negative)) =
        (design.positive_part_mean(gamma), design.positive_part_mean(&neg))
    {
        return Ok(PartMeans {
            positive,
            negative,
            std_error: 0.0,
        });
    }
    if mc_draws < 2 {
        return Err(invalid("mc_draws", "need at least 2 draws"));
    }
    let mut x = vec![0.0; design.dim()];
    let (mut sp, mut sn, mut qp, mut qn) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..mc_draws {
        design.sample_into(rng, &mut x);
        let y: f64 = x.iter().zip(gamma).map(|(a, g)| a * g).sum();
        let (p, q) = (y.max(0.0), (-y).max(0.0));
        sp += p;
        sn += q;
        qp += p * p;
        qn += q * q;
    }
    let m = mc_draws as f64;
    let se = |s: f64, q: f64| ((q / m - (s / m).powi(2)).max(0.0) / (m - 1.0)).sqrt();
    Ok(PartMeans {
        positive: sp / m,
        negative: sn / m,
        std_error: se(sp, qp).max(se(sn, qn)),
    })
}

/// `g(γ)(z) = -f(z-) E[max(-X'γ, 0)] + f(z+) E[max(X'γ, 0)]`, zero at `±∞`.
#[derive(Clone, Copy)]
pub struct GGamma<'a> {
    law: &'a dyn ErrorLaw,
    parts: PartMeans,
}

impl<'a> GGamma<'a> {
    pub fn new(law: &'a dyn ErrorLaw, parts: PartMeans) -> Self {
        Self { law, parts }
    }

    pub fn parts(&self) -> PartMeans {
        self.parts
    }

    /// `E[X'γ]`, the common factor of both one-sided limits.
    pub fn mean_index(&self) -> f64 {
        self.parts.positive - self.parts.negative
    }
}

impl Ladlag for GGamma<'_> {
    fn value(&self, z: f64) -> f64 {
        if z.is_infinite() {
            return 0.0;
        }
        -self.law.density_left(z) * self.parts.negative + self.law.density_right(z) * self.parts.positive
    }

    fn left_limit(&self, z: f64) -> f64 {
        if z.is_infinite() {
            return 0.0;
        }
        self.law.density_left(z) * self.mean_index()
    }

    fn right_limit(&self, z: f64) -> f64 {
        if z.is_infinite() {
            return 0.0;
        }
        self.law.density_right(z) * self.mean_index()
    }
}

/// `g(γ)` for an error law and design; the positive-part means use the
/// design's closed form or [`DEFAULT_MC_DRAWS`] simulated covariates.
pub fn g_gamma<'a>(
    law: &'a dyn ErrorLaw,
    design: &dyn DesignLaw,
    gamma: &[f64],
    rng: &mut dyn RngCore,
) -> Result<GGamma<'a>> {
    Ok(GGamma::new(law, part_means(design, gamma, DEFAULT_MC_DRAWS, rng)?))
}

/// Lower and upper semicontinuous hulls of a ladlag function at `z`: the
/// min and max of the value and the two one-sided limits; `(0, 0)` at `±∞`.
pub fn g_gamma_hulls(g: &dyn Ladlag, z: f64) -> (f64, f64) {
    if z.is_infinite() {
        return (0.0, 0.0);
    }
    let v = [g.left_limit(z), g.value(z), g.right_limit(z)];
    (
        v.iter().copied().fold(f64::INFINITY, f64::min),
        v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    )
}
