//! Cramér-von Mises and Kolmogorov-Smirnov tests of independence and their
//! power against local mixture alternatives.
//!
//! Both statistics are functionals of the process `√n (C_n - Π)` on a grid:
//! `T_n = n ∫ (C_n - Π)² dΠ` with uniform grid weights, and
//! `S_n = √n sup |C_n - Π|`. Critical values are simulated at the same `n`
//! and grid rather than taken from the limit law.

use rand::RngCore;
use rayon::prelude::*;

use crate::copula::{empirical_copula_process, pseudo_observations, Copula, Independence, Mixture, PseudoSample};
use crate::error::{invalid, Result};
use crate::gridfn::{GridDomain, GridFunction};
use crate::stats;

/// Default grid resolution per axis for the statistics.
pub const DEFAULT_GRID_POINTS: usize = 41;

/// Fewest replicates accepted for a power curve.
pub const MIN_POWER_REPS: usize = 500;

/// Default ratio of null calibration draws to replicates per `δ`.
pub const DEFAULT_CALIBRATION_FACTOR: usize = 10;

fn independence_process(s: &PseudoSample, grid: &GridDomain) -> Result<GridFunction> {
    empirical_copula_process(s, &Independence::new(s.dim())?, grid)
}

/// `T_n`: `n` times the grid average of `(C_n - Π)²`.
pub fn cvm_statistic(s: &PseudoSample, grid: &GridDomain) -> Result<f64> {
    let p = independence_process(s, grid)?;
    Ok(p.values().iter().map(|v| v * v).sum::<f64>() / p.values().len() as f64)
}

/// `S_n`: `√n` times the grid maximum of `|C_n - Π|`.
pub fn ks_statistic(s: &PseudoSample, grid: &GridDomain) -> Result<f64> {
    Ok(independence_process(s, grid)?.abs().max())
}

/// Both statistics from one pass over the grid.
pub fn statistics(s: &PseudoSample, grid: &GridDomain) -> Result<(f64, f64)> {
    let p = independence_process(s, grid)?;
    let t = p.values().iter().map(|v| v * v).sum::<f64>() / p.values().len() as f64;
    let s = p.values().iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    Ok((t, s))
}

/// The local alternative `C^(n) = Π + (δ/√n)(M - Π)`, which is the mixture
/// copula with `λ = δ/√n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalAlternative {
    delta: f64,
    n: usize,
}

impl LocalAlternative {
    pub fn new(delta: f64, n: usize) -> Result<Self> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(invalid("delta", format!("must be finite and >= 0, got {delta}")));
        }
        if n < 2 {
            return Err(invalid("n", format!("need n >= 2, got {n}")));
        }
        let alt = Self { delta, n };
        if alt.lambda() >= 1.0 {
            return Err(invalid(
                "delta",
                format!("delta/sqrt(n) = {} must stay below 1", alt.lambda()),
            ));
        }
        Ok(alt)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Mixing weight `δ/√n`.
    pub fn lambda(&self) -> f64 {
        self.delta / (self.n as f64).sqrt()
    }

    /// The copula to sample from; independence at `δ = 0`.
    pub fn copula(&self) -> Box<dyn Copula> {
        if self.delta == 0.0 {
            Box::new(Independence::new(2).expect("dim 2 is valid"))
        } else {
            Box::new(Mixture::new(self.lambda()).expect("lambda checked in new"))
        }
    }
}

/// Simulated `1 - level` quantiles of `T_n` and `S_n` under independence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalValues {
    pub t: f64,
    pub s: f64,
}

/// Statistics of `reps` fresh samples of size `n` from `c`; replicate `r`
/// draws from `stream(offset + r)`.
pub fn simulate_statistics<R, F>(
    c: &dyn Copula,
    n: usize,
    grid: &GridDomain,
    reps: usize,
    offset: u64,
    stream: &F,
) -> Result<Vec<(f64, f64)>>
where
    R: RngCore,
    F: Fn(u64) -> R + Sync,
{
    (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(offset + r as u64);
            let x = c.sample(n, &mut rng);
            statistics(&pseudo_observations(&x)?, grid)
        })
        .collect()
}

fn check_level(level: f64) -> Result<()> {
    if !(level > 0.0 && level <= 1.0) {
        return Err(invalid("level", format!("must lie in (0, 1], got {level}")));
    }
    Ok(())
}

/// Critical value from simulated null statistics: the left-continuous
/// `1 - level` quantile, `-∞` at `level = 1` so that every sample is
/// rejected.
pub fn critical_value(null: &[f64], level: f64) -> Result<f64> {
    check_level(level)?;
    if null.is_empty() {
        return Err(invalid("null", "no null statistics"));
    }
    if level == 1.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(stats::quantile(null, 1.0 - level))
}

/// Rejection frequencies `(T, S)`: the test rejects iff the statistic
/// strictly exceeds its critical value.
pub fn rejection_rates(draws: &[(f64, f64)], crit: CriticalValues) -> (f64, f64) {
    let m = draws.len() as f64;
    let t = draws.iter().filter(|d| d.0 > crit.t).count() as f64 / m;
    let s = draws.iter().filter(|d| d.1 > crit.s).count() as f64 / m;
    (t, s)
}

/// Settings of a power study.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerConfig {
    pub n: usize,
    pub deltas: Vec<f64>,
    pub level: f64,
    /// Fresh samples per `δ`.
    pub reps: usize,
    /// Null samples used for the critical values.
    pub calibration_reps: usize,
    pub grid_points: usize,
}

impl PowerConfig {
    pub fn new(n: usize, deltas: Vec<f64>, level: f64, reps: usize) -> Self {
        Self {
            n,
            deltas,
            level,
            reps,
            calibration_reps: DEFAULT_CALIBRATION_FACTOR * reps,
            grid_points: DEFAULT_GRID_POINTS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_level(self.level)?;
        if self.reps < MIN_POWER_REPS {
            return Err(invalid(
                "reps",
                format!("need at least {MIN_POWER_REPS}, got {}", self.reps),
            ));
        }
        if self.calibration_reps == 0 {
            return Err(invalid("calibration_reps", "must be positive"));
        }
        if self.grid_points < 2 {
            return Err(invalid("grid_points", "need at least 2"));
        }
        for &d in &self.deltas {
            LocalAlternative::new(d, self.n)?;
        }
        Ok(())
    }
}

/// One row of a power curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerRow {
    pub delta: f64,
    pub reject_t: f64,
    pub reject_s: f64,
    /// Binomial standard errors of the two rates.
    pub se_t: f64,
    pub se_s: f64,
}

/// Power curve result together with the critical values it used.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerCurve {
    pub critical: CriticalValues,
    pub rows: Vec<PowerRow>,
}

/// Rejection rates of both tests along the local alternatives.
///
/// Two phases: the null calibration draws `stream(0..calibration_reps)` and
/// finishes before any alternative is sampled; `δ` number `j` then draws
/// replicate `r` from `stream(calibration_reps + j * reps + r)`.
pub fn power_curve<R, F>(cfg: &PowerConfig, stream: F) -> Result<PowerCurve>
where
    R: RngCore,
    F: Fn(u64) -> R + Sync,
{
    cfg.validate()?;
    let grid = GridDomain::unit_cube(2, cfg.grid_points)?;
    let indep = Independence::new(2)?;
    let null = simulate_statistics(&indep, cfg.n, &grid, cfg.calibration_reps, 0, &stream)?;
    let (nt, ns): (Vec<f64>, Vec<f64>) = null.into_iter().unzip();
    let critical = CriticalValues {
        t: critical_value(&nt, cfg.level)?,
        s: critical_value(&ns, cfg.level)?,
    };
    let mut rows = Vec::with_capacity(cfg.deltas.len());
    for (j, &delta) in cfg.deltas.iter().enumerate() {
        let alt = LocalAlternative::new(delta, cfg.n)?;
        let offset = (cfg.calibration_reps + j * cfg.reps) as u64;
        let draws = simulate_statistics(alt.copula().as_ref(), cfg.n, &grid, cfg.reps, offset, &stream)?;
        let (reject_t, reject_s) = rejection_rates(&draws, critical);
        rows.push(PowerRow {
            delta,
            reject_t,
            reject_s,
            se_t: stats::binomial_se(reject_t, cfg.reps),
            se_s: stats::binomial_se(reject_s, cfg.reps),
        });
    }
    Ok(PowerCurve { critical, rows })
}

/// Largest drop `rates[i] - rates[j]` over `i < j`; zero for a
/// nondecreasing sequence.
pub fn max_isotonic_violation(rates: &[f64]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    let mut drop = 0.0f64;
    for &r in rates {
        best = best.max(r);
        drop = drop.max(best - r);
    }
    drop
}
