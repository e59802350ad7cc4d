//! Multinomial and multiplier bootstraps of the empirical copula process and
//! the uniform confidence bands they yield.
//!
//! A replicate reweights the observations with random weights `w_i` and
//! recomputes the copula through the weighted joint distribution and its own
//! weighted marginal inverses; no partial derivatives are estimated.

use rand::{Rng, RngCore};
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use crate::copula::{copula_grid, empirical_copula_grid, weighted_copula_grid, Copula, PseudoSample};
use crate::error::{invalid, Result};
use crate::gridfn::{GridDomain, GridFunction};
use crate::stats;

/// Fewest replicates accepted for a confidence band.
pub const MIN_BAND_REPLICATES: usize = 50;

/// Law of the observation weights of one bootstrap replicate.
pub trait WeightScheme: Send + Sync {
    fn draw(&self, n: usize, rng: &mut dyn RngCore) -> Vec<f64>;
}

/// Counts of `n` draws with replacement: a multinomial vector with `n`
/// trials and equal cell probabilities.
#[derive(Debug, Clone, Copy, Default)]
pub struct Multinomial;

impl WeightScheme for Multinomial {
    fn draw(&self, n: usize, rng: &mut dyn RngCore) -> Vec<f64> {
        let mut w = vec![0.0; n];
        for _ in 0..n {
            w[rng.random_range(0..n)] += 1.0;
        }
        w
    }
}

/// I.i.d. standard exponential multipliers `ξ_i` (mean one, variance one),
/// divided by their sample mean so the weighted distribution has total mass
/// one.
///
/// Without the division the weighted empirical distribution fluctuates
/// around a Brownian sheet instead of a bridge, and the copula map turns the
/// extra total-mass term into `W(1)(C(u) - Σ_j u_j Ċ_j(u))`, which does not
/// vanish (under independence the variance at `(1/2, 1/2)` comes out near
/// three times too large).
/// [`ExponentialMultiplier::raw`] keeps the undivided weights for comparison.
#[derive(Debug, Clone, Copy)]
pub struct ExponentialMultiplier {
    normalize: bool,
}

impl ExponentialMultiplier {
    pub fn new() -> Self {
        Self { normalize: true }
    }

    /// Undivided multipliers.
    pub fn raw() -> Self {
        Self { normalize: false }
    }
}

impl Default for ExponentialMultiplier {
    fn default() -> Self {
        Self::new()
    }
}

impl WeightScheme for ExponentialMultiplier {
    fn draw(&self, n: usize, rng: &mut dyn RngCore) -> Vec<f64> {
        let mut xi: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
        if self.normalize {
            let mean = xi.iter().sum::<f64>() / n as f64;
            for v in &mut xi {
                *v /= mean;
            }
        }
        xi
    }
}

/// The same weights every time; for degenerate checks.
#[derive(Debug, Clone)]
pub struct FixedWeights(pub Vec<f64>);

impl WeightScheme for FixedWeights {
    fn draw(&self, _n: usize, _rng: &mut dyn RngCore) -> Vec<f64> {
        self.0.clone()
    }
}

/// Bootstrap replicates of the empirical copula process.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapDraws {
    pub m_count: usize,
    pub processes: Vec<GridFunction>,
    /// `C_n` on the grid, the centre of every replicate.
    pub base: GridFunction,
}

impl BootstrapDraws {
    /// `sup |ℂ_n^{[m]}|` over the grid for every replicate.
    pub fn sups(&self) -> Vec<f64> {
        self.processes.iter().map(|p| p.abs().max()).collect()
    }
}

/// One replicate `√n (C_n^w - C_n)` given the weights.
pub fn bootstrap_process(
    sample: &PseudoSample,
    base: &GridFunction,
    weights: &[f64],
) -> Result<GridFunction> {
    let cw = weighted_copula_grid(sample, Some(weights), base.domain())?;
    let root_n = (sample.n() as f64).sqrt();
    cw.zip_with(base, |a, b| root_n * (a - b))
}

fn check_n(sample: &PseudoSample) -> Result<()> {
    if sample.n() < 2 {
        return Err(invalid("n", "bootstrap needs at least two observations"));
    }
    Ok(())
}

/// `m_count` replicates drawn sequentially from one generator.
pub fn bootstrap(
    sample: &PseudoSample,
    grid: &GridDomain,
    m_count: usize,
    scheme: &dyn WeightScheme,
    rng: &mut dyn RngCore,
) -> Result<BootstrapDraws> {
    check_n(sample)?;
    let base = empirical_copula_grid(sample, grid)?;
    let processes = (0..m_count)
        .map(|_| {
            let w = scheme.draw(sample.n(), rng);
            bootstrap_process(sample, &base, &w)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BootstrapDraws {
        m_count,
        processes,
        base,
    })
}

/// Replicates in parallel; replicate `m` draws from `stream(m)`, so the
/// result does not depend on scheduling.
pub fn bootstrap_par<R, F>(
    sample: &PseudoSample,
    grid: &GridDomain,
    m_count: usize,
    scheme: &dyn WeightScheme,
    stream: F,
) -> Result<BootstrapDraws>
where
    R: RngCore,
    F: Fn(usize) -> R + Sync,
{
    check_n(sample)?;
    let base = empirical_copula_grid(sample, grid)?;
    let processes = (0..m_count)
        .into_par_iter()
        .map(|m| {
            let mut rng = stream(m);
            let w = scheme.draw(sample.n(), &mut rng);
            bootstrap_process(sample, &base, &w)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BootstrapDraws {
        m_count,
        processes,
        base,
    })
}

/// Half-width `b` of the band `C_n ± b/√n`: the `level` quantile of the
/// replicate sups (left-continuous inverse; `level = 0` gives the minimum).
pub fn confidence_band(draws: &BootstrapDraws, level: f64) -> Result<f64> {
    if draws.processes.len() < MIN_BAND_REPLICATES {
        return Err(invalid(
            "m_count",
            format!(
                "need at least {MIN_BAND_REPLICATES} replicates, got {}",
                draws.processes.len()
            ),
        ));
    }
    if !(0.0..1.0).contains(&level) {
        return Err(invalid("level", format!("must lie in [0, 1), got {level}")));
    }
    Ok(stats::quantile(&draws.sups(), level))
}

/// Whether the band of half-width `b` around `C_n` contains the model.
pub fn band_covers(
    sample: &PseudoSample,
    c: &dyn Copula,
    grid: &GridDomain,
    half_width: f64,
) -> Result<bool> {
    let cn = empirical_copula_grid(sample, grid)?;
    let truth = copula_grid(c, grid)?;
    let sup = cn.sup_distance(&truth)? * (sample.n() as f64).sqrt();
    Ok(sup <= half_width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copula::{empirical_copula_process, pseudo_observations, Independence, Mixture};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample(c: &dyn Copula, n: usize, seed: u64) -> PseudoSample {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        pseudo_observations(&c.sample(n, &mut rng)).unwrap()
    }

    #[test]
    fn multinomial_weights_total_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [2, 17, 500] {
            let w = Multinomial.draw(n, &mut rng);
            assert_eq!(w.len(), n);
            assert_eq!(w.iter().sum::<f64>(), n as f64);
            assert!(w.iter().all(|v| v.fract() == 0.0));
        }
        let w = ExponentialMultiplier::raw().draw(20_000, &mut rng);
        assert!((stats::mean(&w) - 1.0).abs() < 0.03);
        assert!((stats::variance(&w) - 1.0).abs() < 0.08);
        let w = ExponentialMultiplier::new().draw(1000, &mut rng);
        assert!((w.iter().sum::<f64>() - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn unit_weights_reproduce_base() {
        let s = sample(&Mixture::new(0.5).unwrap(), 60, 2);
        let grid = GridDomain::unit_cube(2, 13).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = bootstrap(&s, &grid, 3, &FixedWeights(vec![1.0; 60]), &mut rng).unwrap();
        assert_eq!(d.m_count, 3);
        for p in &d.processes {
            assert!(p.values().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn multiplier_corner_is_weighted_total() {
        let s = sample(&Independence::new(2).unwrap(), 40, 4);
        let grid = GridDomain::unit_cube(2, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let w = ExponentialMultiplier::raw().draw(40, &mut rng);
            let total: f64 = w.iter().sum();
            let cw = weighted_copula_grid(&s, Some(&w), &grid).unwrap();
            let corner = cw.at(&[4, 4]);
            if total < 40.0 {
                // No marginal reaches level one, so both inverses sit at +inf.
                assert!((corner - total / 40.0).abs() < 1e-12);
            } else {
                assert!(corner <= total / 40.0 + 1e-12);
            }
            let w = ExponentialMultiplier::new().draw(40, &mut rng);
            let cw = weighted_copula_grid(&s, Some(&w), &grid).unwrap();
            assert!((cw.at(&[4, 4]) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn band_examples() {
        let grid = GridDomain::unit_cube(2, 5).unwrap();
        let zero = GridFunction::zeros(grid.clone());
        let draws = BootstrapDraws {
            m_count: 60,
            processes: vec![zero.clone(); 60],
            base: zero.clone(),
        };
        assert_eq!(confidence_band(&draws, 0.95).unwrap(), 0.0);
        let scaled: Vec<GridFunction> = (0..60)
            .map(|m| GridFunction::constant(grid.clone(), -(m as f64) - 1.0).unwrap())
            .collect();
        let draws = BootstrapDraws {
            m_count: 60,
            processes: scaled,
            base: zero,
        };
        assert_eq!(confidence_band(&draws, 0.0).unwrap(), 1.0);
        assert_eq!(confidence_band(&draws, 0.5).unwrap(), 30.0);
        let few = BootstrapDraws {
            m_count: 10,
            processes: draws.processes[..10].to_vec(),
            base: draws.base.clone(),
        };
        assert!(confidence_band(&few, 0.5).is_err());
    }

    #[test]
    fn parallel_bootstrap_is_schedule_free() {
        let s = sample(&Mixture::new(0.5).unwrap(), 100, 6);
        let grid = GridDomain::unit_cube(2, 11).unwrap();
        let stream = |m: usize| ChaCha8Rng::seed_from_u64(1000 + m as u64);
        let a = bootstrap_par(&s, &grid, 16, &Multinomial, stream).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool
            .install(|| bootstrap_par(&s, &grid, 16, &Multinomial, stream))
            .unwrap();
        assert_eq!(a, b);
    }

    fn variances(scheme: &dyn WeightScheme, seed: u64) -> (f64, f64) {
        let c = Independence::new(2).unwrap();
        let n = 500;
        let grid = GridDomain::unit_cube(2, 3).unwrap();
        // Monte Carlo oracle: variance of ℂ_n(0.5, 0.5) over fresh samples.
        let fresh: Vec<f64> = (0..2000)
            .map(|r| {
                let s = sample(&c, n, seed + 10 + r);
                empirical_copula_process(&s, &c, &grid).unwrap().at(&[1, 1])
            })
            .collect();
        let mc_var = stats::variance(&fresh);
        let s = sample(&c, n, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 1);
        let d = bootstrap(&s, &grid, 200, scheme, &mut rng).unwrap();
        let bs: Vec<f64> = d.processes.iter().map(|p| p.at(&[1, 1])).collect();
        (stats::variance(&bs), mc_var)
    }

    fn assert_close(scheme: &dyn WeightScheme, seed: u64) {
        let (bs_var, mc_var) = variances(scheme, seed);
        let rel = (bs_var - mc_var).abs() / mc_var;
        assert!(rel <= 0.25, "bootstrap {bs_var} vs Monte Carlo {mc_var}");
    }

    #[test]
    fn multinomial_variance_matches_monte_carlo() {
        assert_close(&Multinomial, 100);
    }

    #[test]
    fn multiplier_variance_matches_monte_carlo() {
        assert_close(&ExponentialMultiplier::new(), 200);
    }

    #[test]
    fn undivided_multipliers_inflate_the_variance() {
        // The process has limit variance 1/16 at (1/2, 1/2) under
        // independence; undivided multipliers land well above it.
        let (bs_var, mc_var) = variances(&ExponentialMultiplier::raw(), 300);
        assert!(bs_var > 1.5 * mc_var, "{bs_var} vs {mc_var}");
    }
}
