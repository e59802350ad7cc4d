//! Cross-module checks: simulated limits against the finite-sample processes
//! they are meant to describe.

use hypimetric::copula::{empirical_copula_process, pseudo_observations, simulate_limit, Copula, Mixture};
use hypimetric::gridfn::GridDomain;
use hypimetric::hypi::{hypi_distance, HypiConfig};
use hypimetric::stats;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[test]
fn copula_sup_law_matches_limit_draws() {
    let c = Mixture::new(0.5).unwrap();
    let grid = GridDomain::unit_cube(2, 21).unwrap();
    let (n, reps) = (2000, 600);
    let finite: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(r);
            let s = pseudo_observations(&c.sample(n, &mut rng)).unwrap();
            empirical_copula_process(&s, &c, &grid).unwrap().abs().max()
        })
        .collect();
    let limit: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(10_000 + r);
            let draw = simulate_limit(&c, &grid, n, &mut rng).unwrap();
            draw.lower.abs().max().max(draw.upper.abs().max())
        })
        .collect();
    let ks = stats::ks_two_sample(&finite, &limit);
    // About the 0.1% critical value for 600 against 600.
    assert!(ks < 0.113, "KS {ks}");
}

#[test]
fn limit_hulls_bracket_and_stay_close() {
    let c = Mixture::new(0.75).unwrap();
    let grid = GridDomain::unit_cube(2, 31).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let draw = simulate_limit(&c, &grid, 5000, &mut rng).unwrap();
    for (lo, hi) in draw.lower.values().iter().zip(draw.upper.values()) {
        assert!(lo <= hi);
    }
    // The two representatives differ only near the diagonal, where the
    // hypi-semimetric sees them as one function.
    let span = draw.lower.abs().max().max(draw.upper.abs().max()) + 0.1;
    let cfg = HypiConfig::new(-span, span, 201).unwrap();
    let d = hypi_distance(&draw.lower, &draw.upper, &cfg).unwrap();
    assert!(d <= 2.0 * grid.cell_size().max(cfg.y_spacing()), "{d}");
    assert!(draw.lower.sup_distance(&draw.upper).unwrap() > d);
}
