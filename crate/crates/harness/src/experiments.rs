//! The experiments behind each subcommand. Every function is a pure
//! function of the configuration: replicate `r` only ever draws from its own
//! stream, and results are collected in index order.

use rand::RngCore;
use rayon::prelude::*;

use hypimetric::copula::{
    empirical_copula, empirical_copula_process, hull_gap_bound, pseudo_observations, simulate_limit, Copula,
    Independence, Mixture,
};
use hypimetric::gof::{power_curve, PowerConfig};
use hypimetric::gridfn::{GridDomain, GridFunction};
use hypimetric::hypi::{hypi_distance, HypiConfig};
use hypimetric::regress::{
    ols_fit, residual_process, residual_process_at, simulate_regression, spike_contrast, GaussianDesign,
    MixedExponential,
};
use hypimetric::resample::{band_covers, bootstrap_par, confidence_band, ExponentialMultiplier, Multinomial, WeightScheme};
use hypimetric::taildep::{estimator_process, tail_grid, IndependenceModel, MaxModel, TailModel, TailSample};

use crate::config::{Experiment, ExperimentConfig, Params};
use crate::error::Result;
use crate::output::{num, rep_rows, Table};
use crate::seed::split_seed;

const REP_HEADER: &[&str] = &["rep", "statistic", "value"];

/// Tables produced by one run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Outputs {
    pub main: Table,
    /// Extra tables keyed by the file suffix that replaces the extension of
    /// the main output, e.g. `trajectory.csv`.
    pub extra: Vec<(&'static str, Table)>,
    /// One line for standard output.
    pub summary: Option<String>,
}

/// How replicate streams are assigned, for the manifest.
pub fn stream_layout(cfg: &ExperimentConfig) -> String {
    match cfg.experiment {
        Experiment::HypiDist => "no randomness".into(),
        Experiment::SimCopula => "replicate r: stream r (sample, then the limit draw)".into(),
        Experiment::BootstrapBand => format!(
            "replicate r: stream r for the sample; bootstrap draw m of replicate r: stream {} + r*M + m",
            cfg.reps
        ),
        Experiment::GofPower => "null calibration sample i: stream i; delta number j, replicate r: stream calibration-reps + j*reps + r".into(),
        Experiment::SimTaildep => "replicate r: stream r".into(),
        Experiment::SimRegression => "replicate r: stream r (design rows, then errors)".into(),
    }
}

pub fn execute(cfg: &ExperimentConfig) -> Result<Outputs> {
    match cfg.experiment {
        Experiment::HypiDist => hypi_dist(&cfg.params),
        Experiment::SimCopula => sim_copula(cfg),
        Experiment::BootstrapBand => bootstrap_band(cfg),
        Experiment::GofPower => gof_power(cfg),
        Experiment::SimTaildep => sim_taildep(cfg),
        Experiment::SimRegression => sim_regression(cfg),
    }
}

/// Runs `f` for every replicate in parallel and concatenates the rows in
/// replicate order.
fn per_replicate<F>(reps: usize, header: &[&'static str], f: F) -> Result<Table>
where
    F: Fn(usize) -> Result<Vec<Vec<String>>> + Sync + Send,
{
    let chunks = (0..reps).into_par_iter().map(f).collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(header);
    for row in chunks.into_iter().flatten() {
        table.push(row);
    }
    Ok(table)
}

fn hypi_dist(p: &Params) -> Result<Outputs> {
    let f = GridFunction::load(p.text("f")?)?;
    let g = GridFunction::load(p.text("g")?)?;
    let cfg = HypiConfig::new(p.real("ylow")?, p.real("yhigh")?, p.count("ypoints")?)?
        .with_radius(p.count("radius")?)
        .with_backend(p.text("backend")?.parse()?);
    let stats = [
        ("d_hypi", hypi_distance(&f, &g, &cfg)?),
        ("d_sup", f.sup_distance(&g)?),
        ("d_l1", f.lp_distance(&g, 1.0)?),
        ("d_l2", f.lp_distance(&g, 2.0)?),
    ];
    let mut main = Table::new(&["statistic", "value"]);
    for (k, v) in stats {
        main.push(vec![k.to_string(), num(v)]);
    }
    let summary = stats
        .iter()
        .map(|(k, v)| format!("{k}={}", num(*v)))
        .collect::<Vec<_>>()
        .join(" ");
    Ok(Outputs {
        main,
        extra: Vec::new(),
        summary: Some(summary),
    })
}

fn copula_model(p: &Params) -> Result<Box<dyn Copula>> {
    Ok(match p.text("model")? {
        "indep" => Box::new(Independence::new(2)?),
        _ => Box::new(Mixture::new(p.real("lambda")?)?),
    })
}

/// Hypi window covering both functions with some headroom.
fn window(a: &GridFunction, b: &GridFunction, points: usize) -> Result<HypiConfig> {
    let lo = a.min().min(b.min());
    let hi = a.max().max(b.max());
    let pad = 0.1 * (hi - lo).max(1.0);
    Ok(HypiConfig::new(lo - pad, hi + pad, points)?)
}

fn sim_copula(cfg: &ExperimentConfig) -> Result<Outputs> {
    let p = &cfg.params;
    let model = copula_model(p)?;
    let n = p.count("n")?;
    let grid = GridDomain::unit_cube(2, p.count("grid")?)?;
    let h = grid.cell_size();
    let n_approx = p.count("n-approx")?;
    let ypoints = p.count("ypoints")?;
    let root_n = (n as f64).sqrt();
    let main = per_replicate(cfg.reps, REP_HEADER, |r| {
        let mut rng = split_seed(cfg.seed, r as u64);
        let x = model.sample(n, &mut rng);
        let s = pseudo_observations(&x)?;
        let process = empirical_copula_process(&s, model.as_ref(), &grid)?;
        let mid = [0.5, 0.5];
        let at_mid = root_n * (empirical_copula(&s, &mid) - model.cdf(&mid));
        let limit = simulate_limit(model.as_ref(), &grid, n_approx, &mut rng)?;
        let dh = hypi_distance(&process, &limit.lower, &window(&process, &limit.lower, ypoints)?)?;
        Ok(rep_rows(
            r,
            &[
                ("proc_at_0.5_0.5", at_mid),
                ("sup_abs", process.abs().max()),
                ("gap", process.hull_gap(1)),
                ("gap_bound", hull_gap_bound(2, n, h)),
                ("dhypi_to_limit_draw", dh),
            ],
        ))
    })?;
    Ok(Outputs {
        main,
        ..Outputs::default()
    })
}

fn bootstrap_band(cfg: &ExperimentConfig) -> Result<Outputs> {
    let p = &cfg.params;
    let model = copula_model(p)?;
    let n = p.count("n")?;
    let m_count = p.count("M")?;
    let level = p.real("level")?;
    let grid = GridDomain::unit_cube(2, p.count("grid")?)?;
    let scheme: Box<dyn WeightScheme> = match p.text("weights")? {
        "multinomial" => Box::new(Multinomial),
        _ => Box::new(ExponentialMultiplier::new()),
    };
    let reps = cfg.reps as u64;
    let main = per_replicate(cfg.reps, REP_HEADER, |r| {
        let mut rng = split_seed(cfg.seed, r as u64);
        let x = model.sample(n, &mut rng);
        let s = pseudo_observations(&x)?;
        let base = reps + (r * m_count) as u64;
        let draws = bootstrap_par(&s, &grid, m_count, scheme.as_ref(), |m| {
            split_seed(cfg.seed, base + m as u64)
        })?;
        let half_width = confidence_band(&draws, level)?;
        let process = empirical_copula_process(&s, model.as_ref(), &grid)?;
        let covered = band_covers(&s, model.as_ref(), &grid, half_width)?;
        Ok(rep_rows(
            r,
            &[
                ("half_width", half_width),
                ("sup_abs", process.abs().max()),
                ("covered", if covered { 1.0 } else { 0.0 }),
            ],
        ))
    })?;
    Ok(Outputs {
        main,
        ..Outputs::default()
    })
}

fn gof_power(cfg: &ExperimentConfig) -> Result<Outputs> {
    let p = &cfg.params;
    let mut main = Table::new(&["delta", "statistic", "value"]);
    if cfg.reps == 0 {
        return Ok(Outputs {
            main,
            ..Outputs::default()
        });
    }
    let mut power = PowerConfig::new(p.count("n")?, p.list("deltas")?.to_vec(), p.real("level")?, cfg.reps);
    power.grid_points = p.count("grid")?;
    power.calibration_reps = p.count("calibration-reps")?;
    let curve = power_curve(&power, |i| split_seed(cfg.seed, i))?;
    main.push(vec!["calibration".into(), "crit_t".into(), num(curve.critical.t)]);
    main.push(vec!["calibration".into(), "crit_s".into(), num(curve.critical.s)]);
    for row in &curve.rows {
        for (name, v) in [
            ("reject_t", row.reject_t),
            ("reject_s", row.reject_s),
            ("se_t", row.se_t),
            ("se_s", row.se_s),
        ] {
            main.push(vec![num(row.delta), name.into(), num(v)]);
        }
    }
    Ok(Outputs {
        main,
        ..Outputs::default()
    })
}

fn sim_taildep(cfg: &ExperimentConfig) -> Result<Outputs> {
    let p = &cfg.params;
    let model: Box<dyn TailModel> = match p.text("model")? {
        "indep" => Box::new(IndependenceModel::new(2)?),
        _ => Box::new(MaxModel::new(2)?),
    };
    let n = p.count("n")?;
    let k = p.count("k")?;
    let grid = tail_grid(2, p.real("T")?, p.count("grid")?)?;
    let root_k = (k as f64).sqrt();
    let main = per_replicate(cfg.reps, REP_HEADER, |r| {
        let mut rng = split_seed(cfg.seed, r as u64);
        let x = model.sample(n, &mut rng);
        let s = TailSample::new(&x, k)?;
        let one = [1.0, 1.0];
        let lhat = s.estimate(&one)?;
        let process = estimator_process(&s, model.as_ref(), &grid)?;
        Ok(rep_rows(
            r,
            &[
                ("lhat_at_1_1", lhat),
                ("proc_at_1_1", root_k * (lhat - model.l(&one))),
                ("sup_abs", process.abs().max()),
                ("gap", process.hull_gap(1)),
            ],
        ))
    })?;
    Ok(Outputs {
        main,
        ..Outputs::default()
    })
}

fn sim_regression(cfg: &ExperimentConfig) -> Result<Outputs> {
    let p = &cfg.params;
    let law = MixedExponential::new(p.real("theta-minus")?, p.real("theta-plus")?)?;
    let design = GaussianDesign::new(vec![p.real("x-mean")?], vec![p.real("x-sd")?])?;
    let n = p.count("n")?;
    let zmax = p.real("zmax")?;
    let zgrid = GridDomain::interval(-zmax, zmax, p.count("grid")?)?;
    let (h, reference) = (p.real("h")?, p.real("reference")?);
    let beta = [1.0];
    let one_rep = |r: usize, rng: &mut dyn RngCore| -> Result<(Vec<Vec<String>>, Vec<f64>)> {
        let (sample, _) = simulate_regression(&design, &law, &beta, n, rng)?;
        let fit = ols_fit(&sample)?;
        let b = fit.beta.as_slice();
        let process = residual_process(&sample, b, &law, &zgrid)?;
        let at_zero = residual_process_at(&sample, b, &law, &[0.0])?[0];
        let spike = spike_contrast(&sample, b, &law, 0.0, reference, h)?;
        let rows = rep_rows(
            r,
            &[
                ("beta_hat", b[0]),
                ("sup_abs", process.sup_abs()),
                ("proc_at_0", at_zero),
                ("spike_contrast", spike),
            ],
        );
        Ok((rows, process.values_with_sentinels()))
    };
    let main = per_replicate(cfg.reps, REP_HEADER, |r| {
        Ok(one_rep(r, &mut split_seed(cfg.seed, r as u64))?.0)
    })?;
    let mut extra = Vec::new();
    // The path of replicate 0, also when no replicates are summarized.
    if p.flag("trajectory")? {
        let (_, path) = one_rep(0, &mut split_seed(cfg.seed, 0))?;
        let mut t = Table::new(&["z", "value"]);
        let mut zs = vec![f64::NEG_INFINITY];
        zs.extend(zgrid.axis_coords(0));
        zs.push(f64::INFINITY);
        for (z, v) in zs.into_iter().zip(path) {
            t.push(vec![num(z), num(v)]);
        }
        extra.push(("trajectory.csv", t));
    }
    Ok(Outputs {
        main,
        extra,
        summary: None,
    })
}
