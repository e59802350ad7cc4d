use super::*;
use crate::gridfn::{MaskedGridFunction, Region};
use proptest::prelude::*;

fn unit(m: usize) -> GridDomain {
    GridDomain::interval(0.0, 1.0, m).unwrap()
}

fn step_on(m: usize, at: f64) -> GridFunction {
    GridFunction::from_fn(unit(m), |x| if x[0] >= at - 1e-12 { 1.0 } else { 0.0 }).unwrap()
}

fn window() -> HypiConfig {
    HypiConfig::new(-1.0, 2.0, 301).unwrap()
}

#[test]
fn config_validation() {
    assert!(HypiConfig::new(1.0, 1.0, 5).is_err());
    assert!(HypiConfig::new(0.0, 1.0, 1).is_err());
    assert!(HypiConfig::new(0.0, f64::NAN, 3).is_err());
    assert_eq!("dt".parse::<HausdorffBackend>().unwrap(), HausdorffBackend::DistanceTransform);
    assert!("fast".parse::<HausdorffBackend>().is_err());
}

#[test]
fn epigraph_of_zero() {
    let f = GridFunction::zeros(unit(5));
    let cfg = HypiConfig::new(-1.0, 1.0, 3).unwrap();
    let e = epigraph(&f, &cfg).unwrap();
    for i in 0..5 {
        assert!(!e.contains(&[i, 0]));
        assert!(e.contains(&[i, 1]));
        assert!(e.contains(&[i, 2]));
    }
    let h = hypograph(&f, &cfg).unwrap();
    for i in 0..5 {
        assert!(h.contains(&[i, 0]) && h.contains(&[i, 1]) && !h.contains(&[i, 2]));
    }
}

#[test]
fn epigraph_column_at_jump_uses_hull() {
    let f = step_on(101, 0.5);
    let cfg = window();
    let e = epigraph(&f, &cfg).unwrap();
    // Level index 100 is y = 0.
    assert!(e.contains(&[50, 100]));
    assert!(!e.contains(&[50, 99]));
    assert!(!e.contains(&[51, 100]) && e.contains(&[51, 200]));
    let h = hypograph(&f, &cfg).unwrap();
    assert!(h.contains(&[49, 200]) && !h.contains(&[48, 200]));
}

#[test]
fn window_violation_names_value() {
    let f = GridFunction::constant(unit(5), 2.5).unwrap();
    let e = epigraph(&f, &window()).unwrap_err();
    assert_eq!(
        e,
        Error::OutsideWindow {
            value: 2.5,
            low: -1.0,
            high: 2.0
        }
    );
}

#[test]
fn hausdorff_examples() {
    let d = GridDomain::new(vec![0.0, 0.0], vec![1.0, 1.0], vec![11, 11]).unwrap();
    let mut a = vec![false; d.len()];
    let mut b = vec![false; d.len()];
    a[d.ravel(&[1, 2])] = true;
    b[d.ravel(&[4, 1])] = true;
    let a = RasterSet::new(d.clone(), a).unwrap();
    let b = RasterSet::new(d.clone(), b).unwrap();
    for backend in [HausdorffBackend::BruteForce, HausdorffBackend::DistanceTransform] {
        assert_eq!(hausdorff_distance(&a, &a, backend).unwrap(), 0.0);
        let h = hausdorff_distance(&a, &b, backend).unwrap();
        assert!((h - 0.3).abs() < 1e-12, "{backend:?}: {h}");
    }
    let empty = RasterSet::new(d.clone(), vec![false; d.len()]).unwrap();
    assert_eq!(
        hausdorff_distance(&a, &empty, HausdorffBackend::BruteForce),
        Err(Error::EmptySet)
    );
}

#[test]
fn epigraphs_of_shifted_steps() {
    let cfg = window();
    let ef = epigraph(&step_on(101, 0.5), &cfg).unwrap();
    let eg = epigraph(&step_on(101, 0.6), &cfg).unwrap();
    let cell = 0.01;
    for backend in [HausdorffBackend::BruteForce, HausdorffBackend::DistanceTransform] {
        let h = hausdorff_distance(&ef, &eg, backend).unwrap();
        assert!((h - 0.1).abs() <= cell + 1e-12, "{backend:?}: {h}");
    }
}

#[test]
fn hypi_relocated_jump_is_close_but_sup_is_not() {
    let cfg = window();
    let f = step_on(101, 0.5);
    let g = step_on(101, 0.6);
    assert_eq!(hypi_distance(&f, &f, &cfg).unwrap(), 0.0);
    let d = hypi_distance(&f, &g, &cfg).unwrap();
    assert!((d - 0.1).abs() <= 0.01 + 1e-12, "{d}");
    assert_eq!(f.sup_distance(&g).unwrap(), 1.0);
    let brute = hypi_distance(&f, &g, &cfg.clone().with_backend(HausdorffBackend::BruteForce));
    assert!((brute.unwrap() - d).abs() < 1e-12);
}

#[test]
fn hypi_sees_isolated_spike() {
    let cfg = window();
    let mut v = vec![0.0; 101];
    v[50] = 1.0;
    let spike = GridFunction::new(unit(101), v).unwrap();
    let zero = GridFunction::zeros(unit(101));
    let epi = hausdorff_distance(
        &epigraph(&spike, &cfg).unwrap(),
        &epigraph(&zero, &cfg).unwrap(),
        cfg.backend,
    )
    .unwrap();
    assert!(epi < 1e-12, "epigraphs coincide, got {epi}");
    let d = hypi_distance(&spike, &zero, &cfg).unwrap();
    assert!((d - 1.0).abs() <= 0.01 + 1e-12, "{d}");
}

#[test]
fn hypi_rejects_mismatched_grids() {
    let cfg = window();
    assert_eq!(
        hypi_distance(&step_on(101, 0.5), &step_on(51, 0.5), &cfg),
        Err(Error::DomainMismatch)
    );
}

#[test]
fn sc_extension_full_mask_is_hull() {
    let f = GridFunction::from_fn(GridDomain::unit_cube(2, 9).unwrap(), |x| {
        (5.0 * x[0]).sin() + if x[1] > 0.4 { 1.0 } else { 0.0 }
    })
    .unwrap();
    let n = f.domain().len();
    let m = MaskedGridFunction::new(f.clone(), vec![true; n]).unwrap();
    let ext = sc_extension(&m, 1).unwrap();
    assert_eq!(ext.lower, f.lsc_hull(1));
    assert_eq!(ext.upper, f.usc_hull(1));
    assert_eq!(ext.max_radius_used(), 1);
}

fn diagonal_sign(m: usize) -> MaskedGridFunction {
    MaskedGridFunction::from_partial_fn(GridDomain::unit_cube(2, m).unwrap(), |u| {
        if (u[0] - u[1]).abs() < 1e-12 {
            None
        } else if u[0] < u[1] {
            Some(1.0)
        } else {
            Some(-1.0)
        }
    })
    .unwrap()
}

#[test]
fn sc_extension_on_diagonal_spans_both_signs() {
    let m = 21;
    let ext = sc_extension(&diagonal_sign(m), 1).unwrap();
    let d = ext.lower.domain().clone();
    for i in 0..m {
        let k = d.ravel(&[i, i]);
        assert_eq!(ext.lower.get(k), -1.0);
        assert_eq!(ext.upper.get(k), 1.0);
    }
    let far = d.ravel(&[2, 15]);
    assert_eq!((ext.lower.get(far), ext.upper.get(far)), (1.0, 1.0));
}

#[test]
fn sc_extension_sandwich_hulls_agree() {
    // A function squeezed between the two extensions has them as hulls, except
    // two cells off the diagonal where a grid neighbourhood reaches a diagonal
    // point but no point of the opposite sign.
    let m = 15;
    let masked = diagonal_sign(m);
    let ext = sc_extension(&masked, 1).unwrap();
    let d = ext.lower.domain().clone();
    let cfg = HypiConfig::new(-1.0, 1.0, 41).unwrap();
    let cell = d.cell_size();
    let mut first: Option<GridFunction> = None;
    for t in [-1.0, -0.3, 0.0, 0.8, 1.0] {
        let star = GridFunction::from_fn(d.clone(), |u| {
            if (u[0] - u[1]).abs() < 1e-12 {
                t
            } else if u[0] < u[1] {
                1.0
            } else {
                -1.0
            }
        })
        .unwrap();
        let (lo, hi) = (star.lsc_hull(1), star.usc_hull(1));
        for k in 0..d.len() {
            let idx = d.unravel(k);
            if idx[0].abs_diff(idx[1]) != 2 {
                assert_eq!(lo.get(k), ext.lower.get(k), "{idx:?}");
                assert_eq!(hi.get(k), ext.upper.get(k), "{idx:?}");
            }
        }
        let reference = first.get_or_insert_with(|| star.clone());
        assert!(hypi_distance(reference, &star, &cfg).unwrap() <= cell + 1e-12);
    }
}

#[test]
fn sc_extension_from_even_points() {
    let m = 41;
    let masked = MaskedGridFunction::from_partial_fn(unit(m), |x| {
        let i = (x[0] * (m - 1) as f64).round() as usize;
        (i % 2 == 0).then_some(x[0])
    })
    .unwrap();
    let ext = sc_extension(&masked, 1).unwrap();
    let h = 1.0 / (m - 1) as f64;
    for k in 0..m {
        let x = k as f64 * h;
        assert!((ext.lower.get(k) - x).abs() <= h + 1e-12);
        assert!((ext.upper.get(k) - x).abs() <= h + 1e-12);
    }
}

#[test]
fn sc_extension_grows_radius_where_needed() {
    let m = 11;
    let masked = MaskedGridFunction::from_partial_fn(unit(m), |x| (x[0] == 0.0).then_some(7.0))
        .unwrap();
    let ext = sc_extension(&masked, 1).unwrap();
    assert!(ext.lower.values().iter().all(|&v| v == 7.0));
    assert_eq!(ext.radius_used[0], 1);
    assert_eq!(ext.radius_used[10], 10);
    let none = MaskedGridFunction::new(GridFunction::zeros(unit(3)), vec![false; 3]).unwrap();
    assert_eq!(sc_extension(&none, 1), Err(Error::EmptyMask));
}

#[test]
fn convergence_of_constant_sequence() {
    let f = step_on(51, 0.3);
    let seq = vec![f.clone(); 6];
    let rep = check_hypi_convergence(&seq, &f, &window(), 1e-9).unwrap();
    assert!(rep.hypi_converged && rep.uniform_converged && rep.pointwise_converged);
    assert!(rep.hypi.iter().chain(&rep.sup).all(|&d| d == 0.0));
    assert_eq!(rep.tail_start, 3);
}

#[test]
fn convergence_of_relocated_jumps() {
    let m = 101;
    let f = step_on(m, 0.5);
    let seq: Vec<GridFunction> = (1..=400)
        .map(|n| step_on(m, 0.5 + 1.0 / n as f64))
        .collect();
    let cell = 0.01;
    let rep = check_hypi_convergence(&seq, &f, &window(), cell + 1e-9).unwrap();
    assert!(rep.hypi_converged);
    assert!(!rep.uniform_converged);
    assert!(rep.pointwise_converged);
    assert!(rep.sup[seq.len() - 1] == 1.0);
    // Distances shrink toward the grid resolution.
    assert!(rep.hypi[9] > rep.hypi[99]);
    assert!(rep.hypi[399] <= cell + 1e-12);
}

#[test]
fn convergence_fails_for_alternating_constants() {
    let d = unit(21);
    let f = GridFunction::constant(d.clone(), 1.0).unwrap();
    let seq: Vec<GridFunction> = (1..=20)
        .map(|n| GridFunction::constant(d.clone(), if n % 2 == 0 { 1.0 } else { -1.0 }).unwrap())
        .collect();
    let rep = check_hypi_convergence(&seq, &f, &window(), 0.1).unwrap();
    assert!(!rep.hypi_converged && !rep.uniform_converged && !rep.pointwise_converged);
    assert_eq!(check_hypi_convergence(&[], &f, &window(), 0.1).unwrap_err(), Error::EmptySequence);
}

#[test]
fn uniform_convergence_on_continuity_box() {
    // f jumps at 0.5 but is continuous on [0.6, 1].
    let m = 201;
    let f = GridFunction::from_fn(unit(m), |x| x[0] + if x[0] >= 0.5 { 1.0 } else { 0.0 }).unwrap();
    let k = GridDomain::interval(0.6, 1.0, 81).unwrap();
    let cfg = window();
    let mut last = f64::INFINITY;
    for n in [4, 8, 16, 64, 256] {
        let fnn = GridFunction::from_fn(unit(m), |x| {
            x[0] + if x[0] >= 0.5 + 1.0 / n as f64 { 1.0 } else { 0.0 }
        })
        .unwrap();
        let d = hypi_distance(&fnn, &f, &cfg).unwrap();
        assert!(d <= last + 1e-12);
        last = d;
        let on_k = fnn.restrict(&k).unwrap().sup_distance(&f.restrict(&k).unwrap()).unwrap();
        if 1.0 / (n as f64) < 0.1 {
            assert!(on_k <= 1e-12, "n = {n}: {on_k}");
        }
    }
    assert!(last <= 0.005 + 1e-12);
}

#[test]
fn extrema_follow_hypi_distance() {
    let m = 201;
    let f = GridFunction::from_fn(unit(m), |x| (3.0 * x[0]).cos() + if x[0] >= 0.5 { 0.5 } else { 0.0 })
        .unwrap();
    let region = Region::new(vec![0.1], vec![0.9]);
    let cfg = window();
    let h = 1.0 / (m - 1) as f64;
    for n in [3, 10, 30, 100] {
        let shift = 1.0 / n as f64 / 5.0;
        let fnn = GridFunction::from_fn(unit(m), |x| {
            (3.0 * x[0]).cos() + if x[0] >= 0.5 + shift { 0.5 } else { 0.0 } + 0.2 / n as f64
        })
        .unwrap();
        let d = hypi_distance(&fnn, &f, &cfg).unwrap();
        let (a, b) = fnn.extremum_over_region(&region).unwrap();
        let (c, e) = f.extremum_over_region(&region).unwrap();
        // cos(3x) is 3-Lipschitz, so a hypi move of d shifts extrema by at most 4d.
        assert!((a - c).abs() <= 4.0 * d + 3.0 * h + 1e-12);
        assert!((b - e).abs() <= 4.0 * d + 3.0 * h + 1e-12);
    }
}

#[test]
fn hull_gap_integral_vanishes_under_refinement() {
    let mut prev = f64::INFINITY;
    for m in [51, 101, 201, 401] {
        let f = step_on(m, 0.5 + 1.0 / 7.0);
        let gap = f.usc_hull(1).lp_distance(&f.lsc_hull(1), 1.0).unwrap();
        assert!((gap - 2.0 / m as f64).abs() < 1e-12);
        assert!(gap < prev);
        prev = gap;
    }
}

fn triple() -> impl Strategy<Value = (GridFunction, GridFunction, GridFunction)> {
    (1usize..=2, 3usize..8).prop_flat_map(|(dim, m)| {
        let n = m.pow(dim as u32);
        let v = || prop::collection::vec(-1.0f64..1.0, n);
        (v(), v(), v()).prop_map(move |(a, b, c)| {
            let d = GridDomain::unit_cube(dim, m).unwrap();
            (
                GridFunction::new(d.clone(), a).unwrap(),
                GridFunction::new(d.clone(), b).unwrap(),
                GridFunction::new(d, c).unwrap(),
            )
        })
    })
}

fn small_cfg(r: usize) -> HypiConfig {
    HypiConfig::new(-1.0, 1.0, 21).unwrap().with_radius(r)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn backends_agree((f, g, _) in triple(), r in 0usize..3) {
        let cfg = small_cfg(r);
        for (a, b) in [
            (epigraph(&f, &cfg).unwrap(), epigraph(&g, &cfg).unwrap()),
            (hypograph(&f, &cfg).unwrap(), hypograph(&g, &cfg).unwrap()),
        ] {
            let x = hausdorff_distance(&a, &b, HausdorffBackend::BruteForce).unwrap();
            let y = hausdorff_distance(&a, &b, HausdorffBackend::DistanceTransform).unwrap();
            prop_assert!((x - y).abs() <= 1e-12, "brute {} vs dt {}", x, y);
        }
    }

    #[test]
    fn semimetric_axioms((f, g, h) in triple(), r in 0usize..3) {
        let cfg = small_cfg(r);
        let fg = hypi_distance(&f, &g, &cfg).unwrap();
        prop_assert_eq!(fg, hypi_distance(&g, &f, &cfg).unwrap());
        let gh = hypi_distance(&g, &h, &cfg).unwrap();
        let fh = hypi_distance(&f, &h, &cfg).unwrap();
        prop_assert!(fh <= fg + gh + 1e-12);
        prop_assert_eq!(hypi_distance(&f, &f, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn hypi_dominated_by_sup((f, g, _) in triple(), r in 0usize..3) {
        let cfg = small_cfg(r);
        let cell = f.domain().cell_size().max(cfg.y_spacing());
        let d = hypi_distance(&f, &g, &cfg).unwrap();
        prop_assert!(d <= f.sup_distance(&g).unwrap() + cell + 1e-12);
    }

    #[test]
    fn epigraph_reverses_order((f, g, _) in triple()) {
        let cfg = small_cfg(1);
        let upper = f.zip_with(&g, f64::max).unwrap();
        prop_assert!(epigraph(&upper, &cfg).unwrap().is_subset_of(&epigraph(&f, &cfg).unwrap()));
        prop_assert!(hypograph(&f, &cfg).unwrap().is_subset_of(&hypograph(&upper, &cfg).unwrap()));
    }
}
