use entire_core::ko::{inverse_h, transform_h};
use entire_core::problem::potential::{potential, potential_infinity};
use entire_core::region::{explore, ExploreOptions, Resolution, Sequential};
use entire_core::solver::{monotone_iterate, ClassifyOutcome};
use entire_core::*;
use proptest::prelude::*;

fn power_spec() -> ProblemSpec {
    ProblemSpec::new(
        3,
        Weight::exponential(1.0, 1.0),
        Weight::exponential(1.0, 1.0),
        NonlinearPair::power(1.0, 2.0, 2.0, 1.0, 2.0, 2.0),
    )
    .unwrap()
}

fn coarse(r_max: f64, h: f64) -> SolverConfig {
    SolverConfig {
        r_max,
        spacing: h,
        ..SolverConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn picard_iterates_are_monotone_and_reproducible(alpha in 0.05f64..1.5, beta in 0.05f64..1.5) {
        let spec = power_spec();
        let cfg = coarse(8.0, 0.05);
        let grid = RadialGrid::uniform(cfg.r_max, cfg.spacing).unwrap();
        let a = monotone_iterate(&spec, alpha, beta, &grid, &cfg).unwrap();
        let b = monotone_iterate(&spec, alpha, beta, &grid, &cfg).unwrap();
        prop_assert_eq!(a.monotonicity_violations, 0);
        prop_assert_eq!(a.u[0], alpha);
        prop_assert_eq!(a.v[0], beta);
        prop_assert!(a.u.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(a.v.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(a.u.iter().chain(&a.v).all(|&x| x > 0.0));
        prop_assert_eq!(&a.u, &b.u);
        prop_assert_eq!(&a.v, &b.v);
    }

    #[test]
    fn blowup_is_inherited_by_larger_data(
        alpha in 0.3f64..2.0,
        beta in 0.3f64..2.0,
        da in 0.0f64..0.5,
        db in 0.0f64..0.5,
    ) {
        let solver = Solver::new(&power_spec(), &coarse(20.0, 0.05)).unwrap();
        let low = solver.classify(alpha, beta).unwrap();
        let high = solver.classify(alpha + da, beta + db).unwrap();
        if low.is_blowup() {
            prop_assert!(!high.is_entire(), "{low} then {high}");
        }
        if high.is_entire() {
            prop_assert!(!low.is_blowup(), "{low} then {high}");
        }
    }

    #[test]
    fn potential_is_nondecreasing_and_bounded_by_its_limit(
        c in 0.1f64..5.0,
        rate in 0.3f64..3.0,
        r1 in 0.0f64..20.0,
        dr in 0.0f64..20.0,
    ) {
        let w = Weight::exponential(c, rate);
        let p1 = potential(&w, r1, 3).unwrap().value;
        let p2 = potential(&w, r1 + dr, 3).unwrap().value;
        let inf = potential_infinity(&w, 3).unwrap().value().unwrap();
        prop_assert!(p2 >= p1 - 1e-12 * inf);
        prop_assert!(p2 <= inf * (1.0 + 1e-9));
        // Closed form of the limit: c / rate^2 for n = 3.
        prop_assert!((inf - c / (rate * rate)).abs() <= 1e-8 * inf);
    }

    #[test]
    fn transform_inverse_round_trips(s in 0.1f64..10.0) {
        let nl = power_spec().nonlin;
        let y = transform_h(&nl, s).unwrap().value().unwrap();
        // Diagonal sum 2 t^4, so H(s) = 1 / (6 s^3).
        prop_assert!((y - 1.0 / (6.0 * s * s * s)).abs() <= 1e-8 * y);
        let back = inverse_h(&nl, y, 1e-12).unwrap();
        prop_assert!((back - s).abs() <= 1e-8 * s);
    }
}

#[test]
fn symmetric_problem_gives_symmetric_raster() {
    let bounds = RegionBox::new(0.2, 2.0, 0.2, 2.0).unwrap();
    let opts = ExploreOptions {
        rays: 0,
        ..ExploreOptions::default()
    };
    let map = explore(
        &power_spec(),
        bounds,
        Resolution::new(7, 7).unwrap(),
        bounds.default_delta(),
        &coarse(20.0, 0.05),
        &opts,
        &Sequential,
    )
    .unwrap();
    assert!(map.is_diagonally_symmetric());
    assert!(map.count("entire") > 0 && map.count("blowup") > 0);
    let closure = entire_core::region::check_downward_closure(&map, 2000, 7);
    assert!(closure.violations.is_empty(), "{:?}", closure.violations);
}

#[test]
fn swapping_the_problem_swaps_the_outcome() {
    let spec = ProblemSpec::new(
        3,
        Weight::exponential(1.0, 1.0),
        Weight::exponential(2.0, 1.0),
        NonlinearPair::power(1.0, 2.0, 1.0, 1.0, 1.0, 3.0),
    )
    .unwrap();
    let cfg = coarse(20.0, 0.05);
    let a = Solver::new(&spec, &cfg).unwrap();
    let b = Solver::new(&spec.swapped(), &cfg).unwrap();
    for (alpha, beta) in [(0.3, 0.6), (1.0, 0.4), (2.0, 2.0)] {
        let x = a.classify(alpha, beta).unwrap();
        let y = b.classify(beta, alpha).unwrap();
        assert_eq!(x.tag(), y.tag(), "({alpha}, {beta})");
        if let (ClassifyOutcome::FiniteBlowUp { radius: r1, .. }, ClassifyOutcome::FiniteBlowUp { radius: r2, .. }) =
            (x, y)
        {
            assert!((r1 - r2).abs() < 1e-9);
        }
    }
}
