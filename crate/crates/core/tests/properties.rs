use std::f64::consts::PI;

use approx::assert_relative_eq;
use proptest::prelude::*;

use bertrand_flow::bertrand::{classify, GridSpec, Tolerances};
use bertrand_flow::dynamics::{
    angle_difference, integrate, integrate_slowfast, GuidingState, Method, PhaseState,
};
use bertrand_flow::reduction::{apsidal_angle, apsidal_limit, limit_period, effective_potential, h4_coefficient, turning_points, ReducedParams};
use bertrand_flow::surface::{
    bertrand_chart, builtin, curvature_report, homogeneity_defect, scalar_curvature_a, scalar_curvature_r,
    to_action_chart, ActionChart, ChartDefinition, Interval, RadialProfile, BUILTIN_NAMES, DEFAULT_GRID,
};

fn builtin_chart() -> impl Strategy<Value = ActionChart> {
    prop::sample::select(BUILTIN_NAMES.to_vec()).prop_map(|name| builtin(name).unwrap())
}

/// Constant-curvature charts on a window where `R` stays well above zero.
fn constant_curvature_chart() -> impl Strategy<Value = ActionChart> {
    (-2.0..2.0f64, 0.5..2.0f64, -0.5..0.5f64, 0.5..4.0f64).prop_map(|(scal, l1, l2, lsq)| {
        bertrand_chart(scal, l1, l2, lsq, Interval::new(-0.3, 0.3).unwrap()).unwrap()
    })
}

/// Constant-curvature charts wide enough for the default classification grid.
fn wide_constant_curvature_chart() -> impl Strategy<Value = ActionChart> {
    (-1.0..1.0f64, 1.5..2.0f64, -0.3..0.3f64, 1.0..4.0f64).prop_map(|(scal, l1, l2, lsq)| {
        bertrand_chart(scal, l1, l2, lsq, Interval::new(-1.0, 1.0).unwrap()).unwrap()
    })
}

fn exp_chart(rate: f64) -> ActionChart {
    let json = format!(r#"{{"family": "exp", "params": {{"lambda_sq": 1.0, "rate": {rate}}}}}"#);
    ChartDefinition::from_json(&json).unwrap().build().unwrap()
}

/// Point at fraction `t` of the way across the chart, kept off the ends.
fn inside(chart: &ActionChart, t: f64) -> f64 {
    let iv = chart.interval();
    iv.lo + (0.1 + 0.8 * t) * iv.width()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn jets_agree_with_finite_differences(chart in builtin_chart(), t in 0.0..1.0f64) {
        let a = inside(&chart, t);
        let step = 1e-5;
        let (r_lo, f_lo) = chart.jets(a - step).unwrap();
        let (r_hi, f_hi) = chart.jets(a + step).unwrap();
        let (r, f) = chart.jets(a).unwrap();
        for (lo, hi, mid) in [(r_lo, r_hi, r), (f_lo, f_hi, f)] {
            let pairs = [
                ((hi.value() - lo.value()) / (2.0 * step), mid.d1()),
                ((hi.d1() - lo.d1()) / (2.0 * step), mid.d2()),
                ((hi.d2() - lo.d2()) / (2.0 * step), mid.d3()),
            ];
            for (fd, exact) in pairs {
                prop_assert!((fd - exact).abs() <= 1e-5 * exact.abs().max(1.0), "{fd} vs {exact} at a = {a}");
            }
        }
    }

    #[test]
    fn profile_and_action_curvature_agree(lambda in 0.3..3.0f64, t in 0.0..1.0f64, sphere in any::<bool>()) {
        let profile = if sphere {
            RadialProfile::sphere(Interval::new(0.3, PI - 0.3).unwrap(), lambda).unwrap()
        } else {
            RadialProfile::hyperbolic(Interval::new(-1.2, 1.2).unwrap(), lambda).unwrap()
        };
        let chart = to_action_chart(&profile, DEFAULT_GRID).unwrap();
        let iv = profile.interval();
        let r = iv.lo + (0.05 + 0.9 * t) * iv.width();
        let a = profile.action(r).unwrap();
        let from_profile = scalar_curvature_r(&profile, r).unwrap();
        let from_chart = scalar_curvature_a(&chart, a).unwrap().scal;
        prop_assert!((from_profile - from_chart).abs() < 1e-8, "{from_profile} vs {from_chart}");
    }

    #[test]
    fn latitude_round_trip(lambda in 0.3..3.0f64, t in 0.0..1.0f64) {
        let profile = RadialProfile::sphere(Interval::new(0.3, PI - 0.3).unwrap(), lambda).unwrap();
        let chart = to_action_chart(&profile, DEFAULT_GRID).unwrap();
        let iv = profile.interval();
        let r = iv.lo + (0.01 + 0.98 * t) * iv.width();
        let back = chart.latitude(profile.action(r).unwrap()).unwrap();
        prop_assert!((back - r).abs() < 1e-10, "{r} -> {back}");
    }

    #[test]
    fn constant_curvature_charts_are_homogeneous(chart in constant_curvature_chart()) {
        let params = chart.bertrand_params().unwrap();
        let defect = homogeneity_defect(&chart, DEFAULT_GRID).unwrap();
        prop_assert!(defect.defect < 1e-12 * params.lambda_sq, "{defect:?}");
        let report = curvature_report(&chart, DEFAULT_GRID, 1e-10).unwrap();
        prop_assert!(report.max_deviation < 1e-10, "{}", report.max_deviation);
        prop_assert!((report.mean - params.scal).abs() < 1e-10);
    }

    #[test]
    fn guiding_round_trip(
        a in -0.5..0.5f64,
        phi in 0.0..(2.0 * PI),
        p_a in -0.3..0.3f64,
        p_phi in -0.3..0.3f64,
        eps in 0.01..1.0f64,
    ) {
        let state = PhaseState::new(a, phi, p_a, p_phi);
        let back = GuidingState::from_phase(&state, eps).unwrap().to_phase();
        let ulps = 8.0 * f64::EPSILON;
        prop_assert!((back.a - a).abs() <= ulps * (a.abs() + p_phi.abs()).max(1.0));
        prop_assert!(angle_difference(back.phi, state.phi).abs() <= ulps * 2.0 * PI);
        prop_assert!((back.p_a - p_a).abs() <= ulps * p_a.abs());
        prop_assert!((back.p_phi - p_phi).abs() <= ulps * p_phi.abs());
    }

    #[test]
    fn energy_and_momentum_are_conserved(chart in builtin_chart(), theta in 0.0..(2.0 * PI), eps in 0.02..0.15f64) {
        let g0 = GuidingState::from_direction(&chart, chart.interval().midpoint(), 0.0, theta, eps).unwrap();
        let traj = integrate(&chart, &g0.to_phase(), 2.0, 1e-3, Method::ImplicitMidpoint).unwrap();
        prop_assert!(traj.h_drift() < 1e-8, "H drift {}", traj.h_drift());
        prop_assert!(traj.k_drift() < 1e-10, "K drift {}", traj.k_drift());
        let slow = integrate_slowfast(&chart, &g0, 2.0, 1e-3, Method::ImplicitMidpoint).unwrap();
        prop_assert_eq!(slow.a_hat_drift(), 0.0);
    }

    #[test]
    fn apsidal_angle_tends_to_its_limit(chart in builtin_chart(), ehat in 0.1..0.9f64, t in 0.3..0.7f64) {
        let kappa = inside(&chart, t);
        let angle = apsidal_angle(&chart, &ReducedParams::new(0.0, ehat, kappa).unwrap()).unwrap();
        let limit = apsidal_limit(&chart, ehat, kappa).unwrap();
        prop_assert!((angle - limit).abs() < 1e-8, "{angle} vs {limit}");
    }

    #[test]
    fn turning_points_bound_the_energy(chart in builtin_chart(), eps in 0.0..0.1f64, ehat in 0.1..0.9f64, t in 0.3..0.7f64) {
        let kappa = inside(&chart, t);
        let tp = turning_points(&chart, &ReducedParams::new(eps, ehat, kappa).unwrap()).unwrap();
        prop_assert!(tp.root_minus < 0.0 && tp.root_plus > 0.0);
        for u in [tp.root_minus, tp.root_plus] {
            let v = effective_potential(&chart, eps, kappa, u).unwrap();
            prop_assert!((v - ehat).abs() < 1e-12, "V({u}) = {v}");
        }
        if eps == 0.0 {
            prop_assert!((tp.root_minus + tp.root_plus).abs() < 1e-14);
        }
    }

    #[test]
    fn turning_points_mirror_on_even_charts(
        name in prop::sample::select(vec!["flat", "sphere", "hyperbolic"]),
        eps in 0.0..0.1f64,
        ehat in 0.1..0.9f64,
        kappa in 0.0..0.4f64,
    ) {
        // with R and F even, kappa -> -kappa maps u -> -u
        let chart = builtin(name).unwrap();
        let tp = turning_points(&chart, &ReducedParams::new(eps, ehat, kappa).unwrap()).unwrap();
        let mirrored = turning_points(&chart, &ReducedParams::new(eps, ehat, -kappa).unwrap()).unwrap();
        prop_assert!((tp.root_minus + mirrored.root_plus).abs() < 1e-12);
        prop_assert!((tp.root_plus + mirrored.root_minus).abs() < 1e-12);
        prop_assert!((tp.a_minus + mirrored.a_plus).abs() < 1e-12);
    }

    #[test]
    fn h4_vanishes_exactly_on_constant_curvature(chart in constant_curvature_chart(), t in 0.0..1.0f64) {
        let c = inside(&chart, t);
        prop_assert!(h4_coefficient(&chart, c).unwrap().value.abs() < 1e-10);
        prop_assert!(curvature_report(&chart, DEFAULT_GRID, 1e-10).unwrap().is_constant);
    }

    #[test]
    fn h4_nonzero_off_constant_curvature(rate in 0.2..2.0f64, t in 0.0..1.0f64) {
        let chart = exp_chart(rate);
        let c = inside(&chart, t);
        let h4 = h4_coefficient(&chart, c).unwrap().value;
        // F = e^{rate a} gives h4 = rate³ e^{3 rate c}
        assert_relative_eq!(h4, rate.powi(3) * (3.0 * rate * c).exp(), max_relative = 1e-12);
        prop_assert!(!curvature_report(&chart, DEFAULT_GRID, 1e-6).unwrap().is_constant);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn slowfast_flow_matches_original(chart in builtin_chart(), theta in 0.0..(2.0 * PI)) {
        let g0 = GuidingState::from_direction(&chart, chart.interval().midpoint(), 0.0, theta, 0.1).unwrap();
        let original = integrate(&chart, &g0.to_phase(), 10.0, 2.5e-4, Method::ImplicitMidpoint).unwrap();
        let slow = integrate_slowfast(&chart, &g0, 10.0, 2.5e-4, Method::ImplicitMidpoint).unwrap();
        let mut worst = 0.0f64;
        for (x, g) in original.states().iter().zip(slow.states()).step_by(400) {
            worst = worst.max(x.distance(&g.to_phase()));
        }
        prop_assert!(worst < 1e-6, "max distance {worst}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn limit_system_returns_after_one_oscillator_period(chart in builtin_chart(), theta in 0.0..(2.0 * PI), t in 0.2..0.8f64) {
        let a_hat = inside(&chart, t);
        let g0 = GuidingState::from_direction(&chart, a_hat, 0.0, theta, 0.0).unwrap();
        let period = limit_period(&chart, a_hat).unwrap();
        let traj = integrate_slowfast(&chart, &g0, period, 1e-3, Method::ImplicitMidpoint).unwrap();
        let end = traj.states().last().unwrap();
        // the midpoint rule lags by about period·dt²/12 in phase
        let scale = g0.pa_hat.abs().max(g0.pphi_hat.abs());
        prop_assert!((end.pa_hat - g0.pa_hat).abs() < 1e-5 * scale);
        prop_assert!((end.pphi_hat - g0.pphi_hat).abs() < 1e-5 * scale);
        prop_assert_eq!(end.a_hat, g0.a_hat);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3))]

    #[test]
    fn verdict_is_stable_under_grid_doubling(chart in wide_constant_curvature_chart(), rate in 0.5..1.0f64) {
        let grid = GridSpec::default();
        for chart in [chart, exp_chart(rate)] {
            let tol = Tolerances::for_chart(&chart);
            let coarse = classify(&chart, &tol, &grid).unwrap();
            let fine = classify(&chart, &tol, &grid.doubled()).unwrap();
            prop_assert_eq!(coarse.verdict, fine.verdict);
        }
    }
}
