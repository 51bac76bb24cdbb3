use mvi_core::baselines::BaselineKind;
use mvi_core::numerics::{RealVec, SeededRng};
use mvi_core::problems::{make_ex2, make_ex3, MviProblem};
use mvi_core::solver::{
    assess_params, inertial_correction_point, solve, step_with, Monitors, PcParams, RunResult, RunStatus, SolverState,
    StartPoint, StopRule,
};
use proptest::prelude::*;

fn random_start(dim: usize, seed: u64) -> StartPoint {
    let mut rng = SeededRng::new(seed);
    let x0 = rng.uniform_vec(dim, -5.0, 5.0);
    let xp = rng.uniform_vec(dim, -5.0, 5.0);
    let wp = rng.uniform_vec(dim, -5.0, 5.0);
    StartPoint::new(x0, xp, wp)
}

fn run(prob: &MviProblem, seed: u64) -> (PcParams, RunResult) {
    let p = PcParams::experiment_defaults(prob.reference_stepsize()).unwrap();
    let r = solve(prob, &p, &random_start(prob.dim(), seed), &StopRule::default(), Monitors::all()).unwrap();
    (p, r)
}

fn check_run(prob: &MviProblem, p: &PcParams, r: &RunResult) -> Result<(), TestCaseError> {
    prop_assert!(r.converged());
    prop_assert!(r.final_dist().unwrap() <= 1e-4);
    let floor = p.lambda0().min(p.mu() / prob.lipschitz().unwrap());
    for (k, rec) in r.trace.iter().enumerate() {
        prop_assert!(rec.fejer_slack.unwrap() >= -1e-9, "iter {k}: {:?}", rec.fejer_slack);
        prop_assert!(rec.residual_bound_slack.unwrap() >= -1e-9, "iter {k}: {:?}", rec.residual_bound_slack);
        prop_assert!(rec.psi.unwrap() >= -1e-9);
        prop_assert!(rec.lambda >= floor - 1e-15);
    }
    for w in r.trace.windows(2) {
        prop_assert!(w[1].lambda <= w[0].lambda);
        prop_assert!(w[1].psi.unwrap() <= w[0].psi.unwrap() + 1e-9);
    }
    if r.status == RunStatus::Converged {
        let bound = 10.0 * 1e-6 * (1.0 / (p.theta() * p.gamma())) * (1.0 + p.mu()) / (1.0 - p.mu());
        prop_assert!(r.trace.last().unwrap().res_wy <= bound);
    }
    if r.status == RunStatus::Certified {
        prop_assert!(prob.fixed_point_residual(&r.x, 1.0).unwrap() <= 1e-8);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ex2_runs_satisfy_every_monitor(seed in any::<u64>()) {
        let ex2 = make_ex2();
        let (p, r) = run(&ex2, seed);
        check_run(&ex2, &p, &r)?;
    }

    #[test]
    fn ex3_runs_satisfy_every_monitor(seed in any::<u64>(), n in 1usize..30) {
        let ex3 = make_ex3(n, seed).unwrap();
        let (p, r) = run(&ex3, seed ^ 0x5eed);
        check_run(&ex3, &p, &r)?;
    }

    #[test]
    fn constructor_agrees_with_report(
        alpha in 0.0..1.0f64,
        delta in 0.0..1.0f64,
        theta in 0.01..0.99f64,
        gamma in 0.01..1.99f64,
        sigma in 0.01..10.0f64,
    ) {
        let report = assess_params(alpha, delta, theta, gamma, sigma);
        let built = PcParams::new(alpha, delta, theta, gamma, 0.5, 1.0, sigma);
        prop_assert_eq!(report.passed(), built.is_ok());
        if let Ok(p) = built {
            prop_assert!((p.xi() - report.xi).abs() == 0.0);
        }
    }

    #[test]
    fn inertial_point_is_affine_in_the_history(
        xs in prop::collection::vec(-10.0..10.0f64, 8),
        t in -3.0..3.0f64,
    ) {
        let p = PcParams::experiment_defaults(1.0).unwrap();
        let v = |i: usize| RealVec::from_column_slice(&xs[2 * i..2 * i + 2]);
        let s = SolverState { n: 0, x: v(0), x_prev: v(1), w_prev: v(2), w_prev2: v(3), lambda: 1.0 };
        let shifted = SolverState {
            x: &s.x + RealVec::from_element(2, t),
            x_prev: &s.x_prev + RealVec::from_element(2, t),
            w_prev: &s.w_prev + RealVec::from_element(2, t),
            w_prev2: &s.w_prev2 + RealVec::from_element(2, t),
            ..s.clone()
        };
        // Coefficients sum to one, so a common shift passes through.
        let diff = inertial_correction_point(&shifted, &p) - inertial_correction_point(&s, &p);
        prop_assert!((diff - RealVec::from_element(2, t)).amax() <= 1e-12);
    }
}

#[test]
fn monitors_are_absent_without_a_known_solution() {
    let ex1 = mvi_core::problems::make_ex1();
    let p = PcParams::experiment_defaults(1.0).unwrap();
    let state = SolverState::new(&random_start(3, 1), 1.0);
    let (_, rec) = step_with(&state, &p, &ex1, Monitors::all()).unwrap();
    assert!(rec.psi.is_none() && rec.fejer_slack.is_none() && rec.dist_sol.is_none());
}

#[test]
fn ex1_residual_vanishes() {
    let ex1 = mvi_core::problems::make_ex1();
    let p = PcParams::experiment_defaults(1.0).unwrap();
    for seed in 0..10 {
        let r = solve(&ex1, &p, &random_start(3, seed), &StopRule::default(), Monitors::none()).unwrap();
        assert!(r.converged());
        assert!(ex1.fixed_point_residual(&r.x, 1.0).unwrap() <= 1e-4);
    }
}

#[test]
fn all_methods_share_the_trace_layout() {
    let ex3 = make_ex3(20, 7).unwrap();
    let start = random_start(20, 7);
    let p = PcParams::experiment_defaults(ex3.reference_stepsize()).unwrap();
    let mut runs = vec![solve(&ex3, &p, &start, &StopRule::default(), Monitors::none()).unwrap()];
    for tag in BaselineKind::TAGS {
        runs.push(BaselineKind::from_tag(tag, &ex3).unwrap().run(&ex3, &start, &StopRule::default()).unwrap());
    }
    for r in &runs {
        assert!(r.converged(), "{}", r.method);
        assert!(r.trace.iter().enumerate().all(|(k, rec)| rec.n == k));
        assert!(r.trace.iter().all(|rec| rec.dist_sol.is_some()));
        assert!(r.trace.windows(2).all(|w| w[1].elapsed_ns >= w[0].elapsed_ns));
    }
}
