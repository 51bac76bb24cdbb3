//! Fixtures shared by the Criterion benchmarks.

use mvi_core::numerics::SeededRng;
use mvi_core::problems::{make_ex2, make_ex3, MviProblem};
use mvi_core::solver::{PcParams, StartPoint};

/// Problem, default parameters and a seeded start in `[-5, 5]^n`.
pub struct Fixture {
    pub problem: MviProblem,
    pub params: PcParams,
    pub start: StartPoint,
}

fn start(dim: usize, seed: u64) -> StartPoint {
    let mut rng = SeededRng::with_stream(seed, 1);
    let x0 = rng.uniform_vec(dim, -5.0, 5.0);
    let x_prev = rng.uniform_vec(dim, -5.0, 5.0);
    let w_prev = rng.uniform_vec(dim, -5.0, 5.0);
    StartPoint::new(x0, x_prev, w_prev)
}

pub fn ex2_fixture(seed: u64) -> Fixture {
    let problem = make_ex2();
    let params = PcParams::experiment_defaults(problem.reference_stepsize()).expect("defaults are valid");
    Fixture { params, start: start(2, seed), problem }
}

pub fn ex3_fixture(n: usize, seed: u64) -> Fixture {
    let problem = make_ex3(n, seed).expect("ex3 instance");
    let params = PcParams::experiment_defaults(problem.reference_stepsize()).expect("defaults are valid");
    Fixture { params, start: start(n, seed), problem }
}
