//! Solvers for convex mixed variational inequalities
//!
//! ```text
//! find x in C such that <T x, u - x> + g(u) - g(x) >= 0 for all u in C
//! ```
//!
//! The main method is a relaxed inertial proximal-and-contraction scheme
//! with two correction terms and a self-adaptive stepsize ([`solver`]).
//! [`baselines`] holds the comparison methods, [`problems`] the bundled
//! test problems and [`proxlib`] the proximal operators they need.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod numerics;
pub mod problems;
pub mod proxlib;
pub mod solver;

pub use baselines::{BaselineKind, DongParams, HeParams, KimParams, LambdaRule, MaingeParams};
pub use numerics::{RealMat, RealVec, SeededRng};
pub use problems::{make_ex1, make_ex2, make_ex3, probe_example23, MonotonicityClass, MviProblem};
pub use proxlib::ProxOperator;
pub use solver::{solve, IterRecord, Monitors, PcParams, RunResult, SolverState, StartPoint, StopRule};
