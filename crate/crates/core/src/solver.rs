//! Relaxed inertial proximal-and-contraction method with two correction
//! terms and a self-adaptive stepsize.
//!
//! One iteration, given `x_n, x_{n-1}, w_{n-1}, w_{n-2}` and `lambda_n`:
//!
//! ```text
//! w_n  = x_n + a (x_n - x_{n-1}) + d (1 + a)(w_{n-1} - x_n) - a d (w_{n-2} - x_{n-1})
//! y_n  = prox_{lambda_n g}(w_n - lambda_n T w_n)
//! d_n  = (w_n - y_n) - lambda_n (T w_n - T y_n)
//! tau  = <w_n - y_n, d_n> / ||d_n||^2      (0 when d_n = 0)
//! z_n  = w_n - gamma tau d_n
//! lambda_{n+1} = min(mu ||w_n - y_n|| / ||T w_n - T y_n||, lambda_n)   (lambda_n when T w_n = T y_n)
//! x_{n+1} = (1 - theta) w_n + theta z_n
//! ```
//!
//! with `a = alpha`, `d = delta`. The loop stops once
//! `TOL_n = ||x_{n+1} - x_n||` falls below the threshold, or as soon as
//! `d_n = 0`, in which case `x_{n+1} = w_n = y_n` is an exact solution.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use thiserror::Error;

use crate::numerics::RealVec;
use crate::problems::MviProblem;
use crate::proxlib::ProxError;

/// `||d||^2` below this counts as `d = 0`.
pub const ZERO_DIRECTION_SQ: f64 = 1e-28;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("alpha = {0} must lie in [0, 1)")]
    AlphaRange(f64),
    #[error("alpha = {alpha} violates alpha < sigma / (1 + sigma) = {cap}")]
    AlphaInertiaBound { alpha: f64, cap: f64 },
    #[error("delta = {0} must lie in (0, 1)")]
    DeltaRange(f64),
    #[error("delta = {delta} violates delta > alpha (1 + sigma) / (1 + alpha sigma) = {bound}")]
    DeltaFirstBound { delta: f64, bound: f64 },
    #[error("delta = {delta} violates the quadratic lower bound {bound}")]
    DeltaSecondBound { delta: f64, bound: f64 },
    #[error("theta = {0} must lie in (0, 1)")]
    ThetaRange(f64),
    #[error("gamma = {0} must lie in (0, 2)")]
    GammaRange(f64),
    #[error("mu = {0} must lie in (0, 1)")]
    MuRange(f64),
    #[error("lambda0 = {0} must be positive")]
    Lambda0(f64),
    #[error("sigma = {0} must be positive")]
    Sigma(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    Prox(#[from] ProxError),
    #[error("{what} has length {got}, problem dimension is {dim}")]
    DimensionMismatch { what: &'static str, got: usize, dim: usize },
    #[error("stopping threshold must be positive, got {0}")]
    InvalidEpsilon(f64),
    #[error("invalid method parameter: {0}")]
    InvalidParameter(String),
}

/// `xi = (1/theta) ((2 - gamma)/gamma + 1 - theta)`.
pub fn xi(theta: f64, gamma: f64) -> f64 {
    (1.0 / theta) * ((2.0 - gamma) / gamma + 1.0 - theta)
}

/// `alpha (1 + sigma) / (1 + alpha sigma)`.
pub fn delta_bound_first(alpha: f64, sigma: f64) -> f64 {
    alpha * (1.0 + sigma) / (1.0 + alpha * sigma)
}

/// Quadratic lower bound on `delta`:
/// `[a(1+a) + 2 a xi + 1 - sqrt(a^4 + 2a^3 + 3a^2 + 4 a xi + 2a + 1)] / (2 a xi)`.
/// `None` when `alpha = 0`, where the condition is vacuous.
pub fn delta_bound_second(alpha: f64, xi: f64) -> Option<f64> {
    if alpha == 0.0 {
        return None;
    }
    let a = alpha;
    let radicand = a.powi(4) + 2.0 * a.powi(3) + 3.0 * a * a + 4.0 * a * xi + 2.0 * a + 1.0;
    Some((a * (1.0 + a) + 2.0 * a * xi + 1.0 - radicand.sqrt()) / (2.0 * a * xi))
}

/// Same bound with the radicand written as the discriminant
/// `(a(1+a) + 2 a xi + 1)^2 - 4 a xi (a (1 + a + xi))`.
pub fn delta_bound_second_discriminant(alpha: f64, xi: f64) -> Option<f64> {
    if alpha == 0.0 {
        return None;
    }
    let a = alpha;
    let lead = a * (1.0 + a) + 2.0 * a * xi + 1.0;
    let disc = lead * lead - 4.0 * a * xi * (a * (1.0 + a + xi));
    Some((lead - disc.sqrt()) / (2.0 * a * xi))
}

/// One named condition of the parameter check.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamCheck {
    pub name: &'static str,
    pub passed: bool,
}

/// Everything the parameter conditions depend on, for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamReport {
    pub xi: f64,
    pub alpha_cap: f64,
    pub delta_bound_first: f64,
    pub delta_bound_second: Option<f64>,
    pub checks: Vec<ParamCheck>,
}

impl ParamReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Evaluates every condition on `(alpha, delta, theta, gamma, sigma)`
/// without stopping at the first failure.
pub fn assess_params(alpha: f64, delta: f64, theta: f64, gamma: f64, sigma: f64) -> ParamReport {
    let xi = xi(theta, gamma);
    let alpha_cap = sigma / (1.0 + sigma);
    let first = delta_bound_first(alpha, sigma);
    let second = delta_bound_second(alpha, xi);
    let checks = vec![
        ParamCheck { name: "theta in (0,1)", passed: theta > 0.0 && theta < 1.0 },
        ParamCheck { name: "gamma in (0,2)", passed: gamma > 0.0 && gamma < 2.0 },
        ParamCheck { name: "sigma > 0", passed: sigma > 0.0 && sigma.is_finite() },
        ParamCheck { name: "alpha in [0,1)", passed: (0.0..1.0).contains(&alpha) },
        ParamCheck { name: "delta in (0,1)", passed: delta > 0.0 && delta < 1.0 },
        ParamCheck { name: "alpha < sigma/(1+sigma)", passed: alpha < alpha_cap },
        ParamCheck { name: "delta > alpha(1+sigma)/(1+alpha sigma)", passed: delta > first },
        ParamCheck { name: "delta > quadratic bound", passed: second.is_none_or(|b| delta > b) },
    ];
    ParamReport { xi, alpha_cap, delta_bound_first: first, delta_bound_second: second, checks }
}

/// Validated parameters of the method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcParams {
    alpha: f64,
    delta: f64,
    theta: f64,
    gamma: f64,
    mu: f64,
    lambda0: f64,
    sigma: f64,
    xi: f64,
}

impl PcParams {
    pub fn new(
        alpha: f64,
        delta: f64,
        theta: f64,
        gamma: f64,
        mu: f64,
        lambda0: f64,
        sigma: f64,
    ) -> Result<Self, ParamError> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(ParamError::ThetaRange(theta));
        }
        if !(gamma > 0.0 && gamma < 2.0) {
            return Err(ParamError::GammaRange(gamma));
        }
        if !(mu > 0.0 && mu < 1.0) {
            return Err(ParamError::MuRange(mu));
        }
        if !(lambda0 > 0.0 && lambda0.is_finite()) {
            return Err(ParamError::Lambda0(lambda0));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(ParamError::Sigma(sigma));
        }
        if !(0.0..1.0).contains(&alpha) {
            return Err(ParamError::AlphaRange(alpha));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(ParamError::DeltaRange(delta));
        }
        let report = assess_params(alpha, delta, theta, gamma, sigma);
        if !(alpha < report.alpha_cap) {
            return Err(ParamError::AlphaInertiaBound { alpha, cap: report.alpha_cap });
        }
        if !(delta > report.delta_bound_first) {
            return Err(ParamError::DeltaFirstBound { delta, bound: report.delta_bound_first });
        }
        if let Some(bound) = report.delta_bound_second {
            if !(delta > bound) {
                return Err(ParamError::DeltaSecondBound { delta, bound });
            }
        }
        Ok(Self { alpha, delta, theta, gamma, mu, lambda0, sigma, xi: report.xi })
    }

    /// `alpha = 0.5, delta = 0.9, theta = 0.4, gamma = 1.5, sigma = 1.5, mu = 0.5`.
    pub fn experiment_defaults(lambda0: f64) -> Result<Self, ParamError> {
        Self::new(0.5, 0.9, 0.4, 1.5, 0.5, lambda0, 1.5)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// Copy with a different initial stepsize.
    pub fn with_lambda0(self, lambda0: f64) -> Result<Self, ParamError> {
        Self::new(self.alpha, self.delta, self.theta, self.gamma, self.mu, lambda0, self.sigma)
    }
}

/// Same as [`PcParams::new`].
pub fn validate_params(
    alpha: f64,
    delta: f64,
    theta: f64,
    gamma: f64,
    mu: f64,
    lambda0: f64,
    sigma: f64,
) -> Result<PcParams, ParamError> {
    PcParams::new(alpha, delta, theta, gamma, mu, lambda0, sigma)
}

/// Initial points `x_0`, `x_{-1}` and `w_{-1}` (`w_{-2}` is set to `w_{-1}`).
#[derive(Debug, Clone, PartialEq)]
pub struct StartPoint {
    pub x0: RealVec,
    pub x_prev: RealVec,
    pub w_prev: RealVec,
}

impl StartPoint {
    pub fn new(x0: RealVec, x_prev: RealVec, w_prev: RealVec) -> Self {
        Self { x0, x_prev, w_prev }
    }

    /// `x_{-1} = w_{-1} = w_{-2} = x_0`.
    pub fn from_x0(x0: RealVec) -> Self {
        Self { x_prev: x0.clone(), w_prev: x0.clone(), x0 }
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<(), SolveError> {
        for (what, v) in [("x0", &self.x0), ("x_prev", &self.x_prev), ("w_prev", &self.w_prev)] {
            if v.len() != dim {
                return Err(SolveError::DimensionMismatch { what, got: v.len(), dim });
            }
        }
        Ok(())
    }
}

/// `TOL_n < epsilon` or `max_iter` iterations, whichever comes first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    pub epsilon: f64,
    pub max_iter: usize,
}

impl Default for StopRule {
    fn default() -> Self {
        Self { epsilon: 1e-6, max_iter: 10_000 }
    }
}

impl StopRule {
    pub fn new(epsilon: f64, max_iter: usize) -> Self {
        Self { epsilon, max_iter }
    }
}

/// Optional per-iteration diagnostics. Both need a known solution.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Monitors {
    /// Slack of the Fejer-type inequality and of the `||w - y||` bound.
    pub lemma_checks: bool,
    /// The Lyapunov sequence `Psi_n`.
    pub lyapunov: bool,
}

impl Monitors {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn all() -> Self {
        Self { lemma_checks: true, lyapunov: true }
    }
}

/// Rolling state of the method.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub n: usize,
    pub x: RealVec,
    pub x_prev: RealVec,
    pub w_prev: RealVec,
    pub w_prev2: RealVec,
    pub lambda: f64,
}

impl SolverState {
    pub fn new(start: &StartPoint, lambda0: f64) -> Self {
        Self {
            n: 0,
            x: start.x0.clone(),
            x_prev: start.x_prev.clone(),
            w_prev: start.w_prev.clone(),
            w_prev2: start.w_prev.clone(),
            lambda: lambda0,
        }
    }
}

/// Metrics of one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterRecord {
    pub n: usize,
    /// `||x_{n+1} - x_n||`.
    pub tol: f64,
    /// Stepsize used in this iteration.
    pub lambda: f64,
    /// `||w_n - y_n||` (forward-prox residual of the point the step was taken from).
    pub res_wy: f64,
    pub psi: Option<f64>,
    /// `||x_{n+1} - r||` for the known solution `r`.
    pub dist_sol: Option<f64>,
    /// Nanoseconds since the run started, at the end of this iteration.
    pub elapsed_ns: u64,
    /// `||w_n - r||^2 - xi ||x_{n+1} - w_n||^2 - ||x_{n+1} - r||^2`.
    pub fejer_slack: Option<f64>,
    /// Bound on `||w_n - y_n||` minus `||w_n - y_n||`; `+inf` when the bound
    /// is vacuous (`mu lambda_n / lambda_{n+1} >= 1`).
    pub residual_bound_slack: Option<f64>,
    /// `d_n = 0` was detected: the new iterate solves the problem.
    pub certified: bool,
}

impl IterRecord {
    pub(crate) fn new(tol: f64, lambda: f64, res_wy: f64) -> Self {
        Self {
            n: 0,
            tol,
            lambda,
            res_wy,
            psi: None,
            dist_sol: None,
            elapsed_ns: 0,
            fejer_slack: None,
            residual_bound_slack: None,
            certified: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    /// `TOL_n < epsilon`.
    Converged,
    /// Stopped on an exact zero of the contraction direction.
    Certified,
    MaxIter,
    /// An iterate became non-finite.
    Diverged,
}

impl RunStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RunStatus::Converged => "converged",
            RunStatus::Certified => "certified",
            RunStatus::MaxIter => "max_iter",
            RunStatus::Diverged => "diverged",
        }
    }
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of a run, shared by every method.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub method: String,
    pub x: RealVec,
    pub status: RunStatus,
    pub trace: Vec<IterRecord>,
    /// Parameter values and notes, for run metadata.
    pub metadata: BTreeMap<String, String>,
}

impl RunResult {
    pub fn converged(&self) -> bool {
        matches!(self.status, RunStatus::Converged | RunStatus::Certified)
    }

    pub fn iterations(&self) -> usize {
        self.trace.len()
    }

    pub fn final_tol(&self) -> Option<f64> {
        self.trace.last().map(|r| r.tol)
    }

    pub fn final_dist(&self) -> Option<f64> {
        self.trace.last().and_then(|r| r.dist_sol)
    }
}

/// `w_n` from the current state.
pub fn inertial_correction_point(state: &SolverState, p: &PcParams) -> RealVec {
    let (a, d) = (p.alpha, p.delta);
    &state.x + (&state.x - &state.x_prev) * a + (&state.w_prev - &state.x) * (d * (1.0 + a))
        - (&state.w_prev2 - &state.x_prev) * (a * d)
}

/// `y = prox_{lambda g}(w - lambda T w)`.
pub fn forward_prox(w: &RealVec, lambda: f64, prob: &MviProblem) -> Result<RealVec, SolveError> {
    Ok(prob.forward_prox(w, lambda)?)
}

/// `d = (w - y) - lambda (T w - T y)`.
pub fn contraction_direction(w: &RealVec, y: &RealVec, lambda: f64, prob: &MviProblem) -> RealVec {
    direction(w, y, &prob.operator(w), &prob.operator(y), lambda)
}

fn direction(w: &RealVec, y: &RealVec, tw: &RealVec, ty: &RealVec, lambda: f64) -> RealVec {
    (w - y) - (tw - ty) * lambda
}

/// `<w - y, d> / ||d||^2`, or `0` when `d = 0`.
pub fn tau_coefficient(w: &RealVec, y: &RealVec, d: &RealVec) -> f64 {
    let dd = d.norm_squared();
    if dd == 0.0 || dd < ZERO_DIRECTION_SQ {
        0.0
    } else {
        (w - y).dot(d) / dd
    }
}

/// `z = w - gamma tau d`.
pub fn contraction_point(w: &RealVec, d: &RealVec, tau: f64, gamma: f64) -> RealVec {
    w - d * (gamma * tau)
}

/// Self-adaptive stepsize update.
pub fn update_stepsize(lambda: f64, w: &RealVec, y: &RealVec, mu: f64, prob: &MviProblem) -> f64 {
    next_stepsize(lambda, w, y, &prob.operator(w), &prob.operator(y), mu)
}

pub(crate) fn next_stepsize(lambda: f64, w: &RealVec, y: &RealVec, tw: &RealVec, ty: &RealVec, mu: f64) -> f64 {
    let diff = (tw - ty).norm();
    if diff > 0.0 {
        (mu * (w - y).norm() / diff).min(lambda)
    } else {
        lambda
    }
}

/// `x_{n+1} = (1 - theta) w + theta z`.
pub fn relaxed_update(w: &RealVec, z: &RealVec, theta: f64) -> RealVec {
    w * (1.0 - theta) + z * theta
}

/// `s_n = x_n + delta (w_{n-1} - x_n)`.
fn lyapunov_point(x: &RealVec, w_prev: &RealVec, delta: f64) -> RealVec {
    x + (w_prev - x) * delta
}

/// `Psi_n = (||s_n - r||^2 - alpha ||s_{n-1} - r||^2) / (1 - delta)
///        + delta (1 - alpha) / (1 - delta)^2 ||s_n - s_{n-1}||^2`.
pub fn lyapunov_value(state: &SolverState, p: &PcParams, solution: &RealVec) -> f64 {
    let (a, d) = (p.alpha, p.delta);
    let s = lyapunov_point(&state.x, &state.w_prev, d);
    let s_prev = lyapunov_point(&state.x_prev, &state.w_prev2, d);
    ((&s - solution).norm_squared() - a * (&s_prev - solution).norm_squared()) / (1.0 - d)
        + d * (1.0 - a) / ((1.0 - d) * (1.0 - d)) * (&s - &s_prev).norm_squared()
}

/// One iteration without diagnostics.
pub fn step(state: &SolverState, p: &PcParams, prob: &MviProblem) -> Result<(SolverState, IterRecord), SolveError> {
    step_with(state, p, prob, Monitors::none())
}

/// One iteration; fills the requested diagnostics when the problem has a
/// known solution. `dist_sol` is filled whenever a solution is known.
pub fn step_with(
    state: &SolverState,
    p: &PcParams,
    prob: &MviProblem,
    monitors: Monitors,
) -> Result<(SolverState, IterRecord), SolveError> {
    let solution = prob.known_solution();
    let psi = match (monitors.lyapunov, solution) {
        (true, Some(r)) => Some(lyapunov_value(state, p, r)),
        _ => None,
    };

    let lambda = state.lambda;
    let w = inertial_correction_point(state, p);
    let tw = prob.operator(&w);
    let y = prob.prox(&(&w - &tw * lambda), lambda)?;
    let ty = prob.operator(&y);
    let d = direction(&w, &y, &tw, &ty, lambda);
    let dd = d.norm_squared();
    let certified = dd == 0.0 || dd < ZERO_DIRECTION_SQ;
    let tau = tau_coefficient(&w, &y, &d);
    let z = contraction_point(&w, &d, tau, p.gamma);
    let lambda_next = next_stepsize(lambda, &w, &y, &tw, &ty, p.mu);
    let x_next = if certified { w.clone() } else { relaxed_update(&w, &z, p.theta) };

    let res_wy = (&w - &y).norm();
    let mut record = IterRecord::new((&x_next - &state.x).norm(), lambda, res_wy);
    record.n = state.n;
    record.psi = psi;
    record.certified = certified;
    if let Some(r) = solution {
        record.dist_sol = Some((&x_next - r).norm());
        if monitors.lemma_checks {
            let step_sq = (&x_next - &w).norm_squared();
            record.fejer_slack = Some((&w - r).norm_squared() - p.xi * step_sq - (&x_next - r).norm_squared());
            let q = p.mu * lambda / lambda_next;
            record.residual_bound_slack = Some(if q < 1.0 {
                (1.0 / (p.theta * p.gamma)) * ((1.0 + q) / (1.0 - q)) * step_sq.sqrt() - res_wy
            } else {
                f64::INFINITY
            });
        }
    }

    let next = SolverState {
        n: state.n + 1,
        x_prev: state.x.clone(),
        x: x_next,
        w_prev2: state.w_prev.clone(),
        w_prev: w,
        lambda: lambda_next,
    };
    Ok((next, record))
}

/// A method that can be driven by [`drive`].
pub(crate) trait Scheme {
    /// Performs one iteration and returns its record (`n`, `elapsed_ns`
    /// and `dist_sol` are filled in by the driver).
    fn iterate(&mut self, prob: &MviProblem) -> Result<IterRecord, SolveError>;

    /// The iterate `TOL_n` is measured on.
    fn current(&self) -> &RealVec;
}

pub(crate) fn check_stop(stop: &StopRule) -> Result<(), SolveError> {
    if stop.epsilon > 0.0 {
        Ok(())
    } else {
        Err(SolveError::InvalidEpsilon(stop.epsilon))
    }
}

/// Runs a scheme until the stop rule fires, recording every iteration.
pub(crate) fn drive<S: Scheme>(
    method: &str,
    prob: &MviProblem,
    stop: &StopRule,
    mut scheme: S,
    metadata: BTreeMap<String, String>,
) -> Result<RunResult, SolveError> {
    check_stop(stop)?;
    let started = Instant::now();
    let mut trace = Vec::new();
    let mut status = RunStatus::MaxIter;
    for n in 0..stop.max_iter {
        let mut record = scheme.iterate(prob)?;
        record.n = n;
        record.elapsed_ns = started.elapsed().as_nanos() as u64;
        if record.dist_sol.is_none() {
            record.dist_sol = prob.known_solution().map(|r| (scheme.current() - r).norm());
        }
        let finite = record.tol.is_finite() && scheme.current().iter().all(|v| v.is_finite());
        let certified = record.certified;
        let small = record.tol < stop.epsilon;
        trace.push(record);
        if !finite {
            status = RunStatus::Diverged;
            break;
        }
        if certified {
            status = RunStatus::Certified;
            break;
        }
        if small {
            status = RunStatus::Converged;
            break;
        }
    }
    Ok(RunResult { method: method.to_string(), x: scheme.current().clone(), status, trace, metadata })
}

struct RelaxedInertialPc<'a> {
    state: SolverState,
    params: &'a PcParams,
    monitors: Monitors,
}

impl Scheme for RelaxedInertialPc<'_> {
    fn iterate(&mut self, prob: &MviProblem) -> Result<IterRecord, SolveError> {
        let (next, record) = step_with(&self.state, self.params, prob, self.monitors)?;
        self.state = next;
        Ok(record)
    }

    fn current(&self) -> &RealVec {
        &self.state.x
    }
}

/// Runs the method from `start` until `TOL_n < epsilon`, an exact
/// certificate, or `max_iter` iterations.
pub fn solve(
    prob: &MviProblem,
    p: &PcParams,
    start: &StartPoint,
    stop: &StopRule,
    monitors: Monitors,
) -> Result<RunResult, SolveError> {
    start.check_dim(prob.dim())?;
    let metadata = BTreeMap::from([
        ("alpha".to_string(), p.alpha.to_string()),
        ("delta".to_string(), p.delta.to_string()),
        ("theta".to_string(), p.theta.to_string()),
        ("gamma".to_string(), p.gamma.to_string()),
        ("mu".to_string(), p.mu.to_string()),
        ("lambda0".to_string(), p.lambda0.to_string()),
        ("sigma".to_string(), p.sigma.to_string()),
        ("xi".to_string(), p.xi.to_string()),
    ]);
    let scheme = RelaxedInertialPc { state: SolverState::new(start, p.lambda0), params: p, monitors };
    drive("alg33", prob, stop, scheme, metadata)
}
