//! Comparison methods, adapted to the MVI setting.
//!
//! The proximal point schemes are stated for monotone inclusions through a
//! resolvent `J_lambda`. Here `J_lambda` is replaced by the forward-prox map
//! `u -> prox_{lambda g}(u - lambda T u)`, whose fixed points are the
//! solutions of the MVI.
//!
//! | tag          | scheme                                                          |
//! |--------------|-----------------------------------------------------------------|
//! | `pcm_he`     | projection-and-contraction, no inertia                           |
//! | `pcm_dong`   | `w_n = x_n + alpha_n (x_n - x_{n-1})`, then one `pcm_he` step    |
//! | `ppa_kim`    | accelerated proximal point with one correction term             |
//! | `ppa_mainge` | relaxed inertial proximal point with one correction term        |
//!
//! All runs share the [`RunResult`] trace layout of [`crate::solver::solve`].
//! For the proximal point schemes `TOL_n = ||y_{n+1} - y_n||`.

use std::collections::BTreeMap;
use std::fmt;

use crate::numerics::RealVec;
use crate::problems::MviProblem;
use crate::solver::{
    drive, next_stepsize, tau_coefficient, IterRecord, RunResult, Scheme, SolveError, StartPoint, StopRule,
    ZERO_DIRECTION_SQ,
};

/// Stepsize policy for the contraction baselines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaRule {
    Constant(f64),
    /// `lambda_{n+1} = min(mu ||x - y|| / ||T x - T y||, lambda_n)`.
    Adaptive {
        lambda0: f64,
        mu: f64,
    },
}

impl LambdaRule {
    fn initial(&self) -> f64 {
        match *self {
            LambdaRule::Constant(l) => l,
            LambdaRule::Adaptive { lambda0, .. } => lambda0,
        }
    }

    fn validate(&self) -> Result<(), SolveError> {
        let ok = match *self {
            LambdaRule::Constant(l) => l > 0.0 && l.is_finite(),
            LambdaRule::Adaptive { lambda0, mu } => lambda0 > 0.0 && lambda0.is_finite() && mu > 0.0 && mu < 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(SolveError::InvalidParameter(format!("{self:?}")))
        }
    }
}

impl fmt::Display for LambdaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaRule::Constant(l) => write!(f, "constant({l})"),
            LambdaRule::Adaptive { lambda0, mu } => write!(f, "adaptive(lambda0={lambda0}, mu={mu})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeParams {
    pub lambda: LambdaRule,
    pub gamma: f64,
}

impl HeParams {
    /// `gamma = 1.5` with the adaptive rule `mu = 0.5` from the problem's
    /// reference stepsize.
    pub fn defaults(prob: &MviProblem) -> Self {
        Self { lambda: LambdaRule::Adaptive { lambda0: prob.reference_stepsize(), mu: 0.5 }, gamma: 1.5 }
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        check_gamma(self.gamma)?;
        self.lambda.validate()
    }
}

/// Inertial contraction method. Only `tau` (stepsize), `gamma` and the
/// `alpha_n` schedule drive the iteration; `delta`, `alpha` and `sigma`
/// are carried into run metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DongParams {
    pub tau: f64,
    pub gamma: f64,
    pub delta: f64,
    pub alpha: f64,
    pub sigma: f64,
}

impl DongParams {
    pub fn defaults(prob: &MviProblem) -> Self {
        Self { tau: prob.reference_stepsize(), gamma: 58.0 / 477.0, delta: 0.9, alpha: 0.4, sigma: 0.2 }
    }

    /// `alpha_n = 0.3 - 1 / (5 (n + 1)^2)`.
    pub fn alpha_n(n: usize) -> f64 {
        let m = (n + 1) as f64;
        0.3 - 1.0 / (5.0 * m * m)
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        check_gamma(self.gamma)?;
        check_positive("tau", self.tau)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KimParams {
    pub lambda: f64,
}

impl KimParams {
    pub fn defaults(prob: &MviProblem) -> Self {
        Self { lambda: prob.reference_stepsize() }
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        check_positive("lambda", self.lambda)
    }
}

/// Relaxed inertial proximal point method. `a1` is used as the constant
/// inertia `alpha_n` and `a2` as the constant correction weight `delta_n`;
/// `a`, `c`, `b` and `c_bar` are carried into run metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaingeParams {
    pub lambda: f64,
    pub a: f64,
    pub c: f64,
    pub b: f64,
    pub a1: f64,
    pub a2: f64,
    pub c_bar: f64,
}

impl MaingeParams {
    pub fn defaults(prob: &MviProblem) -> Self {
        Self { lambda: prob.reference_stepsize(), a: 1.0, c: 2.0, b: 0.5, a1: 0.5, a2: 0.9, c_bar: 1.0 }
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        check_positive("lambda", self.lambda)?;
        if !(self.a1 >= 0.0 && self.a1.is_finite()) {
            return Err(SolveError::InvalidParameter(format!("alpha_n = {} must be nonnegative", self.a1)));
        }
        if !self.a2.is_finite() {
            return Err(SolveError::InvalidParameter(format!("delta_n = {} must be finite", self.a2)));
        }
        Ok(())
    }
}

fn check_gamma(gamma: f64) -> Result<(), SolveError> {
    if gamma > 0.0 && gamma < 2.0 {
        Ok(())
    } else {
        Err(SolveError::InvalidParameter(format!("gamma = {gamma} must lie in (0, 2)")))
    }
}

fn check_positive(name: &str, value: f64) -> Result<(), SolveError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(SolveError::InvalidParameter(format!("{name} = {value} must be positive")))
    }
}

/// A baseline together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaselineKind {
    PcmHe(HeParams),
    PcmDong(DongParams),
    PpaKim(KimParams),
    PpaMainge(MaingeParams),
}

impl BaselineKind {
    pub const TAGS: [&'static str; 4] = ["pcm_he", "pcm_dong", "ppa_kim", "ppa_mainge"];

    pub fn tag(&self) -> &'static str {
        match self {
            BaselineKind::PcmHe(_) => "pcm_he",
            BaselineKind::PcmDong(_) => "pcm_dong",
            BaselineKind::PpaKim(_) => "ppa_kim",
            BaselineKind::PpaMainge(_) => "ppa_mainge",
        }
    }

    /// Default parameters of the baseline named `tag` on `prob`.
    pub fn from_tag(tag: &str, prob: &MviProblem) -> Option<Self> {
        Some(match tag {
            "pcm_he" => BaselineKind::PcmHe(HeParams::defaults(prob)),
            "pcm_dong" => BaselineKind::PcmDong(DongParams::defaults(prob)),
            "ppa_kim" => BaselineKind::PpaKim(KimParams::defaults(prob)),
            "ppa_mainge" => BaselineKind::PpaMainge(MaingeParams::defaults(prob)),
            _ => return None,
        })
    }

    pub fn run(&self, prob: &MviProblem, start: &StartPoint, stop: &StopRule) -> Result<RunResult, SolveError> {
        match self {
            BaselineKind::PcmHe(p) => run_pcm_he(prob, p, start, stop),
            BaselineKind::PcmDong(p) => run_pcm_dong(prob, p, start, stop),
            BaselineKind::PpaKim(p) => run_ppa_kim(prob, p, start, stop),
            BaselineKind::PpaMainge(p) => run_ppa_mainge(prob, p, start, stop),
        }
    }
}

/// One contraction step from `w` with stepsize `lambda`. Returns the new
/// point, `||w - y||`, the next stepsize under `rule` and the certificate.
fn contraction_step(
    prob: &MviProblem,
    w: &RealVec,
    lambda: f64,
    gamma: f64,
    rule: &LambdaRule,
) -> Result<(RealVec, f64, f64, bool), SolveError> {
    let tw = prob.operator(w);
    let y = prob.prox(&(w - &tw * lambda), lambda)?;
    let ty = prob.operator(&y);
    let d = (w - &y) - (&tw - &ty) * lambda;
    let dd = d.norm_squared();
    let certified = dd == 0.0 || dd < ZERO_DIRECTION_SQ;
    let tau = tau_coefficient(w, &y, &d);
    let next = w - &d * (gamma * tau);
    let lambda_next = match *rule {
        LambdaRule::Constant(l) => l,
        LambdaRule::Adaptive { mu, .. } => next_stepsize(lambda, w, &y, &tw, &ty, mu),
    };
    Ok((next, (w - &y).norm(), lambda_next, certified))
}

struct He<'a> {
    params: &'a HeParams,
    x: RealVec,
    lambda: f64,
}

impl Scheme for He<'_> {
    fn iterate(&mut self, prob: &MviProblem) -> Result<IterRecord, SolveError> {
        let (next, res, lambda_next, certified) =
            contraction_step(prob, &self.x, self.lambda, self.params.gamma, &self.params.lambda)?;
        let mut rec = IterRecord::new((&next - &self.x).norm(), self.lambda, res);
        rec.certified = certified;
        self.x = next;
        self.lambda = lambda_next;
        Ok(rec)
    }

    fn current(&self) -> &RealVec {
        &self.x
    }
}

/// He's projection-and-contraction method with the prox in place of the
/// projection. Starts from `start.x0`.
pub fn run_pcm_he(
    prob: &MviProblem,
    p: &HeParams,
    start: &StartPoint,
    stop: &StopRule,
) -> Result<RunResult, SolveError> {
    p.validate()?;
    start.check_dim(prob.dim())?;
    let meta =
        BTreeMap::from([("lambda".to_string(), p.lambda.to_string()), ("gamma".to_string(), p.gamma.to_string())]);
    let scheme = He { params: p, x: start.x0.clone(), lambda: p.lambda.initial() };
    drive("pcm_he", prob, stop, scheme, meta)
}

struct Dong<'a> {
    params: &'a DongParams,
    n: usize,
    x: RealVec,
    x_prev: RealVec,
}

impl Scheme for Dong<'_> {
    fn iterate(&mut self, prob: &MviProblem) -> Result<IterRecord, SolveError> {
        let a = DongParams::alpha_n(self.n);
        let w = &self.x + (&self.x - &self.x_prev) * a;
        let rule = LambdaRule::Constant(self.params.tau);
        let (next, res, _, certified) = contraction_step(prob, &w, self.params.tau, self.params.gamma, &rule)?;
        let mut rec = IterRecord::new((&next - &self.x).norm(), self.params.tau, res);
        rec.certified = certified;
        self.x_prev = std::mem::replace(&mut self.x, next);
        self.n += 1;
        Ok(rec)
    }

    fn current(&self) -> &RealVec {
        &self.x
    }
}

/// Inertial contraction method. Uses `start.x0` and `start.x_prev`.
pub fn run_pcm_dong(
    prob: &MviProblem,
    p: &DongParams,
    start: &StartPoint,
    stop: &StopRule,
) -> Result<RunResult, SolveError> {
    p.validate()?;
    start.check_dim(prob.dim())?;
    let meta = BTreeMap::from([
        ("tau".to_string(), p.tau.to_string()),
        ("gamma".to_string(), p.gamma.to_string()),
        ("alpha_n".to_string(), "0.3 - 1/(5(n+1)^2)".to_string()),
        ("unused.delta".to_string(), p.delta.to_string()),
        ("unused.alpha".to_string(), p.alpha.to_string()),
        ("unused.sigma".to_string(), p.sigma.to_string()),
    ]);
    let scheme = Dong { params: p, n: 0, x: start.x0.clone(), x_prev: start.x_prev.clone() };
    drive("pcm_dong", prob, stop, scheme, meta)
}

struct Kim {
    lambda: f64,
    n: usize,
    y: RealVec,
    y_prev: RealVec,
    w_prev: RealVec,
    w_prev2: RealVec,
}

impl Scheme for Kim {
    fn iterate(&mut self, prob: &MviProblem) -> Result<IterRecord, SolveError> {
        let n = self.n as f64;
        let c = (n - 1.0) / (n + 1.0);
        let w = &self.y + (&self.y - &self.y_prev) * c + (&self.w_prev2 - &self.y_prev) * c;
        let y_next = prob.forward_prox(&w, self.lambda)?;
        let rec = IterRecord::new((&y_next - &self.y).norm(), self.lambda, (&w - &y_next).norm());
        self.y_prev = std::mem::replace(&mut self.y, y_next);
        self.w_prev2 = std::mem::replace(&mut self.w_prev, w);
        self.n += 1;
        Ok(rec)
    }

    fn current(&self) -> &RealVec {
        &self.y
    }
}

/// Kim's accelerated proximal point method. The counter starts at `n = 1`
/// with `y_1 = x0`, `y_0 = x_{-1}`, `w_0 = x0` and `w_{-1} = start.w_prev`.
pub fn run_ppa_kim(
    prob: &MviProblem,
    p: &KimParams,
    start: &StartPoint,
    stop: &StopRule,
) -> Result<RunResult, SolveError> {
    p.validate()?;
    start.check_dim(prob.dim())?;
    let meta = BTreeMap::from([("lambda".to_string(), p.lambda.to_string())]);
    let scheme = Kim {
        lambda: p.lambda,
        n: 1,
        y: start.x0.clone(),
        y_prev: start.x_prev.clone(),
        w_prev: start.x0.clone(),
        w_prev2: start.w_prev.clone(),
    };
    drive("ppa_kim", prob, stop, scheme, meta)
}

/// `w_n = y_n + alpha (y_n - y_{n-1}) + delta (w_{n-1} - y_n)`,
/// `y_{n+1} = w_n / (1 + alpha) + alpha / (1 + alpha) J_{lambda (1 + alpha)}(w_n)`.
pub fn mainge_update(
    prob: &MviProblem,
    y: &RealVec,
    y_prev: &RealVec,
    w_prev: &RealVec,
    alpha: f64,
    delta: f64,
    lambda: f64,
) -> Result<(RealVec, RealVec), SolveError> {
    let w = y + (y - y_prev) * alpha + (w_prev - y) * delta;
    let j = prob.forward_prox(&w, lambda * (1.0 + alpha))?;
    let y_next = &w * (1.0 / (1.0 + alpha)) + j * (alpha / (1.0 + alpha));
    Ok((w, y_next))
}

struct Mainge<'a> {
    params: &'a MaingeParams,
    y: RealVec,
    y_prev: RealVec,
    w_prev: RealVec,
}

impl Scheme for Mainge<'_> {
    fn iterate(&mut self, prob: &MviProblem) -> Result<IterRecord, SolveError> {
        let p = self.params;
        let (w, y_next) = mainge_update(prob, &self.y, &self.y_prev, &self.w_prev, p.a1, p.a2, p.lambda)?;
        let rec = IterRecord::new((&y_next - &self.y).norm(), p.lambda, (&w - &y_next).norm());
        self.y_prev = std::mem::replace(&mut self.y, y_next);
        self.w_prev = w;
        Ok(rec)
    }

    fn current(&self) -> &RealVec {
        &self.y
    }
}

/// Maingé's relaxed inertial proximal point method with `y_0 = x0`,
/// `y_{-1} = x_{-1}` and `w_{-1} = start.w_prev`.
pub fn run_ppa_mainge(
    prob: &MviProblem,
    p: &MaingeParams,
    start: &StartPoint,
    stop: &StopRule,
) -> Result<RunResult, SolveError> {
    p.validate()?;
    start.check_dim(prob.dim())?;
    let meta = BTreeMap::from([
        ("lambda".to_string(), p.lambda.to_string()),
        ("alpha_n".to_string(), p.a1.to_string()),
        ("delta_n".to_string(), p.a2.to_string()),
        ("unused.a".to_string(), p.a.to_string()),
        ("unused.c".to_string(), p.c.to_string()),
        ("unused.b".to_string(), p.b.to_string()),
        ("unused.c_bar".to_string(), p.c_bar.to_string()),
    ]);
    let scheme = Mainge { params: p, y: start.x0.clone(), y_prev: start.x_prev.clone(), w_prev: start.w_prev.clone() };
    drive("ppa_mainge", prob, stop, scheme, meta)
}
