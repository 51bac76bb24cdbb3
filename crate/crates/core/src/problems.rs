//! Problem model and the bundled test problems.

use std::fmt;

use thiserror::Error;

use crate::numerics::{
    random_spd, smallest_eigenvalue_spd, spectral_radius_spd, NumericsError, RealMat, RealVec, SeededRng,
};
use crate::proxlib::{AffineBoxIndicator, ProxError, ProxOperator, QuadraticForm, SumSquaresBox};

/// Tolerance and iteration cap for the eigenvalue estimates of generated problems.
const EIG_TOL: f64 = 1e-10;
const EIG_MAX_ITER: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Prox(#[from] ProxError),
    #[error("invalid problem dimension {0}")]
    InvalidDimension(usize),
    #[error("{what} has length {got}, problem dimension is {dim}")]
    DimensionMismatch { what: &'static str, got: usize, dim: usize },
}

/// Single-valued operator `T : R^n -> R^n`.
pub trait Operator: Send + Sync + fmt::Debug {
    fn apply(&self, x: &RealVec) -> RealVec;
}

/// `T(x) = A x`.
#[derive(Debug, Clone)]
pub struct LinearOperator(pub RealMat);

impl Operator for LinearOperator {
    fn apply(&self, x: &RealVec) -> RealVec {
        &self.0 * x
    }
}

/// `T(x) = c - x`, componentwise with a constant `c`.
#[derive(Debug, Clone)]
pub struct ReflectedShift(pub f64);

impl Operator for ReflectedShift {
    fn apply(&self, x: &RealVec) -> RealVec {
        x.map(|v| self.0 - v)
    }
}

/// Wraps a closure as an [`Operator`].
pub struct FnOperator<F>(pub F);

impl<F> fmt::Debug for FnOperator<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("FnOperator")
    }
}

impl<F> Operator for FnOperator<F>
where
    F: Fn(&RealVec) -> RealVec + Send + Sync,
{
    fn apply(&self, x: &RealVec) -> RealVec {
        (self.0)(x)
    }
}

/// The map `G : R^2 -> R^2` of the nonlinear network problem.
///
/// `G(p) = (-t / (1 + t), -1 / (1 + t))` with
/// `t = (p1 + sqrt(p1^2 + 4 p2)) / 2`, and `G(0, 0) = (0, -1)`.
/// Off the unit square the radicand and `t` are clipped at zero so the map
/// stays finite at extrapolated points; on the square nothing changes.
pub fn ex1_inner_map(p1: f64, p2: f64) -> (f64, f64) {
    if p1 == 0.0 && p2 == 0.0 {
        return (0.0, -1.0);
    }
    let t = (0.5 * (p1 + (p1 * p1 + 4.0 * p2).max(0.0).sqrt())).max(0.0);
    (-t / (1.0 + t), -1.0 / (1.0 + t))
}

/// `T(x) = M^T G(M x + d)`.
#[derive(Debug, Clone)]
pub struct NetworkOperator {
    map: RealMat,
    offset: RealVec,
}

impl Operator for NetworkOperator {
    fn apply(&self, x: &RealVec) -> RealVec {
        let p = &self.map * x + &self.offset;
        let (g1, g2) = ex1_inner_map(p[0], p[1]);
        self.map.transpose() * RealVec::from_column_slice(&[g1, g2])
    }
}

/// Monotonicity assumption a problem is tagged with. Metadata only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonotonicityClass {
    Monotone,
    GPseudomonotone,
    /// `<T v, v - u> + g(v) - g(u) >= 0` for feasible `v` and solutions `u`.
    GeneralizedMonotone,
}

/// Extreme eigenvalues of the random matrices of the quadratic family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralInfo {
    /// Largest eigenvalue of `B` (the quadratic term).
    pub rho_b: f64,
    /// Smallest eigenvalue of `B`.
    pub eta_b: f64,
    /// Largest eigenvalue of `D` (the operator).
    pub rho_d: f64,
}

/// Mixed variational inequality: operator `T`, convex `g` through its prox,
/// plus optional metadata.
#[derive(Debug)]
pub struct MviProblem {
    name: String,
    dim: usize,
    operator: Box<dyn Operator>,
    prox: Box<dyn ProxOperator>,
    lipschitz: Option<f64>,
    known_solution: Option<RealVec>,
    class: MonotonicityClass,
    spectral: Option<SpectralInfo>,
}

impl MviProblem {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        operator: Box<dyn Operator>,
        prox: Box<dyn ProxOperator>,
        class: MonotonicityClass,
    ) -> Result<Self, ProblemError> {
        if dim == 0 {
            return Err(ProblemError::InvalidDimension(dim));
        }
        Ok(Self {
            name: name.into(),
            dim,
            operator,
            prox,
            lipschitz: None,
            known_solution: None,
            class,
            spectral: None,
        })
    }

    pub fn with_lipschitz(mut self, beta: f64) -> Self {
        self.lipschitz = Some(beta);
        self
    }

    pub fn with_known_solution(mut self, x: RealVec) -> Result<Self, ProblemError> {
        if x.len() != self.dim {
            return Err(ProblemError::DimensionMismatch { what: "known solution", got: x.len(), dim: self.dim });
        }
        self.known_solution = Some(x);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn known_solution(&self) -> Option<&RealVec> {
        self.known_solution.as_ref()
    }

    pub fn class(&self) -> MonotonicityClass {
        self.class
    }

    pub fn spectral(&self) -> Option<SpectralInfo> {
        self.spectral
    }

    pub fn prox_operator(&self) -> &dyn ProxOperator {
        self.prox.as_ref()
    }

    /// `T x`.
    pub fn operator(&self, x: &RealVec) -> RealVec {
        self.operator.apply(x)
    }

    /// `prox_{lambda g}(u)`.
    pub fn prox(&self, u: &RealVec, lambda: f64) -> Result<RealVec, ProxError> {
        self.prox.prox(u, lambda)
    }

    /// `g(x)`, `+inf` outside its domain.
    pub fn g(&self, x: &RealVec) -> f64 {
        self.prox.value(x)
    }

    /// Forward-prox map `prox_{lambda g}(x - lambda T x)`.
    pub fn forward_prox(&self, x: &RealVec, lambda: f64) -> Result<RealVec, ProxError> {
        self.prox(&(x - self.operator(x) * lambda), lambda)
    }

    /// `||x - prox_{lambda g}(x - lambda T x)||`, zero exactly at solutions.
    pub fn fixed_point_residual(&self, x: &RealVec, lambda: f64) -> Result<f64, ProxError> {
        Ok((x - self.forward_prox(x, lambda)?).norm())
    }

    /// Initial stepsize used by the experiment protocol: `0.99 / (2 rho(B))`
    /// on the quadratic family, `1` elsewhere.
    pub fn reference_stepsize(&self) -> f64 {
        match self.spectral {
            Some(s) => 0.99 / (2.0 * s.rho_b),
            None => 1.0,
        }
    }
}

/// Nonlinear network problem in `R^3`: `T(x) = M^T G(M x + d)` and `g` the
/// indicator of `{x : M x + d in [0,1]^2}`.
pub fn make_ex1() -> MviProblem {
    let map = RealMat::from_row_slice(2, 3, &[1.0, 2.0, 1.0, 1.0, 1.0, 1.0]);
    let offset = RealVec::from_column_slice(&[0.5, 0.5]);
    let set = AffineBoxIndicator::new(map.clone(), offset.clone(), RealVec::zeros(2), RealVec::from_element(2, 1.0))
        .expect("constant set data is valid");
    MviProblem::new(
        "ex1",
        3,
        Box::new(NetworkOperator { map, offset }),
        Box::new(set),
        MonotonicityClass::GPseudomonotone,
    )
    .expect("dimension is positive")
}

/// Two-dimensional problem with `T(x) = (4 - x1, 4 - x2)` and
/// `g(x) = x1^2 + x2^2` on `[3,5]^2`. Unique solution `(3, 3)`.
pub fn make_ex2() -> MviProblem {
    MviProblem::new(
        "ex2",
        2,
        Box::new(ReflectedShift(4.0)),
        Box::new(SumSquaresBox::new(3.0, 5.0).expect("3 < 5")),
        MonotonicityClass::GeneralizedMonotone,
    )
    .expect("dimension is positive")
    .with_lipschitz(1.0)
    .with_known_solution(RealVec::from_element(2, 3.0))
    .expect("length matches")
}

/// Random quadratic family: `T(x) = D x`, `g(x) = x^T B x` with `B`, `D`
/// SPD with eigenvalues in `[1, 2]`. Unique solution `0`.
///
/// `B` and then `D` are drawn from `SeededRng::new(seed)`.
pub fn make_ex3(n: usize, seed: u64) -> Result<MviProblem, ProblemError> {
    if n == 0 {
        return Err(ProblemError::InvalidDimension(n));
    }
    let mut rng = SeededRng::new(seed);
    let b = random_spd(n, &mut rng, 1.0, 2.0)?;
    let d = random_spd(n, &mut rng, 1.0, 2.0)?;
    let spectral = SpectralInfo {
        rho_b: spectral_radius_spd(&b, EIG_TOL, EIG_MAX_ITER)?,
        eta_b: smallest_eigenvalue_spd(&b, EIG_TOL, EIG_MAX_ITER)?,
        rho_d: spectral_radius_spd(&d, EIG_TOL, EIG_MAX_ITER)?,
    };
    let mut prob = MviProblem::new(
        "ex3",
        n,
        Box::new(LinearOperator(d)),
        Box::new(QuadraticForm::new(b)?),
        MonotonicityClass::Monotone,
    )?
    .with_lipschitz(spectral.rho_d)
    .with_known_solution(RealVec::zeros(n))?;
    prob.spectral = Some(spectral);
    Ok(prob)
}

/// A pair `(u, v)` violating plain pseudomonotonicity.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub u: f64,
    pub v: f64,
    /// `<T u, v - u>`, nonnegative.
    pub premise: f64,
    /// `<T v, v - u>`, negative.
    pub conclusion: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub property: String,
    /// Number of `(u, v)` pairs examined.
    pub samples: usize,
    /// Pairs where the premise held and the conclusion failed.
    pub violations: usize,
    /// Grid pairs violating plain pseudomonotonicity.
    pub plain_violations: usize,
    pub counterexample: Option<Counterexample>,
}

/// Points per axis of the probe grid over `[3, 5]`.
pub const PROBE_GRID_POINTS: usize = 201;

/// One-dimensional probe with `T(u) = 4 - u` and `g(u) = u^2` on `[3, 5]`.
///
/// Checks g-pseudomonotonicity on every grid pair (premise `>= 0` must give
/// conclusion `>= -1e-12`) and reports the pair `u = 3, v = 5` for which
/// plain pseudomonotonicity fails.
pub fn probe_example23() -> ProbeReport {
    let t = |u: f64| 4.0 - u;
    let g = |u: f64| u * u;
    let grid: Vec<f64> =
        (0..PROBE_GRID_POINTS).map(|i| 3.0 + 2.0 * i as f64 / (PROBE_GRID_POINTS - 1) as f64).collect();

    let mut violations = 0;
    let mut plain_violations = 0;
    for &u in &grid {
        for &v in &grid {
            let premise = t(u) * (v - u) + g(v) - g(u);
            let conclusion = t(v) * (v - u) + g(v) - g(u);
            if premise >= 0.0 && conclusion < -1e-12 {
                violations += 1;
            }
            if t(u) * (v - u) >= 0.0 && t(v) * (v - u) < 0.0 {
                plain_violations += 1;
            }
        }
    }

    let (u, v) = (3.0, 5.0);
    let premise = t(u) * (v - u);
    let conclusion = t(v) * (v - u);
    let counterexample = (premise >= 0.0 && conclusion < 0.0).then_some(Counterexample { u, v, premise, conclusion });

    ProbeReport {
        property: "g-pseudomonotone".into(),
        samples: grid.len() * grid.len(),
        violations,
        plain_violations,
        counterexample,
    }
}
