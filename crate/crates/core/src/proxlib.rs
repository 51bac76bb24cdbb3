//! Proximal operators for the convex terms `g` of the bundled problems.
//!
//! Every operator returns `argmin_v { lambda g(v) + 1/2 ||u - v||^2 }`.
//! Indicator functions ignore `lambda` (their prox is a projection).

use std::fmt;
use std::sync::Mutex;

use thiserror::Error;

use crate::numerics::{NumericsError, RealMat, RealVec, SpdFactor};

/// Largest row count accepted by [`project_affine_box`] (3^8 = 6561 active sets).
pub const MAX_ENUMERATED_ROWS: usize = 8;

/// Slack allowed on the favorable side of the prox inequality check.
pub const PROX_INEQUALITY_SLACK: f64 = 1e-9;

/// Distance within which a point counts as inside a set for `g` evaluation.
const DOMAIN_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProxError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("lower bound exceeds upper bound at coordinate {index}")]
    InvalidBounds { index: usize },
    #[error("prox parameter must be positive and finite, got {0}")]
    InvalidLambda(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{rows} constraint rows exceed the enumeration limit of {MAX_ENUMERATED_ROWS}")]
    TooManyRows { rows: usize },
    #[error("no active set satisfies the KKT conditions (infeasible or degenerate set)")]
    NoKktCandidate,
}

/// Proximal map of a convex function `g`, together with `g` itself.
pub trait ProxOperator: Send + Sync + fmt::Debug {
    /// Short tag naming `g`.
    fn name(&self) -> &'static str;

    fn prox(&self, u: &RealVec, lambda: f64) -> Result<RealVec, ProxError>;

    /// `g(x)`, `+inf` outside the domain.
    fn value(&self, x: &RealVec) -> f64;
}

fn check_lambda(lambda: f64) -> Result<(), ProxError> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(ProxError::InvalidLambda(lambda))
    }
}

fn check_len(expected: usize, got: usize) -> Result<(), ProxError> {
    if expected == got {
        Ok(())
    } else {
        Err(ProxError::DimensionMismatch { expected, got })
    }
}

fn check_bounds(lo: &RealVec, hi: &RealVec) -> Result<(), ProxError> {
    check_len(lo.len(), hi.len())?;
    match lo.iter().zip(hi.iter()).position(|(l, h)| !(l <= h)) {
        Some(index) => Err(ProxError::InvalidBounds { index }),
        None => Ok(()),
    }
}

/// Projection onto the box `[lo, hi]` (prox of its indicator).
pub fn prox_box(u: &RealVec, lo: &RealVec, hi: &RealVec) -> Result<RealVec, ProxError> {
    check_bounds(lo, hi)?;
    check_len(lo.len(), u.len())?;
    Ok(RealVec::from_iterator(u.len(), u.iter().zip(lo.iter().zip(hi.iter())).map(|(&x, (&l, &h))| x.clamp(l, h))))
}

/// Prox of `sum_i x_i^2` restricted to the cube `[lo, hi]^n`:
/// coordinatewise `clamp(u_i / (1 + 2 lambda), lo, hi)`.
pub fn prox_sumsq_box(u: &RealVec, lo: f64, hi: f64, lambda: f64) -> Result<RealVec, ProxError> {
    if !(lo < hi) {
        return Err(ProxError::InvalidBounds { index: 0 });
    }
    check_lambda(lambda)?;
    let scale = 1.0 + 2.0 * lambda;
    Ok(u.map(|x| (x / scale).clamp(lo, hi)))
}

/// Prox of `x^T B x`: the solution of `(I + 2 lambda B) v = u`.
pub fn prox_quadratic_form(u: &RealVec, b: &RealMat, lambda: f64) -> Result<RealVec, ProxError> {
    check_lambda(lambda)?;
    check_len(b.nrows(), u.len())?;
    Ok(SpdFactor::new(&shifted_system(b, lambda))?.solve(u))
}

fn shifted_system(b: &RealMat, lambda: f64) -> RealMat {
    let n = b.nrows();
    RealMat::identity(n, n) + b * (2.0 * lambda)
}

/// Euclidean projection of `u` onto `{x : lo <= M x + d <= hi}`.
///
/// Enumerates all `3^m` active-set patterns (row inactive, at its lower
/// bound, or at its upper bound), solves each equality-constrained
/// projection in closed form and keeps the candidates that are primal
/// feasible with correctly signed multipliers. Among those the smallest
/// objective wins, ties going to the lexicographically first pattern
/// (row 0 most significant, inactive < lower < upper).
pub fn project_affine_box(
    u: &RealVec,
    map: &RealMat,
    offset: &RealVec,
    lo: &RealVec,
    hi: &RealVec,
) -> Result<RealVec, ProxError> {
    let (m, n) = map.shape();
    check_len(n, u.len())?;
    check_len(m, offset.len())?;
    check_len(m, lo.len())?;
    check_bounds(lo, hi)?;
    if m > MAX_ENUMERATED_ROWS {
        return Err(ProxError::TooManyRows { rows: m });
    }

    let feas_tol = |i: usize| 1e-10 * (1.0 + lo[i].abs().max(hi[i].abs()));
    let mult_tol = 1e-10 * (1.0 + u.norm());

    let mut best: Option<(f64, RealVec)> = None;
    let mut pattern = vec![0u8; m];
    for code in 0..3usize.pow(m as u32) {
        let mut rest = code;
        for slot in pattern.iter_mut().rev() {
            *slot = (rest % 3) as u8;
            rest /= 3;
        }
        let active: Vec<usize> = (0..m).filter(|&i| pattern[i] != 0).collect();

        let (x, multipliers) = if active.is_empty() {
            (u.clone(), RealVec::zeros(0))
        } else {
            let rows = RealMat::from_fn(active.len(), n, |r, c| map[(active[r], c)]);
            let target = RealVec::from_iterator(
                active.len(),
                active.iter().map(|&i| {
                    let bound = if pattern[i] == 1 { lo[i] } else { hi[i] };
                    bound - offset[i]
                }),
            );
            let gram = &rows * rows.transpose();
            let gram = (&gram + gram.transpose()) * 0.5;
            let Ok(factor) = SpdFactor::new(&gram) else {
                // Linearly dependent active rows.
                continue;
            };
            let nu = factor.solve(&(target - &rows * u));
            (u + rows.transpose() * &nu, nu)
        };

        let signs_ok = active.iter().zip(multipliers.iter()).all(|(&i, &nu)| match pattern[i] {
            1 => nu >= -mult_tol,
            _ => nu <= mult_tol,
        });
        if !signs_ok {
            continue;
        }
        let image = map * &x + offset;
        let feasible = (0..m).all(|i| image[i] >= lo[i] - feas_tol(i) && image[i] <= hi[i] + feas_tol(i));
        if !feasible {
            continue;
        }
        let objective = 0.5 * (&x - u).norm_squared();
        let better = match &best {
            None => true,
            Some((b, _)) => objective < b - 1e-14 * (1.0 + b),
        };
        if better {
            best = Some((objective, x));
        }
    }
    best.map(|(_, x)| x).ok_or(ProxError::NoKktCandidate)
}

/// Checks `lambda (g(v) - g(p)) >= <u - p, v - p>` with `p = prox(u)`,
/// allowing [`PROX_INEQUALITY_SLACK`].
pub fn prox_inequality_holds(op: &dyn ProxOperator, u: &RealVec, v: &RealVec, lambda: f64) -> Result<bool, ProxError> {
    let p = op.prox(u, lambda)?;
    let lhs = lambda * (op.value(v) - op.value(&p));
    let rhs = (u - &p).dot(&(v - &p));
    Ok(lhs - rhs >= -PROX_INEQUALITY_SLACK)
}

/// Indicator of a box `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxIndicator {
    lo: RealVec,
    hi: RealVec,
}

impl BoxIndicator {
    pub fn new(lo: RealVec, hi: RealVec) -> Result<Self, ProxError> {
        check_bounds(&lo, &hi)?;
        Ok(Self { lo, hi })
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self, ProxError> {
        Self::new(RealVec::from_element(dim, lo), RealVec::from_element(dim, hi))
    }

    pub fn contains(&self, x: &RealVec) -> bool {
        x.len() == self.lo.len()
            && x.iter()
                .zip(self.lo.iter().zip(self.hi.iter()))
                .all(|(&v, (&l, &h))| v >= l - DOMAIN_TOL && v <= h + DOMAIN_TOL)
    }
}

impl ProxOperator for BoxIndicator {
    fn name(&self) -> &'static str {
        "box_indicator"
    }

    fn prox(&self, u: &RealVec, lambda: f64) -> Result<RealVec, ProxError> {
        check_lambda(lambda)?;
        prox_box(u, &self.lo, &self.hi)
    }

    fn value(&self, x: &RealVec) -> f64 {
        if self.contains(x) {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Indicator of `{x : lo <= M x + d <= hi}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineBoxIndicator {
    map: RealMat,
    offset: RealVec,
    lo: RealVec,
    hi: RealVec,
}

impl AffineBoxIndicator {
    pub fn new(map: RealMat, offset: RealVec, lo: RealVec, hi: RealVec) -> Result<Self, ProxError> {
        check_len(map.nrows(), offset.len())?;
        check_len(map.nrows(), lo.len())?;
        check_bounds(&lo, &hi)?;
        if map.nrows() > MAX_ENUMERATED_ROWS {
            return Err(ProxError::TooManyRows { rows: map.nrows() });
        }
        Ok(Self { map, offset, lo, hi })
    }

    pub fn map(&self) -> &RealMat {
        &self.map
    }

    pub fn offset(&self) -> &RealVec {
        &self.offset
    }

    pub fn contains(&self, x: &RealVec) -> bool {
        if x.len() != self.map.ncols() {
            return false;
        }
        let image = &self.map * x + &self.offset;
        (0..image.len()).all(|i| image[i] >= self.lo[i] - DOMAIN_TOL && image[i] <= self.hi[i] + DOMAIN_TOL)
    }
}

impl ProxOperator for AffineBoxIndicator {
    fn name(&self) -> &'static str {
        "affine_box_indicator"
    }

    fn prox(&self, u: &RealVec, lambda: f64) -> Result<RealVec, ProxError> {
        check_lambda(lambda)?;
        project_affine_box(u, &self.map, &self.offset, &self.lo, &self.hi)
    }

    fn value(&self, x: &RealVec) -> f64 {
        if self.contains(x) {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// `g(x) = sum_i x_i^2` on the cube `[lo, hi]^n`, `+inf` elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct SumSquaresBox {
    lo: f64,
    hi: f64,
}

impl SumSquaresBox {
    pub fn new(lo: f64, hi: f64) -> Result<Self, ProxError> {
        if !(lo < hi) {
            return Err(ProxError::InvalidBounds { index: 0 });
        }
        Ok(Self { lo, hi })
    }
}

impl ProxOperator for SumSquaresBox {
    fn name(&self) -> &'static str {
        "sum_squares_box"
    }

    fn prox(&self, u: &RealVec, lambda: f64) -> Result<RealVec, ProxError> {
        prox_sumsq_box(u, self.lo, self.hi, lambda)
    }

    fn value(&self, x: &RealVec) -> f64 {
        if x.iter().all(|&v| v >= self.lo - DOMAIN_TOL && v <= self.hi + DOMAIN_TOL) {
            x.norm_squared()
        } else {
            f64::INFINITY
        }
    }
}

/// `g(x) = x^T B x` for symmetric positive semidefinite `B`.
///
/// Keeps the Cholesky factor of `I + 2 lambda B` for the last `lambda`
/// seen, so runs with a constant or eventually constant stepsize factor
/// once.
pub struct QuadraticForm {
    b: RealMat,
    cache: Mutex<Option<(u64, SpdFactor)>>,
}

impl QuadraticForm {
    pub fn new(b: RealMat) -> Result<Self, ProxError> {
        if b.nrows() != b.ncols() {
            return Err(NumericsError::NotSquare { rows: b.nrows(), cols: b.ncols() }.into());
        }
        Ok(Self { b, cache: Mutex::new(None) })
    }

    pub fn matrix(&self) -> &RealMat {
        &self.b
    }
}

impl Clone for QuadraticForm {
    fn clone(&self) -> Self {
        Self { b: self.b.clone(), cache: Mutex::new(None) }
    }
}

impl fmt::Debug for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuadraticForm").field("dim", &self.b.nrows()).finish()
    }
}

impl ProxOperator for QuadraticForm {
    fn name(&self) -> &'static str {
        "quadratic_form"
    }

    fn prox(&self, u: &RealVec, lambda: f64) -> Result<RealVec, ProxError> {
        check_lambda(lambda)?;
        check_len(self.b.nrows(), u.len())?;
        let key = lambda.to_bits();
        let mut cache = self.cache.lock().unwrap_or_else(|e| e.into_inner());
        if let Some((k, factor)) = cache.as_ref() {
            if *k == key {
                return Ok(factor.solve(u));
            }
        }
        let factor = SpdFactor::new(&shifted_system(&self.b, lambda))?;
        let v = factor.solve(u);
        *cache = Some((key, factor));
        Ok(v)
    }

    fn value(&self, x: &RealVec) -> f64 {
        x.dot(&(&self.b * x))
    }
}
