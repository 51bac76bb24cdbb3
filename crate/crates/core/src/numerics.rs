//! Dense linear algebra and seeded randomness.
//!
//! Vectors and matrices are `nalgebra` dynamic types; this module adds the
//! handful of checked operations the solvers rely on, a deterministic
//! random generator, eigenvalue estimates for symmetric positive-definite
//! matrices and SPD solves.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use thiserror::Error;

/// Point of the ambient space `R^n`.
pub type RealVec = DVector<f64>;
/// Dense real matrix.
pub type RealMat = DMatrix<f64>;

/// Default absolute tolerance for desk-scale double precision work.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("power iteration did not converge after {iterations} iterations (best estimate {estimate})")]
    NotConverged { estimate: f64, iterations: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Euclidean inner product.
pub fn dot(a: &RealVec, b: &RealVec) -> Result<f64, NumericsError> {
    if a.len() != b.len() {
        return Err(NumericsError::DimensionMismatch { left: a.len(), right: b.len() });
    }
    Ok(a.dot(b))
}

pub fn norm(a: &RealVec) -> f64 {
    a.norm()
}

/// `true` when every entry is finite.
pub fn all_finite(a: &RealVec) -> bool {
    a.iter().all(|v| v.is_finite())
}

/// Deterministic 64-bit generator (SplitMix64).
///
/// State update and output mixing:
///
/// ```text
/// state = state + 0x9E3779B97F4A7C15            (wrapping)
/// z = state
/// z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9     (wrapping)
/// z = (z ^ (z >> 27)) * 0x94D049BB133111EB     (wrapping)
/// out = z ^ (z >> 31)
/// ```
///
/// Uniform doubles take the top 53 bits: `(out >> 11) * 2^-53`, in `[0, 1)`.
/// Standard normals use one Box-Muller draw per sample:
/// `sqrt(-2 ln(1 - u1)) * cos(2 pi u2)` with `u1` drawn before `u2`.
/// The stream for a given seed is part of the experiment contract; changing
/// any of the above changes every generated problem and start point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeededRng {
    seed: u64,
    state: u64,
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self { seed, state: seed }
    }

    /// Independent stream for `(seed, stream)`: the seed is offset by
    /// `stream * 0xD1B54A32D192ED03` before seeding.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        Self::new(seed.wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03)))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * (1.0 - u1).ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    pub fn uniform_vec(&mut self, n: usize, lo: f64, hi: f64) -> RealVec {
        RealVec::from_iterator(n, (0..n).map(|_| self.uniform(lo, hi)))
    }

    pub fn normal_vec(&mut self, n: usize) -> RealVec {
        RealVec::from_iterator(n, (0..n).map(|_| self.normal()))
    }
}

fn require_square(a: &RealMat) -> Result<usize, NumericsError> {
    if a.nrows() != a.ncols() {
        return Err(NumericsError::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    Ok(a.nrows())
}

/// Largest absolute entry of `A - A^T`.
pub fn asymmetry(a: &RealMat) -> f64 {
    let n = a.nrows().min(a.ncols());
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}

fn require_symmetric(a: &RealMat) -> Result<usize, NumericsError> {
    let n = require_square(a)?;
    let scale = a.amax().max(1.0);
    let asym = asymmetry(a);
    if asym > DEFAULT_TOL * scale {
        return Err(NumericsError::NotSymmetric { asymmetry: asym });
    }
    Ok(n)
}

/// Largest eigenvalue of a symmetric positive-definite matrix by power
/// iteration from the normalized all-ones vector.
///
/// Stops when the eigen-residual `||Bv - rho v||` drops below `tol * rho`
/// (for symmetric `B` some eigenvalue then lies within that distance of
/// `rho`), or when the Rayleigh quotient has stagnated to `1e-3 * tol`
/// relative, which happens first when the top eigenvalues nearly coincide.
pub fn spectral_radius_spd(b: &RealMat, tol: f64, max_iter: usize) -> Result<f64, NumericsError> {
    let n = require_symmetric(b)?;
    if !(tol > 0.0) {
        return Err(NumericsError::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    if n == 0 {
        return Err(NumericsError::InvalidArgument("empty matrix".into()));
    }
    let mut v = RealVec::from_element(n, 1.0 / (n as f64).sqrt());
    let mut rho_prev = f64::NAN;
    let mut rho = 0.0;
    for _ in 0..max_iter {
        let w = b * &v;
        rho = v.dot(&w);
        if !(rho > 0.0) {
            return Err(NumericsError::NotPositiveDefinite);
        }
        let residual = (&w - &v * rho).norm();
        if residual <= tol * rho || (rho - rho_prev).abs() <= 1e-3 * tol * rho {
            return Ok(rho);
        }
        rho_prev = rho;
        let wn = w.norm();
        v = w / wn;
    }
    Err(NumericsError::NotConverged { estimate: rho, iterations: max_iter })
}

/// Smallest eigenvalue of a symmetric positive-definite matrix by inverse
/// power iteration (Cholesky solves) from the normalized all-ones vector.
pub fn smallest_eigenvalue_spd(b: &RealMat, tol: f64, max_iter: usize) -> Result<f64, NumericsError> {
    let n = require_symmetric(b)?;
    if n == 0 {
        return Err(NumericsError::InvalidArgument("empty matrix".into()));
    }
    let factor = SpdFactor::new(b)?;
    let mut v = RealVec::from_element(n, 1.0 / (n as f64).sqrt());
    let mut mu_prev = f64::NAN;
    let mut mu = 0.0;
    for _ in 0..max_iter {
        let w = factor.solve(&v);
        // Rayleigh quotient of B at the normalized iterate.
        let wn = w.norm();
        v = w / wn;
        let bv = b * &v;
        mu = v.dot(&bv);
        let residual = (&bv - &v * mu).norm();
        if residual <= tol * mu || (mu - mu_prev).abs() <= 1e-3 * tol * mu {
            return Ok(mu);
        }
        mu_prev = mu;
    }
    Err(NumericsError::NotConverged { estimate: mu, iterations: max_iter })
}

/// Cholesky factor of a symmetric positive-definite matrix, reusable across
/// right-hand sides.
#[derive(Debug, Clone)]
pub struct SpdFactor {
    chol: Cholesky<f64, Dyn>,
}

impl SpdFactor {
    pub fn new(a: &RealMat) -> Result<Self, NumericsError> {
        require_symmetric(a)?;
        Cholesky::new(a.clone()).map(|chol| Self { chol }).ok_or(NumericsError::NotPositiveDefinite)
    }

    pub fn dim(&self) -> usize {
        self.chol.l_dirty().nrows()
    }

    pub fn solve(&self, b: &RealVec) -> RealVec {
        self.chol.solve(b)
    }
}

/// Solves `A x = b` for symmetric positive-definite `A`.
pub fn solve_spd(a: &RealMat, b: &RealVec) -> Result<RealVec, NumericsError> {
    let n = require_square(a)?;
    if b.len() != n {
        return Err(NumericsError::DimensionMismatch { left: n, right: b.len() });
    }
    Ok(SpdFactor::new(a)?.solve(b))
}

/// Random SPD matrix `Q diag(eigs) Q^T`.
///
/// Draw order: the `n x n` Gaussian matrix row by row, then the `n`
/// eigenvalues uniform in `[eig_lo, eig_hi]`. `Q` is the orthonormal factor
/// of the Gaussian matrix's QR decomposition. The result is symmetrized as
/// `(B + B^T) / 2`.
pub fn random_spd(n: usize, rng: &mut SeededRng, eig_lo: f64, eig_hi: f64) -> Result<RealMat, NumericsError> {
    if n == 0 {
        return Err(NumericsError::InvalidArgument("dimension must be positive".into()));
    }
    if !(eig_lo > 0.0 && eig_lo <= eig_hi && eig_hi.is_finite()) {
        return Err(NumericsError::InvalidArgument(format!(
            "eigenvalue range must satisfy 0 < lo <= hi, got [{eig_lo}, {eig_hi}]"
        )));
    }
    let mut gauss = RealMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            gauss[(i, j)] = rng.normal();
        }
    }
    let eigs = RealVec::from_iterator(n, (0..n).map(|_| rng.uniform(eig_lo, eig_hi)));
    let q = gauss.qr().q();
    let b = &q * RealMat::from_diagonal(&eigs) * q.transpose();
    Ok((&b + b.transpose()) * 0.5)
}
