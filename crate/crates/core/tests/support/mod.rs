//! Reference computations that share no code with the library.

#![allow(dead_code)]

use mvi_core::numerics::{RealMat, RealVec};

/// Minimizer of a convex `f` on `[lo, hi]` by repeated grid refinement.
pub fn grid_argmin_1d(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    const POINTS: usize = 101;
    let (mut a, mut b) = (lo, hi);
    let mut best = lo;
    for _ in 0..60 {
        let h = (b - a) / (POINTS - 1) as f64;
        let mut best_val = f64::INFINITY;
        for k in 0..POINTS {
            let t = if k == POINTS - 1 { b } else { a + h * k as f64 };
            let val = f(t);
            if val < best_val {
                best_val = val;
                best = t;
            }
        }
        a = (best - 2.0 * h).max(lo);
        b = (best + 2.0 * h).min(hi);
        if b - a <= 1e-15 * (1.0 + best.abs()) {
            break;
        }
    }
    best
}

/// Minimizer of the strongly convex `f` over `R^n` by cyclic exact line
/// minimization along coordinates, each solved with [`grid_argmin_1d`] on
/// `[x_i - radius, x_i + radius]`.
pub fn coordinate_descent(f: impl Fn(&RealVec) -> f64, x0: &RealVec, radius: f64, sweeps: usize) -> RealVec {
    let mut x = x0.clone();
    for _ in 0..sweeps {
        let before = x.clone();
        for i in 0..x.len() {
            let c = x[i];
            let t = grid_argmin_1d(
                |t| {
                    let mut y = x.clone();
                    y[i] = t;
                    f(&y)
                },
                c - radius,
                c + radius,
            );
            x[i] = t;
        }
        if (&x - &before).norm() < 1e-11 {
            break;
        }
    }
    x
}

/// Projection onto `{x : lo <= M x + d <= hi}` by a quadratic penalty
/// with weights up to `1e8`, each penalty problem solved by semismooth
/// Newton with Armijo backtracking.
pub fn penalty_projection(u: &RealVec, m: &RealMat, d: &RealVec, lo: &RealVec, hi: &RealVec) -> RealVec {
    let n = u.len();
    let excess = |r: f64, i: usize| {
        if r < lo[i] {
            r - lo[i]
        } else if r > hi[i] {
            r - hi[i]
        } else {
            0.0
        }
    };
    let penalty = |x: &RealVec, rho: f64| {
        let r = m * x + d;
        0.5 * (x - u).norm_squared() + 0.5 * rho * (0..m.nrows()).map(|i| excess(r[i], i).powi(2)).sum::<f64>()
    };
    let mut x = u.clone();
    let mut rho = 1e2;
    while rho <= 1e8 {
        for _ in 0..500 {
            let r = m * &x + d;
            let mut h = RealMat::identity(n, n);
            let mut grad = &x - u;
            for i in 0..m.nrows() {
                let e = excess(r[i], i);
                if e == 0.0 {
                    continue;
                }
                let row = m.row(i).transpose();
                h += &row * row.transpose() * rho;
                grad += &row * (rho * e);
            }
            let dir = -h.cholesky().expect("penalty Hessian is SPD").solve(&grad);
            let slope = grad.dot(&dir);
            if -slope <= 1e-30 {
                break;
            }
            let f0 = penalty(&x, rho);
            let mut t = 1.0;
            while penalty(&(&x + &dir * t), rho) > f0 + 1e-4 * t * slope && t > 1e-12 {
                t *= 0.5;
            }
            x += &dir * t;
            if (&dir * t).norm() <= 1e-15 * (1.0 + x.norm()) {
                break;
            }
        }
        rho *= 10.0;
    }
    x
}

/// KKT residual of `x` as the projection of `u` onto
/// `{x : lo <= M x + d <= hi}`: primal infeasibility plus the stationarity
/// and sign errors of least-squares multipliers on the near-active rows.
pub fn affine_box_kkt_residual(u: &RealVec, x: &RealVec, m: &RealMat, d: &RealVec, lo: &RealVec, hi: &RealVec) -> f64 {
    let r = m * x + d;
    let act_tol = 1e-9;
    let mut infeas: f64 = 0.0;
    let mut active = Vec::new();
    for i in 0..m.nrows() {
        infeas = infeas.max(lo[i] - r[i]).max(r[i] - hi[i]);
        if (r[i] - lo[i]).abs() <= act_tol || (r[i] - hi[i]).abs() <= act_tol {
            active.push(i);
        }
    }
    let g = u - x;
    if active.is_empty() {
        return infeas.max(0.0) + g.norm();
    }
    // u - x = A^T nu with nu >= 0 at upper bounds and nu <= 0 at lower bounds.
    let a_t = RealMat::from_fn(x.len(), active.len(), |c, k| m[(active[k], c)]);
    let svd = a_t.clone().svd(true, true);
    let nu = svd.solve(&g, 1e-12).expect("svd solve");
    let stat = (&a_t * &nu - &g).norm();
    let mut sign: f64 = 0.0;
    for (k, &i) in active.iter().enumerate() {
        let at_lo = (r[i] - lo[i]).abs() <= act_tol;
        let at_hi = (r[i] - hi[i]).abs() <= act_tol;
        if at_lo && !at_hi {
            sign = sign.max(nu[k]);
        } else if at_hi && !at_lo {
            sign = sign.max(-nu[k]);
        }
    }
    infeas.max(0.0) + stat + sign
}

/// `||v + 2 lambda B v - u|| / (1 + ||u||)`.
pub fn quadratic_prox_stationarity(u: &RealVec, v: &RealVec, b: &RealMat, lambda: f64) -> f64 {
    (v + b * v * (2.0 * lambda) - u).norm() / (1.0 + u.norm())
}
