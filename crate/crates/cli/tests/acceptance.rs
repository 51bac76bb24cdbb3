//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use mvi_cli::{run_method, start_point, ParamOverrides};
use mvi_core::baselines::BaselineKind;
use mvi_core::numerics::{random_spd, RealMat, RealVec, SeededRng};
use mvi_core::problems::{make_ex2, make_ex3, MviProblem};
use mvi_core::proxlib::{project_affine_box, prox_box, prox_quadratic_form, prox_sumsq_box};
use mvi_core::solver::{Monitors, PcParams, RunResult, StopRule};
use support::{affine_box_kkt_residual, grid_argmin_1d, penalty_projection, quadratic_prox_stationarity};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

/// Exact `xi` for rational `theta = tn/td`, `gamma = gn/gd`, as a reduced fraction.
fn xi_rational(tn: i64, td: i64, gn: i64, gd: i64) -> (i64, i64) {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    // (2 - g)/g + 1 - t = (2 gd - gn)/gn + (td - tn)/td
    let (an, ad) = (2 * gd - gn, gn);
    let (bn, bd) = (td - tn, td);
    let (sn, sd) = (an * bd + bn * ad, ad * bd);
    // times 1/t = td/tn
    let (n, d) = (sn * td, sd * tn);
    let g = gcd(n, d);
    (n / g, d / g)
}

fn criterion_1() -> Outcome {
    let p = match PcParams::experiment_defaults(1.0) {
        Ok(p) => p,
        Err(e) => return outcome(false, format!("defaults rejected: {e}")),
    };
    let (n, d) = xi_rational(2, 5, 3, 2);
    let exact = (n, d) == (7, 3);
    let err = (p.xi() - 7.0 / 3.0).abs();
    let reps = 10_000;
    let t0 = Instant::now();
    for _ in 0..reps {
        std::hint::black_box(PcParams::new(0.5, 0.9, 0.4, 1.5, 0.5, 1.0, 1.5).unwrap());
    }
    let per_call = t0.elapsed() / reps;
    outcome(
        exact && err <= 1e-15 && per_call < Duration::from_millis(1),
        format!("xi = {} (exact {n}/{d}, float error {err:.1e}), {per_call:?} per validation", p.xi()),
    )
}

struct Family {
    label: String,
    runs: Vec<(MviProblem, PcParams, RunResult)>,
}

fn criterion_2_runs() -> (Vec<Family>, Duration) {
    let t0 = Instant::now();
    let mut families = Vec::new();
    let cases: [(&str, usize); 4] = [("ex2", 2), ("ex3", 20), ("ex3", 50), ("ex3", 100)];
    for (name, dim) in cases {
        let mut runs = Vec::new();
        for seed in 1..=20u64 {
            let prob = if name == "ex2" { make_ex2() } else { make_ex3(dim, seed).expect("ex3 instance") };
            let p = PcParams::experiment_defaults(prob.reference_stepsize()).expect("defaults");
            let start = start_point(dim, seed);
            let r = mvi_core::solve(&prob, &p, &start, &StopRule::default(), Monitors::all()).expect("run");
            runs.push((prob, p, r));
        }
        families.push(Family { label: format!("{name} n={dim}"), runs });
    }
    (families, t0.elapsed())
}

fn criterion_2(families: &[Family], elapsed: Duration) -> Outcome {
    let mut worst_iters = 0;
    let mut worst_dist: f64 = 0.0;
    let mut failures = Vec::new();
    for f in families {
        for (k, (_, _, r)) in f.runs.iter().enumerate() {
            let dist = r.final_dist().unwrap_or(f64::INFINITY);
            worst_iters = worst_iters.max(r.iterations());
            worst_dist = worst_dist.max(dist);
            let tol_ok = r.final_tol().is_some_and(|t| t < 1e-6);
            if !(r.converged() && tol_ok && r.iterations() <= 2000 && dist <= 1e-4) {
                failures.push(format!("{} seed {}", f.label, k + 1));
            }
        }
    }
    let fast = elapsed < Duration::from_secs(10);
    outcome(
        failures.is_empty() && fast,
        format!(
            "80 runs, max iters {worst_iters}, max final distance {worst_dist:.2e}, {:.2} s{}",
            elapsed.as_secs_f64(),
            if failures.is_empty() { String::new() } else { format!(", failed: {}", failures.join("; ")) }
        ),
    )
}

fn criterion_3(families: &[Family]) -> Outcome {
    let mut min32 = f64::INFINITY;
    let mut min33 = f64::INFINITY;
    let mut iterations = 0;
    for f in families {
        for (_, _, r) in &f.runs {
            for rec in &r.trace {
                iterations += 1;
                min32 = min32.min(rec.fejer_slack.unwrap_or(f64::NEG_INFINITY));
                min33 = min33.min(rec.residual_bound_slack.unwrap_or(f64::NEG_INFINITY));
            }
        }
    }
    outcome(
        min32 >= -1e-9 && min33 >= -1e-9,
        format!("{iterations} iterations, min slack {min32:.2e} (distance decrease), {min33:.2e} (residual bound)"),
    )
}

fn criterion_4(families: &[Family]) -> Outcome {
    let mut max_increase = f64::NEG_INFINITY;
    let mut min_psi = f64::INFINITY;
    for f in families {
        for (_, _, r) in &f.runs {
            let psi: Vec<f64> = r.trace.iter().map(|rec| rec.psi.unwrap_or(f64::NAN)).collect();
            for w in psi.windows(2) {
                max_increase = max_increase.max(w[1] - w[0]);
            }
            min_psi = psi.iter().copied().fold(min_psi, f64::min);
        }
    }
    outcome(
        max_increase <= 1e-9 && min_psi >= -1e-9,
        format!("max increase {max_increase:.2e}, min value {min_psi:.2e}"),
    )
}

fn criterion_5(families: &[Family]) -> Outcome {
    let mut increases = 0;
    let mut below = 0;
    let mut min_margin = f64::INFINITY;
    for f in families {
        for (prob, p, r) in &f.runs {
            let beta = prob.lipschitz().expect("known Lipschitz constant");
            let floor = p.lambda0().min(p.mu() / beta);
            for w in r.trace.windows(2) {
                if w[1].lambda > w[0].lambda {
                    increases += 1;
                }
            }
            for rec in &r.trace {
                min_margin = min_margin.min(rec.lambda - floor);
                if rec.lambda < floor - 1e-15 {
                    below += 1;
                }
            }
        }
    }
    outcome(
        increases == 0 && below == 0,
        format!("{increases} increases, {below} below floor, min margin over floor {min_margin:.3e}"),
    )
}

fn criterion_6() -> Outcome {
    let r = mvi_core::probe_example23();
    let pair = r.counterexample.as_ref().map(|c| (c.premise, c.conclusion));
    outcome(
        r.samples == 201 * 201 && r.violations == 0 && pair == Some((2.0, -2.0)),
        format!("{} pairs, {} violations, counterexample {:?}", r.samples, r.violations, pair),
    )
}

fn criterion_7() -> Outcome {
    const N: usize = 100;
    let t0 = Instant::now();
    let mut rng = SeededRng::new(202_407);
    let (mut box_err, mut sumsq_err, mut quad_res, mut affine_err, mut affine_kkt) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..N {
        let n = 1 + (rng.next_u64() % 4) as usize;
        let lo = rng.uniform_vec(n, -3.0, 3.0);
        let hi = &lo + rng.uniform_vec(n, 0.0, 4.0);
        let u = rng.uniform_vec(n, -8.0, 8.0);
        let p = prox_box(&u, &lo, &hi).unwrap();
        for i in 0..n {
            let g = grid_argmin_1d(|t| 0.5 * (u[i] - t).powi(2), lo[i], hi[i]);
            box_err = box_err.max((p[i] - g).abs());
        }
    }
    for _ in 0..N {
        let n = 1 + (rng.next_u64() % 4) as usize;
        let lo = rng.uniform(-4.0, 3.0);
        let hi = lo + rng.uniform(0.0, 3.0);
        let lambda = rng.uniform(0.01, 5.0);
        let u = rng.uniform_vec(n, -10.0, 10.0);
        let p = prox_sumsq_box(&u, lo, hi, lambda).unwrap();
        for i in 0..n {
            let g = grid_argmin_1d(|t| lambda * t * t + 0.5 * (u[i] - t).powi(2), lo, hi);
            sumsq_err = sumsq_err.max((p[i] - g).abs());
        }
    }
    for _ in 0..N {
        let n = 1 + (rng.next_u64() % 20) as usize;
        let b = random_spd(n, &mut rng, 1.0, 2.0).unwrap();
        let lambda = rng.uniform(0.01, 5.0);
        let u = rng.uniform_vec(n, -10.0, 10.0);
        let v = prox_quadratic_form(&u, &b, lambda).unwrap();
        quad_res = quad_res.max(quadratic_prox_stationarity(&u, &v, &b, lambda));
    }
    for _ in 0..N {
        let m = 1 + (rng.next_u64() % 4) as usize;
        let n = 2 + (rng.next_u64() % 4) as usize;
        let map = RealMat::from_fn(m, n, |_, _| rng.uniform(-2.0, 2.0));
        let offset = rng.uniform_vec(m, -1.0, 1.0);
        let anchor = rng.uniform_vec(n, -1.0, 1.0);
        let image = &map * &anchor + &offset;
        let lo = &image - rng.uniform_vec(m, 0.0, 1.5);
        let hi = &image + rng.uniform_vec(m, 0.0, 1.5);
        let u: RealVec = rng.uniform_vec(n, -4.0, 4.0);
        let x = project_affine_box(&u, &map, &offset, &lo, &hi).unwrap();
        affine_err = affine_err.max((&x - penalty_projection(&u, &map, &offset, &lo, &hi)).norm());
        affine_kkt = affine_kkt.max(affine_box_kkt_residual(&u, &x, &map, &offset, &lo, &hi));
    }
    let elapsed = t0.elapsed();
    outcome(
        box_err <= 1e-5
            && sumsq_err <= 1e-5
            && quad_res <= 1e-9
            && affine_err <= 1e-5
            && affine_kkt <= 1e-9
            && elapsed < Duration::from_secs(30),
        format!(
            "{N} inputs each: box {box_err:.1e}, sum-of-squares box {sumsq_err:.1e}, quadratic stationarity {quad_res:.1e}, \
             affine box {affine_err:.1e} / KKT {affine_kkt:.1e}, {:.2} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_8() -> Outcome {
    const RUNS: u64 = 50;
    let stop = StopRule::default();
    let overrides = ParamOverrides::default();
    let mut lines = Vec::new();
    let mut all = true;
    for family in ["ex2", "ex3"] {
        let mut wins = [0usize; 4];
        for seed in 1..=RUNS {
            let dim = if family == "ex2" { 2 } else { [20, 50, 100][(seed % 3) as usize] };
            let prob = if family == "ex2" { make_ex2() } else { make_ex3(dim, seed).expect("ex3 instance") };
            let start = start_point(dim, seed);
            let ours =
                run_method("alg33", &prob, &start, &stop, &overrides, Monitors::none()).expect("alg33").iterations();
            for (k, tag) in BaselineKind::TAGS.iter().enumerate() {
                let theirs = run_method(tag, &prob, &start, &stop, &overrides, Monitors::none()).expect("baseline");
                if ours <= theirs.iterations() {
                    wins[k] += 1;
                }
            }
        }
        for (k, tag) in BaselineKind::TAGS.iter().enumerate() {
            let share = wins[k] as f64 / RUNS as f64;
            all &= share >= 0.8;
            lines.push(format!("{family} vs {tag} {:.0}%", 100.0 * share));
        }
    }
    outcome(all, format!("runs where alg33 needs no more iterations: {}", lines.join(", ")))
}

fn criterion_9() -> Outcome {
    let tmp = std::env::temp_dir().join(format!("mvi-acceptance-{}", std::process::id()));
    let _ = fs::remove_dir_all(&tmp);
    fs::create_dir_all(&tmp).expect("temp dir");
    let cfg = tmp.join("repro.toml");
    fs::write(
        &cfg,
        "[ex3]\nproblem = \"ex3\"\ndim = 20\nseeds = [1, 2]\nmethods = [\"alg33\", \"pcm_he\", \"pcm_dong\", \"ppa_kim\", \"ppa_mainge\"]\n\n\
         [ex2]\nproblem = \"ex2\"\nseeds = [3]\nmethods = [\"alg33\", \"ppa_mainge\"]\n",
    )
    .expect("config");
    for root in ["a", "b"] {
        let status = Command::new(env!("CARGO_BIN_EXE_mvi-bench"))
            .arg("run")
            .arg(&cfg)
            .arg("--out")
            .arg(tmp.join(root))
            .env_remove("MVI_BENCH_OUT")
            .output()
            .expect("spawn mvi-bench")
            .status;
        if !status.success() {
            return outcome(false, format!("run {root} exited with {status}"));
        }
    }
    let strip =
        |text: String| text.lines().map(|l| l.rsplit_once(',').map_or(l, |x| x.0).to_string()).collect::<Vec<_>>();
    let mut compared = 0;
    let mut mismatches = Vec::new();
    for exp in ["ex3", "ex2"] {
        let dir = tmp.join("a").join(exp).join("traces");
        let mut names: Vec<_> = fs::read_dir(&dir).expect("traces").map(|e| e.unwrap().file_name()).collect();
        names.sort();
        for name in names.iter().filter(|n| n.to_string_lossy().ends_with(".csv")) {
            let a = fs::read_to_string(dir.join(name)).unwrap();
            let b = fs::read_to_string(tmp.join("b").join(exp).join("traces").join(name)).unwrap_or_default();
            compared += 1;
            if strip(a) != strip(b) {
                mismatches.push(format!("{exp}/{}", name.to_string_lossy()));
            }
        }
    }
    let _ = fs::remove_dir_all(&tmp);
    outcome(
        mismatches.is_empty() && compared == 12,
        format!("{compared} trace files compared without the timing column, {} differ", mismatches.len()),
    )
}

fn main() {
    // Ignore libtest flags such as `--nocapture` passed through by cargo.
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    results.push((1, "parameter validation", criterion_1()));
    let (families, elapsed) = criterion_2_runs();
    results.push((2, "known-solution convergence", criterion_2(&families, elapsed)));
    results.push((3, "distance and residual monitors", criterion_3(&families)));
    results.push((4, "Lyapunov monitor", criterion_4(&families)));
    results.push((5, "stepsize contract", criterion_5(&families)));
    results.push((6, "monotonicity probe", criterion_6()));
    results.push((7, "prox oracle equivalence", criterion_7()));
    results.push((8, "iteration counts against baselines", criterion_8()));
    results.push((9, "deterministic reproduction", criterion_9()));

    let mut failed = 0;
    for (k, name, o) in &results {
        println!("{} criterion {k} ({name}): {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        if !o.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
