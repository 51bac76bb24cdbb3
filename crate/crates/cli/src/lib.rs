//! Experiment runner behind the `mvi-bench` binary.
//!
//! A config file holds one TOML table per experiment:
//!
//! ```toml
//! [ex3_n20]
//! problem = "ex3"
//! dim = 20
//! seeds = [1, 2, 3]
//! methods = ["alg33", "pcm_he", "ppa_kim"]
//! epsilon = 1e-6
//! max_iter = 10000
//!
//! [ex3_n20.params]
//! alpha = 0.5
//! ```
//!
//! Each `(method, seed)` run writes `traces/<method>_seed<seed>.csv` and a
//! `.meta.toml` next to it; each experiment writes one `summary.csv`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use mvi_core::baselines::BaselineKind;
use mvi_core::problems::{make_ex1, make_ex2, make_ex3, MviProblem};
use mvi_core::solver::{solve, Monitors, PcParams, RunResult, StartPoint, StopRule};
use mvi_core::SeededRng;
use serde::Deserialize;
use thiserror::Error;

/// Method tags accepted in configs.
pub const METHODS: [&str; 5] = ["alg33", "pcm_he", "pcm_dong", "ppa_kim", "ppa_mainge"];

/// Listed for completeness; no implementation exists.
pub const UNAVAILABLE_METHODS: [&str; 1] = ["alg_jol"];

pub const TRACE_HEADER: &str = "n,tol,lambda,res_wy,psi,dist_sol,elapsed_ns";
pub const SUMMARY_HEADER: &str = "problem,method,seed,dim,iters,converged,final_tol,final_dist,wall_ms";

/// Range of the uniformly drawn start points.
pub const START_RANGE: (f64, f64) = (-5.0, 5.0);

/// RNG stream used for start points, distinct from the problem stream.
const START_STREAM: u64 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemFamily {
    Ex1,
    Ex2,
    Ex3,
}

impl ProblemFamily {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProblemFamily::Ex1 => "ex1",
            ProblemFamily::Ex2 => "ex2",
            ProblemFamily::Ex3 => "ex3",
        }
    }

    fn fixed_dim(&self) -> Option<usize> {
        match self {
            ProblemFamily::Ex1 => Some(3),
            ProblemFamily::Ex2 => Some(2),
            ProblemFamily::Ex3 => None,
        }
    }

    /// Problem instance for `seed`; only `ex3` depends on it.
    pub fn instance(&self, dim: usize, seed: u64) -> Result<MviProblem, CliError> {
        match self {
            ProblemFamily::Ex1 => Ok(make_ex1()),
            ProblemFamily::Ex2 => Ok(make_ex2()),
            ProblemFamily::Ex3 => make_ex3(dim, seed).map_err(|e| CliError::Runtime(format!("ex3 seed {seed}: {e}"))),
        }
    }
}

/// Overrides of the default method parameters.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamOverrides {
    pub alpha: Option<f64>,
    pub delta: Option<f64>,
    pub theta: Option<f64>,
    pub gamma: Option<f64>,
    pub mu: Option<f64>,
    pub sigma: Option<f64>,
    pub lambda0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    problem: ProblemFamily,
    dim: Option<usize>,
    seeds: Vec<u64>,
    methods: Vec<String>,
    epsilon: Option<f64>,
    max_iter: Option<usize>,
    output: Option<PathBuf>,
    #[serde(default)]
    params: ParamOverrides,
}

/// One validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub problem: ProblemFamily,
    pub dim: usize,
    pub seeds: Vec<u64>,
    pub methods: Vec<String>,
    pub stop: StopRule,
    pub params: ParamOverrides,
    /// Relative to the output root.
    pub output: PathBuf,
}

impl ExperimentSpec {
    fn from_raw(name: String, raw: RawExperiment) -> Result<Self, CliError> {
        let invalid = |msg: String| CliError::Invalid(format!("[{name}] {msg}"));
        let dim = match (raw.problem.fixed_dim(), raw.dim) {
            (Some(fixed), None) => fixed,
            (Some(fixed), Some(d)) if d == fixed => fixed,
            (Some(fixed), Some(d)) => {
                return Err(invalid(format!("{} has dimension {fixed}, got dim = {d}", raw.problem.as_str())))
            }
            (None, Some(d)) if d >= 1 => d,
            (None, Some(d)) => return Err(invalid(format!("dim must be at least 1, got {d}"))),
            (None, None) => return Err(invalid("ex3 needs dim".into())),
        };
        for m in &raw.methods {
            if !METHODS.contains(&m.as_str()) && !UNAVAILABLE_METHODS.contains(&m.as_str()) {
                return Err(invalid(format!("unknown method '{m}' (known: {})", METHODS.join(", "))));
            }
        }
        let stop = StopRule::new(raw.epsilon.unwrap_or(1e-6), raw.max_iter.unwrap_or(10_000));
        if stop.epsilon.is_nan() || stop.epsilon <= 0.0 {
            return Err(invalid(format!("epsilon must be positive, got {}", stop.epsilon)));
        }
        let spec = Self {
            output: raw.output.unwrap_or_else(|| PathBuf::from(&name)),
            name,
            problem: raw.problem,
            dim,
            seeds: raw.seeds,
            methods: raw.methods,
            stop,
            params: raw.params,
        };
        // Parameter overrides are checked once up front.
        alg33_params(&spec.params, 1.0).map_err(|e| CliError::Invalid(format!("[{}] {e}", spec.name)))?;
        Ok(spec)
    }
}

/// Parameters of `alg33` with overrides applied; `reference` is the
/// problem's default initial stepsize.
pub fn alg33_params(o: &ParamOverrides, reference: f64) -> Result<PcParams, CliError> {
    PcParams::new(
        o.alpha.unwrap_or(0.5),
        o.delta.unwrap_or(0.9),
        o.theta.unwrap_or(0.4),
        o.gamma.unwrap_or(1.5),
        o.mu.unwrap_or(0.5),
        o.lambda0.unwrap_or(reference),
        o.sigma.unwrap_or(1.5),
    )
    .map_err(|e| CliError::Invalid(e.to_string()))
}

/// Parses a config file's text into experiments, in file order.
pub fn parse_config(text: &str) -> Result<Vec<ExperimentSpec>, CliError> {
    let table: toml::Table = text.parse().map_err(|e| CliError::Invalid(format!("config: {e}")))?;
    let mut specs = Vec::new();
    for (name, value) in table {
        if !value.is_table() {
            return Err(CliError::Invalid(format!("config: top-level key '{name}' must be a table")));
        }
        let raw: RawExperiment = value.try_into().map_err(|e| CliError::Invalid(format!("[{name}] {e}")))?;
        specs.push(ExperimentSpec::from_raw(name, raw)?);
    }
    Ok(specs)
}

pub fn load_config(path: &Path) -> Result<Vec<ExperimentSpec>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

/// `x0`, `x_{-1}` and `w_{-1}` drawn in that order from `[-5, 5]^dim`.
pub fn start_point(dim: usize, seed: u64) -> StartPoint {
    let mut rng = SeededRng::with_stream(seed, START_STREAM);
    let (lo, hi) = START_RANGE;
    let x0 = rng.uniform_vec(dim, lo, hi);
    let x_prev = rng.uniform_vec(dim, lo, hi);
    let w_prev = rng.uniform_vec(dim, lo, hi);
    StartPoint::new(x0, x_prev, w_prev)
}

/// Runs `method` with default parameters (plus overrides for `alg33`).
pub fn run_method(
    method: &str,
    prob: &MviProblem,
    start: &StartPoint,
    stop: &StopRule,
    overrides: &ParamOverrides,
    monitors: Monitors,
) -> Result<RunResult, CliError> {
    let result = if method == "alg33" {
        let p = alg33_params(overrides, prob.reference_stepsize())?;
        solve(prob, &p, start, stop, monitors)
    } else {
        let kind = BaselineKind::from_tag(method, prob)
            .ok_or_else(|| CliError::Invalid(format!("unknown method '{method}'")))?;
        kind.run(prob, start, stop)
    };
    result.map_err(|e| CliError::Runtime(format!("{method} on {}: {e}", prob.name())))
}

fn push_opt(out: &mut String, v: Option<f64>) {
    if let Some(v) = v {
        let _ = write!(out, "{v:e}");
    }
}

/// Per-iteration CSV of a run.
pub fn trace_csv(run: &RunResult) -> String {
    let mut out = String::with_capacity(64 * (run.trace.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in &run.trace {
        let _ = write!(out, "{},{:e},{:e},{:e},", r.n, r.tol, r.lambda, r.res_wy);
        push_opt(&mut out, r.psi);
        out.push(',');
        push_opt(&mut out, r.dist_sol);
        let _ = writeln!(out, ",{}", r.elapsed_ns);
    }
    out
}

/// One line of `summary.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub problem: String,
    pub method: String,
    pub seed: u64,
    pub dim: usize,
    pub iters: usize,
    pub converged: bool,
    pub final_tol: Option<f64>,
    pub final_dist: Option<f64>,
    pub wall_ms: f64,
}

impl SummaryRow {
    pub fn csv_line(&self) -> String {
        let mut out =
            format!("{},{},{},{},{},{},", self.problem, self.method, self.seed, self.dim, self.iters, self.converged);
        push_opt(&mut out, self.final_tol);
        out.push(',');
        push_opt(&mut out, self.final_dist);
        let _ = write!(out, ",{:e}", self.wall_ms);
        out
    }
}

/// Median iterations and wall time of one method.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodAggregate {
    pub method: String,
    pub runs: usize,
    pub converged: usize,
    pub median_iters: f64,
    pub median_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultsTable {
    pub experiment: String,
    pub rows: Vec<SummaryRow>,
    pub unavailable: Vec<String>,
}

fn median(mut xs: Vec<f64>) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.sort_by(f64::total_cmp);
    let k = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[k]
    } else {
        0.5 * (xs[k - 1] + xs[k])
    }
}

impl ResultsTable {
    pub fn summary_csv(&self) -> String {
        let mut out = String::from(SUMMARY_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.csv_line());
            out.push('\n');
        }
        out
    }

    /// Aggregates per method, in first-appearance order.
    pub fn aggregates(&self) -> Vec<MethodAggregate> {
        let mut order: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !order.contains(&r.method.as_str()) {
                order.push(&r.method);
            }
        }
        order
            .into_iter()
            .map(|m| {
                let rows: Vec<&SummaryRow> = self.rows.iter().filter(|r| r.method == m).collect();
                MethodAggregate {
                    method: m.to_string(),
                    runs: rows.len(),
                    converged: rows.iter().filter(|r| r.converged).count(),
                    median_iters: median(rows.iter().map(|r| r.iters as f64).collect()),
                    median_ms: median(rows.iter().map(|r| r.wall_ms).collect()),
                }
            })
            .collect()
    }

    pub fn report(&self) -> String {
        let mut out = format!("experiment {}\n", self.experiment);
        for m in &self.unavailable {
            let _ = writeln!(out, "  {m:<11} unavailable: no implementation");
        }
        if self.rows.is_empty() {
            out.push_str("  no runs\n");
        }
        for a in self.aggregates() {
            let _ = writeln!(
                out,
                "  {:<11} runs {:>3}  converged {:>3}  median iters {:>8.1}  median ms {:>10.3}",
                a.method, a.runs, a.converged, a.median_iters, a.median_ms
            );
        }
        out
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn meta_toml(run: &RunResult, seed: u64) -> String {
    let mut table = toml::Table::new();
    table.insert("method".into(), run.method.clone().into());
    table.insert("seed".into(), toml::Value::Integer(seed as i64));
    table.insert("status".into(), run.status.as_str().into());
    let params: toml::Table = run.metadata.iter().map(|(k, v)| (k.clone(), toml::Value::from(v.clone()))).collect();
    table.insert("params".into(), params.into());
    toml::to_string(&table).unwrap_or_default()
}

/// Runs every `(method, seed)` pair of `spec`, writing traces and the
/// summary under `out_root / spec.output`.
pub fn run_experiment(spec: &ExperimentSpec, out_root: &Path) -> Result<ResultsTable, CliError> {
    let dir = out_root.join(&spec.output);
    let traces = dir.join("traces");
    fs::create_dir_all(&traces).map_err(|e| CliError::Runtime(format!("{}: {e}", traces.display())))?;

    let mut table = ResultsTable { experiment: spec.name.clone(), ..Default::default() };
    let mut problems: BTreeMap<u64, MviProblem> = BTreeMap::new();
    for m in &spec.methods {
        if UNAVAILABLE_METHODS.contains(&m.as_str()) && !table.unavailable.contains(m) {
            table.unavailable.push(m.clone());
        }
    }
    for &seed in &spec.seeds {
        let prob = match problems.entry(seed) {
            std::collections::btree_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::btree_map::Entry::Vacant(e) => e.insert(spec.problem.instance(spec.dim, seed)?),
        };
        let prob = &*prob;
        let start = start_point(spec.dim, seed);
        for method in spec.methods.iter().filter(|m| METHODS.contains(&m.as_str())) {
            let t0 = Instant::now();
            let run = run_method(method, prob, &start, &spec.stop, &spec.params, Monitors::all())?;
            let wall_ms = t0.elapsed().as_secs_f64() * 1e3;
            let stem = format!("{method}_seed{seed}");
            write_file(&traces.join(format!("{stem}.csv")), &trace_csv(&run))?;
            write_file(&traces.join(format!("{stem}.meta.toml")), &meta_toml(&run, seed))?;
            table.rows.push(SummaryRow {
                problem: spec.problem.as_str().into(),
                method: method.clone(),
                seed,
                dim: spec.dim,
                iters: run.iterations(),
                converged: run.converged(),
                final_tol: run.final_tol(),
                final_dist: run.final_dist(),
                wall_ms,
            });
        }
    }
    write_file(&dir.join("summary.csv"), &table.summary_csv())?;
    Ok(table)
}

/// Text report of the parameter conditions; `Ok` iff all hold.
pub fn validate_report(alpha: f64, delta: f64, theta: f64, gamma: f64, sigma: f64) -> (bool, String) {
    let r = mvi_core::solver::assess_params(alpha, delta, theta, gamma, sigma);
    let mut out = String::new();
    let _ = writeln!(out, "xi                    = {}", r.xi);
    let _ = writeln!(out, "sigma/(1+sigma)       = {}", r.alpha_cap);
    let _ = writeln!(out, "delta lower bound 1   = {}", r.delta_bound_first);
    match r.delta_bound_second {
        Some(b) => {
            let _ = writeln!(out, "delta lower bound 2   = {b}");
        }
        None => out.push_str("delta lower bound 2   = none (alpha = 0)\n"),
    }
    for c in &r.checks {
        let _ = writeln!(out, "{} {}", if c.passed { "pass" } else { "FAIL" }, c.name);
    }
    let ok = r.passed();
    out.push_str(if ok { "valid\n" } else { "invalid\n" });
    (ok, out)
}

/// Text report of the monotonicity probe; `Ok` iff the expected outcome.
pub fn probe_report() -> (bool, String) {
    let r = mvi_core::probe_example23();
    let mut out = String::new();
    let _ = writeln!(out, "property        {}", r.property);
    let _ = writeln!(out, "grid pairs      {}", r.samples);
    let _ = writeln!(out, "violations      {}", r.violations);
    let _ = writeln!(out, "plain pseudomonotonicity violations {}", r.plain_violations);
    match &r.counterexample {
        Some(c) => {
            let _ = writeln!(
                out,
                "counterexample  u = {}, v = {}: <T u, v - u> = {}, <T v, v - u> = {}",
                c.u, c.v, c.premise, c.conclusion
            );
        }
        None => out.push_str("counterexample  none\n"),
    }
    (r.violations == 0 && r.counterexample.is_some(), out)
}
