//! Batch front end: problem files in, reports out.
//!
//! Input is validated completely before anything runs, so a malformed entry aborts the
//! whole batch with a path-qualified message. Tasks then run on a bounded thread pool and
//! reports come back in input order.

pub mod cli;
mod schema;
mod suites;

pub use cli::{execute, main as cli_main, Args, Format, Outcome};
pub use schema::{
    FieldSpec, MatrixField, Output, Problem, ProblemFile, Report, Status, SuiteCheck, SuiteReport, Task, TensorField, Timings, VerifyOutcome, SCHEMA_VERSION,
};
pub use suites::{run_suite, SUITES};

use std::time::Instant;

use rayon::prelude::*;
use serde_json::Value;

use crate::bilinear::{beta_bilinear_correction, bilinear_point_correction_xh, ck_bilinear_correction, BilinearMap, FormField, XhCorrector};
use crate::bpb::{beta_perturbation, ck_operator_correction, functional_point_correction, hilbert_domain_correction, BetaStructure, BpbCertificate};
use crate::error::{LabError, Result};
use crate::linalg::{from_rows, Vector};
use crate::operators::Operator;
use crate::probe::{counterexample_search, estimate_eta_pair};
use crate::search::SearchBudget;
use crate::spaces::{make_space, modulus_convexity, modulus_smoothness, smoothness_defect, BoundKind, ModulusEstimate, NormedSpace, SpaceDescriptor, SpaceKind};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Defaults applied to every problem; command-line values win over file values.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub jobs: usize,
    pub seed: Option<u64>,
    pub budget: Option<usize>,
}

/// Parsed input: a batch file, a bare array of problems or a single problem.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedInput {
    pub problems: Vec<Problem>,
    pub single: bool,
    /// Entries came from a `{version, problems}` file.
    pub batch_file: bool,
}

fn check_version(v: Option<u32>, path: &str) -> std::result::Result<(), String> {
    match v {
        Some(SCHEMA_VERSION) => Ok(()),
        Some(v) => Err(format!("{path}.version: unsupported schema version {v} (expected {SCHEMA_VERSION})")),
        None => Err(format!("{path}.version: missing")),
    }
}

fn problem_at(v: Value, path: &str) -> std::result::Result<Problem, String> {
    serde_json::from_value(v).map_err(|e| format!("{path}: {e}"))
}

/// Parse a problem file; errors carry the JSON path of the offending entry.
pub fn parse_input(text: &str) -> std::result::Result<ParsedInput, String> {
    let v: Value = serde_json::from_str(text).map_err(|e| format!("input: {e}"))?;
    match v {
        Value::Object(mut map) if map.contains_key("problems") => {
            let version = map.get("version").and_then(Value::as_u64).map(|v| v as u32);
            check_version(version, "$")?;
            let Some(Value::Array(items)) = map.remove("problems") else {
                return Err("$.problems: expected an array".into());
            };
            for key in map.keys() {
                if key != "version" {
                    return Err(format!("$.{key}: unknown field"));
                }
            }
            let problems = items.into_iter().enumerate().map(|(i, p)| problem_at(p, &format!("$.problems[{i}]"))).collect::<std::result::Result<Vec<_>, _>>()?;
            Ok(ParsedInput { problems, single: false, batch_file: true })
        }
        Value::Object(_) => {
            let p = problem_at(v, "$")?;
            check_version(p.version, "$")?;
            Ok(ParsedInput { problems: vec![p], single: true, batch_file: false })
        }
        Value::Array(items) => {
            let problems = items
                .into_iter()
                .enumerate()
                .map(|(i, p)| {
                    let path = format!("$[{i}]");
                    let p = problem_at(p, &path)?;
                    check_version(p.version, &path)?;
                    Ok(p)
                })
                .collect::<std::result::Result<Vec<_>, String>>()?;
            Ok(ParsedInput { problems, single: false, batch_file: false })
        }
        _ => Err("$: expected an object or an array".into()),
    }
}

#[derive(Clone, Debug)]
enum OpMethod {
    Hilbert,
    Beta(BetaStructure),
    Ck,
    Unsupported(String),
}

#[derive(Clone, Debug)]
enum BilMethod {
    Xh,
    Beta(BetaStructure),
    Unsupported(String),
}

#[derive(Clone, Debug)]
enum ModKind {
    Convexity(f64),
    Smoothness(f64),
    Defect,
}

#[derive(Clone, Debug)]
enum Prepared {
    Functional { space: NormedSpace, f: Vector, x0: Vector, epsilon: f64 },
    Operator { t: Operator, x0: Vector, epsilon: f64, method: OpMethod },
    Bilinear { b: BilinearMap, x0: Vector, y0: Vector, epsilon: f64, method: BilMethod },
    Field { field: FormField, x0: Vector, y0: Vector, epsilon: f64 },
    Modulus { space: NormedSpace, kind: ModKind },
    ProbeEta { x: NormedSpace, y: NormedSpace, epsilon: f64 },
    Counterexample { x: NormedSpace, y: NormedSpace, epsilon: f64, eta: f64 },
    Suite { name: String },
}

/// A validated problem ready to run.
#[derive(Clone, Debug)]
pub struct Job {
    index: usize,
    id: Option<String>,
    task: Task,
    eta_override: Option<f64>,
    budget: SearchBudget,
    prepared: Prepared,
}

type Checked<T> = std::result::Result<T, String>;

struct Ctx<'a> {
    path: String,
    p: &'a Problem,
}

impl Ctx<'_> {
    fn err<T>(&self, field: &str, msg: impl std::fmt::Display) -> Checked<T> {
        Err(format!("{}.{field}: {msg}", self.path))
    }

    fn need<'b, T>(&self, v: &'b Option<T>, field: &str) -> Checked<&'b T> {
        v.as_ref().ok_or_else(|| format!("{}.{field}: required for task {}", self.path, task_name(self.p.task)))
    }

    fn space(&self, d: &Option<SpaceDescriptor>, field: &str) -> Checked<NormedSpace> {
        let d = self.need(d, field)?;
        make_space(d).or_else(|e| self.err(field, e))
    }

    fn space_or_scalars(&self, d: &Option<SpaceDescriptor>, field: &str) -> Checked<NormedSpace> {
        match d {
            Some(_) => self.space(d, field),
            None => Ok(NormedSpace::scalars()),
        }
    }

    fn vector(&self, v: &[f64], dim: usize, field: &str) -> Checked<Vector> {
        if v.len() != dim {
            return self.err(field, format!("expected {dim} entries, got {}", v.len()));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return self.err(field, "non-finite entry");
        }
        Ok(Vector::from_column_slice(v))
    }

    fn epsilon(&self) -> Checked<f64> {
        let e = *self.need(&self.p.epsilon, "epsilon")?;
        if !(e > 0.0 && e < 2.0) {
            return self.err("epsilon", format!("must lie in (0, 2), got {e}"));
        }
        Ok(e)
    }

    fn two_points(&self, x: &NormedSpace, y: &NormedSpace) -> Checked<(Vector, Vector)> {
        let pts = self.need(&self.p.points, "points")?;
        if pts.len() != 2 {
            return self.err("points", format!("expected [x0, y0], got {} vectors", pts.len()));
        }
        Ok((self.vector(&pts[0], x.dim(), "points[0]")?, self.vector(&pts[1], y.dim(), "points[1]")?))
    }

    fn beta(&self, y: &NormedSpace) -> Checked<Option<BetaStructure>> {
        match &self.p.beta {
            None => Ok(None),
            Some(b) => {
                if &b.codomain != y {
                    return self.err("beta.codomain", "must equal the codomain of the task");
                }
                b.validate().or_else(|e| self.err("beta", e))?;
                Ok(Some(b.clone()))
            }
        }
    }
}

fn task_name(t: Task) -> String {
    serde_json::to_value(t).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

fn is_linf(y: &NormedSpace) -> bool {
    matches!(y.kind(), SpaceKind::Lp { p } if p.is_infinite()) || y.dim() == 1
}

/// Validate one problem and build its inputs.
pub fn prepare(index: usize, path: &str, p: &Problem, opts: &RunOptions) -> Checked<Job> {
    let c = Ctx { path: path.to_string(), p };
    let seed = opts.seed.or(p.seed).unwrap_or(0);
    let iterations = opts.budget.or(p.budget).unwrap_or(SearchBudget::default().iterations);
    if iterations == 0 {
        return c.err("budget", "must be positive");
    }
    let budget = SearchBudget { seed, ..SearchBudget::default() }.with_iterations(iterations);
    if let Some(e) = p.eta_override {
        if !(e > 0.0 && e <= 1.0) {
            return c.err("etaOverride", format!("must lie in (0, 1], got {e}"));
        }
    }
    let prepared = match p.task {
        Task::CorrectFunctional => {
            let space = c.space(&p.space, "space")?;
            let f = c.vector(c.need(&p.functional, "functional")?, space.dim(), "functional")?;
            let x0 = c.vector(c.need(&p.point, "point")?, space.dim(), "point")?;
            Prepared::Functional { space, f, x0, epsilon: c.epsilon()? }
        }
        Task::CorrectOperator => {
            let x = c.space(&p.space, "space")?;
            let y = c.space(&p.codomain, "codomain")?;
            let m = from_rows(&c.need(&p.operator, "operator")?.matrix).or_else(|e| c.err("operator.matrix", e))?;
            if m.nrows() != y.dim() || m.ncols() != x.dim() {
                return c.err("operator.matrix", format!("expected {}×{} (codomain × domain), got {}×{}", y.dim(), x.dim(), m.nrows(), m.ncols()));
            }
            let t = Operator::new(m, x.clone(), y.clone()).or_else(|e| c.err("operator.matrix", e))?;
            let x0 = c.vector(c.need(&p.point, "point")?, x.dim(), "point")?;
            let beta = c.beta(&y)?;
            let method = match p.method.as_deref().unwrap_or("auto") {
                "hilbert" => OpMethod::Hilbert,
                "ck" => OpMethod::Ck,
                "beta" => OpMethod::Beta(match beta {
                    Some(b) => b,
                    None => BetaStructure::for_codomain(&y).or_else(|e| c.err("beta", e))?,
                }),
                "auto" => match beta {
                    Some(b) => OpMethod::Beta(b),
                    None if x.is_hilbert() => OpMethod::Hilbert,
                    None if is_linf(&y) => OpMethod::Beta(BetaStructure::for_codomain(&y).or_else(|e| c.err("codomain", e))?),
                    None => OpMethod::Unsupported(format!("no correction applies to {} → {}; give `method` or `beta`", x.label(), y.label())),
                },
                other => return c.err("method", format!("unknown operator method {other:?}")),
            };
            Prepared::Operator { t, x0, epsilon: c.epsilon()?, method }
        }
        Task::CorrectBilinear => {
            let x = c.space(&p.space, "space")?;
            let y = c.space(&p.second_space, "secondSpace")?;
            let z = c.space_or_scalars(&p.codomain, "codomain")?;
            let tensor = &c.need(&p.bilinear, "bilinear")?.tensor;
            if tensor.len() != z.dim() {
                return c.err("bilinear.tensor", format!("expected {} slices, got {}", z.dim(), tensor.len()));
            }
            let mut slices = Vec::with_capacity(tensor.len());
            for (k, s) in tensor.iter().enumerate() {
                let m = from_rows(s).or_else(|e| c.err(&format!("bilinear.tensor[{k}]"), e))?;
                if m.nrows() != x.dim() || m.ncols() != y.dim() {
                    return c.err(&format!("bilinear.tensor[{k}]"), format!("expected {}×{}, got {}×{}", x.dim(), y.dim(), m.nrows(), m.ncols()));
                }
                slices.push(m);
            }
            let b = BilinearMap::new(slices, x.clone(), y.clone(), z.clone()).or_else(|e| c.err("bilinear", e))?;
            let (x0, y0) = c.two_points(&x, &y)?;
            let beta = c.beta(&z)?;
            let method = match p.method.as_deref().unwrap_or("auto") {
                "xh" => BilMethod::Xh,
                "beta" => BilMethod::Beta(match beta {
                    Some(b) => b,
                    None => BetaStructure::for_codomain(&z).or_else(|e| c.err("beta", e))?,
                }),
                "auto" => match beta {
                    Some(b) => BilMethod::Beta(b),
                    None if z.dim() == 1 => BilMethod::Xh,
                    None if is_linf(&z) => BilMethod::Beta(BetaStructure::for_codomain(&z).or_else(|e| c.err("codomain", e))?),
                    None => BilMethod::Unsupported(format!("no correction applies to codomain {}; give `method` or `beta`", z.label())),
                },
                other => return c.err("method", format!("unknown bilinear method {other:?}")),
            };
            Prepared::Bilinear { b, x0, y0, epsilon: c.epsilon()?, method }
        }
        Task::CorrectCkBilinear => {
            let x = c.space(&p.space, "space")?;
            let y = c.space(&p.second_space, "secondSpace")?;
            let spec = c.need(&p.field, "field")?;
            if spec.forms.is_empty() {
                return c.err("field.forms", "at least one form is required");
            }
            let mut forms = Vec::with_capacity(spec.forms.len());
            for (k, rows) in spec.forms.iter().enumerate() {
                let m = from_rows(rows).or_else(|e| c.err(&format!("field.forms[{k}]"), e))?;
                if m.nrows() != x.dim() || m.ncols() != y.dim() {
                    return c.err(&format!("field.forms[{k}]"), format!("expected {}×{}, got {}×{}", x.dim(), y.dim(), m.nrows(), m.ncols()));
                }
                forms.push(BilinearMap::form(m, x.clone(), y.clone()).or_else(|e| c.err(&format!("field.forms[{k}]"), e))?);
            }
            let field = match &spec.points {
                Some(labels) => FormField::new(labels.clone(), forms),
                None => FormField::labeled(forms),
            }
            .or_else(|e| c.err("field", e))?;
            let (x0, y0) = c.two_points(&x, &y)?;
            Prepared::Field { field, x0, y0, epsilon: c.epsilon()? }
        }
        Task::Modulus => {
            let space = c.space(&p.space, "space")?;
            let kind = match p.modulus.as_deref().unwrap_or("convexity") {
                "convexity" => {
                    let e = *c.need(&p.epsilon, "epsilon")?;
                    if !(e > 0.0 && e <= 2.0) {
                        return c.err("epsilon", format!("must lie in (0, 2], got {e}"));
                    }
                    ModKind::Convexity(e)
                }
                "smoothness" => {
                    let t = *c.need(&p.epsilon, "epsilon")?;
                    if !(t > 0.0 && t.is_finite()) {
                        return c.err("epsilon", format!("must be positive, got {t}"));
                    }
                    ModKind::Smoothness(t)
                }
                "defect" => ModKind::Defect,
                other => return c.err("modulus", format!("unknown modulus {other:?}")),
            };
            Prepared::Modulus { space, kind }
        }
        Task::ProbeEta => {
            let x = c.space(&p.space, "space")?;
            let y = c.space_or_scalars(&p.codomain, "codomain")?;
            Prepared::ProbeEta { x, y, epsilon: c.epsilon()? }
        }
        Task::Counterexample => {
            let x = c.space(&p.space, "space")?;
            let y = c.space_or_scalars(&p.codomain, "codomain")?;
            let eta = *c.need(&p.eta, "eta")?;
            if !(eta > 0.0 && eta.is_finite()) {
                return c.err("eta", format!("must be positive, got {eta}"));
            }
            Prepared::Counterexample { x, y, epsilon: c.epsilon()?, eta }
        }
        Task::Suite => {
            let name = c.need(&p.suite, "suite")?;
            if !SUITES.contains(&name.as_str()) {
                return c.err("suite", format!("unknown suite {name:?}; expected one of {SUITES:?}"));
            }
            Prepared::Suite { name: name.clone() }
        }
    };
    Ok(Job { index, id: p.id.clone(), task: p.task, eta_override: p.eta_override, budget, prepared })
}

/// Largest value the task's input reaches at its point (1 means attaining).
fn input_value(prep: &Prepared) -> Result<Option<f64>> {
    Ok(match prep {
        Prepared::Functional { f, x0, .. } => Some(f.dot(x0).abs()),
        Prepared::Operator { t, x0, .. } => Some(t.codomain().norm_of(t.apply(x0)?.as_slice())),
        Prepared::Bilinear { b, x0, y0, .. } => Some(b.value_norm(x0, y0)?),
        Prepared::Field { field, x0, y0, .. } => Some(field.eval(x0, y0)?.amax()),
        _ => None,
    })
}

fn certified(cert: BpbCertificate) -> (Status, Option<Output>, Option<String>) {
    let status = if cert.heuristic { Status::Heuristic } else { Status::Certified };
    (status, Some(Output::Certificate(cert)), None)
}

fn execute_job(job: &Job) -> Result<(Status, Option<Output>, Option<String>)> {
    if let Some(eta) = job.eta_override {
        if let Some(v) = input_value(&job.prepared)? {
            if v <= 1.0 - eta {
                return Err(LabError::PreconditionGap { value: v, threshold: 1.0 - eta });
            }
        }
    }
    Ok(match &job.prepared {
        Prepared::Functional { space, f, x0, epsilon } => certified(functional_point_correction(space, f, x0, *epsilon)?.1),
        Prepared::Operator { t, x0, epsilon, method } => certified(
            match method {
                OpMethod::Hilbert => hilbert_domain_correction(t, x0, *epsilon)?,
                OpMethod::Beta(beta) => beta_perturbation(t, x0, *epsilon, beta)?,
                OpMethod::Ck => ck_operator_correction(t, x0, *epsilon)?,
                OpMethod::Unsupported(m) => return Err(LabError::Unsupported(m.clone())),
            }
            .1,
        ),
        Prepared::Bilinear { b, x0, y0, epsilon, method } => certified(
            match method {
                BilMethod::Xh => bilinear_point_correction_xh(b, x0, y0, *epsilon)?,
                BilMethod::Beta(beta) => beta_bilinear_correction(b, x0, y0, *epsilon, beta, &XhCorrector)?,
                BilMethod::Unsupported(m) => return Err(LabError::Unsupported(m.clone())),
            }
            .1,
        ),
        Prepared::Field { field, x0, y0, epsilon } => certified(ck_bilinear_correction(field, x0, y0, *epsilon, &XhCorrector)?.1),
        Prepared::Modulus { space, kind } => {
            let m = match kind {
                ModKind::Convexity(e) => modulus_convexity(space, *e, job.budget)?,
                ModKind::Smoothness(t) => modulus_smoothness(space, *t, job.budget)?,
                ModKind::Defect => {
                    let value = smoothness_defect(space, job.budget);
                    let exact = space.ball_vertices().is_some() || space.dim() == 1 || matches!(space.lp_parts(), Some((p, _)) if p > 1.0 && p.is_finite());
                    ModulusEstimate {
                        argument: 0.0,
                        value,
                        bound_kind: if exact { BoundKind::Exact } else { BoundKind::Lower },
                        method: "smoothness-defect".into(),
                        trials: job.budget.iterations,
                        witness: None,
                    }
                }
            };
            let status = if m.bound_kind == BoundKind::Exact { Status::Certified } else { Status::Heuristic };
            (status, Some(Output::Modulus(m)), None)
        }
        Prepared::ProbeEta { x, y, epsilon } => {
            let est = estimate_eta_pair(x, y, *epsilon, job.budget)?;
            let status = if est.witnesses.is_empty() { Status::NoneFound } else { Status::WitnessFound };
            (status, Some(Output::Estimate(est)), None)
        }
        Prepared::Counterexample { x, y, epsilon, eta } => match counterexample_search(x, y, *epsilon, *eta, job.budget)? {
            Some(w) => (Status::WitnessFound, Some(Output::Witness(w)), None),
            None => (Status::NoneFound, None, Some(format!("no certified violation at eta = {eta} within budget"))),
        },
        Prepared::Suite { name } => {
            let r = run_suite(name, job.budget.seed)?;
            let status = if r.passed { Status::Certified } else { Status::Rejected };
            let msg = (!r.passed).then(|| {
                let failing: Vec<&str> = r.checks.iter().filter(|c| !c.ok()).map(|c| c.name.as_str()).collect();
                format!("failing checks: {}", failing.join(", "))
            });
            (status, Some(Output::Suite(r)), msg)
        }
    })
}

/// Run one prepared job; errors become `rejected` reports.
pub fn run_job(job: &Job) -> Report {
    let start = Instant::now();
    let (status, output, message) = match execute_job(job) {
        Ok(r) => r,
        Err(e) => (Status::Rejected, None, Some(e.to_string())),
    };
    Report {
        index: job.index,
        id: job.id.clone(),
        task: job.task,
        status,
        message,
        output,
        timings: Timings { elapsed_ms: start.elapsed().as_secs_f64() * 1e3 },
        tool_version: TOOL_VERSION.to_string(),
    }
}

/// Validate every problem, then run them on at most `opts.jobs` threads.
pub fn run_batch(problems: &[Problem], opts: &RunOptions) -> Checked<Vec<Report>> {
    run_with_paths(problems, opts, |i| format!("$.problems[{i}]"))
}

/// As [`run_batch`], with error paths matching the shape the input was parsed from.
pub fn run_parsed(input: &ParsedInput, opts: &RunOptions) -> Checked<Vec<Report>> {
    let (single, batch_file) = (input.single, input.batch_file);
    run_with_paths(&input.problems, opts, |i| match (single, batch_file) {
        (true, _) => "$".to_string(),
        (false, true) => format!("$.problems[{i}]"),
        (false, false) => format!("$[{i}]"),
    })
}

fn run_with_paths(problems: &[Problem], opts: &RunOptions, path: impl Fn(usize) -> String) -> Checked<Vec<Report>> {
    let jobs = problems.iter().enumerate().map(|(i, p)| prepare(i, &path(i), p, opts)).collect::<Checked<Vec<_>>>()?;
    let threads = if opts.jobs == 0 { std::thread::available_parallelism().map_or(1, |n| n.get()) } else { opts.jobs };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| format!("thread pool: {e}"))?;
    Ok(pool.install(|| jobs.par_iter().map(run_job).collect()))
}

/// Exit code of a batch: rejected beats heuristic beats success.
pub fn exit_code(reports: &[Report]) -> i32 {
    if reports.iter().any(|r| r.status == Status::Rejected) {
        2
    } else if reports.iter().any(|r| r.status == Status::Heuristic) {
        3
    } else {
        0
    }
}

/// Re-verify a report from its embedded payload alone.
pub fn verify_report(r: &Report) -> VerifyOutcome {
    let outcome = |verified: bool, message: Option<String>| VerifyOutcome { index: r.index, status: r.status, verified, message };
    let result: Result<Option<String>> = match &r.output {
        Some(Output::Certificate(c)) => c.verify().map(|m| Some(format!("distance {} < target {}", m.distance, c.target))),
        Some(Output::Witness(w)) => w.verify().map(|m| Some(format!("gap {}, distance {}", m.gap, m.distance))),
        Some(Output::Estimate(e)) => e.witnesses.iter().try_for_each(|w| w.verify().map(|_| ())).map(|_| Some(format!("{} witnesses replayed", e.witnesses.len()))),
        Some(Output::Modulus(_)) | Some(Output::Suite(_)) => Ok(Some("no certificate to verify".into())),
        None if r.status == Status::Certified => Err(LabError::CertificationFailed("certified report without a certificate".into())),
        None => Ok(None),
    };
    match result {
        Ok(msg) => {
            if r.status == Status::Certified && matches!(r.output, Some(Output::Witness(_)) | Some(Output::Estimate(_))) {
                return outcome(false, Some("status certified with a non-certificate payload".into()));
            }
            outcome(true, msg)
        }
        Err(e) => outcome(false, Some(e.to_string())),
    }
}

/// Parse reports (a single object or an array) for `--verify`.
pub fn parse_reports(text: &str) -> std::result::Result<Vec<Report>, String> {
    let v: Value = serde_json::from_str(text).map_err(|e| format!("input: {e}"))?;
    match v {
        Value::Array(items) => items.into_iter().enumerate().map(|(i, r)| serde_json::from_value(r).map_err(|e| format!("$[{i}]: {e}"))).collect(),
        other => Ok(vec![serde_json::from_value(other).map_err(|e| format!("$: {e}"))?]),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn num(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| if x != 0.0 && !(1e-4..1e6).contains(&x.abs()) { format!("{x:e}") } else { format!("{x}") })
}

/// Flat table: one row per report.
pub fn reports_to_csv(reports: &[Report]) -> String {
    let mut out = String::from("index,id,task,status,epsilon,distance,target,gap,etaLower,etaUpper,message,elapsedMs\n");
    for r in reports {
        let (mut eps, mut dist, mut target, mut gap, mut lo, mut hi) = (None, None, None, None, None, None);
        match &r.output {
            Some(Output::Certificate(c)) => {
                eps = Some(c.epsilon);
                dist = Some(c.distance);
                target = Some(c.target);
            }
            Some(Output::Witness(w)) => {
                eps = Some(w.epsilon);
                dist = Some(w.distance);
                gap = Some(w.gap);
            }
            Some(Output::Estimate(e)) => {
                eps = Some(e.epsilon);
                lo = Some(e.eta_lower);
                hi = e.eta_upper;
            }
            Some(Output::Modulus(m)) => {
                eps = Some(m.argument);
                dist = Some(m.value);
            }
            _ => {}
        }
        let row = [
            r.index.to_string(),
            csv_field(r.id.as_deref().unwrap_or("")),
            task_name(r.task),
            serde_json::to_value(r.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            num(eps),
            num(dist),
            num(target),
            num(gap),
            num(lo),
            num(hi),
            csv_field(r.message.as_deref().unwrap_or("")),
            format!("{:.3}", r.timings.elapsed_ms),
        ];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
