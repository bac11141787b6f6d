//! Empirical BPBpp moduli, adversarial counterexample search and the classical failure
//! examples.
//!
//! A violation at `(ε, η)` is a pair `(T, x₀)` with `‖T‖ = 1`, `‖x₀‖ = 1`,
//! `1 − ‖T x₀‖ < η` and distance at least `ε` from every operator attaining its norm at
//! `x₀`. Only distances backed by exact face computations or a Lipschitz-corrected grid
//! may certify a [`FailureWitness`]; penalized upper bounds are kept as data.

mod builtins;
mod sums;

pub use builtins::{
    bilinear_pointwise_lower, default_y0_candidates, flat_edge_modulus, flat_edge_pair, l1_bilinear_failure, l1_failure_witness, smoothed_square_space, y0_search, BilinearFailure,
};
pub use sums::{sum_propagation_suite, CorrectionTally, LiftCheck, ProjectionCheck, SumPropagationReport};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::instances::unit_operator;
use crate::linalg::{basis, gaussian, outer, rng, sign_vectors, to_vec, Matrix, Vector};
use crate::operators::{dist_to_pointwise_na, relaxation_lower_bound, scalar_face_distance, Operator};
use crate::search::SearchBudget;
use crate::spaces::NormedSpace;

/// Grid step of the brute-force face search.
const GRID_STEP: f64 = 1e-3;
/// Gap fractions of `η` tried by the counterexample search.
const GAP_FRACTIONS: [f64; 3] = [0.8, 0.4, 0.1];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessMethod {
    FaceExact,
    BruteForce,
    PenalizedUpper,
}

impl WitnessMethod {
    pub fn is_certified(self) -> bool {
        self != WitnessMethod::PenalizedUpper
    }
}

/// A pair `(T, x₀)` together with its value gap and distance to the attaining set.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FailureWitness {
    pub operator: Operator,
    pub point: Vec<f64>,
    pub epsilon: f64,
    /// `1 − ‖T x₀‖`.
    pub gap: f64,
    /// Certified lower bound for certified methods, an upper estimate otherwise.
    pub distance: f64,
    pub method: WitnessMethod,
}

/// Outcome of a replay.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessCheck {
    pub norm: f64,
    pub gap: f64,
    pub distance: f64,
}

impl FailureWitness {
    pub fn point_vector(&self) -> Vector {
        Vector::from_column_slice(&self.point)
    }

    /// Whether the witness violates the contract at threshold `eta`.
    pub fn violates(&self, eta: f64) -> bool {
        self.method.is_certified() && self.gap < eta && self.distance >= self.epsilon
    }

    /// Recompute norm, gap and distance from the stored data alone.
    pub fn verify(&self) -> Result<WitnessCheck> {
        if !self.method.is_certified() {
            return Err(LabError::CertificationFailed("penalized-upper witnesses are data only".into()));
        }
        let x0 = self.point_vector();
        let a = assess(&self.operator, &x0, self.epsilon, None)?;
        let norm = self.operator.norm();
        let fail = |what: String| Err(LabError::CertificationFailed(what));
        if (norm - 1.0).abs() > 1e-9 {
            return fail(format!("operator norm {norm} is not one"));
        }
        if (a.gap - self.gap).abs() > 1e-8 {
            return fail(format!("gap {} does not match stored {}", a.gap, self.gap));
        }
        if a.method != self.method || (a.distance - self.distance).abs() > 1e-8 {
            return fail(format!("distance {} ({:?}) does not match stored {} ({:?})", a.distance, a.method, self.distance, self.method));
        }
        if a.distance < self.epsilon - 1e-8 {
            return fail(format!("distance {} below epsilon {}", a.distance, self.epsilon));
        }
        Ok(WitnessCheck { norm, gap: a.gap, distance: a.distance })
    }
}

/// Empirical bracket for the BPBpp threshold `η(ε)` of a pair.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EtaEstimate {
    pub domain: NormedSpace,
    pub codomain: NormedSpace,
    pub epsilon: f64,
    /// No sampled violation has a smaller gap.
    pub eta_lower: f64,
    /// A stored witness violates at every threshold above its gap.
    pub eta_upper: Option<f64>,
    pub witnesses: Vec<FailureWitness>,
    pub trials: usize,
    pub seed: u64,
    /// Set when the search found no violation signal at all.
    pub flagged: bool,
}

impl EtaEstimate {
    /// Associative merge: max over lower ends, min over upper ends, lower clamped to upper.
    pub fn merge(&self, other: &EtaEstimate) -> Result<EtaEstimate> {
        if self.domain != other.domain || self.codomain != other.codomain || self.epsilon != other.epsilon {
            return Err(LabError::Unsupported("merging estimates for different pairs or epsilons".into()));
        }
        let eta_upper = match (self.eta_upper, other.eta_upper) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let mut eta_lower = self.eta_lower.max(other.eta_lower);
        if let Some(u) = eta_upper {
            eta_lower = eta_lower.min(u);
        }
        let mut witnesses = self.witnesses.clone();
        witnesses.extend(other.witnesses.iter().cloned());
        Ok(EtaEstimate {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            epsilon: self.epsilon,
            eta_lower,
            eta_upper,
            witnesses,
            trials: self.trials + other.trials,
            seed: self.seed,
            flagged: self.flagged && other.flagged,
        })
    }

    /// Certified witness with the smallest gap.
    pub fn best_witness(&self) -> Option<&FailureWitness> {
        self.witnesses.iter().min_by(|a, b| a.gap.total_cmp(&b.gap))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Assessment {
    pub gap: f64,
    pub distance: f64,
    pub method: WitnessMethod,
}

/// Gap and distance of `(T, x₀)` with the strongest available certification.
///
/// `budget = None` restricts to the certified methods (replay mode).
pub(crate) fn assess(t: &Operator, x0: &Vector, epsilon: f64, budget: Option<SearchBudget>) -> Result<Assessment> {
    let dom = t.domain();
    let cod = t.codomain();
    let nx = dom.norm(x0)?;
    if (nx - 1.0).abs() > 1e-10 {
        return Err(LabError::NotUnit(nx));
    }
    let gap = 1.0 - cod.norm_of(t.apply(x0)?.as_slice());
    if cod.dim() == 1 {
        let c = cod.norm_of(&[1.0]);
        let f = t.matrix().row(0).transpose() * c;
        let fd = scalar_face_distance(dom, x0, &f)?;
        if fd.exact {
            return Ok(Assessment { gap, distance: fd.distance, method: WitnessMethod::FaceExact });
        }
        if let Some(lower) = brute_force_face(dom, x0, &f)? {
            return Ok(Assessment { gap, distance: lower, method: WitnessMethod::BruteForce });
        }
        return Ok(Assessment { gap, distance: fd.distance, method: WitnessMethod::PenalizedUpper });
    }
    if cod.dual().ball_vertices().is_some() {
        let lower = relaxation_lower_bound(t, x0)?;
        if lower >= epsilon || budget.is_none() {
            return Ok(Assessment { gap, distance: lower, method: WitnessMethod::FaceExact });
        }
    }
    let Some(budget) = budget else {
        return Err(LabError::CertificationFailed("no certified distance for this codomain".into()));
    };
    let d = dist_to_pointwise_na(t, x0, budget)?;
    Ok(Assessment { gap, distance: d.distance, method: WitnessMethod::PenalizedUpper })
}

/// Grid minimum over a segment face (both signs) minus the Lipschitz slack.
fn brute_force_face(space: &NormedSpace, x0: &Vector, f: &Vector) -> Result<Option<f64>> {
    if space.dim() > 3 {
        return Ok(None);
    }
    let Some(vs) = space.support_functionals(x0)?.vertices() else {
        return Ok(None);
    };
    if vs.len() != 2 {
        return Ok(None);
    }
    let lip = space.dual_norm_of((&vs[1] - &vs[0]).as_slice());
    let steps = (1.0 / GRID_STEP).round() as usize;
    let mut best = f64::INFINITY;
    for s in [1.0, -1.0] {
        for k in 0..=steps {
            let l = k as f64 / steps as f64;
            let g = (&vs[0] * (1.0 - l) + &vs[1] * l) * s;
            best = best.min(space.dual_norm_of((g - f).as_slice()));
        }
    }
    Ok(Some((best - lip * GRID_STEP / 2.0).max(0.0)))
}

fn witness(t: &Operator, x0: &Vector, epsilon: f64, a: Assessment) -> FailureWitness {
    FailureWitness { operator: t.clone(), point: to_vec(x0), epsilon, gap: a.gap, distance: a.distance, method: a.method }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 2.0 {
        Ok(())
    } else {
        Err(LabError::OutOfRange(format!("epsilon must lie in (0, 2), got {epsilon}")))
    }
}

/// Unit vector of `Y` used to lift functionals to rank-one operators: the ball vertex
/// that keeps every extreme dual functional as large as possible, else `e₁`.
fn lift_vector(y: &NormedSpace) -> Vector {
    let n = y.dim();
    if let (Some(vs), Some(duals)) = (y.ball_vertices(), y.dual().ball_vertices()) {
        let score = |v: &Vector| duals.iter().map(|p| p.dot(v).abs()).fold(f64::INFINITY, f64::min);
        let mut best: Option<(f64, &Vector)> = None;
        for v in &vs {
            let sc = score(v);
            if best.is_none_or(|(b, _)| sc > b + 1e-12) {
                best = Some((sc, v));
            }
        }
        if let Some((_, v)) = best {
            return v / y.norm_of(v.as_slice());
        }
    }
    let e = basis(n, 0);
    &e / y.norm_of(e.as_slice())
}

/// `y ⊗ f` scaled so that its norm is one.
fn rank_one(x: &NormedSpace, y: &NormedSpace, f: &Vector) -> Result<Operator> {
    let fs = f / x.dual_norm_of(f.as_slice());
    Operator::new(outer(&lift_vector(y), &fs), x.clone(), y.clone())
}

/// Rays leaving a kink: `(x̂, f, d)` where `x̂` has a non-singleton support face, `f` is one
/// vertex of it and `d` points toward another vertex `g`.
fn kink_rays(x: &NormedSpace) -> Vec<(Vector, Vector, Vector)> {
    let n = x.dim();
    let mut points: Vec<Vector> = Vec::new();
    for i in 0..n {
        points.push(basis(n, i));
        points.push(-basis(n, i));
    }
    if n <= 4 {
        points.extend(sign_vectors(n));
    }
    if let Some(vs) = x.ball_vertices() {
        points.extend(vs.into_iter().take(64));
    }
    let mut seen: Vec<Vector> = Vec::new();
    let mut rays = Vec::new();
    for p in points {
        let Ok(u) = x.normalize(&p) else { continue };
        if seen.iter().any(|s| (s - &u).amax() < 1e-12) {
            continue;
        }
        seen.push(u.clone());
        let Ok(set) = x.support_functionals(&u) else { continue };
        let Some(vs) = set.vertices() else { continue };
        if vs.len() < 2 {
            continue;
        }
        let mut pairs = 0;
        'pairs: for f in &vs {
            for g in &vs {
                if (f - g).amax() <= 1e-12 {
                    continue;
                }
                rays.push((u.clone(), f.clone(), g - f));
                pairs += 1;
                if pairs >= 16 {
                    break 'pairs;
                }
            }
        }
    }
    rays
}

/// Smallest `s ∈ (lo, hi]` with `pred(s)`, assuming `pred(hi)` and a single crossing.
fn first_true<F: FnMut(f64) -> bool>(mut pred: F, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// First crossing of `pred` on a doubling grid from `1e-12` up to `max`, refined by
/// bisection.
fn first_crossing<F: FnMut(f64) -> bool>(mut pred: F, max: f64, iters: usize) -> Option<f64> {
    let mut lo = 0.0;
    let mut s = 1e-12;
    while s <= max {
        if pred(s) {
            return Some(first_true(pred, lo, s, iters));
        }
        lo = s;
        s *= 2.0;
    }
    None
}

/// Point on the kink ray at parameter `s`.
fn ray_point(x: &NormedSpace, u: &Vector, d: &Vector, s: f64) -> Option<Vector> {
    x.normalize(&(u + d * s)).ok()
}

struct Recorder {
    epsilon: f64,
    trials: usize,
    explored: f64,
    signal: Option<f64>,
    witnesses: Vec<FailureWitness>,
}

impl Recorder {
    fn new(epsilon: f64) -> Self {
        Recorder { epsilon, trials: 0, explored: 0.0, signal: None, witnesses: Vec::new() }
    }

    fn record(&mut self, t: &Operator, x0: &Vector, budget: SearchBudget) -> Option<Assessment> {
        let a = assess(t, x0, self.epsilon, Some(budget)).ok()?;
        self.trials += 1;
        self.explored = self.explored.max(a.gap);
        if a.distance >= self.epsilon && a.gap >= 0.0 {
            self.signal = Some(self.signal.map_or(a.gap, |s: f64| s.min(a.gap)));
            if a.method.is_certified() {
                self.witnesses.push(witness(t, x0, self.epsilon, a));
            }
        }
        Some(a)
    }
}

/// Adversarial estimate of the threshold `η(ε)` for the pair `(X, Y)`.
///
/// Structured rays leave every kink of the unit sphere toward a different support
/// functional (gaps shrinking geometrically); random rays start at attaining pairs and are
/// bisected to the first point where the distance reaches `ε`, which minimizes the gap
/// along the ray.
pub fn estimate_eta_pair(x: &NormedSpace, y: &NormedSpace, epsilon: f64, budget: SearchBudget) -> Result<EtaEstimate> {
    check_epsilon(epsilon)?;
    let mut rec = Recorder::new(epsilon);
    let quick = SearchBudget { starts: 4, iterations: 60, ..budget };
    for (u, f, d) in kink_rays(x) {
        let t = rank_one(x, y, &f)?;
        for k in 1..=8 {
            let s = 10f64.powi(-k);
            if let Some(x0) = ray_point(x, &u, &d, s) {
                rec.record(&t, &x0, quick);
            }
        }
    }
    let mut r = rng(budget.seed);
    let iters = budget.iterations.clamp(8, 60);
    if y.dim() == 1 {
        for _ in 0..budget.starts {
            let Ok(x0) = x.normalize(&gaussian(x.dim(), &mut r)) else { continue };
            let dir = gaussian(x.dim(), &mut r);
            let Ok(set) = x.support_functionals(&x0) else { continue };
            let j = set.representative();
            let op_at = |t: f64| x.normalize_dual(&(&j + &dir * t)).ok().and_then(|f| rank_one(x, y, &f).ok());
            let reach = |t: f64| op_at(t).and_then(|op| assess(&op, &x0, epsilon, None).ok()).is_some_and(|a| a.distance >= epsilon);
            let Some(t) = first_crossing(reach, 1e3, iters) else {
                if let Some(op) = op_at(1e3) {
                    rec.record(&op, &x0, quick);
                }
                continue;
            };
            if let Some(op) = op_at(t) {
                rec.record(&op, &x0, quick);
            }
        }
    } else {
        let rays = (budget.starts / 8).max(2);
        for _ in 0..rays {
            let t = unit_operator(x, y, &mut r)?;
            let w = t.norm_report().point();
            let dir = gaussian(x.dim(), &mut r);
            for s in [0.05, 0.1, 0.2, 0.4, 0.8, 1.6] {
                if let Some(x0) = ray_point(x, &w, &dir, s) {
                    rec.record(&t, &x0, quick);
                }
            }
        }
    }
    let mut witnesses = rec.witnesses;
    witnesses.sort_by(|a, b| a.gap.total_cmp(&b.gap));
    witnesses.truncate(8);
    let eta_upper = witnesses.first().map(|w| w.gap + 1e-12);
    let flagged = rec.signal.is_none();
    let eta_lower = rec.signal.unwrap_or(rec.explored).max(0.0);
    Ok(EtaEstimate {
        domain: x.clone(),
        codomain: y.clone(),
        epsilon,
        eta_lower,
        eta_upper,
        witnesses,
        trials: rec.trials,
        seed: budget.seed,
        flagged,
    })
}

/// First certified violation at `(ε, η)` found within the budget, if any.
pub fn counterexample_search(x: &NormedSpace, y: &NormedSpace, epsilon: f64, eta: f64, budget: SearchBudget) -> Result<Option<FailureWitness>> {
    check_epsilon(epsilon)?;
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(LabError::OutOfRange(format!("eta must be positive, got {eta}")));
    }
    let iters = budget.iterations.clamp(8, 80);
    let found = |t: &Operator, x0: &Vector| -> Option<FailureWitness> {
        let a = assess(t, x0, epsilon, None).ok()?;
        let w = witness(t, x0, epsilon, a);
        w.violates(eta).then_some(w)
    };
    let gap_at = |t: &Operator, x0: &Vector| 1.0 - t.codomain().norm_of((t.matrix() * x0).as_slice());
    for (u, f, d) in kink_rays(x) {
        let t = rank_one(x, y, &f)?;
        for frac in GAP_FRACTIONS {
            let target = frac * eta;
            let Some(s) = first_crossing(|s| ray_point(x, &u, &d, s).is_some_and(|p| gap_at(&t, &p) >= target), 1e3, iters.max(60)) else { continue };
            let Some(x0) = ray_point(x, &u, &d, s) else { continue };
            if gap_at(&t, &x0) >= eta {
                continue;
            }
            if let Some(w) = found(&t, &x0) {
                return Ok(Some(w));
            }
        }
    }
    let mut r = rng(budget.seed);
    for _ in 0..budget.starts {
        let (t, x0) = if y.dim() == 1 {
            let Ok(x0) = x.normalize(&gaussian(x.dim(), &mut r)) else { continue };
            let dir = gaussian(x.dim(), &mut r);
            let Ok(set) = x.support_functionals(&x0) else { continue };
            let j = set.representative();
            let op_at = |t: f64| x.normalize_dual(&(&j + &dir * t)).ok().and_then(|f| rank_one(x, y, &f).ok());
            let Some(t) = first_crossing(|t| op_at(t).is_some_and(|op| gap_at(&op, &x0) >= GAP_FRACTIONS[0] * eta), 1e3, iters) else { continue };
            let Some(op) = op_at(t) else { continue };
            (op, x0)
        } else {
            let t = unit_operator(x, y, &mut r)?;
            let w = t.norm_report().point();
            let dir = gaussian(x.dim(), &mut r);
            let Some(s) = first_crossing(|s| ray_point(x, &w, &dir, s).is_some_and(|p| gap_at(&t, &p) >= GAP_FRACTIONS[0] * eta), 1e3, iters) else { continue };
            let Some(x0) = ray_point(x, &w, &dir, s) else { continue };
            (t, x0)
        };
        if gap_at(&t, &x0) < eta {
            if let Some(w) = found(&t, &x0) {
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

/// Lift a witness into the block `j` of a direct sum codomain.
pub fn lift_witness(w: &FailureWitness, sum: &NormedSpace, block: usize) -> Result<FailureWitness> {
    let blocks = sum.blocks();
    let r = blocks.get(block).ok_or_else(|| LabError::OutOfRange(format!("block {block} of {}", blocks.len())))?.clone();
    let t = &w.operator;
    crate::error::check_dim(r.len(), t.codomain().dim())?;
    let mut m = Matrix::zeros(sum.dim(), t.domain().dim());
    m.rows_mut(r.start, r.len()).copy_from(t.matrix());
    let lifted = Operator::new(m, t.domain().clone(), sum.clone())?;
    let x0 = w.point_vector();
    let a = assess(&lifted, &x0, w.epsilon, None)?;
    Ok(witness(&lifted, &x0, w.epsilon, a))
}
