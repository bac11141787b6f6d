//! Matrix operators between normed spaces: induced norms with attainment witnesses,
//! adjoints, and the distance to operators attaining their norm at a fixed point.
//!
//! Exact paths: 1-D domains, Euclidean-to-Euclidean (SVD), polytope domains (vertex
//! enumeration, which covers `ℓ1` columns), polytope codomains (dual generators), and a
//! dense planar scan for 2-D domains. Anything else falls back to multi-start projected
//! ascent and is labeled heuristic.

mod distance;
mod pencil;

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

pub(crate) use distance::relaxation_lower_bound;
pub use distance::{dist_to_pointwise_na, scalar_face_distance, FaceDistance, PointwiseNaDistance};
pub use pencil::{attaining_pencil, PencilResult};

use crate::error::{check_dim, LabError, Result};
use crate::linalg::{basis, from_rows, gaussian, pick_best, rng, to_rows, Matrix, Vector};
use crate::search::{periodic_scan_max, SearchBudget};
use crate::spaces::{BoundKind, NormedSpace};

/// How an operator norm was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormMethod {
    Line,
    Spectral,
    Columns,
    Vertices,
    DualGenerators,
    PlanarScan,
    Ascent,
}

impl NormMethod {
    pub fn is_certified(self) -> bool {
        self != NormMethod::Ascent
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttainmentWitness {
    pub point: Vec<f64>,
    pub value: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub value: f64,
    pub witness: AttainmentWitness,
    pub method: NormMethod,
}

impl NormReport {
    pub fn certified(&self) -> bool {
        self.method.is_certified()
    }

    pub fn bound_kind(&self) -> BoundKind {
        if self.certified() {
            BoundKind::Exact
        } else {
            BoundKind::Lower
        }
    }

    pub fn point(&self) -> Vector {
        Vector::from_column_slice(&self.witness.point)
    }
}

/// A linear map `X → Y` stored as a `dim(Y) × dim(X)` matrix.
#[derive(Clone, Debug)]
pub struct Operator {
    matrix: Matrix,
    domain: NormedSpace,
    codomain: NormedSpace,
    cache: Arc<OnceLock<NormReport>>,
}

impl PartialEq for Operator {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix && self.domain == other.domain && self.codomain == other.codomain
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorRepr {
    domain: NormedSpace,
    codomain: NormedSpace,
    matrix: Vec<Vec<f64>>,
}

impl Serialize for Operator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OperatorRepr { domain: self.domain.clone(), codomain: self.codomain.clone(), matrix: to_rows(&self.matrix) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Operator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = OperatorRepr::deserialize(d)?;
        let m = from_rows(&r.matrix).map_err(serde::de::Error::custom)?;
        Operator::new(m, r.domain, r.codomain).map_err(serde::de::Error::custom)
    }
}

impl Operator {
    pub fn new(matrix: Matrix, domain: NormedSpace, codomain: NormedSpace) -> Result<Operator> {
        check_dim(domain.dim(), matrix.ncols())?;
        check_dim(codomain.dim(), matrix.nrows())?;
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(LabError::Malformed("operator matrix has non-finite entries".into()));
        }
        Ok(Operator { matrix, domain, codomain, cache: Arc::new(OnceLock::new()) })
    }

    /// Operator from row-major entries.
    pub fn from_rows(rows: &[Vec<f64>], domain: NormedSpace, codomain: NormedSpace) -> Result<Operator> {
        Operator::new(from_rows(rows)?, domain, codomain)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn domain(&self) -> &NormedSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &NormedSpace {
        &self.codomain
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.domain.dim(), x.len())?;
        Ok(&self.matrix * x)
    }

    /// Same spaces, new matrix.
    pub fn with_matrix(&self, matrix: Matrix) -> Result<Operator> {
        Operator::new(matrix, self.domain.clone(), self.codomain.clone())
    }

    pub fn scaled(&self, alpha: f64) -> Operator {
        Operator::new(&self.matrix * alpha, self.domain.clone(), self.codomain.clone()).expect("same shape")
    }

    /// `self - other`, for operators between the same spaces.
    pub fn minus(&self, other: &Operator) -> Result<Operator> {
        if self.domain != other.domain || self.codomain != other.codomain {
            return Err(LabError::Unsupported("difference of operators between different spaces".into()));
        }
        self.with_matrix(&self.matrix - &other.matrix)
    }

    /// Cached norm with the default budget.
    pub fn norm_report(&self) -> &NormReport {
        self.cache.get_or_init(|| compute_norm(self, SearchBudget::default()))
    }

    pub fn norm(&self) -> f64 {
        self.norm_report().value
    }

    /// `‖self - other‖` with its method.
    pub fn distance_to(&self, other: &Operator) -> Result<NormReport> {
        Ok(self.minus(other)?.norm_report().clone())
    }
}

/// Induced norm with an attainment witness.
pub fn op_norm(t: &Operator, budget: SearchBudget) -> NormReport {
    if budget == SearchBudget::default() {
        t.norm_report().clone()
    } else {
        compute_norm(t, budget)
    }
}

fn image_norm(t: &Operator, x: &Vector) -> f64 {
    t.codomain.norm_of((&t.matrix * x).as_slice())
}

fn report(t: &Operator, value: f64, point: Vector, method: NormMethod) -> NormReport {
    let achieved = image_norm(t, &point);
    NormReport { value, witness: AttainmentWitness { point: point.iter().copied().collect(), value: achieved, residual: (value - achieved).abs() }, method }
}

fn from_candidates(t: &Operator, cands: Vec<Vector>, method: NormMethod) -> NormReport {
    let scored: Vec<(f64, Vector)> = cands.into_iter().map(|x| (image_norm(t, &x), x)).collect();
    let (_, point) = pick_best(scored, 1e-12).expect("nonempty candidate set");
    report(t, image_norm(t, &point), point, method)
}

fn compute_norm(t: &Operator, budget: SearchBudget) -> NormReport {
    let n = t.domain.dim();
    if t.matrix.iter().all(|v| *v == 0.0) {
        let e = t.domain.normalize(&basis(n, 0)).expect("nonzero basis vector");
        return report(t, 0.0, e, NormMethod::Line);
    }
    if n == 1 {
        let e = t.domain.normalize(&basis(1, 0)).expect("nonzero basis vector");
        return report(t, image_norm(t, &e), e, NormMethod::Line);
    }
    if t.domain.is_hilbert() && t.codomain.is_hilbert() {
        let svd = t.matrix.clone().svd(false, true);
        let v_t = svd.v_t.expect("requested right singular vectors");
        let (k, s) = svd.singular_values.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, &s)| if s > acc.1 { (i, s) } else { acc });
        let w = v_t.row(k).transpose();
        let w = &w / w.norm();
        return report(t, s, crate::linalg::canonical_sign(&w), NormMethod::Spectral);
    }
    if let Some(vs) = t.domain.ball_vertices() {
        let method = if matches!(t.domain.lp_parts(), Some((p, _)) if p == 1.0) { NormMethod::Columns } else { NormMethod::Vertices };
        return from_candidates(t, vs, method);
    }
    if let Some(gens) = t.codomain.dual().ball_vertices() {
        let cands: Vec<Vector> = gens
            .iter()
            .filter_map(|g| {
                let f = t.matrix.transpose() * g;
                (f.amax() > 0.0).then(|| t.domain.norming_vector(&f).ok()).flatten()
            })
            .collect();
        if !cands.is_empty() {
            return from_candidates(t, cands, NormMethod::DualGenerators);
        }
    }
    if n == 2 {
        let ratio = |th: f64| {
            let u = Vector::from_column_slice(&[th.cos(), th.sin()]);
            image_norm(t, &u) / t.domain.norm_of(u.as_slice())
        };
        let (th, _) = periodic_scan_max(ratio, std::f64::consts::PI, 1024, 4);
        let u = Vector::from_column_slice(&[th.cos(), th.sin()]);
        let x = t.domain.normalize(&u).expect("nonzero");
        let x = crate::linalg::canonical_sign(&x);
        return report(t, image_norm(t, &x), x, NormMethod::PlanarScan);
    }
    ascent(t, budget)
}

/// Multi-start subgradient power iteration `x ← norming(Tᵀ J(T x))`.
///
/// `x ↦ ‖T x‖` is convex, so each step does not decrease it.
fn ascent(t: &Operator, budget: SearchBudget) -> NormReport {
    let n = t.domain.dim();
    let mut r = rng(budget.seed);
    let mut starts: Vec<Vector> = Vec::new();
    for i in 0..n {
        starts.push(basis(n, i));
        starts.push(-basis(n, i));
    }
    starts.push(Vector::from_element(n, 1.0));
    starts.push(Vector::from_element(n, -1.0));
    while starts.len() < budget.starts.max(8) {
        starts.push(gaussian(n, &mut r));
    }
    let mut cands: Vec<(f64, Vector)> = Vec::new();
    for s in starts {
        let Ok(mut x) = t.domain.normalize(&s) else { continue };
        let mut fx = image_norm(t, &x);
        for _ in 0..budget.iterations {
            let y = &t.matrix * &x;
            let Ok(j) = t.codomain.duality_map(&y) else { break };
            let g = t.matrix.transpose() * j;
            let Ok(next) = t.domain.norming_vector(&g) else { break };
            let fn_ = image_norm(t, &next);
            if fn_ <= fx * (1.0 + 1e-15) {
                if fn_ >= fx {
                    x = next;
                    fx = fn_;
                }
                break;
            }
            x = next;
            fx = fn_;
        }
        cands.push((fx, x));
    }
    let (_, x) = pick_best(cands, 1e-13).unwrap_or_else(|| (0.0, basis(n, 0)));
    report(t, image_norm(t, &x), x, NormMethod::Ascent)
}

/// The adjoint `T*: Y* → X*`.
pub fn adjoint(t: &Operator) -> Operator {
    Operator::new(t.matrix.transpose(), t.codomain.dual().clone(), t.domain.dual().clone()).expect("transposed shape")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttainmentCheck {
    pub passed: bool,
    pub residual: f64,
    pub value: f64,
}

/// Whether `‖T x‖ ≥ ‖T‖ - tol` at a unit vector `x`.
pub fn attainment_check(t: &Operator, x: &Vector, tol: f64) -> Result<AttainmentCheck> {
    let nx = t.domain.norm(x)?;
    if (nx - 1.0).abs() > 1e-10 {
        return Err(LabError::NotUnit(nx));
    }
    let value = image_norm(t, x);
    let residual = (t.norm() - value).max(0.0);
    Ok(AttainmentCheck { passed: residual <= tol, residual, value })
}

/// True when the norm path is exact for this pair of spaces.
pub fn has_exact_path(domain: &NormedSpace, codomain: &NormedSpace) -> bool {
    domain.dim() <= 2
        || (domain.is_hilbert() && codomain.is_hilbert())
        || domain.ball_vertices().is_some()
        || codomain.dual().ball_vertices().is_some()
}

#[cfg(test)]
mod tests;
