//! Built-in examples: the smoothed square, the `ℓ1` witness families and the `Y₀` scan.

use serde::{Deserialize, Serialize};

use super::{assess, estimate_eta_pair, witness, EtaEstimate, FailureWitness};
use crate::bilinear::BilinearMap;
use crate::error::{LabError, Result};
use crate::linalg::{to_vec, vector, Vector};
use crate::operators::{scalar_face_distance, Operator};
use crate::search::SearchBudget;
use crate::spaces::{Body, BoundKind, ModulusEstimate, NormedSpace};

/// Plane gauge space with unit ball `(1 − r)·B∞ + r·B₂`: smooth, with flat edges of
/// length `2(1 − r)`.
pub fn smoothed_square_space(r: f64) -> Result<NormedSpace> {
    if !(r > 0.0 && r < 1.0) {
        return Err(LabError::OutOfRange(format!("rounding must lie in (0, 1), got {r}")));
    }
    NormedSpace::gauge(Body::RoundedBox { rounding: r }, 2)
}

/// Two unit points `(1, ±ε/2)` on the right flat edge of the smoothed square.
pub fn flat_edge_pair(r: f64, epsilon: f64) -> Result<(Vector, Vector)> {
    smoothed_square_space(r)?;
    if !(epsilon > 0.0 && epsilon <= 2.0 * (1.0 - r)) {
        return Err(LabError::OutOfRange(format!("epsilon {epsilon} exceeds the flat-edge length {}", 2.0 * (1.0 - r))));
    }
    Ok((vector(&[1.0, epsilon / 2.0]), vector(&[1.0, -epsilon / 2.0])))
}

/// `δ(ε)` of the smoothed square from the flat-edge pair: exact because `δ ≥ 0` always and
/// the pair realizes `0` when its midpoint has norm one.
pub fn flat_edge_modulus(r: f64, epsilon: f64) -> Result<ModulusEstimate> {
    let space = smoothed_square_space(r)?;
    let (x, y) = flat_edge_pair(r, epsilon)?;
    let nx = space.norm_of(x.as_slice());
    let ny = space.norm_of(y.as_slice());
    let gap = space.norm_of((&x - &y).as_slice());
    if nx != 1.0 || ny != 1.0 || gap < epsilon {
        return Err(LabError::CertificationFailed(format!("flat-edge pair has norms {nx}, {ny} and separation {gap}")));
    }
    let mid = space.norm_of(((&x + &y) * 0.5).as_slice());
    let value = (1.0 - mid).max(0.0);
    Ok(ModulusEstimate {
        argument: epsilon,
        value,
        bound_kind: if value == 0.0 { BoundKind::Exact } else { BoundKind::Upper },
        method: "flat-edge-pair".into(),
        trials: 1,
        witness: Some((to_vec(&x), to_vec(&y))),
    })
}

/// `x₀ = (1 − s, s)`, `x₀* = (1, −1)` on `ℓ1²`: gap `2s`, distance 2 to the unique
/// attaining functional `(1, 1)`.
pub fn l1_failure_witness(s: f64) -> Result<FailureWitness> {
    if !(s > 0.0 && s < 0.5) {
        return Err(LabError::OutOfRange(format!("s must lie in (0, 1/2), got {s}")));
    }
    let t = Operator::from_rows(&[vec![1.0, -1.0]], NormedSpace::l1(2), NormedSpace::scalars())?;
    let x0 = vector(&[1.0 - s, s]);
    let a = assess(&t, &x0, 1.0, None)?;
    Ok(witness(&t, &x0, 1.0, a))
}

/// A scalar form on `ℓ1² × ℓ1²` with a small value gap at a point, far from every form
/// attaining its norm there.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BilinearFailure {
    pub form: BilinearMap,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub gap: f64,
    /// Certified lower bound on the distance to forms attaining at `(x, y)`.
    pub distance: f64,
}

/// Certified lower bound for scalar forms: any `C` with `‖C‖ = |C(x₀, y₀)| = 1` has
/// `C(·, y₀)` in the signed support face at `x₀` (and symmetrically in `y`).
pub fn bilinear_pointwise_lower(b: &BilinearMap, x0: &Vector, y0: &Vector) -> Result<f64> {
    if !b.is_scalar() {
        return Err(LabError::Unsupported("expected a scalar bilinear form".into()));
    }
    let m = b.matrix();
    let fx = scalar_face_distance(b.x_space(), x0, &(m * y0))?;
    let fy = scalar_face_distance(b.y_space(), y0, &(m.transpose() * x0))?;
    let exact = |d: &crate::operators::FaceDistance| if d.exact { d.distance } else { 0.0 };
    Ok(exact(&fx).max(exact(&fy)))
}

/// `B(x, y) = x₁y₁ − x₂y₁` at `x₀ = (1 − s, s)`, `y₀ = e₁`: gap `2s`, distance 2.
pub fn l1_bilinear_failure(s: f64) -> Result<BilinearFailure> {
    if !(s > 0.0 && s < 0.5) {
        return Err(LabError::OutOfRange(format!("s must lie in (0, 1/2), got {s}")));
    }
    let form = BilinearMap::form_from_rows(&[vec![1.0, 0.0], vec![-1.0, 0.0]], NormedSpace::l1(2), NormedSpace::l1(2))?;
    let x0 = vector(&[1.0 - s, s]);
    let y0 = vector(&[1.0, 0.0]);
    let gap = 1.0 - form.value_norm(&x0, &y0)? / form.norm();
    let distance = bilinear_pointwise_lower(&form, &x0, &y0)?;
    Ok(BilinearFailure { form, x: to_vec(&x0), y: to_vec(&y0), gap, distance })
}

/// Small polyhedral codomains scanned against the smoothed square.
pub fn default_y0_candidates() -> Vec<NormedSpace> {
    let hexagon = (0..3)
        .map(|k| {
            let a = k as f64 * std::f64::consts::PI / 3.0;
            vector(&[a.cos(), a.sin()])
        })
        .flat_map(|v| [v.clone(), -v])
        .collect();
    let mut out = vec![NormedSpace::linf(2), NormedSpace::l1(2)];
    if let Ok(h) = NormedSpace::polyhedral(hexagon) {
        out.push(h);
    }
    out
}

/// η̂ brackets for `(X, Y)` over candidate codomains; data only.
pub fn y0_search(x: &NormedSpace, candidates: &[NormedSpace], epsilon: f64, budget: SearchBudget) -> Result<Vec<EtaEstimate>> {
    candidates.iter().enumerate().map(|(k, y)| estimate_eta_pair(x, y, epsilon, budget.fork(k as u64))).collect()
}
