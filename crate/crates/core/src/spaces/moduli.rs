//! Moduli of convexity and smoothness, and the smoothness defect.
//!
//! Closed forms are used for Euclidean kinds and the scalar field. Everything else is a
//! search: minimization for `δ` (reported as an upper bound) and maximization for `ρ`
//! (reported as a lower bound).

use serde::{Deserialize, Serialize};

use super::face::face_diameter;
use super::{NormedSpace, SpaceKind};
use crate::error::{LabError, Result};
use crate::linalg::{basis, gaussian, rng, sign_vectors, Vector};
use crate::search::{pattern_search, SearchBudget};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Lower,
    Upper,
    Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ModulusEstimate {
    pub argument: f64,
    pub value: f64,
    pub bound_kind: BoundKind,
    pub method: String,
    pub trials: usize,
    /// Pair of unit vectors realizing the reported value, when a search produced one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
}

fn is_euclidean(space: &NormedSpace) -> bool {
    matches!(space.lp_parts(), Some((p, _)) if p == 2.0)
}

/// Canonical sphere directions: signed basis vectors, the ones vector, sign vectors and
/// ball vertices for polytopes.
fn canonical_directions(space: &NormedSpace) -> Vec<Vector> {
    let n = space.dim();
    let mut out = Vec::new();
    for i in 0..n {
        out.push(basis(n, i));
        out.push(-basis(n, i));
    }
    if n <= 4 {
        out.extend(sign_vectors(n));
    } else {
        out.push(Vector::from_element(n, 1.0));
    }
    if let Some(vs) = space.ball_vertices() {
        out.extend(vs.into_iter().take(64));
    }
    out
}

fn unit(space: &NormedSpace, v: &Vector) -> Option<Vector> {
    let n = space.norm_of(v.as_slice());
    (n > 1e-300 && n.is_finite()).then(|| v / n)
}

/// First point `y` on the half great circle from `x` through `w` with `‖x - y‖ ≥ ε`.
fn crossing(space: &NormedSpace, x: &Vector, w: &Vector, eps: f64) -> Option<Vector> {
    let y_at = |phi: f64| unit(space, &(x * phi.cos() + w * phi.sin()));
    let d_at = |phi: f64| y_at(phi).map(|y| space.norm_of((x - &y).as_slice()));
    let steps = 64;
    let h = std::f64::consts::PI / steps as f64;
    let mut lo = 0.0;
    let mut hi = None;
    for k in 1..=steps {
        let phi = k as f64 * h;
        if d_at(phi)? >= eps {
            hi = Some(phi);
            break;
        }
        lo = phi;
    }
    let mut hi = hi?;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if d_at(mid)? >= eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    y_at(hi)
}

fn convexity_value(space: &NormedSpace, x: &Vector, w: &Vector, eps: f64) -> Option<(f64, Vector, Vector)> {
    let x = unit(space, x)?;
    let y = crossing(space, &x, w, eps)?;
    let mid = (&x + &y) * 0.5;
    Some(((1.0 - space.norm_of(mid.as_slice())).clamp(0.0, 1.0), x, y))
}

/// Estimate `δ(ε) = inf{1 - ‖(x+y)/2‖ : x, y ∈ S_X, ‖x - y‖ ≥ ε}`.
pub fn modulus_convexity(space: &NormedSpace, eps: f64, budget: SearchBudget) -> Result<ModulusEstimate> {
    if !(eps > 0.0 && eps <= 2.0) {
        return Err(LabError::OutOfRange(format!("epsilon {eps} must lie in (0, 2]")));
    }
    if is_euclidean(space) {
        return Ok(ModulusEstimate {
            argument: eps,
            value: 1.0 - (1.0 - eps * eps / 4.0).max(0.0).sqrt(),
            bound_kind: BoundKind::Exact,
            method: "closed-form".into(),
            trials: 0,
            witness: None,
        });
    }
    let n = space.dim();
    if n == 1 {
        return Ok(ModulusEstimate { argument: eps, value: 1.0, bound_kind: BoundKind::Exact, method: "closed-form".into(), trials: 0, witness: None });
    }
    let mut r = rng(budget.seed);
    let canon = canonical_directions(space);
    let mut starts: Vec<(Vector, Vector)> = Vec::new();
    for x in &canon {
        for w in &canon {
            if (x - w).amax() > 1e-12 && (x + w).amax() > 1e-12 {
                starts.push((x.clone(), w.clone()));
            }
        }
    }
    starts.truncate(400);
    for _ in 0..budget.starts {
        starts.push((gaussian(n, &mut r), gaussian(n, &mut r)));
    }
    let mut trials = 0;
    let mut scored: Vec<(f64, Vector, Vector, Vector, Vector)> = Vec::new();
    for (x, w) in starts {
        trials += 1;
        if let Some((v, xu, yu)) = convexity_value(space, &x, &w, eps) {
            scored.push((v, x, w, xu, yu));
        }
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = scored.first().map(|s| (s.0, s.3.clone(), s.4.clone())).unwrap_or((1.0, basis(n, 0), -basis(n, 0)));
    for (v0, x, w, _, _) in scored.iter().take(4) {
        if *v0 == 0.0 {
            break;
        }
        let p0: Vec<f64> = x.iter().chain(w.iter()).copied().collect();
        let eval = |p: &[f64]| {
            let xv = Vector::from_column_slice(&p[..n]);
            let wv = Vector::from_column_slice(&p[n..]);
            convexity_value(space, &xv, &wv, eps).map(|t| t.0).unwrap_or(2.0)
        };
        let (p, _) = pattern_search(eval, &p0, 0.1, 1e-7, budget.iterations);
        trials += budget.iterations;
        let xv = Vector::from_column_slice(&p[..n]);
        let wv = Vector::from_column_slice(&p[n..]);
        if let Some((v, xu, yu)) = convexity_value(space, &xv, &wv, eps) {
            if v < best.0 {
                best = (v, xu, yu);
            }
        }
    }
    Ok(ModulusEstimate {
        argument: eps,
        value: best.0,
        bound_kind: BoundKind::Upper,
        method: "great-circle-bisection+pattern-search".into(),
        trials,
        witness: Some((best.1.iter().copied().collect(), best.2.iter().copied().collect())),
    })
}

fn smoothness_value(space: &NormedSpace, x: &Vector, y: &Vector, tau: f64) -> Option<f64> {
    let x = unit(space, x)?;
    let y = unit(space, y)?;
    let a = space.norm_of((&x + &y * tau).as_slice());
    let b = space.norm_of((&x - &y * tau).as_slice());
    Some(0.5 * (a + b) - 1.0)
}

/// Estimate `ρ(τ) = sup{(‖x+τy‖ + ‖x-τy‖)/2 - 1 : x ∈ S_X, y ∈ B_X}`.
pub fn modulus_smoothness(space: &NormedSpace, tau: f64, budget: SearchBudget) -> Result<ModulusEstimate> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(LabError::OutOfRange(format!("tau {tau} must be positive")));
    }
    if is_euclidean(space) {
        return Ok(ModulusEstimate {
            argument: tau,
            value: (1.0 + tau * tau).sqrt() - 1.0,
            bound_kind: BoundKind::Exact,
            method: "closed-form".into(),
            trials: 0,
            witness: None,
        });
    }
    let n = space.dim();
    if n == 1 {
        return Ok(ModulusEstimate { argument: tau, value: (tau - 1.0).max(0.0), bound_kind: BoundKind::Exact, method: "closed-form".into(), trials: 0, witness: None });
    }
    let mut r = rng(budget.seed);
    let canon = canonical_directions(space);
    let mut starts: Vec<(Vector, Vector)> = Vec::new();
    for x in &canon {
        for y in &canon {
            starts.push((x.clone(), y.clone()));
        }
    }
    starts.truncate(400);
    for _ in 0..budget.starts {
        starts.push((gaussian(n, &mut r), gaussian(n, &mut r)));
    }
    let mut trials = 0;
    let mut scored: Vec<(f64, Vector, Vector)> = Vec::new();
    for (x, y) in starts {
        trials += 1;
        if let Some(v) = smoothness_value(space, &x, &y, tau) {
            scored.push((v, x, y));
        }
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (mut bv, mut bx, mut by) = scored.first().cloned().unwrap_or((0.0, basis(n, 0), basis(n, 0)));
    for (_, x, y) in scored.iter().take(4) {
        let p0: Vec<f64> = x.iter().chain(y.iter()).copied().collect();
        let eval = |p: &[f64]| {
            let xv = Vector::from_column_slice(&p[..n]);
            let yv = Vector::from_column_slice(&p[n..]);
            -smoothness_value(space, &xv, &yv, tau).unwrap_or(-1.0)
        };
        let (p, v) = pattern_search(eval, &p0, 0.1, 1e-7, budget.iterations);
        trials += budget.iterations;
        if -v > bv {
            bv = -v;
            bx = Vector::from_column_slice(&p[..n]);
            by = Vector::from_column_slice(&p[n..]);
        }
    }
    let bx = unit(space, &bx).unwrap_or(bx);
    let by = unit(space, &by).unwrap_or(by);
    Ok(ModulusEstimate {
        argument: tau,
        value: bv.clamp(0.0, tau),
        bound_kind: BoundKind::Lower,
        method: "multi-start+pattern-search".into(),
        trials,
        witness: Some((bx.iter().copied().collect(), by.iter().copied().collect())),
    })
}

/// Extrapolated width of the subdifferential at `u` in direction `d` from symmetric
/// difference quotients at two step sizes.
fn kink_width(space: &NormedSpace, u: &Vector, d: &Vector) -> f64 {
    let nd = space.norm_of(d.as_slice());
    if nd == 0.0 {
        return 0.0;
    }
    let d = d / nd;
    let base = space.norm_of(u.as_slice());
    let w = |t: f64| (space.norm_of((u + &d * t).as_slice()) + space.norm_of((u - &d * t).as_slice()) - 2.0 * base) / t;
    let (t1, t2) = (1e-4, 1e-5);
    let (w1, w2) = (w(t1), w(t2));
    (w2 - (w1 - w2) * t2 / (t1 - t2)).max(0.0)
}

fn sampled_defect(space: &NormedSpace, budget: SearchBudget) -> f64 {
    let n = space.dim();
    let mut r = rng(budget.seed);
    let mut points = canonical_directions(space);
    if n == 2 {
        let grid = 720;
        for k in 0..grid {
            let t = k as f64 * std::f64::consts::PI / grid as f64;
            points.push(Vector::from_column_slice(&[t.cos(), t.sin()]));
        }
    } else {
        for _ in 0..budget.starts * 16 {
            points.push(gaussian(n, &mut r));
        }
    }
    let mut dirs: Vec<Vector> = (0..n).map(|i| basis(n, i)).collect();
    for _ in 0..n.min(4) {
        dirs.push(gaussian(n, &mut r));
    }
    let score = |p: &Vector| -> f64 {
        match unit(space, p) {
            Some(u) => dirs.iter().map(|d| kink_width(space, &u, d)).fold(0.0, f64::max),
            None => 0.0,
        }
    };
    let mut scored: Vec<(f64, Vector)> = points.iter().map(|p| (score(p), p.clone())).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = scored.first().map(|s| s.0).unwrap_or(0.0);
    for (_, p) in scored.iter().take(3) {
        let (_, v) = pattern_search(|q| -score(&Vector::from_column_slice(q)), p.as_slice(), 1e-2, 1e-6, budget.iterations);
        best = best.max(-v);
    }
    best
}

/// Supremum over the unit sphere of the diameter of the support face.
///
/// Zero in closed form for smooth `ℓp`; exact over ball vertices for polytopes; 2 for
/// sums of two or more blocks; a difference-quotient probe for gauge bodies.
pub fn smoothness_defect(space: &NormedSpace, budget: SearchBudget) -> f64 {
    if space.dim() == 1 {
        return 0.0;
    }
    match space.kind() {
        SpaceKind::Lp { p } | SpaceKind::WeightedLp { p, .. } if *p > 1.0 && p.is_finite() => 0.0,
        SpaceKind::DirectSum { children, .. } => {
            if children.len() >= 2 {
                2.0
            } else {
                smoothness_defect(&children[0], budget)
            }
        }
        _ => {
            if let Some(vs) = space.ball_vertices() {
                vs.iter().map(|v| face_diameter(space, &space.face_at(v))).fold(0.0, f64::max)
            } else {
                sampled_defect(space, budget)
            }
        }
    }
}
