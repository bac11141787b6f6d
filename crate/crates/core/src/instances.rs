//! Seeded instance generators with a prescribed value gap `1 − |value|`.
//!
//! Every generator walks a path that starts at an attaining point (value 1) and leaves it
//! until the value drops below the target, then bisects. The returned point sits on the
//! attaining side, so the realized gap never exceeds the requested one.

use rand::RngExt;

use crate::bilinear::{BilinearMap, FormField};
use crate::error::{LabError, Result};
use crate::linalg::{gaussian, gaussian_matrix, Rng, Vector};
use crate::operators::Operator;
use crate::search::bisect_last_true;
use crate::spaces::NormedSpace;

const RETRIES: usize = 64;

fn check_gap(gap: f64) -> Result<()> {
    if gap > 0.0 && gap < 1.0 {
        Ok(())
    } else {
        Err(LabError::OutOfRange(format!("gap must lie in (0, 1), got {gap}")))
    }
}

/// Bisect `s ↦ value(s)` from an attaining start to the last `s` with `value ≥ target`.
fn walk<F: Fn(f64) -> Option<f64>>(value: F, target: f64) -> Option<f64> {
    let far = 1e6;
    if value(far)? >= target {
        return None;
    }
    let s = bisect_last_true(|s| value(s).is_some_and(|v| v >= target), 0.0, far, 200);
    value(s).is_some_and(|v| v >= target).then_some(s)
}

/// `(x₀, x₀*)`: unit point and unit functional with `x₀*(x₀) = 1 − gap`.
///
/// Euclidean spaces use the closed form `x₀* = (1 − gap)x₀ + √(1 − (1 − gap)²)v` with
/// `v ⟂ x₀`; other spaces bisect along a dual great circle from the duality map.
pub fn functional_with_gap(space: &NormedSpace, gap: f64, rng: &mut Rng) -> Result<(Vector, Vector)> {
    check_gap(gap)?;
    let n = space.dim();
    if n < 2 {
        return Err(LabError::Unsupported("a prescribed gap needs dimension at least 2".into()));
    }
    let target = 1.0 - gap;
    for _ in 0..RETRIES {
        let x0 = space.normalize(&gaussian(n, rng))?;
        if space.is_hilbert() {
            let g = gaussian(n, rng);
            let v = &g - &x0 * x0.dot(&g);
            let nv = v.norm();
            if nv < 1e-8 {
                continue;
            }
            let f = &x0 * target + v * ((1.0 - target * target).sqrt() / nv);
            return Ok((x0, f));
        }
        let Ok(j) = space.duality_map(&x0) else { continue };
        let d = gaussian(n, rng);
        let f_at = |s: f64| space.dual().normalize(&(&j + &d * s)).ok();
        if let Some(s) = walk(|s| f_at(s).map(|f| f.dot(&x0)), target) {
            if let Some(f) = f_at(s) {
                return Ok((x0, f));
            }
        }
    }
    Err(LabError::Unsupported(format!("no functional with gap {gap} found on {}", space.label())))
}

/// Random operator scaled to norm one.
pub fn unit_operator(domain: &NormedSpace, codomain: &NormedSpace, rng: &mut Rng) -> Result<Operator> {
    for _ in 0..RETRIES {
        let t = Operator::new(gaussian_matrix(codomain.dim(), domain.dim(), rng), domain.clone(), codomain.clone())?;
        let n = t.norm();
        if n > 1e-6 {
            return Ok(t.scaled(1.0 / n));
        }
    }
    Err(LabError::Unsupported("degenerate random operators".into()))
}

/// `(T, x₀)` with `‖T‖ = 1` and `‖T x₀‖ ∈ [1 − gap, 1 − gap + 1e-12]`.
pub fn operator_with_gap(domain: &NormedSpace, codomain: &NormedSpace, gap: f64, rng: &mut Rng) -> Result<(Operator, Vector)> {
    check_gap(gap)?;
    let target = 1.0 - gap;
    for _ in 0..RETRIES {
        let t = unit_operator(domain, codomain, rng)?;
        let w = t.norm_report().point();
        for _ in 0..RETRIES {
            let d = gaussian(domain.dim(), rng);
            let x_at = |s: f64| domain.normalize(&(&w + &d * s)).ok();
            let value = |s: f64| x_at(s).map(|x| codomain.norm_of((t.matrix() * x).as_slice()));
            if let Some(s) = walk(value, target) {
                if let Some(x) = x_at(s) {
                    return Ok((t, x));
                }
            }
        }
    }
    Err(LabError::Unsupported(format!("no operator with gap {gap} found")))
}

/// Random bilinear map scaled to norm one.
pub fn unit_bilinear(x: &NormedSpace, y: &NormedSpace, z: &NormedSpace, rng: &mut Rng) -> Result<BilinearMap> {
    for _ in 0..RETRIES {
        let slices = (0..z.dim()).map(|_| gaussian_matrix(x.dim(), y.dim(), rng)).collect();
        let b = BilinearMap::new(slices, x.clone(), y.clone(), z.clone())?;
        let n = b.norm();
        if n > 1e-6 {
            return Ok(b.scaled(1.0 / n));
        }
    }
    Err(LabError::Unsupported("degenerate random bilinear maps".into()))
}

/// Point `(x₀, y₀)` with `‖B(x₀, y₀)‖ ∈ [1 − gap, 1]` for a given `B` of norm one.
pub fn point_with_gap(b: &BilinearMap, gap: f64, rng: &mut Rng) -> Result<(Vector, Vector)> {
    check_gap(gap)?;
    let target = 1.0 - gap;
    let (wx, wy) = b.norm_report().witness();
    let (xs, ys) = (b.x_space(), b.y_space());
    for _ in 0..RETRIES {
        let dx = gaussian(xs.dim(), rng);
        let dy = gaussian(ys.dim(), rng);
        let at = |s: f64| Some((xs.normalize(&(&wx + &dx * s)).ok()?, ys.normalize(&(&wy + &dy * s)).ok()?));
        let value = |s: f64| at(s).and_then(|(x, y)| b.value_norm(&x, &y).ok());
        if let Some(s) = walk(value, target) {
            if let Some(p) = at(s) {
                return Ok(p);
            }
        }
    }
    Err(LabError::Unsupported(format!("no point with gap {gap} found")))
}

/// `(B, x₀, y₀)` with `‖B‖ = 1` and `‖B(x₀, y₀)‖ ∈ [1 − gap, 1]`.
pub fn bilinear_with_gap(x: &NormedSpace, y: &NormedSpace, z: &NormedSpace, gap: f64, rng: &mut Rng) -> Result<(BilinearMap, Vector, Vector)> {
    for _ in 0..RETRIES {
        let b = unit_bilinear(x, y, z, rng)?;
        if let Ok((x0, y0)) = point_with_gap(&b, gap, rng) {
            return Ok((b, x0, y0));
        }
    }
    Err(LabError::Unsupported(format!("no bilinear map with gap {gap} found")))
}

/// Field of `m` scalar forms with norms in `[0.3, 1]`, the first of norm one, and a point
/// where the first form has gap at most `gap`.
pub fn field_with_gap(x: &NormedSpace, y: &NormedSpace, m: usize, gap: f64, rng: &mut Rng) -> Result<(FormField, Vector, Vector)> {
    if m == 0 {
        return Err(LabError::OutOfRange("a field needs at least one point".into()));
    }
    let scalars = NormedSpace::scalars();
    let (lead, x0, y0) = bilinear_with_gap(x, y, &scalars, gap, rng)?;
    let mut forms = vec![lead];
    for _ in 1..m {
        let phi = unit_bilinear(x, y, &scalars, rng)?;
        forms.push(phi.scaled(rng.random_range(0.3..1.0)));
    }
    Ok((FormField::labeled(forms)?, x0, y0))
}
