//! Duality-map correction of functionals: `x₁* = sign(x₀*(x₀))·J(x₀)`.

use std::collections::BTreeMap;

use super::certificate::{BpbCertificate, Issue, Payload};
use super::eta::eta_functional;
use crate::error::{check_dim, LabError, Result};
use crate::linalg::{sign, to_vec, Vector};
use crate::spaces::NormedSpace;

pub(crate) fn check_unit(space: &NormedSpace, x: &Vector, what: &'static str) -> Result<()> {
    let n = space.norm(x)?;
    if n == 0.0 {
        return Err(LabError::ZeroVector(what));
    }
    if (n - 1.0).abs() > 1e-10 {
        return Err(LabError::NotUnit(n));
    }
    Ok(())
}

/// `sign(f(x₀))·J(x₀)` when `X` is smooth at `x₀`; no threshold is applied.
pub(crate) fn align_to_duality_map(space: &NormedSpace, f: &Vector, x0: &Vector) -> Result<Vector> {
    let set = space.support_functionals(x0)?;
    if !set.is_singleton {
        return Err(LabError::NonSmoothPoint { diameter: set.diameter() });
    }
    Ok(set.representative() * sign(f.dot(x0)))
}

/// Correct `x₀*` to a norm-one functional attaining at the unit `x₀`.
///
/// `x₀*` may exceed the unit ball by less than `η`, mirroring the gate
/// `|x₀*(x₀)| > 1 − η`.
pub fn functional_point_correction(space: &NormedSpace, x0_star: &Vector, x0: &Vector, epsilon: f64) -> Result<(Vector, BpbCertificate)> {
    check_dim(space.dim(), x0_star.len())?;
    check_unit(space, x0, "correction point")?;
    let eta = eta_functional(space, epsilon)?;
    let fnorm = space.dual_norm(x0_star)?;
    if fnorm >= 1.0 + eta.eta {
        return Err(LabError::NormTooLarge(fnorm));
    }
    let value = x0_star.dot(x0).abs();
    if value <= 1.0 - eta.eta {
        return Err(LabError::PreconditionGap { value, threshold: 1.0 - eta.eta });
    }
    let x1 = align_to_duality_map(space, x0_star, x0)?;
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("gap".into(), 1.0 - value);
    diagnostics.insert("inputNorm".into(), fnorm);
    let cert = BpbCertificate::issue(Issue {
        procedure: "functional-point-correction",
        payload: Payload::Functional { space: space.clone(), input: to_vec(x0_star), corrected: to_vec(&x1) },
        point: vec![to_vec(x0)],
        epsilon,
        target: epsilon,
        eta: Some(eta),
        seed: 0,
        diagnostics,
    })?;
    Ok((x1, cert))
}
