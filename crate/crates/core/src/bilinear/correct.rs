//! Point corrections for bilinear maps.
//!
//! - `X × ℓ2^k → ℝ`: correct the operator `x ↦ B(x, ·)` into `ℓ2^k`, then rotate the
//!   `ℓ2^k` factor so the new maximizer lands on `h₀` (distance `< 3ε`).
//! - property-β codomains: the bilinear analogue of the rank-one β perturbation (`< 2ε`).
//! - finite fields of forms: correct the leading form, shift every member by the same
//!   difference and retract onto the unit ball (`< ε`).

use std::collections::BTreeMap;

use super::map::{op_from_bilinear, retract_to_ball, BilinearMap, FormField};
use crate::bpb::{
    align_to_duality_map, check_unit, hilbert_construct, hilbert_internal, hilbert_rotation, leading_index, xi_for, BetaStructure, BpbCertificate, EtaEntry, EtaPolicy, Issue,
    Payload, Provenance,
};
use crate::error::{LabError, Result};
use crate::linalg::{sign, to_vec, Vector};
use crate::operators::attaining_pencil;
use crate::search::SearchBudget;
use crate::spaces::NormedSpace;

/// `1 − √(1 − ε²/4)`.
pub fn delta_hilbert(epsilon: f64) -> f64 {
    let e = epsilon.min(2.0);
    1.0 - (1.0 - e * e / 4.0).sqrt()
}

/// Threshold policy of the `X × ℓ2^k` correction: `min(δ_H(ε), η(δ_H(ε)))`.
pub fn eta_xh(x: &NormedSpace, epsilon: f64) -> Result<EtaEntry> {
    let d = delta_hilbert(epsilon);
    let (inner, provenance) = if x.is_hilbert() {
        (hilbert_internal(d), Provenance::AnalyticHilbert)
    } else {
        let e = EtaPolicy::functional(x)?.eta(d)?;
        (e.eta, Provenance::Empirical)
    };
    Ok(EtaEntry { epsilon, eta: d.min(inner), provenance })
}

fn check_scalar_form(b: &BilinearMap) -> Result<()> {
    if !b.is_scalar() {
        return Err(LabError::Unsupported("expected a scalar bilinear form".into()));
    }
    let n = b.norm();
    if n > 1.0 + 1e-9 {
        return Err(LabError::NormTooLarge(n));
    }
    Ok(())
}

/// Correct a form on `X × ℓ2^k` (X Hilbert or smooth) at `(x₀, h₀)`; certified to `3ε`.
pub fn bilinear_point_correction_xh(b: &BilinearMap, x0: &Vector, h0: &Vector, epsilon: f64) -> Result<(BilinearMap, BpbCertificate)> {
    xh_with_target(b, x0, h0, epsilon, 3.0 * epsilon, "bilinear-point-correction-xh")
}

fn xh_with_target(b: &BilinearMap, x0: &Vector, h0: &Vector, epsilon: f64, target: f64, procedure: &'static str) -> Result<(BilinearMap, BpbCertificate)> {
    if !(epsilon > 0.0 && epsilon < 2.0) {
        return Err(LabError::OutOfRange(format!("epsilon must lie in (0, 2), got {epsilon}")));
    }
    check_scalar_form(b)?;
    let (x, h) = (b.x_space(), b.y_space());
    if !h.is_hilbert() {
        return Err(LabError::Unsupported(format!("second factor must be Euclidean, got {}", h.label())));
    }
    if !x.is_smooth() {
        return Err(LabError::NonSmoothSpace(format!("{}: no operator corrector into ℓ2 for a non-smooth first factor", x.label())));
    }
    check_unit(x, x0, "first point")?;
    check_unit(h, h0, "second point")?;
    let eta = eta_xh(x, epsilon)?;
    let v = b.eval(x0, h0)?[0];
    let s = sign(v);
    let h0s = h0 * s;
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("gap".into(), 1.0 - v.abs());
    diagnostics.insert("gatePassed".into(), if v.abs() > 1.0 - eta.eta { 1.0 } else { 0.0 });
    let norm = b.norm();
    let a = if (norm - 1.0).abs() <= 1e-9 && v.abs() >= norm - 1e-12 {
        b.clone()
    } else {
        let d = delta_hilbert(epsilon);
        let t = op_from_bilinear(b)?;
        let s_op = if x.is_hilbert() {
            hilbert_construct(&t, x0, d)?.0
        } else {
            let j = align_to_duality_map(x, &Vector::zeros(x.dim()), x0)?;
            let p = attaining_pencil(&t, x0, &j, SearchBudget::default())?;
            p.operator
        };
        diagnostics.insert("operatorStep".into(), s_op.minus(&t)?.norm());
        let sx0 = s_op.apply(x0)?;
        let h1 = &sx0 / sx0.norm();
        let drift = (&h0s - &h1).norm();
        diagnostics.insert("pointDrift".into(), drift);
        if drift >= epsilon {
            return Err(LabError::CertificationFailed(format!("norming point moved by {drift}, not below {epsilon}")));
        }
        let r = hilbert_rotation(&h0s, &h1)?;
        b.with_slices(vec![s_op.matrix().transpose() * r.matrix()])?
    };
    let cert = BpbCertificate::issue(Issue {
        procedure,
        payload: Payload::Bilinear { input: b.clone(), corrected: a.clone() },
        point: vec![to_vec(x0), to_vec(h0)],
        epsilon,
        target,
        eta: Some(eta),
        seed: 0,
        diagnostics,
    })?;
    Ok((a, cert))
}

/// A BPBpp corrector for scalar forms: `correct` returns `Ã` attaining at `(x₀, y₀)` with
/// `‖Ã − B‖ < ε`.
pub trait FormsCorrector: Sync {
    fn name(&self) -> &'static str;
    fn eta(&self, x: &NormedSpace, y: &NormedSpace, epsilon: f64) -> Result<EtaEntry>;
    fn correct(&self, b: &BilinearMap, x0: &Vector, y0: &Vector, epsilon: f64) -> Result<(BilinearMap, BpbCertificate)>;
}

/// The `X × ℓ2^k` correction run at `ε/3`, so its distance bound is `ε`.
#[derive(Clone, Copy, Debug, Default)]
pub struct XhCorrector;

impl FormsCorrector for XhCorrector {
    fn name(&self) -> &'static str {
        "xh"
    }

    fn eta(&self, x: &NormedSpace, _y: &NormedSpace, epsilon: f64) -> Result<EtaEntry> {
        let mut e = eta_xh(x, epsilon / 3.0)?;
        e.epsilon = epsilon;
        Ok(e)
    }

    fn correct(&self, b: &BilinearMap, x0: &Vector, y0: &Vector, epsilon: f64) -> Result<(BilinearMap, BpbCertificate)> {
        xh_with_target(b, x0, y0, epsilon / 3.0, epsilon, "xh-forms-corrector")
    }
}

/// `A = B + [(1 + ε/4)·Ã − z_α*∘B]·z_α`, `C = A/‖A‖`; certified to `2ε`.
pub fn beta_bilinear_correction(
    b: &BilinearMap,
    x0: &Vector,
    y0: &Vector,
    epsilon: f64,
    beta: &BetaStructure,
    corrector: &dyn FormsCorrector,
) -> Result<(BilinearMap, BpbCertificate)> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(LabError::OutOfRange(format!("epsilon must be positive, got {epsilon}")));
    }
    if &beta.codomain != b.z_space() {
        return Err(LabError::InvalidBeta("structure lives on a different codomain".into()));
    }
    let n = b.norm();
    if n > 1.0 + 1e-9 {
        return Err(LabError::NormTooLarge(n));
    }
    check_unit(b.x_space(), x0, "first point")?;
    check_unit(b.y_space(), y0, "second point")?;
    let xi = xi_for(beta.rho, epsilon)?;
    let eta = corrector.eta(b.x_space(), b.y_space(), xi)?;
    let bx = b.eval(x0, y0)?;
    let (a0, s) = leading_index(beta, &bx);
    let z = beta.point(a0) * s;
    let zstar = beta.functional(a0) * s;
    let f = b.compose_functional(&zstar)?;
    let lead = f.eval(x0, y0)?[0];
    let (a_tilde, inner) = corrector.correct(&f, x0, y0, xi)?;
    let delta = a_tilde.matrix() * (1.0 + epsilon / 4.0) - f.matrix();
    let a = b.with_slices(b.slices().iter().enumerate().map(|(k, m)| m + &delta * z[k]).collect())?;
    let a_norm = a.norm();
    let c = a.scaled(1.0 / a_norm);
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("xi".into(), xi);
    diagnostics.insert("alpha0".into(), a0 as f64);
    diagnostics.insert("leadingValue".into(), lead);
    diagnostics.insert("gatePassed".into(), if bx.amax() > 1.0 - eta.eta { 1.0 } else { 0.0 });
    diagnostics.insert("formsStep".into(), inner.distance);
    diagnostics.insert("boostedNorm".into(), a_norm);
    let others = (0..beta.len())
        .filter(|&i| i != a0)
        .map(|i| a.compose_functional(&beta.functional(i)).map(|g| g.norm()))
        .try_fold(0.0f64, |m, v| v.map(|v| m.max(v)))?;
    diagnostics.insert("otherCoordinates".into(), others);
    let cert = BpbCertificate::issue(Issue {
        procedure: "beta-bilinear-correction",
        payload: Payload::Bilinear { input: b.clone(), corrected: c.clone() },
        point: vec![to_vec(x0), to_vec(y0)],
        epsilon,
        target: 2.0 * epsilon,
        eta: Some(eta),
        seed: 0,
        diagnostics,
    })?;
    Ok((c, cert))
}

/// `ψ(t) = r(φ(t) + B̃ − φ(t₀))` with `B̃` the corrected leading form; certified to `ε`.
pub fn ck_bilinear_correction(field: &FormField, x0: &Vector, y0: &Vector, epsilon: f64, corrector: &dyn FormsCorrector) -> Result<(FormField, BpbCertificate)> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(LabError::OutOfRange(format!("epsilon must be positive, got {epsilon}")));
    }
    let n = field.norm();
    if n > 1.0 + 1e-9 {
        return Err(LabError::NormTooLarge(n));
    }
    let f0 = &field.forms()[0];
    check_unit(f0.x_space(), x0, "first point")?;
    check_unit(f0.y_space(), y0, "second point")?;
    let vals = field.eval(x0, y0)?;
    let t0 = vals.iamax();
    let eta = corrector.eta(f0.x_space(), f0.y_space(), epsilon / 2.0)?;
    let lead = &field.forms()[t0];
    let (b_tilde, inner) = corrector.correct(lead, x0, y0, epsilon / 2.0)?;
    let shift = b_tilde.minus(lead)?;
    let forms = field
        .forms()
        .iter()
        .enumerate()
        .map(|(j, phi)| if j == t0 { Ok(retract_to_ball(&b_tilde)) } else { phi.with_slices(vec![phi.matrix() + shift.matrix()]).map(|c| retract_to_ball(&c)) })
        .collect::<Result<Vec<_>>>()?;
    let a = FormField::new(field.points().to_vec(), forms)?;
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("t0".into(), t0 as f64);
    diagnostics.insert("leadingValue".into(), vals[t0]);
    diagnostics.insert("gatePassed".into(), if vals.amax() > 1.0 - eta.eta { 1.0 } else { 0.0 });
    diagnostics.insert("formsStep".into(), inner.distance);
    let cert = BpbCertificate::issue(Issue {
        procedure: "ck-bilinear-correction",
        payload: Payload::Field { input: field.clone(), corrected: a.clone() },
        point: vec![to_vec(x0), to_vec(y0)],
        epsilon,
        target: epsilon,
        eta: Some(eta),
        seed: 0,
        diagnostics,
    })?;
    Ok((a, cert))
}
