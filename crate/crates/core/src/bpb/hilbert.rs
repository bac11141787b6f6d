//! Hilbert-domain corrections: plane rotations, the rank-one boost, and `S = S̃ ∘ R`.

use std::collections::BTreeMap;

use super::certificate::{BpbCertificate, Issue, Payload};
use super::eta::EtaPolicy;
use super::functional::check_unit;
use crate::error::{check_dim, LabError, Result};
use crate::linalg::{outer, to_vec, Matrix, Vector};
use crate::operators::{attainment_check, op_norm, Operator};
use crate::search::SearchBudget;
use crate::spaces::NormedSpace;

/// Orthogonal `R` with `R h₀ = h₁`, rotating the plane `span{h₀, h₁}` and fixing its
/// complement.
pub fn hilbert_rotation(h0: &Vector, h1: &Vector) -> Result<Operator> {
    let n = h0.len();
    check_dim(n, h1.len())?;
    for h in [h0, h1] {
        if (h.norm() - 1.0).abs() > 1e-10 {
            return Err(LabError::NotUnit(h.norm()));
        }
    }
    let space = NormedSpace::l2(n);
    let u = h0 / h0.norm();
    let h1 = h1 / h1.norm();
    let mut c = u.dot(&h1).clamp(-1.0, 1.0);
    let mut w = &h1 - &u * c;
    w -= &u * u.dot(&w);
    let mut s = w.norm();
    if s <= 1e-15 && c > 0.0 {
        return Operator::new(Matrix::identity(n, n), space.clone(), space);
    }
    let v = if s > 1e-15 {
        let v = w / s;
        let (c1, s1) = (u.dot(&h1), v.dot(&h1));
        let r = c1.hypot(s1);
        c = c1 / r;
        s = s1 / r;
        v
    } else {
        if n == 1 {
            return Err(LabError::Unsupported("no rotation maps h to -h in dimension 1".into()));
        }
        let k = (0..n).min_by(|&i, &j| u[i].abs().total_cmp(&u[j].abs())).expect("n > 0");
        let e = crate::linalg::basis(n, k);
        let p = &e - &u * u.dot(&e);
        &p / p.norm()
    };
    let r = Matrix::identity(n, n) + (outer(&u, &u) + outer(&v, &v)) * (c - 1.0) + (outer(&v, &u) - outer(&u, &v)) * s;
    Operator::new(r, space.clone(), space)
}

#[derive(Clone, Debug)]
pub struct BoostResult {
    /// Unit-norm boosted operator.
    pub operator: Operator,
    /// Its maximizer, sign-aligned with `h₀`.
    pub point: Vector,
    pub certified: bool,
    /// Guaranteed lower bound on `⟨h̃₀, h₀⟩`.
    pub inner_bound: f64,
    /// Guaranteed upper bound on `‖S̃ − T‖`.
    pub distance_bound: f64,
}

/// `S̃ = (T + c·⟨·, h₀⟩·T h₀/‖T h₀‖)/‖·‖` and its exact maximizer.
pub fn rank_one_boost(t: &Operator, h0: &Vector, c: f64) -> Result<BoostResult> {
    if !t.domain().is_hilbert() {
        return Err(LabError::Unsupported(format!("rank-one boost needs a Hilbert domain, got {}", t.domain().label())));
    }
    if !(c > 0.0 && c <= 1.0) {
        return Err(LabError::OutOfRange(format!("boost constant {c} must lie in (0, 1]")));
    }
    check_unit(t.domain(), h0, "boost point")?;
    let tn = t.norm();
    if tn > 1.0 + 1e-9 {
        return Err(LabError::NormTooLarge(tn));
    }
    let th0 = t.apply(h0)?;
    let ntx = t.codomain().norm(&th0)?;
    if ntx == 0.0 {
        return Err(LabError::ZeroVector("image of the boost point"));
    }
    let s1 = t.with_matrix(t.matrix() + outer(&(&th0 / ntx), h0) * c)?;
    let rep = op_norm(&s1, SearchBudget::default());
    let s = s1.scaled(1.0 / rep.value);
    let mut p = rep.point();
    if p.dot(h0) < 0.0 {
        p = -p;
    }
    let gap = 1.0 - ntx;
    Ok(BoostResult { operator: s, point: p, certified: rep.certified(), inner_bound: 1.0 - gap / c, distance_bound: 2.0 * c + gap })
}

/// Boost constant `clamp(√gap, 1e-6, ε/8)`.
pub fn boost_constant(gap: f64, epsilon: f64) -> f64 {
    gap.max(0.0).sqrt().clamp(1e-6, (epsilon / 8.0).max(1e-6))
}

/// The uncertified construction `S̃ ∘ R`, returning it with `⟨h̃₀, h₀⟩`.
pub(crate) fn hilbert_construct(t: &Operator, h0: &Vector, epsilon: f64) -> Result<(Operator, f64)> {
    let tn = t.norm();
    if (tn - 1.0).abs() <= 1e-9 && attainment_check(t, h0, 1e-12)?.passed {
        return Ok((t.clone(), 1.0));
    }
    let gap = 1.0 - t.codomain().norm(&t.apply(h0)?)?;
    let boost = rank_one_boost(t, h0, boost_constant(gap, epsilon))?;
    let r = hilbert_rotation(h0, &boost.point)?;
    let s = t.with_matrix(boost.operator.matrix() * r.matrix())?;
    Ok((s, boost.point.dot(h0)))
}

/// Correct `T: ℓ2ⁿ → Y` to an operator attaining its norm at `h₀`.
pub fn hilbert_domain_correction(t: &Operator, h0: &Vector, epsilon: f64) -> Result<(Operator, BpbCertificate)> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(LabError::OutOfRange(format!("epsilon must be positive, got {epsilon}")));
    }
    let policy = EtaPolicy::hilbert_internal(t.domain(), t.codomain())?;
    check_unit(t.domain(), h0, "correction point")?;
    let tn = t.norm();
    if tn > 1.0 + 1e-9 {
        return Err(LabError::NormTooLarge(tn));
    }
    let eta = policy.eta(epsilon)?;
    let gap = 1.0 - t.codomain().norm(&t.apply(h0)?)?;
    let (s, inner) = hilbert_construct(t, h0, epsilon)?;
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("gap".into(), gap);
    diagnostics.insert("gatePassed".into(), if gap < eta.eta { 1.0 } else { 0.0 });
    diagnostics.insert("boostConstant".into(), boost_constant(gap, epsilon));
    diagnostics.insert("maximizerInner".into(), inner);
    let cert = BpbCertificate::issue(Issue {
        procedure: "hilbert-domain-correction",
        payload: Payload::Operator { input: t.clone(), corrected: s.clone() },
        point: vec![to_vec(h0)],
        epsilon,
        target: epsilon,
        eta: Some(eta),
        seed: 0,
        diagnostics,
    })
    .map_err(|e| match e {
        LabError::CertificationFailed(m) => LabError::CertificationFailed(format!("{m}; boosted maximizer has inner product {inner} with the point")),
        e => e,
    })?;
    Ok((s, cert))
}
