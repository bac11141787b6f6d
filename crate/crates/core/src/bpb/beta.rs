//! Property-β codomains and the rank-one perturbation
//! `S = T + [(1 + ε/4)·x₁* − T*y_α*]·y_α`, `U = S/‖S‖`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::certificate::{BpbCertificate, Issue, Payload};
use super::eta::EtaPolicy;
use super::functional::{align_to_duality_map, check_unit};
use crate::error::{check_dim, LabError, Result};
use crate::linalg::{basis, gaussian, outer, rng, to_vec, Vector};
use crate::operators::Operator;
use crate::search::bisect_last_true;
use crate::spaces::{NormedSpace, SpaceKind};

/// Points `y_i` and functionals `y_i*` with `‖y‖ = max_i |y_i*(y)|` and
/// `|y_i*(y_j)| ≤ ρ` for `i ≠ j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaStructure {
    pub codomain: NormedSpace,
    pub points: Vec<Vec<f64>>,
    pub functionals: Vec<Vec<f64>>,
    pub rho: f64,
}

impl BetaStructure {
    /// Validate the structure, including the norm identity on 1000 seeded vectors.
    pub fn new(codomain: NormedSpace, points: Vec<Vec<f64>>, functionals: Vec<Vec<f64>>, rho: f64) -> Result<BetaStructure> {
        let b = BetaStructure { codomain, points, functionals, rho };
        b.validate()?;
        Ok(b)
    }

    /// `y_i = e_i`, `y_i* = e_i*`, `ρ = 0` on `ℓ∞^m`.
    pub fn canonical(m: usize) -> BetaStructure {
        BetaStructure::skewed(m, 0.0).expect("canonical structure is valid")
    }

    /// `y_i = e_i + ρ Σ_{j≠i} e_j`, `y_i* = e_i*` on `ℓ∞^m`.
    pub fn skewed(m: usize, rho: f64) -> Result<BetaStructure> {
        if !(0.0..1.0).contains(&rho) {
            return Err(LabError::InvalidBeta(format!("rho {rho} must lie in [0, 1)")));
        }
        let points = (0..m).map(|i| (0..m).map(|j| if i == j { 1.0 } else { rho }).collect()).collect();
        let functionals = (0..m).map(|i| to_vec(&basis(m, i))).collect();
        BetaStructure::new(NormedSpace::linf(m), points, functionals, rho)
    }

    /// The canonical structure of a codomain that is `ℓ∞^m` or one-dimensional.
    pub fn for_codomain(y: &NormedSpace) -> Result<BetaStructure> {
        match y.kind() {
            SpaceKind::Lp { p } if p.is_infinite() => Ok(BetaStructure::canonical(y.dim())),
            _ if y.dim() == 1 => {
                let c = y.norm_of(&[1.0]);
                BetaStructure::new(y.clone(), vec![vec![1.0 / c]], vec![vec![c]], 0.0)
            }
            _ => Err(LabError::Unsupported(format!("no canonical property-β structure on {}", y.label()))),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> Vector {
        Vector::from_column_slice(&self.points[i])
    }

    pub fn functional(&self, i: usize) -> Vector {
        Vector::from_column_slice(&self.functionals[i])
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.points.len();
        if m == 0 || m != self.functionals.len() {
            return Err(LabError::InvalidBeta("needs equally many points and functionals".into()));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(LabError::InvalidBeta(format!("rho {} must lie in [0, 1)", self.rho)));
        }
        let n = self.codomain.dim();
        for i in 0..m {
            check_dim(n, self.points[i].len())?;
            check_dim(n, self.functionals[i].len())?;
        }
        for i in 0..m {
            let yi = self.point(i);
            if (self.codomain.norm_of(yi.as_slice()) - 1.0).abs() > 1e-12 || (self.codomain.dual_norm_of(&self.functionals[i]) - 1.0).abs() > 1e-12 {
                return Err(LabError::InvalidBeta(format!("member {i} is not of norm one")));
            }
            for j in 0..m {
                let v = self.functional(j).dot(&yi);
                if i == j && (v - 1.0).abs() > 1e-12 {
                    return Err(LabError::InvalidBeta(format!("y_{i}*(y_{i}) = {v}")));
                }
                if i != j && v.abs() > self.rho + 1e-12 {
                    return Err(LabError::InvalidBeta(format!("|y_{j}*(y_{i})| = {} exceeds rho", v.abs())));
                }
            }
        }
        let mut r = rng(0xbe7a);
        for _ in 0..1000 {
            let y = gaussian(n, &mut r);
            let sup = (0..m).map(|i| self.functional(i).dot(&y).abs()).fold(0.0, f64::max);
            let norm = self.codomain.norm_of(y.as_slice());
            if (sup - norm).abs() > 1e-10 * norm.max(1.0) {
                return Err(LabError::InvalidBeta(format!("norm {norm} differs from coordinate supremum {sup}")));
            }
        }
        Ok(())
    }
}

/// Largest `ξ ∈ (0, ε/4)` with `1 + ρ(ε/4 + ξ) < (1 + ε/4)(1 − ξ)` by a margin of 1e-9.
pub fn xi_for(rho: f64, epsilon: f64) -> Result<f64> {
    let q = epsilon / 4.0;
    let slack = |xi: f64| (1.0 + q) * (1.0 - xi) - 1.0 - rho * (q + xi) - 1e-9;
    let s0 = slack(0.0);
    if s0 <= 0.0 {
        return Err(LabError::XiInfeasible(s0));
    }
    Ok(bisect_last_true(|xi| slack(xi) > 0.0, 0.0, q, 200))
}

/// Index `α₀` maximizing `|y_α*(v)|` and the sign making it positive.
pub(crate) fn leading_index(beta: &BetaStructure, v: &Vector) -> (usize, f64) {
    let (i, val) = (0..beta.len()).map(|i| (i, beta.functional(i).dot(v))).fold((0, 0.0f64), |a, c| if c.1.abs() > a.1.abs() { c } else { a });
    (i, if val < 0.0 { -1.0 } else { 1.0 })
}

/// Perturb `T` into a property-β codomain so that `U = S/‖S‖` attains at `x₀`.
pub fn beta_perturbation(t: &Operator, x0: &Vector, epsilon: f64, beta: &BetaStructure) -> Result<(Operator, BpbCertificate)> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(LabError::OutOfRange(format!("epsilon must be positive, got {epsilon}")));
    }
    if &beta.codomain != t.codomain() {
        return Err(LabError::InvalidBeta("structure lives on a different codomain".into()));
    }
    let x = t.domain();
    check_unit(x, x0, "correction point")?;
    let tn = t.norm();
    if tn > 1.0 + 1e-9 {
        return Err(LabError::NormTooLarge(tn));
    }
    let policy = EtaPolicy::functional(x)?;
    let xi = xi_for(beta.rho, epsilon)?;
    let eta = policy.eta(xi)?;
    let tx0 = t.apply(x0)?;
    let (a0, s) = leading_index(beta, &tx0);
    let y = beta.point(a0) * s;
    let ystar = beta.functional(a0) * s;
    let f = t.matrix().transpose() * &ystar;
    let lead = f.dot(x0);
    let x1 = align_to_duality_map(x, &f, x0)?;
    let m = t.matrix() + outer(&y, &(&x1 * (1.0 + epsilon / 4.0) - &f));
    let s_op = t.with_matrix(m)?;
    let u = s_op.scaled(1.0 / s_op.norm());
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("xi".into(), xi);
    diagnostics.insert("alpha0".into(), a0 as f64);
    diagnostics.insert("leadingValue".into(), lead);
    diagnostics.insert("gatePassed".into(), if lead > 1.0 - eta.eta { 1.0 } else { 0.0 });
    diagnostics.insert("functionalStep".into(), x.dual_norm_of((&x1 - &f).as_slice()));
    let cert = BpbCertificate::issue(Issue {
        procedure: "beta-perturbation",
        payload: Payload::Operator { input: t.clone(), corrected: u.clone() },
        point: vec![to_vec(x0)],
        epsilon,
        target: epsilon,
        eta: Some(eta),
        seed: 0,
        diagnostics,
    })?;
    Ok((u, cert))
}

/// Correction into `ℓ∞^m` (continuous functions on `m` points) via the canonical structure.
pub fn ck_operator_correction(t: &Operator, x0: &Vector, epsilon: f64) -> Result<(Operator, BpbCertificate)> {
    let beta = BetaStructure::for_codomain(t.codomain())?;
    let (u, mut cert) = beta_perturbation(t, x0, epsilon, &beta)?;
    cert.procedure = "ck-operator-correction".into();
    Ok((u, cert))
}
