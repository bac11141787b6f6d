//! Propagation of witnesses through finite `ℓ∞`- and `ℓ1`-sums of codomains.
//!
//! Block embeddings are isometric for both sum kinds, so a child witness lifts with the
//! same gap. For `ℓ∞`-sums the lifted distance is only bounded below by
//! `min(child distance, 1)`: an operator may attain through another block at cost 1.
//! For `ℓ1`-sums the extreme dual functionals restrict to the child, so the bound is the
//! child distance itself. Projections of sum witnesses onto their leading block are
//! checked for `ℓ∞`-sums and recorded as data for `ℓ1`-sums.

use serde::{Deserialize, Serialize};

use super::{assess, estimate_eta_pair, lift_witness, EtaEstimate};
use crate::bpb::{beta_perturbation, eta_functional, xi_for, BetaStructure};
use crate::error::Result;
use crate::instances::operator_with_gap;
use crate::linalg::rng;
use crate::operators::Operator;
use crate::search::SearchBudget;
use crate::spaces::{direct_sum, NormedSpace, SumKind};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LiftCheck {
    pub child: usize,
    pub child_gap: f64,
    pub child_distance: f64,
    pub lifted_gap: f64,
    pub lifted_distance: f64,
    /// Distance the lifted witness must keep.
    pub required: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProjectionCheck {
    pub block: usize,
    pub gap: f64,
    pub projected_gap: f64,
    pub distance: f64,
    pub projected_distance: Option<f64>,
    /// `None` where no implication is known (data only).
    pub ok: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionTally {
    pub attempted: usize,
    pub certified: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SumPropagationReport {
    pub domain: NormedSpace,
    pub sum_kind: SumKind,
    pub epsilon: f64,
    pub children: Vec<EtaEstimate>,
    pub sum: EtaEstimate,
    pub lifted: Vec<LiftCheck>,
    pub projected: Vec<ProjectionCheck>,
    /// Property-β corrections on an `ℓ∞`-sum of scalar fields.
    pub corrections: Option<CorrectionTally>,
    /// Every asserted check passed.
    pub consistent: bool,
}

/// Leading block of `T x₀` and the projected operator.
fn project(t: &Operator, sum: &NormedSpace, children: &[NormedSpace], x0: &crate::linalg::Vector) -> Result<(usize, Operator)> {
    let blocks = sum.blocks();
    let tx = t.apply(x0)?;
    let norms: Vec<f64> = children.iter().zip(&blocks).map(|(c, r)| c.norm_of(&tx.as_slice()[r.clone()])).collect();
    let j = (0..norms.len()).max_by(|&a, &b| norms[a].total_cmp(&norms[b])).unwrap_or(0);
    let r = blocks[j].clone();
    let m = t.matrix().rows(r.start, r.len()).into_owned();
    Ok((j, Operator::new(m, t.domain().clone(), children[j].clone())?))
}

/// Estimate η̂ for `(X, Y_j)` and `(X, ⊕Y_j)`, lift child witnesses into the sum and
/// project sum witnesses back.
pub fn sum_propagation_suite(x: &NormedSpace, children: &[NormedSpace], sum_kind: SumKind, epsilon: f64, budget: SearchBudget) -> Result<SumPropagationReport> {
    let sum = direct_sum(children.to_vec(), sum_kind)?;
    let child_est = children
        .iter()
        .enumerate()
        .map(|(j, y)| estimate_eta_pair(x, y, epsilon, budget.fork(j as u64)))
        .collect::<Result<Vec<_>>>()?;
    let sum_est = estimate_eta_pair(x, &sum, epsilon, budget.fork(children.len() as u64))?;
    let mut lifted = Vec::new();
    for (j, est) in child_est.iter().enumerate() {
        for w in &est.witnesses {
            let l = lift_witness(w, &sum, j)?;
            let required = match sum_kind {
                SumKind::LInf => w.distance.min(1.0),
                SumKind::L1 => w.distance,
            };
            let ok = (l.gap - w.gap).abs() <= 1e-12 && l.distance >= required - 1e-8;
            lifted.push(LiftCheck { child: j, child_gap: w.gap, child_distance: w.distance, lifted_gap: l.gap, lifted_distance: l.distance, required, ok });
        }
    }
    let mut projected = Vec::new();
    for w in &sum_est.witnesses {
        let x0 = w.point_vector();
        let (j, tj) = project(&w.operator, &sum, children, &x0)?;
        let a = assess(&tj, &x0, epsilon, None).ok();
        let ok = match sum_kind {
            SumKind::LInf => Some(a.is_some_and(|a| (a.gap - w.gap).abs() <= 1e-12 && a.distance >= w.distance - 1e-8)),
            SumKind::L1 => None,
        };
        projected.push(ProjectionCheck {
            block: j,
            gap: w.gap,
            projected_gap: a.map_or(f64::NAN, |a| a.gap),
            distance: w.distance,
            projected_distance: a.map(|a| a.distance),
            ok,
        });
    }
    let corrections = if sum_kind == SumKind::LInf && children.iter().all(|c| c.dim() == 1) && x.is_smooth() {
        Some(beta_on_scalar_sum(x, &sum, children, epsilon, budget)?)
    } else {
        None
    };
    let consistent = lifted.iter().all(|l| l.ok)
        && projected.iter().all(|p| p.ok != Some(false))
        && corrections.is_none_or(|c| c.certified == c.attempted);
    Ok(SumPropagationReport { domain: x.clone(), sum_kind, epsilon, children: child_est, sum: sum_est, lifted, projected, corrections, consistent })
}

/// Property-β corrections through the canonical structure of `ℝ ⊕∞ … ⊕∞ ℝ`.
fn beta_on_scalar_sum(x: &NormedSpace, sum: &NormedSpace, children: &[NormedSpace], epsilon: f64, budget: SearchBudget) -> Result<CorrectionTally> {
    let m = children.len();
    let mut points = Vec::with_capacity(m);
    let mut functionals = Vec::with_capacity(m);
    for (i, c) in children.iter().enumerate() {
        let s = c.norm_of(&[1.0]);
        let mut p = vec![0.0; m];
        let mut f = vec![0.0; m];
        p[i] = 1.0 / s;
        f[i] = s;
        points.push(p);
        functionals.push(f);
    }
    let beta = BetaStructure::new(sum.clone(), points, functionals, 0.0)?;
    let eta = eta_functional(x, xi_for(0.0, epsilon)?)?.eta;
    let mut r = rng(budget.seed ^ 0xbe7a);
    let attempted = 8;
    let mut certified = 0;
    for _ in 0..attempted {
        let (t, x0) = operator_with_gap(x, sum, 0.5 * eta, &mut r)?;
        if beta_perturbation(&t, &x0, epsilon, &beta).is_ok() {
            certified += 1;
        }
    }
    Ok(CorrectionTally { attempted, certified })
}
