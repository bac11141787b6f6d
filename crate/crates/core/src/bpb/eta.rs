//! Admissible `η(ε)` for the correction procedures, with provenance.
//!
//! - Hilbert spaces (and every 1-D space): `ε²/2`.
//! - `ℓp`, `1 < p < ∞`: from a lower bound `δ*` on the convexity modulus of the dual,
//!   `η = max_{ε'} min(2δ*(ε'), ε − ε')`.
//! - other smooth spaces: the same formula on a numerical estimate of `δ*`, then shrunk
//!   until seeded retrials of the functional correction all succeed.
//! - Hilbert domains, internal step: `η_H(ε) = min(ε'⁴/4, ε'²/16, (√(1+ε') − 1)²)` with
//!   `ε' = ε/2`, matching the rank-one boost with `c = clamp(√gap, 1e-6, ε/8)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::linalg::{gaussian, rng, sign};
use crate::search::{bisect_last_true, SearchBudget};
use crate::spaces::{conjugate, modulus_convexity, NormedSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    AnalyticBpb,
    AnalyticHilbert,
    DerivedFromModulus,
    Empirical,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaEntry {
    pub epsilon: f64,
    pub eta: f64,
    pub provenance: Provenance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Rule {
    Bpb,
    Clarkson { q_bits: u64 },
    Empirical,
    HilbertInternal,
}

/// An `ε ↦ η(ε)` rule for a pair, with a shared per-`ε` cache.
#[derive(Clone, Debug)]
pub struct EtaPolicy {
    domain: NormedSpace,
    codomain: NormedSpace,
    rule: Rule,
    cache: Arc<Mutex<HashMap<u64, EtaEntry>>>,
}

impl EtaPolicy {
    /// Policy for the functional correction on `X` (pair `(X, ℝ)`).
    pub fn functional(x: &NormedSpace) -> Result<EtaPolicy> {
        if !x.is_smooth() {
            return Err(LabError::NonSmoothSpace(format!(
                "{}: a non-smooth norm admits no uniform η for pointwise correction",
                x.label()
            )));
        }
        let rule = if x.dim() == 1 || x.is_hilbert() {
            Rule::Bpb
        } else if let Some((p, _)) = x.lp_parts() {
            Rule::Clarkson { q_bits: conjugate(p).to_bits() }
        } else {
            Rule::Empirical
        };
        Ok(EtaPolicy::shared(x.clone(), NormedSpace::scalars(), rule))
    }

    /// The internal rank-one-boost policy for Hilbert domains into any `Y`.
    pub fn hilbert_internal(x: &NormedSpace, y: &NormedSpace) -> Result<EtaPolicy> {
        if !x.is_hilbert() {
            return Err(LabError::Unsupported(format!("{} is not a Hilbert space", x.label())));
        }
        Ok(EtaPolicy::shared(x.clone(), y.clone(), Rule::HilbertInternal))
    }

    fn shared(domain: NormedSpace, codomain: NormedSpace, rule: Rule) -> EtaPolicy {
        type Key = (String, String, Rule);
        static CACHES: OnceLock<Mutex<HashMap<Key, Arc<Mutex<HashMap<u64, EtaEntry>>>>>> = OnceLock::new();
        let key = (domain.label(), codomain.label(), rule);
        let cache = CACHES.get_or_init(Default::default).lock().expect("eta cache").entry(key).or_default().clone();
        EtaPolicy { domain, codomain, rule, cache }
    }

    pub fn domain(&self) -> &NormedSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &NormedSpace {
        &self.codomain
    }

    pub fn provenance(&self) -> Provenance {
        match self.rule {
            Rule::Bpb => Provenance::AnalyticBpb,
            Rule::Clarkson { .. } => Provenance::DerivedFromModulus,
            Rule::Empirical => Provenance::Empirical,
            Rule::HilbertInternal => Provenance::AnalyticHilbert,
        }
    }

    pub fn eta(&self, epsilon: f64) -> Result<EtaEntry> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(LabError::OutOfRange(format!("epsilon must be positive, got {epsilon}")));
        }
        if let Some(e) = self.cache.lock().expect("eta cache").get(&epsilon.to_bits()) {
            return Ok(*e);
        }
        let eta = match self.rule {
            Rule::Bpb => epsilon * epsilon / 2.0,
            Rule::Clarkson { q_bits } => {
                let q = f64::from_bits(q_bits);
                from_dual_modulus(epsilon, |e| clarkson_lower(q, e))
            }
            Rule::HilbertInternal => hilbert_internal(epsilon),
            Rule::Empirical => empirical(&self.domain, epsilon),
        };
        let entry = EtaEntry { epsilon, eta, provenance: self.provenance() };
        self.cache.lock().expect("eta cache").insert(epsilon.to_bits(), entry);
        Ok(entry)
    }

    /// Entries on a grid of `ε` values.
    pub fn table(&self, grid: &[f64]) -> Result<Vec<EtaEntry>> {
        grid.iter().map(|&e| self.eta(e)).collect()
    }
}

/// `η` for the functional correction on `X`.
pub fn eta_functional(x: &NormedSpace, epsilon: f64) -> Result<EtaEntry> {
    if !(epsilon > 0.0 && epsilon < 2.0) {
        return Err(LabError::OutOfRange(format!("epsilon must lie in (0, 2), got {epsilon}")));
    }
    EtaPolicy::functional(x)?.eta(epsilon)
}

/// Lower bound for the convexity modulus of `ℓq`.
pub fn clarkson_lower(q: f64, e: f64) -> f64 {
    let e = e.min(2.0);
    if q >= 2.0 {
        1.0 - (1.0 - (e / 2.0).powf(q)).powf(1.0 / q)
    } else {
        (q - 1.0) * e * e / 8.0
    }
}

/// `max_{ε'} min(2δ(ε'), ε − ε')` for a nondecreasing `δ`, shrunk by `1 − 1e-9`.
pub fn from_dual_modulus<F: Fn(f64) -> f64>(epsilon: f64, delta: F) -> f64 {
    let e1 = bisect_last_true(|t| 2.0 * delta(t) <= epsilon - t, 0.0, epsilon.min(2.0), 200);
    (2.0 * delta(e1)).min(epsilon - e1) * (1.0 - 1e-9)
}

pub fn hilbert_internal(epsilon: f64) -> f64 {
    let e = epsilon / 2.0;
    let v = (e.powi(4) / 4.0).min(e * e / 16.0).min(((1.0 + e).sqrt() - 1.0).powi(2));
    v * (1.0 - 1e-6)
}

/// Numerical dual modulus, then halving until 256 seeded retrials succeed.
fn empirical(x: &NormedSpace, epsilon: f64) -> f64 {
    let dual = x.dual();
    let budget = SearchBudget::default();
    let delta = |e: f64| modulus_convexity(dual, e.clamp(1e-9, 2.0), budget).map(|m| m.value).unwrap_or(0.0);
    let mut eta = from_dual_modulus(epsilon, delta).max(1e-12);
    let mut r = rng(0xe7a ^ epsilon.to_bits());
    let trials: Vec<_> = (0..256).map(|_| (gaussian(x.dim(), &mut r), gaussian(x.dim(), &mut r))).collect();
    'shrink: for _ in 0..40 {
        for (a, b) in &trials {
            let Ok(x0) = x.normalize(a) else { continue };
            let Ok(j) = x.duality_map(&x0) else { continue };
            // a functional on the unit dual sphere with value exactly 1 − 0.999η at x0
            let target = 1.0 - 0.999 * eta;
            let dir = b - &j * j.dot(b);
            let path = |t: f64| -> Option<crate::linalg::Vector> { dual.normalize(&(&j + &dir * t)).ok() };
            let t = bisect_last_true(|t| path(t).is_some_and(|f| f.dot(&x0) >= target), 0.0, 1e3, 200);
            let Some(f) = path(t) else { continue };
            let g = &j * sign(f.dot(&x0));
            if x.dual_norm_of((&g - &f).as_slice()) >= epsilon {
                eta *= 0.5;
                continue 'shrink;
            }
        }
        break;
    }
    eta
}
