//! Finite-dimensional real normed spaces.
//!
//! A [`NormedSpace`] bundles a norm oracle, a dual-norm oracle and a support-functional
//! (duality map) oracle. Supported kinds: `ℓp^n`, weighted `ℓp^n`, polyhedral norms given
//! by symmetric dual generators, gauges of convex bodies, and finite `ℓ1`/`ℓ∞` direct sums.

mod body;
mod descriptor;
mod face;
mod moduli;
mod polytope;

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

pub use body::Body;
pub use descriptor::{BodyParams, Exponent, SpaceDescriptor};
pub use face::{Face, SupportSet};
pub use moduli::{modulus_convexity, modulus_smoothness, smoothness_defect, BoundKind, ModulusEstimate};

use crate::error::{check_dim, LabError, Result};
use crate::linalg::Vector;
use body::{l1, l2, linf};

/// Tri-state smoothness hint attached to every space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Smoothness {
    Smooth,
    Nonsmooth,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SumKind {
    #[serde(rename = "l1")]
    L1,
    #[serde(rename = "linf")]
    LInf,
}

impl SumKind {
    pub fn dual(self) -> SumKind {
        match self {
            SumKind::L1 => SumKind::LInf,
            SumKind::LInf => SumKind::L1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpaceKind {
    Lp { p: f64 },
    WeightedLp { p: f64, weights: Vec<f64> },
    /// Norm `max_g ⟨g, x⟩`; `vertices` are the extreme points of the unit ball.
    Polyhedral { generators: Vec<Vector>, vertices: Vec<Vector> },
    Gauge(Body),
    DirectSum { children: Vec<NormedSpace>, sum: SumKind },
}

/// A finite-dimensional real normed space.
#[derive(Clone, Debug)]
pub struct NormedSpace {
    dim: usize,
    kind: SpaceKind,
    smoothness: Smoothness,
    dual: Arc<OnceLock<NormedSpace>>,
}

impl PartialEq for NormedSpace {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.kind == other.kind
    }
}

/// Conjugate exponent, with `1 ↔ ∞`.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

pub(crate) fn lp_norm(x: &[f64], p: f64) -> f64 {
    if p == 1.0 {
        l1(x)
    } else if p == 2.0 {
        l2(x)
    } else if p.is_infinite() {
        linf(x)
    } else {
        let m = linf(x);
        if m == 0.0 || !m.is_finite() {
            return m;
        }
        m * x.iter().map(|v| (v.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

fn check_p(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        Err(LabError::MalformedSpace(format!("exponent p = {p} must be at least 1")))
    } else {
        Ok(())
    }
}

fn check_positive_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        Err(LabError::MalformedSpace("dimension must be positive".into()))
    } else {
        Ok(())
    }
}

impl NormedSpace {
    fn build(dim: usize, kind: SpaceKind) -> NormedSpace {
        let smoothness = if dim == 1 {
            Smoothness::Smooth
        } else {
            match &kind {
                SpaceKind::Lp { p } | SpaceKind::WeightedLp { p, .. } => {
                    if *p > 1.0 && p.is_finite() {
                        Smoothness::Smooth
                    } else {
                        Smoothness::Nonsmooth
                    }
                }
                SpaceKind::Polyhedral { .. } => Smoothness::Nonsmooth,
                SpaceKind::Gauge(b) => {
                    if b.is_smooth() {
                        Smoothness::Smooth
                    } else {
                        Smoothness::Nonsmooth
                    }
                }
                SpaceKind::DirectSum { children, .. } => {
                    if children.len() >= 2 {
                        Smoothness::Nonsmooth
                    } else {
                        children[0].smoothness
                    }
                }
            }
        };
        NormedSpace { dim, kind, smoothness, dual: Arc::new(OnceLock::new()) }
    }

    /// `ℓp^dim`; `p = f64::INFINITY` gives the max norm.
    pub fn lp(p: f64, dim: usize) -> Result<NormedSpace> {
        check_p(p)?;
        check_positive_dim(dim)?;
        Ok(Self::build(dim, SpaceKind::Lp { p }))
    }

    /// Panics when `dim == 0`.
    pub fn l2(dim: usize) -> NormedSpace {
        Self::lp(2.0, dim).expect("dimension must be positive")
    }

    /// Panics when `dim == 0`.
    pub fn l1(dim: usize) -> NormedSpace {
        Self::lp(1.0, dim).expect("dimension must be positive")
    }

    /// Panics when `dim == 0`.
    pub fn linf(dim: usize) -> NormedSpace {
        Self::lp(f64::INFINITY, dim).expect("dimension must be positive")
    }

    /// The scalar field with the absolute value.
    pub fn scalars() -> NormedSpace {
        Self::l2(1)
    }

    /// Norm `‖w ⊙ x‖_p` with positive weights.
    pub fn weighted_lp(p: f64, weights: Vec<f64>) -> Result<NormedSpace> {
        check_p(p)?;
        check_positive_dim(weights.len())?;
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(LabError::MalformedSpace("weights must be positive and finite".into()));
        }
        Ok(Self::build(weights.len(), SpaceKind::WeightedLp { p, weights }))
    }

    /// Polyhedral norm `max_g ⟨g, x⟩` from a symmetric spanning generator set.
    pub fn polyhedral(generators: Vec<Vector>) -> Result<NormedSpace> {
        let dim = generators.first().map(|g| g.len()).unwrap_or(0);
        check_positive_dim(dim)?;
        if generators.iter().any(|g| g.len() != dim || g.iter().any(|v| !v.is_finite())) {
            return Err(LabError::MalformedSpace("generators must be finite vectors of equal length".into()));
        }
        if !polytope::is_symmetric(&generators) {
            return Err(LabError::MalformedSpace("generator set must be symmetric under negation".into()));
        }
        let vertices = polytope::vertices(&generators, dim)?;
        Ok(Self::build(dim, SpaceKind::Polyhedral { generators, vertices }))
    }

    pub fn gauge(body: Body, dim: usize) -> Result<NormedSpace> {
        check_positive_dim(dim)?;
        let r = body.rounding();
        if !(r > 0.0 && r < 1.0) {
            return Err(LabError::MalformedSpace(format!("rounding {r} must lie in (0, 1)")));
        }
        Ok(Self::build(dim, SpaceKind::Gauge(body)))
    }

    /// Block space with the `ℓ1` or `ℓ∞` combination of the child norms.
    pub fn direct_sum(children: Vec<NormedSpace>, sum: SumKind) -> Result<NormedSpace> {
        if children.is_empty() {
            return Err(LabError::MalformedSpace("direct sum needs at least one child".into()));
        }
        let dim = children.iter().map(|c| c.dim).sum();
        Ok(Self::build(dim, SpaceKind::DirectSum { children, sum }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn is_smooth(&self) -> bool {
        self.smoothness == Smoothness::Smooth
    }

    /// Unweighted Euclidean space, where rotations are isometries.
    pub fn is_hilbert(&self) -> bool {
        matches!(self.kind, SpaceKind::Lp { p } if p == 2.0)
    }

    /// Exponent and optional weights for (weighted) `ℓp` kinds.
    pub fn lp_parts(&self) -> Option<(f64, Option<&[f64]>)> {
        match &self.kind {
            SpaceKind::Lp { p } => Some((*p, None)),
            SpaceKind::WeightedLp { p, weights } => Some((*p, Some(weights.as_slice()))),
            _ => None,
        }
    }

    /// Whether the unit ball is a polytope with an enumerable vertex set.
    pub fn is_polyhedral_type(&self) -> bool {
        match &self.kind {
            SpaceKind::Lp { p } | SpaceKind::WeightedLp { p, .. } => self.dim == 1 || *p == 1.0 || p.is_infinite(),
            SpaceKind::Polyhedral { .. } => true,
            SpaceKind::Gauge(_) => self.dim == 1,
            SpaceKind::DirectSum { children, .. } => children.iter().all(|c| c.is_polyhedral_type()),
        }
    }

    /// Block ranges of a direct sum (a single block otherwise).
    pub fn blocks(&self) -> Vec<std::ops::Range<usize>> {
        match &self.kind {
            SpaceKind::DirectSum { children, .. } => {
                let mut start = 0;
                children
                    .iter()
                    .map(|c| {
                        let r = start..start + c.dim;
                        start += c.dim;
                        r
                    })
                    .collect()
            }
            _ => vec![0..self.dim],
        }
    }

    /// Norm of a slice whose length must equal `dim`.
    pub fn norm_of(&self, x: &[f64]) -> f64 {
        match &self.kind {
            SpaceKind::Lp { p } => lp_norm(x, *p),
            SpaceKind::WeightedLp { p, weights } => {
                let y: Vec<f64> = x.iter().zip(weights).map(|(a, w)| a * w).collect();
                lp_norm(&y, *p)
            }
            SpaceKind::Polyhedral { generators, .. } => {
                generators.iter().map(|g| g.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()).fold(0.0, f64::max)
            }
            SpaceKind::Gauge(b) => {
                if self.dim == 1 {
                    x[0].abs()
                } else {
                    b.gauge(x)
                }
            }
            SpaceKind::DirectSum { children, sum } => {
                let parts = children.iter().zip(self.blocks()).map(|(c, r)| c.norm_of(&x[r]));
                match sum {
                    SumKind::L1 => parts.sum(),
                    SumKind::LInf => parts.fold(0.0, f64::max),
                }
            }
        }
    }

    /// Dual norm of a slice whose length must equal `dim`.
    pub fn dual_norm_of(&self, f: &[f64]) -> f64 {
        match &self.kind {
            SpaceKind::Lp { p } => lp_norm(f, conjugate(*p)),
            SpaceKind::WeightedLp { p, weights } => {
                let y: Vec<f64> = f.iter().zip(weights).map(|(a, w)| a / w).collect();
                lp_norm(&y, conjugate(*p))
            }
            SpaceKind::Polyhedral { vertices, .. } => {
                vertices.iter().map(|v| v.iter().zip(f).map(|(a, b)| a * b).sum::<f64>()).fold(0.0, f64::max)
            }
            SpaceKind::Gauge(b) => {
                if self.dim == 1 {
                    f[0].abs()
                } else {
                    b.support(f)
                }
            }
            SpaceKind::DirectSum { children, sum } => {
                let parts = children.iter().zip(self.blocks()).map(|(c, r)| c.dual_norm_of(&f[r]));
                match sum {
                    SumKind::L1 => parts.fold(0.0, f64::max),
                    SumKind::LInf => parts.sum(),
                }
            }
        }
    }

    pub fn norm(&self, v: &Vector) -> Result<f64> {
        check_dim(self.dim, v.len())?;
        Ok(self.norm_of(v.as_slice()))
    }

    pub fn dual_norm(&self, f: &Vector) -> Result<f64> {
        check_dim(self.dim, f.len())?;
        Ok(self.dual_norm_of(f.as_slice()))
    }

    /// `v / ‖v‖`; rejects the zero vector.
    pub fn normalize(&self, v: &Vector) -> Result<Vector> {
        let n = self.norm(v)?;
        if n == 0.0 || !n.is_finite() {
            return Err(LabError::ZeroVector("normalization"));
        }
        Ok(v / n)
    }

    pub fn normalize_dual(&self, f: &Vector) -> Result<Vector> {
        let n = self.dual_norm(f)?;
        if n == 0.0 || !n.is_finite() {
            return Err(LabError::ZeroVector("dual normalization"));
        }
        Ok(f / n)
    }

    /// The dual space, with the dual norm as its norm (cached).
    pub fn dual(&self) -> &NormedSpace {
        self.dual.get_or_init(|| {
            let kind = match &self.kind {
                SpaceKind::Lp { p } => SpaceKind::Lp { p: conjugate(*p) },
                SpaceKind::WeightedLp { p, weights } => {
                    SpaceKind::WeightedLp { p: conjugate(*p), weights: weights.iter().map(|w| 1.0 / w).collect() }
                }
                SpaceKind::Polyhedral { generators, vertices } => {
                    SpaceKind::Polyhedral { generators: vertices.clone(), vertices: generators.clone() }
                }
                SpaceKind::Gauge(b) => SpaceKind::Gauge(b.polar()),
                SpaceKind::DirectSum { children, sum } => {
                    SpaceKind::DirectSum { children: children.iter().map(|c| c.dual().clone()).collect(), sum: sum.dual() }
                }
            };
            let d = Self::build(self.dim, kind);
            // The bidual is this space; seed its cache so repeated dualization is cheap.
            let _ = d.dual.set(NormedSpace { dim: self.dim, kind: self.kind.clone(), smoothness: self.smoothness, dual: Arc::new(OnceLock::new()) });
            d
        })
    }

    /// Extreme points of the unit ball when it is a polytope with at most `2^16` vertices.
    pub fn ball_vertices(&self) -> Option<Vec<Vector>> {
        const CAP: usize = 1 << 16;
        match &self.kind {
            SpaceKind::Lp { p } | SpaceKind::WeightedLp { p, .. } => {
                let w: Vec<f64> = match &self.kind {
                    SpaceKind::WeightedLp { weights, .. } => weights.clone(),
                    _ => vec![1.0; self.dim],
                };
                if self.dim == 1 {
                    return Some(vec![Vector::from_element(1, 1.0 / w[0]), Vector::from_element(1, -1.0 / w[0])]);
                }
                if *p == 1.0 {
                    let mut out = Vec::with_capacity(2 * self.dim);
                    for i in 0..self.dim {
                        for s in [1.0, -1.0] {
                            let mut e = Vector::zeros(self.dim);
                            e[i] = s / w[i];
                            out.push(e);
                        }
                    }
                    Some(out)
                } else if p.is_infinite() && self.dim <= 16 {
                    Some(crate::linalg::sign_vectors(self.dim).into_iter().map(|s| s.component_div(&Vector::from_column_slice(&w))).collect())
                } else {
                    None
                }
            }
            SpaceKind::Polyhedral { vertices, .. } => Some(vertices.clone()),
            SpaceKind::Gauge(_) => {
                if self.dim == 1 {
                    Some(vec![Vector::from_element(1, 1.0), Vector::from_element(1, -1.0)])
                } else {
                    None
                }
            }
            SpaceKind::DirectSum { children, sum } => {
                let child: Option<Vec<Vec<Vector>>> = children.iter().map(|c| c.ball_vertices()).collect();
                let child = child?;
                let blocks = self.blocks();
                match sum {
                    SumKind::L1 => {
                        let mut out = Vec::new();
                        for (vs, r) in child.iter().zip(&blocks) {
                            for v in vs {
                                let mut x = Vector::zeros(self.dim);
                                x.rows_mut(r.start, r.len()).copy_from(v);
                                out.push(x);
                            }
                        }
                        Some(out)
                    }
                    SumKind::LInf => {
                        let total: usize = child.iter().map(|v| v.len()).try_fold(1usize, |a, b| a.checked_mul(b))?;
                        if total > CAP {
                            return None;
                        }
                        let mut out = vec![Vector::zeros(self.dim)];
                        for (vs, r) in child.iter().zip(&blocks) {
                            let mut next = Vec::with_capacity(out.len() * vs.len());
                            for x in &out {
                                for v in vs {
                                    let mut y = x.clone();
                                    y.rows_mut(r.start, r.len()).copy_from(v);
                                    next.push(y);
                                }
                            }
                            out = next;
                        }
                        Some(out)
                    }
                }
            }
        }
    }

    /// Short human-readable label, also used as a cache key.
    pub fn label(&self) -> String {
        fn p_str(p: f64) -> String {
            if p.is_infinite() {
                "inf".into()
            } else {
                format!("{p}")
            }
        }
        match &self.kind {
            SpaceKind::Lp { p } => format!("l{}^{}", p_str(*p), self.dim),
            SpaceKind::WeightedLp { p, weights } => format!("l{}^{}{:?}", p_str(*p), self.dim, weights),
            SpaceKind::Polyhedral { generators, .. } => {
                format!("polyhedral^{}[{}]", self.dim, generators.iter().map(|g| format!("{:?}", g.as_slice())).collect::<Vec<_>>().join(","))
            }
            SpaceKind::Gauge(b) => format!("{}({})^{}", b.name(), b.rounding(), self.dim),
            SpaceKind::DirectSum { children, sum } => {
                let k = match sum {
                    SumKind::L1 => "l1-sum",
                    SumKind::LInf => "linf-sum",
                };
                format!("{k}({})", children.iter().map(|c| c.label()).collect::<Vec<_>>().join(","))
            }
        }
    }
}

/// Free-function form of [`NormedSpace::direct_sum`].
pub fn direct_sum(children: Vec<NormedSpace>, sum: SumKind) -> Result<NormedSpace> {
    NormedSpace::direct_sum(children, sum)
}

/// Build a space from its descriptor.
pub fn make_space(spec: &SpaceDescriptor) -> Result<NormedSpace> {
    NormedSpace::try_from(spec.clone())
}
