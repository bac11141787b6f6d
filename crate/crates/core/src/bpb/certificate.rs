//! Self-contained, re-verifiable records of a successful correction.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::eta::EtaEntry;
use crate::bilinear::{BilinearMap, FormField};
use crate::error::{LabError, Result};
use crate::linalg::Vector;
use crate::operators::Operator;
use crate::spaces::NormedSpace;

/// `|‖C‖ − 1|` allowed on the corrected object.
pub const UNIT_TOL: f64 = 1e-9;
/// `|‖C‖ − ‖C(point)‖|` allowed.
pub const ATTAINMENT_TOL: f64 = 1e-8;
/// Required margin in `distance < target`.
pub const STRICT_SLACK: f64 = 1e-10;

/// Input and corrected objects.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Payload {
    Functional { space: NormedSpace, input: Vec<f64>, corrected: Vec<f64> },
    Operator { input: Operator, corrected: Operator },
    Bilinear { input: BilinearMap, corrected: BilinearMap },
    Field { input: FormField, corrected: FormField },
}

/// Quantities recomputed from the payload by norm oracles only.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measures {
    /// `‖C‖`.
    pub norm: f64,
    /// `‖C(point)‖`.
    pub value: f64,
    /// `|‖C‖ − ‖C(point)‖|`.
    pub residual: f64,
    /// `‖C − input‖`.
    pub distance: f64,
    /// Some norm came from a non-exact path.
    pub heuristic: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BpbCertificate {
    pub procedure: String,
    pub payload: Payload,
    /// One vector for functionals and operators, `[x₀, y₀]` for bilinear maps.
    pub point: Vec<Vec<f64>>,
    pub epsilon: f64,
    /// The distance bound the procedure guarantees (a multiple of `epsilon`).
    pub target: f64,
    pub eta: Option<EtaEntry>,
    pub norm: f64,
    pub residual: f64,
    pub distance: f64,
    pub heuristic: bool,
    pub seed: u64,
    pub diagnostics: BTreeMap<String, f64>,
}

fn vecs(point: &[Vec<f64>]) -> Vec<Vector> {
    point.iter().map(|p| Vector::from_column_slice(p)).collect()
}

fn need(point: &[Vector], n: usize) -> Result<()> {
    if point.len() != n {
        return Err(LabError::Malformed(format!("certificate point needs {n} vector(s), got {}", point.len())));
    }
    Ok(())
}

impl Payload {
    pub fn measure(&self, point: &[Vec<f64>]) -> Result<Measures> {
        let pts = vecs(point);
        match self {
            Payload::Functional { space, input, corrected } => {
                need(&pts, 1)?;
                let c = Vector::from_column_slice(corrected);
                let norm = space.dual_norm(&c)?;
                let value = c.dot(&pts[0]).abs() / space.norm(&pts[0])?;
                let distance = space.dual_norm(&(&c - Vector::from_column_slice(input)))?;
                Ok(Measures { norm, value, residual: (norm - value).abs(), distance, heuristic: false })
            }
            Payload::Operator { input, corrected } => {
                need(&pts, 1)?;
                let n = corrected.norm_report();
                let value = corrected.codomain().norm(&corrected.apply(&pts[0])?)?;
                let d = corrected.distance_to(input)?;
                Ok(Measures {
                    norm: n.value,
                    value,
                    residual: (n.value - value).abs(),
                    distance: d.value,
                    heuristic: !(n.certified() && d.certified()),
                })
            }
            Payload::Bilinear { input, corrected } => {
                need(&pts, 2)?;
                let n = corrected.norm_report();
                let value = corrected.value_norm(&pts[0], &pts[1])?;
                let d = corrected.minus(input)?;
                let dn = d.norm_report();
                Ok(Measures {
                    norm: n.value,
                    value,
                    residual: (n.value - value).abs(),
                    distance: dn.value,
                    heuristic: !(n.certified && dn.certified),
                })
            }
            Payload::Field { input, corrected } => {
                need(&pts, 2)?;
                let norm = corrected.norm();
                let value = corrected.eval(&pts[0], &pts[1])?.amax();
                let distance = corrected.distance(input)?;
                let diffs_exact = corrected.forms().iter().zip(input.forms()).all(|(a, b)| a.minus(b).is_ok_and(|d| d.norm_report().certified));
                Ok(Measures { norm, value, residual: (norm - value).abs(), distance, heuristic: !(corrected.certified_norm() && diffs_exact) })
            }
        }
    }
}

/// The contract: unit norm, attainment at the point, strict distance bound.
pub fn check_contract(m: &Measures, target: f64) -> Result<()> {
    if (m.norm - 1.0).abs() > UNIT_TOL {
        return Err(LabError::CertificationFailed(format!("corrected norm {} is not 1", m.norm)));
    }
    if m.residual > ATTAINMENT_TOL {
        return Err(LabError::CertificationFailed(format!("attainment residual {:e}", m.residual)));
    }
    if !(m.distance + STRICT_SLACK < target) {
        return Err(LabError::CertificationFailed(format!("distance {} is not below {}", m.distance, target)));
    }
    Ok(())
}

pub(crate) struct Issue {
    pub procedure: &'static str,
    pub payload: Payload,
    pub point: Vec<Vec<f64>>,
    pub epsilon: f64,
    pub target: f64,
    pub eta: Option<EtaEntry>,
    pub seed: u64,
    pub diagnostics: BTreeMap<String, f64>,
}

impl BpbCertificate {
    /// Measure the payload and issue a certificate if the contract holds.
    pub(crate) fn issue(i: Issue) -> Result<BpbCertificate> {
        let m = i.payload.measure(&i.point)?;
        check_contract(&m, i.target).map_err(|e| match e {
            LabError::CertificationFailed(s) => LabError::CertificationFailed(format!("{}: {s}", i.procedure)),
            e => e,
        })?;
        Ok(BpbCertificate {
            procedure: i.procedure.into(),
            payload: i.payload,
            point: i.point,
            epsilon: i.epsilon,
            target: i.target,
            eta: i.eta,
            norm: m.norm,
            residual: m.residual,
            distance: m.distance,
            heuristic: m.heuristic,
            seed: i.seed,
            diagnostics: i.diagnostics,
        })
    }

    /// Recompute every recorded quantity from the payload and re-check the contract.
    pub fn verify(&self) -> Result<Measures> {
        let m = self.payload.measure(&self.point)?;
        check_contract(&m, self.target)?;
        for (name, stored, fresh) in [("norm", self.norm, m.norm), ("residual", self.residual, m.residual), ("distance", self.distance, m.distance)] {
            if (stored - fresh).abs() > 1e-8 {
                return Err(LabError::CertificationFailed(format!("recorded {name} {stored} differs from recomputed {fresh}")));
            }
        }
        Ok(m)
    }

    pub fn corrected_operator(&self) -> Option<&Operator> {
        match &self.payload {
            Payload::Operator { corrected, .. } => Some(corrected),
            _ => None,
        }
    }

    pub fn corrected_functional(&self) -> Option<Vector> {
        match &self.payload {
            Payload::Functional { corrected, .. } => Some(Vector::from_column_slice(corrected)),
            _ => None,
        }
    }

    pub fn corrected_bilinear(&self) -> Option<&BilinearMap> {
        match &self.payload {
            Payload::Bilinear { corrected, .. } => Some(corrected),
            _ => None,
        }
    }

    pub fn corrected_field(&self) -> Option<&FormField> {
        match &self.payload {
            Payload::Field { corrected, .. } => Some(corrected),
            _ => None,
        }
    }
}
