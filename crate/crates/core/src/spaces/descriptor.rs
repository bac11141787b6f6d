//! JSON descriptor form of a space (`{kind, p, dim, generators, children, sumKind, bodyParams, weights}`).

use serde::{Deserialize, Serialize};

use super::{Body, NormedSpace, SpaceKind, SumKind};
use crate::error::{LabError, Result};
use crate::linalg::Vector;

/// Exponent as a number or the string `"inf"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Exponent {
    Number(f64),
    Text(String),
}

impl Exponent {
    pub fn from_p(p: f64) -> Exponent {
        if p.is_infinite() {
            Exponent::Text("inf".into())
        } else {
            Exponent::Number(p)
        }
    }

    pub fn value(&self) -> Result<f64> {
        match self {
            Exponent::Number(p) => Ok(*p),
            Exponent::Text(s) => match s.to_ascii_lowercase().as_str() {
                "inf" | "infinity" | "∞" => Ok(f64::INFINITY),
                other => other.parse::<f64>().map_err(|_| LabError::MalformedSpace(format!("bad exponent {s:?}"))),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyParams {
    /// `"rounded-box"` or `"rounded-box-polar"`.
    pub body: String,
    pub rounding: f64,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SpaceDescriptor {
    /// One of `lp`, `weighted-lp`, `polyhedral`, `gauge`, `direct-sum`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Exponent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub children: Option<Vec<SpaceDescriptor>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sum_kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body_params: Option<BodyParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

fn need<T>(v: Option<T>, field: &str, kind: &str) -> Result<T> {
    v.ok_or_else(|| LabError::MalformedSpace(format!("kind {kind:?} requires field `{field}`")))
}

impl TryFrom<SpaceDescriptor> for NormedSpace {
    type Error = LabError;

    fn try_from(d: SpaceDescriptor) -> Result<NormedSpace> {
        let kind = d.kind.as_str();
        let space = match kind {
            "lp" => {
                let p = need(d.p.as_ref(), "p", kind)?.value()?;
                NormedSpace::lp(p, need(d.dim, "dim", kind)?)?
            }
            "weighted-lp" => {
                let p = need(d.p.as_ref(), "p", kind)?.value()?;
                NormedSpace::weighted_lp(p, need(d.weights.clone(), "weights", kind)?)?
            }
            "polyhedral" => {
                let gens = need(d.generators.as_ref(), "generators", kind)?;
                NormedSpace::polyhedral(gens.iter().map(|g| Vector::from_column_slice(g)).collect())?
            }
            "gauge" => {
                let bp = need(d.body_params.as_ref(), "bodyParams", kind)?;
                let body = match bp.body.as_str() {
                    "rounded-box" => Body::RoundedBox { rounding: bp.rounding },
                    "rounded-box-polar" => Body::RoundedBoxPolar { rounding: bp.rounding },
                    other => return Err(LabError::MalformedSpace(format!("unknown body {other:?}"))),
                };
                NormedSpace::gauge(body, need(d.dim, "dim", kind)?)?
            }
            "direct-sum" => {
                let sum = match need(d.sum_kind.as_deref(), "sumKind", kind)? {
                    "l1" => SumKind::L1,
                    "linf" => SumKind::LInf,
                    other => return Err(LabError::MalformedSpace(format!("unknown sumKind {other:?}"))),
                };
                let children = need(d.children.clone(), "children", kind)?
                    .into_iter()
                    .map(NormedSpace::try_from)
                    .collect::<Result<Vec<_>>>()?;
                NormedSpace::direct_sum(children, sum)?
            }
            other => return Err(LabError::MalformedSpace(format!("unknown kind {other:?}"))),
        };
        if let Some(dim) = d.dim {
            if dim != space.dim() {
                return Err(LabError::MalformedSpace(format!("declared dim {dim} but the space has dimension {}", space.dim())));
            }
        }
        Ok(space)
    }
}

impl From<NormedSpace> for SpaceDescriptor {
    fn from(s: NormedSpace) -> SpaceDescriptor {
        s.descriptor()
    }
}

impl NormedSpace {
    pub fn descriptor(&self) -> SpaceDescriptor {
        let dim = Some(self.dim());
        match self.kind() {
            SpaceKind::Lp { p } => SpaceDescriptor { kind: "lp".into(), p: Some(Exponent::from_p(*p)), dim, ..Default::default() },
            SpaceKind::WeightedLp { p, weights } => SpaceDescriptor {
                kind: "weighted-lp".into(),
                p: Some(Exponent::from_p(*p)),
                dim,
                weights: Some(weights.clone()),
                ..Default::default()
            },
            SpaceKind::Polyhedral { generators, .. } => SpaceDescriptor {
                kind: "polyhedral".into(),
                dim,
                generators: Some(generators.iter().map(|g| g.iter().copied().collect()).collect()),
                ..Default::default()
            },
            SpaceKind::Gauge(b) => SpaceDescriptor {
                kind: "gauge".into(),
                dim,
                body_params: Some(BodyParams { body: b.name().into(), rounding: b.rounding() }),
                ..Default::default()
            },
            SpaceKind::DirectSum { children, sum } => SpaceDescriptor {
                kind: "direct-sum".into(),
                dim,
                children: Some(children.iter().map(|c| c.descriptor()).collect()),
                sum_kind: Some(match sum {
                    SumKind::L1 => "l1".into(),
                    SumKind::LInf => "linf".into(),
                }),
                ..Default::default()
            },
        }
    }
}

impl Serialize for NormedSpace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.descriptor().serialize(s)
    }
}

impl<'de> Deserialize<'de> for NormedSpace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let desc = SpaceDescriptor::deserialize(d)?;
        NormedSpace::try_from(desc).map_err(serde::de::Error::custom)
    }
}
