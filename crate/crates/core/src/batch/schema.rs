//! Problem-file and report schemas (version 1).

use serde::{Deserialize, Serialize};

use crate::bpb::{BetaStructure, BpbCertificate};
use crate::probe::{EtaEstimate, FailureWitness};
use crate::spaces::{ModulusEstimate, SpaceDescriptor};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    CorrectFunctional,
    CorrectOperator,
    CorrectBilinear,
    CorrectCkBilinear,
    Modulus,
    ProbeEta,
    Counterexample,
    Suite,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixField {
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorField {
    /// One `dim X × dim Y` slice per codomain coordinate.
    pub tensor: Vec<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    #[serde(default)]
    pub points: Option<Vec<String>>,
    pub forms: Vec<Vec<Vec<f64>>>,
}

/// One task. Which fields are required depends on `task`; see `docs/problem-file.md`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Problem {
    pub task: Task,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_space: Option<SpaceDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codomain: Option<SpaceDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functional: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<MatrixField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bilinear: Option<TensorField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<BetaStructure>,
    /// `auto`, `hilbert`, `beta`, `ck` (operators) or `auto`, `xh`, `beta` (bilinear).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Threshold checked before the correction runs; failing it rejects the task.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_override: Option<f64>,
    /// Threshold of the counterexample search.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// `convexity` (default), `smoothness` or `defect`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
}

impl Problem {
    pub fn new(task: Task) -> Problem {
        Problem {
            task,
            version: None,
            id: None,
            space: None,
            second_space: None,
            codomain: None,
            functional: None,
            operator: None,
            bilinear: None,
            field: None,
            beta: None,
            method: None,
            point: None,
            points: None,
            epsilon: None,
            eta_override: None,
            eta: None,
            modulus: None,
            suite: None,
            seed: None,
            budget: None,
        }
    }
}

/// A batch of problems.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub version: u32,
    pub problems: Vec<Problem>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Certified,
    Rejected,
    Heuristic,
    WitnessFound,
    NoneFound,
}

impl Status {
    /// Process exit code contributed by this status.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Certified | Status::WitnessFound | Status::NoneFound => 0,
            Status::Rejected => 2,
            Status::Heuristic => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SuiteCheck {
    pub name: String,
    pub passed: usize,
    pub total: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl SuiteCheck {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SuiteReport {
    pub name: String,
    pub seed: u64,
    pub checks: Vec<SuiteCheck>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Output {
    Certificate(BpbCertificate),
    Witness(FailureWitness),
    Estimate(EtaEstimate),
    Modulus(ModulusEstimate),
    Suite(SuiteReport),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Timings {
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub task: Task,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<Output>,
    pub timings: Timings,
    pub tool_version: String,
}

/// Outcome of re-verifying one report offline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifyOutcome {
    pub index: usize,
    pub status: Status,
    pub verified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}
