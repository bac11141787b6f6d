//! Finite-dimensional laboratory for the Bishop-Phelps-Bollobás point property.

pub mod batch;
pub mod bilinear;
pub mod bpb;
pub mod error;
pub mod instances;
pub mod linalg;
pub mod operators;
pub mod probe;
pub mod search;
pub mod spaces;

pub use error::{LabError, Result};
