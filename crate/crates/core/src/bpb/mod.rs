//! Constructive point corrections for functionals and operators, with certificates.

mod beta;
mod certificate;
mod eta;
mod functional;
mod hilbert;

pub use beta::{beta_perturbation, ck_operator_correction, xi_for, BetaStructure};
pub use certificate::{check_contract, BpbCertificate, Measures, Payload, ATTAINMENT_TOL, STRICT_SLACK, UNIT_TOL};
pub use eta::{clarkson_lower, eta_functional, from_dual_modulus, hilbert_internal, EtaEntry, EtaPolicy, Provenance};
pub use functional::functional_point_correction;
pub use hilbert::{boost_constant, hilbert_domain_correction, hilbert_rotation, rank_one_boost, BoostResult};

pub(crate) use beta::leading_index;
pub(crate) use certificate::Issue;
pub(crate) use functional::{align_to_duality_map, check_unit};
pub(crate) use hilbert::hilbert_construct;
