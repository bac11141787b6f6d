//! Bilinear maps, their norms, the identification with operators into a dual space,
//! and the bilinear point corrections.

mod correct;
mod map;

pub use correct::{beta_bilinear_correction, bilinear_point_correction_xh, ck_bilinear_correction, delta_hilbert, eta_xh, FormsCorrector, XhCorrector};
pub use map::{bilinear_from_op, bilinear_norm, op_from_bilinear, retract_to_ball, BilinearMap, BilinearNorm, BilinearNormMethod, FormField};

#[cfg(test)]
mod tests;
