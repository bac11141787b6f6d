//! Bilinear maps: norms, the correction on X x H and the property-beta lift.

use bpb_lab::bilinear::{beta_bilinear_correction, bilinear_norm, bilinear_point_correction_xh, op_from_bilinear, BilinearMap, XhCorrector};
use bpb_lab::bpb::BetaStructure;
use bpb_lab::linalg::{vector, Matrix};
use bpb_lab::probe::l1_bilinear_failure;
use bpb_lab::search::SearchBudget;
use bpb_lab::spaces::NormedSpace;

fn main() -> bpb_lab::Result<()> {
    let l2 = NormedSpace::l2(2);
    let e1 = vector(&[1.0, 0.0]);
    let b = BilinearMap::form_from_rows(&[vec![0.97, 0.1], vec![0.0, 0.2]], NormedSpace::lp(4.0, 2)?, l2.clone())?;
    let b = b.scaled(1.0 / b.norm());
    let n = bilinear_norm(&b, SearchBudget::default());
    let t = op_from_bilinear(&b)?;
    println!("|B| = {:.9} via {:?}; identified operator norm {:.9}", n.value, n.method, t.norm());
    let x0 = b.x_space().normalize(&vector(&[1.0, 0.05]))?;
    let (c, cert) = bilinear_point_correction_xh(&b, &x0, &e1, 0.5)?;
    println!("X x H: value gap {:.4}, corrected |C(x0, y0)| = {:.12}, distance {:.6} < {}", 1.0 - b.value_norm(&x0, &e1)?, c.value_norm(&x0, &e1)?, cert.distance, cert.target);

    let z = BilinearMap::new(
        vec![Matrix::from_row_slice(2, 2, &[0.99, 0.0, 0.0, 0.0]), Matrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 0.9])],
        l2.clone(),
        l2.clone(),
        NormedSpace::linf(2),
    )?;
    let (_, cert) = beta_bilinear_correction(&z, &e1, &e1, 0.5, &BetaStructure::canonical(2), &XhCorrector)?;
    println!("into linf^2: distance {:.6} < {}", cert.distance, cert.target);

    for s in [0.1, 0.01, 0.001] {
        let f = l1_bilinear_failure(s)?;
        println!("l1 x l1 form at s = {s}: gap {:.4}, distance to attaining forms >= {:.4}", f.gap, f.distance);
    }
    Ok(())
}
