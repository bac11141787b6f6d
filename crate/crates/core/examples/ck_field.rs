//! Fields of forms indexed by a finite K, corrected pointwise at a common point.

use bpb_lab::bilinear::{ck_bilinear_correction, BilinearMap, FormField, XhCorrector};
use bpb_lab::instances::field_with_gap;
use bpb_lab::linalg::{rng, vector};
use bpb_lab::spaces::NormedSpace;

fn main() -> bpb_lab::Result<()> {
    let l2 = NormedSpace::l2(2);
    let e1 = vector(&[1.0, 0.0]);
    let field = FormField::new(
        vec!["t1".into(), "t2".into()],
        vec![
            BilinearMap::form_from_rows(&[vec![0.98, 0.0], vec![0.0, 0.0]], l2.clone(), l2.clone())?,
            BilinearMap::form_from_rows(&[vec![0.0, 0.0], vec![0.0, 0.5]], l2.clone(), l2.clone())?,
        ],
    )?;
    let (a, cert) = ck_bilinear_correction(&field, &e1, &e1, 0.3, &XhCorrector)?;
    for (p, f) in a.points().iter().zip(a.forms()) {
        println!("{p}: {:?}", f.matrix().transpose().as_slice());
    }
    println!("|A - B| = {:.12}, A(e1, e1) = {:?}", cert.distance, a.eval(&e1, &e1)?.as_slice());

    let mut r = rng(5);
    let l3 = NormedSpace::l2(3);
    for m in [3, 6, 10] {
        let (f, x0, y0) = field_with_gap(&l3, &l2, m, 1e-6, &mut r)?;
        let (_, cert) = ck_bilinear_correction(&f, &x0, &y0, 0.4, &XhCorrector)?;
        println!("random field, |K| = {m}: leading point {}, distance {:.3e}", cert.diagnostics["t0"], cert.distance);
    }
    Ok(())
}
