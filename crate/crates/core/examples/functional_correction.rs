//! Correcting a functional to one that attains its norm at a fixed point.

use bpb_lab::bpb::{eta_functional, functional_point_correction};
use bpb_lab::linalg::vector;
use bpb_lab::spaces::NormedSpace;

fn main() -> bpb_lab::Result<()> {
    let l2 = NormedSpace::l2(2);
    let x0 = vector(&[1.0, 0.0]);
    let f = vector(&[0.2f64.cos(), 0.2f64.sin()]);
    let (g, cert) = functional_point_correction(&l2, &f, &x0, 0.25)?;
    println!("l2^2: corrected {:?}, distance {:.6} < {}", g.as_slice(), cert.distance, cert.target);

    let l4 = NormedSpace::lp(4.0, 2)?;
    let x0 = l4.normalize(&vector(&[1.0, 0.5]))?;
    let j = l4.duality_map(&x0)?;
    let f = &j + vector(&[0.01, -0.01]);
    let eps = 0.5;
    let eta = eta_functional(&l4, eps)?;
    println!("l4^2: eta({eps}) = {:.6} ({:?}), value at x0 {:.6}", eta.eta, eta.provenance, f.dot(&x0));
    let (g, cert) = functional_point_correction(&l4, &f, &x0, eps)?;
    println!("l4^2: corrected {:?}, distance {:.6}", g.as_slice(), cert.distance);
    cert.verify()?;
    println!("{}", serde_json::to_string_pretty(&cert).expect("serializable"));

    let far = vector(&[0.5, 0.0]);
    match functional_point_correction(&l2, &far, &vector(&[1.0, 0.0]), 0.25) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => println!("unexpectedly certified"),
    }
    Ok(())
}
