//! Rotations of a Hilbert domain and the correction of operators defined on it.

use bpb_lab::bpb::{boost_constant, hilbert_domain_correction, hilbert_internal, hilbert_rotation, rank_one_boost};
use bpb_lab::instances::operator_with_gap;
use bpb_lab::linalg::{rng, vector};
use bpb_lab::operators::Operator;
use bpb_lab::spaces::NormedSpace;

fn main() -> bpb_lab::Result<()> {
    let h0 = vector(&[1.0, 0.0, 0.0]);
    let h1 = vector(&[0.0, 0.6, 0.8]);
    let r = hilbert_rotation(&h0, &h1)?;
    println!("R h0 = {:?}", (r.matrix() * &h0).as_slice());

    let t = Operator::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.9]], NormedSpace::l2(2), NormedSpace::l2(2))?;
    let h = vector(&[0.3f64.cos(), 0.3f64.sin()]);
    let gap = 1.0 - t.codomain().norm_of((t.matrix() * &h).as_slice());
    let c = boost_constant(gap, 0.5);
    let b = rank_one_boost(&t, &h, c)?;
    println!("gap {gap:.6}, boost c = {c:.4}, <h~, h> >= {:.6}, |S~ - T| <= {:.6}", b.inner_bound, b.distance_bound);
    let (s, cert) = hilbert_domain_correction(&t, &h, 0.5)?;
    println!("corrected S = {:.6?}, distance {:.6}", s.matrix().transpose().as_slice(), cert.distance);

    let mut rg = rng(3);
    for y in [NormedSpace::l1(2), NormedSpace::linf(3), NormedSpace::lp(3.0, 2)?] {
        let eps = 0.5;
        let (t, x0) = operator_with_gap(&NormedSpace::l2(3), &y, 0.5 * hilbert_internal(eps), &mut rg)?;
        let (_, cert) = hilbert_domain_correction(&t, &x0, eps)?;
        println!("l2^3 -> {:<6} distance {:.3e} (heuristic: {})", y.label(), cert.distance, cert.heuristic);
    }
    Ok(())
}
