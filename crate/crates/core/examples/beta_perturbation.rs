//! Rank-one perturbation into codomains with property beta.

use bpb_lab::bpb::{beta_perturbation, BetaStructure};
use bpb_lab::instances::operator_with_gap;
use bpb_lab::linalg::{rng, vector};
use bpb_lab::operators::Operator;
use bpb_lab::spaces::NormedSpace;

fn main() -> bpb_lab::Result<()> {
    let t = Operator::from_rows(&[vec![0.95, 0.0], vec![0.0, 1.0]], NormedSpace::l2(2), NormedSpace::linf(2))?;
    let (u, cert) = beta_perturbation(&t, &vector(&[1.0, 0.0]), 0.4, &BetaStructure::canonical(2))?;
    println!("worked example: U = {:?}, |U - T| = {:.10}", u.matrix().transpose().as_slice(), cert.distance);
    for (k, v) in &cert.diagnostics {
        println!("  {k} = {v}");
    }

    let skewed = BetaStructure::skewed(3, 0.3)?;
    let mut r = rng(11);
    for _ in 0..5 {
        let (t, x0) = operator_with_gap(&NormedSpace::lp(4.0, 2)?, &NormedSpace::linf(3), 1e-4, &mut r)?;
        let (_, cert) = beta_perturbation(&t, &x0, 0.5, &skewed)?;
        println!("skewed rho=0.3: |U - T| = {:.6}, unit {:.12}, residual {:.1e}", cert.distance, cert.norm, cert.residual);
    }
    Ok(())
}
