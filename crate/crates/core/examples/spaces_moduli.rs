//! Norms, duals, support faces and moduli across the space kinds.

use bpb_lab::linalg::vector;
use bpb_lab::probe::{flat_edge_modulus, smoothed_square_space};
use bpb_lab::search::SearchBudget;
use bpb_lab::spaces::{modulus_convexity, modulus_smoothness, smoothness_defect, NormedSpace, SumKind};

fn main() -> bpb_lab::Result<()> {
    let budget = SearchBudget::default();
    let spaces = [
        NormedSpace::l2(2),
        NormedSpace::lp(4.0, 2)?,
        NormedSpace::l1(2),
        NormedSpace::linf(2),
        smoothed_square_space(0.5)?,
        NormedSpace::direct_sum(vec![NormedSpace::l2(2), NormedSpace::scalars()], SumKind::L1)?,
    ];
    println!("{:>22} {:>10} {:>10} {:>10} {:>10}", "space", "|(3,4)|", "delta(1)", "rho(0.5)", "defect");
    for s in &spaces {
        let x: Vec<f64> = [3.0, 4.0, 1.0][..s.dim()].to_vec();
        let d = modulus_convexity(s, 1.0, budget)?;
        let r = modulus_smoothness(s, 0.5, budget)?;
        println!(
            "{:>22} {:>10.6} {:>10.6} {:>10.6} {:>10.2e}   ({:?}/{:?})",
            s.label(),
            s.norm_of(&x),
            d.value,
            r.value,
            smoothness_defect(s, budget),
            d.bound_kind,
            r.bound_kind
        );
    }

    let l1 = NormedSpace::l1(2);
    let set = l1.support_functionals(&vector(&[1.0, 0.0]))?;
    let vertices: Vec<Vec<f64>> = set.vertices().unwrap_or_default().iter().map(|v| v.as_slice().to_vec()).collect();
    println!("support face of l1^2 at e1: singleton={}, vertices {vertices:?}", set.is_singleton);
    let set = NormedSpace::lp(4.0, 2)?.support_functionals(&NormedSpace::lp(4.0, 2)?.normalize(&vector(&[1.0, 1.0]))?)?;
    println!("duality map of l4^2 at the diagonal: {:?}", set.representative().as_slice());

    let flat = flat_edge_modulus(0.5, 0.5)?;
    println!("smoothed square: delta(0.5) = {} ({:?}) from the pair {:?}", flat.value, flat.bound_kind, flat.witness);
    Ok(())
}
