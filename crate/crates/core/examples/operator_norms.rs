//! Operator norms by path, attainment checks and the distance to operators attaining at a point.

use bpb_lab::linalg::vector;
use bpb_lab::operators::{adjoint, attainment_check, dist_to_pointwise_na, op_norm, Operator};
use bpb_lab::search::SearchBudget;
use bpb_lab::spaces::NormedSpace;

fn main() -> bpb_lab::Result<()> {
    let budget = SearchBudget::default();
    let rows = [vec![1.0, 0.3, -0.2], vec![0.1, 0.8, 0.5]];
    let pairs = [
        (NormedSpace::l2(3), NormedSpace::l2(2)),
        (NormedSpace::l1(3), NormedSpace::lp(3.0, 2)?),
        (NormedSpace::lp(3.0, 3)?, NormedSpace::linf(2)),
        (NormedSpace::linf(3), NormedSpace::l1(2)),
        (NormedSpace::lp(3.0, 3)?, NormedSpace::lp(1.5, 2)?),
    ];
    for (x, y) in pairs {
        let t = Operator::from_rows(&rows, x, y)?;
        let r = op_norm(&t, budget);
        let a = op_norm(&adjoint(&t), budget);
        println!(
            "{:>7} -> {:<7} |T| = {:.9} via {:?} (adjoint {:.9}), witness {:.4?}",
            t.domain().label(),
            t.codomain().label(),
            r.value,
            r.method,
            a.value,
            r.witness.point
        );
    }

    let t = Operator::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.5]], NormedSpace::l2(2), NormedSpace::l2(2))?;
    let h = vector(&[0.3f64.cos(), 0.3f64.sin()]);
    let c = attainment_check(&t, &h, 1e-9)?;
    println!("diag(1, 0.5) at angle 0.3: |T h| = {:.6}, residual {:.6}, attains: {}", c.value, c.residual, c.passed);

    let th: f64 = 0.2;
    let f = Operator::from_rows(&[vec![th.cos(), th.sin()]], NormedSpace::l2(2), NormedSpace::scalars())?;
    let d = dist_to_pointwise_na(&f, &vector(&[1.0, 0.0]), budget)?;
    println!("functional at angle 0.2 to those attaining at e1: {:.6} ({:?}, {})", d.distance, d.bound_kind, d.method);

    let t = Operator::from_rows(&[vec![0.9, 0.2], vec![0.1, 0.7]], NormedSpace::l2(2), NormedSpace::linf(2))?;
    let t = t.scaled(1.0 / t.norm());
    let d = dist_to_pointwise_na(&t, &vector(&[0.0, 1.0]), budget)?;
    println!("l2^2 -> linf^2 at e2: distance in [{:.6}, {:.6}] ({:?}, {})", d.lower, d.distance, d.bound_kind, d.method);
    Ok(())
}
