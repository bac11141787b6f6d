//! How failure witnesses and thresholds propagate through direct sums of codomains.

use bpb_lab::probe::sum_propagation_suite;
use bpb_lab::search::SearchBudget;
use bpb_lab::spaces::{NormedSpace, SumKind};

fn main() -> bpb_lab::Result<()> {
    let budget = SearchBudget { starts: 16, iterations: 40, seed: 2 };
    let children = [NormedSpace::scalars(), NormedSpace::l1(2)];
    for kind in [SumKind::LInf, SumKind::L1] {
        let r = sum_propagation_suite(&NormedSpace::l2(2), &children, kind, 0.5, budget)?;
        println!("{kind:?}-sum of {} children, consistent: {}", r.children.len(), r.consistent);
        for (c, e) in r.children.iter().enumerate() {
            println!("  child {c}: eta in [{:.3e}, {:?}]", e.eta_lower, e.eta_upper);
        }
        println!("  sum:     eta in [{:.3e}, {:?}]", r.sum.eta_lower, r.sum.eta_upper);
        for l in r.lifted.iter().take(3) {
            println!("  lifted witness: gap {:.3e} -> {:.3e}, distance {:.4} -> {:.4}", l.child_gap, l.lifted_gap, l.child_distance, l.lifted_distance);
        }
        println!("  ({} lifted witnesses in total)", r.lifted.len());
        if let Some(c) = r.corrections {
            println!("  beta corrections on the sum: {}/{}", c.certified, c.attempted);
        }
    }
    Ok(())
}
