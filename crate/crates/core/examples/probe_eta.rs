//! Empirical BPBpp thresholds: a Hilbert plane against the non-smooth planes.

use bpb_lab::probe::{counterexample_search, estimate_eta_pair, l1_failure_witness};
use bpb_lab::search::SearchBudget;
use bpb_lab::spaces::NormedSpace;

fn main() -> bpb_lab::Result<()> {
    let budget = SearchBudget { starts: 32, iterations: 60, seed: 7 };
    let scalars = NormedSpace::scalars();
    for (x, eps) in [(NormedSpace::l2(2), 0.5), (NormedSpace::l1(2), 1.0), (NormedSpace::linf(2), 1.0)] {
        let est = estimate_eta_pair(&x, &scalars, eps, budget)?;
        println!(
            "{:>8}  eps={eps:<4} eta in [{:.6e}, {}]  witnesses={} trials={}",
            x.label(),
            est.eta_lower,
            est.eta_upper.map_or("none".to_string(), |u| format!("{u:.6e}")),
            est.witnesses.len(),
            est.trials
        );
    }
    let w = counterexample_search(&NormedSpace::l1(2), &scalars, 1.0, 0.01, budget)?.expect("l1 fails");
    println!("l1 counterexample at eta=0.01: point {:?}, gap {:.6}, distance {}, {:?}", w.point, w.gap, w.distance, w.method);
    let check = l1_failure_witness(0.05)?.verify()?;
    println!("built-in witness s=0.05 replays: gap {:.6}, distance {}", check.gap, check.distance);
    println!("{}", serde_json::to_string_pretty(&w).expect("serializable"));
    Ok(())
}
