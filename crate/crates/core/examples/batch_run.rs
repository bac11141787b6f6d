//! Build a problem file in code, run it in parallel and re-verify the reports.

use bpb_lab::batch::{exit_code, parse_input, reports_to_csv, run_batch, verify_report, RunOptions};

const PROBLEMS: &str = r#"{
  "version": 1,
  "problems": [
    {"id": "functional", "task": "correct-functional", "space": {"kind": "lp", "p": 2, "dim": 2},
     "functional": [0.9800665778412416, 0.19866933079506122], "point": [1, 0], "epsilon": 0.25},
    {"id": "l1-fails", "task": "counterexample", "space": {"kind": "lp", "p": 1, "dim": 2}, "epsilon": 1, "eta": 0.01},
    {"id": "modulus", "task": "modulus", "space": {"kind": "lp", "p": 2, "dim": 2}, "epsilon": 1},
    {"id": "linf-eta", "task": "probe-eta", "space": {"kind": "lp", "p": "inf", "dim": 2}, "epsilon": 1, "budget": 60},
    {"id": "beta-suite", "task": "suite", "suite": "beta", "seed": 1}
  ]
}"#;

fn main() {
    let parsed = parse_input(PROBLEMS).expect("valid problem file");
    let reports = run_batch(&parsed.problems, &RunOptions { jobs: 4, seed: None, budget: None }).expect("valid problems");
    print!("{}", reports_to_csv(&reports));
    for r in &reports {
        let v = verify_report(r);
        println!("{:<12} {:?} verified={} {}", r.id.as_deref().unwrap_or("-"), r.status, v.verified, v.message.unwrap_or_default());
    }
    println!("exit code {}", exit_code(&reports));
}
