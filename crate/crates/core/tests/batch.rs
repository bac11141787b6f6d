use bpb_lab::batch::{execute, parse_input, run_batch, Args, Format, Output, Report, RunOptions, Status};
use clap::Parser;
use serde_json::{json, Value};

fn args(extra: &[&str]) -> Args {
    let mut v = vec!["bpb-lab", "--input", "-"];
    v.extend_from_slice(extra);
    Args::parse_from(v)
}

fn functional_problem() -> Value {
    json!({
        "task": "correct-functional",
        "space": {"kind": "lp", "p": 2.0, "dim": 2},
        "functional": [0.2f64.cos(), 0.2f64.sin()],
        "point": [1.0, 0.0],
        "epsilon": 0.25
    })
}

fn counterexample_problem() -> Value {
    json!({"task": "counterexample", "space": {"kind": "lp", "p": 1.0, "dim": 2}, "epsilon": 1.0, "eta": 0.01})
}

fn modulus_problem() -> Value {
    json!({"task": "modulus", "space": {"kind": "lp", "p": 2.0, "dim": 2}, "epsilon": 1.0})
}

fn batch(problems: Vec<Value>) -> String {
    json!({"version": 1, "problems": problems}).to_string()
}

fn reports(out: &str) -> Vec<Report> {
    serde_json::from_str(out).unwrap()
}

#[test]
fn functional_example_certifies() {
    let out = execute(&args(&[]), &batch(vec![functional_problem()]));
    assert_eq!(out.code, 0, "{}", out.stderr);
    let r = &reports(&out.stdout)[0];
    assert_eq!(r.status, Status::Certified);
    let Some(Output::Certificate(c)) = &r.output else { panic!("no certificate") };
    let expected = 2.0 * (0.1f64).sin();
    assert!((c.distance - expected).abs() < 1e-9, "distance {}", c.distance);
    assert!((c.distance - 0.199667).abs() < 1e-6);
}

#[test]
fn counterexample_example_finds_witness() {
    let out = execute(&args(&[]), &batch(vec![counterexample_problem()]));
    assert_eq!(out.code, 0);
    let r = &reports(&out.stdout)[0];
    assert_eq!(r.status, Status::WitnessFound);
    let Some(Output::Witness(w)) = &r.output else { panic!("no witness") };
    assert!((w.distance - 2.0).abs() < 1e-12);
}

#[test]
fn modulus_example_is_exact() {
    let out = execute(&args(&[]), &batch(vec![modulus_problem()]));
    let r = &reports(&out.stdout)[0];
    let Some(Output::Modulus(m)) = &r.output else { panic!("no modulus") };
    assert!((m.value - (1.0 - 3f64.sqrt() / 2.0)).abs() < 1e-12);
    assert!((m.value - 0.133975).abs() < 1e-6);
    assert_eq!(serde_json::to_value(m.bound_kind).unwrap(), json!("exact"));
}

#[test]
fn single_problem_yields_single_report() {
    let mut p = functional_problem();
    p["version"] = json!(1);
    let out = execute(&args(&[]), &p.to_string());
    assert_eq!(out.code, 0);
    let r: Report = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(r.index, 0);
}

#[test]
fn malformed_input_exits_one_with_path() {
    let cases = [
        ("{\"version\": 1,", "input:"),
        (r#"{"version": 2, "problems": []}"#, "$.version"),
        (r#"{"problems": []}"#, "$.version"),
        (r#"{"version": 1, "problems": [{"task": "nope"}]}"#, "$.problems[0]"),
        (r#"{"version": 1, "problems": [{"task": "modulus", "spaec": 1}]}"#, "$.problems[0]"),
    ];
    for (text, path) in cases {
        let out = execute(&args(&[]), text);
        assert_eq!(out.code, 1, "{text}");
        assert!(out.stderr.contains(path), "{} lacks {path}", out.stderr);
        assert!(out.stdout.is_empty());
    }
    let mut bad = functional_problem();
    bad["functional"] = json!([1.0, 0.0, 0.0]);
    let out = execute(&args(&[]), &batch(vec![modulus_problem(), bad]));
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("$.problems[1].functional"), "{}", out.stderr);
    let mut bad = functional_problem();
    bad["epsilon"] = json!(2.5);
    let out = execute(&args(&[]), &batch(vec![bad]));
    assert!(out.stderr.contains("$.problems[0].epsilon"), "{}", out.stderr);
}

#[test]
fn rejected_and_heuristic_exit_codes() {
    let mut gapped = functional_problem();
    gapped["functional"] = json!([0.5, 0.0]);
    let out = execute(&args(&[]), &batch(vec![functional_problem(), gapped]));
    assert_eq!(out.code, 2);
    let rs = reports(&out.stdout);
    assert_eq!(rs[0].status, Status::Certified);
    assert_eq!(rs[1].status, Status::Rejected);
    assert!(rs[1].message.as_deref().unwrap().contains("threshold"));

    let mut ovr = functional_problem();
    ovr["etaOverride"] = json!(1e-4);
    let out = execute(&args(&[]), &batch(vec![ovr]));
    assert_eq!(out.code, 2);

    let heuristic = json!({"task": "modulus", "space": {"kind": "lp", "p": 3.0, "dim": 3}, "epsilon": 1.0, "modulus": "smoothness"});
    let out = execute(&args(&["--budget", "50"]), &batch(vec![heuristic]));
    let r = &reports(&out.stdout)[0];
    if r.status == Status::Heuristic {
        assert_eq!(out.code, 3);
    } else {
        assert_eq!(out.code, 0);
    }
}

#[test]
fn unsupported_pair_is_rejected() {
    let p = json!({
        "task": "correct-operator",
        "space": {"kind": "lp", "p": 1.0, "dim": 2},
        "codomain": {"kind": "lp", "p": 1.0, "dim": 2},
        "operator": {"matrix": [[1.0, 0.0], [0.0, 0.5]]},
        "point": [1.0, 0.0],
        "epsilon": 0.25
    });
    let out = execute(&args(&[]), &batch(vec![p]));
    assert_eq!(out.code, 2);
}

#[test]
fn every_task_dispatches() {
    let l2 = json!({"kind": "lp", "p": 2.0, "dim": 2});
    let problems = vec![
        functional_problem(),
        json!({"task": "correct-operator", "method": "beta", "space": l2, "codomain": {"kind": "lp", "p": "inf", "dim": 2},
               "operator": {"matrix": [[0.95, 0.0], [0.0, 1.0]]}, "point": [1.0, 0.0], "epsilon": 0.4}),
        json!({"task": "correct-operator", "method": "hilbert", "space": l2, "codomain": {"kind": "lp", "p": 1.0, "dim": 2},
               "operator": {"matrix": [[0.7, 0.0], [0.0, 0.3]]}, "point": [1.0, 0.0], "epsilon": 0.5}),
        json!({"task": "correct-bilinear", "space": l2, "secondSpace": l2,
               "bilinear": {"tensor": [[[0.97, 0.1], [0.0, 0.2]]]}, "points": [[1.0, 0.0], [1.0, 0.0]], "epsilon": 0.5}),
        json!({"task": "correct-ck-bilinear", "space": l2, "secondSpace": l2,
               "field": {"forms": [[[0.98, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.5]]]}, "points": [[1.0, 0.0], [1.0, 0.0]], "epsilon": 0.3}),
        modulus_problem(),
        json!({"task": "probe-eta", "space": {"kind": "lp", "p": 1.0, "dim": 2}, "epsilon": 1.0, "budget": 40}),
        counterexample_problem(),
        json!({"task": "suite", "suite": "ck"}),
    ];
    let n = problems.len();
    let out = execute(&args(&["--jobs", "4"]), &batch(problems));
    let rs = reports(&out.stdout);
    assert_eq!(rs.len(), n);
    for (i, r) in rs.iter().enumerate() {
        assert_eq!(r.index, i);
        assert_ne!(r.status, Status::Rejected, "{i}: {:?}", r.message);
    }
    let Some(Output::Certificate(c)) = &rs[4].output else { panic!() };
    assert!((c.distance - 0.02).abs() < 1e-10);
    let Some(Output::Certificate(c)) = &rs[1].output else { panic!() };
    assert!((c.distance - 0.1 / 1.1).abs() < 1e-9);
}

fn strip_timings(v: &mut Value) {
    if let Value::Array(items) = v {
        for r in items {
            r.as_object_mut().unwrap().remove("timings");
        }
    }
}

#[test]
fn reports_are_deterministic_across_job_counts() {
    let problems = vec![
        functional_problem(),
        counterexample_problem(),
        json!({"task": "probe-eta", "space": {"kind": "lp", "p": "inf", "dim": 2}, "epsilon": 1.0, "seed": 11, "budget": 40}),
        json!({"task": "modulus", "space": {"kind": "lp", "p": 3.0, "dim": 2}, "epsilon": 0.5, "modulus": "convexity", "seed": 3}),
        json!({"task": "suite", "suite": "beta", "seed": 5}),
    ];
    let text = batch(problems);
    let mut a: Value = serde_json::from_str(&execute(&args(&["--jobs", "1"]), &text).stdout).unwrap();
    let mut b: Value = serde_json::from_str(&execute(&args(&["--jobs", "4"]), &text).stdout).unwrap();
    strip_timings(&mut a);
    strip_timings(&mut b);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn cli_seed_overrides_file_seed() {
    let p = json!({"task": "probe-eta", "space": {"kind": "lp", "p": 1.0, "dim": 2}, "epsilon": 1.0, "seed": 1, "budget": 20});
    let parsed = parse_input(&batch(vec![p])).unwrap();
    let r = run_batch(&parsed.problems, &RunOptions { jobs: 1, seed: Some(99), budget: None }).unwrap();
    let Some(Output::Estimate(e)) = &r[0].output else { panic!() };
    assert_eq!(e.seed, 99);
}

#[test]
fn verify_mode_round_trips_and_catches_tampering() {
    let out = execute(&args(&[]), &batch(vec![functional_problem(), counterexample_problem(), modulus_problem()]));
    let v = execute(&args(&["--verify"]), &out.stdout);
    assert_eq!(v.code, 0, "{}", v.stdout);

    let mut tampered: Value = serde_json::from_str(&out.stdout).unwrap();
    tampered[0]["output"]["distance"] = json!(0.01);
    let v = execute(&args(&["--verify"]), &tampered.to_string());
    assert_eq!(v.code, 2);

    let mut tampered: Value = serde_json::from_str(&out.stdout).unwrap();
    tampered[1]["output"]["gap"] = json!(1e-9);
    let v = execute(&args(&["--verify"]), &tampered.to_string());
    assert_eq!(v.code, 2);

    assert_eq!(execute(&args(&["--verify"]), "[{}]").code, 1);
}

#[test]
fn csv_has_one_row_per_problem() {
    let out = execute(&args(&["--format", "csv"]), &batch(vec![functional_problem(), counterexample_problem()]));
    assert_eq!(out.code, 0);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("index,id,task,status"));
    assert!(lines[1].starts_with("0,,correct-functional,certified,0.25,"));
    assert!(lines[2].contains("witness-found"));
    assert_eq!(args(&["--format", "csv"]).format, Format::Csv);
}

#[test]
fn bare_array_input_uses_array_paths() {
    let mut p = functional_problem();
    p["version"] = json!(1);
    let mut q = p.clone();
    q["point"] = json!([1.0]);
    let out = execute(&args(&[]), &Value::Array(vec![p, q]).to_string());
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("$[1].point"), "{}", out.stderr);
}

#[test]
fn binary_reads_file_and_sets_exit_code() {
    let dir = std::env::temp_dir().join(format!("bpb-lab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.json");
    std::fs::write(&good, batch(vec![functional_problem()])).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{").unwrap();
    let run = |path: &std::path::Path| std::process::Command::new(env!("CARGO_BIN_EXE_bpb-lab")).arg("--input").arg(path).output().unwrap();
    let ok = run(&good);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("\"certified\""));
    let err = run(&bad);
    assert_eq!(err.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&err.stderr).contains("input:"));
    let missing = run(&dir.join("missing.json"));
    assert_eq!(missing.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}
