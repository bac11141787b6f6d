use bpb_lab::bilinear::{retract_to_ball, BilinearMap};
use bpb_lab::bpb::{eta_functional, functional_point_correction, hilbert_rotation};
use bpb_lab::instances::functional_with_gap;
use bpb_lab::linalg::{rng, vector, Matrix};
use bpb_lab::operators::{adjoint, op_norm, Operator};
use bpb_lab::probe::{estimate_eta_pair, l1_failure_witness, EtaEstimate};
use bpb_lab::search::SearchBudget;
use bpb_lab::spaces::{make_space, Body, NormedSpace, SumKind};
use proptest::prelude::*;

fn space_by_index(k: usize, dim: usize) -> NormedSpace {
    match k {
        0 => NormedSpace::l1(dim),
        1 => NormedSpace::l2(dim),
        2 => NormedSpace::lp(3.0, dim).unwrap(),
        3 => NormedSpace::linf(dim),
        4 => NormedSpace::weighted_lp(1.5, (0..dim).map(|i| 1.0 + i as f64).collect()).unwrap(),
        5 => NormedSpace::gauge(Body::RoundedBox { rounding: 0.4 }, dim).unwrap(),
        _ => NormedSpace::direct_sum(vec![NormedSpace::l2(dim - 1), NormedSpace::scalars()], SumKind::LInf).unwrap(),
    }
}

fn vec_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_axioms(k in 0usize..7, x in vec_strategy(3), y in vec_strategy(3), a in -4.0..4.0f64) {
        let s = space_by_index(k, 3);
        let (nx, ny) = (s.norm_of(&x), s.norm_of(&y));
        let sum: Vec<f64> = x.iter().zip(&y).map(|(p, q)| p + q).collect();
        let scaled: Vec<f64> = x.iter().map(|p| a * p).collect();
        prop_assert!(nx >= 0.0);
        prop_assert!(s.norm_of(&sum) <= nx + ny + 1e-9 * (1.0 + nx + ny));
        prop_assert!((s.norm_of(&scaled) - a.abs() * nx).abs() <= 1e-9 * (1.0 + nx));
        let dot: f64 = x.iter().zip(&y).map(|(p, q)| p * q).sum();
        prop_assert!(dot.abs() <= s.dual_norm_of(&y) * nx + 1e-8 * (1.0 + nx));
    }

    #[test]
    fn descriptors_round_trip(k in 0usize..7) {
        let s = space_by_index(k, 3);
        let text = serde_json::to_string(&s.descriptor()).unwrap();
        let back = make_space(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn adjoint_is_isometric(kx in 0usize..4, ky in 0usize..4, m in prop::collection::vec(-2.0..2.0f64, 4)) {
        let t = Operator::new(Matrix::from_row_slice(2, 2, &m), space_by_index(kx, 2), space_by_index(ky, 2)).unwrap();
        let n = op_norm(&t, SearchBudget::default()).value;
        let na = op_norm(&adjoint(&t), SearchBudget::default()).value;
        prop_assert!((n - na).abs() <= 1e-6 * (1.0 + n), "{} vs {}", n, na);
    }

    #[test]
    fn rotation_is_orthogonal_and_maps_the_point(a in vec_strategy(4), b in vec_strategy(4)) {
        let (a, b) = (vector(&a), vector(&b));
        prop_assume!(a.norm() > 1e-3 && b.norm() > 1e-3);
        let (h0, h1) = (&a / a.norm(), &b / b.norm());
        let r = hilbert_rotation(&h0, &h1).unwrap();
        let m = r.matrix();
        prop_assert!((m.transpose() * m - Matrix::identity(4, 4)).amax() <= 1e-12);
        prop_assert!((m * &h0 - &h1).amax() <= 1e-12);
    }

    #[test]
    fn retraction_is_idempotent(m in prop::collection::vec(-3.0..3.0f64, 4)) {
        let b = BilinearMap::form(Matrix::from_row_slice(2, 2, &m), NormedSpace::l2(2), NormedSpace::l1(2)).unwrap();
        prop_assume!(b.norm() > 1e-6);
        let once = retract_to_ball(&b);
        let twice = retract_to_ball(&once);
        prop_assert!(once.norm() <= 1.0 + 1e-9);
        prop_assert!((once.matrix() - twice.matrix()).amax() <= 1e-12);
    }

    #[test]
    fn functional_correction_contract(p in 1.5..6.0f64, seed in 0u64..1000, frac in 0.01..0.99f64, eps in 0.1..1.5f64) {
        let s = NormedSpace::lp(p, 3).unwrap();
        let eta = eta_functional(&s, eps).unwrap().eta;
        let (x0, f) = functional_with_gap(&s, frac * eta, &mut rng(seed)).unwrap();
        let (g, cert) = functional_point_correction(&s, &f, &x0, eps).unwrap();
        prop_assert!((s.dual_norm_of(g.as_slice()) - 1.0).abs() <= 1e-9);
        prop_assert!((g.dot(&x0) - 1.0).abs() <= 1e-9);
        prop_assert!(cert.distance < eps);
        cert.verify().unwrap();
    }

    #[test]
    fn witnesses_replay(s in 1e-6..0.49f64) {
        let w = l1_failure_witness(s).unwrap();
        let back: bpb_lab::probe::FailureWitness = serde_json::from_str(&serde_json::to_string(&w).unwrap()).unwrap();
        let check = back.verify().unwrap();
        prop_assert!((check.gap - 2.0 * s).abs() <= 1e-8);
        prop_assert!((check.distance - 2.0).abs() <= 1e-8);
    }
}

fn estimate(lower: f64, upper: Option<f64>) -> EtaEstimate {
    let base = estimate_eta_pair(&NormedSpace::l1(2), &NormedSpace::scalars(), 1.0, SearchBudget { starts: 4, iterations: 10, seed: 1 }).unwrap();
    EtaEstimate { eta_lower: lower, eta_upper: upper, witnesses: vec![], trials: 1, ..base }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn merge_is_associative(v in prop::collection::vec((0.0..1.0f64, prop::option::of(0.0..1.0f64)), 3)) {
        let e: Vec<EtaEstimate> = v.iter().map(|&(l, u)| {
            let u = u.map(|u: f64| u.max(l));
            estimate(l, u)
        }).collect();
        let left = e[0].merge(&e[1]).unwrap().merge(&e[2]).unwrap();
        let right = e[0].merge(&e[1].merge(&e[2]).unwrap()).unwrap();
        prop_assert_eq!(left.eta_lower, right.eta_lower);
        prop_assert_eq!(left.eta_upper, right.eta_upper);
        prop_assert_eq!(left.trials, right.trials);
        if let Some(u) = left.eta_upper {
            prop_assert!(left.eta_lower <= u);
        }
    }
}

