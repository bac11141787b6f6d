use super::*;
use crate::linalg::{gaussian_matrix, vector};
use crate::spaces::{Body, SumKind};

fn op(rows: &[Vec<f64>], x: NormedSpace, y: NormedSpace) -> Operator {
    Operator::from_rows(rows, x, y).unwrap()
}

fn diag() -> Operator {
    op(&[vec![1.0, 0.0], vec![0.0, 0.5]], NormedSpace::l2(2), NormedSpace::l2(2))
}

/// Max of `‖T x‖/‖x‖` over a fine angular grid.
fn planar_brute(t: &Operator, steps: usize) -> f64 {
    (0..steps)
        .map(|k| {
            let th = std::f64::consts::PI * k as f64 / steps as f64;
            let u = vector(&[th.cos(), th.sin()]);
            t.codomain().norm_of((t.matrix() * &u).as_slice()) / t.domain().norm_of(u.as_slice())
        })
        .fold(0.0, f64::max)
}

#[test]
fn diagonal_spectral_norm() {
    let r = op_norm(&diag(), SearchBudget::default());
    assert_eq!(r.method, NormMethod::Spectral);
    assert!((r.value - 1.0).abs() < 1e-12);
    assert!((r.point() - vector(&[1.0, 0.0])).amax() < 1e-12);
    assert!(r.witness.residual <= 1e-9);
}

#[test]
fn l1_domain_column_rule() {
    let t = op(&[vec![1.0, 0.0, 0.6], vec![0.0, 0.5, 0.6]], NormedSpace::l1(3), NormedSpace::l2(2));
    let r = op_norm(&t, SearchBudget::default());
    assert_eq!(r.method, NormMethod::Columns);
    assert!((r.value - 1.0).abs() < 1e-12);
    assert!((r.point() - vector(&[1.0, 0.0, 0.0])).amax() < 1e-12);
}

#[test]
fn linf_to_l1_identity_is_two_at_corner() {
    let t = op(&[vec![1.0, 0.0], vec![0.0, 1.0]], NormedSpace::linf(2), NormedSpace::l1(2));
    let r = op_norm(&t, SearchBudget::default());
    assert!((r.value - 2.0).abs() < 1e-12);
    assert!((r.point() - vector(&[1.0, 1.0])).amax() < 1e-12);
}

#[test]
fn adjoint_examples() {
    let a = adjoint(&diag());
    assert_eq!(a.matrix(), diag().matrix());
    assert_eq!(a.domain(), &NormedSpace::l2(2));
    let t = op(&[vec![1.0, 0.0], vec![0.0, 1.0]], NormedSpace::l1(2), NormedSpace::linf(2));
    let a = adjoint(&t);
    assert_eq!(a.domain(), &NormedSpace::l1(2));
    assert_eq!(a.codomain(), &NormedSpace::linf(2));
    assert!((a.norm() - t.norm()).abs() < 1e-12);
}

#[test]
fn adjoint_isometry_l4_to_l2_random() {
    let mut r = crate::linalg::rng(7);
    let l4 = NormedSpace::lp(4.0, 3).unwrap();
    for _ in 0..5 {
        let t = Operator::new(gaussian_matrix(3, 3, &mut r), l4.clone(), NormedSpace::l2(3)).unwrap();
        let a = adjoint(&t);
        assert!((t.norm() - a.norm()).abs() < 1e-6, "{} vs {}", t.norm(), a.norm());
    }
}

#[test]
fn attainment_check_examples() {
    let t = diag();
    let c = attainment_check(&t, &vector(&[1.0, 0.0]), 1e-9).unwrap();
    assert!(c.passed && c.residual == 0.0);
    let c = attainment_check(&t, &vector(&[0.0, 1.0]), 1e-9).unwrap();
    assert!(!c.passed && (c.residual - 0.5).abs() < 1e-12);
    let th: f64 = 0.3;
    let c = attainment_check(&t, &vector(&[th.cos(), th.sin()]), 1e-9).unwrap();
    let expected = 1.0 - (th.cos().powi(2) + 0.25 * th.sin().powi(2)).sqrt();
    assert!(!c.passed && (c.residual - expected).abs() < 1e-12);
    // ‖T x‖ ≈ 0.991671 belongs to diag(1, 0.9)
    let t9 = op(&[vec![1.0, 0.0], vec![0.0, 0.9]], NormedSpace::l2(2), NormedSpace::l2(2));
    let c = attainment_check(&t9, &vector(&[th.cos(), th.sin()]), 1e-9).unwrap();
    assert!((c.residual - (1.0 - 0.991671)).abs() < 5e-6);
    assert!(matches!(attainment_check(&t, &vector(&[2.0, 0.0]), 1e-9), Err(LabError::NotUnit(_))));
}

#[test]
fn planar_and_generator_paths_match_brute_force() {
    let mut r = crate::linalg::rng(11);
    let spaces = [
        NormedSpace::lp(3.0, 2).unwrap(),
        NormedSpace::gauge(Body::RoundedBox { rounding: 0.4 }, 2).unwrap(),
        NormedSpace::gauge(Body::RoundedBoxPolar { rounding: 0.4 }, 2).unwrap(),
    ];
    for x in &spaces {
        for y in [NormedSpace::lp(4.0, 2).unwrap(), NormedSpace::linf(3), NormedSpace::l1(2)] {
            let t = Operator::new(gaussian_matrix(y.dim(), 2, &mut r), x.clone(), y).unwrap();
            let rep = op_norm(&t, SearchBudget::default());
            assert!(rep.certified());
            let brute = planar_brute(&t, 200_000);
            assert!(rep.value >= brute - 1e-9 && rep.value - brute < 1e-6, "{} vs {}", rep.value, brute);
            assert!(rep.witness.residual <= 1e-9);
        }
    }
}

#[test]
fn homogeneity_and_exact_path_agreement() {
    let t = diag();
    for a in [-3.0, 0.25, 7.0] {
        assert!((t.scaled(a).norm() - a.abs() * t.norm()).abs() < 1e-9);
    }
    let d = op(&[vec![0.7, 0.0, 0.0], vec![0.0, 0.2, 0.0], vec![0.0, 0.0, 0.4]], NormedSpace::l2(3), NormedSpace::l2(3));
    let c = op(&[vec![0.7, 0.0, 0.0], vec![0.0, 0.2, 0.0], vec![0.0, 0.0, 0.4]], NormedSpace::l1(3), NormedSpace::l2(3));
    assert!((d.norm() - c.norm()).abs() < 1e-10);
}

#[test]
fn ascent_is_labeled_heuristic() {
    let mut r = crate::linalg::rng(3);
    let x = NormedSpace::lp(3.0, 3).unwrap();
    let y = NormedSpace::lp(1.5, 3).unwrap();
    let t = Operator::new(gaussian_matrix(3, 3, &mut r), x, y).unwrap();
    let rep = op_norm(&t, SearchBudget::default());
    assert_eq!(rep.method, NormMethod::Ascent);
    assert_eq!(rep.bound_kind(), BoundKind::Lower);
    assert!(rep.witness.residual <= 1e-9);
}

#[test]
fn operator_serde_round_trip() {
    let t = op(&[vec![1.0, 0.5], vec![-0.25, 2.0]], NormedSpace::l1(2), NormedSpace::linf(2));
    let s = serde_json::to_string(&t).unwrap();
    let back: Operator = serde_json::from_str(&s).unwrap();
    assert_eq!(back, t);
}

#[test]
fn l1_face_distance_example() {
    let x0 = vector(&[0.9, 0.1]);
    let f = vector(&[1.0, -1.0]);
    let fd = scalar_face_distance(&NormedSpace::l1(2), &x0, &f).unwrap();
    assert!((fd.distance - 2.0).abs() < 1e-12);
    assert!((fd.minimizer - vector(&[1.0, 1.0])).amax() < 1e-12);
    let t = op(&[vec![1.0, -1.0]], NormedSpace::l1(2), NormedSpace::scalars());
    let d = dist_to_pointwise_na(&t, &x0, SearchBudget::default()).unwrap();
    assert!((d.distance - 2.0).abs() < 1e-12);
    assert_eq!(d.bound_kind, BoundKind::Exact);
    assert!((d.minimizer.matrix().row(0).transpose() - vector(&[1.0, 1.0])).amax() < 1e-12);
}

#[test]
fn hilbert_functional_distances() {
    let e1 = vector(&[1.0, 0.0]);
    let t = op(&[vec![1.0, 0.0]], NormedSpace::l2(2), NormedSpace::scalars());
    assert_eq!(dist_to_pointwise_na(&t, &e1, SearchBudget::default()).unwrap().distance, 0.0);
    let th: f64 = 0.2;
    let t = op(&[vec![th.cos(), th.sin()]], NormedSpace::l2(2), NormedSpace::scalars());
    let d = dist_to_pointwise_na(&t, &e1, SearchBudget::default()).unwrap();
    assert!((d.distance - 2.0 * 0.1f64.sin()).abs() < 1e-12);
    assert!((d.distance - 0.199667).abs() < 1e-6);
}

#[test]
fn linf_face_distance_matches_brute_force() {
    let x = NormedSpace::linf(2);
    let x0 = vector(&[1.0, 1.0]);
    let mut r = crate::linalg::rng(5);
    for _ in 0..50 {
        let f = gaussian(2, &mut r);
        let fd = scalar_face_distance(&x, &x0, &f).unwrap();
        let brute = (0..=20_000)
            .flat_map(|k| {
                let a = k as f64 / 20_000.0;
                [1.0, -1.0].map(|s| x.dual_norm_of(&[s * a - f[0], s * (1.0 - a) - f[1]]))
            })
            .fold(f64::INFINITY, f64::min);
        assert!((fd.distance - brute).abs() < 1e-4, "{} vs {}", fd.distance, brute);
        assert!(fd.distance <= brute + 1e-12);
    }
}

#[test]
fn polyhedral_and_sum_face_distances_match_search() {
    let mut r = crate::linalg::rng(9);
    let hex = NormedSpace::polyhedral(
        (0..6).map(|k| {
            let th = std::f64::consts::PI * k as f64 / 3.0;
            vector(&[th.cos(), th.sin()])
        }).collect(),
    )
    .unwrap();
    let sum = NormedSpace::direct_sum(vec![NormedSpace::l2(2), NormedSpace::scalars()], SumKind::LInf).unwrap();
    for (x, x0) in [(hex.clone(), hex.ball_vertices().unwrap()[0].clone()), (sum.clone(), vector(&[0.6, 0.8, 1.0]))] {
        for _ in 0..10 {
            let f = gaussian(x.dim(), &mut r);
            let fd = scalar_face_distance(&x, &x0, &f).unwrap();
            let g = &fd.minimizer;
            assert!((x.dual_norm_of(g.as_slice()) - 1.0).abs() < 1e-9);
            assert!((g.dot(&x0).abs() - 1.0).abs() < 1e-9);
            // any other face point is no closer
            let set = x.support_functionals(&x0).unwrap();
            let rep = set.representative();
            for s in [1.0, -1.0] {
                assert!(fd.distance <= x.dual_norm_of((&rep * s - &f).as_slice()) + 1e-9);
            }
        }
    }
}

#[test]
fn general_codomain_distance_is_bracketed() {
    let t = op(&[vec![0.9, 0.1], vec![0.0, 0.5]], NormedSpace::l2(2), NormedSpace::linf(2));
    let t = t.scaled(1.0 / t.norm());
    let th: f64 = 0.25;
    let x0 = vector(&[th.cos(), th.sin()]);
    let d = dist_to_pointwise_na(&t, &x0, SearchBudget::default()).unwrap();
    assert!(d.lower <= d.distance + 1e-12);
    let s = &d.minimizer;
    assert!((s.norm() - 1.0).abs() < 1e-9);
    assert!((s.codomain().norm_of((s.matrix() * &x0).as_slice()) - 1.0).abs() < 1e-8);
    assert!((s.minus(&t).unwrap().norm() - d.distance).abs() < 1e-8);
}

#[test]
fn distance_rejects_bad_inputs() {
    let t = op(&[vec![2.0, 0.0]], NormedSpace::l2(2), NormedSpace::scalars());
    assert!(matches!(dist_to_pointwise_na(&t, &vector(&[1.0, 0.0]), SearchBudget::default()), Err(LabError::NormTooLarge(_))));
    let t = t.scaled(0.5);
    assert!(dist_to_pointwise_na(&t, &vector(&[0.0, 0.0]), SearchBudget::default()).is_err());
    assert!(matches!(dist_to_pointwise_na(&t, &vector(&[0.5, 0.0]), SearchBudget::default()), Err(LabError::NotUnit(_))));
}
