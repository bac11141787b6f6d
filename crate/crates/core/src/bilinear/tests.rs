use super::*;
use crate::bpb::BetaStructure;
use crate::linalg::{gaussian_matrix, rng, vector, Matrix};
use crate::search::SearchBudget;
use crate::spaces::NormedSpace;

fn l2(n: usize) -> NormedSpace {
    NormedSpace::l2(n)
}

fn form(rows: &[Vec<f64>], x: NormedSpace, y: NormedSpace) -> BilinearMap {
    BilinearMap::form_from_rows(rows, x, y).unwrap()
}

/// Max of `|B(x, y)|` over a product of angular grids in 2-D.
fn brute_2x2(b: &BilinearMap, steps: usize) -> f64 {
    let pts = |s: &NormedSpace| -> Vec<crate::linalg::Vector> {
        (0..steps)
            .map(|k| {
                let t = std::f64::consts::PI * k as f64 / steps as f64;
                s.normalize(&vector(&[t.cos(), t.sin()])).unwrap()
            })
            .collect()
    };
    let (xs, ys) = (pts(b.x_space()), pts(b.y_space()));
    xs.iter().flat_map(|x| ys.iter().map(move |y| (x, y))).map(|(x, y)| b.value_norm(x, y).unwrap()).fold(0.0, f64::max)
}

#[test]
fn norm_examples() {
    let b = form(&[vec![1.0, 0.0], vec![0.0, 0.5]], l2(2), l2(2));
    let r = bilinear_norm(&b, SearchBudget::default());
    assert_eq!(r.method, BilinearNormMethod::Spectral);
    assert!((r.value - 1.0).abs() < 1e-12);
    assert!((r.witness().0 - vector(&[1.0, 0.0])).amax() < 1e-12);
    let b = form(&[vec![0.0, 1.0], vec![1.0, 0.0]], l2(2), l2(2));
    let r = b.norm_report();
    assert!((r.value - 1.0).abs() < 1e-12);
    assert!((b.eval(&r.witness().0, &r.witness().1).unwrap()[0] - 1.0).abs() < 1e-12);
    let b = form(&[vec![0.3, -0.8], vec![0.1, 0.5]], NormedSpace::l1(2), NormedSpace::l1(2));
    let r = b.norm_report();
    assert_eq!(r.method, BilinearNormMethod::Entrywise);
    assert!((r.value - 0.8).abs() < 1e-15);
    assert_eq!(r.x, vec![1.0, 0.0]);
    assert_eq!(r.y.iter().map(|v| v.abs()).collect::<Vec<_>>(), vec![0.0, 1.0]);
}

#[test]
fn exact_paths_match_grid_and_alternating() {
    let mut r = rng(17);
    let spaces = [l2(2), NormedSpace::l1(2), NormedSpace::linf(2), NormedSpace::lp(4.0, 2).unwrap(), NormedSpace::lp(1.5, 2).unwrap()];
    for x in &spaces {
        for y in &spaces {
            let b = BilinearMap::form(gaussian_matrix(2, 2, &mut r), x.clone(), y.clone()).unwrap();
            let rep = b.norm_report();
            assert!(rep.certified);
            let brute = brute_2x2(&b, 1500);
            assert!(rep.value >= brute - 1e-12 && rep.value - brute < 1e-4, "{} vs {brute} on {} x {}", rep.value, x.label(), y.label());
            let alt = super::map::alternating(&b, SearchBudget::with_seed(99));
            assert!(alt.value <= rep.value + 1e-12 && alt.value > rep.value - 1e-6, "{} vs {}", alt.value, rep.value);
        }
    }
}

#[test]
fn alternating_on_three_dim_smooth_factors() {
    let mut r = rng(5);
    let x = NormedSpace::lp(3.0, 3).unwrap();
    let b = BilinearMap::form(gaussian_matrix(3, 3, &mut r), x.clone(), x).unwrap();
    let rep = b.norm_report();
    assert_eq!(rep.method, BilinearNormMethod::Alternating);
    assert!(!rep.certified);
    let (wx, wy) = rep.witness();
    assert!((b.value_norm(&wx, &wy).unwrap() - rep.value).abs() < 1e-9);
    let t = op_from_bilinear(&b).unwrap();
    assert!((t.norm() - rep.value).abs() < 1e-6);
}

#[test]
fn vector_valued_norm_via_dual_generators() {
    let b = BilinearMap::new(
        vec![Matrix::from_row_slice(2, 2, &[0.97, 0.0, 0.0, 0.0]), Matrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 0.5])],
        l2(2),
        l2(2),
        NormedSpace::linf(2),
    )
    .unwrap();
    let r = b.norm_report();
    assert_eq!(r.method, BilinearNormMethod::DualGenerators);
    assert!((r.value - 0.97).abs() < 1e-12);
}

#[test]
fn identification_examples() {
    let b = form(&[vec![1.0, 0.0], vec![0.0, 0.5]], l2(2), l2(2));
    let t = op_from_bilinear(&b).unwrap();
    assert_eq!(t.codomain(), &l2(2));
    assert_eq!(t.matrix(), b.matrix());
    let mut r = rng(3);
    let b = BilinearMap::form(gaussian_matrix(2, 2, &mut r), l2(2), NormedSpace::l1(2)).unwrap();
    let t = op_from_bilinear(&b).unwrap();
    assert_eq!(t.codomain(), &NormedSpace::linf(2));
    assert!((t.norm() - b.norm()).abs() < 1e-9);
    let z = form(&[vec![0.0, 0.0], vec![0.0, 0.0]], l2(2), l2(2));
    assert!(op_from_bilinear(&z).unwrap().matrix().iter().all(|v| *v == 0.0));
    assert_eq!(bilinear_from_op(&op_from_bilinear(&b).unwrap()).unwrap(), b);
}

#[test]
fn retraction_examples() {
    let c = form(&[vec![2.0, 0.0], vec![0.0, 1.0]], l2(2), l2(2));
    let r = retract_to_ball(&c);
    assert!((r.matrix() - c.matrix() / 2.0).amax() < 1e-15);
    assert_eq!(retract_to_ball(&r), r);
    let c = form(&[vec![0.7, 0.0], vec![0.0, 0.1]], l2(2), l2(2));
    assert_eq!(retract_to_ball(&c), c);
    let c = form(&[vec![1.3, 0.0], vec![0.0, 0.2]], l2(2), l2(2));
    let r = retract_to_ball(&c);
    assert!((r.minus(&c).unwrap().norm() - 0.3).abs() < 1e-12);
}

#[test]
fn form_field_norm_and_serde() {
    let f = FormField::labeled(vec![form(&[vec![0.98, 0.0], vec![0.0, 0.0]], l2(2), l2(2)), form(&[vec![0.0, 0.0], vec![0.0, 0.5]], l2(2), l2(2))]).unwrap();
    assert!((f.norm() - 0.98).abs() < 1e-15);
    assert!((f.to_bilinear().norm() - 0.98).abs() < 1e-12);
    let json = serde_json::to_string(&f).unwrap();
    let back: FormField = serde_json::from_str(&json).unwrap();
    assert_eq!(back, f);
    let b = f.to_bilinear();
    let back: BilinearMap = serde_json::from_str(&serde_json::to_string(&b).unwrap()).unwrap();
    assert_eq!(back, b);
}

#[test]
fn xh_examples() {
    let e1 = vector(&[1.0, 0.0]);
    let b = form(&[vec![1.0, 0.0], vec![0.0, 0.5]], l2(2), l2(2));
    let (a, cert) = bilinear_point_correction_xh(&b, &e1, &e1, 0.3).unwrap();
    assert_eq!(a, b);
    assert_eq!(cert.distance, 0.0);

    let raw = Matrix::from_row_slice(2, 2, &[0.995, 0.0, 0.0, 0.9]);
    let b = BilinearMap::form(raw.clone(), l2(2), l2(2)).unwrap();
    let b = b.scaled(1.0 / b.norm());
    // normalized, the value at (e₁, e₁) is 1: attaining already
    let (_, cert) = bilinear_point_correction_xh(&b, &e1, &e1, 0.5).unwrap();
    assert!(cert.distance < 1.5);
    // unnormalized form of norm 0.995 < 1 (ball version)
    let b = BilinearMap::form(raw, l2(2), l2(2)).unwrap();
    let (a, cert) = bilinear_point_correction_xh(&b, &e1, &e1, 0.5).unwrap();
    assert!((a.eval(&e1, &e1).unwrap()[0] - 1.0).abs() < 1e-9);
    assert!(cert.distance < 1.5);
    cert.verify().unwrap();
}

#[test]
fn xh_on_l4_first_factor() {
    let x = NormedSpace::lp(4.0, 2).unwrap();
    let mut r = rng(8);
    let b = BilinearMap::form(gaussian_matrix(2, 2, &mut r), x.clone(), l2(2)).unwrap();
    let b = b.scaled(1.0 / b.norm());
    let (wx, wy) = b.norm_report().witness();
    let th: f64 = 0.02;
    let x0 = x.normalize(&(&wx + vector(&[th, -th]))).unwrap();
    let h0 = &wy / wy.norm();
    let (a, cert) = bilinear_point_correction_xh(&b, &x0, &h0, 0.5).unwrap();
    assert!((a.eval(&x0, &h0).unwrap()[0].abs() - 1.0).abs() < 1e-9);
    assert!(cert.distance < 1.5 && !cert.heuristic);
}

#[test]
fn xh_refuses_nonsmooth_and_non_hilbert() {
    let e1 = vector(&[1.0, 0.0]);
    let b = form(&[vec![0.9, 0.0], vec![0.0, 0.1]], NormedSpace::l1(2), l2(2));
    assert!(bilinear_point_correction_xh(&b, &e1, &e1, 0.5).is_err());
    let b = form(&[vec![0.9, 0.0], vec![0.0, 0.1]], NormedSpace::l1(2), NormedSpace::l1(2));
    assert!(bilinear_point_correction_xh(&b, &e1, &e1, 0.5).is_err());
}

fn slices_example() -> BilinearMap {
    BilinearMap::new(
        vec![Matrix::from_row_slice(2, 2, &[0.97, 0.0, 0.0, 0.0]), Matrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 0.5])],
        l2(2),
        l2(2),
        NormedSpace::linf(2),
    )
    .unwrap()
}

#[test]
fn beta_bilinear_worked_example() {
    let e1 = vector(&[1.0, 0.0]);
    let b = slices_example();
    let (c, cert) = beta_bilinear_correction(&b, &e1, &e1, 0.5, &BetaStructure::canonical(2), &XhCorrector).unwrap();
    let k = 1.0 + 0.5 / 4.0;
    assert!((cert.diagnostics["boostedNorm"] - k).abs() < 1e-12);
    assert!((&c.slices()[0] * k - Matrix::from_row_slice(2, 2, &[k, 0.0, 0.0, 0.0])).amax() < 1e-12);
    assert!((&c.slices()[1] * k - &b.slices()[1]).amax() < 1e-12);
    assert!(cert.distance < 1.0);
    cert.verify().unwrap();
}

#[test]
fn beta_bilinear_one_point_reduces_to_forms_corrector() {
    let e1 = vector(&[1.0, 0.0]);
    let b = BilinearMap::new(vec![Matrix::from_row_slice(2, 2, &[0.97, 0.0, 0.0, 0.3])], l2(2), l2(2), NormedSpace::linf(1)).unwrap();
    let (c, _) = beta_bilinear_correction(&b, &e1, &e1, 0.5, &BetaStructure::canonical(1), &XhCorrector).unwrap();
    let f = BilinearMap::form(b.slices()[0].clone(), l2(2), l2(2)).unwrap();
    let (a, _) = XhCorrector.correct(&f, &e1, &e1, crate::bpb::xi_for(0.0, 0.5).unwrap()).unwrap();
    assert!((&c.slices()[0] - a.matrix()).amax() < 1e-12);
}

#[test]
fn beta_bilinear_with_skewed_structure() {
    let e1 = vector(&[1.0, 0.0]);
    let beta = BetaStructure::skewed(2, 0.3).unwrap();
    let b = slices_example();
    let (_, cert) = beta_bilinear_correction(&b, &e1, &e1, 0.5, &beta, &XhCorrector).unwrap();
    assert!(cert.diagnostics["xi"] < crate::bpb::xi_for(0.0, 0.5).unwrap());
    cert.verify().unwrap();
}

#[test]
fn ck_worked_example() {
    let e1 = vector(&[1.0, 0.0]);
    let f = FormField::labeled(vec![form(&[vec![0.98, 0.0], vec![0.0, 0.0]], l2(2), l2(2)), form(&[vec![0.0, 0.0], vec![0.0, 0.5]], l2(2), l2(2))]).unwrap();
    let (a, cert) = ck_bilinear_correction(&f, &e1, &e1, 0.3, &XhCorrector).unwrap();
    assert_eq!(cert.diagnostics["t0"], 0.0);
    assert!((a.forms()[0].matrix() - Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0])).amax() < 1e-12);
    assert!((a.forms()[1].matrix() - Matrix::from_row_slice(2, 2, &[0.02, 0.0, 0.0, 0.5])).amax() < 1e-12);
    assert!((cert.distance - 0.02).abs() < 1e-10);
    assert!((a.eval(&e1, &e1).unwrap()[0] - 1.0).abs() < 1e-12);
    cert.verify().unwrap();
}

#[test]
fn ck_single_point_reduces_to_forms_corrector() {
    let phi = form(&[vec![0.97, 0.1], vec![0.0, 0.2]], l2(2), l2(2));
    let phi = phi.scaled(1.0 / phi.norm());
    let (wx, wy) = phi.norm_report().witness();
    let x0 = (&wx + vector(&[1e-3, -1e-3])).normalize();
    let f = FormField::labeled(vec![phi.clone()]).unwrap();
    let (a, _) = ck_bilinear_correction(&f, &x0, &wy, 0.4, &XhCorrector).unwrap();
    let (bt, _) = XhCorrector.correct(&phi, &x0, &wy, 0.2).unwrap();
    assert!((a.forms()[0].matrix() - bt.matrix()).amax() < 1e-12);
}
