//! Named self-check suites runnable from a problem file.

use super::schema::{SuiteCheck, SuiteReport};
use crate::bilinear::{beta_bilinear_correction, bilinear_point_correction_xh, ck_bilinear_correction, eta_xh, BilinearMap, FormField, XhCorrector};
use crate::bpb::{beta_perturbation, eta_functional, functional_point_correction, hilbert_domain_correction, hilbert_internal, hilbert_rotation, xi_for, BetaStructure};
use crate::error::{LabError, Result};
use crate::instances::{bilinear_with_gap, field_with_gap, functional_with_gap, operator_with_gap};
use crate::linalg::{gaussian, rng, vector, Matrix, Rng};
use crate::operators::Operator;
use crate::probe::{counterexample_search, sum_propagation_suite};
use crate::search::SearchBudget;
use crate::spaces::{NormedSpace, SumKind};

pub const SUITES: [&str; 6] = ["smoothness-characterization", "beta", "hilbert", "bilinear", "ck", "sums"];

const EPS: f64 = 0.5;

fn tally(name: &str, total: usize, rng: &mut Rng, mut trial: impl FnMut(&mut Rng) -> Result<bool>) -> SuiteCheck {
    let mut passed = 0;
    let mut first_error = None;
    for _ in 0..total {
        match trial(rng) {
            Ok(true) => passed += 1,
            Ok(false) => {}
            Err(e) => {
                first_error.get_or_insert_with(|| e.to_string());
            }
        }
    }
    SuiteCheck { name: name.into(), passed, total, detail: first_error }
}

fn single(name: &str, f: impl FnOnce() -> Result<bool>) -> SuiteCheck {
    let (passed, detail) = match f() {
        Ok(ok) => (ok as usize, None),
        Err(e) => (0, Some(e.to_string())),
    };
    SuiteCheck { name: name.into(), passed, total: 1, detail }
}

fn smoothness(seed: u64) -> Result<Vec<SuiteCheck>> {
    let mut checks = Vec::new();
    let mut r = rng(seed);
    for p in [2.0, 3.0, 4.0] {
        let space = NormedSpace::lp(p, 3)?;
        let eta = eta_functional(&space, EPS)?.eta;
        checks.push(tally(&format!("functional-l{p}^3"), 40, &mut r, |r| {
            let (x0, f) = functional_with_gap(&space, 0.5 * eta, r)?;
            let (_, cert) = functional_point_correction(&space, &f, &x0, EPS)?;
            Ok(cert.verify().is_ok())
        }));
    }
    for space in [NormedSpace::l1(2), NormedSpace::linf(2)] {
        let budget = SearchBudget { starts: 16, iterations: 40, seed };
        checks.push(single(&format!("witness-{}", space.label()), || {
            let w = counterexample_search(&space, &NormedSpace::scalars(), 1.0, 0.01, budget)?;
            Ok(matches!(w, Some(w) if w.verify().is_ok()))
        }));
    }
    Ok(checks)
}

fn beta(seed: u64) -> Result<Vec<SuiteCheck>> {
    let mut r = rng(seed);
    let gap = 0.5 * eta_functional(&NormedSpace::l2(3), xi_for(0.0, EPS)?)?.eta;
    let mut checks = Vec::new();
    for rho in [0.0, 0.3] {
        let beta = BetaStructure::skewed(3, rho)?;
        checks.push(tally(&format!("random-rho{rho}"), 40, &mut r, |r| {
            let (t, x0) = operator_with_gap(&NormedSpace::l2(3), &NormedSpace::linf(3), gap, r)?;
            let (_, cert) = beta_perturbation(&t, &x0, EPS, &beta)?;
            Ok(cert.verify().is_ok())
        }));
    }
    checks.push(single("worked-example", || {
        let t = Operator::from_rows(&[vec![0.95, 0.0], vec![0.0, 1.0]], NormedSpace::l2(2), NormedSpace::linf(2))?;
        let (_, cert) = beta_perturbation(&t, &vector(&[1.0, 0.0]), 0.4, &BetaStructure::canonical(2))?;
        Ok((cert.distance - 0.1 / 1.1).abs() < 1e-9)
    }));
    Ok(checks)
}

fn hilbert(seed: u64) -> Result<Vec<SuiteCheck>> {
    let mut r = rng(seed);
    let gap = 0.5 * hilbert_internal(EPS);
    let mut checks = Vec::new();
    for y in [NormedSpace::l2(2), NormedSpace::l1(3), NormedSpace::linf(2)] {
        checks.push(tally(&format!("correction-to-{}", y.label()), 30, &mut r, |r| {
            let (t, x0) = operator_with_gap(&NormedSpace::l2(3), &y, gap, r)?;
            let (_, cert) = hilbert_domain_correction(&t, &x0, EPS)?;
            Ok(cert.verify().is_ok())
        }));
    }
    checks.push(tally("rotations", 100, &mut r, |r| {
        let a = gaussian(4, r);
        let b = gaussian(4, r);
        let (a, b) = (&a / a.norm(), &b / b.norm());
        let rot = hilbert_rotation(&a, &b)?;
        let m = rot.matrix();
        let orthogonal = (m.transpose() * m - Matrix::identity(4, 4)).amax() < 1e-9;
        Ok(orthogonal && (m * &a - &b).amax() < 1e-9)
    }));
    Ok(checks)
}

fn bilinear(seed: u64) -> Result<Vec<SuiteCheck>> {
    let mut r = rng(seed);
    let l2 = NormedSpace::l2(2);
    let gap = 0.5 * eta_xh(&l2, EPS)?.eta;
    let mut checks = vec![tally("xh-forms", 40, &mut r, |r| {
        let (b, x0, y0) = bilinear_with_gap(&l2, &l2, &NormedSpace::scalars(), gap, r)?;
        let (_, cert) = bilinear_point_correction_xh(&b, &x0, &y0, EPS)?;
        Ok(cert.verify().is_ok() && cert.distance < 3.0 * EPS)
    })];
    checks.push(single("beta-worked-example", || {
        let b = BilinearMap::new(
            vec![Matrix::from_row_slice(2, 2, &[0.99, 0.0, 0.0, 0.0]), Matrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 0.9])],
            l2.clone(),
            l2.clone(),
            NormedSpace::linf(2),
        )?;
        let e1 = vector(&[1.0, 0.0]);
        let (_, cert) = beta_bilinear_correction(&b, &e1, &e1, EPS, &BetaStructure::canonical(2), &XhCorrector)?;
        Ok(cert.verify().is_ok())
    }));
    Ok(checks)
}

fn ck(seed: u64) -> Result<Vec<SuiteCheck>> {
    let mut r = rng(seed);
    let l2 = NormedSpace::l2(2);
    let gap = 0.5 * eta_xh(&l2, EPS / 3.0)?.eta;
    let mut checks = vec![tally("random-fields", 30, &mut r, |r| {
        let (field, x0, y0) = field_with_gap(&l2, &l2, 3, gap, r)?;
        let (_, cert) = ck_bilinear_correction(&field, &x0, &y0, EPS, &XhCorrector)?;
        Ok(cert.verify().is_ok())
    })];
    checks.push(single("worked-example", || {
        let forms = vec![
            BilinearMap::form_from_rows(&[vec![0.98, 0.0], vec![0.0, 0.0]], l2.clone(), l2.clone())?,
            BilinearMap::form_from_rows(&[vec![0.0, 0.0], vec![0.0, 0.5]], l2.clone(), l2.clone())?,
        ];
        let e1 = vector(&[1.0, 0.0]);
        let (_, cert) = ck_bilinear_correction(&FormField::labeled(forms)?, &e1, &e1, 0.3, &XhCorrector)?;
        Ok((cert.distance - 0.02).abs() < 1e-10)
    }));
    Ok(checks)
}

fn sums(seed: u64) -> Result<Vec<SuiteCheck>> {
    let children = [NormedSpace::scalars(), NormedSpace::scalars()];
    let budget = SearchBudget { starts: 16, iterations: 40, seed };
    Ok([SumKind::LInf, SumKind::L1]
        .into_iter()
        .map(|kind| {
            single(&format!("{kind:?}-sum").to_lowercase(), || Ok(sum_propagation_suite(&NormedSpace::l2(2), &children, kind, EPS, budget)?.consistent))
        })
        .collect())
}

/// Run a named suite at a fixed seed.
pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport> {
    let checks = match name {
        "smoothness-characterization" => smoothness(seed)?,
        "beta" => beta(seed)?,
        "hilbert" => hilbert(seed)?,
        "bilinear" => bilinear(seed)?,
        "ck" => ck(seed)?,
        "sums" => sums(seed)?,
        other => return Err(LabError::Malformed(format!("unknown suite {other:?}"))),
    };
    let passed = checks.iter().all(SuiteCheck::ok);
    Ok(SuiteReport { name: name.into(), seed, checks, passed })
}
