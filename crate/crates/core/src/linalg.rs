//! Small vector helpers: canonical signs, lexicographic tie-breaking, seeded sampling.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{LabError, Result};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;
pub type Rng = ChaCha8Rng;

/// Deterministic generator used by every search in the crate.
pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sign used for real "phase" alignment; zero maps to +1.
pub fn sign(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

pub fn gaussian(n: usize, rng: &mut Rng) -> Vector {
    Vector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Flip `v` so that its first entry with magnitude above `1e-12` is positive.
pub fn canonical_sign(v: &Vector) -> Vector {
    match v.iter().find(|x| x.abs() > 1e-12) {
        Some(x) if *x < 0.0 => -v,
        _ => v.clone(),
    }
}

pub fn lex_cmp(a: &Vector, b: &Vector) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.partial_cmp(y).unwrap_or(Ordering::Equal) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Among candidates whose score is within `tol` (relative) of the best, return the
/// lexicographically largest canonical-signed one.
pub fn pick_best(cands: Vec<(f64, Vector)>, tol: f64) -> Option<(f64, Vector)> {
    let best = cands.iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max);
    if !best.is_finite() {
        return None;
    }
    let cut = best - tol * best.abs().max(1.0);
    cands
        .into_iter()
        .filter(|c| c.0 >= cut)
        .map(|(_, v)| canonical_sign(&v))
        .max_by(lex_cmp)
        .map(|v| (best, v))
}

/// All `2^n` sign vectors in lexicographic order of bits.
pub fn sign_vectors(n: usize) -> Vec<Vector> {
    let count = 1usize << n;
    (0..count)
        .map(|mask| Vector::from_fn(n, |i, _| if mask >> (n - 1 - i) & 1 == 1 { -1.0 } else { 1.0 }))
        .collect()
}

pub fn basis(n: usize, i: usize) -> Vector {
    let mut e = Vector::zeros(n);
    e[i] = 1.0;
    e
}

pub fn from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
    let r = rows.len();
    if r == 0 {
        return Err(LabError::Malformed("matrix has no rows".into()));
    }
    let c = rows[0].len();
    if c == 0 || rows.iter().any(|row| row.len() != c) {
        return Err(LabError::Malformed("matrix rows are empty or ragged".into()));
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(LabError::Malformed("matrix has non-finite entries".into()));
    }
    Ok(Matrix::from_fn(r, c, |i, j| rows[i][j]))
}

pub fn to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

pub fn vector(v: &[f64]) -> Vector {
    Vector::from_column_slice(v)
}

pub fn to_vec(v: &Vector) -> Vec<f64> {
    v.iter().copied().collect()
}

/// Rank-one matrix `y ⊗ f`, i.e. the map `x ↦ f(x) y`.
pub fn outer(y: &Vector, f: &Vector) -> Matrix {
    y * f.transpose()
}

pub fn max_abs(v: &Vector) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn is_finite(v: &Vector) -> bool {
    v.iter().all(|x| x.is_finite())
}
