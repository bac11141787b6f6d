//! Vertex enumeration for symmetric polytopes `{x : ⟨g, x⟩ ≤ 1 for all generators g}`.

use nalgebra::{DMatrix, DVector};

use crate::error::{LabError, Result};

const MAX_SUBSETS: u128 = 2_000_000;

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Check that the generator set is symmetric under negation.
pub fn is_symmetric(gens: &[DVector<f64>]) -> bool {
    gens.iter().all(|g| gens.iter().any(|h| (g + h).amax() <= 1e-12 * g.amax().max(1.0)))
}

/// Vertices of the polytope cut out by the generators; errors if unbounded.
pub fn vertices(gens: &[DVector<f64>], n: usize) -> Result<Vec<DVector<f64>>> {
    if gens.is_empty() {
        return Err(LabError::MalformedSpace("polyhedral space needs generators".into()));
    }
    let g = DMatrix::from_fn(gens.len(), n, |i, j| gens[i][j]);
    if g.clone().svd(false, false).rank(1e-10) < n {
        return Err(LabError::MalformedSpace("generators do not span the dual space".into()));
    }
    if binomial(gens.len(), n) > MAX_SUBSETS {
        return Err(LabError::MalformedSpace("too many generators for vertex enumeration".into()));
    }
    let mut out: Vec<DVector<f64>> = Vec::new();
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let a = DMatrix::from_fn(n, n, |i, j| gens[idx[i]][j]);
        if let Some(inv) = a.clone().try_inverse() {
            let x = inv * DVector::from_element(n, 1.0);
            let feasible = gens.iter().all(|gk| gk.dot(&x) <= 1.0 + 1e-10);
            if feasible && !out.iter().any(|v| (v - &x).amax() <= 1e-9) {
                out.push(x);
            }
        }
        // next combination
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if idx[i] < gens.len() - n + i {
                idx[i] += 1;
                for j in i + 1..n {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_from_axis_generators() {
        let gens: Vec<_> = [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]].iter().map(|g| DVector::from_column_slice(g)).collect();
        let v = vertices(&gens, 2).unwrap();
        assert_eq!(v.len(), 4);
        assert!(v.iter().all(|x| (x[0].abs() - 1.0).abs() < 1e-12 && (x[1].abs() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn hexagon_has_six_vertices() {
        let gens: Vec<_> = (0..6).map(|k| {
            let t = k as f64 * std::f64::consts::PI / 3.0;
            DVector::from_column_slice(&[t.cos(), t.sin()])
        }).collect();
        assert!(is_symmetric(&gens));
        assert_eq!(vertices(&gens, 2).unwrap().len(), 6);
    }

    #[test]
    fn rank_deficient_generators_rejected() {
        let gens: Vec<_> = [[1.0, 0.0], [-1.0, 0.0]].iter().map(|g| DVector::from_column_slice(g)).collect();
        assert!(vertices(&gens, 2).is_err());
    }
}
