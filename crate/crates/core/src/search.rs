//! Derivative-free search primitives shared by the oracles.
//!
//! Everything here is deterministic given its inputs; randomness enters only through
//! explicit seeds held in [`SearchBudget`].

use serde::{Deserialize, Serialize};

/// Iteration budget and seed for multi-start searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub starts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { starts: 32, iterations: 500, seed: 0x5eed }
    }
}

impl SearchBudget {
    pub fn with_seed(seed: u64) -> Self {
        SearchBudget { seed, ..Self::default() }
    }

    pub fn with_iterations(mut self, iterations: usize) -> Self {
        self.iterations = iterations.max(1);
        self
    }

    /// Derive an independent budget for a sub-search.
    pub fn fork(&self, salt: u64) -> Self {
        let seed = self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(salt.wrapping_mul(0xBF58_476D_1CE4_E5B9)).rotate_left(17);
        SearchBudget { seed, ..*self }
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section maximization of a unimodal `f` on `[a, b]`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (x, v) = golden_max(|t| -f(t), a, b, tol);
    (x, -v)
}

/// Maximize a `period`-periodic function of one angle: dense grid, then golden refinement
/// around the best few grid cells.
pub fn periodic_scan_max<F: FnMut(f64) -> f64>(mut f: F, period: f64, grid: usize, refine: usize) -> (f64, f64) {
    let h = period / grid as f64;
    let vals: Vec<f64> = (0..grid).map(|k| f(k as f64 * h)).collect();
    let mut peaks: Vec<usize> = (0..grid)
        .filter(|&k| {
            let l = vals[(k + grid - 1) % grid];
            let r = vals[(k + 1) % grid];
            vals[k] >= l && vals[k] >= r
        })
        .collect();
    peaks.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
    peaks.truncate(refine.max(1));
    let mut best = (0.0, f64::NEG_INFINITY);
    for &k in &peaks {
        let t0 = k as f64 * h;
        if vals[k] > best.1 {
            best = (t0, vals[k]);
        }
        let (t, v) = golden_max(&mut f, t0 - h, t0 + h, 1e-15);
        if v > best.1 {
            best = (t, v);
        }
    }
    best
}

/// Largest `t` in `[lo, hi]` with `feasible(t)`, assuming feasibility is an initial interval
/// and `feasible(lo)` holds.
pub fn bisect_last_true<F: FnMut(f64) -> bool>(mut feasible: F, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    if feasible(hi) {
        return hi;
    }
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * hi.abs().max(1.0) {
            break;
        }
    }
    lo
}

/// Compass pattern search minimizing `f` from `x0`.
pub fn pattern_search<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], step: f64, min_step: f64, max_evals: usize) -> (Vec<f64>, f64) {
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut h = step;
    let mut evals = 1;
    while h > min_step && evals < max_evals {
        let mut improved = false;
        for i in 0..x.len() {
            for s in [1.0, -1.0] {
                let mut y = x.clone();
                y[i] += s * h;
                let fy = f(&y);
                evals += 1;
                if fy < fx {
                    x = y;
                    fx = fy;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    (x, fx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, v) = golden_max(|t| -(t - 0.3) * (t - 0.3), -1.0, 2.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-8);
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn periodic_scan_handles_kinks() {
        let (t, v) = periodic_scan_max(|t: f64| t.cos().abs() + t.sin().abs(), std::f64::consts::PI, 1000, 3);
        assert!((v - 2f64.sqrt()).abs() < 1e-12);
        assert!((t - std::f64::consts::FRAC_PI_4).abs() < 1e-6);
    }

    #[test]
    fn bisection_locates_threshold() {
        let t = bisect_last_true(|t| t * t <= 2.0, 0.0, 2.0, 200);
        assert!((t - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn pattern_search_minimizes_quadratic() {
        let (x, v) = pattern_search(|x| (x[0] - 1.0).powi(2) + (x[1] + 2.0).powi(2), &[0.0, 0.0], 1.0, 1e-10, 10_000);
        assert!(v < 1e-16);
        assert!((x[0] - 1.0).abs() < 1e-8 && (x[1] + 2.0).abs() < 1e-8);
    }
}
