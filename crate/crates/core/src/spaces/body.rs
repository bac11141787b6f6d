//! Gauge bodies: the rounded box `(1-r)B∞ + rB₂` and its polar.

use serde::{Deserialize, Serialize};

/// A symmetric convex body given by a membership test (and, where cheap, a closed form).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Body {
    /// Minkowski sum `(1-r)·B∞ + r·B₂`: smooth boundary with flat faces.
    RoundedBox { rounding: f64 },
    /// Polar of the rounded box; its norm is `(1-r)‖x‖₁ + r‖x‖₂`.
    RoundedBoxPolar { rounding: f64 },
}

pub(crate) fn l1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

pub(crate) fn l2(x: &[f64]) -> f64 {
    let m = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    m * x.iter().map(|v| (v / m) * (v / m)).sum::<f64>().sqrt()
}

pub(crate) fn linf(x: &[f64]) -> f64 {
    x.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

impl Body {
    pub fn rounding(&self) -> f64 {
        match *self {
            Body::RoundedBox { rounding } | Body::RoundedBoxPolar { rounding } => rounding,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Body::RoundedBox { .. } => "rounded-box",
            Body::RoundedBoxPolar { .. } => "rounded-box-polar",
        }
    }

    pub fn polar(&self) -> Body {
        match *self {
            Body::RoundedBox { rounding } => Body::RoundedBoxPolar { rounding },
            Body::RoundedBoxPolar { rounding } => Body::RoundedBox { rounding },
        }
    }

    pub fn is_smooth(&self) -> bool {
        matches!(self, Body::RoundedBox { .. })
    }

    /// Exact membership test.
    pub fn contains(&self, z: &[f64]) -> bool {
        match *self {
            Body::RoundedBox { rounding: r } => {
                let a = 1.0 - r;
                let d2: f64 = z.iter().map(|v| (v.abs() - a).max(0.0).powi(2)).sum();
                d2 <= r * r
            }
            Body::RoundedBoxPolar { rounding: r } => (1.0 - r) * l1(z) + r * l2(z) <= 1.0,
        }
    }

    /// Minkowski gauge. The rounded box uses bisection on the ray with the membership
    /// test (relative tolerance 1e-13, returning the feasible end); the polar has a closed form.
    pub fn gauge(&self, z: &[f64]) -> f64 {
        match *self {
            Body::RoundedBox { rounding: r } => {
                let m = linf(z);
                if m == 0.0 {
                    return 0.0;
                }
                let n = z.len() as f64;
                let mut lo = m;
                if self.contains(&scaled(z, 1.0 / lo)) {
                    return lo;
                }
                let mut hi = m / ((1.0 - r) + r / n.sqrt());
                for _ in 0..200 {
                    if hi - lo <= 1e-13 * hi {
                        break;
                    }
                    let mid = 0.5 * (lo + hi);
                    if self.contains(&scaled(z, 1.0 / mid)) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                hi
            }
            Body::RoundedBoxPolar { rounding: r } => (1.0 - r) * l1(z) + r * l2(z),
        }
    }

    /// Support function `sup{⟨f, z⟩ : z ∈ body}`, i.e. the dual norm.
    pub fn support(&self, f: &[f64]) -> f64 {
        self.polar().gauge(f)
    }

    /// Outward normal at a boundary point of the rounded box, scaled to support value 1.
    pub(crate) fn rounded_box_normal(r: f64, u: &[f64]) -> Vec<f64> {
        let a = 1.0 - r;
        let d: Vec<f64> = u.iter().map(|v| v - v.clamp(-a, a)).collect();
        let len = l2(&d);
        let n: Vec<f64> = if len > 0.0 {
            d.iter().map(|v| v / len).collect()
        } else {
            // Numerically interior point: fall back to the dominant coordinate.
            let i = (0..u.len()).max_by(|&i, &j| u[i].abs().total_cmp(&u[j].abs())).unwrap_or(0);
            (0..u.len()).map(|k| if k == i { u[i].signum() } else { 0.0 }).collect()
        };
        let h = a * l1(&n) + r * l2(&n);
        n.iter().map(|v| v / h).collect()
    }
}

fn scaled(z: &[f64], s: f64) -> Vec<f64> {
    z.iter().map(|v| v * s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounded_box_edge_midpoint_is_on_boundary() {
        let b = Body::RoundedBox { rounding: 0.5 };
        assert_eq!(b.gauge(&[1.0, 0.0]), 1.0);
        assert_eq!(b.gauge(&[1.0, 0.25]), 1.0);
        assert_eq!(b.gauge(&[1.0, 0.5]), 1.0);
    }

    #[test]
    fn rounded_box_corner_matches_geometry() {
        // Corner direction (1,1): boundary point a + r/sqrt(2) in each coordinate.
        let r = 0.5;
        let b = Body::RoundedBox { rounding: r };
        let t = (1.0 - r) + r / 2f64.sqrt();
        assert!((b.gauge(&[1.0, 1.0]) - 1.0 / t).abs() < 1e-12);
    }

    #[test]
    fn support_is_dual_of_gauge_on_grid() {
        let b = Body::RoundedBox { rounding: 0.3 };
        let f = [0.7, -0.2];
        let mut best: f64 = 0.0;
        for k in 0..20_000 {
            let t = k as f64 * std::f64::consts::TAU / 20_000.0;
            let z = [t.cos(), t.sin()];
            let g = b.gauge(&z);
            best = best.max((f[0] * z[0] + f[1] * z[1]) / g);
        }
        assert!((best - b.support(&f)).abs() < 1e-6);
    }

    #[test]
    fn normal_supports_at_boundary_point() {
        let r = 0.4;
        for u in [[1.0, 0.1], [0.8, 0.9], [-0.3, 1.0]] {
            let b = Body::RoundedBox { rounding: r };
            let g = b.gauge(&u);
            let p = [u[0] / g, u[1] / g];
            let n = Body::rounded_box_normal(r, &p);
            assert!((n[0] * p[0] + n[1] * p[1] - 1.0).abs() < 1e-10);
            assert!((b.support(&n) - 1.0).abs() < 1e-12);
        }
    }
}
