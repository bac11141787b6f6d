//! Distance from an operator to the operators attaining their norm at a fixed point.
//!
//! For scalar codomains this is a nearest-point problem on the support face at `x₀`,
//! solved in closed form for `ℓp` kinds and sums of scalars, by a small LP for polyhedral
//! norms, and by convex one-dimensional searches elsewhere. General codomains get a
//! certified lower bound (generator relaxation) and an upper bound from feasible
//! constructions plus a penalized search.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use serde::{Deserialize, Serialize};

use super::{attaining_pencil, attainment_check, op_norm, Operator};
use crate::error::{LabError, Result};
use crate::linalg::{sign, Matrix, Vector};
use crate::search::{golden_min, pattern_search, SearchBudget};
use crate::spaces::{Body, BoundKind, NormedSpace, SpaceKind, SumKind};

/// Nearest point of a (signed) support face to a functional.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceDistance {
    pub distance: f64,
    pub minimizer: Vector,
    /// Closed form or LP, as opposed to a numerical convex search.
    pub exact: bool,
}

/// Distance from `f` to `{g : ‖g‖_* = 1, |g(x₀)| = 1}`; the sign aligned with `f(x₀)` wins
/// ties.
pub fn scalar_face_distance(space: &NormedSpace, x0: &Vector, f: &Vector) -> Result<FaceDistance> {
    let n = space.norm(x0)?;
    if n == 0.0 {
        return Err(LabError::ZeroVector("face distance"));
    }
    crate::error::check_dim(space.dim(), f.len())?;
    let u = x0 / n;
    let s = sign(f.dot(&u));
    let a = signed(space, &u, f, s);
    let b = signed(space, &u, f, -s);
    Ok(if b.distance < a.distance - 1e-12 { b } else { a })
}

fn finish(space: &NormedSpace, f: &Vector, g: Vector, exact: bool) -> FaceDistance {
    FaceDistance { distance: space.dual_norm_of((&g - f).as_slice()), minimizer: g, exact }
}

/// `λ` on the simplex minimizing `Σ|λ_i − a_i|`.
fn simplex_l1_projection(a: &[f64]) -> Vec<f64> {
    let pos: f64 = a.iter().map(|v| v.max(0.0)).sum();
    let mut lam: Vec<f64> = a.iter().map(|v| v.max(0.0)).collect();
    if pos > 1.0 {
        for l in &mut lam {
            *l /= pos;
        }
    } else if let Some(k) = (0..a.len()).max_by(|&i, &j| a[i].total_cmp(&a[j])) {
        lam[k] += 1.0 - pos;
    }
    lam
}

/// Nearest point of `s·face(u)` to `f` for a unit `u`.
fn signed(space: &NormedSpace, u: &Vector, f: &Vector, s: f64) -> FaceDistance {
    let n = space.dim();
    match space.kind() {
        SpaceKind::Lp { p } | SpaceKind::WeightedLp { p, .. } if n > 1 && (*p == 1.0 || p.is_infinite()) => {
            let w: Vec<f64> = match space.kind() {
                SpaceKind::WeightedLp { weights, .. } => weights.clone(),
                _ => vec![1.0; n],
            };
            let mut g = Vector::zeros(n);
            if *p == 1.0 {
                for i in 0..n {
                    g[i] = if (w[i] * u[i]).abs() <= 1e-12 { f[i].clamp(-w[i], w[i]) } else { s * w[i] * sign(u[i]) };
                }
            } else {
                let m = (0..n).map(|i| (w[i] * u[i]).abs()).fold(0.0, f64::max);
                let active: Vec<usize> = (0..n).filter(|&i| (w[i] * u[i]).abs() >= m * (1.0 - 1e-12)).collect();
                let a: Vec<f64> = active.iter().map(|&i| s * sign(u[i]) * f[i] / w[i]).collect();
                let lam = simplex_l1_projection(&a);
                for (k, &i) in active.iter().enumerate() {
                    g[i] = lam[k] * s * sign(u[i]) * w[i];
                }
            }
            finish(space, f, g, true)
        }
        SpaceKind::Polyhedral { vertices, .. } => match space.face_at(u) {
            crate::spaces::Face::Hull(vs) => polyhedral_lp(space, vertices, &vs, f, s),
            face => finish(space, f, face.representative() * s, true),
        },
        SpaceKind::Gauge(Body::RoundedBoxPolar { rounding }) if n > 1 => polar_face(space, *rounding, u, f, s),
        SpaceKind::DirectSum { children, sum } => {
            let blocks = space.blocks();
            let norms: Vec<f64> = children.iter().zip(&blocks).map(|(c, r)| c.norm_of(&u.as_slice()[r.clone()])).collect();
            let mut g = Vector::zeros(n);
            let mut exact = true;
            match sum {
                SumKind::L1 => {
                    for ((c, r), &nb) in children.iter().zip(&blocks).zip(&norms) {
                        let fj = f.rows(r.start, r.len()).into_owned();
                        let gj = if nb <= 1e-12 {
                            let d = c.dual_norm_of(fj.as_slice());
                            if d > 1.0 {
                                &fj / d
                            } else {
                                fj
                            }
                        } else {
                            let uj = u.rows(r.start, r.len()).into_owned() / nb;
                            let fd = signed(c, &uj, &fj, s);
                            exact &= fd.exact;
                            fd.minimizer
                        };
                        g.rows_mut(r.start, r.len()).copy_from(&gj);
                    }
                }
                SumKind::LInf => {
                    let m = norms.iter().copied().fold(0.0, f64::max);
                    let active: Vec<usize> = (0..children.len()).filter(|&j| norms[j] >= m * (1.0 - 1e-12)).collect();
                    let unit_block = |j: usize| u.rows(blocks[j].start, blocks[j].len()).into_owned() / norms[j];
                    let target = |j: usize| f.rows(blocks[j].start, blocks[j].len()).into_owned();
                    // φ_j(λ) = min over the block face of ‖λ g_j − f_j‖.
                    let phi = |j: usize, lam: f64| -> (f64, Vector, bool) {
                        let fj = target(j);
                        if lam <= 1e-15 {
                            return (children[j].dual_norm_of(fj.as_slice()), Vector::zeros(fj.len()), true);
                        }
                        let fd = signed(&children[j], &unit_block(j), &(&fj / lam), s);
                        (lam * fd.distance, fd.minimizer * lam, fd.exact)
                    };
                    let lams: Vec<f64> = if active.len() == 1 {
                        vec![1.0]
                    } else if active.iter().all(|&j| children[j].dim() == 1) {
                        let a: Vec<f64> = active
                            .iter()
                            .map(|&j| {
                                let c = children[j].face_at(&unit_block(j)).representative()[0] * s;
                                target(j)[0] / c
                            })
                            .collect();
                        simplex_l1_projection(&a)
                    } else {
                        exact = false;
                        let k = active.len();
                        let total = |w: &[f64]| -> f64 {
                            let lam = softmax(w);
                            active.iter().zip(&lam).map(|(&j, &l)| phi(j, l).0).sum()
                        };
                        if k == 2 {
                            let (l, _) = golden_min(|l| phi(active[0], l).0 + phi(active[1], 1.0 - l).0, 0.0, 1.0, 1e-12);
                            vec![l, 1.0 - l]
                        } else {
                            let (w, _) = pattern_search(total, &vec![0.0; k], 1.0, 1e-9, 20_000);
                            softmax(&w)
                        }
                    };
                    for (&j, &l) in active.iter().zip(&lams) {
                        let (_, gj, ex) = phi(j, l);
                        exact &= ex;
                        g.rows_mut(blocks[j].start, blocks[j].len()).copy_from(&gj);
                    }
                }
            }
            finish(space, f, g, exact)
        }
        _ => finish(space, f, space.face_at(u).representative() * s, true),
    }
}

fn softmax(w: &[f64]) -> Vec<f64> {
    let m = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = w.iter().map(|v| (v - m).exp()).collect();
    let z: f64 = e.iter().sum();
    e.iter().map(|v| v / z).collect()
}

/// Minimize `max_v |(Σ λ_k g_k − f)·v|` over the simplex by linear programming.
fn polyhedral_lp(space: &NormedSpace, vertices: &[Vector], face: &[Vector], f: &Vector, s: f64) -> FaceDistance {
    let mut pb = Problem::new(OptimizationDirection::Minimize);
    let lam: Vec<_> = face.iter().map(|_| pb.add_var(0.0, (0.0, f64::INFINITY))).collect();
    let t = pb.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
    pb.add_constraint(lam.iter().map(|&l| (l, 1.0)).collect::<Vec<_>>(), ComparisonOp::Eq, 1.0);
    for v in vertices {
        let mut row: Vec<_> = face.iter().zip(&lam).map(|(g, &l)| (l, s * g.dot(v))).collect();
        row.push((t, -1.0));
        pb.add_constraint(row, ComparisonOp::Le, f.dot(v));
    }
    match pb.solve() {
        Ok(sol) => {
            let mut g = Vector::zeros(f.len());
            for (gk, &l) in face.iter().zip(&lam) {
                g += gk * (s * sol[l].max(0.0));
            }
            finish(space, f, g, true)
        }
        Err(_) => finish(space, f, face[0].clone() * s, false),
    }
}

/// Face of the polar rounded box: `a·σ + r·u/‖u‖₂` with free coordinates in `[−a, a]`.
fn polar_face(space: &NormedSpace, r: f64, u: &Vector, f: &Vector, s: f64) -> FaceDistance {
    let a = 1.0 - r;
    let face = space.face_at(u);
    let base = face.representative();
    let l2 = u.norm();
    let free: Vec<usize> = (0..u.len()).filter(|&i| u[i].abs() <= 1e-12 * l2).collect();
    if free.is_empty() {
        return finish(space, f, base * s, true);
    }
    let build = |c: &[f64]| {
        let mut g = base.clone();
        for (k, &i) in free.iter().enumerate() {
            g[i] = a * c[k].clamp(-1.0, 1.0);
        }
        g * s
    };
    let mut c = vec![0.0; free.len()];
    for _ in 0..50 {
        for k in 0..free.len() {
            let (ck, _) = golden_min(
                |v| {
                    let mut cc = c.clone();
                    cc[k] = v;
                    space.dual_norm_of((build(&cc) - f).as_slice())
                },
                -1.0,
                1.0,
                1e-13,
            );
            c[k] = ck;
        }
    }
    finish(space, f, build(&c), false)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PointwiseNaDistance {
    pub base: Operator,
    pub point: Vec<f64>,
    /// `‖minimizer − base‖`, an upper bound unless `bound_kind` is exact.
    pub distance: f64,
    /// Certified lower bound.
    pub lower: f64,
    pub minimizer: Operator,
    pub bound_kind: BoundKind,
    pub method: String,
}

/// Distance from `T` to `{S : ‖S‖ = ‖S x₀‖ = 1}`.
pub fn dist_to_pointwise_na(t: &Operator, x0: &Vector, budget: SearchBudget) -> Result<PointwiseNaDistance> {
    let dom = t.domain();
    let cod = t.codomain();
    let nx = dom.norm(x0)?;
    if nx == 0.0 {
        return Err(LabError::ZeroVector("pointwise distance"));
    }
    if (nx - 1.0).abs() > 1e-10 {
        return Err(LabError::NotUnit(nx));
    }
    let tn = t.norm();
    if tn > 1.0 + 1e-9 {
        return Err(LabError::NormTooLarge(tn));
    }
    let point: Vec<f64> = x0.iter().copied().collect();
    if (tn - 1.0).abs() <= 1e-9 && attainment_check(t, x0, 1e-9)?.passed {
        return Ok(PointwiseNaDistance {
            base: t.clone(),
            point,
            distance: 0.0,
            lower: 0.0,
            minimizer: t.clone(),
            bound_kind: BoundKind::Exact,
            method: "already-attaining".into(),
        });
    }
    let gap = 1.0 - cod.norm_of(t.apply(x0)?.as_slice());
    if cod.dim() == 1 {
        let c = cod.norm_of(&[1.0]);
        let f = t.matrix().row(0).transpose() * c;
        let fd = scalar_face_distance(dom, x0, &f)?;
        let s = t.with_matrix(Matrix::from_row_slice(1, fd.minimizer.len(), (fd.minimizer.clone() / c).as_slice()))?;
        let distance = op_norm(&s.minus(t)?, SearchBudget::default()).value;
        return Ok(PointwiseNaDistance {
            base: t.clone(),
            point,
            distance,
            lower: if fd.exact { fd.distance.min(distance) } else { gap.max(0.0) },
            minimizer: s,
            bound_kind: if fd.exact { BoundKind::Exact } else { BoundKind::Upper },
            method: if fd.exact { "face-exact".into() } else { "face-numerical".into() },
        });
    }
    let lower = relaxation_lower_bound(t, x0)?.max(gap);
    let mut best: Option<(f64, Operator)> = None;
    let mut consider = |d: f64, s: Operator| {
        if best.as_ref().is_none_or(|b| d < b.0) {
            best = Some((d, s));
        }
    };
    let set = dom.support_functionals(x0)?;
    let mut js = set.vertices().unwrap_or_else(|| vec![set.representative()]);
    js.truncate(8);
    for j in &js {
        if let Ok(p) = attaining_pencil(t, x0, j, budget) {
            consider(p.distance, p.operator);
        }
    }
    let (mut upper, mut s_best) = best.ok_or_else(|| LabError::Unsupported("no feasible attaining candidate".into()))?;
    if upper - lower > 1e-8 {
        if let Some((d, s)) = penalized_search(t, x0, &s_best, budget) {
            if d < upper {
                upper = d;
                s_best = s;
            }
        }
    }
    let certified = upper - lower <= 1e-8;
    Ok(PointwiseNaDistance {
        base: t.clone(),
        point,
        distance: upper,
        lower: lower.min(upper),
        minimizer: s_best,
        bound_kind: if certified { BoundKind::Exact } else { BoundKind::Upper },
        method: if certified { "relaxation-tight".into() } else { "penalized-upper".into() },
    })
}

/// Certified lower bound: every feasible `S` is normed at `S x₀` by an extreme dual
/// functional `ψ`, so `‖S − T‖ ≥ min_ψ dist(ψ∘T, attaining at x₀ with value +1)`.
pub(crate) fn relaxation_lower_bound(t: &Operator, x0: &Vector) -> Result<f64> {
    let dom = t.domain();
    let Some(gens) = t.codomain().dual().ball_vertices() else {
        return Ok(0.0);
    };
    let u = dom.normalize(x0)?;
    let mut lb = f64::INFINITY;
    for psi in gens {
        let f = t.matrix().transpose() * psi;
        let fd = signed(dom, &u, &f, 1.0);
        if !fd.exact {
            return Ok(0.0);
        }
        lb = lb.min(fd.distance);
    }
    Ok(if lb.is_finite() { lb } else { 0.0 })
}

/// Exterior-penalty search over matrices with feasibility repair by rescaling.
fn penalized_search(t: &Operator, x0: &Vector, start: &Operator, budget: SearchBudget) -> Option<(f64, Operator)> {
    let (rows, cols) = (t.matrix().nrows(), t.matrix().ncols());
    let mut params: Vec<f64> = start.matrix().iter().copied().collect();
    let mut best: Option<(f64, Operator)> = None;
    let mk = |p: &[f64]| t.with_matrix(Matrix::from_column_slice(rows, cols, p)).expect("same shape");
    let quick = SearchBudget { starts: 8, iterations: 100, ..budget };
    for round in 0..4 {
        let mu = 10f64.powi(round + 1);
        let objective = |p: &[f64]| {
            let s = mk(p);
            let ns = op_norm(&s, quick).value;
            let sx = t.codomain().norm_of((s.matrix() * x0).as_slice());
            let d = op_norm(&s.minus(t).expect("same spaces"), quick).value;
            d + mu * ((ns - 1.0).max(0.0).powi(2) + (1.0 - sx).max(0.0).powi(2))
        };
        let (p, _) = pattern_search(objective, &params, 0.02, 1e-7, budget.iterations.max(100));
        params = p;
        let s = mk(&params);
        let ns = s.norm();
        if ns > 0.0 {
            let sh = s.scaled(1.0 / ns);
            let sx = t.codomain().norm_of((sh.matrix() * x0).as_slice());
            if (sx - 1.0).abs() <= 1e-9 {
                let d = sh.minus(t).ok()?.norm();
                if best.as_ref().is_none_or(|b| d < b.0) {
                    best = Some((d, sh));
                }
            }
        }
    }
    best
}
