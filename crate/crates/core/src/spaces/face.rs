//! Support functionals (the duality map) as exact faces of the dual ball.

use std::ops::Range;

use super::{Body, NormedSpace, SpaceKind, SumKind};
use crate::error::{check_dim, LabError, Result};
use crate::linalg::{lex_cmp, sign, sign_vectors, Vector};

/// Relative tolerance used to detect active constraints and zero coordinates.
pub(crate) const FACE_TOL: f64 = 1e-12;

/// A face of a dual unit ball, kept in exact combinatorial form.
#[derive(Clone, Debug, PartialEq)]
pub enum Face {
    Point(Vector),
    /// Convex hull of at least two vertices, sorted lexicographically.
    Hull(Vec<Vector>),
    /// Blockwise product, the face shape of an `ℓ1`-sum.
    Product(Vec<Face>),
    /// Convex hull of block-embedded faces, the face shape of an `ℓ∞`-sum.
    Join { blocks: Vec<(Range<usize>, Face)>, dim: usize },
    /// The whole dual unit ball of the given (primal) block space.
    DualBall(NormedSpace),
}

impl Face {
    fn hull(mut vs: Vec<Vector>) -> Face {
        vs.sort_by(lex_cmp);
        vs.dedup_by(|a, b| (&*a - &*b).amax() <= 1e-15);
        if vs.len() == 1 {
            Face::Point(vs.pop().expect("nonempty"))
        } else {
            Face::Hull(vs)
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Face::Point(v) => v.len(),
            Face::Hull(vs) => vs[0].len(),
            Face::Product(fs) => fs.iter().map(|f| f.dim()).sum(),
            Face::Join { dim, .. } => *dim,
            Face::DualBall(s) => s.dim(),
        }
    }

    /// A canonical element of the face.
    pub fn representative(&self) -> Vector {
        match self {
            Face::Point(v) => v.clone(),
            Face::Hull(vs) => vs[0].clone(),
            Face::Product(fs) => {
                let parts: Vec<f64> = fs.iter().flat_map(|f| f.representative().iter().copied().collect::<Vec<_>>()).collect();
                Vector::from_vec(parts)
            }
            Face::Join { blocks, dim } => {
                let mut v = Vector::zeros(*dim);
                let (r, f) = &blocks[0];
                v.rows_mut(r.start, r.len()).copy_from(&f.representative());
                v
            }
            Face::DualBall(s) => Vector::zeros(s.dim()),
        }
    }

    pub fn is_singleton(&self) -> bool {
        match self {
            Face::Point(_) => true,
            Face::Hull(_) => false,
            Face::Product(fs) => fs.iter().all(|f| f.is_singleton()),
            Face::Join { blocks, .. } => blocks.len() == 1 && blocks[0].1.is_singleton(),
            Face::DualBall(_) => false,
        }
    }

    /// Extreme points, when finitely many.
    pub fn vertices(&self) -> Option<Vec<Vector>> {
        match self {
            Face::Point(v) => Some(vec![v.clone()]),
            Face::Hull(vs) => Some(vs.clone()),
            Face::DualBall(s) => s.dual().ball_vertices(),
            Face::Product(fs) => {
                let mut out: Vec<Vec<f64>> = vec![Vec::new()];
                for f in fs {
                    let vs = f.vertices()?;
                    if out.len() * vs.len() > 1 << 16 {
                        return None;
                    }
                    out = out.iter().flat_map(|prefix| vs.iter().map(move |v| [prefix.as_slice(), v.as_slice()].concat())).collect();
                }
                Some(out.into_iter().map(Vector::from_vec).collect())
            }
            Face::Join { blocks, dim } => {
                let mut out = Vec::new();
                for (r, f) in blocks {
                    for v in f.vertices()? {
                        let mut x = Vector::zeros(*dim);
                        x.rows_mut(r.start, r.len()).copy_from(&v);
                        out.push(x);
                    }
                }
                Some(out)
            }
        }
    }
}

/// All norm-one functionals attaining 1 at a unit point.
#[derive(Clone, Debug)]
pub struct SupportSet {
    pub point: Vector,
    pub face: Face,
    pub is_singleton: bool,
    space: NormedSpace,
}

impl SupportSet {
    pub fn representative(&self) -> Vector {
        self.face.representative()
    }

    /// Diameter of the face in the dual norm.
    pub fn diameter(&self) -> f64 {
        face_diameter(&self.space, &self.face)
    }

    pub fn contains(&self, f: &Vector, tol: f64) -> bool {
        f.len() == self.point.len() && (f.dot(&self.point) - 1.0).abs() <= tol && self.space.dual_norm_of(f.as_slice()) <= 1.0 + tol
    }

    pub fn vertices(&self) -> Option<Vec<Vector>> {
        self.face.vertices()
    }
}

pub(crate) fn face_diameter(space: &NormedSpace, face: &Face) -> f64 {
    match face {
        Face::Point(_) => 0.0,
        Face::Hull(vs) => {
            let mut d: f64 = 0.0;
            for i in 0..vs.len() {
                for j in i + 1..vs.len() {
                    d = d.max(space.dual_norm_of((&vs[i] - &vs[j]).as_slice()));
                }
            }
            d
        }
        Face::DualBall(_) => 2.0,
        Face::Product(fs) => match space.kind() {
            SpaceKind::DirectSum { children, .. } => {
                children.iter().zip(fs).map(|(c, f)| face_diameter(c, f)).fold(0.0, f64::max)
            }
            _ => 0.0,
        },
        Face::Join { blocks, .. } => {
            if blocks.len() >= 2 {
                2.0
            } else if let SpaceKind::DirectSum { children, .. } = space.kind() {
                let r = &blocks[0].0;
                let idx = space.blocks().iter().position(|b| b == r).unwrap_or(0);
                face_diameter(&children[idx], &blocks[0].1)
            } else {
                0.0
            }
        }
    }
}

impl NormedSpace {
    /// Support functionals at `x / ‖x‖`.
    pub fn support_functionals(&self, x: &Vector) -> Result<SupportSet> {
        check_dim(self.dim(), x.len())?;
        let n = self.norm_of(x.as_slice());
        if n == 0.0 || !n.is_finite() {
            return Err(LabError::ZeroVector("support functionals"));
        }
        let u = x / n;
        let face = self.face_at(&u);
        let is_singleton = face.is_singleton();
        Ok(SupportSet { point: u, face, is_singleton, space: self.clone() })
    }

    /// A (canonical) norm-one functional attaining `‖x‖` at `x`.
    pub fn duality_map(&self, x: &Vector) -> Result<Vector> {
        Ok(self.support_functionals(x)?.representative())
    }

    /// A unit vector `x` with `f(x) = ‖f‖_*`.
    pub fn norming_vector(&self, f: &Vector) -> Result<Vector> {
        Ok(self.dual().support_functionals(f)?.representative())
    }

    /// Face of the dual ball exposed by a unit vector `u`.
    pub(crate) fn face_at(&self, u: &Vector) -> Face {
        let n = self.dim();
        match self.kind() {
            SpaceKind::Lp { p } | SpaceKind::WeightedLp { p, .. } => {
                let w: Vec<f64> = match self.kind() {
                    SpaceKind::WeightedLp { weights, .. } => weights.clone(),
                    _ => vec![1.0; n],
                };
                let p = *p;
                if n == 1 {
                    return Face::Point(Vector::from_element(1, w[0] * sign(u[0])));
                }
                if p == 1.0 {
                    let free: Vec<usize> = (0..n).filter(|&i| (w[i] * u[i]).abs() <= FACE_TOL).collect();
                    let base = Vector::from_fn(n, |i, _| if free.contains(&i) { 0.0 } else { w[i] * sign(u[i]) });
                    if free.is_empty() {
                        return Face::Point(base);
                    }
                    let vs = sign_vectors(free.len().min(16))
                        .into_iter()
                        .map(|s| {
                            let mut v = base.clone();
                            for (k, &i) in free.iter().enumerate().take(16) {
                                v[i] = s[k] * w[i];
                            }
                            v
                        })
                        .collect();
                    Face::hull(vs)
                } else if p.is_infinite() {
                    let m = (0..n).map(|i| (w[i] * u[i]).abs()).fold(0.0, f64::max);
                    let vs = (0..n)
                        .filter(|&i| (w[i] * u[i]).abs() >= m * (1.0 - FACE_TOL))
                        .map(|i| {
                            let mut e = Vector::zeros(n);
                            e[i] = w[i] * sign(u[i]);
                            e
                        })
                        .collect();
                    Face::hull(vs)
                } else {
                    let y: Vec<f64> = (0..n).map(|i| w[i] * u[i]).collect();
                    let ny = super::lp_norm(&y, p);
                    Face::Point(Vector::from_fn(n, |i, _| w[i] * sign(y[i]) * (y[i].abs() / ny).powf(p - 1.0)))
                }
            }
            SpaceKind::Polyhedral { generators, .. } => {
                let m = generators.iter().map(|g| g.dot(u)).fold(f64::NEG_INFINITY, f64::max);
                let vs = generators.iter().filter(|g| g.dot(u) >= m - FACE_TOL * m.abs().max(1.0)).cloned().collect();
                Face::hull(vs)
            }
            SpaceKind::Gauge(body) => {
                if n == 1 {
                    return Face::Point(Vector::from_element(1, sign(u[0])));
                }
                match *body {
                    Body::RoundedBox { rounding } => Face::Point(Vector::from_vec(Body::rounded_box_normal(rounding, u.as_slice()))),
                    Body::RoundedBoxPolar { rounding: r } => {
                        let a = 1.0 - r;
                        let l2 = u.norm();
                        let free: Vec<usize> = (0..n).filter(|&i| u[i].abs() <= FACE_TOL * l2).collect();
                        let base = Vector::from_fn(n, |i, _| if free.contains(&i) { 0.0 } else { a * sign(u[i]) + r * u[i] / l2 });
                        if free.is_empty() {
                            return Face::Point(base);
                        }
                        let vs = sign_vectors(free.len().min(16))
                            .into_iter()
                            .map(|s| {
                                let mut v = base.clone();
                                for (k, &i) in free.iter().enumerate().take(16) {
                                    v[i] = a * s[k];
                                }
                                v
                            })
                            .collect();
                        Face::hull(vs)
                    }
                }
            }
            SpaceKind::DirectSum { children, sum } => {
                let blocks = self.blocks();
                let norms: Vec<f64> = children.iter().zip(&blocks).map(|(c, r)| c.norm_of(&u.as_slice()[r.clone()])).collect();
                match sum {
                    SumKind::L1 => Face::Product(
                        children
                            .iter()
                            .zip(&blocks)
                            .zip(&norms)
                            .map(|((c, r), &nb)| {
                                if nb <= FACE_TOL {
                                    Face::DualBall(c.clone())
                                } else {
                                    c.face_at(&(u.rows(r.start, r.len()).into_owned() / nb))
                                }
                            })
                            .collect(),
                    ),
                    SumKind::LInf => {
                        let m = norms.iter().copied().fold(0.0, f64::max);
                        let active: Vec<(Range<usize>, Face)> = children
                            .iter()
                            .zip(&blocks)
                            .zip(&norms)
                            .filter(|(_, &nb)| nb >= m * (1.0 - FACE_TOL))
                            .map(|((c, r), &nb)| (r.clone(), c.face_at(&(u.rows(r.start, r.len()).into_owned() / nb))))
                            .collect();
                        Face::Join { blocks: active, dim: n }
                    }
                }
            }
        }
    }
}
