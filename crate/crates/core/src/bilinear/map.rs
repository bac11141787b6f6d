//! Bilinear maps `X × Y → Z` stored as one `dim(X) × dim(Y)` coefficient slice per
//! coordinate of `Z`, and finite fields of scalar forms.

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, LabError, Result};
use crate::linalg::{basis, canonical_sign, from_rows, gaussian, rng, to_rows, Matrix, Vector};
use crate::operators::{op_norm, Operator};
use crate::search::{periodic_scan_max, SearchBudget};
use crate::spaces::NormedSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BilinearNormMethod {
    Zero,
    Spectral,
    Entrywise,
    FactorVertices,
    PlanarScan,
    DualGenerators,
    Alternating,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BilinearNorm {
    pub value: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub method: BilinearNormMethod,
    /// All sub-computations came from exact paths.
    pub certified: bool,
}

impl BilinearNorm {
    pub fn witness(&self) -> (Vector, Vector) {
        (Vector::from_column_slice(&self.x), Vector::from_column_slice(&self.y))
    }
}

#[derive(Clone, Debug)]
pub struct BilinearMap {
    slices: Vec<Matrix>,
    x: NormedSpace,
    y: NormedSpace,
    z: NormedSpace,
    cache: Arc<OnceLock<BilinearNorm>>,
}

impl PartialEq for BilinearMap {
    fn eq(&self, o: &Self) -> bool {
        self.slices == o.slices && self.x == o.x && self.y == o.y && self.z == o.z
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BilinearRepr {
    x: NormedSpace,
    y: NormedSpace,
    z: NormedSpace,
    tensor: Vec<Vec<Vec<f64>>>,
}

impl Serialize for BilinearMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BilinearRepr { x: self.x.clone(), y: self.y.clone(), z: self.z.clone(), tensor: self.slices.iter().map(to_rows).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BilinearMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = BilinearRepr::deserialize(d)?;
        let slices = r.tensor.iter().map(|s| from_rows(s)).collect::<Result<Vec<_>>>().map_err(serde::de::Error::custom)?;
        BilinearMap::new(slices, r.x, r.y, r.z).map_err(serde::de::Error::custom)
    }
}

impl BilinearMap {
    pub fn new(slices: Vec<Matrix>, x: NormedSpace, y: NormedSpace, z: NormedSpace) -> Result<BilinearMap> {
        check_dim(z.dim(), slices.len())?;
        for s in &slices {
            check_dim(x.dim(), s.nrows())?;
            check_dim(y.dim(), s.ncols())?;
            if s.iter().any(|v| !v.is_finite()) {
                return Err(LabError::Malformed("bilinear tensor has non-finite entries".into()));
            }
        }
        Ok(BilinearMap { slices, x, y, z, cache: Arc::new(OnceLock::new()) })
    }

    /// Scalar form `B(x, y) = xᵀ M y`.
    pub fn form(m: Matrix, x: NormedSpace, y: NormedSpace) -> Result<BilinearMap> {
        BilinearMap::new(vec![m], x, y, NormedSpace::scalars())
    }

    pub fn form_from_rows(rows: &[Vec<f64>], x: NormedSpace, y: NormedSpace) -> Result<BilinearMap> {
        BilinearMap::form(from_rows(rows)?, x, y)
    }

    pub fn slices(&self) -> &[Matrix] {
        &self.slices
    }

    /// The coefficient matrix of a scalar form.
    pub fn matrix(&self) -> &Matrix {
        &self.slices[0]
    }

    pub fn x_space(&self) -> &NormedSpace {
        &self.x
    }

    pub fn y_space(&self) -> &NormedSpace {
        &self.y
    }

    pub fn z_space(&self) -> &NormedSpace {
        &self.z
    }

    pub fn is_scalar(&self) -> bool {
        self.z.dim() == 1
    }

    pub fn eval(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        check_dim(self.x.dim(), x.len())?;
        check_dim(self.y.dim(), y.len())?;
        Ok(Vector::from_iterator(self.slices.len(), self.slices.iter().map(|m| x.dot(&(m * y)))))
    }

    /// `‖B(x, y)‖_Z`.
    pub fn value_norm(&self, x: &Vector, y: &Vector) -> Result<f64> {
        Ok(self.z.norm_of(self.eval(x, y)?.as_slice()))
    }

    pub fn with_slices(&self, slices: Vec<Matrix>) -> Result<BilinearMap> {
        BilinearMap::new(slices, self.x.clone(), self.y.clone(), self.z.clone())
    }

    pub fn scaled(&self, alpha: f64) -> BilinearMap {
        self.with_slices(self.slices.iter().map(|m| m * alpha).collect()).expect("same shape")
    }

    pub fn minus(&self, other: &BilinearMap) -> Result<BilinearMap> {
        if self.x != other.x || self.y != other.y || self.z != other.z {
            return Err(LabError::Unsupported("difference of bilinear maps on different spaces".into()));
        }
        self.with_slices(self.slices.iter().zip(&other.slices).map(|(a, b)| a - b).collect())
    }

    /// Scalar form `Σ g_k B_k` for a functional `g` on `Z`.
    pub fn compose_functional(&self, g: &Vector) -> Result<BilinearMap> {
        check_dim(self.z.dim(), g.len())?;
        let mut m = Matrix::zeros(self.x.dim(), self.y.dim());
        for (k, s) in self.slices.iter().enumerate() {
            m += s * g[k];
        }
        BilinearMap::form(m, self.x.clone(), self.y.clone())
    }

    /// Norm with the default budget, cached.
    pub fn norm_report(&self) -> &BilinearNorm {
        self.cache.get_or_init(|| compute(self, SearchBudget::default()))
    }

    pub fn norm(&self) -> f64 {
        self.norm_report().value
    }

    /// Seed the cache with a known norm report.
    pub(crate) fn with_known_norm(self, report: BilinearNorm) -> BilinearMap {
        let _ = self.cache.set(report);
        self
    }
}

pub fn bilinear_norm(b: &BilinearMap, budget: SearchBudget) -> BilinearNorm {
    if budget == SearchBudget::default() {
        b.norm_report().clone()
    } else {
        compute(b, budget)
    }
}

fn finish(b: &BilinearMap, x: Vector, y: Vector, method: BilinearNormMethod, certified: bool) -> BilinearNorm {
    let x = canonical_sign(&x);
    let mut y = y;
    let v = b.eval(&x, &y).expect("dims");
    if b.is_scalar() && v[0] < 0.0 {
        y = -y;
    }
    let value = b.value_norm(&x, &y).expect("dims");
    BilinearNorm { value, x: x.iter().copied().collect(), y: y.iter().copied().collect(), method, certified }
}

fn compute(b: &BilinearMap, budget: SearchBudget) -> BilinearNorm {
    let (nx, ny) = (b.x.dim(), b.y.dim());
    if b.slices.iter().all(|m| m.iter().all(|v| *v == 0.0)) {
        let x = b.x.normalize(&basis(nx, 0)).expect("nonzero");
        let y = b.y.normalize(&basis(ny, 0)).expect("nonzero");
        return finish(b, x, y, BilinearNormMethod::Zero, true);
    }
    if b.is_scalar() {
        scalar_norm(b, budget)
    } else {
        vector_norm(b, budget)
    }
}

fn scalar_norm(b: &BilinearMap, budget: SearchBudget) -> BilinearNorm {
    let m = b.matrix();
    let (x_sp, y_sp) = (&b.x, &b.y);
    let (nx, ny) = (x_sp.dim(), y_sp.dim());
    if x_sp.is_hilbert() && y_sp.is_hilbert() {
        let svd = m.clone().svd(true, true);
        let (k, _) = svd.singular_values.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, &s)| if s > acc.1 { (i, s) } else { acc });
        let u = svd.u.expect("requested").column(k).into_owned();
        let v = svd.v_t.expect("requested").row(k).transpose();
        return finish(b, &u / u.norm(), &v / v.norm(), BilinearNormMethod::Spectral, true);
    }
    let unweighted_l1 = |s: &NormedSpace| matches!(s.kind(), crate::spaces::SpaceKind::Lp { p } if *p == 1.0);
    if unweighted_l1(x_sp) && unweighted_l1(y_sp) {
        let (mut bi, mut bj, mut bv) = (0, 0, f64::NEG_INFINITY);
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if m[(i, j)].abs() > bv + 1e-15 {
                    (bi, bj, bv) = (i, j, m[(i, j)].abs());
                }
            }
        }
        return finish(b, basis(m.nrows(), bi), basis(m.ncols(), bj), BilinearNormMethod::Entrywise, true);
    }
    if let Some(vs) = x_sp.ball_vertices() {
        let best = vs
            .iter()
            .map(|v| (y_sp.dual_norm_of((m.transpose() * v).as_slice()), v.clone()))
            .fold(None::<(f64, Vector)>, |acc, c| if acc.as_ref().is_none_or(|a| c.0 > a.0 + 1e-15) { Some(c) } else { acc })
            .expect("vertices");
        let y = y_sp.norming_vector(&(m.transpose() * &best.1)).expect("nonzero");
        return finish(b, best.1, y, BilinearNormMethod::FactorVertices, true);
    }
    if let Some(ws) = y_sp.ball_vertices() {
        let best = ws
            .iter()
            .map(|w| (x_sp.dual_norm_of((m * w).as_slice()), w.clone()))
            .fold(None::<(f64, Vector)>, |acc, c| if acc.as_ref().is_none_or(|a| c.0 > a.0 + 1e-15) { Some(c) } else { acc })
            .expect("vertices");
        let x = x_sp.norming_vector(&(m * &best.1)).expect("nonzero");
        return finish(b, x, best.1, BilinearNormMethod::FactorVertices, true);
    }
    if ny == 2 || nx == 2 {
        let scan_y = ny == 2;
        let ratio = |th: f64| {
            let u = Vector::from_column_slice(&[th.cos(), th.sin()]);
            if scan_y {
                x_sp.dual_norm_of((m * &u).as_slice()) / y_sp.norm_of(u.as_slice())
            } else {
                y_sp.dual_norm_of((m.transpose() * &u).as_slice()) / x_sp.norm_of(u.as_slice())
            }
        };
        let (th, _) = periodic_scan_max(ratio, std::f64::consts::PI, 1024, 4);
        let u = Vector::from_column_slice(&[th.cos(), th.sin()]);
        let (x, y) = if scan_y {
            let y = y_sp.normalize(&u).expect("nonzero");
            (x_sp.norming_vector(&(m * &y)).expect("nonzero image"), y)
        } else {
            let x = x_sp.normalize(&u).expect("nonzero");
            let y = y_sp.norming_vector(&(m.transpose() * &x)).expect("nonzero image");
            (x, y)
        };
        return finish(b, x, y, BilinearNormMethod::PlanarScan, true);
    }
    alternating(b, budget)
}

fn vector_norm(b: &BilinearMap, budget: SearchBudget) -> BilinearNorm {
    if let Some(gens) = b.z.dual().ball_vertices() {
        let mut best: Option<(f64, BilinearNorm)> = None;
        let mut certified = true;
        for g in &gens {
            let r = scalar_norm(&b.compose_functional(g).expect("dims"), budget);
            certified &= r.certified;
            if best.as_ref().is_none_or(|a| r.value > a.0 + 1e-15) {
                best = Some((r.value, r));
            }
        }
        let (_, r) = best.expect("generators");
        let (x, y) = r.witness();
        return finish(b, x, y, BilinearNormMethod::DualGenerators, certified);
    }
    for (use_x, vs) in [(true, b.x.ball_vertices()), (false, b.y.ball_vertices())] {
        let Some(vs) = vs else { continue };
        let mut best: Option<(f64, Vector, Vector)> = None;
        let mut certified = true;
        for v in vs {
            let rows: Vec<Vector> = b.slices.iter().map(|m| if use_x { m.transpose() * &v } else { m * &v }).collect();
            let (dom, n) = if use_x { (b.y.clone(), b.y.dim()) } else { (b.x.clone(), b.x.dim()) };
            let mat = Matrix::from_fn(rows.len(), n, |k, j| rows[k][j]);
            let t = Operator::new(mat, dom, b.z.clone()).expect("dims");
            let r = op_norm(&t, budget);
            certified &= r.certified();
            if best.as_ref().is_none_or(|a| r.value > a.0 + 1e-15) {
                best = Some((r.value, v, r.point()));
            }
        }
        let (_, v, w) = best.expect("vertices");
        let (x, y) = if use_x { (v, w) } else { (w, v) };
        return finish(b, x, y, BilinearNormMethod::FactorVertices, certified);
    }
    alternating(b, budget)
}

/// Alternating maximization from axis starts plus seeded random starts.
pub(crate) fn alternating(b: &BilinearMap, budget: SearchBudget) -> BilinearNorm {
    let (nx, ny) = (b.x.dim(), b.y.dim());
    let mut r = rng(budget.seed ^ 0xb111);
    let mut starts: Vec<(Vector, Vector)> = Vec::new();
    for i in 0..nx {
        for j in 0..ny {
            starts.push((basis(nx, i), basis(ny, j)));
        }
    }
    for _ in 0..16 {
        starts.push((gaussian(nx, &mut r), gaussian(ny, &mut r)));
    }
    let mut best: Option<(f64, Vector, Vector)> = None;
    for (x, y) in starts {
        let (Ok(mut x), Ok(mut y)) = (b.x.normalize(&x), b.y.normalize(&y)) else { continue };
        let mut v = b.value_norm(&x, &y).expect("dims");
        for _ in 0..200 {
            let val = b.eval(&x, &y).expect("dims");
            let zstar = if b.is_scalar() {
                Vector::from_element(1, if val[0] < 0.0 { -1.0 } else { 1.0 })
            } else {
                match b.z.duality_map(&val) {
                    Ok(j) => j,
                    Err(_) => b.z.dual().normalize(&gaussian(b.z.dim(), &mut r)).expect("nonzero"),
                }
            };
            let f = b.compose_functional(&zstar).expect("dims");
            let m = f.matrix();
            let Ok(y2) = b.y.norming_vector(&(m.transpose() * &x)) else { break };
            let Ok(x2) = b.x.norming_vector(&(m * &y2)) else { break };
            let v2 = b.value_norm(&x2, &y2).expect("dims");
            let improved = v2 > v * (1.0 + 1e-12);
            if v2 >= v {
                x = x2;
                y = y2;
                v = v2;
            }
            if !improved {
                break;
            }
        }
        if best.as_ref().is_none_or(|a| v > a.0 + 1e-15) {
            best = Some((v, x, y));
        }
    }
    let (_, x, y) = best.unwrap_or_else(|| (0.0, basis(nx, 0), basis(ny, 0)));
    finish(b, x, y, BilinearNormMethod::Alternating, false)
}

/// The operator `x ↦ B(x, ·)` from `X` into `Y*`.
pub fn op_from_bilinear(b: &BilinearMap) -> Result<Operator> {
    if !b.is_scalar() {
        return Err(LabError::Unsupported("operator identification needs a scalar form".into()));
    }
    Operator::new(b.matrix().transpose(), b.x.clone(), b.y.dual().clone())
}

/// The form `(x, y) ↦ T(x)(y)` of an operator into `Y*`.
pub fn bilinear_from_op(t: &Operator) -> Result<BilinearMap> {
    BilinearMap::form(t.matrix().transpose(), t.domain().clone(), t.codomain().dual().clone())
}

/// Radial retraction onto the unit ball of forms.
pub fn retract_to_ball(c: &BilinearMap) -> BilinearMap {
    let rep = c.norm_report();
    if rep.value <= 1.0 {
        return c.clone();
    }
    let r = c.scaled(1.0 / rep.value);
    let mut known = rep.clone();
    known.value = 1.0;
    r.with_known_norm(known)
}

/// A finite family of scalar forms indexed by the points of `K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FormFieldRepr", into = "FormFieldRepr")]
pub struct FormField {
    points: Vec<String>,
    forms: Vec<BilinearMap>,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FormFieldRepr {
    points: Vec<String>,
    x: NormedSpace,
    y: NormedSpace,
    forms: Vec<Vec<Vec<f64>>>,
}

impl TryFrom<FormFieldRepr> for FormField {
    type Error = LabError;
    fn try_from(r: FormFieldRepr) -> Result<FormField> {
        let forms = r.forms.iter().map(|m| BilinearMap::form_from_rows(m, r.x.clone(), r.y.clone())).collect::<Result<Vec<_>>>()?;
        FormField::new(r.points, forms)
    }
}

impl From<FormField> for FormFieldRepr {
    fn from(f: FormField) -> FormFieldRepr {
        FormFieldRepr {
            x: f.forms[0].x.clone(),
            y: f.forms[0].y.clone(),
            forms: f.forms.iter().map(|b| to_rows(b.matrix())).collect(),
            points: f.points,
        }
    }
}

impl FormField {
    pub fn new(points: Vec<String>, forms: Vec<BilinearMap>) -> Result<FormField> {
        if forms.is_empty() {
            return Err(LabError::Malformed("form field needs at least one point".into()));
        }
        check_dim(forms.len(), points.len())?;
        for f in &forms {
            if !f.is_scalar() || f.x != forms[0].x || f.y != forms[0].y {
                return Err(LabError::Malformed("form field members must be scalar forms on common spaces".into()));
            }
        }
        Ok(FormField { points, forms })
    }

    /// Points labeled `t1 … tm`.
    pub fn labeled(forms: Vec<BilinearMap>) -> Result<FormField> {
        let points = (1..=forms.len()).map(|j| format!("t{j}")).collect();
        FormField::new(points, forms)
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn forms(&self) -> &[BilinearMap] {
        &self.forms
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    /// `(A(x, y)(t_j))_j`.
    pub fn eval(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        let vals = self.forms.iter().map(|f| f.eval(x, y).map(|v| v[0])).collect::<Result<Vec<_>>>()?;
        Ok(Vector::from_vec(vals))
    }

    /// `max_j ‖φ(t_j)‖`, with the index attaining it.
    pub fn norm_with_index(&self) -> (f64, usize) {
        self.forms.iter().enumerate().map(|(j, f)| (f.norm(), j)).fold((f64::NEG_INFINITY, 0), |a, c| if c.0 > a.0 { c } else { a })
    }

    pub fn norm(&self) -> f64 {
        self.norm_with_index().0
    }

    pub fn certified_norm(&self) -> bool {
        self.forms.iter().all(|f| f.norm_report().certified)
    }

    /// `max_j ‖φ_j − ψ_j‖`.
    pub fn distance(&self, other: &FormField) -> Result<f64> {
        check_dim(self.len(), other.len())?;
        self.forms.iter().zip(&other.forms).map(|(a, b)| a.minus(b).map(|d| d.norm())).try_fold(0.0f64, |m, d| d.map(|d| m.max(d)))
    }

    /// The same field as a bilinear map into `ℓ∞^m`.
    pub fn to_bilinear(&self) -> BilinearMap {
        let f0 = &self.forms[0];
        BilinearMap::new(self.forms.iter().map(|f| f.matrix().clone()).collect(), f0.x.clone(), f0.y.clone(), NormedSpace::linf(self.len()))
            .expect("common spaces")
    }
}
