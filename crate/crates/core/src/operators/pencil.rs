//! A two-parameter family of operators that all attain their norm at a given point.
//!
//! With `y₁ = T x₀/‖T x₀‖`, a functional `ψ` norming `y₁` and a support functional `J` at
//! `x₀`, every member of
//!
//! `S(κ, μ) = y₁⊗J + κ·(T − y₁⊗ψ∘T) + μ·y₁⊗(ψ∘T − ‖T x₀‖·J)`
//!
//! maps `x₀` to `y₁`. `S(0,0)` has norm one, `S(1,1) = T + (1 − ‖T x₀‖)·y₁⊗J`, and both
//! `‖S(κ,μ)‖` and `‖S(κ,μ) − T‖` are convex in `(κ, μ)`.

use super::{op_norm, Operator};
use crate::error::{LabError, Result};
use crate::linalg::{basis, outer, Matrix, Vector};
use crate::search::{pattern_search, SearchBudget};

#[derive(Clone, Debug)]
pub struct PencilResult {
    /// Unit-norm operator attaining at `x₀`.
    pub operator: Operator,
    pub distance: f64,
    pub kappa: f64,
    pub mu: f64,
    /// Whether every norm used came from an exact path.
    pub certified: bool,
}

/// Nearest member of the attaining pencil with `‖S‖ = 1`, found by a grid over
/// `[0,1]²` followed by a feasibility-constrained pattern search.
pub fn attaining_pencil(t: &Operator, x0: &Vector, j: &Vector, budget: SearchBudget) -> Result<PencilResult> {
    let dom = t.domain();
    let cod = t.codomain();
    let tx0 = t.apply(x0)?;
    let ntx0 = cod.norm_of(tx0.as_slice());
    let y1 = if ntx0 > 1e-14 {
        &tx0 / ntx0
    } else {
        let w = t.norm_report().point();
        cod.normalize(&t.apply(&w)?).or_else(|_| cod.normalize(&basis(cod.dim(), 0)))?
    };
    if (j.dot(x0) - 1.0).abs() > 1e-9 || (dom.dual_norm(j)? - 1.0).abs() > 1e-9 {
        return Err(LabError::Unsupported("pencil needs a norm-one functional attaining 1 at the point".into()));
    }
    let psi = cod.duality_map(&y1)?;
    let m = t.matrix();
    let a0 = outer(&y1, j);
    let psi_t = m.transpose() * &psi;
    let b = m - outer(&y1, &psi_t);
    let c = outer(&y1, &(&psi_t - j * ntx0));
    let member = |k: f64, u: f64| -> Matrix { &a0 + &b * k + &c * u };
    let mut certified = true;
    let mut eval = |k: f64, u: f64| -> (f64, f64) {
        let s = t.with_matrix(member(k, u)).expect("same shape");
        let ns = op_norm(&s, SearchBudget::default());
        let d = op_norm(&s.minus(t).expect("same spaces"), SearchBudget::default());
        certified &= ns.certified() && d.certified();
        (ns.value, d.value)
    };
    const TOL: f64 = 1e-12;
    let mut best = (0.0, 0.0, eval(0.0, 0.0).1);
    let (n11, d11) = eval(1.0, 1.0);
    if n11 <= 1.0 + TOL {
        best = (1.0, 1.0, d11);
    } else {
        for i in 0..=10 {
            for k in 0..=10 {
                let (kk, uu) = (i as f64 / 10.0, k as f64 / 10.0);
                let (n, d) = eval(kk, uu);
                if n <= 1.0 + TOL && d < best.2 {
                    best = (kk, uu, d);
                }
            }
        }
        let objective = |p: &[f64]| {
            if p.iter().any(|v| !(-0.5..=1.5).contains(v)) {
                return f64::INFINITY;
            }
            let (n, d) = eval(p[0], p[1]);
            if n <= 1.0 + TOL {
                d
            } else {
                f64::INFINITY
            }
        };
        let (p, d) = pattern_search(objective, &[best.0, best.1], 0.05, 1e-7, budget.iterations.max(50));
        if d < best.2 {
            best = (p[0], p[1], d);
        }
    }
    let s = t.with_matrix(member(best.0, best.1))?;
    let ns = op_norm(&s, SearchBudget::default());
    let s = s.scaled(1.0 / ns.value);
    let dist = op_norm(&s.minus(t)?, SearchBudget::default());
    certified &= ns.certified() && dist.certified();
    Ok(PencilResult { operator: s, distance: dist.value, kappa: best.0, mu: best.1, certified })
}
