//! Coupling Dirac structures described by a triple `(H, ω, π)`: a
//! horizontal frame, a horizontal two-form and a vertical bivector.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::expr::Dual;
use crate::fields::{lie_bracket, BivectorField, MapField, TwoFormField, VectorField};
use crate::linalg::{self, DEFAULT_TOL};

use super::{is_dirac, DiracFrame, DiracReport, Kind};

/// Coupling data for a submersion `s: ℝⁿ → ℝᵏ`.
#[derive(Clone, Debug)]
pub struct CouplingTriple {
    pub s: MapField,
    /// `n − k` vector fields spanning the horizontal distribution `H`.
    pub h: Vec<VectorField>,
    pub w: TwoFormField,
    pub pi: BivectorField,
}

impl CouplingTriple {
    pub fn new(s: MapField, h: Vec<VectorField>, w: TwoFormField, pi: BivectorField) -> Result<Self> {
        let n = s.src_dim();
        let k = s.dst_dim();
        if k > n || h.len() != k {
            return Err(Error::DimensionMismatch(format!(
                "a submersion ℝ^{n} → ℝ^{k} needs {k} horizontal fields, got {}",
                h.len()
            )));
        }
        if h.iter().any(|v| v.dim() != n) || w.dim() != n || pi.dim() != n {
            return Err(Error::DimensionMismatch(format!("coupling data must live on ℝ^{n}")));
        }
        Ok(CouplingTriple { s, h, w, pi })
    }

    /// The frame `{v + ι_v ω : v ∈ H} ⊕ {ξ + π♯ξ : ξ ∈ H°}` on `domain`.
    pub fn frame(&self, domain: &BoxDomain) -> Result<DiracFrame> {
        let n = self.s.src_dim();
        let kind = Kind::Coupling { h: self.h.clone(), w: self.w.clone(), pi: self.pi.clone(), piv: Vec::new() };
        DiracFrame::build(n, kind)?.with_domain(domain.clone())
    }
}

/// Largest residual of one condition over the grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionResult {
    pub pass: bool,
    pub max_residual: f64,
    pub worst_point: Option<Vec<f64>>,
}

impl ConditionResult {
    fn new() -> Self {
        ConditionResult { pass: true, max_residual: 0.0, worst_point: None }
    }

    fn record(&mut self, r: f64, p: &[f64]) {
        if r > self.max_residual || self.worst_point.is_none() {
            self.max_residual = self.max_residual.max(r);
            self.worst_point = Some(p.to_vec());
        }
    }

    fn close(&mut self, tol: f64) {
        self.pass = self.max_residual <= tol;
    }
}

/// Outcome of [`coupling_verify`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CouplingReport {
    /// `TΣ = H ⊕ V`, `ι_V ω = 0` and `π♯(T*Σ) ⊂ V`.
    pub invariants: ConditionResult,
    /// `[π, π] = 0`.
    pub a: ConditionResult,
    /// `ℒ_u π ∈ Γ(H ∧ TΣ)` for `u ∈ Γ(H)`.
    pub b: ConditionResult,
    /// `[u₁, u₂] − π♯(dω(u₁, u₂, ·)) ∈ Γ(H)`.
    pub c: ConditionResult,
    /// `dω(u₁, u₂, u₃) = 0`.
    pub d: ConditionResult,
    pub all_pass: bool,
    /// Involutivity of the assembled frame.
    pub dirac: DiracReport,
    /// Whether `all_pass` agrees with `dirac.pass`.
    pub agree: bool,
}

fn contract_vec(m: &DMatrix<f64>, xi: &DVector<f64>) -> DVector<f64> {
    m.transpose() * xi
}

struct PointResiduals {
    inv: f64,
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

fn residuals_at(t: &CouplingTriple, p: &[f64]) -> Result<PointResiduals> {
    let n = t.s.src_dim();
    let ds = t.s.jacobian(p)?;
    let vb = linalg::null(&ds, DEFAULT_TOL);
    let hm = DMatrix::from_columns(&t.h.iter().map(|v| v.at(p)).collect::<Result<Vec<_>>>()?);
    let wm = t.w.at(p)?;
    let pm = t.pi.at(p)?;
    let split: f64 = if linalg::rank(&linalg::hcat(&hm, &vb), DEFAULT_TOL) == n { 0.0 } else { 1.0 };
    let inv = split.max(linalg::max_abs(&(&wm * &vb))).max(linalg::max_abs(&(&ds * &pm)));

    // (a) Jacobi expression of π from its first jet
    let pj = t.pi.eval(&Dual::seed(p))?;
    let (pv, dp) = (|i: usize, j: usize| pj[i][j].v, |i: usize, j: usize, l: usize| pj[i][j].part(l));
    let mut a: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let s: f64 = (0..n)
                    .map(|l| pv(i, l) * dp(j, k, l) + pv(j, l) * dp(k, i, l) + pv(k, l) * dp(i, j, l))
                    .sum();
                a = a.max(s.abs());
            }
        }
    }

    // (b) ℒ_u π evaluated on pairs from H°
    let ann = linalg::null(&hm.transpose(), DEFAULT_TOL);
    let mut b: f64 = 0.0;
    for h in &t.h {
        let (hv, dh) = h.jet(p)?;
        let lie = DMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|l| hv[l] * dp(i, j, l) - pv(l, j) * dh[i][l] - pv(i, l) * dh[j][l]).sum::<f64>()
        });
        b = b.max(linalg::max_abs(&(ann.transpose() * lie * &ann)));
    }

    // (c), (d) on pairs and triples of the horizontal frame
    let q = linalg::orth(&hm, DEFAULT_TOL);
    let dw = t.w.d_at(p)?;
    let hvals: Vec<Vec<f64>> = (0..hm.ncols()).map(|j| hm.column(j).iter().copied().collect()).collect();
    let (mut c, mut d): (f64, f64) = (0.0, 0.0);
    for x in 0..t.h.len() {
        for y in x + 1..t.h.len() {
            let xi = DVector::from_vec(dw.contract(&hvals[x], &hvals[y]));
            let v = lie_bracket(&t.h[x], &t.h[y], p)? - contract_vec(&pm, &xi);
            c = c.max((&v - &q * (q.transpose() * &v)).amax());
            for z in y + 1..t.h.len() {
                d = d.max(xi.dot(&DVector::from_column_slice(&hvals[z])).abs());
            }
        }
    }
    Ok(PointResiduals { inv, a, b, c, d })
}

/// Evaluates the involutivity conditions (a)–(d) of a coupling triple on
/// `grid` and cross-checks them against the Courant tensor of the
/// assembled frame.
pub fn coupling_verify(t: &CouplingTriple, domain: &BoxDomain, grid: &[Vec<f64>], tol: f64) -> Result<CouplingReport> {
    let mut inv = ConditionResult::new();
    let (mut a, mut b, mut c, mut d) = (ConditionResult::new(), ConditionResult::new(), ConditionResult::new(), ConditionResult::new());
    for p in grid {
        let r = residuals_at(t, p)?;
        inv.record(r.inv, p);
        a.record(r.a, p);
        b.record(r.b, p);
        c.record(r.c, p);
        d.record(r.d, p);
    }
    for x in [&mut inv, &mut a, &mut b, &mut c, &mut d] {
        x.close(tol);
    }
    let dirac = is_dirac(&t.frame(domain)?, grid, tol);
    let all_pass = inv.pass && a.pass && b.pass && c.pass && d.pass;
    let agree = all_pass == dirac.pass;
    Ok(CouplingReport { invariants: inv, a, b, c, d, all_pass, dirac, agree })
}
