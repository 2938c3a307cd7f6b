//! Dirac structures on coordinate patches, held as Lagrangian frames of
//! sections of 𝕋M, with involutivity tests and the push-forward family
//! `Lˢ = L ∩ V^⊥ + V` of a submersion.
//!
//! Frames are evaluated generically over [`Scalar`]; evaluating on dual
//! numbers gives the first jets needed for brackets.

mod coupling;
mod family;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::expr::{Dual, Scalar};
use crate::fields::{
    dorfman_from_jets, BivectorField, MapField, SectionField, SectionJet, Tensor3, ThreeFormField, TwoFormField,
};
use crate::lindirac::{isotropy_residual, LagrangianSubspace, SplitVector, Subspace};
use crate::linalg::{self, kernel_and_section, pivot_columns, DEFAULT_TOL};

pub use coupling::{coupling_verify, ConditionResult, CouplingReport, CouplingTriple};
pub use family::{
    basic_check, constant_fibre_section, family_courant, family_jump, family_ls, pushforward_family, rank_profile,
    BasicReport, RankProfile, RankRow, Recovered, FAMILY_STEP,
};

/// Values `(u, ξ)` of the `n` frame sections at a point.
pub type FrameValues<S> = Vec<(Vec<S>, Vec<S>)>;

#[derive(Clone, Debug)]
enum Kind {
    Sections(Vec<SectionField>),
    /// `ker ds ⊕ im dsᵀ`.
    Foliation { s: MapField, piv: Vec<usize> },
    /// `s^!(L_M)`: lifts of the target frame plus a kernel frame.
    Pullback { s: MapField, piv: Vec<usize>, target: Box<DiracFrame> },
    /// `R_B(L)`.
    Gauge { b: TwoFormField, base: Box<DiracFrame> },
    /// `{v + ι_v ω : v ∈ H} ⊕ {ξ + π♯ξ : ξ ∈ H°}`.
    Coupling { h: Vec<crate::fields::VectorField>, w: TwoFormField, pi: BivectorField, piv: Vec<usize> },
}

/// A frame `e₁, …, eₙ` of a Lagrangian family over a box in ℝⁿ.
#[derive(Clone, Debug)]
pub struct DiracFrame {
    n: usize,
    kind: Kind,
    domain: BoxDomain,
}

fn rank_drop<S: Scalar>(p: &[S], msg: &str) -> Error {
    Error::RankDrop { point: p.iter().map(Scalar::re).collect(), msg: msg.into() }
}

fn jac_matrix(rows: &[Vec<f64>], cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j])
}

impl DiracFrame {
    /// A frame given by `n` explicit sections over `[-1, 1]ⁿ`.
    pub fn new(sections: Vec<SectionField>) -> Result<Self> {
        let n = sections.len();
        if let Some(s) = sections.iter().find(|s| s.dim() != n) {
            return Err(Error::DimensionMismatch(format!("{n} sections of 𝕋ℝ^{}", s.dim())));
        }
        Ok(DiracFrame { n, kind: Kind::Sections(sections), domain: BoxDomain::cube(n, 1.0) })
    }

    fn build(n: usize, kind: Kind) -> Result<Self> {
        let mut f = DiracFrame { n, kind, domain: BoxDomain::cube(n, 1.0) };
        f.choose_pivots()?;
        Ok(f)
    }

    /// Restricts the frame to `domain`; pivot choices are redone at its center.
    pub fn with_domain(mut self, domain: BoxDomain) -> Result<Self> {
        if domain.dim() != self.n {
            return Err(Error::DimensionMismatch(format!("box of dimension {} for a frame on ℝ^{}", domain.dim(), self.n)));
        }
        self.domain = domain;
        self.choose_pivots()?;
        Ok(self)
    }

    fn choose_pivots(&mut self) -> Result<()> {
        let c = self.domain.center();
        let n = self.n;
        match &mut self.kind {
            Kind::Foliation { s, piv } | Kind::Pullback { s, piv, .. } => {
                let (_, jac) = s.jet(&c)?;
                *piv = pivot_columns(&jac_matrix(&jac, n), DEFAULT_TOL)
                    .ok_or_else(|| rank_drop(&c, "ds is not surjective at the box center"))?;
            }
            Kind::Coupling { h, piv, .. } => {
                let rows = h.iter().map(|v| v.eval(&c)).collect::<Result<Vec<_>>>()?;
                *piv = pivot_columns(&jac_matrix(&rows, n), DEFAULT_TOL)
                    .ok_or_else(|| rank_drop(&c, "horizontal frame is degenerate at the box center"))?;
            }
            Kind::Sections(_) | Kind::Gauge { .. } => {}
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    /// The default sample grid: five points per axis on the domain.
    pub fn default_grid(&self) -> Vec<Vec<f64>> {
        self.domain.grid(5)
    }

    /// The explicit sections, when the frame was given by them.
    pub fn sections(&self) -> Option<&[SectionField]> {
        match &self.kind {
            Kind::Sections(s) => Some(s),
            _ => None,
        }
    }

    /// Frame values at `p` over any scalar type.
    pub fn eval<S: Scalar>(&self, p: &[S]) -> Result<FrameValues<S>> {
        if p.len() != self.n {
            return Err(Error::DimensionMismatch(format!("point has {} coordinates, frame lives on ℝ^{}", p.len(), self.n)));
        }
        let n = self.n;
        match &self.kind {
            Kind::Sections(secs) => secs.iter().map(|s| s.eval(p)).collect(),
            Kind::Foliation { s, piv } => {
                let (_, jac) = s.jet(p)?;
                let (ker, _) = kernel_and_section(&jac, n, piv).ok_or_else(|| rank_drop(p, "ds lost rank"))?;
                let mut out: FrameValues<S> = ker.into_iter().map(|v| (v, vec![S::zero(); n])).collect();
                out.extend(jac.into_iter().map(|row| (vec![S::zero(); n], row)));
                Ok(out)
            }
            Kind::Pullback { s, piv, target } => {
                let (q, jac) = s.jet(p)?;
                let (ker, sec) = kernel_and_section(&jac, n, piv).ok_or_else(|| rank_drop(p, "ds lost rank"))?;
                let k = jac.len();
                let mut out = Vec::with_capacity(n);
                for (v, xi) in target.eval(&q)? {
                    let u = (0..n).map(|i| (0..k).fold(S::zero(), |a, c| a + sec[c][i].clone() * v[c].clone())).collect();
                    let eta = (0..n).map(|i| (0..k).fold(S::zero(), |a, b| a + jac[b][i].clone() * xi[b].clone())).collect();
                    out.push((u, eta));
                }
                out.extend(ker.into_iter().map(|v| (v, vec![S::zero(); n])));
                Ok(out)
            }
            Kind::Gauge { b, base } => {
                let m = b.eval(p)?;
                let vals = base.eval(p)?;
                Ok(vals.into_iter().map(|(u, xi)| {
                    let eta = (0..n)
                        .map(|j| (0..n).fold(xi[j].clone(), |a, i| a + u[i].clone() * m[i][j].clone()))
                        .collect();
                    (u, eta)
                })
                .collect())
            }
            Kind::Coupling { h, w, pi, piv } => {
                let hv = h.iter().map(|v| v.eval(p)).collect::<Result<Vec<_>>>()?;
                let (ann, _) =
                    kernel_and_section(&hv, n, piv).ok_or_else(|| rank_drop(p, "horizontal frame lost rank"))?;
                let wm = w.eval(p)?;
                let pm = pi.eval(p)?;
                let contract = |v: &[S], m: &[Vec<S>]| -> Vec<S> {
                    (0..n).map(|j| (0..n).fold(S::zero(), |a, i| a + v[i].clone() * m[i][j].clone())).collect()
                };
                let mut out: FrameValues<S> = hv.iter().map(|u| (u.clone(), contract(u, &wm))).collect();
                out.extend(ann.into_iter().map(|xi| (contract(&xi, &pm), xi)));
                Ok(out)
            }
        }
    }

    /// Frame values at `p`.
    pub fn at(&self, p: &[f64]) -> Result<Vec<SplitVector>> {
        self.eval(p)?
            .into_iter()
            .map(|(u, xi)| SplitVector::from_slices(&u, &xi))
            .collect()
    }

    /// First jets of the frame sections at `p`.
    pub fn jets(&self, p: &[f64]) -> Result<Vec<SectionJet<f64>>> {
        let n = self.n;
        Ok(self.eval(&Dual::seed(p))?.into_iter().map(|(u, xi)| SectionJet::from_duals(u, xi, n)).collect())
    }

    /// `2n × n` matrix whose columns are the frame values at `p`.
    pub fn matrix(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let vals = self.eval(p)?;
        let n = self.n;
        Ok(DMatrix::from_fn(2 * n, n, |i, j| if i < n { vals[j].0[i] } else { vals[j].1[i - n] }))
    }

    /// Span of the frame at `p`; a rank below `n` is an error.
    pub fn subspace(&self, p: &[f64]) -> Result<Subspace> {
        let s = Subspace::from_columns(&self.matrix(p)?, DEFAULT_TOL)?;
        if s.dim() < self.n {
            return Err(rank_drop(p, &format!("frame has rank {} < {}", s.dim(), self.n)));
        }
        Ok(s)
    }

    /// `L_p` as a validated Lagrangian subspace.
    pub fn lagrangian(&self, p: &[f64]) -> Result<LagrangianSubspace> {
        LagrangianSubspace::new(self.subspace(p)?)
    }
}

/// `Gr(ω)`: frame `eᵢ = ∂ᵢ + ι_{∂ᵢ}ω`.
pub fn graph_two_form(w: &TwoFormField) -> DiracFrame {
    let n = w.dim();
    let secs = (0..n)
        .map(|i| SectionField { vf: crate::fields::VectorField::coordinate(i, n), of: w.contract_coordinate(i) })
        .collect();
    DiracFrame { n, kind: Kind::Sections(secs), domain: BoxDomain::cube(n, 1.0) }
}

/// `Gr(π)`: frame `eᵢ = π♯(dxⁱ) + dxⁱ` with `π♯ξ = π(ξ, ·)`.
pub fn graph_bivector(pi: &BivectorField) -> DiracFrame {
    let n = pi.dim();
    let secs = (0..n)
        .map(|i| SectionField { vf: pi.sharp_coordinate(i), of: unit_form(i, n) })
        .collect();
    DiracFrame { n, kind: Kind::Sections(secs), domain: BoxDomain::cube(n, 1.0) }
}

fn unit_form(i: usize, n: usize) -> crate::fields::OneFormField {
    let comps = (0..n).map(|k| crate::expr::Expr::constant(if k == i { 1.0 } else { 0.0 }, n)).collect();
    crate::fields::OneFormField::new(comps).expect("consistent dimensions")
}

fn check_submersion_shape(s: &MapField) -> Result<()> {
    if s.dst_dim() > s.src_dim() {
        return Err(Error::Invalid(format!(
            "a map ℝ^{} → ℝ^{} cannot be a submersion",
            s.src_dim(),
            s.dst_dim()
        )));
    }
    Ok(())
}

/// The Dirac structure `T𝓕 ⊕ N*𝓕` of the foliation by the fibres of `s`.
pub fn foliation_dirac(s: &MapField) -> Result<DiracFrame> {
    check_submersion_shape(s)?;
    DiracFrame::build(s.src_dim(), Kind::Foliation { s: s.clone(), piv: Vec::new() })
}

/// `s^!(L_M) = {u + s*ξ : s_*u + ξ ∈ L_M}` for a submersion `s`.
pub fn pullback_dirac(s: &MapField, target: &DiracFrame) -> Result<DiracFrame> {
    check_submersion_shape(s)?;
    if s.dst_dim() != target.dim() {
        return Err(Error::DimensionMismatch(format!(
            "map lands in ℝ^{}, structure lives on ℝ^{}",
            s.dst_dim(),
            target.dim()
        )));
    }
    DiracFrame::build(s.src_dim(), Kind::Pullback { s: s.clone(), piv: Vec::new(), target: Box::new(target.clone()) })
}

/// The gauge transform `R_B(L) = {u + ξ + ι_u B}`.
pub fn gauge_dirac(b: &TwoFormField, base: &DiracFrame) -> Result<DiracFrame> {
    if b.dim() != base.dim() {
        return Err(Error::DimensionMismatch(format!("two-form on ℝ^{}, frame on ℝ^{}", b.dim(), base.dim())));
    }
    Ok(DiracFrame { n: base.n, kind: Kind::Gauge { b: b.clone(), base: Box::new(base.clone()) }, domain: base.domain.clone() })
}

pub(crate) fn antisymmetrize(t: &Tensor3<f64>) -> Tensor3<f64> {
    Tensor3::from_fn(t.dim(), |i, j, k| {
        (t.get(i, j, k) + t.get(j, k, i) + t.get(k, i, j) - t.get(j, i, k) - t.get(i, k, j) - t.get(k, j, i)) / 6.0
    })
}

/// The Courant tensor `Υ(eᵢ, eⱼ, eₖ) = ⟨[eᵢ, eⱼ], eₖ⟩` on the frame at `p`,
/// antisymmetrized.
pub fn courant_tensor(l: &DiracFrame, p: &[f64]) -> Result<Tensor3<f64>> {
    courant_tensor_twisted(l, None, p)
}

/// Courant tensor for the `φ`-twisted bracket (plain bracket when `None`).
pub fn courant_tensor_twisted(l: &DiracFrame, phi: Option<&ThreeFormField>, p: &[f64]) -> Result<Tensor3<f64>> {
    let jets = l.jets(p)?;
    let n = l.n;
    let phv = phi.map(|f| f.at(p)).transpose()?;
    let pair = |a: &(Vec<f64>, Vec<f64>), e: &SectionJet<f64>| -> f64 {
        (0..n).map(|i| a.0[i] * e.xi[i] + a.1[i] * e.u[i]).sum()
    };
    let mut raw = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            let mut br = dorfman_from_jets(&jets[i], &jets[j]);
            if let Some(t) = &phv {
                for (c, x) in br.1.iter_mut().zip(t.contract(&jets[i].u, &jets[j].u)) {
                    *c += x;
                }
            }
            for k in 0..n {
                raw[(i * n + j) * n + k] = pair(&br, &jets[k]);
            }
        }
    }
    Ok(antisymmetrize(&Tensor3::from_fn(n, |i, j, k| raw[(i * n + j) * n + k])))
}

/// Outcome of [`is_dirac`] on a sample grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiracReport {
    pub pass: bool,
    /// Lagrangian with full rank at every sample point.
    pub lagrangian: bool,
    pub max_isotropy: f64,
    pub max_courant: f64,
    /// Point of the largest Courant entry (or of the first failure).
    pub worst_point: Option<Vec<f64>>,
    pub points: usize,
    /// First evaluation failure, if any.
    pub failure: Option<String>,
}

/// Checks Lagrangian rank and `max |Υ|` over `grid`.
pub fn is_dirac(l: &DiracFrame, grid: &[Vec<f64>], tol: f64) -> DiracReport {
    is_dirac_twisted(l, None, grid, tol)
}

/// [`is_dirac`] for the `φ`-twisted bracket.
pub fn is_dirac_twisted(l: &DiracFrame, phi: Option<&ThreeFormField>, grid: &[Vec<f64>], tol: f64) -> DiracReport {
    let mut rep = DiracReport {
        pass: true,
        lagrangian: true,
        max_isotropy: 0.0,
        max_courant: 0.0,
        worst_point: None,
        points: grid.len(),
        failure: None,
    };
    for p in grid {
        let step = (|| -> Result<(f64, f64)> {
            let s = l.subspace(p)?;
            let iso = isotropy_residual(&s);
            let c = courant_tensor_twisted(l, phi, p)?.max_abs();
            Ok((iso, c))
        })();
        match step {
            Ok((iso, c)) => {
                rep.max_isotropy = rep.max_isotropy.max(iso);
                if iso > tol.max(1e-9) {
                    rep.lagrangian = false;
                }
                if c > rep.max_courant || rep.worst_point.is_none() {
                    if rep.failure.is_none() {
                        rep.worst_point = Some(p.clone());
                    }
                    rep.max_courant = rep.max_courant.max(c);
                }
            }
            Err(e) => {
                rep.lagrangian = false;
                if rep.failure.is_none() {
                    rep.failure = Some(e.to_string());
                    rep.worst_point = Some(p.clone());
                }
            }
        }
    }
    rep.pass = rep.lagrangian && rep.failure.is_none() && rep.max_courant <= tol;
    rep
}

/// Jacobian `ds(p)` of a submersion, with a rank check.
pub(crate) fn submersion_jacobian(s: &MapField, p: &[f64]) -> Result<DMatrix<f64>> {
    let ds = s.jacobian(p)?;
    if linalg::rank(&ds, DEFAULT_TOL) < ds.nrows() {
        return Err(rank_drop(p, "ds is not surjective"));
    }
    Ok(ds)
}

#[cfg(test)]
mod tests;
