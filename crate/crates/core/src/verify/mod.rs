//! Pair-level verdicts for diagrams `(M₀, L₀) ← (Σ, Gr(ω)) → (M₁, −L₁)`:
//! weak dual pairs, dual pairs, pre-dual pairs, the equivalent
//! characterizations, composition, reduction, Poisson legs and transverse
//! pullback.
//!
//! Throughout `V = ker ds`, `W = ker dt` and `K = ker ω`. Fibre products are
//! never solved for: callers supply explicit charts, which are validated.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dirac::DiracFrame;
use crate::domain::{BoxDomain, DEFAULT_SEED};
use crate::error::{Error, Result};
use crate::fields::{MapField, Tensor3, TwoFormField};
use crate::lindirac::{
    as_tangent, form_kernel, form_pairing_residual, gauge_lagrangian, graph_of_form, map_kernel, omega_orthogonal,
    pullback_pt, pushforward_pt, rescale, split_basis, LagrangianSubspace, Subspace,
};
use crate::linalg::{self, DEFAULT_TOL};
use crate::realization::RealizationPair;

/// Central-difference step for numerical exterior derivatives.
pub const FD_STEP: f64 = 1e-4;

/// Default number of random samples per verdict.
pub const DEFAULT_SAMPLES: usize = 100;

/// Values and first derivatives of `s`, `t` and `ω` at a point of `Σ`.
#[derive(Clone, Debug)]
pub struct PairPoint {
    pub s: DVector<f64>,
    pub ds: DMatrix<f64>,
    pub t: DVector<f64>,
    pub dt: DMatrix<f64>,
    pub omega: DMatrix<f64>,
}

/// The maps and form of a diagram `M₀ ← Σ → M₁`.
pub trait PairGeometry {
    fn sigma_dim(&self) -> usize;
    fn m0_dim(&self) -> usize;
    fn m1_dim(&self) -> usize;
    fn point(&self, q: &[f64]) -> Result<PairPoint>;

    fn omega_at(&self, q: &[f64]) -> Result<DMatrix<f64>> {
        Ok(self.point(q)?.omega)
    }

    /// `dω` at `q`; by default from central differences of [`omega_at`](Self::omega_at).
    fn d_omega(&self, q: &[f64]) -> Result<Tensor3<f64>> {
        fd_d_omega(&|p: &[f64]| self.omega_at(p), q)
    }
}

/// `dω` from central differences with steps `h` and `h/2`, combined by one
/// Richardson extrapolation (`h = FD_STEP`).
pub fn fd_d_omega(f: &dyn Fn(&[f64]) -> Result<DMatrix<f64>>, q: &[f64]) -> Result<Tensor3<f64>> {
    let m = q.len();
    let deriv = |k: usize, h: f64| -> Result<DMatrix<f64>> {
        let mut qp = q.to_vec();
        let mut qm = q.to_vec();
        qp[k] += h;
        qm[k] -= h;
        Ok((f(&qp)? - f(&qm)?) / (2.0 * h))
    };
    let mut grads = Vec::with_capacity(m);
    for k in 0..m {
        let coarse = deriv(k, FD_STEP)?;
        let fine = deriv(k, FD_STEP / 2.0)?;
        grads.push((fine * 4.0 - coarse) / 3.0);
    }
    Ok(Tensor3::from_fn(m, |a, b, c| grads[a][(b, c)] - grads[b][(a, c)] + grads[c][(a, b)]))
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|a| m.row(a).iter().copied().collect()).collect()
}

fn vec_of(v: &DVector<f64>) -> Vec<f64> {
    v.iter().copied().collect()
}

/// How `Σ`, `s`, `t` and `ω` are given.
#[derive(Clone, Debug)]
pub enum Geometry {
    /// Expression fields.
    Explicit { s: MapField, t: MapField, w: TwoFormField },
    /// A spray realization of a Dirac structure.
    Realized(Box<RealizationPair>),
    /// `Σ₀₂ = Σ₀₁ ×_{M₁} Σ₁₂` through a chart `ℝᵈ → Σ₀₁ × Σ₁₂`, with
    /// `ω₀₂ = pr₁^*ω₀₁ + pr₂^*ω₁₂`.
    Composed { chart: MapField, left: Box<Geometry>, right: Box<Geometry> },
    /// `Σ_X = X₀ ×_{M₀} Σ ×_{M₁} X₁` through a chart `ℝᵈ → X₀ × Σ × X₁`,
    /// with `ω_X = pr₂^*ω`.
    Pulled { chart: MapField, x0: usize, x1: usize, inner: Box<Geometry> },
}

impl Geometry {
    fn split_chart(&self, q: &[f64], chart: &MapField) -> Result<(Vec<f64>, DMatrix<f64>)> {
        let _ = self;
        Ok((vec_of(&chart.at(q)?), chart.jacobian(q)?))
    }
}

impl PairGeometry for Geometry {
    fn sigma_dim(&self) -> usize {
        match self {
            Geometry::Explicit { s, .. } => s.src_dim(),
            Geometry::Realized(p) => p.sigma_dim(),
            Geometry::Composed { chart, .. } | Geometry::Pulled { chart, .. } => chart.src_dim(),
        }
    }

    fn m0_dim(&self) -> usize {
        match self {
            Geometry::Explicit { s, .. } => s.dst_dim(),
            Geometry::Realized(p) => p.m0_dim(),
            Geometry::Composed { left, .. } => left.m0_dim(),
            Geometry::Pulled { x0, .. } => *x0,
        }
    }

    fn m1_dim(&self) -> usize {
        match self {
            Geometry::Explicit { t, .. } => t.dst_dim(),
            Geometry::Realized(p) => p.m1_dim(),
            Geometry::Composed { right, .. } => right.m1_dim(),
            Geometry::Pulled { x1, .. } => *x1,
        }
    }

    fn point(&self, q: &[f64]) -> Result<PairPoint> {
        match self {
            Geometry::Explicit { s, t, w } => Ok(PairPoint {
                s: s.at(q)?,
                ds: s.jacobian(q)?,
                t: t.at(q)?,
                dt: t.jacobian(q)?,
                omega: w.at(q)?,
            }),
            Geometry::Realized(p) => p.point(q),
            Geometry::Composed { chart, left, right } => {
                let (c, dc) = self.split_chart(q, chart)?;
                let a = left.sigma_dim();
                let b = right.sigma_dim();
                let top = dc.rows(0, a).into_owned();
                let bot = dc.rows(a, b).into_owned();
                let lp = left.point(&c[..a])?;
                let rp = right.point(&c[a..])?;
                Ok(PairPoint {
                    s: lp.s,
                    ds: lp.ds * &top,
                    t: rp.t,
                    dt: rp.dt * &bot,
                    omega: top.transpose() * lp.omega * &top + bot.transpose() * rp.omega * &bot,
                })
            }
            Geometry::Pulled { chart, x0, x1, inner } => {
                let (c, dc) = self.split_chart(q, chart)?;
                let m = inner.sigma_dim();
                let mid = dc.rows(*x0, m).into_owned();
                let ip = inner.point(&c[*x0..*x0 + m])?;
                Ok(PairPoint {
                    s: DVector::from_column_slice(&c[..*x0]),
                    ds: dc.rows(0, *x0).into_owned(),
                    t: DVector::from_column_slice(&c[*x0 + m..]),
                    dt: dc.rows(*x0 + m, *x1).into_owned(),
                    omega: mid.transpose() * ip.omega * &mid,
                })
            }
        }
    }

    fn omega_at(&self, q: &[f64]) -> Result<DMatrix<f64>> {
        match self {
            Geometry::Explicit { w, .. } => w.at(q),
            Geometry::Realized(p) => p.omega_at(q),
            _ => Ok(self.point(q)?.omega),
        }
    }

    fn d_omega(&self, q: &[f64]) -> Result<Tensor3<f64>> {
        let d = self.sigma_dim();
        match self {
            Geometry::Explicit { w, .. } => w.d_at(q),
            Geometry::Realized(_) => fd_d_omega(&|p: &[f64]| self.omega_at(p), q),
            Geometry::Composed { chart, left, right } => {
                let (c, dc) = self.split_chart(q, chart)?;
                let a = left.sigma_dim();
                let b = right.sigma_dim();
                let l = left.d_omega(&c[..a])?.pull(&rows_of(&dc.rows(0, a).into_owned()), d);
                let r = right.d_omega(&c[a..])?.pull(&rows_of(&dc.rows(a, b).into_owned()), d);
                Ok(Tensor3::from_fn(d, |i, j, k| l.get(i, j, k) + r.get(i, j, k)))
            }
            Geometry::Pulled { chart, x0, inner, .. } => {
                let (c, dc) = self.split_chart(q, chart)?;
                let m = inner.sigma_dim();
                Ok(inner.d_omega(&c[*x0..*x0 + m])?.pull(&rows_of(&dc.rows(*x0, m).into_owned()), d))
            }
        }
    }
}

/// A Dirac structure on a leg of a diagram.
#[derive(Clone, Debug)]
pub enum LegStructure {
    Frame(DiracFrame),
    /// `i^!(L)` for a map `i` transverse to `L`.
    Pullback { i: MapField, base: Box<LegStructure> },
}

impl From<DiracFrame> for LegStructure {
    fn from(f: DiracFrame) -> Self {
        LegStructure::Frame(f)
    }
}

impl LegStructure {
    pub fn dim(&self) -> usize {
        match self {
            LegStructure::Frame(f) => f.dim(),
            LegStructure::Pullback { i, .. } => i.src_dim(),
        }
    }

    /// The Lagrangian subspace at `x`.
    pub fn lagrangian(&self, x: &[f64]) -> Result<LagrangianSubspace> {
        match self {
            LegStructure::Frame(f) => f.lagrangian(x),
            LegStructure::Pullback { i, base } => pullback_pt(&i.jacobian(x)?, &base.lagrangian(&vec_of(&i.at(x)?))?),
        }
    }

    /// Residual of `i_*(TX) + pr_T(L) = TM` at `x`: the `m`-th singular value
    /// of `[Di | pr_T L]` (zero when transversality fails).
    pub fn transversality(&self, i: &MapField, x: &[f64]) -> Result<f64> {
        let m = self.dim();
        let l = self.lagrangian(&vec_of(&i.at(x)?))?;
        let (u, _) = split_basis(&l);
        let (_, sv, _) = linalg::svd(&linalg::hcat(&i.jacobian(x)?, &u));
        let top = sv.first().copied().unwrap_or(0.0).max(1.0);
        let s = if sv.len() < m { 0.0 } else { sv[m - 1] };
        Ok(if s <= DEFAULT_TOL * top { 0.0 } else { s })
    }
}

/// A diagram `(M₀, L₀) ← (Σ, Gr(ω)) → (M₁, −L₁)` with its sample box.
#[derive(Clone, Debug)]
pub struct PairData {
    pub geometry: Geometry,
    pub l0: LegStructure,
    /// `L₁`; the diagram maps to `−L₁`.
    pub l1: LegStructure,
    pub domain: BoxDomain,
}

impl PairData {
    /// A diagram given by expression fields.
    pub fn explicit(
        s: MapField,
        t: MapField,
        w: TwoFormField,
        l0: impl Into<LegStructure>,
        l1: impl Into<LegStructure>,
        domain: BoxDomain,
    ) -> Result<Self> {
        let p = PairData { geometry: Geometry::Explicit { s, t, w }, l0: l0.into(), l1: l1.into(), domain };
        p.check_dims()?;
        Ok(p)
    }

    /// The self-dual pair of a realization, sampled on its chart.
    pub fn realized(pair: RealizationPair) -> Self {
        let l: LegStructure = pair.frame().clone().into();
        let domain = pair.chart();
        PairData { geometry: Geometry::Realized(Box::new(pair)), l0: l.clone(), l1: l, domain }
    }

    fn check_dims(&self) -> Result<()> {
        let g = &self.geometry;
        if let Geometry::Explicit { s, t, w } = g {
            if t.src_dim() != s.src_dim() || w.dim() != s.src_dim() {
                return Err(Error::DimensionMismatch("s, t and ω must live on the same Σ".into()));
            }
        }
        if self.l0.dim() != g.m0_dim() || self.l1.dim() != g.m1_dim() || self.domain.dim() != g.sigma_dim() {
            return Err(Error::DimensionMismatch(format!(
                "diagram ℝ^{} ← ℝ^{} → ℝ^{} with legs on ℝ^{}, ℝ^{} and a box in ℝ^{}",
                g.m0_dim(),
                g.sigma_dim(),
                g.m1_dim(),
                self.l0.dim(),
                self.l1.dim(),
                self.domain.dim()
            )));
        }
        Ok(())
    }

    /// `(dim Σ, dim M₀, dim M₁)`.
    pub fn dims(&self) -> [usize; 3] {
        [self.geometry.sigma_dim(), self.geometry.m0_dim(), self.geometry.m1_dim()]
    }

    /// The default seeded sample set.
    pub fn samples(&self, count: usize) -> Vec<Vec<f64>> {
        self.domain.random_points(count, DEFAULT_SEED)
    }
}

/// One named condition aggregated over the samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub max_residual: f64,
    pub worst_point: Option<Vec<f64>>,
}

/// Strongest label whose conditions all hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Classification {
    #[serde(rename = "none")]
    None,
    #[serde(rename = "pre-dual pair only")]
    PreDualPairOnly,
    #[serde(rename = "weak dual pair")]
    WeakDualPair,
    #[serde(rename = "dual pair")]
    DualPair,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::None => "none",
            Classification::PreDualPairOnly => "pre-dual pair only",
            Classification::WeakDualPair => "weak dual pair",
            Classification::DualPair => "dual pair",
        })
    }
}

/// Condition names used in verdicts.
pub mod names {
    pub const CLOSED: &str = "dω = 0";
    pub const S_FORWARD: &str = "s forward Dirac onto L₀";
    pub const T_FORWARD: &str = "t forward Dirac onto −L₁";
    pub const ORTHOGONAL: &str = "ω(V,W) = 0";
    pub const RANK: &str = "rank(V∩K∩W) = dim Σ − dim M₀ − dim M₁";
    pub const V_OMEGA: &str = "V^ω = W + K";
    pub const W_OMEGA: &str = "W^ω = V + K";
    pub const VKW_ZERO: &str = "V∩K∩W = 0";
    pub const DIMENSION: &str = "dim Σ = dim M₀ + dim M₁";
    pub const JOINT_FORWARD: &str = "(s,t) forward Dirac onto L₀ × −L₁";
    pub const STRONG: &str = "Gr(ω) ∩ ker (s,t)_* = 0";
    pub const ROUTES_AGREE: &str = "definition and presymplectic-realization routes agree";
}

/// Outcome of a pair verification.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub checks: Vec<Check>,
    pub classification: Classification,
    pub points: usize,
    /// `[dim Σ, dim M₀, dim M₁]`.
    pub dims: [usize; 3],
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Whether the named check ran and passed.
    pub fn passed(&self, name: &str) -> bool {
        self.check(name).is_some_and(|c| c.passed)
    }

    /// Largest residual among the checks that passed, a measure of slack.
    pub fn max_passing_residual(&self) -> f64 {
        self.checks.iter().filter(|c| c.passed).fold(0.0, |a, c| a.max(c.max_residual))
    }
}

struct Acc {
    name: &'static str,
    max: f64,
    worst: Option<Vec<f64>>,
    discrete: bool,
}

impl Acc {
    fn new(name: &'static str, discrete: bool) -> Self {
        Acc { name, max: 0.0, worst: None, discrete }
    }

    fn record(&mut self, r: f64, q: &[f64]) {
        if r > self.max || self.worst.is_none() {
            self.max = self.max.max(r);
            self.worst = Some(q.to_vec());
        }
    }

    fn finish(self, tol: f64) -> Check {
        let passed = if self.discrete { self.max == 0.0 } else { self.max <= tol };
        Check { name: self.name.into(), passed, max_residual: self.max, worst_point: self.worst }
    }
}

/// Linear-algebra data of a diagram at one point.
pub struct PointAlgebra {
    pub v: Subspace,
    pub w: Subspace,
    pub k: Subspace,
    pub graph: LagrangianSubspace,
    pub omega: DMatrix<f64>,
    pub ds: DMatrix<f64>,
    pub dt: DMatrix<f64>,
}

impl PointAlgebra {
    pub fn new(pp: &PairPoint) -> Result<Self> {
        Ok(PointAlgebra {
            v: map_kernel(&pp.ds, DEFAULT_TOL),
            w: map_kernel(&pp.dt, DEFAULT_TOL),
            k: form_kernel(&pp.omega, DEFAULT_TOL),
            graph: graph_of_form(&pp.omega)?,
            omega: pp.omega.clone(),
            ds: pp.ds.clone(),
            dt: pp.dt.clone(),
        })
    }

    pub fn vkw(&self) -> Result<Subspace> {
        self.v.intersect(&self.k)?.intersect(&self.w)
    }

    /// `|rank(V∩K∩W) − (dim Σ − dim M₀ − dim M₁)|`.
    pub fn rank_gap(&self) -> Result<f64> {
        let m = self.omega.nrows() as i64;
        let expect = m - self.ds.nrows() as i64 - self.dt.nrows() as i64;
        Ok((self.vkw()?.dim() as i64 - expect).unsigned_abs() as f64)
    }

    pub fn s_forward_gap(&self, l0: &LagrangianSubspace) -> Result<f64> {
        Ok(pushforward_pt(&self.ds, &self.graph)?.distance(l0))
    }

    pub fn t_forward_gap(&self, l1: &LagrangianSubspace) -> Result<f64> {
        Ok(pushforward_pt(&self.dt, &self.graph)?.distance(rescale(-1.0, l1)?.subspace()))
    }

    pub fn orthogonality(&self) -> f64 {
        form_pairing_residual(&self.v, &self.w, &self.omega)
    }

    /// Gaps in `V^ω = W + K` and `W^ω = V + K`.
    pub fn pre_dual_gaps(&self) -> Result<(f64, f64)> {
        let a = omega_orthogonal(&self.v, &self.omega)?.distance(&self.w.sum(&self.k)?);
        let b = omega_orthogonal(&self.w, &self.omega)?.distance(&self.v.sum(&self.k)?);
        Ok((a, b))
    }

    /// Gap in `s^!(L₀) = R_ω(t^!(L₁))`.
    pub fn gauge_gap(&self, l0: &LagrangianSubspace, l1: &LagrangianSubspace) -> Result<f64> {
        let lhs = pullback_pt(&self.ds, l0)?;
        let rhs = gauge_lagrangian(&self.omega, &pullback_pt(&self.dt, l1)?)?;
        Ok(lhs.distance(&rhs))
    }

    /// Gap in `(s, t)_! Gr(ω) = L₀ × −L₁`.
    pub fn joint_forward_gap(&self, l0: &LagrangianSubspace, l1: &LagrangianSubspace) -> Result<f64> {
        let j = linalg::vcat(&self.ds, &self.dt);
        let target = product_lagrangian(l0, &rescale(-1.0, l1)?)?;
        Ok(pushforward_pt(&j, &self.graph)?.distance(&target))
    }

    /// `dim(Gr(ω) ∩ ker (s, t)_*)`, computed in `𝕋Σ`.
    pub fn strong_defect(&self) -> Result<usize> {
        let j = linalg::vcat(&self.ds, &self.dt);
        Ok(self.graph.intersect(&as_tangent(&map_kernel(&j, DEFAULT_TOL)))?.dim())
    }
}

/// `L_a × L_b ⊂ 𝕋(A × B)`.
pub fn product_lagrangian(a: &LagrangianSubspace, b: &LagrangianSubspace) -> Result<LagrangianSubspace> {
    let (na, nb) = (a.n(), b.n());
    let (ua, xa) = split_basis(a);
    let (ub, xb) = split_basis(b);
    let (ka, kb) = (ua.ncols(), ub.ncols());
    let n = na + nb;
    let mut m = DMatrix::zeros(2 * n, ka + kb);
    m.view_mut((0, 0), (na, ka)).copy_from(&ua);
    m.view_mut((na, ka), (nb, kb)).copy_from(&ub);
    m.view_mut((n, 0), (na, ka)).copy_from(&xa);
    m.view_mut((n + na, ka), (nb, kb)).copy_from(&xb);
    LagrangianSubspace::new(Subspace::from_columns(&m, DEFAULT_TOL)?)
}

fn submersion_guard(pp: &PairPoint, q: &[f64]) -> Result<()> {
    for (name, d) in [("s", &pp.ds), ("t", &pp.dt)] {
        if linalg::rank(d, DEFAULT_TOL) < d.nrows() {
            return Err(Error::RankDrop { point: q.to_vec(), msg: format!("{name} is not a submersion") });
        }
    }
    Ok(())
}

fn classify(v: &Verdict) -> Classification {
    use names::*;
    let common = [CLOSED, S_FORWARD, T_FORWARD].iter().all(|n| v.passed(n));
    let weak = common && v.passed(ORTHOGONAL) && v.passed(RANK);
    if weak && v.check(VKW_ZERO).is_some_and(|c| c.passed) {
        Classification::DualPair
    } else if weak {
        Classification::WeakDualPair
    } else if common && v.passed(V_OMEGA) && v.passed(W_OMEGA) {
        Classification::PreDualPairOnly
    } else {
        Classification::None
    }
}

fn run(p: &PairData, samples: &[Vec<f64>], tol: f64, dual: bool) -> Result<Verdict> {
    use names::*;
    let g = &p.geometry;
    let dims = p.dims();
    let mut closed = Acc::new(CLOSED, false);
    let mut sf = Acc::new(S_FORWARD, false);
    let mut tf = Acc::new(T_FORWARD, false);
    let mut orth = Acc::new(ORTHOGONAL, false);
    let mut rank = Acc::new(RANK, true);
    let mut vo = Acc::new(V_OMEGA, false);
    let mut wo = Acc::new(W_OMEGA, false);
    let mut vkw = Acc::new(VKW_ZERO, true);
    let mut dim = Acc::new(DIMENSION, true);
    let mut joint = Acc::new(JOINT_FORWARD, false);
    let mut strong = Acc::new(STRONG, true);
    let mut agree = Acc::new(ROUTES_AGREE, true);
    let dim_gap = (dims[0] as i64 - dims[1] as i64 - dims[2] as i64).unsigned_abs() as f64;
    for q in samples {
        let pp = g.point(q)?;
        submersion_guard(&pp, q)?;
        let a = PointAlgebra::new(&pp)?;
        let l0 = p.l0.lagrangian(&vec_of(&pp.s))?;
        let l1 = p.l1.lagrangian(&vec_of(&pp.t))?;
        let c = g.d_omega(q)?.max_abs();
        let (s_gap, t_gap, o, r) = (a.s_forward_gap(&l0)?, a.t_forward_gap(&l1)?, a.orthogonality(), a.rank_gap()?);
        let (pv, pw) = a.pre_dual_gaps()?;
        closed.record(c, q);
        sf.record(s_gap, q);
        tf.record(t_gap, q);
        orth.record(o, q);
        rank.record(r, q);
        vo.record(pv, q);
        wo.record(pw, q);
        if dual {
            let d = a.vkw()?.dim() as f64;
            let jg = a.joint_forward_gap(&l0, &l1)?;
            let sd = a.strong_defect()? as f64;
            vkw.record(d, q);
            dim.record(dim_gap, q);
            joint.record(jg, q);
            strong.record(sd, q);
            let by_definition = c <= tol && s_gap <= tol && t_gap <= tol && o <= tol && r == 0.0 && d == 0.0;
            let by_realization = c <= tol && jg <= tol && sd == 0.0 && dim_gap == 0.0;
            agree.record(if by_definition == by_realization { 0.0 } else { 1.0 }, q);
        }
    }
    let mut checks: Vec<Check> = [closed, sf, tf, orth, rank, vo, wo].into_iter().map(|a| a.finish(tol)).collect();
    if dual {
        checks.extend([vkw, dim, joint, strong, agree].into_iter().map(|a| a.finish(tol)));
    }
    let mut v = Verdict {
        checks,
        classification: Classification::None,
        points: samples.len(),
        dims,
        notes: vec!["completeness of the legs: not evaluated".into()],
    };
    v.classification = classify(&v);
    if !dual && v.classification == Classification::DualPair {
        v.classification = Classification::WeakDualPair;
    }
    Ok(v)
}

/// Weak-dual-pair verdict: forward legs, `ω(V,W) = 0`, the rank equation of
/// `V∩K∩W`, closedness, and the pre-dual conditions separately.
pub fn verify_weak_dual_pair(p: &PairData, samples: &[Vec<f64>], tol: f64) -> Result<Verdict> {
    run(p, samples, tol, false)
}

/// Dual-pair verdict: the weak conditions plus `V∩K∩W = 0`, and the
/// independent route through `(s, t)` being a presymplectic realization.
pub fn verify_dual_pair(p: &PairData, samples: &[Vec<f64>], tol: f64) -> Result<Verdict> {
    run(p, samples, tol, true)
}

/// The four equivalent characterizations of weak dual pairs, each
/// evaluated on its own terms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceReport {
    /// i) definition, ii) gauge equality and rank, iii) joint forwardness
    /// and a side condition, iv) gauge equality and joint forwardness.
    pub items: [bool; 4],
    pub gauge_equality: bool,
    pub joint_forward: bool,
    pub rank_condition: bool,
    pub orthogonality: bool,
    pub s_forward: bool,
    pub t_forward: bool,
    /// Which side condition of iii) held at every sample: "rank",
    /// "orthogonality", "both" or "neither".
    pub side_condition: String,
}

/// Pointwise flags behind [`EquivalenceReport`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EquivalenceFlags {
    pub gauge_equality: bool,
    pub joint_forward: bool,
    pub rank_condition: bool,
    pub orthogonality: bool,
    pub s_forward: bool,
    pub t_forward: bool,
}

impl EquivalenceFlags {
    pub fn at(pp: &PairPoint, l0: &LagrangianSubspace, l1: &LagrangianSubspace, tol: f64) -> Result<Self> {
        let a = PointAlgebra::new(pp)?;
        Ok(EquivalenceFlags {
            gauge_equality: a.gauge_gap(l0, l1)? <= tol,
            joint_forward: a.joint_forward_gap(l0, l1)? <= tol,
            rank_condition: a.rank_gap()? == 0.0,
            orthogonality: a.orthogonality() <= tol,
            s_forward: a.s_forward_gap(l0)? <= tol,
            t_forward: a.t_forward_gap(l1)? <= tol,
        })
    }

    fn and(self, o: Self) -> Self {
        EquivalenceFlags {
            gauge_equality: self.gauge_equality && o.gauge_equality,
            joint_forward: self.joint_forward && o.joint_forward,
            rank_condition: self.rank_condition && o.rank_condition,
            orthogonality: self.orthogonality && o.orthogonality,
            s_forward: self.s_forward && o.s_forward,
            t_forward: self.t_forward && o.t_forward,
        }
    }

    /// Items i) to iv).
    pub fn items(&self) -> [bool; 4] {
        [
            self.s_forward && self.t_forward && self.orthogonality && self.rank_condition,
            self.gauge_equality && self.rank_condition,
            self.joint_forward && (self.rank_condition || self.orthogonality),
            self.gauge_equality && self.joint_forward,
        ]
    }
}

/// Evaluates the four characterizations; each item holds when it holds at
/// every sample.
pub fn equivalence_matrix(p: &PairData, samples: &[Vec<f64>], tol: f64) -> Result<EquivalenceReport> {
    let all = EquivalenceFlags {
        gauge_equality: true,
        joint_forward: true,
        rank_condition: true,
        orthogonality: true,
        s_forward: true,
        t_forward: true,
    };
    let mut acc = all;
    let mut items = [true; 4];
    for q in samples {
        let pp = p.geometry.point(q)?;
        submersion_guard(&pp, q)?;
        let f = EquivalenceFlags::at(&pp, &p.l0.lagrangian(&vec_of(&pp.s))?, &p.l1.lagrangian(&vec_of(&pp.t))?, tol)?;
        for (a, b) in items.iter_mut().zip(f.items()) {
            *a &= b;
        }
        acc = acc.and(f);
    }
    let side_condition = match (acc.rank_condition, acc.orthogonality) {
        (true, true) => "both",
        (true, false) => "rank",
        (false, true) => "orthogonality",
        (false, false) => "neither",
    };
    Ok(EquivalenceReport {
        items,
        gauge_equality: acc.gauge_equality,
        joint_forward: acc.joint_forward,
        rank_condition: acc.rank_condition,
        orthogonality: acc.orthogonality,
        s_forward: acc.s_forward,
        t_forward: acc.t_forward,
        side_condition: side_condition.into(),
    })
}

/// Composes `P₀₁` and `P₁₂` through a chart `ℝᵈ → Σ₀₁ × Σ₁₂` of the fibre
/// product `t₀₁ ∘ pr₁ = s₁₂ ∘ pr₂`, checked on `domain` samples.
pub fn compose_pairs(p01: &PairData, p12: &PairData, chart: MapField, domain: BoxDomain) -> Result<PairData> {
    let a = p01.geometry.sigma_dim();
    let b = p12.geometry.sigma_dim();
    if chart.dst_dim() != a + b || domain.dim() != chart.src_dim() {
        return Err(Error::DimensionMismatch(format!(
            "chart must map a box in ℝ^{} to ℝ^{} × ℝ^{b}",
            chart.src_dim(),
            a
        )));
    }
    if p01.geometry.m1_dim() != p12.geometry.m0_dim() {
        return Err(Error::DimensionMismatch("the middle legs live on different spaces".into()));
    }
    let mut worst: f64 = 0.0;
    for xi in chart_samples(&domain) {
        let c = vec_of(&chart.at(&xi)?);
        let t01 = p01.geometry.point(&c[..a])?.t;
        let s12 = p12.geometry.point(&c[a..])?.s;
        worst = worst.max((t01 - s12).amax());
    }
    if worst > 1e-9 {
        return Err(Error::ChartInconsistent { msg: "t₀₁ ∘ pr₁ ≠ s₁₂ ∘ pr₂ on the chart".into(), residual: worst });
    }
    Ok(PairData {
        geometry: Geometry::Composed {
            chart,
            left: Box::new(p01.geometry.clone()),
            right: Box::new(p12.geometry.clone()),
        },
        l0: p01.l0.clone(),
        l1: p12.l1.clone(),
        domain,
    })
}

fn chart_samples(domain: &BoxDomain) -> Vec<Vec<f64>> {
    let mut pts = domain.grid(3);
    pts.extend(domain.random_points(20, DEFAULT_SEED));
    pts
}

/// Orthonormal basis of `V∩K∩W` at `q`, the leaf directions of the
/// characteristic foliation.
pub fn leaf_directions(p: &PairData, q: &[f64]) -> Result<DMatrix<f64>> {
    Ok(PointAlgebra::new(&p.geometry.point(q)?)?.vkw()?.basis().clone())
}

/// Outcome of [`reduction_verify`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReductionReport {
    /// `ker dr = V∩K∩W`, `ω = r^*ω̄`, `s = s̄ ∘ r`, `t = t̄ ∘ r`.
    pub identities: Vec<Check>,
    /// Verdict on the quotient pair at the images of the samples.
    pub quotient: Verdict,
    pub pass: bool,
}

/// Checks user-supplied quotient data `r: Σ → Σ̄`, `ω̄`, `s̄`, `t̄` against a
/// weak dual pair and classifies the quotient diagram.
pub fn reduction_verify(
    p: &PairData,
    r: &MapField,
    w_bar: &TwoFormField,
    s_bar: &MapField,
    t_bar: &MapField,
    samples: &[Vec<f64>],
    tol: f64,
) -> Result<ReductionReport> {
    let mut ker = Acc::new("ker dr = V∩K∩W", false);
    let mut form = Acc::new("ω = r^*ω̄", false);
    let mut sr = Acc::new("s = s̄∘r", false);
    let mut tr = Acc::new("t = t̄∘r", false);
    let mut images = Vec::with_capacity(samples.len());
    for q in samples {
        let pp = p.geometry.point(q)?;
        let a = PointAlgebra::new(&pp)?;
        let rq = vec_of(&r.at(q)?);
        let dr = r.jacobian(q)?;
        ker.record(map_kernel(&dr, DEFAULT_TOL).distance(&a.vkw()?), q);
        form.record(linalg::max_abs(&(&pp.omega - dr.transpose() * w_bar.at(&rq)? * &dr)), q);
        sr.record((&pp.s - s_bar.at(&rq)?).amax(), q);
        tr.record((&pp.t - t_bar.at(&rq)?).amax(), q);
        images.push(rq);
    }
    let identities: Vec<Check> = [ker, form, sr, tr].into_iter().map(|a| a.finish(tol)).collect();
    let lo = images.iter().fold(vec![f64::INFINITY; r.dst_dim()], |m, x| m.iter().zip(x).map(|(a, b)| a.min(*b)).collect());
    let hi = images.iter().fold(vec![f64::NEG_INFINITY; r.dst_dim()], |m, x| m.iter().zip(x).map(|(a, b)| a.max(*b)).collect());
    let domain = BoxDomain::new(lo, hi)?;
    let quotient_pair = PairData::explicit(s_bar.clone(), t_bar.clone(), w_bar.clone(), p.l0.clone(), p.l1.clone(), domain)?;
    let quotient = verify_dual_pair(&quotient_pair, &images, tol)?;
    let pass = identities.iter().all(|c| c.passed) && quotient.classification == Classification::DualPair;
    Ok(ReductionReport { identities, quotient, pass })
}

/// Poisson test for one leg, evaluated two independent ways.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LegPoisson {
    /// `W = V^ω` for `L₁` (`V = W^ω` for `L₀`) at every sample.
    pub orthogonal_condition: bool,
    /// `L ∩ TM = 0` at every image point.
    pub poisson: bool,
    pub agree: bool,
}

/// Outcome of [`poisson_leg_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoissonLegReport {
    pub leg0: LegPoisson,
    pub leg1: LegPoisson,
}

fn tangent_meet(l: &LagrangianSubspace) -> Result<usize> {
    let n = l.n();
    Ok(l.intersect(&Subspace::from_columns(
        &linalg::vcat(&DMatrix::identity(n, n), &DMatrix::zeros(n, n)),
        DEFAULT_TOL,
    )?)?
    .dim())
}

/// For each leg, whether it is Poisson and whether the matching
/// ω-orthogonality holds.
pub fn poisson_leg_check(p: &PairData, samples: &[Vec<f64>], tol: f64) -> Result<PoissonLegReport> {
    let (mut o0, mut o1, mut p0, mut p1) = (true, true, true, true);
    for q in samples {
        let pp = p.geometry.point(q)?;
        let a = PointAlgebra::new(&pp)?;
        o1 &= omega_orthogonal(&a.v, &a.omega)?.distance(&a.w) <= tol;
        o0 &= omega_orthogonal(&a.w, &a.omega)?.distance(&a.v) <= tol;
        p0 &= tangent_meet(&p.l0.lagrangian(&vec_of(&pp.s))?)? == 0;
        p1 &= tangent_meet(&p.l1.lagrangian(&vec_of(&pp.t))?)? == 0;
    }
    Ok(PoissonLegReport {
        leg0: LegPoisson { orthogonal_condition: o0, poisson: p0, agree: o0 == p0 },
        leg1: LegPoisson { orthogonal_condition: o1, poisson: p1, agree: o1 == p1 },
    })
}

/// `(X₀, i₀^! L₀) ← (Σ_X, Gr(pr₂^*ω)) → (X₁, i₁^! L₁)` through a chart
/// `ℝᵈ → X₀ × Σ × X₁` of `Σ_X = X₀ ×_{M₀} Σ ×_{M₁} X₁`.
pub fn transverse_pullback(p: &PairData, i0: &MapField, i1: &MapField, chart: MapField, domain: BoxDomain) -> Result<PairData> {
    let (x0, x1) = (i0.src_dim(), i1.src_dim());
    let m = p.geometry.sigma_dim();
    if chart.dst_dim() != x0 + m + x1 || domain.dim() != chart.src_dim() {
        return Err(Error::DimensionMismatch(format!(
            "chart must map a box in ℝ^{} to ℝ^{x0} × ℝ^{m} × ℝ^{x1}",
            chart.src_dim()
        )));
    }
    if i0.dst_dim() != p.geometry.m0_dim() || i1.dst_dim() != p.geometry.m1_dim() {
        return Err(Error::DimensionMismatch("the transverse maps must land in M₀ and M₁".into()));
    }
    let mut worst: f64 = 0.0;
    for xi in chart_samples(&domain) {
        let c = vec_of(&chart.at(&xi)?);
        let (a, rest) = c.split_at(x0);
        let (sigma, b) = rest.split_at(m);
        let pp = p.geometry.point(sigma)?;
        worst = worst.max((i0.at(a)? - &pp.s).amax()).max((i1.at(b)? - &pp.t).amax());
        for (i, x, leg) in [(i0, a, &p.l0), (i1, b, &p.l1)] {
            let r = leg.transversality(i, x)?;
            if r == 0.0 {
                return Err(Error::Transversality { point: x.to_vec(), residual: r });
            }
        }
    }
    if worst > 1e-9 {
        return Err(Error::ChartInconsistent { msg: "i₀ ≠ s or i₁ ≠ t on the chart".into(), residual: worst });
    }
    Ok(PairData {
        geometry: Geometry::Pulled { chart, x0, x1, inner: Box::new(p.geometry.clone()) },
        l0: LegStructure::Pullback { i: i0.clone(), base: Box::new(p.l0.clone()) },
        l1: LegStructure::Pullback { i: i1.clone(), base: Box::new(p.l1.clone()) },
        domain,
    })
}
