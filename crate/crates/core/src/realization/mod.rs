//! Self-dual pairs `(M, L) ← (Σ, Gr(ω)) → (M, −L)` built from a spray on the
//! total space of a Dirac structure.
//!
//! A point `(x, c)` of the chart ℝ²ⁿ stands for `Σ cᵢ eᵢ(x)` in the frame of
//! `L`. The spray is `𝒱(x, c) = (Σ cᵢ pr_T eᵢ(x), 0)`. Its flow is integrated
//! by the classical fourth-order Runge–Kutta method together with the
//! variational equation, and `ω = ∫₀¹ φ_ε^* ω_L dε` by composite Simpson.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::dirac::DiracFrame;
use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::expr::{Dual, Scalar};
use crate::fields::{MapField, SectionField, Tensor3, ThreeFormField};
use crate::lindirac::{form_kernel, gauge_lagrangian, map_kernel, pullback_pt};
use crate::linalg::{self, DEFAULT_TOL};
use crate::verify::{fd_d_omega, PairGeometry, PairPoint};

/// Smallest chart radius tried before giving up.
pub const RADIUS_FLOOR: f64 = 1.0 / (1u64 << 20) as f64;

/// Largest allowed gap between the `(N, K)` and `(2N, 2K)` forms at the
/// build probes.
pub const QUADRATURE_TOL: f64 = 1e-6;

/// The spray `𝒱(x, c) = (Σ cᵢ pr_T eᵢ(x), 0)` of a Dirac frame.
#[derive(Clone, Debug)]
pub struct Spray {
    frame: DiracFrame,
}

/// The trivial-connection spray of the frame chart.
pub fn default_spray(l: &DiracFrame) -> Spray {
    Spray { frame: l.clone() }
}

/// Largest violations of the spray axioms over a sample set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SprayResiduals {
    /// `|s_* 𝒱(x, c) − pr_T(Σ cᵢ eᵢ(x))|`.
    pub spr1: f64,
    /// `|𝒱(x, tc) − t·dm_t 𝒱(x, c)|` for `t ∈ {2, −1, 1/2}`.
    pub spr2: f64,
}

impl Spray {
    pub fn frame(&self) -> &DiracFrame {
        &self.frame
    }

    /// Dimension `n` of the base.
    pub fn base_dim(&self) -> usize {
        self.frame.dim()
    }

    pub fn eval<S: Scalar>(&self, q: &[S]) -> Result<Vec<S>> {
        let n = self.base_dim();
        if q.len() != 2 * n {
            return Err(Error::DimensionMismatch(format!("chart point has {} coordinates, expected {}", q.len(), 2 * n)));
        }
        let (x, c) = q.split_at(n);
        let vals = self.frame.eval(x)?;
        let mut out = vec![S::zero(); 2 * n];
        for (ci, (u, _)) in c.iter().zip(&vals) {
            for j in 0..n {
                out[j] = out[j].clone() + ci.clone() * u[j].clone();
            }
        }
        Ok(out)
    }

    pub fn at(&self, q: &[f64]) -> Result<DVector<f64>> {
        Ok(DVector::from_vec(self.eval(q)?))
    }

    /// Value and Jacobian `D𝒱` at `q`.
    pub fn jacobian(&self, q: &[f64]) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let m = q.len();
        let v = self.eval(&Dual::seed(q))?;
        let val = DVector::from_fn(m, |i, _| v[i].v);
        let jac = DMatrix::from_fn(m, m, |i, j| v[i].part(j));
        Ok((val, jac))
    }

    /// Re-verifies (Spr1) and (Spr2) at chart points.
    pub fn axiom_residuals(&self, samples: &[Vec<f64>]) -> Result<SprayResiduals> {
        let n = self.base_dim();
        let mut r = SprayResiduals { spr1: 0.0, spr2: 0.0 };
        for q in samples {
            let v = self.at(q)?;
            let frame = self.frame.at(&q[..n])?;
            let mut base = DVector::zeros(n);
            for (ci, e) in q[n..].iter().zip(&frame) {
                base += &e.tangent * *ci;
            }
            r.spr1 = r.spr1.max((v.rows(0, n) - base).amax());
            for t in [2.0, -1.0, 0.5] {
                let mut qt = q.clone();
                qt[n..].iter_mut().for_each(|c| *c *= t);
                let vt = self.at(&qt)?;
                let mut expect = v.clone() * t;
                expect.rows_mut(n, n).scale_mut(t);
                r.spr2 = r.spr2.max((vt - expect).amax());
            }
        }
        Ok(r)
    }
}

/// A flowed point together with the flow's Jacobian there.
#[derive(Clone, Debug)]
pub struct FlowState {
    pub point: DVector<f64>,
    pub jacobian: DMatrix<f64>,
}

/// `φ_ε(q)` and `Dφ_ε(q)` from `steps` uniform fourth-order steps.
///
/// The base part of the trajectory must stay in the frame's domain.
pub fn flow(spray: &Spray, q: &[f64], eps: f64, steps: usize) -> Result<FlowState> {
    let mut states = integrate(spray, q, eps, steps, steps)?;
    Ok(states.pop().expect("at least the final state"))
}

/// States after every `every` steps, starting with `q` itself.
fn integrate(spray: &Spray, q: &[f64], eps: f64, steps: usize, every: usize) -> Result<Vec<FlowState>> {
    let n = spray.base_dim();
    if q.len() != 2 * n {
        return Err(Error::DimensionMismatch(format!("chart point has {} coordinates, expected {}", q.len(), 2 * n)));
    }
    if steps == 0 || every == 0 {
        return Err(Error::Invalid("the flow needs at least one step".into()));
    }
    let m = 2 * n;
    let h = eps / steps as f64;
    let bounds = spray.frame().domain();
    let mut y = DVector::from_column_slice(q);
    let mut d = DMatrix::<f64>::identity(m, m);
    let mut out = vec![FlowState { point: y.clone(), jacobian: d.clone() }];
    let rhs = |y: &DVector<f64>| spray.jacobian(y.as_slice());
    for step in 1..=steps {
        let (f1, j1) = rhs(&y)?;
        let k1 = &j1 * &d;
        let (f2, j2) = rhs(&(&y + &f1 * (h / 2.0)))?;
        let k2 = &j2 * (&d + &k1 * (h / 2.0));
        let (f3, j3) = rhs(&(&y + &f2 * (h / 2.0)))?;
        let k3 = &j3 * (&d + &k2 * (h / 2.0));
        let (f4, j4) = rhs(&(&y + &f3 * h))?;
        let k4 = &j4 * (&d + &k3 * h);
        y += (f1 + f2 * 2.0 + f3 * 2.0 + f4) * (h / 6.0);
        d += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        if y.iter().chain(d.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("flow from {q:?} at step {step}")));
        }
        if !bounds.contains(&y.as_slice()[..n]) {
            return Err(Error::ChartExit { step, steps });
        }
        if step % every == 0 {
            out.push(FlowState { point: y.clone(), jacobian: d.clone() });
        }
    }
    Ok(out)
}

/// `ω_L = −dλ_L` on the chart, where `λ_L = Σⱼ μⱼ dxⱼ` with
/// `μ(x, c) = Σᵢ cᵢ ξᵢ(x)` the cotangent part of the point.
///
/// The frame may be implicit, so the form is a numerical evaluator
/// rather than an expression field.
#[derive(Clone, Debug)]
pub struct OmegaL {
    frame: DiracFrame,
}

/// The pulled-back canonical form of `L`.
pub fn omega_l(l: &DiracFrame) -> OmegaL {
    OmegaL { frame: l.clone() }
}

impl OmegaL {
    /// Component matrix at a chart point.
    pub fn at(&self, q: &[f64]) -> Result<DMatrix<f64>> {
        let n = self.frame.dim();
        if q.len() != 2 * n {
            return Err(Error::DimensionMismatch(format!("chart point has {} coordinates, expected {}", q.len(), 2 * n)));
        }
        let (x, c) = q.split_at(n);
        let jets = self.frame.jets(x)?;
        let mut dl = DMatrix::zeros(2 * n, 2 * n);
        for k in 0..n {
            for j in 0..n {
                dl[(k, j)] = c.iter().zip(&jets).map(|(ci, e)| ci * (e.dxi[j][k] - e.dxi[k][j])).sum::<f64>();
            }
        }
        for (i, e) in jets.iter().enumerate() {
            for j in 0..n {
                dl[(n + i, j)] = e.xi[j];
                dl[(j, n + i)] = -e.xi[j];
            }
        }
        Ok(-dl)
    }
}

/// Numerical parameters of a realization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct RealizeParams {
    /// Initial fibre radius `R` of the chart.
    pub radius: f64,
    /// Simpson subintervals `N` (even).
    pub quad_nodes: usize,
    /// Flow steps `K` over `ε ∈ [0, 1]`.
    pub steps: usize,
}

impl Default for RealizeParams {
    fn default() -> Self {
        RealizeParams { radius: 1.0, quad_nodes: 32, steps: 64 }
    }
}

impl RealizeParams {
    fn validate(&self) -> Result<()> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::Invalid("chart radius must be positive".into()));
        }
        if self.quad_nodes < 2 || self.quad_nodes % 2 != 0 {
            return Err(Error::Invalid("Simpson quadrature needs an even number N >= 2 of subintervals".into()));
        }
        if self.steps == 0 {
            return Err(Error::Invalid("the flow needs K >= 1 steps".into()));
        }
        Ok(())
    }
}

/// The pair `s(x, c) = x`, `t = s ∘ φ₁`, `ω = ∫₀¹ φ_ε^* ω_L dε` on the chart
/// `base × [−R, R]ⁿ`, where `base` is the frame domain scaled by one half.
#[derive(Clone, Debug)]
pub struct RealizationPair {
    spray: Spray,
    omega_l: OmegaL,
    base: BoxDomain,
    params: RealizeParams,
}

impl RealizationPair {
    /// Assembles a pair with a fixed radius, without probing the chart.
    pub fn from_parts(l: &DiracFrame, params: RealizeParams) -> Result<Self> {
        params.validate()?;
        Ok(RealizationPair {
            spray: default_spray(l),
            omega_l: omega_l(l),
            base: l.domain().scaled(0.5),
            params,
        })
    }

    pub fn frame(&self) -> &DiracFrame {
        self.spray.frame()
    }

    pub fn spray(&self) -> &Spray {
        &self.spray
    }

    /// Final numerical parameters; `radius` is the radius after shrinking.
    pub fn params(&self) -> RealizeParams {
        self.params
    }

    pub fn radius(&self) -> f64 {
        self.params.radius
    }

    pub fn base_dim(&self) -> usize {
        self.spray.base_dim()
    }

    /// The base part of the chart.
    pub fn base(&self) -> &BoxDomain {
        &self.base
    }

    /// The chart box `Σ ⊂ ℝ²ⁿ`.
    pub fn chart(&self) -> BoxDomain {
        self.base.product(&BoxDomain::cube(self.base_dim(), self.params.radius))
    }

    /// `s(x, c) = x`.
    pub fn s_map(&self) -> MapField {
        let n = self.base_dim();
        MapField::projection(2 * n, &(0..n).collect::<Vec<_>>()).expect("coordinate projection")
    }

    /// `φ_ε(q)` with the pair's step count.
    pub fn flow_at(&self, q: &[f64], eps: f64) -> Result<FlowState> {
        flow(&self.spray, q, eps, self.params.steps)
    }

    /// `t(q) = s(φ₁(q))`.
    pub fn t_at(&self, q: &[f64]) -> Result<DVector<f64>> {
        Ok(self.flow_at(q, 1.0)?.point.rows(0, self.base_dim()).into_owned())
    }

    /// `ω(q)` with the pair's parameters.
    pub fn omega_at(&self, q: &[f64]) -> Result<DMatrix<f64>> {
        Ok(self.quadrature(q, self.params.quad_nodes, self.params.steps)?.0)
    }

    /// `ω(q)` with `N` Simpson subintervals and `K` flow steps.
    pub fn omega_with(&self, q: &[f64], quad_nodes: usize, steps: usize) -> Result<DMatrix<f64>> {
        RealizeParams { radius: self.params.radius, quad_nodes, steps }.validate()?;
        Ok(self.quadrature(q, quad_nodes, steps)?.0)
    }

    /// Simpson rule for `∫₀¹ Dφ_εᵀ W_L(φ_ε) Dφ_ε dε`; also returns `φ₁`.
    fn quadrature(&self, q: &[f64], nq: usize, k: usize) -> Result<(DMatrix<f64>, FlowState)> {
        let states = if k % nq == 0 {
            integrate(&self.spray, q, 1.0, k, k / nq)?
        } else {
            (0..=nq).map(|j| flow(&self.spray, q, j as f64 / nq as f64, k)).collect::<Result<Vec<_>>>()?
        };
        let m = q.len();
        let mut acc = DMatrix::zeros(m, m);
        for (j, st) in states.iter().enumerate() {
            let w = if j == 0 || j == nq {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let wl = self.omega_l.at(st.point.as_slice())?;
            acc += st.jacobian.transpose() * wl * &st.jacobian * w;
        }
        acc /= 3.0 * nq as f64;
        let skew = linalg::max_abs(&(&acc + acc.transpose()));
        debug_assert!(skew <= 1e-10 * linalg::max_abs(&acc).max(1.0), "congruence sum lost antisymmetry: {skew:e}");
        let omega = (&acc - acc.transpose()) * 0.5;
        Ok((omega, states.into_iter().last().expect("final node")))
    }

    /// Vertices and center of the chart.
    fn probes(&self) -> Vec<Vec<f64>> {
        let chart = self.chart();
        let mut pts = chart.grid(2);
        pts.push(chart.center());
        pts
    }

    fn probe(&self) -> Result<()> {
        let p = self.params;
        for q in self.probes() {
            let (a, _) = self.quadrature(&q, p.quad_nodes, p.steps)?;
            let (b, _) = self.quadrature(&q, 2 * p.quad_nodes, 2 * p.steps)?;
            let gap = linalg::max_abs(&(a - b));
            if gap > QUADRATURE_TOL {
                return Err(Error::Quadrature(gap));
            }
        }
        Ok(())
    }
}

impl PairGeometry for RealizationPair {
    fn sigma_dim(&self) -> usize {
        2 * self.base_dim()
    }

    fn m0_dim(&self) -> usize {
        self.base_dim()
    }

    fn m1_dim(&self) -> usize {
        self.base_dim()
    }

    fn point(&self, q: &[f64]) -> Result<PairPoint> {
        let n = self.base_dim();
        let (omega, end) = self.quadrature(q, self.params.quad_nodes, self.params.steps)?;
        let mut ds = DMatrix::zeros(n, 2 * n);
        ds.view_mut((0, 0), (n, n)).fill_with_identity();
        Ok(PairPoint {
            s: DVector::from_column_slice(&q[..n]),
            ds,
            t: end.point.rows(0, n).into_owned(),
            dt: end.jacobian.rows(0, n).into_owned(),
            omega,
        })
    }

    fn omega_at(&self, q: &[f64]) -> Result<DMatrix<f64>> {
        RealizationPair::omega_at(self, q)
    }
}

/// Builds the realization of `l`, halving the chart radius while a probe
/// flow leaves the frame domain.
///
/// Probes are the vertices and center of the chart; each must also show
/// `(N, K)` and `(2N, 2K)` forms within [`QUADRATURE_TOL`].
pub fn build_realization(l: &DiracFrame, params: RealizeParams) -> Result<RealizationPair> {
    let mut pair = RealizationPair::from_parts(l, params)?;
    loop {
        match pair.probe() {
            Ok(()) => return Ok(pair),
            Err(e @ (Error::ChartExit { .. } | Error::RankDrop { .. } | Error::NonFinite(_))) => {
                let r = pair.params.radius / 2.0;
                if r < RADIUS_FLOOR {
                    return Err(e);
                }
                pair.params.radius = r;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Tangent and cotangent parts of the frame at `x` as `n × n` matrices
/// whose columns are `pr_T eᵢ` and `pr_T* eᵢ`.
fn frame_blocks(l: &DiracFrame, x: &[f64]) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let vals = l.at(x)?;
    let n = l.dim();
    let u = DMatrix::from_fn(n, n, |j, i| vals[i].tangent[j]);
    let xi = DMatrix::from_fn(n, n, |j, i| vals[i].cotangent[j]);
    Ok((u, xi))
}

/// `Dφ_ε` along the zero section: `(ẋ, ċ) ↦ (ẋ + ε U ċ, ċ)` with `U` the
/// tangent parts of the frame.
pub fn zero_section_flow_jacobian(l: &DiracFrame, x: &[f64], eps: f64) -> Result<DMatrix<f64>> {
    let n = l.dim();
    let (u, _) = frame_blocks(l, x)?;
    let mut d = DMatrix::identity(2 * n, 2 * n);
    d.view_mut((0, n), (n, n)).copy_from(&(u * eps));
    Ok(d)
}

/// `ω` along the zero section:
/// `ω((u, v + η), (u', v' + η')) = η'(u + v/2) − η(u' + v'/2)`.
pub fn zero_section_form(l: &DiracFrame, x: &[f64]) -> Result<DMatrix<f64>> {
    let n = l.dim();
    let (u, xi) = frame_blocks(l, x)?;
    let mut a = DMatrix::zeros(2 * n, 2 * n);
    a.view_mut((0, n), (n, n)).copy_from(&xi);
    a.view_mut((n, 0), (n, n)).copy_from(&(-xi.transpose()));
    a.view_mut((n, n), (n, n)).copy_from(&((u.transpose() * &xi - xi.transpose() * &u) * 0.5));
    Ok(a)
}

/// Outcome of [`zero_section_checks`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroSectionReport {
    pub points: usize,
    /// Largest deviation of `Dφ_ε` (ε = 1/2, 1) from the block formula.
    pub flow_residual: f64,
    /// Largest deviation of `ω` from the zero-section formula.
    pub form_residual: f64,
    /// Largest `dim(V ∩ K ∩ W)`.
    pub max_vkw_dim: usize,
    pub worst_point: Option<Vec<f64>>,
    pub pass: bool,
}

/// Checks the linearized flow, the zero-section form and `V ∩ K ∩ W = 0`
/// at the zero-section points over the base points `samples`.
pub fn zero_section_checks(pair: &RealizationPair, samples: &[Vec<f64>]) -> Result<ZeroSectionReport> {
    let n = pair.base_dim();
    let l = pair.frame();
    let mut rep = ZeroSectionReport {
        points: samples.len(),
        flow_residual: 0.0,
        form_residual: 0.0,
        max_vkw_dim: 0,
        worst_point: None,
        pass: true,
    };
    let mut worst = -1.0;
    for x in samples {
        if x.len() != n {
            return Err(Error::DimensionMismatch(format!("base point has {} coordinates, expected {n}", x.len())));
        }
        let mut q = x.clone();
        q.extend(std::iter::repeat(0.0).take(n));
        let mut fr: f64 = 0.0;
        for eps in [0.5, 1.0] {
            let st = pair.flow_at(&q, eps)?;
            fr = fr.max(linalg::max_abs(&(st.jacobian - zero_section_flow_jacobian(l, x, eps)?)));
        }
        let pp = pair.point(&q)?;
        let wr = linalg::max_abs(&(&pp.omega - zero_section_form(l, x)?));
        let vkw = vkw_dim(&pp);
        rep.flow_residual = rep.flow_residual.max(fr);
        rep.form_residual = rep.form_residual.max(wr);
        rep.max_vkw_dim = rep.max_vkw_dim.max(vkw);
        let score = fr.max(wr) + vkw as f64;
        if score > worst {
            worst = score;
            rep.worst_point = Some(q);
        }
    }
    rep.pass = rep.flow_residual < 1e-8 && rep.form_residual < 1e-6 && rep.max_vkw_dim == 0;
    Ok(rep)
}

fn vkw_dim(pp: &PairPoint) -> usize {
    let v = map_kernel(&pp.ds, DEFAULT_TOL);
    let w = map_kernel(&pp.dt, DEFAULT_TOL);
    let k = form_kernel(&pp.omega, DEFAULT_TOL);
    v.intersect(&k).and_then(|vk| vk.intersect(&w)).map(|s| s.dim()).unwrap_or(usize::MAX)
}

/// Which leg a lift is taken along.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Leg {
    /// `w ∈ ker dt` with `w + ι_w ω ∼_s a₀`.
    Source,
    /// `w ∈ ker ds` with `w + ι_w ω ∼_t −a₁`.
    Target,
}

/// The unique lift `w` at `q` of a section `a` of `L`: tangent to the fibres
/// of `t` and `s`-related to `a` for [`Leg::Source`], tangent to the fibres
/// of `s` and `t`-related to `−a` for [`Leg::Target`].
pub fn realization_lift(pair: &RealizationPair, a: &SectionField, q: &[f64], leg: Leg) -> Result<DVector<f64>> {
    let pp = pair.point(q)?;
    lift_at(pair.frame(), &pp, a, leg, q)
}

/// Lift from precomputed pair data at `q`.
pub(crate) fn lift_at(l: &DiracFrame, pp: &PairPoint, a: &SectionField, leg: Leg, q: &[f64]) -> Result<DVector<f64>> {
    let n = l.dim();
    let m = pp.omega.nrows();
    let (along, across, base, sign) = match leg {
        Leg::Source => (&pp.ds, &pp.dt, &pp.s, 1.0),
        Leg::Target => (&pp.dt, &pp.ds, &pp.t, -1.0),
    };
    let b0: Vec<f64> = base.iter().copied().collect();
    let av = a.at(&b0)?;
    if l.subspace(&b0)?.residual(&av.to_vector()) > 1e-8 * av.to_vector().amax().max(1.0) {
        return Err(Error::Invalid(format!("the section to lift does not lie in L at {b0:?}")));
    }
    let sys = linalg::vcat(&linalg::vcat(across, along), &pp.omega.transpose());
    let mut rhs = DVector::zeros(2 * n + m);
    rhs.rows_mut(n, n).copy_from(&av.tangent);
    rhs.rows_mut(2 * n, m).copy_from(&(along.transpose() * &av.cotangent * sign));
    if linalg::rank(&sys, DEFAULT_TOL) < m {
        return Err(Error::Invalid(format!("lift is not unique at {q:?}: V ∩ K ∩ W ≠ 0")));
    }
    let w = linalg::lstsq(&sys, &rhs, DEFAULT_TOL);
    let res = (&sys * &w - &rhs).amax();
    if res > 1e-8 * rhs.amax().max(1.0) {
        return Err(Error::Invalid(format!("no lift at {q:?}: the dual-pair conditions fail (residual {res:e})")));
    }
    Ok(w)
}

/// Transversal data for the normal form: `i: X → M`, `p: NX → X` and a
/// splitting `ρ: NX → Σ₀ = s⁻¹(X)` through the realization chart.
///
/// `phi` and `alpha` are optional user candidates for `t ∘ ρ` and
/// `−ρ^*ω`; when given they are compared with the computed ones.
#[derive(Clone, Debug)]
pub struct TransversalData {
    pub i: MapField,
    pub p: MapField,
    pub rho: MapField,
    pub phi: Option<MapField>,
    pub alpha: Option<crate::fields::TwoFormField>,
}

/// Outcome of [`normal_form_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalFormReport {
    pub points: usize,
    /// Largest principal-angle distance between `φ^!(L)` and `R_α(p^! i^! L)`.
    pub max_discrepancy: f64,
    pub worst_point: Option<Vec<f64>>,
    /// Largest gap between supplied and computed `φ`, `α` (zero if absent).
    pub candidate_residual: f64,
    pub pass: bool,
}

/// Compares `φ^!(L)` with `R_α(p^! i^!(L))` on `grid ⊂ NX`, where
/// `φ = t ∘ ρ` and `α = −ρ^*ω`.
pub fn normal_form_check(pair: &RealizationPair, data: &TransversalData, grid: &[Vec<f64>]) -> Result<NormalFormReport> {
    let l = pair.frame();
    let n = l.dim();
    let (i, p, rho) = (&data.i, &data.p, &data.rho);
    if i.dst_dim() != n || p.dst_dim() != i.src_dim() || p.src_dim() != n || rho.src_dim() != n || rho.dst_dim() != 2 * n {
        return Err(Error::DimensionMismatch(format!(
            "need i: X → ℝ^{n}, p: NX → X and ρ: NX → ℝ^{} with dim NX = {n}",
            2 * n
        )));
    }
    let mut rep =
        NormalFormReport { points: grid.len(), max_discrepancy: 0.0, worst_point: None, candidate_residual: 0.0, pass: true };
    for y in grid {
        let x: Vec<f64> = p.at(y)?.iter().copied().collect();
        let mx: Vec<f64> = i.at(&x)?.iter().copied().collect();
        let di = i.jacobian(&x)?;
        let (u, _) = frame_blocks(l, &mx)?;
        let (_, sv, _) = linalg::svd(&linalg::hcat(&di, &u));
        let smin = if sv.len() < n { 0.0 } else { sv[n - 1] };
        if smin <= DEFAULT_TOL * sv.first().copied().unwrap_or(0.0).max(1.0) {
            return Err(Error::Transversality { point: y.clone(), residual: smin });
        }
        let sigma: Vec<f64> = rho.at(y)?.iter().copied().collect();
        let in_fibre = (DVector::from_column_slice(&sigma[..n]) - DVector::from_column_slice(&mx)).amax();
        if in_fibre > 1e-9 {
            return Err(Error::ChartInconsistent { msg: format!("ρ({y:?}) is not in s⁻¹(X)"), residual: in_fibre });
        }
        let drho = rho.jacobian(y)?;
        let pp = pair.point(&sigma)?;
        let phi_y: Vec<f64> = pp.t.iter().copied().collect();
        let dphi = &pp.dt * &drho;
        if linalg::rank(&dphi, DEFAULT_TOL) < n {
            return Err(Error::RankDrop { point: y.clone(), msg: "t ∘ ρ is not a local diffeomorphism".into() });
        }
        let alpha = -(drho.transpose() * &pp.omega * &drho);
        let lhs = pullback_pt(&dphi, &l.lagrangian(&phi_y)?)?;
        let rhs = gauge_lagrangian(&alpha, &pullback_pt(&p.jacobian(y)?, &pullback_pt(&di, &l.lagrangian(&mx)?)?)?)?;
        let gap = lhs.distance(&rhs);
        if gap > rep.max_discrepancy || rep.worst_point.is_none() {
            rep.max_discrepancy = rep.max_discrepancy.max(gap);
            rep.worst_point = Some(y.clone());
        }
        if let Some(f) = &data.phi {
            rep.candidate_residual = rep.candidate_residual.max((f.at(y)? - &pp.t).amax());
        }
        if let Some(a) = &data.alpha {
            rep.candidate_residual = rep.candidate_residual.max(linalg::max_abs(&(a.at(y)? - &alpha)));
        }
    }
    rep.pass = rep.max_discrepancy < 1e-6 && rep.candidate_residual < 1e-6;
    Ok(rep)
}

/// Outcome of [`twisted_closedness_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosednessReport {
    pub points: usize,
    /// Largest entry of `dω − s^*φ₀ + t^*φ₁`.
    pub max_residual: f64,
    pub worst_point: Option<Vec<f64>>,
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|a| m.row(a).iter().copied().collect()).collect()
}

/// Evaluates `dω − s^*φ₀ + t^*φ₁` on `grid`, with `dω` from central
/// differences of the `ω` evaluator.
pub fn twisted_closedness_check<G: PairGeometry + ?Sized>(
    g: &G,
    phi0: Option<&ThreeFormField>,
    phi1: Option<&ThreeFormField>,
    grid: &[Vec<f64>],
) -> Result<ClosednessReport> {
    let m = g.sigma_dim();
    let mut rep = ClosednessReport { points: grid.len(), max_residual: 0.0, worst_point: None };
    for q in grid {
        let pp = g.point(q)?;
        let dw = fd_d_omega(&|p: &[f64]| g.omega_at(p), q)?;
        let pull = |phi: Option<&ThreeFormField>, at: &DVector<f64>, df: &DMatrix<f64>| -> Result<Tensor3<f64>> {
            match phi {
                Some(f) => Ok(f.at(at.as_slice())?.pull(&rows_of(df), m)),
                None => Ok(Tensor3::zeros(m)),
            }
        };
        let a = pull(phi0, &pp.s, &pp.ds)?;
        let b = pull(phi1, &pp.t, &pp.dt)?;
        let r = Tensor3::from_fn(m, |i, j, k| dw.get(i, j, k) - a.get(i, j, k) + b.get(i, j, k)).max_abs();
        if r > rep.max_residual || rep.worst_point.is_none() {
            rep.max_residual = rep.max_residual.max(r);
            rep.worst_point = Some(q.clone());
        }
    }
    Ok(rep)
}

/// `dim(V ∩ K ∩ W)` at `q` as seen by a tangent subspace computation.
pub fn vkw_at<G: PairGeometry + ?Sized>(g: &G, q: &[f64]) -> Result<usize> {
    Ok(vkw_dim(&g.point(q)?))
}

#[cfg(test)]
mod tests;
