//! The family `Lˢ = s^!(s_!(L))` of a submersion and its diagnostics.

use crate::error::{Error, Result};
use crate::expr::{Expr, Node};
use crate::fields::{dorfman_from_jets, MapField, SectionJet, Tensor3, TwoFormField};
use crate::lindirac::{
    as_tangent, map_kernel, omega_orthogonal, perp, pullback_pt, pushforward_pt, LagrangianSubspace, Subspace,
};
use crate::linalg::DEFAULT_TOL;

use super::{antisymmetrize, submersion_jacobian, DiracFrame};

fn vertical(s: &MapField, p: &[f64]) -> Result<(nalgebra::DMatrix<f64>, Subspace)> {
    let ds = submersion_jacobian(s, p)?;
    let v = as_tangent(&map_kernel(&ds, DEFAULT_TOL));
    Ok((ds, v))
}

fn check_source(l: &DiracFrame, s: &MapField) -> Result<()> {
    if l.dim() != s.src_dim() {
        return Err(Error::DimensionMismatch(format!(
            "structure on ℝ^{}, map from ℝ^{}",
            l.dim(),
            s.src_dim()
        )));
    }
    Ok(())
}

/// `Lˢ_p = L_p ∩ V^⊥ + V` with `V = ker ds(p)`.
pub fn family_ls(l: &DiracFrame, s: &MapField, p: &[f64]) -> Result<LagrangianSubspace> {
    check_source(l, s)?;
    let (_, v) = vertical(s, p)?;
    let lp = l.subspace(p)?;
    LagrangianSubspace::new(lp.intersect(&perp(&v)?)?.sum(&v)?)
}

/// Step of the central differences behind [`family_courant`] and
/// [`family_jump`].
pub const FAMILY_STEP: f64 = 1e-4;

/// Courant tensor of `Lˢ` at `p`, on the frame obtained by projecting an
/// orthonormal basis of `Lˢ_p` onto nearby fibres. Jets come from central
/// differences, so entries carry an `O(h²)` error.
pub fn family_courant(l: &DiracFrame, s: &MapField, p: &[f64]) -> Result<Tensor3<f64>> {
    let n = l.dim();
    let b = family_ls(l, s, p)?.basis().clone();
    let frame_at = |q: &[f64]| -> Result<nalgebra::DMatrix<f64>> {
        let bq = family_ls(l, s, q)?.basis().clone();
        Ok(&bq * (bq.transpose() * &b))
    };
    let mut derivs = Vec::with_capacity(n);
    for j in 0..n {
        let mut qp = p.to_vec();
        let mut qm = p.to_vec();
        qp[j] += FAMILY_STEP;
        qm[j] -= FAMILY_STEP;
        derivs.push((frame_at(&qp)? - frame_at(&qm)?) / (2.0 * FAMILY_STEP));
    }
    let jets: Vec<SectionJet<f64>> = (0..n)
        .map(|k| SectionJet {
            u: (0..n).map(|i| b[(i, k)]).collect(),
            xi: (0..n).map(|i| b[(n + i, k)]).collect(),
            du: (0..n).map(|i| (0..n).map(|j| derivs[j][(i, k)]).collect()).collect(),
            dxi: (0..n).map(|i| (0..n).map(|j| derivs[j][(n + i, k)]).collect()).collect(),
        })
        .collect();
    let pair = |a: &(Vec<f64>, Vec<f64>), e: &SectionJet<f64>| -> f64 {
        (0..n).map(|i| a.0[i] * e.xi[i] + a.1[i] * e.u[i]).sum()
    };
    let mut raw = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            let br = dorfman_from_jets(&jets[i], &jets[j]);
            for k in 0..n {
                raw[(i * n + j) * n + k] = pair(&br, &jets[k]);
            }
        }
    }
    Ok(antisymmetrize(&Tensor3::from_fn(n, |i, j, k| raw[(i * n + j) * n + k])))
}

/// Largest distance between `Lˢ_p` and `Lˢ` at the points `p ± h eⱼ`.
/// Smooth families give `O(h)`; a discontinuity at `p` gives a value of
/// order one.
pub fn family_jump(l: &DiracFrame, s: &MapField, p: &[f64], h: f64) -> Result<f64> {
    let lp = family_ls(l, s, p)?;
    let mut worst: f64 = 0.0;
    for j in 0..p.len() {
        for sign in [-1.0, 1.0] {
            let mut q = p.to_vec();
            q[j] += sign * h;
            worst = worst.max(lp.distance(family_ls(l, s, &q)?.subspace()));
        }
    }
    Ok(worst)
}

/// `s_!(L_p)`, a Lagrangian subspace over `s(p)`.
pub fn pushforward_family(l: &DiracFrame, s: &MapField, p: &[f64]) -> Result<LagrangianSubspace> {
    check_source(l, s)?;
    let ds = submersion_jacobian(s, p)?;
    pushforward_pt(&ds, &l.lagrangian(p)?)
}

/// Dimensions entering the smoothness of `Lˢ` at one sample point.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct RankRow {
    pub point: Vec<f64>,
    pub l_cap_v: usize,
    pub l_cap_vperp: usize,
    /// `dim V^ω`, when a two-form was supplied.
    pub v_omega: Option<usize>,
}

/// Grid-level rank report. A jump certifies that the family is not smooth;
/// constant ranks prove nothing beyond the grid.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct RankProfile {
    pub rows: Vec<RankRow>,
    /// One message per quantity whose rank changes over the grid.
    pub jumps: Vec<String>,
    pub flagged: bool,
}

/// Ranks of `L ∩ V`, `L ∩ V^⊥` and (given `w`) `V^ω` over `grid`.
pub fn rank_profile(
    l: &DiracFrame,
    s: &MapField,
    w: Option<&TwoFormField>,
    grid: &[Vec<f64>],
) -> Result<RankProfile> {
    check_source(l, s)?;
    let mut rows = Vec::with_capacity(grid.len());
    for p in grid {
        let (ds, v) = vertical(s, p)?;
        let lp = l.subspace(p)?;
        let v_omega = match w {
            Some(w) => Some(omega_orthogonal(&map_kernel(&ds, DEFAULT_TOL), &w.at(p)?)?.dim()),
            None => None,
        };
        rows.push(RankRow {
            point: p.clone(),
            l_cap_v: lp.intersect(&v)?.dim(),
            l_cap_vperp: lp.intersect(&perp(&v)?)?.dim(),
            v_omega,
        });
    }
    let mut jumps = Vec::new();
    let mut report = |name: &str, vals: Vec<usize>| {
        if let (Some(lo), Some(hi)) = (vals.iter().min(), vals.iter().max()) {
            if lo != hi {
                let at = rows.iter().zip(&vals).find(|(_, v)| *v != vals.first().unwrap()).map(|(r, _)| r.point.clone());
                jumps.push(format!("dim {name} ranges over {lo}..={hi} (first change at {:?})", at.unwrap_or_default()));
            }
        }
    };
    report("L∩V", rows.iter().map(|r| r.l_cap_v).collect());
    report("L∩V^⊥", rows.iter().map(|r| r.l_cap_vperp).collect());
    if w.is_some() {
        report("V^ω", rows.iter().filter_map(|r| r.v_omega).collect());
    }
    let flagged = !jumps.is_empty();
    Ok(RankProfile { rows, jumps, flagged })
}

/// `L_M` at a target point, recovered as `σ^!(L)` from a local section.
#[derive(Clone, Debug)]
pub struct Recovered {
    pub target_point: Vec<f64>,
    pub structure: LagrangianSubspace,
}

/// Outcome of [`basic_check`].
#[derive(Clone, Debug)]
pub struct BasicReport {
    pub pass: bool,
    /// Largest sine of the angle by which `V` leaves `L`.
    pub max_residual: f64,
    pub worst_point: Option<Vec<f64>>,
    /// Recovered base structure at the images of the grid (when passing).
    pub recovered: Vec<Recovered>,
    pub failure: Option<String>,
}

/// The constant-fibre section of a coordinate projection: the projected
/// coordinates come from the base point, the others from `fill`.
pub fn constant_fibre_section(s: &MapField, fill: &[f64]) -> Result<MapField> {
    let k = s.dst_dim();
    let n = s.src_dim();
    let mut comps = vec![None; n];
    for (a, e) in s.components().iter().enumerate() {
        match e.node() {
            Node::Var(i) if comps[*i].is_none() => comps[*i] = Some(Expr::var(a, k)),
            _ => {
                return Err(Error::Invalid(
                    "the default section needs a coordinate projection; supply a section".into(),
                ))
            }
        }
    }
    let comps = comps.into_iter().enumerate().map(|(i, c)| c.unwrap_or_else(|| Expr::constant(fill[i], k))).collect();
    MapField::new(k, comps)
}

/// Tests `V ⊂ L` on `grid`; on success recovers `L_M = σ^!(L)` at the image
/// points, with `σ` the supplied section or the constant-fibre section
/// through the domain center.
pub fn basic_check(
    l: &DiracFrame,
    s: &MapField,
    sigma: Option<&MapField>,
    grid: &[Vec<f64>],
    tol: f64,
) -> BasicReport {
    let mut rep = BasicReport { pass: true, max_residual: 0.0, worst_point: None, recovered: Vec::new(), failure: None };
    let fail = |rep: &mut BasicReport, msg: String| {
        rep.pass = false;
        rep.failure.get_or_insert(msg);
    };
    if let Err(e) = check_source(l, s) {
        fail(&mut rep, e.to_string());
        return rep;
    }
    for p in grid {
        match vertical(s, p).and_then(|(_, v)| Ok(l.subspace(p)?.containment_gap(&v))) {
            Ok(r) => {
                if r > rep.max_residual || rep.worst_point.is_none() {
                    rep.max_residual = rep.max_residual.max(r);
                    rep.worst_point = Some(p.clone());
                }
            }
            Err(e) => fail(&mut rep, e.to_string()),
        }
    }
    if rep.max_residual > tol {
        rep.pass = false;
    }
    if !rep.pass {
        return rep;
    }
    let sigma = match sigma {
        Some(sg) => sg.clone(),
        None => match constant_fibre_section(s, &l.domain().center()) {
            Ok(sg) => sg,
            Err(e) => {
                fail(&mut rep, e.to_string());
                return rep;
            }
        },
    };
    let mut seen: Vec<Vec<f64>> = Vec::new();
    for p in grid {
        let step = (|| -> Result<Option<Recovered>> {
            let q: Vec<f64> = s.at(p)?.iter().copied().collect();
            if seen.contains(&q) {
                return Ok(None);
            }
            let x: Vec<f64> = sigma.at(&q)?.iter().copied().collect();
            let structure = pullback_pt(&sigma.jacobian(&q)?, &l.lagrangian(&x)?)?;
            Ok(Some(Recovered { target_point: q, structure }))
        })();
        match step {
            Ok(Some(r)) => {
                seen.push(r.target_point.clone());
                rep.recovered.push(r);
            }
            Ok(None) => {}
            Err(e) => fail(&mut rep, e.to_string()),
        }
    }
    rep
}
