//! The four single-input commands. Each returns a [`Report`] whose
//! `success` flag decides between exit codes 0 and 1; an `Err` means an
//! input error (exit code 2).

use std::path::Path;

use serde_json::json;

use crate::dirac::{
    family_courant, family_jump, is_dirac_twisted, pushforward_family, rank_profile, submersion_jacobian,
    FAMILY_STEP,
};
use crate::domain::DEFAULT_SEED;
use crate::error::{Error, Result};
use crate::lindirac::{as_cotangent, as_tangent, LagrangianSubspace, Subspace};
use crate::realization::{build_realization, zero_section_checks, RealizationPair, RealizeParams};
use crate::verify::{equivalence_matrix, poisson_leg_check, verify_dual_pair, Classification, PairData, PairGeometry};

use super::manifest::{parse_map_arg, Manifest, PairBody, PairFile, PairSample, RealizedPair, SCHEMA};
use super::report::Report;

/// Largest neighbour distance of `Lˢ` still read as continuous.
pub const JUMP_TOL: f64 = 1e-2;
/// Zero-section flow Jacobian tolerance.
pub const FLOW_TOL: f64 = 1e-8;
/// Zero-section form tolerance.
pub const FORM_TOL: f64 = 1e-6;
/// Spray axiom tolerance.
pub const SPRAY_TOL: f64 = 1e-9;
/// Number of `(point, t, ω)` reference samples stored in a pair file.
pub const PAIR_SAMPLES: usize = 5;

/// `check-dirac`: Lagrangian rank and the (twisted) Courant tensor on a grid.
pub fn cmd_check_dirac(m: &Manifest, grid: usize, tol: f64) -> Result<Report> {
    let l = m.frame()?;
    let phi = m.twist()?;
    let pts = m.domain()?.grid(grid);
    let rep = is_dirac_twisted(&l, phi.as_ref(), &pts, tol);
    let mut r = Report::new("check-dirac");
    r.param("manifest", &m.name).param("grid", grid).param("tol", tol);
    r.checks.push(crate::verify::Check {
        name: "lagrangian".into(),
        passed: rep.lagrangian,
        max_residual: rep.max_isotropy,
        worst_point: None,
    });
    let name = if phi.is_some() { "twisted courant tensor" } else { "courant tensor" };
    r.check(name, rep.max_courant, tol, rep.worst_point.clone());
    r.details = json!({ "points": rep.points, "twisted": phi.is_some(), "failure": rep.failure });
    r.success = rep.pass;
    Ok(r)
}

fn tangent_and_cotangent_dims(l: &LagrangianSubspace) -> Result<(usize, usize)> {
    let n = l.n();
    let t = as_tangent(&Subspace::full(n));
    let c = as_cotangent(&Subspace::full(n));
    Ok((l.intersect(&t)?.dim(), l.intersect(&c)?.dim()))
}

/// `pushforward`: the family `Lˢ` along `s`, its rank profile, and whether
/// `s` pushes the structure forward.
pub fn cmd_pushforward(m: &Manifest, map: Option<&str>, grid: usize, tol: f64) -> Result<Report> {
    let l = m.frame()?;
    let s = match map {
        Some(arg) => parse_map_arg(arg, m.dim)?,
        None => m.map("s")?.ok_or_else(|| Error::Manifest("pushforward needs --map or maps.s".into()))?,
    };
    let pts = m.domain()?.grid(grid);
    for p in &pts {
        submersion_jacobian(&s, p)?;
    }
    let profile = rank_profile(&l, &s, None, &pts)?;

    let (mut jump, mut jump_at) = (0.0, None);
    let (mut bracket, mut bracket_at) = (0.0, None);
    for p in &pts {
        let j = family_jump(&l, &s, p, FAMILY_STEP)?;
        if j > jump || jump_at.is_none() {
            jump = j;
            jump_at = Some(p.clone());
        }
        let c = family_courant(&l, &s, p)?.max_abs();
        if c > bracket || bracket_at.is_none() {
            bracket = c;
            bracket_at = Some(p.clone());
        }
    }

    // s_!(L_p) must only depend on s(p)
    let mut images: Vec<(Vec<f64>, LagrangianSubspace)> = Vec::new();
    let (mut spread, mut spread_at) = (0.0, None);
    for p in &pts {
        let q: Vec<f64> = s.at(p)?.iter().copied().collect();
        let pushed = pushforward_family(&l, &s, p)?;
        match images.iter().find(|(x, _)| x.iter().zip(&q).all(|(a, b)| (a - b).abs() <= 1e-12)) {
            Some((_, first)) => {
                let d = first.distance(pushed.subspace());
                if d > spread || spread_at.is_none() {
                    spread = d;
                    spread_at = Some(p.clone());
                }
            }
            None => images.push((q, pushed)),
        }
    }

    let mut r = Report::new("pushforward");
    r.param("manifest", &m.name).param("grid", grid).param("tol", tol);
    r.param("map", s.components().iter().map(|e| e.to_string()).collect::<Vec<_>>());
    let smooth = r.check("L^s continuity", jump, JUMP_TOL, jump_at);
    let involutive = r.check("L^s involutive", bracket, tol, bracket_at);
    let consistent = r.check("fibre consistency", spread, tol, spread_at);
    r.success = smooth && involutive && consistent;
    let pushed = images
        .iter()
        .map(|(q, lq)| {
            let (t, c) = tangent_and_cotangent_dims(lq)?;
            Ok(json!({ "point": q, "tangent_dim": t, "cotangent_dim": c }))
        })
        .collect::<Result<Vec<_>>>()?;
    r.details = json!({
        "verdict": if r.success { "forward" } else { "not forward" },
        "rank_profile": profile,
        "pushed": if consistent { pushed } else { Vec::new() },
    });
    Ok(r)
}

/// Whether an error from the realization build is a verdict failure (the
/// chart collapsed) rather than bad input.
fn is_collapse(e: &Error) -> bool {
    matches!(e, Error::ChartExit { .. } | Error::RankDrop { .. } | Error::NonFinite(_) | Error::Quadrature(_))
}

fn pair_samples(pair: &RealizationPair) -> Result<Vec<PairSample>> {
    pair.chart()
        .random_points(PAIR_SAMPLES, DEFAULT_SEED)
        .into_iter()
        .map(|q| {
            let w = pair.omega_at(&q)?;
            Ok(PairSample {
                t: pair.t_at(&q)?.iter().copied().collect(),
                omega: (0..w.nrows()).map(|i| w.row(i).iter().copied().collect()).collect(),
                point: q,
            })
        })
        .collect()
}

/// Builds the realization; `Ok(Err(report))` when the chart collapsed.
pub fn realize_pair(m: &Manifest, params: RealizeParams) -> Result<std::result::Result<RealizationPair, Report>> {
    let l = m.frame()?;
    match build_realization(&l, params) {
        Ok(pair) => Ok(Ok(pair)),
        Err(e) if is_collapse(&e) => {
            let mut r = Report::new("realize");
            r.param("manifest", &m.name).param("params", params);
            r.checks.push(crate::verify::Check {
                name: "chart".into(),
                passed: false,
                max_residual: f64::INFINITY,
                worst_point: None,
            });
            r.details = json!({ "failure": e.to_string() });
            r.success = false;
            Ok(Err(r))
        }
        Err(e) => Err(e),
    }
}

/// `realize`: builds the pair, runs the zero-section checks and optionally
/// writes the pair file.
pub fn cmd_realize(m: &Manifest, params: RealizeParams, samples: usize, out: Option<&Path>) -> Result<Report> {
    let pair = match realize_pair(m, params)? {
        Ok(pair) => pair,
        Err(report) => return Ok(report),
    };
    let base = pair.base().random_points(samples, DEFAULT_SEED);
    let zs = zero_section_checks(&pair, &base)?;
    let spray = pair.spray().axiom_residuals(&pair.chart().random_points(samples, DEFAULT_SEED))?;

    let mut r = Report::new("realize");
    r.param("manifest", &m.name).param("params", params).param("samples", samples);
    let ok = [
        r.check("zero-section flow", zs.flow_residual, FLOW_TOL, zs.worst_point.clone()),
        r.check("zero-section form", zs.form_residual, FORM_TOL, zs.worst_point.clone()),
        r.check("zero-section V∩K∩W", zs.max_vkw_dim as f64, 0.0, zs.worst_point.clone()),
        r.check("spray fibre projection", spray.spr1, SPRAY_TOL, None),
        r.check("spray homogeneity", spray.spr2, SPRAY_TOL, None),
    ];
    r.success = ok.iter().all(|&b| b);
    let dims = [pair.sigma_dim(), pair.m0_dim(), pair.m1_dim()];
    r.details = json!({
        "radius": pair.radius(),
        "chart": pair.chart(),
        "dims": dims,
    });
    if let Some(path) = out {
        let file = PairFile {
            schema: SCHEMA,
            body: PairBody::Realization(RealizedPair {
                name: m.name.clone(),
                manifest: m.clone(),
                params: pair.params(),
                chart: pair.chart(),
                samples: pair_samples(&pair)?,
            }),
        };
        let mut text = serde_json::to_string_pretty(&file)?;
        text.push('\n');
        std::fs::write(path, text)?;
    }
    Ok(r)
}

/// `verify-pair` on an already loaded diagram.
pub fn verify_pair_data(
    name: &str,
    p: &PairData,
    samples: usize,
    tol: f64,
    expect: Option<Classification>,
) -> Result<Report> {
    let pts = p.samples(samples);
    let v = verify_dual_pair(p, &pts, tol)?;
    let eq = equivalence_matrix(p, &pts, tol)?;
    let legs = poisson_leg_check(p, &pts, tol)?;
    let mut r = Report::new("verify-pair");
    r.param("pair", name).param("samples", samples).param("tol", tol);
    if let Some(e) = expect {
        r.param("expect", e);
    }
    r.classification = Some(v.classification);
    r.success = expect.map_or(true, |e| v.classification >= e);
    r.details = json!({
        "dims": v.dims,
        "points": v.points,
        "notes": v.notes,
        "equivalence": eq,
        "poisson_legs": legs,
    });
    r.checks = v.checks;
    Ok(r)
}

/// `verify-pair`: full verdict, the four equivalent characterizations and
/// the Poisson test of each leg.
pub fn cmd_verify_pair(f: &PairFile, samples: usize, tol: f64, expect: Option<Classification>) -> Result<Report> {
    verify_pair_data(f.name(), &f.pair_data()?, samples, tol, expect)
}
