//! Manifest and pair-file formats (schema 1) and their conversion into
//! library objects.
//!
//! Component keys are 1-based index lists such as `"1,2"` or `"1,2,3"`,
//! matching the variable names `x1, x2, ...`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dirac::{foliation_dirac, graph_bivector, graph_two_form, CouplingTriple, DiracFrame};
use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::fields::{BivectorField, MapField, SectionField, ThreeFormField, TwoFormField, VectorField};
use crate::realization::{RealizationPair, RealizeParams};
use crate::verify::PairData;

/// The only schema version understood by this build.
pub const SCHEMA: u32 = 1;

/// Expression strings keyed by 1-based index lists.
pub type Components = BTreeMap<String, String>;

/// Kind of a structure descriptor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureKind {
    /// `Gr(ω)` from the components of `ω`.
    TwoForm,
    /// `Gr(π)` from the components of `π`.
    Bivector,
    /// The foliation of `maps.s`.
    Foliation,
    /// An explicit list of sections.
    Frame,
    /// A coupling triple over `maps.s`.
    Coupling,
}

/// One section `u + ξ` of a frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionSpec {
    pub u: Vec<String>,
    pub xi: Vec<String>,
}

/// Structure descriptor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureSpec {
    pub kind: StructureKind,
    /// `ω` (two_form, coupling) or `π` (bivector).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub components: Components,
    /// Sections of a `frame`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sections: Option<Vec<SectionSpec>>,
    /// Horizontal vector fields of a `coupling`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizontal: Option<Vec<Vec<String>>>,
    /// Bivector of a `coupling`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bivector: Option<Components>,
}

/// Optional maps out of the manifold.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Maps {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<String>>,
}

/// Background three-form of the twisted bracket.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Twist {
    pub components: Components,
}

/// A Dirac structure on a box in `ℝ^dim`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub schema: u32,
    pub name: String,
    pub dim: usize,
    /// `[min, max]` per variable.
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
    pub structure: StructureSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maps: Option<Maps>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<Twist>,
}

/// A diagram given by expression fields, with legs given as manifests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitPair {
    pub name: String,
    pub dim: usize,
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
    pub s: Vec<String>,
    pub t: Vec<String>,
    pub omega: Components,
    pub l0: Manifest,
    pub l1: Manifest,
}

/// `ω` and `t` at one chart point of a realization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSample {
    pub point: Vec<f64>,
    pub t: Vec<f64>,
    /// Rows of the matrix `Ω`.
    pub omega: Vec<Vec<f64>>,
}

/// A realization written by `realize`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RealizedPair {
    pub name: String,
    pub manifest: Manifest,
    pub params: RealizeParams,
    /// Chart `base × [−R, R]ⁿ`, for reference.
    pub chart: BoxDomain,
    /// Reference values, not read back.
    #[serde(default)]
    pub samples: Vec<PairSample>,
}

/// Body of a pair file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PairBody {
    Explicit(ExplicitPair),
    Realization(RealizedPair),
}

/// A pair file: `{"schema": 1, "kind": ..., ...}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairFile {
    pub schema: u32,
    #[serde(flatten)]
    pub body: PairBody,
}

fn manifest_err(ctx: &str, e: impl std::fmt::Display) -> Error {
    Error::Manifest(format!("{ctx}: {e}"))
}

fn check_schema(schema: u32, ctx: &str) -> Result<()> {
    if schema != SCHEMA {
        return Err(manifest_err(ctx, format!("unsupported schema {schema}, expected {SCHEMA}")));
    }
    Ok(())
}

/// Parses one expression, prefixing errors with the location `ctx`.
pub fn parse_at(text: &str, dim: usize, ctx: &str) -> Result<Expr> {
    Expr::parse(text, dim).map_err(|e| manifest_err(ctx, e))
}

fn parse_list(texts: &[String], dim: usize, ctx: &str) -> Result<Vec<Expr>> {
    texts.iter().enumerate().map(|(i, t)| parse_at(t, dim, &format!("{ctx}[{i}]"))).collect()
}

/// Splits `"i,j,..."` into 0-based, strictly increasing indices below `dim`.
fn parse_key(key: &str, arity: usize, dim: usize, ctx: &str) -> Result<Vec<usize>> {
    let idx: Vec<usize> = key
        .split(',')
        .map(|k| k.trim().parse::<usize>().map_err(|_| manifest_err(ctx, format!("bad index list `{key}`"))))
        .collect::<Result<_>>()?;
    if idx.len() != arity {
        return Err(manifest_err(ctx, format!("`{key}` needs {arity} indices")));
    }
    if idx.iter().any(|&i| i == 0 || i > dim) {
        return Err(manifest_err(ctx, format!("`{key}` has an index outside 1..={dim}")));
    }
    if idx.windows(2).any(|w| w[0] >= w[1]) {
        return Err(manifest_err(ctx, format!("`{key}` must be strictly increasing")));
    }
    Ok(idx.into_iter().map(|i| i - 1).collect())
}

fn entries(c: &Components, arity: usize, dim: usize, ctx: &str) -> Result<Vec<(Vec<usize>, Expr)>> {
    c.iter()
        .map(|(k, v)| {
            let at = format!("{ctx}[\"{k}\"]");
            Ok((parse_key(k, arity, dim, &at)?, parse_at(v, dim, &at)?))
        })
        .collect()
}

/// Two-form from `"i,j"` components.
pub fn two_form(c: &Components, dim: usize, ctx: &str) -> Result<TwoFormField> {
    let e = entries(c, 2, dim, ctx)?.into_iter().map(|(k, v)| ((k[0], k[1]), v)).collect();
    TwoFormField::new(dim, e).map_err(|e| manifest_err(ctx, e))
}

/// Bivector from `"i,j"` components.
pub fn bivector(c: &Components, dim: usize, ctx: &str) -> Result<BivectorField> {
    let e = entries(c, 2, dim, ctx)?.into_iter().map(|(k, v)| ((k[0], k[1]), v)).collect();
    BivectorField::new(dim, e).map_err(|e| manifest_err(ctx, e))
}

/// Three-form from `"i,j,k"` components.
pub fn three_form(c: &Components, dim: usize, ctx: &str) -> Result<ThreeFormField> {
    let e = entries(c, 3, dim, ctx)?.into_iter().map(|(k, v)| ((k[0], k[1], k[2]), v)).collect();
    ThreeFormField::new(dim, e).map_err(|e| manifest_err(ctx, e))
}

/// Map `ℝ^src → ℝ^k` from component strings.
pub fn map_field(texts: &[String], src: usize, ctx: &str) -> Result<MapField> {
    MapField::new(src, parse_list(texts, src, ctx)?).map_err(|e| manifest_err(ctx, e))
}

/// Parses a `--map` argument `"expr;expr;..."`.
pub fn parse_map_arg(arg: &str, src: usize) -> Result<MapField> {
    let texts: Vec<String> = arg.split(';').map(|s| s.trim().to_string()).collect();
    if texts.iter().any(|t| t.is_empty()) {
        return Err(Error::Manifest("--map: empty component".into()));
    }
    map_field(&texts, src, "--map")
}

fn domain_of(bounds: &[[f64; 2]], dim: usize, ctx: &str) -> Result<BoxDomain> {
    if bounds.len() != dim {
        return Err(manifest_err(ctx, format!("box has {} intervals for dim {dim}", bounds.len())));
    }
    BoxDomain::new(bounds.iter().map(|b| b[0]).collect(), bounds.iter().map(|b| b[1]).collect())
        .map_err(|e| manifest_err(ctx, e))
}

impl Manifest {
    /// Reads and validates a manifest file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| manifest_err(&path.display().to_string(), e))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: Manifest = serde_json::from_str(text).map_err(|e| manifest_err("manifest", e))?;
        m.validate()?;
        Ok(m)
    }

    /// Checks the schema and parses every expression once.
    pub fn validate(&self) -> Result<()> {
        check_schema(self.schema, &self.name)?;
        self.frame()?;
        self.twist()?;
        self.map("s")?;
        self.map("t")?;
        Ok(())
    }

    pub fn domain(&self) -> Result<BoxDomain> {
        domain_of(&self.bounds, self.dim, &format!("{}.box", self.name))
    }

    /// `maps.s` or `maps.t`, when present.
    pub fn map(&self, which: &str) -> Result<Option<MapField>> {
        let texts = self.maps.as_ref().and_then(|m| if which == "s" { m.s.as_ref() } else { m.t.as_ref() });
        texts.map(|t| map_field(t, self.dim, &format!("{}.maps.{which}", self.name))).transpose()
    }

    /// The twist `φ`, when present.
    pub fn twist(&self) -> Result<Option<ThreeFormField>> {
        let ctx = format!("{}.twist.components", self.name);
        self.twist.as_ref().map(|t| three_form(&t.components, self.dim, &ctx)).transpose()
    }

    fn required_s(&self) -> Result<MapField> {
        self.map("s")?.ok_or_else(|| manifest_err(&self.name, "this structure kind needs maps.s"))
    }

    /// The Dirac frame described by the structure, on the manifest box.
    pub fn frame(&self) -> Result<DiracFrame> {
        let n = self.dim;
        let st = &self.structure;
        let ctx = format!("{}.structure.components", self.name);
        let unused = |what: &str, present: bool| -> Result<()> {
            if present {
                return Err(manifest_err(&self.name, format!("`{what}` does not apply to this structure kind")));
            }
            Ok(())
        };
        let domain = self.domain()?;
        let frame = match st.kind {
            StructureKind::TwoForm | StructureKind::Bivector | StructureKind::Foliation | StructureKind::Frame => {
                unused("horizontal", st.horizontal.is_some())?;
                unused("bivector", st.bivector.is_some())?;
                if st.kind != StructureKind::Frame {
                    unused("sections", st.sections.is_some())?;
                }
                match st.kind {
                    StructureKind::TwoForm => graph_two_form(&two_form(&st.components, n, &ctx)?),
                    StructureKind::Bivector => graph_bivector(&bivector(&st.components, n, &ctx)?),
                    StructureKind::Foliation => {
                        unused("components", !st.components.is_empty())?;
                        foliation_dirac(&self.required_s()?).map_err(|e| manifest_err(&self.name, e))?
                    }
                    _ => {
                        unused("components", !st.components.is_empty())?;
                        let secs = st.sections.as_ref().ok_or_else(|| manifest_err(&self.name, "frame needs sections"))?;
                        let fields = secs
                            .iter()
                            .enumerate()
                            .map(|(i, sec)| {
                                let at = format!("{}.structure.sections[{i}]", self.name);
                                if sec.u.len() != n || sec.xi.len() != n {
                                    return Err(manifest_err(&at, format!("u and xi need {n} components each")));
                                }
                                let u = VectorField::new(parse_list(&sec.u, n, &format!("{at}.u"))?)
                                    .map_err(|e| manifest_err(&at, e))?;
                                let xi = parse_list(&sec.xi, n, &format!("{at}.xi"))?;
                                let xi = crate::fields::OneFormField::new(xi).map_err(|e| manifest_err(&at, e))?;
                                SectionField::new(u, xi).map_err(|e| manifest_err(&at, e))
                            })
                            .collect::<Result<Vec<_>>>()?;
                        DiracFrame::new(fields).map_err(|e| manifest_err(&self.name, e))?
                    }
                }
            }
            StructureKind::Coupling => {
                unused("sections", st.sections.is_some())?;
                let s = self.required_s()?;
                let h = st
                    .horizontal
                    .as_ref()
                    .ok_or_else(|| manifest_err(&self.name, "coupling needs horizontal fields"))?
                    .iter()
                    .enumerate()
                    .map(|(i, v)| {
                        let at = format!("{}.structure.horizontal[{i}]", self.name);
                        VectorField::new(parse_list(v, n, &at)?).map_err(|e| manifest_err(&at, e))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let w = two_form(&st.components, n, &ctx)?;
                let pi = bivector(
                    st.bivector.as_ref().unwrap_or(&Components::new()),
                    n,
                    &format!("{}.structure.bivector", self.name),
                )?;
                let triple = CouplingTriple::new(s, h, w, pi).map_err(|e| manifest_err(&self.name, e))?;
                return triple.frame(&domain).map_err(|e| manifest_err(&self.name, e));
            }
        };
        if frame.dim() != n {
            return Err(manifest_err(&self.name, format!("structure lives on ℝ^{}, manifest dim is {n}", frame.dim())));
        }
        frame.with_domain(domain).map_err(|e| manifest_err(&self.name, e))
    }
}

impl PairFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| manifest_err(&path.display().to_string(), e))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: PairFile = serde_json::from_str(text).map_err(|e| manifest_err("pair file", e))?;
        check_schema(p.schema, "pair file")?;
        Ok(p)
    }

    pub fn name(&self) -> &str {
        match &self.body {
            PairBody::Explicit(e) => &e.name,
            PairBody::Realization(r) => &r.name,
        }
    }

    /// The diagram for verification.
    pub fn pair_data(&self) -> Result<PairData> {
        match &self.body {
            PairBody::Explicit(e) => {
                let n = e.dim;
                let domain = domain_of(&e.bounds, n, &format!("{}.box", e.name))?;
                let s = map_field(&e.s, n, &format!("{}.s", e.name))?;
                let t = map_field(&e.t, n, &format!("{}.t", e.name))?;
                let w = two_form(&e.omega, n, &format!("{}.omega", e.name))?;
                e.l0.validate()?;
                e.l1.validate()?;
                PairData::explicit(s, t, w, e.l0.frame()?, e.l1.frame()?, domain).map_err(|err| manifest_err(&e.name, err))
            }
            PairBody::Realization(r) => {
                r.manifest.validate()?;
                let pair = RealizationPair::from_parts(&r.manifest.frame()?, r.params).map_err(|e| manifest_err(&r.name, e))?;
                Ok(PairData::realized(pair))
            }
        }
    }
}
