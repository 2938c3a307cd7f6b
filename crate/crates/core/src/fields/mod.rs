//! Fields on a coordinate patch of ℝⁿ with [`Expr`] coefficients: vector
//! fields, forms of degree one to three, bivectors, sections of 𝕋M and maps.
//!
//! Brackets, exterior derivatives and pullbacks are evaluated pointwise.
//! Every evaluator is generic over [`Scalar`], so running it on dual numbers
//! yields its derivatives; this is how brackets of brackets are formed.
//!
//! Conventions: `dx∧dy(∂x, ∂y) = +1`, `ι` inserts into the first slot, and
//! `ℒ_u = d ι_u + ι_u d`. Component indices are zero-based.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::expr::{Dual, Expr, Scalar};
use crate::lindirac::SplitVector;

fn check_dims(exprs: &[Expr], n: usize, what: &str) -> Result<()> {
    match exprs.iter().find(|e| e.dim() != n) {
        Some(e) => Err(Error::DimensionMismatch(format!(
            "{what} component lives in dimension {}, expected {n}",
            e.dim()
        ))),
        None => Ok(()),
    }
}

fn check_point<S>(p: &[S], n: usize) -> Result<()> {
    if p.len() != n {
        return Err(Error::DimensionMismatch(format!("point has {} coordinates, field expects {n}", p.len())));
    }
    Ok(())
}

fn parse_all(n: usize, texts: &[&str]) -> Result<Vec<Expr>> {
    texts.iter().map(|t| Expr::parse(t, n)).collect()
}

fn values<S: Scalar>(exprs: &[Expr], p: &[S]) -> Result<Vec<S>> {
    exprs.iter().map(|e| e.eval(p)).collect()
}

/// Values and Jacobian `jac[i][j] = ∂ⱼ eᵢ` of a list of expressions.
fn jets<S: Scalar>(exprs: &[Expr], p: &[S]) -> Result<(Vec<S>, Vec<Vec<S>>)> {
    let seeded = Dual::seed(p);
    let n = p.len();
    let mut val = Vec::with_capacity(exprs.len());
    let mut jac = Vec::with_capacity(exprs.len());
    for e in exprs {
        let d = e.eval(&seeded)?;
        jac.push((0..n).map(|j| d.part(j)).collect());
        val.push(d.v);
    }
    Ok((val, jac))
}

/// Splits dual numbers into values and partials.
fn unzip_duals<S: Scalar>(xs: Vec<Dual<S>>, n: usize) -> (Vec<S>, Vec<Vec<S>>) {
    let jac = xs.iter().map(|x| (0..n).map(|j| x.part(j)).collect()).collect();
    (xs.into_iter().map(|x| x.v).collect(), jac)
}

fn to_dvector(v: Vec<f64>) -> DVector<f64> {
    DVector::from_vec(v)
}

fn to_dmatrix(m: &[Vec<f64>], rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |i, j| m[i][j])
}

/// A fully antisymmetric array `T[i][j][k]`, the value of a three-form.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> Tensor3<S> {
    pub fn zeros(n: usize) -> Self {
        Tensor3 { n, data: vec![S::zero(); n * n * n] }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    data.push(f(i, j, k));
                }
            }
        }
        Tensor3 { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> S {
        self.data[(i * self.n + j) * self.n + k].clone()
    }

    /// `T(u, v, ·)`.
    pub fn contract(&self, u: &[S], v: &[S]) -> Vec<S> {
        let n = self.n;
        (0..n)
            .map(|k| {
                let mut acc = S::zero();
                for i in 0..n {
                    for j in 0..n {
                        acc = acc + self.get(i, j, k) * u[i].clone() * v[j].clone();
                    }
                }
                acc
            })
            .collect()
    }

    /// `T(DF·, DF·, DF·)` for a Jacobian `df` with `df[a][i] = ∂ᵢFᵃ`.
    pub fn pull(&self, df: &[Vec<S>], m: usize) -> Tensor3<S> {
        let n = self.n;
        Tensor3::from_fn(m, |i, j, k| {
            let mut acc = S::zero();
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        acc = acc + self.get(a, b, c) * df[a][i].clone() * df[b][j].clone() * df[c][k].clone();
                    }
                }
            }
            acc
        })
    }
}

impl Tensor3<f64> {
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    /// Largest entry of `self − other`, infinite when dimensions differ.
    pub fn distance(&self, other: &Tensor3<f64>) -> f64 {
        if self.n != other.n {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).fold(0.0, |a, (x, y)| a.max((x - y).abs()))
    }
}

/// Exterior derivative of a two-form from the jets of its full component
/// matrix: `(dβ)_{abc} = ∂_a β_{bc} − ∂_b β_{ac} + ∂_c β_{ab}`.
pub(crate) fn d_of_two_form_jet<S: Scalar>(m: &[Vec<Dual<S>>]) -> Tensor3<S> {
    let n = m.len();
    Tensor3::from_fn(n, |a, b, c| m[b][c].part(a) - m[a][c].part(b) + m[a][b].part(c))
}

/// `(dα)_{ij} = ∂ᵢαⱼ − ∂ⱼαᵢ` from the Jacobian `jac[j][i] = ∂ᵢαⱼ`.
fn d_of_one_form_jet<S: Scalar>(jac: &[Vec<S>]) -> Vec<Vec<S>> {
    let n = jac.len();
    (0..n).map(|i| (0..n).map(|j| jac[j][i].clone() - jac[i][j].clone()).collect()).collect()
}

/// A vector field `Σ uⁱ ∂ᵢ`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    comps: Vec<Expr>,
}

impl VectorField {
    pub fn new(comps: Vec<Expr>) -> Result<Self> {
        check_dims(&comps, comps.len(), "vector field")?;
        Ok(VectorField { comps })
    }

    pub fn parse(texts: &[&str]) -> Result<Self> {
        Self::new(parse_all(texts.len(), texts)?)
    }

    pub fn zero(n: usize) -> Self {
        VectorField { comps: vec![Expr::zero(n); n] }
    }

    /// The coordinate field `∂ᵢ`.
    pub fn coordinate(i: usize, n: usize) -> Self {
        let comps = (0..n).map(|k| Expr::constant(if k == i { 1.0 } else { 0.0 }, n)).collect();
        VectorField { comps }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    pub fn eval<S: Scalar>(&self, p: &[S]) -> Result<Vec<S>> {
        check_point(p, self.dim())?;
        values(&self.comps, p)
    }

    pub fn at(&self, p: &[f64]) -> Result<DVector<f64>> {
        self.eval(p).map(to_dvector)
    }

    /// Values and Jacobian `jac[i][j] = ∂ⱼuⁱ`.
    pub fn jet<S: Scalar>(&self, p: &[S]) -> Result<(Vec<S>, Vec<Vec<S>>)> {
        check_point(p, self.dim())?;
        jets(&self.comps, p)
    }
}

/// A one-form `Σ ξᵢ dxⁱ`.
#[derive(Clone, Debug, PartialEq)]
pub struct OneFormField {
    comps: Vec<Expr>,
}

impl OneFormField {
    pub fn new(comps: Vec<Expr>) -> Result<Self> {
        check_dims(&comps, comps.len(), "one-form")?;
        Ok(OneFormField { comps })
    }

    pub fn parse(texts: &[&str]) -> Result<Self> {
        Self::new(parse_all(texts.len(), texts)?)
    }

    pub fn zero(n: usize) -> Self {
        OneFormField { comps: vec![Expr::zero(n); n] }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    pub fn eval<S: Scalar>(&self, p: &[S]) -> Result<Vec<S>> {
        check_point(p, self.dim())?;
        values(&self.comps, p)
    }

    pub fn at(&self, p: &[f64]) -> Result<DVector<f64>> {
        self.eval(p).map(to_dvector)
    }

    /// Values and Jacobian `jac[i][j] = ∂ⱼξᵢ`.
    pub fn jet<S: Scalar>(&self, p: &[S]) -> Result<(Vec<S>, Vec<Vec<S>>)> {
        check_point(p, self.dim())?;
        jets(&self.comps, p)
    }

    /// Full component matrix of `dα` at `p`.
    pub fn d_eval<S: Scalar>(&self, p: &[S]) -> Result<Vec<Vec<S>>> {
        let (_, jac) = self.jet(p)?;
        Ok(d_of_one_form_jet(&jac))
    }

    pub fn d_at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let n = self.dim();
        Ok(to_dmatrix(&self.d_eval(p)?, n, n))
    }

    /// `d(dα)` at `p`, from second derivatives through nested jets.
    pub fn dd_at(&self, p: &[f64]) -> Result<Tensor3<f64>> {
        let m = self.d_eval(&Dual::seed(p))?;
        Ok(d_of_two_form_jet(&m))
    }

    /// `(F*α)(p) = DFᵀ α(F(p))`.
    pub fn pullback_at(&self, f: &MapField, p: &[f64]) -> Result<DVector<f64>> {
        check_target(f, self.dim())?;
        let (fp, df) = f.jet(p)?;
        let a = self.eval(&fp)?;
        Ok(DVector::from_fn(f.src_dim(), |i, _| (0..self.dim()).map(|k| a[k] * df[k][i]).sum()))
    }
}

fn check_target(f: &MapField, n: usize) -> Result<()> {
    if f.dst_dim() != n {
        return Err(Error::DimensionMismatch(format!("map lands in dimension {}, form lives in {n}", f.dst_dim())));
    }
    Ok(())
}

/// Component map of an antisymmetric two-tensor, keyed by `(i, j)`, `i < j`.
#[derive(Clone, Debug, PartialEq)]
struct Pairs {
    n: usize,
    comps: BTreeMap<(usize, usize), Expr>,
}

impl Pairs {
    fn new(n: usize, entries: Vec<((usize, usize), Expr)>, what: &str) -> Result<Self> {
        let mut comps = BTreeMap::new();
        for ((i, j), e) in entries {
            if !(i < j && j < n) {
                return Err(Error::Invalid(format!("{what} component ({i},{j}) needs i < j < {n}")));
            }
            if e.dim() != n {
                return Err(Error::DimensionMismatch(format!("{what} component lives in dimension {}", e.dim())));
            }
            if comps.insert((i, j), e).is_some() {
                return Err(Error::Invalid(format!("{what} component ({i},{j}) given twice")));
            }
        }
        Ok(Pairs { n, comps })
    }

    fn parse(n: usize, entries: &[((usize, usize), &str)], what: &str) -> Result<Self> {
        let parsed = entries.iter().map(|(k, t)| Ok((*k, Expr::parse(t, n)?))).collect::<Result<Vec<_>>>()?;
        Self::new(n, parsed, what)
    }

    /// Entry `(i, j)` of the full antisymmetric matrix, as an expression.
    fn entry(&self, i: usize, j: usize) -> Expr {
        if i < j {
            self.comps.get(&(i, j)).cloned().unwrap_or_else(|| Expr::zero(self.n))
        } else if i > j {
            match self.comps.get(&(j, i)) {
                Some(e) => -e.clone(),
                None => Expr::zero(self.n),
            }
        } else {
            Expr::zero(self.n)
        }
    }

    fn matrix<S: Scalar>(&self, p: &[S]) -> Result<Vec<Vec<S>>> {
        check_point(p, self.n)?;
        let mut m = vec![vec![S::zero(); self.n]; self.n];
        for (&(i, j), e) in &self.comps {
            let v = e.eval(p)?;
            m[j][i] = -v.clone();
            m[i][j] = v;
        }
        Ok(m)
    }
}

/// A two-form `Σ_{i<j} ω_{ij} dxⁱ∧dxʲ`, with `ω_{ij} = ω(∂ᵢ, ∂ⱼ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoFormField {
    inner: Pairs,
}

impl TwoFormField {
    pub fn new(n: usize, entries: Vec<((usize, usize), Expr)>) -> Result<Self> {
        Ok(TwoFormField { inner: Pairs::new(n, entries, "two-form")? })
    }

    /// Components given as `((i, j), text)` with `i < j`.
    pub fn parse(n: usize, entries: &[((usize, usize), &str)]) -> Result<Self> {
        Ok(TwoFormField { inner: Pairs::parse(n, entries, "two-form")? })
    }

    pub fn zero(n: usize) -> Self {
        TwoFormField { inner: Pairs { n, comps: BTreeMap::new() } }
    }

    pub fn dim(&self) -> usize {
        self.inner.n
    }

    /// Stored components `(i, j) ↦ ω_{ij}` with `i < j`.
    pub fn components(&self) -> impl Iterator<Item = (&(usize, usize), &Expr)> {
        self.inner.comps.iter()
    }

    /// The one-form `ι_{∂ᵢ} ω = Σⱼ ω_{ij} dxʲ`.
    pub fn contract_coordinate(&self, i: usize) -> OneFormField {
        OneFormField { comps: (0..self.dim()).map(|j| self.inner.entry(i, j)).collect() }
    }

    /// Full component matrix at `p`.
    pub fn eval<S: Scalar>(&self, p: &[S]) -> Result<Vec<Vec<S>>> {
        self.inner.matrix(p)
    }

    pub fn at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let n = self.dim();
        Ok(to_dmatrix(&self.eval(p)?, n, n))
    }

    /// `dω` at `p`.
    pub fn d_eval<S: Scalar>(&self, p: &[S]) -> Result<Tensor3<S>> {
        let m = self.eval(&Dual::seed(p))?;
        Ok(d_of_two_form_jet(&m))
    }

    pub fn d_at(&self, p: &[f64]) -> Result<Tensor3<f64>> {
        self.d_eval(p)
    }

    /// `(F*ω)(p) = DFᵀ ω(F(p)) DF`.
    pub fn pullback_at(&self, f: &MapField, p: &[f64]) -> Result<DMatrix<f64>> {
        check_target(f, self.dim())?;
        let fp = f.at(p)?;
        let df = f.jacobian(p)?;
        Ok(df.transpose() * self.at(fp.as_slice())? * df)
    }
}

/// A bivector `Σ_{i<j} π^{ij} ∂ᵢ∧∂ⱼ`, with `π^{ij} = π(dxⁱ, dxʲ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BivectorField {
    inner: Pairs,
}

impl BivectorField {
    pub fn new(n: usize, entries: Vec<((usize, usize), Expr)>) -> Result<Self> {
        Ok(BivectorField { inner: Pairs::new(n, entries, "bivector")? })
    }

    pub fn parse(n: usize, entries: &[((usize, usize), &str)]) -> Result<Self> {
        Ok(BivectorField { inner: Pairs::parse(n, entries, "bivector")? })
    }

    pub fn zero(n: usize) -> Self {
        BivectorField { inner: Pairs { n, comps: BTreeMap::new() } }
    }

    pub fn dim(&self) -> usize {
        self.inner.n
    }

    pub fn components(&self) -> impl Iterator<Item = (&(usize, usize), &Expr)> {
        self.inner.comps.iter()
    }

    /// The vector field `π♯(dxⁱ) = Σⱼ π^{ij} ∂ⱼ`.
    pub fn sharp_coordinate(&self, i: usize) -> VectorField {
        VectorField { comps: (0..self.dim()).map(|j| self.inner.entry(i, j)).collect() }
    }

    /// Full component matrix at `p`.
    pub fn eval<S: Scalar>(&self, p: &[S]) -> Result<Vec<Vec<S>>> {
        self.inner.matrix(p)
    }

    pub fn at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let n = self.dim();
        Ok(to_dmatrix(&self.eval(p)?, n, n))
    }
}

/// A three-form `Σ_{i<j<k} φ_{ijk} dxⁱ∧dxʲ∧dxᵏ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThreeFormField {
    n: usize,
    comps: BTreeMap<(usize, usize, usize), Expr>,
}

impl ThreeFormField {
    pub fn new(n: usize, entries: Vec<((usize, usize, usize), Expr)>) -> Result<Self> {
        let mut comps = BTreeMap::new();
        for ((i, j, k), e) in entries {
            if !(i < j && j < k && k < n) {
                return Err(Error::Invalid(format!("three-form component ({i},{j},{k}) needs i < j < k < {n}")));
            }
            if e.dim() != n {
                return Err(Error::DimensionMismatch(format!("three-form component lives in dimension {}", e.dim())));
            }
            if comps.insert((i, j, k), e).is_some() {
                return Err(Error::Invalid(format!("three-form component ({i},{j},{k}) given twice")));
            }
        }
        Ok(ThreeFormField { n, comps })
    }

    pub fn parse(n: usize, entries: &[((usize, usize, usize), &str)]) -> Result<Self> {
        let parsed = entries.iter().map(|(k, t)| Ok((*k, Expr::parse(t, n)?))).collect::<Result<Vec<_>>>()?;
        Self::new(n, parsed)
    }

    pub fn zero(n: usize) -> Self {
        ThreeFormField { n, comps: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.comps.values().all(Expr::is_zero_literal)
    }

    pub fn components(&self) -> impl Iterator<Item = (&(usize, usize, usize), &Expr)> {
        self.comps.iter()
    }

    /// Full antisymmetric component array at `p`.
    pub fn eval<S: Scalar>(&self, p: &[S]) -> Result<Tensor3<S>> {
        check_point(p, self.n)?;
        let mut t = Tensor3::zeros(self.n);
        let n = self.n;
        for (&(i, j, k), e) in &self.comps {
            let v = e.eval(p)?;
            for (a, b, c, s) in [(i, j, k, 1.0), (j, k, i, 1.0), (k, i, j, 1.0), (j, i, k, -1.0), (i, k, j, -1.0), (k, j, i, -1.0)] {
                t.data[(a * n + b) * n + c] = v.scale(s);
            }
        }
        Ok(t)
    }

    pub fn at(&self, p: &[f64]) -> Result<Tensor3<f64>> {
        self.eval(p)
    }

    /// `(F*φ)(p)`.
    pub fn pullback_at(&self, f: &MapField, p: &[f64]) -> Result<Tensor3<f64>> {
        check_target(f, self.dim())?;
        let (fp, df) = f.jet(p)?;
        Ok(self.eval(&fp)?.pull(&df, f.src_dim()))
    }
}

/// A section `u + ξ` of 𝕋M.
#[derive(Clone, Debug, PartialEq)]
pub struct SectionField {
    pub vf: VectorField,
    pub of: OneFormField,
}

impl SectionField {
    pub fn new(vf: VectorField, of: OneFormField) -> Result<Self> {
        if vf.dim() != of.dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector part has dimension {}, one-form part {}",
                vf.dim(),
                of.dim()
            )));
        }
        Ok(SectionField { vf, of })
    }

    /// Vector and one-form components as expression texts.
    pub fn parse(u: &[&str], xi: &[&str]) -> Result<Self> {
        Self::new(VectorField::parse(u)?, OneFormField::parse(xi)?)
    }

    pub fn tangent(u: VectorField) -> Self {
        let n = u.dim();
        SectionField { vf: u, of: OneFormField::zero(n) }
    }

    pub fn cotangent(xi: OneFormField) -> Self {
        let n = xi.dim();
        SectionField { vf: VectorField::zero(n), of: xi }
    }

    pub fn dim(&self) -> usize {
        self.vf.dim()
    }

    pub fn eval<S: Scalar>(&self, p: &[S]) -> Result<(Vec<S>, Vec<S>)> {
        Ok((self.vf.eval(p)?, self.of.eval(p)?))
    }

    pub fn at(&self, p: &[f64]) -> Result<SplitVector> {
        let (u, xi) = self.eval(p)?;
        SplitVector::new(to_dvector(u), to_dvector(xi))
    }

    pub fn jet<S: Scalar>(&self, p: &[S]) -> Result<SectionJet<S>> {
        let (u, du) = self.vf.jet(p)?;
        let (xi, dxi) = self.of.jet(p)?;
        Ok(SectionJet { u, du, xi, dxi })
    }
}

/// First jet of a section at a point: values and Jacobians
/// (`du[i][j] = ∂ⱼuⁱ`, `dxi[i][j] = ∂ⱼξᵢ`).
#[derive(Clone, Debug, PartialEq)]
pub struct SectionJet<S> {
    pub u: Vec<S>,
    pub du: Vec<Vec<S>>,
    pub xi: Vec<S>,
    pub dxi: Vec<Vec<S>>,
}

impl<S: Scalar> SectionJet<S> {
    pub(crate) fn from_duals(u: Vec<Dual<S>>, xi: Vec<Dual<S>>, n: usize) -> Self {
        let (u, du) = unzip_duals(u, n);
        let (xi, dxi) = unzip_duals(xi, n);
        SectionJet { u, du, xi, dxi }
    }
}

impl SectionJet<f64> {
    pub fn value(&self) -> SplitVector {
        SplitVector { tangent: DVector::from_column_slice(&self.u), cotangent: DVector::from_column_slice(&self.xi) }
    }
}

/// `[u, v]ⁱ = Σⱼ uʲ∂ⱼvⁱ − vʲ∂ⱼuⁱ` from jets.
fn lie_from_jets<S: Scalar>(u: &[S], du: &[Vec<S>], v: &[S], dv: &[Vec<S>]) -> Vec<S> {
    let n = u.len();
    (0..n)
        .map(|i| {
            let mut acc = S::zero();
            for j in 0..n {
                acc = acc + u[j].clone() * dv[i][j].clone() - v[j].clone() * du[i][j].clone();
            }
            acc
        })
        .collect()
}

/// Dorfman bracket `[u,v] + ℒ_u η − ι_v dξ` of two sections from their
/// first jets at a point.
pub fn dorfman_from_jets<S: Scalar>(a: &SectionJet<S>, b: &SectionJet<S>) -> (Vec<S>, Vec<S>) {
    let n = a.u.len();
    let tangent = lie_from_jets(&a.u, &a.du, &b.u, &b.du);
    let cotangent = (0..n)
        .map(|k| {
            let mut acc = S::zero();
            for j in 0..n {
                acc = acc + a.u[j].clone() * b.dxi[k][j].clone() + b.xi[j].clone() * a.du[j][k].clone()
                    - b.u[j].clone() * (a.dxi[k][j].clone() - a.dxi[j][k].clone());
            }
            acc
        })
        .collect();
    (tangent, cotangent)
}

fn check_same(n: usize, m: usize) -> Result<()> {
    if n != m {
        return Err(Error::DimensionMismatch(format!("fields of dimensions {n} and {m}")));
    }
    Ok(())
}

/// `[u, v]` evaluated at `p` over any scalar type.
pub fn lie_bracket_eval<S: Scalar>(u: &VectorField, v: &VectorField, p: &[S]) -> Result<Vec<S>> {
    check_same(u.dim(), v.dim())?;
    let (uv, du) = u.jet(p)?;
    let (vv, dv) = v.jet(p)?;
    Ok(lie_from_jets(&uv, &du, &vv, &dv))
}

/// The Lie bracket `[u, v](p) = Dv·u − Du·v`.
pub fn lie_bracket(u: &VectorField, v: &VectorField, p: &[f64]) -> Result<DVector<f64>> {
    lie_bracket_eval(u, v, p).map(to_dvector)
}

/// The Dorfman bracket (plus the twist `φ(u, v, ·)` when `phi` is given)
/// at `p` over any scalar type.
pub fn dorfman_eval<S: Scalar>(
    a: &SectionField,
    b: &SectionField,
    phi: Option<&ThreeFormField>,
    p: &[S],
) -> Result<(Vec<S>, Vec<S>)> {
    check_same(a.dim(), b.dim())?;
    let ja = a.jet(p)?;
    let jb = b.jet(p)?;
    let (t, mut c) = dorfman_from_jets(&ja, &jb);
    if let Some(phi) = phi {
        check_same(a.dim(), phi.dim())?;
        let tw = phi.eval(p)?.contract(&ja.u, &jb.u);
        c = c.into_iter().zip(tw).map(|(x, y)| x + y).collect();
    }
    Ok((t, c))
}

/// `[u+ξ, v+η] = [u,v] + ℒ_u η − ι_v dξ` at `p`.
pub fn dorfman(a: &SectionField, b: &SectionField, p: &[f64]) -> Result<SplitVector> {
    let (t, c) = dorfman_eval(a, b, None, p)?;
    SplitVector::new(to_dvector(t), to_dvector(c))
}

/// Twisted Dorfman bracket `[a, b] + φ(u, v, ·)` at `p`.
///
/// The twist is the one-form `ι_u ι_v φ` read with the composite acting on
/// `φ` so that `a = ∂x`, `b = ∂y`, `φ = dx∧dy∧dz` give `+dz`.
pub fn dorfman_twisted(a: &SectionField, b: &SectionField, phi: &ThreeFormField, p: &[f64]) -> Result<SplitVector> {
    let (t, c) = dorfman_eval(a, b, Some(phi), p)?;
    SplitVector::new(to_dvector(t), to_dvector(c))
}

/// First jet at `p` of the (possibly twisted) bracket `[a, b]`.
pub fn bracket_jet(
    a: &SectionField,
    b: &SectionField,
    phi: Option<&ThreeFormField>,
    p: &[f64],
) -> Result<SectionJet<f64>> {
    let (t, c) = dorfman_eval(a, b, phi, &Dual::seed(p))?;
    Ok(SectionJet::from_duals(t, c, p.len()))
}

/// Bracket of two sections known by their first jets at `p`, with twist.
fn bracket_of_jets(x: &SectionJet<f64>, y: &SectionJet<f64>, phi: Option<&Tensor3<f64>>) -> (Vec<f64>, Vec<f64>) {
    let (t, mut c) = dorfman_from_jets(x, y);
    if let Some(phi) = phi {
        for (ck, tk) in c.iter_mut().zip(phi.contract(&x.u, &y.u)) {
            *ck += tk;
        }
    }
    (t, c)
}

/// Largest entry of `[a,[b,c]] − [[a,b],c] − [b,[a,c]]` at `p`, for the
/// plain bracket or the `φ`-twisted one.
pub fn leibniz_residual(
    a: &SectionField,
    b: &SectionField,
    c: &SectionField,
    phi: Option<&ThreeFormField>,
    p: &[f64],
) -> Result<f64> {
    let ja = a.jet(p)?;
    let jb = b.jet(p)?;
    let jc = c.jet(p)?;
    let jab = bracket_jet(a, b, phi, p)?;
    let jac = bracket_jet(a, c, phi, p)?;
    let jbc = bracket_jet(b, c, phi, p)?;
    let phv = phi.map(|f| f.at(p)).transpose()?;
    let lhs = bracket_of_jets(&ja, &jbc, phv.as_ref());
    let r1 = bracket_of_jets(&jab, &jc, phv.as_ref());
    let r2 = bracket_of_jets(&jb, &jac, phv.as_ref());
    let mut res: f64 = 0.0;
    for i in 0..p.len() {
        res = res.max((lhs.0[i] - r1.0[i] - r2.0[i]).abs());
        res = res.max((lhs.1[i] - r1.1[i] - r2.1[i]).abs());
    }
    Ok(res)
}

/// A smooth map `F: ℝᵐ → ℝⁿ` given by `n` component expressions in
/// `x1..xm`.
#[derive(Clone, Debug, PartialEq)]
pub struct MapField {
    src: usize,
    comps: Vec<Expr>,
}

impl MapField {
    pub fn new(src: usize, comps: Vec<Expr>) -> Result<Self> {
        check_dims(&comps, src, "map")?;
        Ok(MapField { src, comps })
    }

    pub fn parse(src: usize, texts: &[&str]) -> Result<Self> {
        Self::new(src, parse_all(src, texts)?)
    }

    pub fn identity(n: usize) -> Self {
        MapField { src: n, comps: (0..n).map(|i| Expr::var(i, n)).collect() }
    }

    /// Projection onto the listed coordinates.
    pub fn projection(src: usize, coords: &[usize]) -> Result<Self> {
        if let Some(&c) = coords.iter().find(|&&c| c >= src) {
            return Err(Error::Invalid(format!("coordinate {c} out of range for dimension {src}")));
        }
        Ok(MapField { src, comps: coords.iter().map(|&c| Expr::var(c, src)).collect() })
    }

    pub fn src_dim(&self) -> usize {
        self.src
    }

    pub fn dst_dim(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &MapField) -> Result<MapField> {
        if inner.dst_dim() != self.src {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose a map from dimension {} after one into {}",
                self.src,
                inner.dst_dim()
            )));
        }
        let comps = self.comps.iter().map(|e| e.substitute(&inner.comps)).collect::<Result<Vec<_>>>()?;
        Ok(MapField { src: inner.src, comps })
    }

    pub fn eval<S: Scalar>(&self, p: &[S]) -> Result<Vec<S>> {
        check_point(p, self.src)?;
        values(&self.comps, p)
    }

    pub fn at(&self, p: &[f64]) -> Result<DVector<f64>> {
        self.eval(p).map(to_dvector)
    }

    /// Value and Jacobian `df[a][i] = ∂ᵢFᵃ`.
    pub fn jet<S: Scalar>(&self, p: &[S]) -> Result<(Vec<S>, Vec<Vec<S>>)> {
        check_point(p, self.src)?;
        jets(&self.comps, p)
    }

    /// Jacobian `DF(p)`, an `n × m` matrix.
    pub fn jacobian(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let (_, df) = self.jet(p)?;
        Ok(to_dmatrix(&df, self.dst_dim(), self.src))
    }
}

/// A form of any supported degree, for the degree-generic operations.
#[derive(Clone, Copy, Debug)]
pub enum FormRef<'a> {
    One(&'a OneFormField),
    Two(&'a TwoFormField),
    Three(&'a ThreeFormField),
}

/// The value of a form at a point.
#[derive(Clone, Debug, PartialEq)]
pub enum FormValue {
    One(DVector<f64>),
    Two(DMatrix<f64>),
    Three(Tensor3<f64>),
}

/// `dα` at `p` for a one- or two-form.
pub fn exterior_d(alpha: FormRef<'_>, p: &[f64]) -> Result<FormValue> {
    match alpha {
        FormRef::One(a) => a.d_at(p).map(FormValue::Two),
        FormRef::Two(a) => a.d_at(p).map(FormValue::Three),
        FormRef::Three(_) => Err(Error::Invalid("exterior derivative of a three-form is out of scope".into())),
    }
}

/// `(F*α)(p)(v₁, …) = α(F(p))(DF v₁, …)`.
pub fn pullback_form(f: &MapField, alpha: FormRef<'_>, p: &[f64]) -> Result<FormValue> {
    match alpha {
        FormRef::One(a) => a.pullback_at(f, p).map(FormValue::One),
        FormRef::Two(a) => a.pullback_at(f, p).map(FormValue::Two),
        FormRef::Three(a) => a.pullback_at(f, p).map(FormValue::Three),
    }
}

/// Residual of `a₀ ∼_F a₁` at one point from the values there:
/// `max(|DF u₀ − u₁|∞, |ξ₀ − DFᵀ ξ₁|∞)`.
pub fn related_residual(df: &DMatrix<f64>, a0: &SplitVector, a1: &SplitVector) -> Result<f64> {
    if df.ncols() != a0.dim() || df.nrows() != a1.dim() {
        return Err(Error::DimensionMismatch(format!(
            "Jacobian is {}×{}, sections have dimensions {} and {}",
            df.nrows(),
            df.ncols(),
            a0.dim(),
            a1.dim()
        )));
    }
    let t = (df * &a0.tangent - &a1.tangent).amax();
    let c = (&a0.cotangent - df.transpose() * &a1.cotangent).amax();
    Ok(t.max(c))
}

/// Checks `F_* u₀ = u₁ ∘ F` and `ξ₀ = F*ξ₁` at `p`; returns the verdict
/// under `tol` and the residual.
pub fn phi_related(
    f: &MapField,
    a0: &SectionField,
    a1: &SectionField,
    p: &[f64],
    tol: f64,
) -> Result<(bool, f64)> {
    let fp = f.at(p)?;
    let r = related_residual(&f.jacobian(p)?, &a0.at(p)?, &a1.at(fp.as_slice())?)?;
    Ok((r <= tol, r))
}
