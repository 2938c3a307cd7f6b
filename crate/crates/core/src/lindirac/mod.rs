//! Linear algebra of a single fiber 𝕋ₓM = ℝⁿ ⊕ (ℝⁿ)*.
//!
//! Vectors of 𝕋ₓM are stored as `2n` columns, tangent part first. A
//! two-form at a point is its component matrix `Ω` with `Ω[i][j] =
//! ω(∂ᵢ, ∂ⱼ)`, so `ω(u, v) = uᵀΩv` and `ι_u ω = Ωᵀu`.

pub mod exact;
mod lemmas;

use std::ops::Deref;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{self, hcat, vcat, DEFAULT_TOL};
pub use lemmas::{dual_conditions, weak_conditions, SpaceAlgebra};

/// An element `u + ξ` of 𝕋ₓM.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitVector {
    pub tangent: DVector<f64>,
    pub cotangent: DVector<f64>,
}

impl SplitVector {
    pub fn new(tangent: DVector<f64>, cotangent: DVector<f64>) -> Result<Self> {
        if tangent.len() != cotangent.len() {
            return Err(Error::DimensionMismatch(format!(
                "tangent part has {} entries, cotangent part {}",
                tangent.len(),
                cotangent.len()
            )));
        }
        Ok(SplitVector { tangent, cotangent })
    }

    pub fn from_slices(u: &[f64], xi: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(u), DVector::from_column_slice(xi))
    }

    pub fn dim(&self) -> usize {
        self.tangent.len()
    }

    /// Stacked `(u, ξ)` column of length `2n`.
    pub fn to_vector(&self) -> DVector<f64> {
        let n = self.dim();
        DVector::from_fn(2 * n, |i, _| if i < n { self.tangent[i] } else { self.cotangent[i - n] })
    }

    pub fn from_vector(v: &DVector<f64>) -> Self {
        let n = v.len() / 2;
        SplitVector { tangent: v.rows(0, n).into_owned(), cotangent: v.rows(n, n).into_owned() }
    }
}

/// `⟨u+ξ, v+η⟩ = ξ(v) + η(u)`.
pub fn pairing(a: &SplitVector, b: &SplitVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!("pairing {} with {}", a.dim(), b.dim())));
    }
    Ok(a.cotangent.dot(&b.tangent) + b.cotangent.dot(&a.tangent))
}

/// Gram matrix `[[0, I], [I, 0]]` of the pairing on ℝ²ⁿ.
pub fn pairing_matrix(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = 1.0;
    }
    j
}

/// A linear subspace of ℝᵐ held as an orthonormal basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: DMatrix<f64>,
    tol: f64,
}

impl Subspace {
    /// Span of the columns of `m`, with rank decided under `tol`.
    pub fn from_columns(m: &DMatrix<f64>, tol: f64) -> Result<Self> {
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("subspace basis".into()));
        }
        Ok(Subspace { ambient: m.nrows(), basis: linalg::orth(m, tol), tol })
    }

    /// Span of the given vectors with the default tolerance.
    pub fn span(ambient: usize, vectors: &[DVector<f64>]) -> Result<Self> {
        if vectors.iter().any(|v| v.len() != ambient) {
            return Err(Error::DimensionMismatch("span vectors have the wrong length".into()));
        }
        let m = if vectors.is_empty() {
            DMatrix::zeros(ambient, 0)
        } else {
            DMatrix::from_columns(vectors)
        };
        Self::from_columns(&m, DEFAULT_TOL)
    }

    /// Span of split vectors inside ℝ²ⁿ.
    pub fn span_split(n: usize, vectors: &[SplitVector]) -> Result<Self> {
        let cols: Vec<DVector<f64>> = vectors.iter().map(|v| v.to_vector()).collect();
        Self::span(2 * n, &cols)
    }

    fn from_orthonormal(ambient: usize, basis: DMatrix<f64>, tol: f64) -> Self {
        Subspace { ambient, basis, tol }
    }

    pub fn zero(ambient: usize) -> Self {
        Self::from_orthonormal(ambient, DMatrix::zeros(ambient, 0), DEFAULT_TOL)
    }

    pub fn full(ambient: usize) -> Self {
        Self::from_orthonormal(ambient, DMatrix::identity(ambient, ambient), DEFAULT_TOL)
    }

    /// The same subspace with a different tolerance for later rank decisions.
    pub fn with_tol(&self, tol: f64) -> Self {
        Subspace { ambient: self.ambient, basis: self.basis.clone(), tol }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Orthonormal basis as columns.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    fn check(&self, other: &Subspace) -> Result<f64> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch(format!(
                "subspaces of ℝ^{} and ℝ^{}",
                self.ambient, other.ambient
            )));
        }
        Ok(self.tol.max(other.tol))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        let tol = self.check(other)?;
        Subspace::from_columns(&hcat(&self.basis, &other.basis), tol)
    }

    /// Intersection via the kernel of `[Q₁ | −Q₂]`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        let tol = self.check(other)?;
        if self.dim() == 0 || other.dim() == 0 {
            return Ok(Subspace::zero(self.ambient).with_tol(tol));
        }
        let k = hcat(&self.basis, &(-&other.basis));
        let ker = linalg::null(&k, tol);
        let a = ker.rows(0, self.dim()).into_owned();
        Subspace::from_columns(&(&self.basis * a), tol)
    }

    /// Euclidean orthogonal complement.
    pub fn orth_complement(&self) -> Subspace {
        Self::from_orthonormal(self.ambient, linalg::complement(&self.basis, self.ambient), self.tol)
    }

    /// Orthogonal projection of `v` onto the subspace.
    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.basis * (self.basis.transpose() * v)
    }

    /// Distance of `v` to the subspace.
    pub fn residual(&self, v: &DVector<f64>) -> f64 {
        (v - self.project(v)).norm()
    }

    /// Sine of the largest principal angle from `other` into `self`
    /// (zero iff `other ⊂ self`).
    pub fn containment_gap(&self, other: &Subspace) -> f64 {
        if other.dim() == 0 {
            return 0.0;
        }
        let r = &other.basis - &self.basis * (self.basis.transpose() * &other.basis);
        linalg::svd(&r).1.first().copied().unwrap_or(0.0)
    }

    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        let tol = self.check(other)?;
        Ok(self.containment_gap(other) <= angle_tol(tol))
    }

    /// Sine of the largest principal angle between equal-dimension subspaces;
    /// `1.0` when the dimensions differ.
    pub fn distance(&self, other: &Subspace) -> f64 {
        if self.dim() != other.dim() || self.ambient != other.ambient {
            return 1.0;
        }
        self.containment_gap(other).max(other.containment_gap(self))
    }

    /// Basis-independent equality under the larger of the two tolerances.
    pub fn equals(&self, other: &Subspace) -> Result<bool> {
        let tol = self.check(other)?;
        Ok(self.dim() == other.dim() && self.distance(other) <= angle_tol(tol))
    }
}

/// Angle tolerance matching a rank tolerance: rank cutoffs are relative
/// singular values, angle comparisons use the same magnitude with a floor
/// for rounding.
fn angle_tol(tol: f64) -> f64 {
    tol.max(1e-12)
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other).unwrap_or(false)
    }
}

/// A maximal isotropic subspace of 𝕋ₓM.
#[derive(Clone, Debug, PartialEq)]
pub struct LagrangianSubspace {
    inner: Subspace,
}

impl LagrangianSubspace {
    /// Validates `s` as Lagrangian.
    pub fn new(s: Subspace) -> Result<Self> {
        if s.ambient % 2 != 0 {
            return Err(Error::DimensionMismatch("Lagrangian ambient must be even".into()));
        }
        if !is_lagrangian(&s) {
            return Err(Error::Invalid(format!(
                "subspace of dimension {} is not Lagrangian (isotropy residual {:e})",
                s.dim(),
                isotropy_residual(&s)
            )));
        }
        Ok(LagrangianSubspace { inner: s })
    }

    /// Wraps a subspace that is Lagrangian by construction.
    pub(crate) fn trusted(s: Subspace) -> Self {
        LagrangianSubspace { inner: s }
    }

    /// Half the ambient dimension.
    pub fn n(&self) -> usize {
        self.inner.ambient / 2
    }

    pub fn subspace(&self) -> &Subspace {
        &self.inner
    }

    pub fn into_subspace(self) -> Subspace {
        self.inner
    }
}

impl Deref for LagrangianSubspace {
    type Target = Subspace;
    fn deref(&self) -> &Subspace {
        &self.inner
    }
}

/// All tangent vectors, `TₓM ⊂ 𝕋ₓM`.
pub fn tangent_space(n: usize) -> LagrangianSubspace {
    let mut b = DMatrix::zeros(2 * n, n);
    for i in 0..n {
        b[(i, i)] = 1.0;
    }
    LagrangianSubspace::trusted(Subspace::from_orthonormal(2 * n, b, DEFAULT_TOL))
}

/// All covectors, `T*ₓM ⊂ 𝕋ₓM`.
pub fn cotangent_space(n: usize) -> LagrangianSubspace {
    let mut b = DMatrix::zeros(2 * n, n);
    for i in 0..n {
        b[(n + i, i)] = 1.0;
    }
    LagrangianSubspace::trusted(Subspace::from_orthonormal(2 * n, b, DEFAULT_TOL))
}

/// Embeds a subspace `E ⊂ ℝⁿ` as tangent vectors in ℝ²ⁿ.
pub fn as_tangent(e: &Subspace) -> Subspace {
    let n = e.ambient;
    let b = vcat(&e.basis, &DMatrix::zeros(n, e.dim()));
    Subspace::from_orthonormal(2 * n, b, e.tol)
}

/// Embeds a subspace `E ⊂ (ℝⁿ)*` as covectors in ℝ²ⁿ.
pub fn as_cotangent(e: &Subspace) -> Subspace {
    let n = e.ambient;
    let b = vcat(&DMatrix::zeros(n, e.dim()), &e.basis);
    Subspace::from_orthonormal(2 * n, b, e.tol)
}

/// Tangent and cotangent blocks of a basis of ℝ²ⁿ.
pub fn split_basis(s: &Subspace) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = s.ambient / 2;
    (s.basis.rows(0, n).into_owned(), s.basis.rows(n, n).into_owned())
}

fn even(s: &Subspace) -> Result<usize> {
    if s.ambient % 2 != 0 {
        return Err(Error::DimensionMismatch("expected a subspace of 𝕋ₓM (even ambient)".into()));
    }
    Ok(s.ambient / 2)
}

/// The pairing-orthogonal `S^⊥`.
pub fn perp(s: &Subspace) -> Result<Subspace> {
    let n = even(s)?;
    let js = pairing_matrix(n) * &s.basis;
    Ok(Subspace::from_orthonormal(2 * n, linalg::null(&js.transpose(), s.tol), s.tol))
}

/// Largest `|⟨a, b⟩|` over basis pairs.
pub fn isotropy_residual(s: &Subspace) -> f64 {
    let n = s.ambient / 2;
    let g = s.basis.transpose() * pairing_matrix(n) * &s.basis;
    linalg::max_abs(&g)
}

/// True iff `S^⊥ = S`, i.e. `S` is isotropic of half dimension.
pub fn is_lagrangian(s: &Subspace) -> bool {
    s.ambient % 2 == 0 && s.dim() == s.ambient / 2 && isotropy_residual(s) <= angle_tol(s.tol) * 10.0
}

fn check_antisymmetric(w: &DMatrix<f64>, n: usize) -> Result<()> {
    if w.nrows() != n || w.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "two-form is {}×{}, expected {n}×{n}",
            w.nrows(),
            w.ncols()
        )));
    }
    let scale = linalg::max_abs(w).max(1.0);
    if linalg::max_abs(&(w + w.transpose())) > 1e-9 * scale {
        return Err(Error::Invalid("two-form matrix is not antisymmetric".into()));
    }
    Ok(())
}

/// `{u + λξ : u + ξ ∈ L}`.
pub fn rescale(lambda: f64, l: &LagrangianSubspace) -> Result<LagrangianSubspace> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::Invalid("rescaling factor must be a nonzero finite number".into()));
    }
    let n = l.n();
    let mut b = l.basis.clone();
    b.rows_mut(n, n).scale_mut(lambda);
    Ok(LagrangianSubspace::trusted(Subspace::from_columns(&b, l.tol)?))
}

/// Gauge transformation `R_ω(S) = {u + ξ + ι_u ω}`.
pub fn gauge(w: &DMatrix<f64>, s: &Subspace) -> Result<Subspace> {
    let n = even(s)?;
    check_antisymmetric(w, n)?;
    let (u, xi) = split_basis(s);
    let b = vcat(&u, &(xi + w.transpose() * &u));
    Subspace::from_columns(&b, s.tol)
}

/// Gauge transformation of a Lagrangian subspace.
pub fn gauge_lagrangian(w: &DMatrix<f64>, l: &LagrangianSubspace) -> Result<LagrangianSubspace> {
    Ok(LagrangianSubspace::trusted(gauge(w, l)?))
}

/// `Gr(ω) = R_ω(TM)` at a point.
pub fn graph_of_form(w: &DMatrix<f64>) -> Result<LagrangianSubspace> {
    gauge_lagrangian(w, &tangent_space(w.nrows()))
}

/// Pointwise pullback `A^!(L₁) = {(u, Aᵀξ) : (Au, ξ) ∈ L₁}` for `A: ℝᵐ → ℝⁿ`.
pub fn pullback_pt(a: &DMatrix<f64>, l1: &LagrangianSubspace) -> Result<LagrangianSubspace> {
    let (n, m) = a.shape();
    if l1.n() != n {
        return Err(Error::DimensionMismatch(format!("map target {n}, structure over {}", l1.n())));
    }
    let (u, xi) = split_basis(l1);
    let k = l1.dim();
    let ker = linalg::null(&hcat(a, &(-&u)), l1.tol);
    let uu = ker.rows(0, m).into_owned();
    let c = ker.rows(m, k).into_owned();
    let b = vcat(&uu, &(a.transpose() * &xi * c));
    Ok(LagrangianSubspace::trusted(Subspace::from_columns(&b, l1.tol)?))
}

/// Pointwise pushforward `A_!(L₀) = {(Au, ξ) : (u, Aᵀξ) ∈ L₀}` for `A: ℝᵐ → ℝⁿ`.
pub fn pushforward_pt(a: &DMatrix<f64>, l0: &LagrangianSubspace) -> Result<LagrangianSubspace> {
    let (n, m) = a.shape();
    if l0.n() != m {
        return Err(Error::DimensionMismatch(format!("map source {m}, structure over {}", l0.n())));
    }
    let (u, xi) = split_basis(l0);
    let k = l0.dim();
    let ker = linalg::null(&hcat(&a.transpose(), &(-&xi)), l0.tol);
    let eta = ker.rows(0, n).into_owned();
    let c = ker.rows(n, k).into_owned();
    let b = vcat(&(a * &u * c), &eta);
    Ok(LagrangianSubspace::trusted(Subspace::from_columns(&b, l0.tol)?))
}

/// `E^ω = {u : ω(u, e) = 0 for all e ∈ E}` for a tangent subspace `E ⊂ ℝⁿ`.
pub fn omega_orthogonal(e: &Subspace, w: &DMatrix<f64>) -> Result<Subspace> {
    check_antisymmetric(w, e.ambient)?;
    // ω(u, e) = uᵀΩe, so the constraints are the rows (Ωe)ᵀ
    let c = (w * &e.basis).transpose();
    Ok(Subspace::from_orthonormal(e.ambient, linalg::null(&c, e.tol), e.tol))
}

/// Kernel of a two-form at a point.
pub fn form_kernel(w: &DMatrix<f64>, tol: f64) -> Subspace {
    let n = w.nrows();
    Subspace::from_orthonormal(n, linalg::null(w, tol), tol)
}

/// Kernel of a linear map as a subspace of its source.
pub fn map_kernel(a: &DMatrix<f64>, tol: f64) -> Subspace {
    Subspace::from_orthonormal(a.ncols(), linalg::null(a, tol), tol)
}

/// Largest `|ω(b, c)|` over orthonormal basis pairs of `B` and `C`.
pub fn form_pairing_residual(b: &Subspace, c: &Subspace, w: &DMatrix<f64>) -> f64 {
    if b.dim() == 0 || c.dim() == 0 {
        return 0.0;
    }
    linalg::max_abs(&(b.basis.transpose() * w * &c.basis))
}

#[cfg(test)]
mod tests;
