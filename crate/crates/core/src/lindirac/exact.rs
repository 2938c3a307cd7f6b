//! Exact rational subspace arithmetic, used to check the linear lemmas
//! without tolerance effects.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use super::lemmas::{self, SpaceAlgebra};

pub type Q = BigRational;

/// Square rational matrix stored by rows.
pub type RatMatrix = Vec<Vec<Q>>;

/// A subspace of ℚᵐ in canonical form: the nonzero rows of its reduced row
/// echelon basis. Equal subspaces have identical representations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatSpace {
    ambient: usize,
    rows: Vec<Vec<Q>>,
}

/// Reduced row echelon form; returns the nonzero rows.
fn rref(mut rows: Vec<Vec<Q>>, ncols: usize) -> Vec<Vec<Q>> {
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Q::one() / rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..ncols {
                    let d = &f * &rows[r][j];
                    rows[i][j] -= d;
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    rows
}

/// Basis of `{x : rows · x = 0}`.
fn null_space(rows: Vec<Vec<Q>>, ncols: usize) -> Vec<Vec<Q>> {
    let red = rref(rows, ncols);
    let pivots: Vec<usize> =
        red.iter().map(|row| row.iter().position(|x| !x.is_zero()).expect("nonzero row")).collect();
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Q::zero(); ncols];
        v[free] = Q::one();
        for (row, &p) in red.iter().zip(&pivots) {
            v[p] = -row[free].clone();
        }
        out.push(v);
    }
    out
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

fn mat_vec(m: &RatMatrix, v: &[Q]) -> Vec<Q> {
    m.iter().map(|row| dot(row, v)).collect()
}

fn transpose(m: &RatMatrix) -> RatMatrix {
    let n = m.len();
    (0..n).map(|j| (0..n).map(|i| m[i][j].clone()).collect()).collect()
}

impl RatSpace {
    pub fn span(ambient: usize, vectors: Vec<Vec<Q>>) -> Self {
        assert!(vectors.iter().all(|v| v.len() == ambient), "vector length mismatch");
        RatSpace { ambient, rows: rref(vectors, ambient) }
    }

    pub fn zero(ambient: usize) -> Self {
        RatSpace { ambient, rows: Vec::new() }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<Q>] {
        &self.rows
    }

    /// Vectors orthogonal (for the standard dot product) to the subspace.
    pub fn annihilator(&self) -> RatSpace {
        RatSpace::span(self.ambient, null_space(self.rows.clone(), self.ambient))
    }

    pub fn sum(&self, other: &RatSpace) -> RatSpace {
        let mut v = self.rows.clone();
        v.extend(other.rows.iter().cloned());
        RatSpace::span(self.ambient, v)
    }

    pub fn intersect(&self, other: &RatSpace) -> RatSpace {
        self.annihilator().sum(&other.annihilator()).annihilator()
    }

    /// `{(e, ±Ωᵀe)} ⊂ ℚ²ᵐ`.
    pub fn gauge_graph(&self, w: &RatMatrix, sign: i32) -> RatSpace {
        let wt = transpose(w);
        let s = Q::from_integer(BigInt::from(sign));
        let vs = self
            .rows
            .iter()
            .map(|e| {
                let mut v = e.clone();
                v.extend(mat_vec(&wt, e).into_iter().map(|x| x * &s));
                v
            })
            .collect();
        RatSpace::span(2 * self.ambient, vs)
    }

    /// `{(e, 0)} ⊂ ℚ²ᵐ`.
    pub fn as_tangent(&self) -> RatSpace {
        let vs = self
            .rows
            .iter()
            .map(|e| {
                let mut v = e.clone();
                v.extend(std::iter::repeat_n(Q::zero(), self.ambient));
                v
            })
            .collect();
        RatSpace::span(2 * self.ambient, vs)
    }

    /// `{u : uᵀΩe = 0 for all e}`.
    pub fn omega_orth(&self, w: &RatMatrix) -> RatSpace {
        let cons = self.rows.iter().map(|e| mat_vec(w, e)).collect();
        RatSpace::span(self.ambient, null_space(cons, self.ambient))
    }
}

/// Kernel of a rational two-form.
pub fn form_kernel(w: &RatMatrix) -> RatSpace {
    let m = w.len();
    RatSpace::span(m, null_space(w.clone(), m))
}

/// Exact-arithmetic backend for the generic lemma conditions.
pub struct ExactAlgebra;

impl SpaceAlgebra for ExactAlgebra {
    type Space = RatSpace;
    type Form = RatMatrix;

    fn ambient(&self, s: &RatSpace) -> usize {
        s.ambient
    }
    fn dim(&self, s: &RatSpace) -> usize {
        s.dim()
    }
    fn sum(&self, a: &RatSpace, b: &RatSpace) -> RatSpace {
        a.sum(b)
    }
    fn intersect(&self, a: &RatSpace, b: &RatSpace) -> RatSpace {
        a.intersect(b)
    }
    fn equal(&self, a: &RatSpace, b: &RatSpace) -> bool {
        a == b
    }
    fn kernel(&self, w: &RatMatrix) -> RatSpace {
        form_kernel(w)
    }
    fn omega_orth(&self, e: &RatSpace, w: &RatMatrix) -> RatSpace {
        e.omega_orth(w)
    }
    fn gauge_graph(&self, e: &RatSpace, w: &RatMatrix, sign: i32) -> RatSpace {
        e.gauge_graph(w, sign)
    }
    fn tangent(&self, e: &RatSpace) -> RatSpace {
        e.as_tangent()
    }
    fn form_vanishes(&self, b: &RatSpace, c: &RatSpace, w: &RatMatrix) -> bool {
        b.rows.iter().all(|x| c.rows.iter().all(|y| dot(x, &mat_vec(w, y)).is_zero()))
    }
}

/// The five conditions of the weak lemma, exactly.
pub fn weak_conditions(b: &RatSpace, c: &RatSpace, w: &RatMatrix) -> [bool; 5] {
    lemmas::weak_generic(&ExactAlgebra, b, c, w)
}

/// The five conditions of the dual lemma, exactly.
pub fn dual_conditions(b: &RatSpace, c: &RatSpace, w: &RatMatrix) -> [bool; 5] {
    lemmas::dual_generic(&ExactAlgebra, b, c, w)
}

fn small_int<R: Rng>(rng: &mut R) -> Q {
    Q::from_integer(BigInt::from(rng.gen_range(-2i64..=2)))
}

fn random_vec<R: Rng>(rng: &mut R, m: usize) -> Vec<Q> {
    (0..m).map(|_| small_int(rng)).collect()
}

/// Random integer combination of the basis of `s`.
fn random_member<R: Rng>(rng: &mut R, s: &RatSpace) -> Vec<Q> {
    let mut v = vec![Q::zero(); s.ambient];
    for row in &s.rows {
        let k = small_int(rng);
        for (x, y) in v.iter_mut().zip(row) {
            *x += &k * y;
        }
    }
    v
}

/// A random instance `(B, C, Ω)` in `ℚᵐ` for fuzzing the lemmas.
///
/// `Ω` is a sum of random decomposable forms of random rank. About half
/// the time `C` is built inside `B^ω` so that the conditions hold; the
/// remaining instances are unconstrained and mostly fail.
pub fn random_instance<R: Rng>(rng: &mut R, m: usize) -> (RatSpace, RatSpace, RatMatrix) {
    let mut w = vec![vec![Q::zero(); m]; m];
    for _ in 0..rng.gen_range(0..=m / 2 + 1) {
        let (a, b) = (random_vec(rng, m), random_vec(rng, m));
        for i in 0..m {
            for j in 0..m {
                w[i][j] += &a[i] * &b[j] - &a[j] * &b[i];
            }
        }
    }
    let kb = rng.gen_range(0..=m);
    let b = RatSpace::span(m, (0..kb).map(|_| random_vec(rng, m)).collect());
    let c = if rng.gen_bool(0.5) {
        let bw = b.omega_orth(&w);
        let bk = b.intersect(&form_kernel(&w));
        let need = bw.dim() - bk.dim();
        let mut vs: Vec<Vec<Q>> = (0..need).map(|_| random_member(rng, &bw)).collect();
        if rng.gen_bool(0.5) {
            for _ in 0..rng.gen_range(0..=bk.dim()) {
                vs.push(random_member(rng, &bk));
            }
        }
        RatSpace::span(m, vs)
    } else {
        let kc = rng.gen_range(0..=m);
        RatSpace::span(m, (0..kc).map(|_| random_vec(rng, m)).collect())
    };
    (b, c, w)
}

/// Converts a rational matrix to floating point.
pub fn to_f64_matrix(w: &RatMatrix) -> nalgebra::DMatrix<f64> {
    let m = w.len();
    nalgebra::DMatrix::from_fn(m, m, |i, j| crate::expr::rational_to_f64(&w[i][j]))
}

/// Converts a rational subspace to a floating-point one.
pub fn to_f64_space(s: &RatSpace) -> super::Subspace {
    let cols: Vec<nalgebra::DVector<f64>> = s
        .rows
        .iter()
        .map(|r| nalgebra::DVector::from_iterator(s.ambient, r.iter().map(crate::expr::rational_to_f64)))
        .collect();
    super::Subspace::span(s.ambient, &cols).expect("finite rational entries")
}
