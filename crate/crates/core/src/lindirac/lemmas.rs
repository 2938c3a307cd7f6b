//! The two five-way characterizations of `ω(B, C) = 0` with the rank
//! condition, written once over an abstract subspace algebra so that the
//! floating-point and exact backends evaluate identical formulas.

use nalgebra::DMatrix;

use super::{as_tangent, form_kernel, form_pairing_residual, gauge, omega_orthogonal, Subspace};

/// Operations on subspaces of `A = 𝕜ᵐ` and of `A ⊕ A*` needed by the lemmas.
pub trait SpaceAlgebra {
    type Space;
    type Form;

    fn ambient(&self, s: &Self::Space) -> usize;
    fn dim(&self, s: &Self::Space) -> usize;
    fn sum(&self, a: &Self::Space, b: &Self::Space) -> Self::Space;
    fn intersect(&self, a: &Self::Space, b: &Self::Space) -> Self::Space;
    fn equal(&self, a: &Self::Space, b: &Self::Space) -> bool;
    /// `K = ker ω`.
    fn kernel(&self, w: &Self::Form) -> Self::Space;
    /// `E^ω`.
    fn omega_orth(&self, e: &Self::Space, w: &Self::Form) -> Self::Space;
    /// `R_{±ω}(E) = {e + ι_e(±ω)} ⊂ A ⊕ A*`.
    fn gauge_graph(&self, e: &Self::Space, w: &Self::Form, sign: i32) -> Self::Space;
    /// `E ⊂ A ⊕ A*` as tangent vectors.
    fn tangent(&self, e: &Self::Space) -> Self::Space;
    /// `ω(B, C) = 0`.
    fn form_vanishes(&self, b: &Self::Space, c: &Self::Space, w: &Self::Form) -> bool;
}

/// Is `x + y` direct, i.e. `dim(x + y) = dim x + dim y`?
fn direct<A: SpaceAlgebra>(alg: &A, x: &A::Space, y: &A::Space, s: &A::Space) -> bool {
    alg.dim(s) == alg.dim(x) + alg.dim(y)
}

struct Parts<S> {
    bw: S,
    cw: S,
    bk: S,
    ck: S,
    bkc: S,
}

fn parts<A: SpaceAlgebra>(alg: &A, b: &A::Space, c: &A::Space, w: &A::Form) -> Parts<A::Space> {
    let k = alg.kernel(w);
    let bk = alg.intersect(b, &k);
    let ck = alg.intersect(c, &k);
    let bkc = alg.intersect(&bk, c);
    Parts { bw: alg.omega_orth(b, w), cw: alg.omega_orth(c, w), bk, ck, bkc }
}

/// `(lhs, rhs, direct)` for condition (a) (`sign = 1`, roles `B, C`) or
/// (b) (`sign = −1`, roles `C, B`).
fn gauge_condition<A: SpaceAlgebra>(
    alg: &A,
    x: &A::Space,
    y: &A::Space,
    xw: &A::Space,
    w: &A::Form,
    sign: i32,
) -> (bool, bool) {
    let xt = alg.tangent(x);
    let lhs = alg.sum(&xt, &alg.gauge_graph(xw, w, sign));
    let ry = alg.gauge_graph(y, w, sign);
    let rhs = alg.sum(&xt, &ry);
    (alg.equal(&lhs, &rhs), direct(alg, &xt, &ry, &rhs))
}

/// Evaluates conditions (a)–(e) of the weak lemma.
pub fn weak_generic<A: SpaceAlgebra>(alg: &A, b: &A::Space, c: &A::Space, w: &A::Form) -> [bool; 5] {
    let p = parts(alg, b, c, w);
    let m = alg.ambient(b) as i64;
    let a = gauge_condition(alg, b, c, &p.bw, w, 1).0;
    let bb = gauge_condition(alg, c, b, &p.cw, w, -1).0;
    let cc = alg.equal(&p.bw, &alg.sum(c, &p.bk));
    let d = alg.equal(&p.cw, &alg.sum(b, &p.ck));
    let e = alg.form_vanishes(b, c, w)
        && alg.dim(&p.bkc) as i64 == alg.dim(b) as i64 + alg.dim(c) as i64 - m;
    [a, bb, cc, d, e]
}

/// Evaluates conditions (a)–(e) of the dual lemma (direct-sum versions).
pub fn dual_generic<A: SpaceAlgebra>(alg: &A, b: &A::Space, c: &A::Space, w: &A::Form) -> [bool; 5] {
    let p = parts(alg, b, c, w);
    let m = alg.ambient(b);
    let (a_eq, a_dir) = gauge_condition(alg, b, c, &p.bw, w, 1);
    let (b_eq, b_dir) = gauge_condition(alg, c, b, &p.cw, w, -1);
    let cs = alg.sum(c, &p.bk);
    let cc = alg.equal(&p.bw, &cs) && direct(alg, c, &p.bk, &cs);
    let ds = alg.sum(b, &p.ck);
    let d = alg.equal(&p.cw, &ds) && direct(alg, b, &p.ck, &ds);
    let e = alg.form_vanishes(b, c, w) && alg.dim(&p.bkc) == 0 && m == alg.dim(b) + alg.dim(c);
    [a_eq && a_dir, b_eq && b_dir, cc, d, e]
}

/// Floating-point backend built on [`Subspace`].
pub struct FloatAlgebra;

impl SpaceAlgebra for FloatAlgebra {
    type Space = Subspace;
    type Form = DMatrix<f64>;

    fn ambient(&self, s: &Subspace) -> usize {
        s.ambient()
    }
    fn dim(&self, s: &Subspace) -> usize {
        s.dim()
    }
    fn sum(&self, a: &Subspace, b: &Subspace) -> Subspace {
        a.sum(b).expect("equal ambients")
    }
    fn intersect(&self, a: &Subspace, b: &Subspace) -> Subspace {
        a.intersect(b).expect("equal ambients")
    }
    fn equal(&self, a: &Subspace, b: &Subspace) -> bool {
        a.equals(b).unwrap_or(false)
    }
    fn kernel(&self, w: &DMatrix<f64>) -> Subspace {
        form_kernel(w, crate::linalg::DEFAULT_TOL)
    }
    fn omega_orth(&self, e: &Subspace, w: &DMatrix<f64>) -> Subspace {
        omega_orthogonal(e, w).expect("antisymmetric form")
    }
    fn gauge_graph(&self, e: &Subspace, w: &DMatrix<f64>, sign: i32) -> Subspace {
        gauge(&(w * sign as f64), &as_tangent(e)).expect("antisymmetric form")
    }
    fn tangent(&self, e: &Subspace) -> Subspace {
        as_tangent(e)
    }
    fn form_vanishes(&self, b: &Subspace, c: &Subspace, w: &DMatrix<f64>) -> bool {
        let scale = crate::linalg::max_abs(w).max(1.0);
        form_pairing_residual(b, c, w) <= 1e-9 * scale
    }
}

/// Conditions (a)–(e) of the weak lemma in floating point.
///
/// `B` and `C` are subspaces of ℝᵐ and `w` the component matrix of ω.
pub fn weak_conditions(b: &Subspace, c: &Subspace, w: &DMatrix<f64>) -> [bool; 5] {
    weak_generic(&FloatAlgebra, b, c, w)
}

/// Conditions (a)–(e) of the dual lemma in floating point.
pub fn dual_conditions(b: &Subspace, c: &Subspace, w: &DMatrix<f64>) -> [bool; 5] {
    dual_generic(&FloatAlgebra, b, c, w)
}
