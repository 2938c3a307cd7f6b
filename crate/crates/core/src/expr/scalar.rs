//! Scalars that expressions can be evaluated over: plain `f64` and
//! forward-mode dual numbers, which nest to give higher derivatives.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic needed to evaluate an [`Expr`](super::Expr).
pub trait Scalar:
    Clone
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// A constant (all derivatives zero).
    fn cst(v: f64) -> Self;
    /// The underlying real value.
    fn re(&self) -> f64;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;

    fn zero() -> Self {
        Self::cst(0.0)
    }

    fn one() -> Self {
        Self::cst(1.0)
    }

    /// Integer power by repeated squaring; negative exponents invert.
    fn powi(&self, n: i64) -> Self {
        let mut base = self.clone();
        let mut k = n.unsigned_abs();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base.clone();
            }
            k >>= 1;
            if k > 0 {
                base = base.clone() * base;
            }
        }
        if n < 0 {
            Self::one() / acc
        } else {
            acc
        }
    }

    fn scale(&self, k: f64) -> Self {
        self.clone() * Self::cst(k)
    }
}

impl Scalar for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn re(&self) -> f64 {
        *self
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn scale(&self, k: f64) -> Self {
        self * k
    }
}

/// Dual number `v + Σ d_i ε_i` with `ε_i ε_j = 0`.
///
/// An empty `d` stands for a constant, so constants never allocate.
#[derive(Clone, Debug, PartialEq)]
pub struct Dual<S> {
    pub v: S,
    pub d: Vec<S>,
}

impl<S: Scalar> Dual<S> {
    pub fn constant(v: S) -> Self {
        Dual { v, d: Vec::new() }
    }

    /// The `i`-th of `n` independent variables, valued `v`.
    pub fn var(v: S, i: usize, n: usize) -> Self {
        let mut d = vec![S::zero(); n];
        d[i] = S::one();
        Dual { v, d }
    }

    /// Seeds every coordinate of `p` as an independent variable.
    pub fn seed(p: &[S]) -> Vec<Self> {
        let n = p.len();
        p.iter().enumerate().map(|(i, x)| Dual::var(x.clone(), i, n)).collect()
    }

    /// Partial derivative `i`, zero if this is a constant.
    pub fn part(&self, i: usize) -> S {
        self.d.get(i).cloned().unwrap_or_else(S::zero)
    }

    /// Chain rule for a unary function with value `f` and derivative `df`.
    fn chain(&self, f: S, df: S) -> Self {
        Dual { v: f, d: self.d.iter().map(|x| x.clone() * df.clone()).collect() }
    }
}

fn zip_with<S: Scalar>(a: &[S], b: &[S], f: impl Fn(S, S) -> S) -> Vec<S> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(S::zero);
            let y = b.get(i).cloned().unwrap_or_else(S::zero);
            f(x, y)
        })
        .collect()
}

impl<S: Scalar> Add for Dual<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let d = if o.d.is_empty() {
            self.d
        } else if self.d.is_empty() {
            o.d
        } else {
            zip_with(&self.d, &o.d, |x, y| x + y)
        };
        Dual { v: self.v + o.v, d }
    }
}

impl<S: Scalar> Sub for Dual<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let d = if o.d.is_empty() {
            self.d
        } else {
            zip_with(&self.d, &o.d, |x, y| x - y)
        };
        Dual { v: self.v - o.v, d }
    }
}

impl<S: Scalar> Mul for Dual<S> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let d = zip_with(&self.d, &o.d, |x, y| x * o.v.clone() + self.v.clone() * y);
        Dual { v: self.v * o.v, d }
    }
}

impl<S: Scalar> Div for Dual<S> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q = self.v.clone() / o.v.clone();
        let d = zip_with(&self.d, &o.d, |x, y| (x - q.clone() * y) / o.v.clone());
        Dual { v: q, d }
    }
}

impl<S: Scalar> Neg for Dual<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual { v: -self.v, d: self.d.into_iter().map(|x| -x).collect() }
    }
}

impl<S: Scalar> Scalar for Dual<S> {
    fn cst(v: f64) -> Self {
        Dual::constant(S::cst(v))
    }
    fn re(&self) -> f64 {
        self.v.re()
    }
    fn sin(&self) -> Self {
        self.chain(self.v.sin(), self.v.cos())
    }
    fn cos(&self) -> Self {
        self.chain(self.v.cos(), -self.v.sin())
    }
    fn exp(&self) -> Self {
        let e = self.v.exp();
        self.chain(e.clone(), e)
    }
    fn ln(&self) -> Self {
        self.chain(self.v.ln(), S::one() / self.v.clone())
    }
    fn scale(&self, k: f64) -> Self {
        Dual { v: self.v.scale(k), d: self.d.iter().map(|x| x.scale(k)).collect() }
    }
}

/// Value and gradient of a scalar function at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub partials: Vec<f64>,
}

impl Jet {
    pub(crate) fn from_dual(x: Dual<f64>, n: usize) -> Self {
        Jet { value: x.v, partials: (0..n).map(|i| x.part(i)).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule() {
        let p = Dual::seed(&[2.0, 3.0]);
        let f = p[0].clone() * p[1].clone();
        assert_eq!(f.v, 6.0);
        assert_eq!(f.d, vec![3.0, 2.0]);
    }

    #[test]
    fn nested_duals_give_second_derivatives() {
        // f = x^2 y at (1, 2): f_xy = 2x = 2, f_xx = 2y = 4
        let inner = Dual::seed(&[1.0, 2.0]);
        let p = Dual::seed(&inner);
        let f = p[0].powi(2) * p[1].clone();
        assert_eq!(f.part(0).part(1), 2.0);
        assert_eq!(f.part(0).part(0), 4.0);
        assert_eq!(f.part(1).part(0), 2.0);
    }

    #[test]
    fn powi_negative() {
        let x = Dual::var(2.0, 0, 1);
        let y = x.powi(-2);
        assert!((y.v - 0.25).abs() < 1e-15);
        assert!((y.d[0] + 0.25).abs() < 1e-15);
    }
}
