//! Scalar coefficient expressions in coordinates `x1..xn`.
//!
//! Every geometric field in the crate stores its coefficients as [`Expr`]
//! values. Evaluation is generic over [`Scalar`], so the same tree yields
//! plain values, gradients ([`Jet`]) or higher derivatives by nesting
//! [`Dual`] numbers.

mod parser;
mod scalar;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
pub use parser::parse_expr;
pub(crate) use parser::rational_to_f64;
pub use scalar::{Dual, Jet, Scalar};

/// Elementary functions allowed in expressions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
        }
    }
}

/// Syntax tree node. Literals keep their exact rational value next to the
/// binary float used during evaluation.
#[derive(Clone, Debug)]
pub enum Node {
    Num { q: BigRational, f: f64 },
    Var(usize),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, i64),
    Neg(Box<Node>),
    Call(Func, Box<Node>),
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        use Node::*;
        match (self, other) {
            (Num { q: a, .. }, Num { q: b, .. }) => a == b,
            (Var(a), Var(b)) => a == b,
            (Add(a, b), Add(c, d))
            | (Sub(a, b), Sub(c, d))
            | (Mul(a, b), Mul(c, d))
            | (Div(a, b), Div(c, d)) => a == c && b == d,
            (Pow(a, k), Pow(b, j)) => k == j && a == b,
            (Neg(a), Neg(b)) => a == b,
            (Call(f, a), Call(g, b)) => f == g && a == b,
            _ => false,
        }
    }
}

/// An immutable expression over `dim` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    dim: usize,
    root: Arc<Node>,
}

impl Expr {
    pub(crate) fn from_node(node: Node, dim: usize) -> Self {
        Expr { dim, root: Arc::new(node) }
    }

    /// Parses `text`; see [`parse_expr`].
    pub fn parse(text: &str, dim: usize) -> Result<Self> {
        parse_expr(text, dim)
    }

    /// The constant `v`, stored exactly.
    pub fn constant(v: f64, dim: usize) -> Self {
        let q = BigRational::from_float(v).unwrap_or_else(BigRational::zero);
        Expr::from_node(Node::num(q), dim)
    }

    /// The coordinate `x{i+1}`.
    pub fn var(i: usize, dim: usize) -> Self {
        assert!(i < dim, "variable index out of range");
        Expr::from_node(Node::Var(i), dim)
    }

    pub fn zero(dim: usize) -> Self {
        Expr::from_node(Node::num(BigRational::zero()), dim)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node(&self) -> &Node {
        &self.root
    }

    /// True when the tree is the literal zero.
    pub fn is_zero_literal(&self) -> bool {
        matches!(&*self.root, Node::Num { q, .. } if q.is_zero())
    }

    /// Evaluates at `p` over any scalar type.
    pub fn eval<S: Scalar>(&self, p: &[S]) -> Result<S> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "point has {} coordinates, expression expects {}",
                p.len(),
                self.dim
            )));
        }
        eval_node(&self.root, p)
    }

    /// Value and gradient at `p` by forward-mode propagation.
    pub fn eval_jet(&self, p: &[f64]) -> Result<Jet> {
        let x = self.eval(&Dual::seed(p))?;
        Ok(Jet::from_dual(x, p.len()))
    }

    /// Replaces each variable `x{i+1}` by `subs[i]`; the result lives in the
    /// dimension of the substituted expressions.
    pub fn substitute(&self, subs: &[Expr]) -> Result<Expr> {
        if subs.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "{} substitutions for {} variables",
                subs.len(),
                self.dim
            )));
        }
        let dim = subs.first().map(|e| e.dim).unwrap_or(self.dim);
        if subs.iter().any(|e| e.dim != dim) {
            return Err(Error::DimensionMismatch("substitutions disagree on dimension".into()));
        }
        Ok(Expr::from_node(subst_node(&self.root, subs), dim))
    }

    fn binary(self, other: Expr, f: fn(Box<Node>, Box<Node>) -> Node) -> Expr {
        assert_eq!(self.dim, other.dim, "expression dimensions differ");
        let dim = self.dim;
        Expr::from_node(f(Box::new((*self.root).clone()), Box::new((*other.root).clone())), dim)
    }

    pub fn powi(&self, k: i64) -> Expr {
        Expr::from_node(Node::Pow(Box::new((*self.root).clone()), k), self.dim)
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, o: Expr) -> Expr {
        self.binary(o, Node::Add)
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, o: Expr) -> Expr {
        self.binary(o, Node::Sub)
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, o: Expr) -> Expr {
        self.binary(o, Node::Mul)
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, o: Expr) -> Expr {
        self.binary(o, Node::Div)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        let dim = self.dim;
        Expr::from_node(Node::Neg(Box::new((*self.root).clone())), dim)
    }
}

fn subst_node(n: &Node, subs: &[Expr]) -> Node {
    let b = |x: &Node| Box::new(subst_node(x, subs));
    match n {
        Node::Num { .. } => n.clone(),
        Node::Var(i) => (*subs[*i].root).clone(),
        Node::Add(x, y) => Node::Add(b(x), b(y)),
        Node::Sub(x, y) => Node::Sub(b(x), b(y)),
        Node::Mul(x, y) => Node::Mul(b(x), b(y)),
        Node::Div(x, y) => Node::Div(b(x), b(y)),
        Node::Pow(x, k) => Node::Pow(b(x), *k),
        Node::Neg(x) => Node::Neg(b(x)),
        Node::Call(f, x) => Node::Call(*f, b(x)),
    }
}

fn domain(n: &Node, msg: &str) -> Error {
    Error::Domain { subtree: Printer(n).to_string(), msg: msg.to_string() }
}

fn eval_node<S: Scalar>(n: &Node, p: &[S]) -> Result<S> {
    Ok(match n {
        Node::Num { f, .. } => S::cst(*f),
        Node::Var(i) => p[*i].clone(),
        Node::Add(a, b) => eval_node(a, p)? + eval_node(b, p)?,
        Node::Sub(a, b) => eval_node(a, p)? - eval_node(b, p)?,
        Node::Mul(a, b) => eval_node(a, p)? * eval_node(b, p)?,
        Node::Div(a, b) => {
            let den = eval_node(b, p)?;
            if den.re() == 0.0 {
                return Err(domain(n, "division by zero"));
            }
            eval_node(a, p)? / den
        }
        Node::Pow(a, k) => {
            let base = eval_node(a, p)?;
            if *k < 0 && base.re() == 0.0 {
                return Err(domain(n, "negative power of zero"));
            }
            base.powi(*k)
        }
        Node::Neg(a) => -eval_node(a, p)?,
        Node::Call(f, a) => {
            let x = eval_node(a, p)?;
            match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Exp => x.exp(),
                Func::Log => {
                    if x.re() <= 0.0 {
                        return Err(domain(n, "log of non-positive value"));
                    }
                    x.ln()
                }
            }
        }
    })
}

struct Printer<'a>(&'a Node);

fn is_atom(n: &Node) -> bool {
    match n {
        Node::Var(_) | Node::Call(..) => true,
        Node::Num { q, .. } => q.is_integer() || decimal_digits(q).is_some(),
        _ => false,
    }
}

/// Number of decimal places needed to write `q` exactly, if finite.
fn decimal_digits(q: &BigRational) -> Option<u32> {
    let mut d = q.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let (mut a, mut b) = (0u32, 0u32);
    while (&d % &two).is_zero() {
        d /= &two;
        a += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        b += 1;
    }
    d.is_one().then_some(a.max(b))
}

fn write_num(f: &mut fmt::Formatter<'_>, q: &BigRational) -> fmt::Result {
    // literals produced by the parser are non-negative; others print as `-(..)`
    if q.is_negative() {
        f.write_str("-")?;
        let abs = q.abs();
        return if is_atom(&Node::num(abs.clone())) {
            write_num(f, &abs)
        } else {
            write!(f, "(")?;
            write_num(f, &abs)?;
            write!(f, ")")
        };
    }
    if q.is_integer() {
        return write!(f, "{}", q.numer());
    }
    match decimal_digits(q) {
        Some(k) => {
            let scaled = q * BigRational::from_integer(BigInt::from(10).pow(k));
            let digits = scaled.to_integer().to_string();
            let k = k as usize;
            let padded = format!("{:0>width$}", digits, width = k + 1);
            let (int, frac) = padded.split_at(padded.len() - k);
            write!(f, "{int}.{frac}")
        }
        None => write!(f, "{}/{}", q.numer(), q.denom()),
    }
}

fn prec(n: &Node) -> u8 {
    match n {
        Node::Add(..) | Node::Sub(..) => 1,
        Node::Mul(..) | Node::Div(..) => 2,
        Node::Pow(..) => 3,
        Node::Neg(_) => 4,
        Node::Num { .. } if !is_atom(n) => 2,
        _ => 5,
    }
}

impl fmt::Display for Printer<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.0;
        let child = |f: &mut fmt::Formatter<'_>, c: &Node, paren: bool| {
            if paren {
                write!(f, "({})", Printer(c))
            } else {
                write!(f, "{}", Printer(c))
            }
        };
        match n {
            Node::Num { q, .. } => write_num(f, q),
            Node::Var(i) => write!(f, "x{}", i + 1),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                let (p, op) = match n {
                    Node::Add(..) => (1, '+'),
                    Node::Sub(..) => (1, '-'),
                    Node::Mul(..) => (2, '*'),
                    _ => (2, '/'),
                };
                child(f, a, prec(a) < p)?;
                write!(f, "{op}")?;
                child(f, b, prec(b) <= p)
            }
            Node::Pow(a, k) => {
                child(f, a, prec(a) < 5)?;
                write!(f, "^{k}")
            }
            Node::Neg(a) => {
                write!(f, "-")?;
                child(f, a, prec(a) < 4)
            }
            Node::Call(func, a) => write!(f, "{}({})", func.name(), Printer(a)),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Printer(&self.root).fmt(f)
    }
}
