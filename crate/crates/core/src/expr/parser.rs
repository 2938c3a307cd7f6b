//! Recursive-descent parser for coefficient expressions.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' integer)?
//! base   := number | var | func '(' expr ')' | '(' expr ')' | '-' base
//! var    := 'x' digits          (1-indexed)
//! func   := 'sin' | 'cos' | 'exp' | 'log'
//! number := digits ('.' digits)?
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Expr, Func, Node};
use crate::error::{Error, Result};

/// Parses `text` as an expression in the variables `x1..x{dim}`.
pub fn parse_expr(text: &str, dim: usize) -> Result<Expr> {
    if dim == 0 {
        return Err(Error::DimensionMismatch("expression dimension must be positive".into()));
    }
    let mut p = Parser { src: text.as_bytes(), pos: 0, dim };
    let node = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(Expr::from_node(node, dim))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { offset: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat(b'/') {
                lhs = Node::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Node> {
        let base = self.base()?;
        if self.eat(b'^') {
            let neg = self.eat(b'-');
            self.skip_ws();
            let start = self.pos;
            let digits = self.digits();
            if digits.is_empty() {
                return Err(self.err("expected integer exponent"));
            }
            let k: i64 = digits
                .parse()
                .map_err(|_| Error::Parse { offset: start, msg: "exponent out of range".into() })?;
            return Ok(Node::Pow(Box::new(base), if neg { -k } else { k }));
        }
        Ok(base)
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn base(&mut self) -> Result<Node> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'-') => {
                self.pos += 1;
                Ok(Node::Neg(Box::new(self.base()?)))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(_) => Err(self.err("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Node> {
        let int = self.digits();
        let mut num: BigInt = int.parse().expect("digits");
        let mut den = BigInt::one();
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            let frac = self.digits();
            if frac.is_empty() {
                return Err(self.err("expected digits after `.`"));
            }
            let ten = BigInt::from(10);
            for ch in frac.bytes() {
                num = num * &ten + BigInt::from(ch - b'0');
                den *= &ten;
            }
        }
        Ok(Node::num(BigRational::new(num, den)))
    }

    fn ident(&mut self) -> Result<Node> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii").to_string();
        let func = match name.as_str() {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            _ => None,
        };
        if let Some(f) = func {
            if !self.eat(b'(') {
                return Err(self.err("expected `(` after function name"));
            }
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.err("expected `)`"));
            }
            return Ok(Node::Call(f, Box::new(arg)));
        }
        let index = name
            .strip_prefix('x')
            .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|d| d.parse::<usize>().ok())
            .filter(|&k| k >= 1);
        match index {
            Some(k) if k <= self.dim => Ok(Node::Var(k - 1)),
            Some(k) => Err(Error::DimensionMismatch(format!(
                "variable x{k} at byte {start} exceeds dimension {}",
                self.dim
            ))),
            None => Err(Error::UnknownVariable { name, offset: start }),
        }
    }
}

impl Node {
    pub(crate) fn num(q: BigRational) -> Node {
        let f = rational_to_f64(&q);
        Node::Num { q, f }
    }
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    if q.is_zero() {
        0.0
    } else {
        q.to_f64().unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_variable() {
        let e = parse_expr("x1", 2).unwrap();
        assert_eq!(*e.node(), Node::Var(0));
    }

    #[test]
    fn product_tree_for_x_squared_y() {
        let e = parse_expr("x1^2*x2", 3).unwrap();
        match e.node() {
            Node::Mul(a, b) => {
                assert_eq!(**a, Node::Pow(Box::new(Node::Var(0)), 2));
                assert_eq!(**b, Node::Var(1));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sum_with_function_and_fraction() {
        let e = parse_expr("sin(x1)+1/2", 1).unwrap();
        assert!(matches!(e.node(), Node::Add(..)));
        assert!((e.eval(&[0.0]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn decimal_literal_is_exact() {
        let e = parse_expr("0.1", 1).unwrap();
        match e.node() {
            Node::Num { q, .. } => assert_eq!(*q, BigRational::new(1.into(), 10.into())),
            _ => panic!(),
        }
    }

    #[test]
    fn errors_carry_offsets() {
        match parse_expr("x1 + * 2", 1) {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("{other:?}"),
        }
        match parse_expr("x1 + y", 1) {
            Err(Error::UnknownVariable { name, offset }) => {
                assert_eq!(name, "y");
                assert_eq!(offset, 5);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_expr("x3", 2), Err(Error::DimensionMismatch(_))));
        assert!(matches!(parse_expr("x0", 2), Err(Error::UnknownVariable { .. })));
        assert!(matches!(parse_expr("(x1", 2), Err(Error::Parse { .. })));
        assert!(matches!(parse_expr("x1^x2", 2), Err(Error::Parse { .. })));
        assert!(matches!(parse_expr("", 2), Err(Error::Parse { .. })));
    }

    #[test]
    fn whitespace_is_insignificant() {
        let a = parse_expr(" x1 *  ( x2 - 3 ) ", 2).unwrap();
        let b = parse_expr("x1*(x2-3)", 2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unary_minus_binds_to_base() {
        // `-x1^2` is `(-x1)^2` under this grammar
        let e = parse_expr("-x1^2", 1).unwrap();
        assert!((e.eval(&[3.0]).unwrap() - 9.0).abs() < 1e-15);
    }
}
