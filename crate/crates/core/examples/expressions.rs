//! Parse a scalar expression, print it back, evaluate it with first
//! derivatives and substitute a map into it.

use dirac_core::expr::Expr;
use dirac_core::Result;

fn main() -> Result<()> {
    let f = Expr::parse("x1^2*sin(x2) + exp(-x1*x2)/3", 2)?;
    println!("f        = {f}");
    let jet = f.eval_jet(&[1.0, 0.5])?;
    println!("f(1,0.5) = {:.6}", jet.value);
    println!("∇f       = {:?}", jet.partials);

    // f ∘ (u + v, u v)
    let map = [Expr::parse("x1 + x2", 2)?, Expr::parse("x1*x2", 2)?];
    let g = f.substitute(&map)?;
    println!("f∘F      = {g}");
    println!("(f∘F)(0.5,0.5) = {:.6}", g.eval(&[0.5, 0.5])?);

    match Expr::parse("x1 +* x2", 2) {
        Err(e) => println!("malformed input: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
