//! Lie and Dorfman brackets of explicit fields, the twisted Leibniz identity
//! and the Courant tensor of a frame.

use dirac_core::dirac::{courant_tensor, DiracFrame};
use dirac_core::fields::{dorfman, dorfman_twisted, leibniz_residual, lie_bracket, SectionField, ThreeFormField, VectorField};
use dirac_core::Result;

fn main() -> Result<()> {
    let p = [0.3, -0.2, 0.5];
    let u = VectorField::parse(&["x2", "-x1", "0"])?;
    let v = VectorField::parse(&["0", "x3", "-x2"])?;
    println!("[u, v](p)      = {:?}", lie_bracket(&u, &v, &p)?.as_slice());

    let a = SectionField::parse(&["x2", "0", "1"], &["x3", "0", "x1*x2"])?;
    let b = SectionField::parse(&["1", "x1", "0"], &["0", "x3^2", "0"])?;
    let c = SectionField::parse(&["0", "0", "x1"], &["x2", "1", "0"])?;
    let ab = dorfman(&a, &b, &p)?;
    println!("[[a, b]](p)    = {:?} + {:?}", ab.tangent.as_slice(), ab.cotangent.as_slice());

    let phi = ThreeFormField::parse(3, &[((0, 1, 2), "x1 + x3^2")])?;
    let abt = dorfman_twisted(&a, &b, &phi, &p)?;
    println!("[[a, b]]_φ(p)  = {:?} + {:?}", abt.tangent.as_slice(), abt.cotangent.as_slice());
    println!("Leibniz residual        {:.1e}", leibniz_residual(&a, &b, &c, None, &p)?);
    println!("twisted Leibniz residual {:.1e}", leibniz_residual(&a, &b, &c, Some(&phi), &p)?);

    // ⟨z∂x + dy ... ⟩ is Lagrangian but not involutive
    let frame = DiracFrame::new(vec![
        SectionField::parse(&["x3", "0", "0"], &["0", "-1", "0"])?,
        SectionField::parse(&["0", "x3", "0"], &["1", "0", "0"])?,
        SectionField::parse(&["0", "0", "1"], &["0", "0", "0"])?,
    ])?;
    let t = courant_tensor(&frame, &p)?;
    println!("Courant tensor Υ(e3, e1, e2) = {:.3}", t.get(2, 0, 1));
    Ok(())
}
