//! Grid check of the Dirac condition for graphs of forms and bivectors, and
//! of the twisted condition for a non-closed two-form.

use dirac_core::dirac::{graph_bivector, graph_two_form, is_dirac, is_dirac_twisted};
use dirac_core::domain::BoxDomain;
use dirac_core::fields::{BivectorField, ThreeFormField, TwoFormField};
use dirac_core::Result;

fn main() -> Result<()> {
    let grid = BoxDomain::cube(3, 1.0).grid(5);

    let closed = graph_two_form(&TwoFormField::parse(3, &[((0, 1), "x1*x3"), ((0, 2), "x1*x2")])?);
    let r = is_dirac(&closed, &grid, 1e-8);
    println!("Gr(x1x3 dx1∧dx2 + x1x2 dx1∧dx3): pass {} (max Υ {:.1e})", r.pass, r.max_courant);

    let open = graph_two_form(&TwoFormField::parse(3, &[((0, 1), "x3")])?);
    let r = is_dirac(&open, &grid, 1e-8);
    println!("Gr(x3 dx1∧dx2): pass {} (max Υ {:.2})", r.pass, r.max_courant);
    let phi = ThreeFormField::parse(3, &[((0, 1, 2), "-1")])?;
    let r = is_dirac_twisted(&open, Some(&phi), &grid, 1e-8);
    println!("  twisted by φ = -dx1∧dx2∧dx3: pass {} (max Υ_φ {:.1e})", r.pass, r.max_courant);

    let poisson = graph_bivector(&BivectorField::parse(3, &[((0, 1), "x3")])?);
    let r = is_dirac(&poisson, &grid, 1e-8);
    println!("Gr(x3 ∂1∧∂2): pass {}", r.pass);
    let bad = graph_bivector(&BivectorField::parse(3, &[((0, 1), "x3"), ((1, 2), "x2")])?);
    let r = is_dirac(&bad, &grid, 1e-8);
    println!("Gr(x3 ∂1∧∂2 + x2 ∂2∧∂3): pass {} (max Υ {:.2})", r.pass, r.max_courant);
    Ok(())
}
