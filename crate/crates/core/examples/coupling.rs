//! Dirac structures from coupling data `(H, ω, π)` along a submersion, with
//! the involutivity conditions evaluated term by term.

use dirac_core::dirac::{coupling_verify, CouplingTriple};
use dirac_core::domain::BoxDomain;
use dirac_core::fields::{BivectorField, MapField, TwoFormField, VectorField};
use dirac_core::Result;

fn main() -> Result<()> {
    // ℝ³ → ℝ, (x1, x2, x3) ↦ x1, vertical Poisson π = x3 ∂2∧∂3
    let s = MapField::projection(3, &[0])?;
    let domain = BoxDomain::cube(3, 1.0);
    let grid = domain.grid(4);
    for (name, h) in [("H = ⟨∂1⟩", "0"), ("H = ⟨∂1 + x2 ∂3⟩", "x2")] {
        let t = CouplingTriple::new(
            s.clone(),
            vec![VectorField::parse(&["1", "0", h])?],
            TwoFormField::zero(3),
            BivectorField::parse(3, &[((1, 2), "x3")])?,
        )?;
        let r = coupling_verify(&t, &domain, &grid, 1e-8)?;
        println!(
            "{name}: invariants {}, [π,π]=0 {}, ℒ_u π {}, curvature {}, dω {}",
            r.invariants.pass, r.a.pass, r.b.pass, r.c.pass, r.d.pass
        );
        println!("  frame is Dirac: {} (agrees with the conditions: {})", r.dirac.pass, r.agree);
    }
    Ok(())
}
