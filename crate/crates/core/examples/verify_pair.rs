//! Classify explicit diagrams `(M0, L0) ← (Σ, ω) → (M1, L1)` and compare the
//! four equivalent characterizations of a dual pair.

use dirac_core::dirac::{graph_two_form, DiracFrame};
use dirac_core::domain::BoxDomain;
use dirac_core::fields::{MapField, SectionField, TwoFormField};
use dirac_core::verify::{equivalence_matrix, poisson_leg_check, verify_dual_pair, PairData};
use dirac_core::Result;

fn frame(secs: &[(&[&str], &[&str])]) -> Result<DiracFrame> {
    DiracFrame::new(secs.iter().map(|(u, x)| SectionField::parse(u, x)).collect::<Result<_>>()?)
}

fn report(name: &str, p: &PairData) -> Result<()> {
    let pts = p.samples(50);
    let v = verify_dual_pair(p, &pts, 1e-6)?;
    println!("{name}: {}", v.classification);
    for c in &v.checks {
        println!("  {:<28} {:>5}  {:.1e}", c.name, c.passed, c.max_residual);
    }
    let eq = equivalence_matrix(p, &pts, 1e-6)?;
    println!("  equivalent items {:?}", eq.items);
    let legs = poisson_leg_check(p, &pts, 1e-6)?;
    println!("  Poisson legs {} / {}", legs.leg0.poisson, legs.leg1.poisson);
    Ok(())
}

fn main() -> Result<()> {
    // symplectic ℝ² over itself: (ℝ², Gr ω) ← (ℝ², ω) → point
    let sym = PairData::explicit(
        MapField::identity(2),
        MapField::new(2, Vec::new())?,
        TwoFormField::parse(2, &[((0, 1), "1")])?,
        graph_two_form(&TwoFormField::parse(2, &[((0, 1), "1")])?),
        DiracFrame::new(Vec::new())?,
        BoxDomain::cube(2, 1.0),
    )?;
    report("symplectic plane", &sym)?;

    let pre = PairData::explicit(
        MapField::parse(3, &["x1", "x2"])?,
        MapField::parse(3, &["x2", "x3"])?,
        TwoFormField::parse(3, &[((0, 1), "1"), ((1, 2), "1")])?,
        frame(&[(&["1", "0"], &["0", "0"]), (&["0", "0"], &["0", "1"])])?,
        frame(&[(&["0", "1"], &["0", "0"]), (&["0", "0"], &["1", "0"])])?,
        BoxDomain::cube(3, 1.0),
    )?;
    report("dx∧dy + dy∧dz", &pre)
}
