//! Compose two pairs over a common middle space and reduce a weak pair
//! along its leaves `V∩K∩W`.

use dirac_core::dirac::DiracFrame;
use dirac_core::domain::BoxDomain;
use dirac_core::fields::{MapField, SectionField, TwoFormField};
use dirac_core::verify::{compose_pairs, leaf_directions, reduction_verify, verify_weak_dual_pair, PairData};
use dirac_core::Result;

/// The cotangent structure `T*ℝⁿ`.
fn cotangent(n: usize) -> Result<DiracFrame> {
    let secs = (0..n)
        .map(|i| {
            let xi: Vec<String> = (0..n).map(|j| if i == j { "1".into() } else { "0".into() }).collect();
            let u = vec!["0"; n];
            let xi: Vec<&str> = xi.iter().map(String::as_str).collect();
            SectionField::parse(&u, &xi)
        })
        .collect::<Result<_>>()?;
    DiracFrame::new(secs)
}

/// `(ℝ, T*) ← (ℝ², λ dα∧dβ) → (ℝ, T*)` with `s = t = β`.
fn circle_pair(lambda: &str) -> Result<PairData> {
    PairData::explicit(
        MapField::parse(2, &["x2"])?,
        MapField::parse(2, &["x2"])?,
        TwoFormField::parse(2, &[((0, 1), lambda)])?,
        cotangent(1)?,
        cotangent(1)?,
        BoxDomain::cube(2, 1.0),
    )
}

fn main() -> Result<()> {
    let p01 = circle_pair("1")?;
    let p12 = circle_pair("1.4142135623730951")?;
    // (α, β, γ) ↦ ((α, β), (γ, β))
    let chart = MapField::parse(3, &["x1", "x2", "x3", "x2"])?;
    let p02 = compose_pairs(&p01, &p12, chart, BoxDomain::cube(3, 1.0))?;
    let v = verify_weak_dual_pair(&p02, &p02.samples(20), 1e-6)?;
    println!("composite: {}", v.classification);
    let leaves = leaf_directions(&p02, &[0.1, 0.2, 0.3])?;
    println!("leaf direction {:?}", leaves.column(0).as_slice());

    // reduce ω = dα∧dβ − dγ∧dβ along ⟨∂α − ∂γ⟩ by r = (α + γ, β)
    let p = PairData::explicit(
        MapField::parse(3, &["x2"])?,
        MapField::parse(3, &["x2"])?,
        TwoFormField::parse(3, &[((0, 1), "1"), ((1, 2), "-1")])?,
        cotangent(1)?,
        cotangent(1)?,
        BoxDomain::cube(3, 1.0),
    )?;
    let r = MapField::parse(3, &["x1 + x3", "x2"])?;
    let rep = reduction_verify(
        &p,
        &r,
        &TwoFormField::parse(2, &[((0, 1), "1")])?,
        &MapField::parse(2, &["x2"])?,
        &MapField::parse(2, &["x2"])?,
        &p.samples(20),
        1e-6,
    )?;
    for c in &rep.identities {
        println!("  {:<16} {}", c.name, c.passed);
    }
    println!("quotient: {}", rep.quotient.classification);
    Ok(())
}
