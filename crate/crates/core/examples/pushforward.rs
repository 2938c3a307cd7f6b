//! The family `Lˢ` along a submersion: where it jumps, whether it is
//! involutive, and the pushed-forward structure `s_!(L_p)`.

use dirac_core::dirac::{family_courant, family_jump, family_ls, graph_two_form, pushforward_family, rank_profile, FAMILY_STEP};
use dirac_core::domain::BoxDomain;
use dirac_core::fields::{MapField, TwoFormField};
use dirac_core::Result;

fn main() -> Result<()> {
    // x dx∧dy along (x, y) ↦ x
    let l = graph_two_form(&TwoFormField::parse(2, &[((0, 1), "x1")])?);
    let s = MapField::projection(2, &[0])?;
    for x in [-0.5, 0.0, 0.5] {
        let p = [x, 0.2];
        println!(
            "x = {x:+.1}: dim Lˢ = {}, jump {:.2e}",
            family_ls(&l, &s, &p)?.subspace().dim(),
            family_jump(&l, &s, &p, FAMILY_STEP)?
        );
    }
    let profile = rank_profile(&l, &s, None, &BoxDomain::cube(2, 1.0).grid(5))?;
    println!("rank jumps: {:?}", profile.jumps);

    // d(x²y)∧dz along x: forward
    let l = graph_two_form(&TwoFormField::parse(3, &[((0, 2), "2*x1*x2"), ((1, 2), "x1^2")])?);
    let s = MapField::projection(3, &[0])?;
    for p in BoxDomain::cube(3, 1.0).grid(3) {
        let j = family_jump(&l, &s, &p, FAMILY_STEP)?;
        let c = family_courant(&l, &s, &p)?.max_abs();
        if j > 1e-2 || c > 1e-6 {
            println!("not forward at {p:?}");
        }
    }
    let pushed = pushforward_family(&l, &s, &[0.3, 0.1, -0.4])?;
    println!("d(x²y)∧dz along x: s_!(L) has dim {} in 𝕋ℝ¹", pushed.subspace().dim());
    Ok(())
}
