//! Linear algebra of dual pairs: the five equivalent weak conditions and the
//! five equivalent dual conditions on random subspaces `B`, `C` and forms
//! `ω`, in floating point and in exact rational arithmetic.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dirac_core::lindirac::exact;
use dirac_core::lindirac::{dual_conditions, weak_conditions, LagrangianSubspace, Subspace};
use dirac_core::Result;
use nalgebra::{DMatrix, DVector};

fn main() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut agree, mut weak, mut dual) = (0, 0, 0);
    for k in 0..200 {
        let (b, c, w) = exact::random_instance(&mut rng, 1 + k % 5);
        let wk = exact::weak_conditions(&b, &c, &w);
        let du = exact::dual_conditions(&b, &c, &w);
        agree += (wk.iter().all(|&x| x == wk[0]) && du.iter().all(|&x| x == du[0])) as usize;
        weak += wk[0] as usize;
        dual += du[0] as usize;
    }
    println!("exact: 200 instances, {agree} with agreeing conditions, {weak} weak, {dual} dual");

    // ℝ² with ω = dx1∧dx2 and B = C = ⟨e2⟩ is dual; ℝ³ with
    // ω = dx1∧dx2 + dx2∧dx3, B = ⟨e3⟩, C = ⟨e1⟩ is not even weak
    let e = |n: usize, i: usize| DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 });
    let mut w2 = DMatrix::zeros(2, 2);
    w2[(0, 1)] = 1.0;
    w2[(1, 0)] = -1.0;
    let b = Subspace::span(2, &[e(2, 1)])?;
    println!("ℝ²: weak {:?}, dual {:?}", weak_conditions(&b, &b, &w2), dual_conditions(&b, &b, &w2));
    let mut w3 = DMatrix::zeros(3, 3);
    w3[(0, 1)] = 1.0;
    w3[(1, 0)] = -1.0;
    w3[(1, 2)] = 1.0;
    w3[(2, 1)] = -1.0;
    let (b, c) = (Subspace::span(3, &[e(3, 2)])?, Subspace::span(3, &[e(3, 0)])?);
    println!("ℝ³: weak {:?}, dual {:?}", weak_conditions(&b, &c, &w3), dual_conditions(&b, &c, &w3));

    let graph = Subspace::span(4, &[DVector::from_vec(vec![1.0, 0.0, 0.0, 1.0]), DVector::from_vec(vec![0.0, 1.0, -1.0, 0.0])])?;
    let l = LagrangianSubspace::new(graph)?;
    println!("graph of dx∧dy is Lagrangian in 𝕋ℝ² (dim {})", l.subspace().dim());
    Ok(())
}
