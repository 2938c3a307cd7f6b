//! Build the self-dual realization of a Poisson structure, inspect its
//! zero section and classify the resulting diagram.

use dirac_core::dirac::graph_bivector;
use dirac_core::domain::DEFAULT_SEED;
use dirac_core::fields::BivectorField;
use dirac_core::realization::{build_realization, zero_section_checks, RealizeParams};
use dirac_core::verify::{verify_dual_pair, PairData};
use dirac_core::Result;

fn main() -> Result<()> {
    let l = graph_bivector(&BivectorField::parse(2, &[((0, 1), "1 + x1^2")])?);
    let params = RealizeParams { radius: 1.0, quad_nodes: 16, steps: 32 };
    let pair = build_realization(&l, params)?;
    println!("radius {} on chart {:?}", pair.radius(), pair.chart());

    let q = [0.1, -0.2, 0.3, 0.1];
    println!("t(q) = {:?}", pair.t_at(&q)?.as_slice());
    println!("ω(q) =\n{:.4}", pair.omega_at(&q)?);

    let zs = zero_section_checks(&pair, &pair.base().random_points(10, DEFAULT_SEED))?;
    println!("zero section: flow {:.1e}, form {:.1e}, dim V∩K∩W {}", zs.flow_residual, zs.form_residual, zs.max_vkw_dim);

    let p = PairData::realized(pair);
    let v = verify_dual_pair(&p, &p.samples(30), 1e-6)?;
    println!("classification: {}", v.classification);
    Ok(())
}
