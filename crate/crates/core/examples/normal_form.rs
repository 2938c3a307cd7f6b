//! Local normal form around a transversal: the realization of `Gr(dx1∧dx2)`
//! on ℝ³ compared with the model built from the transversal `{x1 = 0}`.

use dirac_core::dirac::graph_two_form;
use dirac_core::domain::BoxDomain;
use dirac_core::fields::{MapField, TwoFormField};
use dirac_core::realization::{build_realization, normal_form_check, RealizeParams, TransversalData};
use dirac_core::Result;

fn main() -> Result<()> {
    let l = graph_two_form(&TwoFormField::parse(3, &[((0, 1), "1")])?);
    let pair = build_realization(&l, RealizeParams::default())?;
    let data = TransversalData {
        i: MapField::parse(2, &["0", "x1", "x2"])?,
        p: MapField::projection(3, &[0, 1])?,
        rho: MapField::parse(3, &["0", "x1", "x2", "x3", "0", "0"])?,
        phi: None,
        alpha: None,
    };
    let rep = normal_form_check(&pair, &data, &BoxDomain::cube(3, 0.4).grid(3))?;
    println!("{} points, max discrepancy {:.1e}, pass {}", rep.points, rep.max_discrepancy, rep.pass);
    Ok(())
}
