use super::*;
use crate::dirac::{foliation_dirac, graph_bivector, graph_two_form};
use crate::fields::{BivectorField, OneFormField, TwoFormField, VectorField};
use crate::lindirac::graph_of_form;
use crate::verify::{verify_dual_pair, Classification, PairData};

fn tm(n: usize) -> DiracFrame {
    graph_two_form(&TwoFormField::zero(n))
}

fn cotangent(n: usize) -> DiracFrame {
    graph_bivector(&BivectorField::zero(n))
}

fn flat() -> DiracFrame {
    graph_two_form(&TwoFormField::parse(2, &[((0, 1), "1")]).unwrap())
}

fn x_dx_dy() -> DiracFrame {
    graph_two_form(&TwoFormField::parse(2, &[((0, 1), "x1")]).unwrap())
}

fn z_dx_dy() -> DiracFrame {
    graph_bivector(&BivectorField::parse(3, &[((0, 1), "x3")]).unwrap())
}

/// `dc2∧dx − dc1∧dy − dc1∧dc2` in the coordinates `(x, y, c1, c2)`.
fn flat_omega() -> DMatrix<f64> {
    let mut w = DMatrix::zeros(4, 4);
    for (i, j, v) in [(0, 3, -1.0), (1, 2, 1.0), (2, 3, -1.0)] {
        w[(i, j)] = v;
        w[(j, i)] = -v;
    }
    w
}

fn chart_points(pair: &RealizationPair, count: usize) -> Vec<Vec<f64>> {
    pair.chart().random_points(count, 3)
}

fn close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
    linalg::max_abs(&(a - b)) < tol
}

#[test]
fn spray_examples() {
    let q = [0.1, -0.2, 0.3, 0.7];
    assert_eq!(default_spray(&cotangent(2)).at(&q).unwrap(), DVector::zeros(4));
    assert_eq!(default_spray(&tm(2)).at(&q).unwrap(), DVector::from_vec(vec![0.3, 0.7, 0.0, 0.0]));
    assert_eq!(default_spray(&flat()).at(&q).unwrap(), DVector::from_vec(vec![0.3, 0.7, 0.0, 0.0]));
    // frame dx + z∂y, dy − z∂x, dz: 𝒱(x, y, z, c) = (−c2 z, c1 z, 0, 0, 0, 0)
    let v = default_spray(&z_dx_dy()).at(&[0.0, 0.0, 0.5, 1.0, 2.0, 3.0]).unwrap();
    assert_eq!(v.as_slice(), &[-1.0, 0.5, 0.0, 0.0, 0.0, 0.0]);
}

#[test]
fn spray_axioms_hold() {
    for l in [tm(2), cotangent(2), x_dx_dy(), z_dx_dy(), foliation_dirac(&MapField::projection(2, &[0]).unwrap()).unwrap()] {
        let n = l.dim();
        let samples = BoxDomain::cube(2 * n, 0.5).random_points(20, 1);
        let r = default_spray(&l).axiom_residuals(&samples).unwrap();
        assert!(r.spr1 < 1e-9 && r.spr2 < 1e-9, "{r:?}");
    }
}

#[test]
fn spray_jacobian_matches_differences() {
    let s = default_spray(&z_dx_dy());
    let q = [0.1, 0.2, 0.3, -0.4, 0.5, 0.6];
    let (_, j) = s.jacobian(&q).unwrap();
    for k in 0..6 {
        let (mut a, mut b) = (q.to_vec(), q.to_vec());
        a[k] += 1e-6;
        b[k] -= 1e-6;
        let fd = (s.at(&a).unwrap() - s.at(&b).unwrap()) / 2e-6;
        assert!((fd - j.column(k)).amax() < 1e-8);
    }
}

#[test]
fn flow_examples() {
    let q = [0.1, -0.2, 0.3, 0.4];
    let id = flow(&default_spray(&cotangent(2)), &q, 1.0, 8).unwrap();
    assert_eq!(id.point.as_slice(), &q);
    assert_eq!(id.jacobian, DMatrix::identity(4, 4));
    let st = flow(&default_spray(&tm(2)), &q, 1.0, 8).unwrap();
    assert!((st.point - DVector::from_vec(vec![0.4, 0.2, 0.3, 0.4])).amax() < 1e-14);
    let mut d = DMatrix::identity(4, 4);
    d.view_mut((0, 2), (2, 2)).fill_with_identity();
    assert!(close(&st.jacobian, &d, 1e-14));
}

#[test]
fn flow_converges_under_step_halving() {
    let l = z_dx_dy().with_domain(BoxDomain::cube(3, 2.0)).unwrap();
    let s = default_spray(&l);
    let q = [0.0, 0.0, 1.0, 0.3, -0.2, 0.4];
    let a = flow(&s, &q, 1.0, 64).unwrap();
    let b = flow(&s, &q, 1.0, 128).unwrap();
    assert!((a.point - &b.point).amax() < 1e-10);
    assert!(close(&a.jacobian, &b.jacobian, 1e-10));
    // z is constant, so x = −ε c2 z and y = ε c1 z
    assert!((b.point[0] - 0.2).abs() < 1e-12);
    assert!((b.point[1] - 0.3).abs() < 1e-12);
    assert_eq!(b.point[2], 1.0);
}

#[test]
fn flow_reports_chart_exit_and_bad_input() {
    let s = default_spray(&tm(1));
    match flow(&s, &[0.9, 1.0], 1.0, 10) {
        Err(Error::ChartExit { step, steps: 10 }) => assert_eq!(step, 2),
        other => panic!("expected a chart exit, got {other:?}"),
    }
    assert!(matches!(flow(&s, &[0.0], 1.0, 4), Err(Error::DimensionMismatch(_))));
    assert!(matches!(flow(&s, &[0.0, 0.0], 1.0, 0), Err(Error::Invalid(_))));
}

#[test]
fn omega_l_examples() {
    let q = [0.3, -0.1, 0.5, 0.2];
    assert_eq!(omega_l(&tm(2)).at(&q).unwrap(), DMatrix::zeros(4, 4));
    // Σ dx_j∧dc_j
    let mut can = DMatrix::zeros(4, 4);
    for j in 0..2 {
        can[(j, 2 + j)] = 1.0;
        can[(2 + j, j)] = -1.0;
    }
    assert!(close(&omega_l(&cotangent(2)).at(&q).unwrap(), &can, 1e-15));
    // dc2∧dx − dc1∧dy
    let mut w = DMatrix::zeros(4, 4);
    for (i, j, v) in [(3, 0, 1.0), (2, 1, -1.0)] {
        w[(i, j)] = v;
        w[(j, i)] = -v;
    }
    assert!(close(&omega_l(&flat()).at(&q).unwrap(), &w, 1e-15));
}

#[test]
fn omega_l_is_minus_d_lambda() {
    // λ = x c1 dy − x c2 dx for Gr(x dx∧dy); compare with the exterior derivative of the one-form
    let lambda = OneFormField::parse(&["-x1*x4", "x1*x3", "0", "0"]).unwrap();
    let q = [0.4, -0.3, 0.2, 0.7];
    let d = lambda.d_at(&q).unwrap();
    assert!(close(&omega_l(&x_dx_dy()).at(&q).unwrap(), &(-d), 1e-13));
}

#[test]
fn flat_realization_matches_closed_form() {
    let pair = build_realization(&flat(), RealizeParams::default()).unwrap();
    assert_eq!(pair.radius(), 0.5);
    let oracle = flat_omega();
    for q in chart_points(&pair, 100) {
        assert!(close(&pair.omega_at(&q).unwrap(), &oracle, 1e-10));
        let t = pair.t_at(&q).unwrap();
        assert!((t - DVector::from_vec(vec![q[0] + q[2], q[1] + q[3]])).amax() < 1e-12);
    }
    // the integrand is affine in ε, so any even N and any K give the same form
    let q = [0.1, 0.2, -0.3, 0.4];
    for (nq, k) in [(2, 1), (4, 3), (6, 12)] {
        assert!(close(&pair.omega_with(&q, nq, k).unwrap(), &oracle, 1e-10));
    }
}

#[test]
fn realization_examples() {
    let p = build_realization(&tm(2), RealizeParams::default()).unwrap();
    let q = [0.1, 0.2, 0.3, -0.4];
    assert_eq!(p.omega_at(&q).unwrap(), DMatrix::zeros(4, 4));
    assert!((p.t_at(&q).unwrap() - DVector::from_vec(vec![0.4, -0.2])).amax() < 1e-14);

    let p = build_realization(&cotangent(2), RealizeParams::default()).unwrap();
    assert!(close(&p.omega_at(&q).unwrap(), &omega_l(&cotangent(2)).at(&q).unwrap(), 1e-14));
    assert_eq!(p.t_at(&q).unwrap().as_slice(), &q[..2]);
}

#[test]
fn params_are_validated() {
    for params in [
        RealizeParams { radius: 0.0, ..Default::default() },
        RealizeParams { quad_nodes: 3, ..Default::default() },
        RealizeParams { steps: 0, ..Default::default() },
    ] {
        assert!(matches!(build_realization(&flat(), params), Err(Error::Invalid(_))));
    }
}

#[test]
fn radius_shrinks_until_flows_stay_inside() {
    // with R = 1 the straight-line flow from the base corner 0.5 reaches 1.5
    let p = build_realization(&tm(1), RealizeParams::default()).unwrap();
    assert_eq!(p.radius(), 0.5);
    let p = build_realization(&z_dx_dy(), RealizeParams::default()).unwrap();
    for q in p.chart().grid(2) {
        assert!(p.flow_at(&q, 1.0).is_ok());
    }
}

#[test]
fn omega_is_antisymmetric_and_closed() {
    for l in [x_dx_dy(), z_dx_dy()] {
        let pair = build_realization(&l, RealizeParams::default()).unwrap();
        let pts = chart_points(&pair, 5);
        for q in &pts {
            let w = pair.omega_at(q).unwrap();
            assert_eq!(w, -w.transpose());
        }
        let rep = twisted_closedness_check(&pair, None, None, &pts).unwrap();
        assert!(rep.max_residual < 1e-6, "{rep:?}");
    }
}

#[test]
fn closedness_with_matching_twists_cancels() {
    // s = t = id on ℝ³: the residual is dω − φ₀ + φ₁
    let explicit = |w: &str| crate::verify::Geometry::Explicit {
        s: MapField::identity(3),
        t: MapField::identity(3),
        w: TwoFormField::parse(3, &[((0, 1), w)]).unwrap(),
    };
    let phi = ThreeFormField::parse(3, &[((0, 1, 2), "x1^2 + 1")]).unwrap();
    let pts = BoxDomain::cube(3, 1.0).random_points(10, 2);
    let closed = explicit("x1*x2 + sin(x1)");
    assert!(twisted_closedness_check(&closed, Some(&phi), Some(&phi), &pts).unwrap().max_residual < 1e-8);
    let open = explicit("x3");
    assert!((twisted_closedness_check(&open, None, None, &pts).unwrap().max_residual - 1.0).abs() < 1e-6);
    let dw = ThreeFormField::parse(3, &[((0, 1, 2), "1")]).unwrap();
    assert!(twisted_closedness_check(&open, Some(&dw), None, &pts).unwrap().max_residual < 1e-8);
}

#[test]
fn zero_section_formulas() {
    for l in [tm(2), cotangent(2), flat(), x_dx_dy(), z_dx_dy()] {
        let pair = build_realization(&l, RealizeParams::default()).unwrap();
        let samples = pair.base().random_points(10, 5);
        let rep = zero_section_checks(&pair, &samples).unwrap();
        assert!(rep.pass, "{rep:?}");
    }
    // T*M with u = e1, η' = dx1: ω = 1
    let w = zero_section_form(&cotangent(2), &[0.0, 0.0]).unwrap();
    let a = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
    let b = DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0]);
    assert_eq!(a.dot(&(&w * &b)), 1.0);
    // TM: Dφ₁(u, v) = (u + v, v)
    let d = zero_section_flow_jacobian(&tm(2), &[0.2, 0.1], 1.0).unwrap();
    assert_eq!(d * DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0]), DVector::from_vec(vec![4.0, 6.0, 3.0, 4.0]));
    // pure covectors pair to zero when the tangent parts vanish
    let w = zero_section_form(&cotangent(3), &[0.1, 0.2, 0.3]).unwrap();
    assert_eq!(w.view((3, 3), (3, 3)).into_owned(), DMatrix::zeros(3, 3));
}

#[test]
fn zero_section_form_pairs_like_the_formula() {
    let l = z_dx_dy();
    let x = [0.2, -0.3, 0.4];
    let w = zero_section_form(&l, &x).unwrap();
    let frame = l.at(&x).unwrap();
    let split = |u: &[f64], c: &[f64]| -> (DVector<f64>, DVector<f64>, DVector<f64>, DVector<f64>) {
        let mut v = DVector::zeros(3);
        let mut eta = DVector::zeros(3);
        for (ci, e) in c.iter().zip(&frame) {
            v += &e.tangent * *ci;
            eta += &e.cotangent * *ci;
        }
        let mut q = DVector::zeros(6);
        q.rows_mut(0, 3).copy_from_slice(u);
        q.rows_mut(3, 3).copy_from_slice(c);
        (q, DVector::from_column_slice(u), v, eta)
    };
    let (a, u, v, eta) = split(&[0.3, 1.0, -0.5], &[0.7, -0.2, 0.4]);
    let (b, u2, v2, eta2) = split(&[-0.1, 0.6, 0.2], &[0.5, 0.9, -1.1]);
    let formula = eta2.dot(&(&u + &v * 0.5)) - eta.dot(&(&u2 + &v2 * 0.5));
    assert!((a.dot(&(&w * &b)) - formula).abs() < 1e-14);
}

#[test]
fn main_theorem_pairs_are_dual_pairs() {
    let foliation = foliation_dirac(&MapField::projection(2, &[0]).unwrap()).unwrap();
    for l in [tm(2), cotangent(2), flat(), x_dx_dy(), z_dx_dy(), foliation] {
        let pair = build_realization(&l, RealizeParams::default()).unwrap();
        let data = PairData::realized(pair);
        let v = verify_dual_pair(&data, &data.samples(10), 1e-6).unwrap();
        assert_eq!(v.classification, Classification::DualPair, "{v:#?}");
    }
}

#[test]
fn lifts_in_the_tangent_pair() {
    let pair = build_realization(&tm(2), RealizeParams::default()).unwrap();
    let q = [0.1, 0.2, 0.3, -0.2];
    let a = SectionField::tangent(VectorField::coordinate(0, 2));
    let w = realization_lift(&pair, &a, &q, Leg::Source).unwrap();
    assert!((w - DVector::from_vec(vec![1.0, 0.0, -1.0, 0.0])).amax() < 1e-12);
    let zero = SectionField::tangent(VectorField::zero(2));
    assert_eq!(realization_lift(&pair, &zero, &q, Leg::Target).unwrap().amax(), 0.0);
    // a covector is not a section of TM
    let dx = SectionField::cotangent(OneFormField::parse(&["1", "0"]).unwrap());
    assert!(matches!(realization_lift(&pair, &dx, &q, Leg::Source), Err(Error::Invalid(_))));
}

#[test]
fn lifts_are_related_orthogonal_and_commute() {
    let l = x_dx_dy();
    let pair = build_realization(&l, RealizeParams::default()).unwrap();
    let a0 = SectionField::parse(&["1", "0"], &["0", "x1"]).unwrap();
    let a1 = SectionField::parse(&["0", "1"], &["-x1", "0"]).unwrap();
    let lift = |leg: Leg, a: &SectionField, q: &[f64]| realization_lift(&pair, a, q, leg).unwrap();
    for q in chart_points(&pair, 3) {
        let pp = pair.point(&q).unwrap();
        let w0 = lift(Leg::Source, &a0, &q);
        let w1 = lift(Leg::Target, &a1, &q);
        // relatedness of w₀ + ι_{w₀}ω to a₀ along s, and of w₁ + ι_{w₁}ω to −a₁ along t
        let e0 = a0.at(&q[..2]).unwrap();
        assert!((&pp.ds * &w0 - &e0.tangent).amax() < 1e-8);
        assert!((pp.omega.transpose() * &w0 - pp.ds.transpose() * &e0.cotangent).amax() < 1e-8);
        assert!((&pp.dt * &w0).amax() < 1e-8);
        let tq: Vec<f64> = pp.t.iter().copied().collect();
        let e1 = a1.at(&tq).unwrap();
        assert!((&pp.dt * &w1 - &e1.tangent).amax() < 1e-8);
        assert!((pp.omega.transpose() * &w1 + pp.dt.transpose() * &e1.cotangent).amax() < 1e-8);
        assert!(w0.dot(&(&pp.omega * &w1)).abs() < 1e-8);
        // [w₀, w₁] = Dw₁·w₀ − Dw₀·w₁ by central differences
        let h = 1e-4;
        let dir = |leg: Leg, a: &SectionField, v: &DVector<f64>| {
            let qp: Vec<f64> = q.iter().zip(v.iter()).map(|(x, d)| x + h * d).collect();
            let qm: Vec<f64> = q.iter().zip(v.iter()).map(|(x, d)| x - h * d).collect();
            (lift(leg, a, &qp) - lift(leg, a, &qm)) / (2.0 * h)
        };
        let bracket = dir(Leg::Target, &a1, &w0) - dir(Leg::Source, &a0, &w1);
        assert!(bracket.amax() < 1e-5, "{bracket}");
    }
}

fn flat_transversal() -> TransversalData {
    // X = y-axis, NX = (y, ν), ρ(y, ν) = (0, y, ν, 0)
    TransversalData {
        i: MapField::parse(1, &["0", "x1"]).unwrap(),
        p: MapField::projection(2, &[0]).unwrap(),
        rho: MapField::parse(2, &["0", "x1", "x2", "0"]).unwrap(),
        phi: Some(MapField::parse(2, &["x2", "x1"]).unwrap()),
        alpha: Some(TwoFormField::parse(2, &[((0, 1), "-1")]).unwrap()),
    }
}

#[test]
fn normal_form_flat_transversal() {
    let pair = build_realization(&flat(), RealizeParams::default()).unwrap();
    let grid = BoxDomain::cube(2, 0.4).grid(5);
    let rep = normal_form_check(&pair, &flat_transversal(), &grid).unwrap();
    assert!(rep.pass && rep.max_discrepancy < 1e-9 && rep.candidate_residual < 1e-12, "{rep:?}");
    // φ^!(L) = Gr(−dy∧dν) by hand
    let expect = graph_of_form(&TwoFormField::parse(2, &[((0, 1), "-1")]).unwrap().at(&[0.0, 0.0]).unwrap()).unwrap();
    let phi = MapField::parse(2, &["x2", "x1"]).unwrap();
    assert!(pullback_pt(&phi.jacobian(&[0.0, 0.0]).unwrap(), &pair.frame().lagrangian(&[0.0, 0.0]).unwrap())
        .unwrap()
        .distance(&expect)
        < 1e-12);
    // a wrong candidate α is reported
    let mut bad = flat_transversal();
    bad.alpha = Some(TwoFormField::parse(2, &[((0, 1), "1")]).unwrap());
    let rep = normal_form_check(&pair, &bad, &grid).unwrap();
    assert!(!rep.pass && (rep.candidate_residual - 2.0).abs() < 1e-12);
}

#[test]
fn normal_form_whole_manifold_and_presymplectic() {
    let pair = build_realization(&x_dx_dy(), RealizeParams::default()).unwrap();
    let data = TransversalData {
        i: MapField::identity(2),
        p: MapField::identity(2),
        rho: MapField::parse(2, &["x1", "x2", "0", "0"]).unwrap(),
        phi: None,
        alpha: None,
    };
    let rep = normal_form_check(&pair, &data, &BoxDomain::cube(2, 0.4).grid(5)).unwrap();
    assert!(rep.pass, "{rep:?}");

    let l = graph_two_form(&TwoFormField::parse(3, &[((0, 1), "1")]).unwrap());
    let pair = build_realization(&l, RealizeParams::default()).unwrap();
    let data = TransversalData {
        i: MapField::parse(2, &["0", "x1", "x2"]).unwrap(),
        p: MapField::projection(3, &[0, 1]).unwrap(),
        rho: MapField::parse(3, &["0", "x1", "x2", "x3", "0", "0"]).unwrap(),
        phi: Some(MapField::parse(3, &["x3", "x1", "x2"]).unwrap()),
        alpha: None,
    };
    let rep = normal_form_check(&pair, &data, &BoxDomain::cube(3, 0.4).grid(5)).unwrap();
    assert!(rep.pass && rep.points == 125, "{rep:?}");
}

#[test]
fn normal_form_errors() {
    let pair = build_realization(&cotangent(2), RealizeParams::default()).unwrap();
    let mut data = flat_transversal();
    data.phi = None;
    data.alpha = None;
    let grid = BoxDomain::cube(2, 0.4).grid(2);
    assert!(matches!(normal_form_check(&pair, &data, &grid), Err(Error::Transversality { .. })));

    let pair = build_realization(&flat(), RealizeParams::default()).unwrap();
    data.rho = MapField::parse(2, &["0.1", "x1", "x2", "0"]).unwrap();
    assert!(matches!(normal_form_check(&pair, &data, &grid), Err(Error::ChartInconsistent { .. })));
    data.rho = MapField::parse(2, &["0", "x1", "0", "0"]).unwrap();
    assert!(matches!(normal_form_check(&pair, &data, &grid), Err(Error::RankDrop { .. })));
}
