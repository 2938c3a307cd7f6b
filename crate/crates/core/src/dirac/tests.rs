use super::*;
use crate::fields::VectorField;
use crate::lindirac::{graph_of_form, pullback_pt, pushforward_pt, tangent_space};
use proptest::prelude::*;

fn sv(u: &[f64], xi: &[f64]) -> SplitVector {
    SplitVector::from_slices(u, xi).unwrap()
}

fn span(n: usize, vs: &[SplitVector]) -> Subspace {
    Subspace::span_split(n, vs).unwrap()
}

fn same(a: &Subspace, b: &Subspace) -> bool {
    a.distance(b) < 1e-9
}

fn sec(u: &[&str], xi: &[&str]) -> SectionField {
    SectionField::parse(u, xi).unwrap()
}

/// `s₁ = z∂x − dy, s₂ = z∂y + dx, s₃ = ∂z`.
fn s123() -> DiracFrame {
    DiracFrame::new(vec![
        sec(&["x3", "0", "0"], &["0", "-1", "0"]),
        sec(&["0", "x3", "0"], &["1", "0", "0"]),
        sec(&["0", "0", "1"], &["0", "0", "0"]),
    ])
    .unwrap()
}

fn z_dx_dy() -> BivectorField {
    BivectorField::parse(3, &[((0, 1), "x3")]).unwrap()
}

fn x_dx_dy() -> TwoFormField {
    TwoFormField::parse(2, &[((0, 1), "x1")]).unwrap()
}

fn pr(n: usize, coords: &[usize]) -> MapField {
    MapField::projection(n, coords).unwrap()
}

fn random_points(n: usize) -> Vec<Vec<f64>> {
    BoxDomain::cube(n, 1.0).random_points(20, 7)
}

#[test]
fn graph_two_form_frames() {
    let zero = graph_two_form(&TwoFormField::zero(2));
    let p = [0.3, -0.4];
    assert!(same(&zero.subspace(&p).unwrap(), tangent_space(2).subspace()));
    let f = graph_two_form(&x_dx_dy()).at(&p).unwrap();
    assert_eq!(f[0], sv(&[1.0, 0.0], &[0.0, 0.3]));
    assert_eq!(f[1], sv(&[0.0, 1.0], &[-0.3, 0.0]));
    let w = TwoFormField::parse(3, &[((0, 1), "1"), ((1, 2), "1")]).unwrap();
    let f = graph_two_form(&w).at(&[0.0; 3]).unwrap();
    assert_eq!(f[0], sv(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]));
    assert_eq!(f[1], sv(&[0.0, 1.0, 0.0], &[-1.0, 0.0, 1.0]));
    assert_eq!(f[2], sv(&[0.0, 0.0, 1.0], &[0.0, -1.0, 0.0]));
}

#[test]
fn graph_bivector_frames() {
    let zero = graph_bivector(&BivectorField::zero(2));
    let cot = span(2, &[sv(&[0.0, 0.0], &[1.0, 0.0]), sv(&[0.0, 0.0], &[0.0, 1.0])]);
    assert!(same(&zero.subspace(&[0.1, 0.2]).unwrap(), &cot));
    // π = ∂x∧∂y gives π♯(dx) = ∂y
    let pi = BivectorField::parse(2, &[((0, 1), "1")]).unwrap();
    assert_eq!(graph_bivector(&pi).at(&[0.0, 0.0]).unwrap()[0], sv(&[0.0, 1.0], &[1.0, 0.0]));
    // Gr(z∂x∧∂y) = span{s₁, s₂, dz}; its family for (x, y, z) ↦ (x, y) is span{s₁, s₂, s₃}
    let g = graph_bivector(&z_dx_dy());
    let s = pr(3, &[0, 1]);
    for p in random_points(3) {
        let z = p[2];
        let s1 = sv(&[z, 0.0, 0.0], &[0.0, -1.0, 0.0]);
        let s2 = sv(&[0.0, z, 0.0], &[1.0, 0.0, 0.0]);
        let dz = sv(&[0.0; 3], &[0.0, 0.0, 1.0]);
        let dd = sv(&[0.0, 0.0, 1.0], &[0.0; 3]);
        assert!(same(&g.subspace(&p).unwrap(), &span(3, &[s1.clone(), s2.clone(), dz])));
        assert!(same(&family_ls(&g, &s, &p).unwrap(), &span(3, &[s1, s2, dd])));
        assert!(same(&family_ls(&g, &s, &p).unwrap(), &s123().subspace(&p).unwrap()));
    }
}

#[test]
fn graph_bivector_of_inverse_form_equals_graph_of_form() {
    // ω = (1 + x²) dx∧dy and π with π♯ = (ω♭)⁻¹, i.e. π = −(1 + x²)⁻¹ ∂x∧∂y
    let w = TwoFormField::parse(2, &[((0, 1), "1+x1^2")]).unwrap();
    let pi = BivectorField::parse(2, &[((0, 1), "-1/(1+x1^2)")]).unwrap();
    for p in random_points(2) {
        assert!(same(&graph_two_form(&w).subspace(&p).unwrap(), &graph_bivector(&pi).subspace(&p).unwrap()));
    }
}

#[test]
fn foliation_frames() {
    let f = foliation_dirac(&pr(2, &[0])).unwrap();
    let expect = span(2, &[sv(&[0.0, 1.0], &[0.0, 0.0]), sv(&[0.0, 0.0], &[1.0, 0.0])]);
    assert!(same(&f.subspace(&[0.5, 0.5]).unwrap(), &expect));
    let id = foliation_dirac(&MapField::identity(2)).unwrap();
    let cot = span(2, &[sv(&[0.0, 0.0], &[1.0, 0.0]), sv(&[0.0, 0.0], &[0.0, 1.0])]);
    assert!(same(&id.subspace(&[0.5, 0.5]).unwrap(), &cot));
    let f3 = foliation_dirac(&pr(3, &[0, 1])).unwrap();
    let expect = span(
        3,
        &[sv(&[0.0, 0.0, 1.0], &[0.0; 3]), sv(&[0.0; 3], &[1.0, 0.0, 0.0]), sv(&[0.0; 3], &[0.0, 1.0, 0.0])],
    );
    assert!(same(&f3.subspace(&[0.1, 0.2, 0.3]).unwrap(), &expect));
    // a curved foliation: level sets of x² + y on ℝ²
    let s = MapField::parse(2, &["x1^2+x2"]).unwrap();
    let f = foliation_dirac(&s).unwrap();
    assert!(is_dirac(&f, &f.default_grid(), 1e-9).pass);
    assert!(foliation_dirac(&MapField::parse(1, &["x1", "x1"]).unwrap()).is_err());
}

#[test]
fn pullback_frames() {
    let lm = graph_two_form(&x_dx_dy());
    let id = pullback_dirac(&MapField::identity(2), &lm).unwrap();
    for p in random_points(2) {
        assert!(same(&id.subspace(&p).unwrap(), &lm.subspace(&p).unwrap()));
    }
    let t1 = graph_two_form(&TwoFormField::zero(1));
    let pulled = pullback_dirac(&pr(2, &[0]), &t1).unwrap();
    assert!(same(&pulled.subspace(&[0.2, 0.9]).unwrap(), tangent_space(2).subspace()));
}

/// `s(x, y, z) = (x + y², z)` pulling back `Gr(y₁ dy₁∧dy₂)`.
fn curved_pullback() -> (MapField, DiracFrame, DiracFrame) {
    let s = MapField::parse(3, &["x1+x2^2", "x3"]).unwrap();
    let lm = graph_two_form(&x_dx_dy());
    let l = pullback_dirac(&s, &lm).unwrap();
    (s, lm, l)
}

#[test]
fn pullback_contains_kernel_and_is_dirac() {
    let (s, lm, l) = curved_pullback();
    let rep = is_dirac(&l, &l.default_grid(), 1e-9);
    assert!(rep.pass, "{rep:?}");
    for p in random_points(3) {
        let ds = s.jacobian(&p).unwrap();
        let v = crate::lindirac::as_tangent(&crate::lindirac::map_kernel(&ds, 1e-9));
        assert!(l.subspace(&p).unwrap().containment_gap(&v) < 1e-9);
        // agrees with the pointwise pullback
        let q: Vec<f64> = s.at(&p).unwrap().iter().copied().collect();
        let pt = pullback_pt(&ds, &lm.lagrangian(&q).unwrap()).unwrap();
        assert!(same(&l.subspace(&p).unwrap(), &pt));
    }
}

#[test]
fn courant_tensor_examples() {
    let w = TwoFormField::parse(3, &[((0, 1), "x3"), ((0, 2), "x2"), ((1, 2), "x1")]).unwrap();
    // dω = dx∧dy∧dz here; the closed one is d(x² y)∧dz
    let closed = TwoFormField::parse(3, &[((0, 2), "2*x1*x2"), ((1, 2), "x1^2")]).unwrap();
    for p in random_points(3) {
        assert!(courant_tensor(&graph_two_form(&closed), &p).unwrap().max_abs() < 1e-8);
        assert!(courant_tensor(&graph_bivector(&z_dx_dy()), &p).unwrap().max_abs() < 1e-8);
        let t = courant_tensor(&graph_two_form(&w), &p).unwrap();
        assert!((t.get(0, 1, 2) - 1.0).abs() < 1e-12);
    }
    let t = courant_tensor(&s123(), &[0.3, 0.2, 1.7]).unwrap();
    assert!((t.get(2, 0, 1) - 1.0).abs() < 1e-12);
}

#[test]
fn courant_tensor_of_graph_is_derivative_of_form() {
    // Υ(eᵢ, eⱼ, eₖ) = dω(∂ᵢ, ∂ⱼ, ∂ₖ) on Gr(ω)
    let w = TwoFormField::parse(3, &[((0, 1), "x3^2*x1"), ((0, 2), "sin(x2)"), ((1, 2), "x1*x2*x3")]).unwrap();
    for p in random_points(3) {
        let t = courant_tensor(&graph_two_form(&w), &p).unwrap();
        assert!(t.distance(&w.d_at(&p).unwrap()) < 1e-12);
    }
}

#[test]
fn is_dirac_examples() {
    let g = graph_two_form(&x_dx_dy());
    assert!(is_dirac(&g, &g.default_grid(), 1e-8).pass);
    let f = s123();
    let rep = is_dirac(&f, &f.default_grid(), 1e-8);
    assert!(!rep.pass && rep.lagrangian);
    assert!((rep.max_courant - 1.0).abs() < 1e-8);
    let b = graph_bivector(&z_dx_dy());
    assert!(is_dirac(&b, &b.default_grid(), 1e-8).pass);
    // a non-Lagrangian frame fails on isotropy
    let bad = DiracFrame::new(vec![sec(&["1"], &["1"])]).unwrap();
    let rep = is_dirac(&bad, &bad.default_grid(), 1e-8);
    assert!(!rep.pass && !rep.lagrangian);
    // a rank drop is a failure, not an error
    let deg = DiracFrame::new(vec![sec(&["x1", "0"], &["0", "0"]), sec(&["0", "1"], &["0", "0"])]).unwrap();
    let rep = is_dirac(&deg, &deg.default_grid(), 1e-8);
    assert!(!rep.pass && rep.failure.is_some());
}

#[test]
fn twisted_courant_of_graph() {
    // Gr(ω₀) with ω₀ = x₃ dx₁∧dx₂ is involutive for the twist φ = −dω₀
    let w0 = TwoFormField::parse(3, &[((0, 1), "x3")]).unwrap();
    let phi = ThreeFormField::parse(3, &[((0, 1, 2), "-1")]).unwrap();
    let l = graph_two_form(&w0);
    let grid = l.default_grid();
    assert!(!is_dirac(&l, &grid, 1e-8).pass);
    assert!(is_dirac_twisted(&l, Some(&phi), &grid, 1e-8).pass);
    let wrong = ThreeFormField::parse(3, &[((0, 1, 2), "1")]).unwrap();
    assert!(!is_dirac_twisted(&l, Some(&wrong), &grid, 1e-8).pass);
}

#[test]
fn family_examples() {
    let l = graph_two_form(&x_dx_dy());
    let s = pr(2, &[0]);
    let at1 = family_ls(&l, &s, &[1.0, 0.0]).unwrap();
    assert!(same(&at1, &span(2, &[sv(&[0.0, 1.0], &[0.0, 0.0]), sv(&[0.0, 0.0], &[1.0, 0.0])])));
    let at0 = family_ls(&l, &s, &[0.0, 0.0]).unwrap();
    assert!(same(&at0, tangent_space(2).subspace()));
    let push1 = pushforward_family(&l, &s, &[1.0, 0.0]).unwrap();
    assert!(same(&push1, &span(1, &[sv(&[0.0], &[1.0])])));
    let push0 = pushforward_family(&l, &s, &[0.0, 0.0]).unwrap();
    assert!(same(&push0, tangent_space(1).subspace()));
    // d(x²y)∧dz pushes forward to Tℝ along x
    let w = TwoFormField::parse(3, &[((0, 2), "2*x1*x2"), ((1, 2), "x1^2")]).unwrap();
    let g = graph_two_form(&w);
    for p in random_points(3) {
        assert!(same(&pushforward_family(&g, &pr(3, &[0]), &p).unwrap(), tangent_space(1).subspace()));
    }
    // basic structures are their own family
    let (s, _, l) = curved_pullback();
    for p in random_points(3) {
        assert!(same(&family_ls(&l, &s, &p).unwrap(), &l.subspace(&p).unwrap()));
    }
}

#[test]
fn family_bracket_and_jump_diagnostics() {
    // Gr(z∂x∧∂y) along (x, y): smooth family, not involutive
    let g = graph_bivector(&z_dx_dy());
    let s = pr(3, &[0, 1]);
    for p in random_points(3) {
        assert!(family_jump(&g, &s, &p, FAMILY_STEP).unwrap() < 1e-2);
        assert!(family_courant(&g, &s, &p).unwrap().max_abs() > 1e-2);
    }
    // d(x²y)∧dz along x: involutive and smooth, even across x = 0
    let w = TwoFormField::parse(3, &[((0, 2), "2*x1*x2"), ((1, 2), "x1^2")]).unwrap();
    let g = graph_two_form(&w);
    for p in random_points(3).into_iter().chain([vec![0.0, 0.4, -0.2]]) {
        assert!(family_courant(&g, &pr(3, &[0]), &p).unwrap().max_abs() < 1e-6);
        assert!(family_jump(&g, &pr(3, &[0]), &p, FAMILY_STEP).unwrap() < 1e-2);
    }
    // Gr(x dx∧dy) along x jumps at x = 0 only
    let l = graph_two_form(&x_dx_dy());
    let s = pr(2, &[0]);
    assert!(family_jump(&l, &s, &[0.0, 0.3], FAMILY_STEP).unwrap() > 0.5);
    assert!(family_jump(&l, &s, &[0.5, 0.3], FAMILY_STEP).unwrap() < 1e-2);
    // a basic structure has vanishing family bracket
    let (s, _, l) = curved_pullback();
    for p in random_points(3) {
        assert!(family_courant(&l, &s, &p).unwrap().max_abs() < 1e-6);
    }
}

#[test]
fn family_is_pullback_of_pushforward() {
    let cases: Vec<(DiracFrame, MapField)> = vec![
        (graph_two_form(&x_dx_dy()), pr(2, &[0])),
        (graph_bivector(&z_dx_dy()), pr(3, &[0, 1])),
        (graph_two_form(&TwoFormField::parse(3, &[((0, 2), "2*x1*x2"), ((1, 2), "x1^2")]).unwrap()), pr(3, &[0])),
        (graph_two_form(&TwoFormField::parse(3, &[((0, 1), "x3"), ((1, 2), "1")]).unwrap()),
         MapField::parse(3, &["x1+x2*x3", "x3"]).unwrap()),
    ];
    for (l, s) in cases {
        for p in random_points(l.dim()) {
            let ds = s.jacobian(&p).unwrap();
            let via = pullback_pt(&ds, &pushforward_pt(&ds, &l.lagrangian(&p).unwrap()).unwrap()).unwrap();
            assert!(same(&family_ls(&l, &s, &p).unwrap(), &via));
        }
    }
}

#[test]
fn rank_profile_examples() {
    let l = graph_two_form(&x_dx_dy());
    let prof = rank_profile(&l, &pr(2, &[0]), None, &l.default_grid()).unwrap();
    assert!(prof.flagged);
    for r in &prof.rows {
        assert_eq!(r.l_cap_v, if r.point[0] == 0.0 { 1 } else { 0 });
    }
    let b = graph_bivector(&z_dx_dy());
    let prof = rank_profile(&b, &pr(3, &[0, 1]), None, &b.default_grid()).unwrap();
    assert!(!prof.flagged);
    let w = TwoFormField::parse(3, &[((0, 2), "2*x1*x2"), ((1, 2), "x1^2")]).unwrap();
    let g = graph_two_form(&w);
    let prof = rank_profile(&g, &pr(3, &[0]), Some(&w), &g.default_grid()).unwrap();
    assert!(prof.flagged);
    for r in &prof.rows {
        assert_eq!(r.v_omega, Some(if r.point[0] == 0.0 { 3 } else { 1 }));
    }
}

#[test]
fn basic_check_examples() {
    let (s, lm, l) = curved_pullback();
    let grid = l.default_grid();
    // the curved submersion is no projection, so supply a section
    let sigma = MapField::parse(2, &["x1", "0", "x2"]).unwrap();
    let rep = basic_check(&l, &s, Some(&sigma), &grid, 1e-9);
    assert!(rep.pass, "{rep:?}");
    assert!(!rep.recovered.is_empty());
    for r in &rep.recovered {
        assert!(same(&r.structure, &lm.subspace(&r.target_point).unwrap()));
    }
    assert!(basic_check(&l, &s, None, &grid, 1e-9).failure.is_some());
    let g = graph_two_form(&x_dx_dy());
    let rep = basic_check(&g, &pr(2, &[0]), None, &g.default_grid(), 1e-9);
    assert!(!rep.pass && rep.max_residual > 0.1);
    let f = foliation_dirac(&pr(3, &[0, 1])).unwrap();
    let rep = basic_check(&f, &pr(3, &[0, 1]), None, &f.default_grid(), 1e-9);
    assert!(rep.pass);
    let cot = span(2, &[sv(&[0.0, 0.0], &[1.0, 0.0]), sv(&[0.0, 0.0], &[0.0, 1.0])]);
    // the fibres of s as leaves come from the zero Poisson structure
    for r in &rep.recovered {
        assert!(same(&r.structure, &cot));
    }
}

fn coord_fields(n: usize, idx: &[usize]) -> Vec<VectorField> {
    idx.iter().map(|&i| VectorField::coordinate(i, n)).collect()
}

#[test]
fn coupling_trivial_triple() {
    let s = pr(3, &[0, 1]);
    let t = CouplingTriple::new(s.clone(), coord_fields(3, &[0, 1]), TwoFormField::zero(3), BivectorField::zero(3))
        .unwrap();
    let dom = BoxDomain::cube(3, 1.0);
    let grid = dom.grid(3);
    let rep = coupling_verify(&t, &dom, &grid, 1e-8).unwrap();
    assert!(rep.all_pass && rep.dirac.pass && rep.agree);
    let frame = t.frame(&dom).unwrap();
    // H ⊕ H° is the foliation by the horizontal leaves z = const
    let fol = foliation_dirac(&pr(3, &[2])).unwrap();
    for p in &grid {
        assert!(same(&frame.subspace(p).unwrap(), &fol.subspace(p).unwrap()));
    }
}

#[test]
fn coupling_basic_form_pushes_to_graph() {
    // ℝ⁴ → ℝ², ω = s*(dy₁∧dy₂), π = (1 + z²) ∂z∧∂w
    let s = pr(4, &[0, 1]);
    let w = TwoFormField::parse(4, &[((0, 1), "1")]).unwrap();
    let pi = BivectorField::parse(4, &[((2, 3), "1+x3^2")]).unwrap();
    let t = CouplingTriple::new(s.clone(), coord_fields(4, &[0, 1]), w, pi).unwrap();
    let dom = BoxDomain::cube(4, 1.0);
    let grid = dom.grid(3);
    let rep = coupling_verify(&t, &dom, &grid, 1e-8).unwrap();
    assert!(rep.all_pass && rep.agree, "{rep:?}");
    let frame = t.frame(&dom).unwrap();
    let eta = nalgebra::dmatrix![0.0, 1.0; -1.0, 0.0];
    for p in &grid {
        assert!(same(&pushforward_family(&frame, &s, p).unwrap(), &graph_of_form(&eta).unwrap()));
    }
}

#[test]
fn coupling_failures_agree_with_courant_tensor() {
    let dom = BoxDomain::cube(4, 1.0);
    let grid = dom.grid(3);
    // (d) fails: ω = x₃ dx₁∧dx₂ with H = ⟨∂₁, ∂₂, ∂₃⟩ over ℝ⁴ → ℝ³
    let t = CouplingTriple::new(
        pr(4, &[0, 1, 2]),
        coord_fields(4, &[0, 1, 2]),
        TwoFormField::parse(4, &[((0, 1), "x3")]).unwrap(),
        BivectorField::zero(4),
    )
    .unwrap();
    let rep = coupling_verify(&t, &dom, &grid, 1e-8).unwrap();
    assert!(!rep.d.pass && !rep.dirac.pass && rep.agree);
    // (c) fails: π♯ dω(∂₁, ∂₂, ·) is vertical
    let t = CouplingTriple::new(
        pr(4, &[0, 1]),
        coord_fields(4, &[0, 1]),
        TwoFormField::parse(4, &[((0, 1), "x3")]).unwrap(),
        BivectorField::parse(4, &[((2, 3), "1")]).unwrap(),
    )
    .unwrap();
    let rep = coupling_verify(&t, &dom, &grid, 1e-8).unwrap();
    assert!(rep.invariants.pass && !rep.c.pass && !rep.dirac.pass && rep.agree, "{rep:?}");
    // (b) fails: π depends on a horizontal coordinate
    let t = CouplingTriple::new(
        pr(4, &[0, 1]),
        coord_fields(4, &[0, 1]),
        TwoFormField::zero(4),
        BivectorField::parse(4, &[((2, 3), "x1")]).unwrap(),
    )
    .unwrap();
    let rep = coupling_verify(&t, &dom, &grid, 1e-8).unwrap();
    assert!(!rep.b.pass && !rep.dirac.pass && rep.agree, "{rep:?}");
    // a non-closed ω on a one-dimensional fibre is still coupling Dirac
    let t = CouplingTriple::new(
        pr(3, &[0, 1]),
        coord_fields(3, &[0, 1]),
        TwoFormField::parse(3, &[((0, 1), "x3")]).unwrap(),
        BivectorField::zero(3),
    )
    .unwrap();
    let dom3 = BoxDomain::cube(3, 1.0);
    let rep = coupling_verify(&t, &dom3, &dom3.grid(3), 1e-8).unwrap();
    assert!(rep.all_pass && rep.dirac.pass && rep.agree);
}

#[test]
fn coupling_with_tilted_connection() {
    // H = ⟨∂₁ + x₂ ∂₃, ∂₂⟩ over ℝ³ → ℝ², ω = 0, π = 0: (c) fails as H is not involutive
    let h = vec![VectorField::parse(&["1", "0", "x2"]).unwrap(), VectorField::coordinate(1, 3)];
    let t = CouplingTriple::new(pr(3, &[0, 1]), h, TwoFormField::zero(3), BivectorField::zero(3)).unwrap();
    let dom = BoxDomain::cube(3, 1.0);
    let rep = coupling_verify(&t, &dom, &dom.grid(3), 1e-8).unwrap();
    assert!(rep.invariants.pass && !rep.c.pass && !rep.dirac.pass && rep.agree, "{rep:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn constructors_are_lagrangian(c in prop::collection::vec(-2i32..=2, 6), p in prop::collection::vec(-1.0f64..1.0, 3)) {
        let t = |a: i32, b: i32, v: usize| format!("{a}+{b}*x{v}");
        let w = TwoFormField::parse(3, &[((0, 1), &t(c[0], c[1], 3)), ((0, 2), &t(c[2], c[3], 2)), ((1, 2), &t(c[4], c[5], 1))]).unwrap();
        let pi = BivectorField::parse(3, &[((0, 1), &t(c[0], c[1], 3)), ((1, 2), &t(c[2], c[5], 1))]).unwrap();
        let frames = [graph_two_form(&w), graph_bivector(&pi), foliation_dirac(&MapField::parse(3, &["x1+x2^2", "x3"]).unwrap()).unwrap(),
            gauge_dirac(&w, &graph_bivector(&pi)).unwrap()];
        for f in &frames {
            let s = f.subspace(&p).unwrap();
            prop_assert!(isotropy_residual(&s) < 1e-9);
        }
        // gauge by a closed form preserves involutivity; Gr(ω) is Dirac iff dω = 0
        let closed = dw_closed(&w, &p);
        let g = graph_two_form(&w);
        let rep = is_dirac(&g, &[p.clone()], 1e-8);
        prop_assert_eq!(rep.pass, closed);
    }
}

fn dw_closed(w: &TwoFormField, p: &[f64]) -> bool {
    w.d_at(p).unwrap().max_abs() < 1e-8
}

#[test]
fn gauge_frames_match_pointwise_gauge() {
    let b = TwoFormField::parse(2, &[((0, 1), "x2")]).unwrap();
    let base = graph_bivector(&BivectorField::parse(2, &[((0, 1), "1+x1^2")]).unwrap());
    let g = gauge_dirac(&b, &base).unwrap();
    for p in random_points(2) {
        let expect = crate::lindirac::gauge(&b.at(&p).unwrap(), &base.subspace(&p).unwrap()).unwrap();
        assert!(same(&g.subspace(&p).unwrap(), &expect));
    }
}

#[test]
fn frame_jets_match_finite_differences() {
    let (_, _, l) = curved_pullback();
    let p = [0.2, -0.3, 0.5];
    let jets = l.jets(&p).unwrap();
    let h = 1e-6;
    for k in 0..3 {
        let mut pp = p;
        let mut pm = p;
        pp[k] += h;
        pm[k] -= h;
        let (fp, fm) = (l.eval(&pp).unwrap(), l.eval(&pm).unwrap());
        for (i, j) in jets.iter().enumerate() {
            for a in 0..3 {
                assert!((j.du[a][k] - (fp[i].0[a] - fm[i].0[a]) / (2.0 * h)).abs() < 1e-6);
                assert!((j.dxi[a][k] - (fp[i].1[a] - fm[i].1[a]) / (2.0 * h)).abs() < 1e-6);
            }
        }
    }
}
