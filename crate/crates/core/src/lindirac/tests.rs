use super::*;
use nalgebra::{dmatrix, dvector};
use proptest::prelude::*;

fn sv(u: &[f64], xi: &[f64]) -> SplitVector {
    SplitVector::from_slices(u, xi).unwrap()
}

fn span(n: usize, vs: &[SplitVector]) -> Subspace {
    Subspace::span_split(n, vs).unwrap()
}

fn lag(n: usize, vs: &[SplitVector]) -> LagrangianSubspace {
    LagrangianSubspace::new(span(n, vs)).unwrap()
}

/// dx∧dy + dy∧dz on ℝ³.
fn omega_xy_yz() -> DMatrix<f64> {
    dmatrix![0.0, 1.0, 0.0; -1.0, 0.0, 1.0; 0.0, -1.0, 0.0]
}

#[test]
fn two_form_convention() {
    // dx∧dy(∂x, ∂y) = +1 and ι_∂x(dx∧dy) = dy
    let w = dmatrix![0.0, 1.0; -1.0, 0.0];
    let ex = dvector![1.0, 0.0];
    let ey = dvector![0.0, 1.0];
    assert_eq!((ex.transpose() * &w * &ey)[(0, 0)], 1.0);
    assert_eq!(w.transpose() * &ex, ey);
}

#[test]
fn pairing_examples() {
    assert_eq!(pairing(&sv(&[1.0], &[0.0]), &sv(&[0.0], &[1.0])).unwrap(), 1.0);
    assert_eq!(pairing(&sv(&[1.0], &[1.0]), &sv(&[1.0], &[1.0])).unwrap(), 2.0);
    // s1 = z∂x − dy, s2 = z∂y + dx at z = 2
    let s1 = sv(&[2.0, 0.0, 0.0], &[0.0, -1.0, 0.0]);
    let s2 = sv(&[0.0, 2.0, 0.0], &[1.0, 0.0, 0.0]);
    assert_eq!(pairing(&s1, &s2).unwrap(), 0.0);
    assert!(pairing(&s1, &sv(&[1.0], &[0.0])).is_err());
}

#[test]
fn perp_examples() {
    let tm = tangent_space(2);
    assert!(perp(&tm).unwrap().equals(&tm).unwrap());
    let s = span(2, &[sv(&[0.0, 1.0], &[0.0, 0.0])]);
    let expected = span(
        2,
        &[sv(&[1.0, 0.0], &[0.0, 0.0]), sv(&[0.0, 1.0], &[0.0, 0.0]), sv(&[0.0, 0.0], &[1.0, 0.0])],
    );
    let p = perp(&s).unwrap();
    assert_eq!(p.dim(), 3);
    assert!(p.equals(&expected).unwrap());
    let l = graph_of_form(&omega_xy_yz()).unwrap();
    assert!(perp(&l).unwrap().equals(&l).unwrap());
}

#[test]
fn lagrangian_examples() {
    assert!(is_lagrangian(&graph_of_form(&omega_xy_yz()).unwrap()));
    assert!(!is_lagrangian(&span(2, &[sv(&[1.0, 0.0], &[0.0, 0.0])])));
    assert!(!is_lagrangian(&span(1, &[sv(&[1.0], &[1.0])])));
    assert!(LagrangianSubspace::new(span(1, &[sv(&[1.0], &[1.0])])).is_err());
}

#[test]
fn rescale_examples() {
    let l = lag(2, &[sv(&[1.0, 0.0], &[0.0, 1.0]), sv(&[0.0, 1.0], &[-1.0, 0.0])]);
    assert!(rescale(1.0, &l).unwrap().equals(&l).unwrap());
    let expected = span(2, &[sv(&[1.0, 0.0], &[0.0, 2.0]), sv(&[0.0, 1.0], &[-2.0, 0.0])]);
    assert!(rescale(2.0, &l).unwrap().equals(&expected).unwrap());
    let w = omega_xy_yz();
    let minus = rescale(-1.0, &graph_of_form(&w).unwrap()).unwrap();
    assert!(minus.equals(&graph_of_form(&(-&w)).unwrap()).unwrap());
    assert!(rescale(0.0, &l).is_err());
}

#[test]
fn gauge_examples() {
    let s = span(2, &[sv(&[1.0, 1.0], &[0.0, 3.0])]);
    assert!(gauge(&DMatrix::zeros(2, 2), &s).unwrap().equals(&s).unwrap());
    let w = dmatrix![0.0, 1.0; -1.0, 0.0];
    let g = gauge(&w, &tangent_space(2)).unwrap();
    let expected = span(2, &[sv(&[1.0, 0.0], &[0.0, 1.0]), sv(&[0.0, 1.0], &[-1.0, 0.0])]);
    assert!(g.equals(&expected).unwrap());
    // R_ω(⟨∂x, ∂z − dy, dy⟩) = ⟨∂x, ∂z, dy⟩ for ω = dx∧dy + dy∧dz
    let t_pull = span(
        3,
        &[
            sv(&[1.0, 0.0, 0.0], &[0.0; 3]),
            sv(&[0.0, 0.0, 1.0], &[0.0, -1.0, 0.0]),
            sv(&[0.0; 3], &[0.0, 1.0, 0.0]),
        ],
    );
    let expected = span(
        3,
        &[sv(&[1.0, 0.0, 0.0], &[0.0; 3]), sv(&[0.0, 0.0, 1.0], &[0.0; 3]), sv(&[0.0; 3], &[0.0, 1.0, 0.0])],
    );
    assert!(gauge(&omega_xy_yz(), &t_pull).unwrap().equals(&expected).unwrap());
    assert!(gauge(&dmatrix![0.0, 1.0; 1.0, 0.0], &s).is_err());
}

#[test]
fn pullback_examples() {
    let l = graph_of_form(&omega_xy_yz()).unwrap();
    assert!(pullback_pt(&DMatrix::identity(3, 3), &l).unwrap().equals(&l).unwrap());
    let ds = dmatrix![1.0, 0.0];
    assert!(pullback_pt(&ds, &tangent_space(1)).unwrap().equals(&tangent_space(2)).unwrap());
    // t(x,y,z) = (y,z), L1 = ⟨∂z, dy⟩ in (y,z) coordinates
    let dt = dmatrix![0.0, 1.0, 0.0; 0.0, 0.0, 1.0];
    let l1 = lag(2, &[sv(&[0.0, 1.0], &[0.0, 0.0]), sv(&[0.0, 0.0], &[1.0, 0.0])]);
    let expected = span(
        3,
        &[sv(&[1.0, 0.0, 0.0], &[0.0; 3]), sv(&[0.0, 0.0, 1.0], &[0.0; 3]), sv(&[0.0; 3], &[0.0, 1.0, 0.0])],
    );
    let got = pullback_pt(&dt, &l1).unwrap();
    assert!(got.equals(&expected).unwrap());
    assert!(is_lagrangian(&got));
}

#[test]
fn pushforward_examples() {
    let l = graph_of_form(&omega_xy_yz()).unwrap();
    assert!(pushforward_pt(&DMatrix::identity(3, 3), &l).unwrap().equals(&l).unwrap());
    let ds = dmatrix![1.0, 0.0];
    // Gr(x dx∧dy) at x = 1 pushes to ⟨dx⟩, at x = 0 to Tℝ
    let at = |x: f64| graph_of_form(&dmatrix![0.0, x; -x, 0.0]).unwrap();
    let p1 = pushforward_pt(&ds, &at(1.0)).unwrap();
    assert!(p1.equals(&cotangent_space(1)).unwrap());
    let p0 = pushforward_pt(&ds, &at(0.0)).unwrap();
    assert!(p0.equals(&tangent_space(1)).unwrap());
}

#[test]
fn omega_orthogonal_examples() {
    let full = Subspace::full(3);
    assert_eq!(omega_orthogonal(&full, &DMatrix::zeros(3, 3)).unwrap().dim(), 3);
    let v = Subspace::span(3, &[dvector![0.0, 0.0, 1.0]]).unwrap();
    let expected = Subspace::span(3, &[dvector![1.0, 0.0, 0.0], dvector![0.0, 0.0, 1.0]]).unwrap();
    assert!(omega_orthogonal(&v, &omega_xy_yz()).unwrap().equals(&expected).unwrap());
    let sym = dmatrix![0.0, 1.0; -1.0, 0.0];
    assert_eq!(omega_orthogonal(&Subspace::full(2), &sym).unwrap().dim(), 0);
}

#[test]
fn weak_conditions_examples() {
    // V = ⟨∂z⟩, W = ⟨∂x⟩ for s = (x, y), t = (y, z) with ω = dx∧dy + dy∧dz
    let v = Subspace::span(3, &[dvector![0.0, 0.0, 1.0]]).unwrap();
    let w = Subspace::span(3, &[dvector![1.0, 0.0, 0.0]]).unwrap();
    assert_eq!(weak_conditions(&v, &w, &omega_xy_yz()), [false; 5]);
    let z = Subspace::zero(0);
    assert_eq!(weak_conditions(&z, &z, &DMatrix::zeros(0, 0)), [true; 5]);
}

#[test]
fn dual_conditions_flat_witness() {
    // coordinates (x, y, c1, c2); ω = dc2∧dx − dc1∧dy − dc1∧dc2
    let mut w = DMatrix::zeros(4, 4);
    let mut set = |i: usize, j: usize, v: f64| {
        w[(i, j)] = v;
        w[(j, i)] = -v;
    };
    set(3, 0, 1.0);
    set(2, 1, -1.0);
    set(2, 3, -1.0);
    let v = Subspace::span(4, &[dvector![0.0, 0.0, 1.0, 0.0], dvector![0.0, 0.0, 0.0, 1.0]]).unwrap();
    let wt = Subspace::span(4, &[dvector![1.0, 0.0, -1.0, 0.0], dvector![0.0, 1.0, 0.0, -1.0]]).unwrap();
    assert_eq!(dual_conditions(&v, &wt, &w), [true; 5]);
    assert_eq!(weak_conditions(&v, &wt, &w), [true; 5]);
    let b = Subspace::span(2, &[dvector![1.0, 0.0]]).unwrap();
    let c = Subspace::span(2, &[dvector![0.0, 1.0]]).unwrap();
    assert_eq!(dual_conditions(&b, &c, &DMatrix::zeros(2, 2)), [true; 5]);
}

#[test]
fn float_and_exact_backends_agree() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for i in 0..300 {
        let (b, c, w) = exact::random_instance(&mut rng, 1 + i % 5);
        let (bf, cf, wf) = (exact::to_f64_space(&b), exact::to_f64_space(&c), exact::to_f64_matrix(&w));
        assert_eq!(weak_conditions(&bf, &cf, &wf), exact::weak_conditions(&b, &c, &w), "case {i}");
        assert_eq!(dual_conditions(&bf, &cf, &wf), exact::dual_conditions(&b, &c, &w), "case {i}");
    }
}

/// Random Lagrangian subspace: a graph of a random form with a random
/// subset of coordinate pairs `(∂ᵢ, dxᵢ)` swapped, which preserves the
/// pairing and reaches non-graph subspaces.
fn lagrangian_strategy(n: usize) -> impl Strategy<Value = LagrangianSubspace> {
    (
        proptest::collection::vec(-2.0f64..2.0, n * n),
        proptest::collection::vec(any::<bool>(), n),
    )
        .prop_map(move |(entries, swaps)| {
            let m = DMatrix::from_vec(n, n, entries);
            let w = &m - m.transpose();
            let g = graph_of_form(&w).unwrap();
            let mut b = g.basis().clone();
            for (i, &sw) in swaps.iter().enumerate() {
                if sw {
                    b.swap_rows(i, n + i);
                }
            }
            LagrangianSubspace::new(Subspace::from_columns(&b, DEFAULT_TOL).unwrap()).unwrap()
        })
}

fn antisym_strategy(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    proptest::collection::vec(-2.0f64..2.0, n * n).prop_map(move |e| {
        let m = DMatrix::from_vec(n, n, e);
        &m - m.transpose()
    })
}

fn subspace_strategy(amb: usize) -> impl Strategy<Value = Subspace> {
    (0..=amb).prop_flat_map(move |k| {
        proptest::collection::vec(-2.0f64..2.0, amb * k)
            .prop_map(move |e| Subspace::from_columns(&DMatrix::from_vec(amb, k, e), DEFAULT_TOL).unwrap())
    })
}

proptest! {
    #[test]
    fn perp_is_an_involution(s in (1usize..4).prop_flat_map(|n| subspace_strategy(2 * n))) {
        let pp = perp(&perp(&s).unwrap()).unwrap();
        prop_assert!(pp.equals(&s).unwrap());
        prop_assert_eq!(s.dim() + perp(&s).unwrap().dim(), s.ambient());
    }

    #[test]
    fn gauge_inverse_and_lagrangian((l, w) in (1usize..4).prop_flat_map(|n| (lagrangian_strategy(n), antisym_strategy(n)))) {
        let g = gauge(&w, &l).unwrap();
        prop_assert!(is_lagrangian(&g));
        let back = gauge(&(-&w), &g).unwrap();
        prop_assert!(back.equals(&l).unwrap());
    }

    #[test]
    fn pushforward_of_pullback_is_identity(
        (a, l) in (1usize..4, 0usize..3).prop_flat_map(|(n, extra)| (
            proptest::collection::vec(-2.0f64..2.0, n * (n + extra))
                .prop_map(move |e| DMatrix::from_vec(n, n + extra, e)),
            lagrangian_strategy(n),
        ))
    ) {
        prop_assume!(crate::linalg::rank(&a, 1e-6) == a.nrows());
        let up = pullback_pt(&a, &l).unwrap();
        prop_assert!(is_lagrangian(&up));
        let down = pushforward_pt(&a, &up).unwrap();
        prop_assert!(down.distance(&l) < 1e-7, "distance {}", down.distance(&l));
    }

    #[test]
    fn pointwise_operations_stay_lagrangian(
        (a, l0, l1) in (1usize..4, 1usize..4).prop_flat_map(|(n, m)| (
            proptest::collection::vec(-2.0f64..2.0, n * m).prop_map(move |e| DMatrix::from_vec(n, m, e)),
            lagrangian_strategy(m),
            lagrangian_strategy(n),
        ))
    ) {
        prop_assert!(is_lagrangian(&pushforward_pt(&a, &l0).unwrap()));
        prop_assert!(is_lagrangian(&pullback_pt(&a, &l1).unwrap()));
    }

    #[test]
    fn pairing_symmetric_bilinear(
        v in proptest::collection::vec(-3.0f64..3.0, 18),
        s in -2.0f64..2.0,
    ) {
        let a = sv(&v[0..3], &v[3..6]);
        let b = sv(&v[6..9], &v[9..12]);
        let c = sv(&v[12..15], &v[15..18]);
        let ab = pairing(&a, &b).unwrap();
        prop_assert_eq!(ab, pairing(&b, &a).unwrap());
        let lin = SplitVector::new(&a.tangent * s + &c.tangent, &a.cotangent * s + &c.cotangent).unwrap();
        let lhs = pairing(&lin, &b).unwrap();
        let rhs = s * ab + pairing(&c, &b).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
    }
}
