use std::sync::Arc;

use proptest::prelude::*;

use sinailab::entropy::pesin_entropy;
use sinailab::exec::{map_indexed, tree_sum, with_workers};
use sinailab::matrixcore::{orthonormalize, singular_values, wedge_profile, Frame, SquareMatrix};
use sinailab::measures::{ulam_matrix, ulam_stationary, weak_star_distance, EmpiricalMeasure, GridMeasure, Provenance};
use sinailab::oseledets::{jacobian_along_f, LyapunovSpectrum};
use sinailab::systems::{
    build_system, cat_map, make_derived_from_anosov, make_manneville_pomeau, make_standard_skew, DynamicalSystem,
    PhaseSpace, Point,
};

/// d×d matrix with entries on a 2^-10 grid, so products are exact.
fn dyadic_matrix(d: usize) -> impl Strategy<Value = SquareMatrix> {
    prop::collection::vec(-1024i32..=1024, d * d)
        .prop_map(move |v| SquareMatrix::from_fn(d, |i, j| v[i * d + j] as f64 / 1024.0))
}

fn matrix_pair() -> impl Strategy<Value = (SquareMatrix, SquareMatrix)> {
    (1usize..=5).prop_flat_map(|d| (dyadic_matrix(d), dyadic_matrix(d)))
}

fn general_matrix() -> impl Strategy<Value = SquareMatrix> {
    (1usize..=6).prop_flat_map(|d| {
        prop::collection::vec(-10.0f64..10.0, d * d).prop_map(move |v| SquareMatrix::from_fn(d, |i, j| v[i * d + j]))
    })
}

fn orthogonal(d: usize) -> impl Strategy<Value = SquareMatrix> {
    prop::collection::vec(-1.0f64..1.0, d * d).prop_filter_map("degenerate", move |v| {
        let m = SquareMatrix::from_fn(d, |i, j| v[i * d + j]);
        orthonormalize(&Frame::new(m, d)).ok().map(|(q, _)| q.cols)
    })
}

fn cloud(space: PhaseSpace, max_points: usize) -> impl Strategy<Value = EmpiricalMeasure> {
    let d = space.dim();
    prop::collection::vec((prop::collection::vec(0.0f64..1.0, d), 0.01f64..1.0), 1..max_points).prop_map(move |pts| {
        let (p, w): (Vec<Point>, Vec<f64>) = pts.into_iter().map(|(x, w)| (Point::new(&x), w)).unzip();
        EmpiricalMeasure::new(space.clone(), p, w, Provenance::Manual).unwrap()
    })
}

fn space() -> impl Strategy<Value = PhaseSpace> {
    prop_oneof![Just(PhaseSpace::torus(1)), Just(PhaseSpace::torus(2)), Just(PhaseSpace::unit_interval())]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn wedge_is_submultiplicative((a, b) in matrix_pair()) {
        let (pa, pb, pab) = (wedge_profile(&a), wedge_profile(&b), wedge_profile(&a.mul(&b)));
        for j in 1..=a.dim() {
            prop_assert!(pab.wedge(j) <= pa.wedge(j) + pb.wedge(j) + 1e-12, "j = {}", j);
        }
        prop_assert!(pab.log_wedge_total <= pa.log_wedge_total + pb.log_wedge_total + 1e-12);
    }

    #[test]
    fn top_wedge_is_abs_det(a in general_matrix()) {
        let det = a.det().abs();
        prop_assume!(det > 1e-200);
        let w = wedge_profile(&a).wedge(a.dim()).exp();
        prop_assert!((w / det - 1.0).abs() < 1e-10);
    }

    #[test]
    fn singular_values_orthogonally_invariant(
        (a, q, r) in (1usize..=6).prop_flat_map(|d| (dyadic_matrix(d), orthogonal(d), orthogonal(d)))
    ) {
        let s = singular_values(&a);
        let t = singular_values(&q.mul(&a).mul(&r.transpose()));
        let scale = s[0].max(1e-300);
        for (x, y) in s.iter().zip(&t) {
            prop_assert!((x - y).abs() <= 1e-10 * scale, "{:?} vs {:?}", s, t);
        }
    }

    #[test]
    fn weak_star_is_a_pseudometric(
        (m1, m2, m3, k) in space().prop_flat_map(|s| (cloud(s.clone(), 20), cloud(s.clone(), 20), cloud(s, 20), 1usize..=4))
    ) {
        let d12 = weak_star_distance(&m1, &m2, k).unwrap();
        let d21 = weak_star_distance(&m2, &m1, k).unwrap();
        let d13 = weak_star_distance(&m1, &m3, k).unwrap();
        let d23 = weak_star_distance(&m2, &m3, k).unwrap();
        prop_assert_eq!(d12, d21);
        prop_assert!(d13 <= d12 + d23 + 1e-12);
        prop_assert_eq!(weak_star_distance(&m1, &m1, k).unwrap(), 0.0);
    }

    #[test]
    fn measures_are_normalized(
        m in space().prop_flat_map(|s| cloud(s, 200)),
        density in prop::collection::vec(0.0f64..1e6, 16),
    ) {
        prop_assert!((m.total_weight() - 1.0).abs() <= 1e-12);
        prop_assume!(density.iter().any(|&v| v > 0.0));
        let g = GridMeasure::new(PhaseSpace::torus(2), 4, density, Provenance::Manual).unwrap();
        prop_assert!((tree_sum(&g.density) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn pesin_entropy_sign(exponents in prop::collection::vec(-5.0f64..5.0, 1..6)) {
        let n = exponents.len();
        let s = LyapunovSpectrum { exponents: exponents.clone(), n_steps: 100, std_error: vec![0.0; n], mean_log_det: 0.0 };
        let h = pesin_entropy(&s).value;
        prop_assert!(h >= 0.0);
        prop_assert_eq!(h == 0.0, exponents.iter().all(|&l| l <= 0.0));
    }

    #[test]
    fn worker_count_does_not_change_reductions(values in prop::collection::vec(-1e6f64..1e6, 0..20_000), w in 2usize..5) {
        let seq = with_workers(1, || tree_sum(&map_indexed(values.len(), |i| values[i].sin())));
        let par = with_workers(w, || tree_sum(&map_indexed(values.len(), |i| values[i].sin())));
        prop_assert_eq!(seq.to_bits(), par.to_bits());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn torus_maps_stay_in_unit_cube(x in prop::collection::vec(0.0f64..1.0, 4), which in 0usize..4) {
        let sys: Arc<dyn DynamicalSystem> = match which {
            0 => Arc::new(cat_map()),
            1 => Arc::new(make_derived_from_anosov(0.5).unwrap()),
            2 => Arc::new(make_standard_skew(3.0, 2).unwrap()),
            _ => build_system("cat4", &[]).unwrap(),
        };
        let p = Point::new(&x[..sys.dim()]);
        let y = sys.eval(&p);
        prop_assert!(y.as_slice().iter().all(|&v| (0.0..1.0).contains(&v)), "{:?}", y);
    }

    #[test]
    fn jacobian_along_f_is_frame_independent(x in prop::collection::vec(0.0f64..1.0, 4), theta in 0.0f64..6.3) {
        let sys = build_system("cat4", &[]).unwrap();
        let p = Point::new(&x);
        let f = Frame::standard(4, 2);
        let (c, s) = (theta.cos(), theta.sin());
        let rotated = Frame::from_columns(4, &[vec![c, s, 0.0, 0.0], vec![-s, c, 0.0, 0.0]]).unwrap();
        let a = jacobian_along_f(sys.as_ref(), &p, &f).unwrap();
        let b = jacobian_along_f(sys.as_ref(), &p, &rotated).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn ulam_output_is_stationary(alpha in 0.0f64..0.9, res in 16usize..200, seed in any::<u64>()) {
        let f = make_manneville_pomeau(alpha).unwrap();
        let t = ulam_matrix(&f, res, 9, seed).unwrap();
        let tol = 1e-10;
        let s = ulam_stationary(&t, tol, 200_000).unwrap();
        let next = t.left_apply(&s.measure.density);
        let l1: f64 = next.iter().zip(&s.measure.density).map(|(a, b)| (a - b).abs()).sum();
        prop_assert!(l1 <= 10.0 * tol, "{}", l1);
    }
}
