//! Invariants checked over random inputs.

use std::f64::consts::PI;

use geomprob::derivatives::{crofton_derivative_rhs, CutFamily, SymmetricFunction};
use geomprob::exact::{self, ExactValue};
use geomprob::linalg::Matrix;
use geomprob::sampling::{sample_body, SampleStream};
use geomprob::symmetry2d::{
    blaschke_shake, chord_profile, random_polygon, random_symmetric_polygon, steiner_symmetrize,
};
use geomprob::{ConvexBody, Halfspace, Point, Polygon2D, Seed};
use proptest::prelude::*;

fn polygon_strategy() -> impl Strategy<Value = Polygon2D> {
    (3usize..=64, any::<u64>()).prop_filter_map("degenerate polygon", |(m, s)| {
        random_polygon(m, Seed::new(s)).ok().map(|(p, _)| p)
    })
}

// Integration tests have no lib.rs for proptest to anchor a regressions file to.
fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn steiner_preserves_area(p in polygon_strategy(), angle in 0.0..PI) {
        let s = steiner_symmetrize(&p, angle).unwrap();
        prop_assert!(rel(s.area(), p.area()) <= 1e-12);
    }

    #[test]
    fn steiner_output_is_symmetric(p in polygon_strategy()) {
        // Symmetrizing twice about the same axis changes nothing.
        let once = steiner_symmetrize(&p, 0.0).unwrap();
        let twice = steiner_symmetrize(&once, 0.0).unwrap();
        prop_assert!(twice.same_vertices(&once, 1e-9));
        let prof = chord_profile(&once, 0.0).unwrap();
        for (a, l) in prof.alpha.iter().zip(&prof.length) {
            prop_assert!((a + l / 2.0).abs() <= 1e-12 * (1.0 + l));
        }
    }

    #[test]
    fn shake_preserves_area_and_is_idempotent(p in polygon_strategy(), drop in 0.0..2.0f64) {
        let low = p.vertices().iter().map(|v| v[1]).fold(f64::INFINITY, f64::min) - drop;
        let once = blaschke_shake(&p, low).unwrap();
        prop_assert!(rel(once.area(), p.area()) <= 1e-12);
        let twice = blaschke_shake(&once, low).unwrap();
        prop_assert!(twice.same_vertices(&once, 1e-9));
        let prof = chord_profile(&once, 0.0).unwrap();
        prop_assert!(prof.alpha.iter().all(|&a| a == low));
    }

    #[test]
    fn chord_lengths_survive_both_operators(p in polygon_strategy(), u in 0.0..1.0f64) {
        let prof = chord_profile(&p, 0.0).unwrap();
        let at = prof.u_min + u * (prof.u_max - prof.u_min);
        let l = prof.length_at(at).unwrap();
        let s = chord_profile(&steiner_symmetrize(&p, 0.0).unwrap(), 0.0).unwrap();
        prop_assert!((s.length_at(at).unwrap() - l).abs() <= 1e-9);
        let low = p.vertices().iter().map(|v| v[1]).fold(f64::INFINITY, f64::min);
        let k = chord_profile(&blaschke_shake(&p, low).unwrap(), 0.0).unwrap();
        prop_assert!((k.length_at(at).unwrap() - l).abs() <= 1e-9);
    }

    #[test]
    fn symmetric_corpus_is_steiner_fixed(s in any::<u64>()) {
        let p = random_symmetric_polygon(5, Seed::new(s)).unwrap();
        let q = steiner_symmetrize(&p, PI / 2.0).unwrap();
        prop_assert!(q.same_vertices(&p, 1e-9));
    }

    #[test]
    fn rigid_motions_preserve_area(p in polygon_strategy(), angle in -PI..PI, dx in -5.0..5.0f64) {
        let q = p.rotated(angle).translated(&Point::new(&[dx, -dx]).unwrap());
        prop_assert!(rel(q.area(), p.area()) <= 1e-12);
    }

    #[test]
    fn samples_lie_in_their_body(s in any::<u64>(), which in 0usize..7) {
        let body = match which {
            0 => ConvexBody::unit_ball(3).unwrap(),
            1 => ConvexBody::half_ball(4).unwrap(),
            2 => ConvexBody::half_ball_cone(3, 0.2, 0.05).unwrap(),
            3 => ConvexBody::regular_simplex(3).unwrap(),
            4 => ConvexBody::cube(2).unwrap().intersect_halfspace(
                &Halfspace::new(Point::new(&[1.0, 1.0]).unwrap(), 0.3).unwrap()).unwrap(),
            5 => ConvexBody::unit_ball(2).unwrap().affine_image(
                &Matrix::from_rows(&[vec![2.0, 1.0], vec![0.0, 0.5]]).unwrap(),
                &Point::new(&[1.0, -1.0]).unwrap()).unwrap(),
            _ => ConvexBody::Polygon2D(random_polygon(7, Seed::new(s)).unwrap().0),
        };
        let mut st = SampleStream::new(Seed::new(s));
        for _ in 0..200 {
            let x = sample_body(&body, &mut st).unwrap();
            prop_assert!(body.contains_within(&x, 1e-9));
        }
    }

    #[test]
    fn streams_are_reproducible(s in any::<u64>(), i in 0u64..1000) {
        let a = SampleStream::new(Seed::new(s).substream(i)).uniform01();
        let b = SampleStream::new(Seed::new(s).substream(i)).uniform01();
        prop_assert_eq!(a.to_bits(), b.to_bits());
        prop_assert!((0.0..1.0).contains(&a));
        prop_assert_ne!(Seed::new(s).substream(i), Seed::new(s).substream(i + 1));
    }

    #[test]
    fn exact_value_arithmetic(a in -50.0..50.0f64, b in 0.01..50.0f64) {
        let (x, y) = (ExactValue::from_f64(a), ExactValue::from_f64(b));
        prop_assert!((x.mul(&y).value() - a * b).abs() <= 1e-12 * (a * b).abs().max(1e-300));
        prop_assert!((x.div(&y).value() - a / b).abs() <= 1e-12 * (a / b).abs().max(1e-300));
        prop_assert!((x.add(&y).value() - (a + b)).abs() <= 1e-12 * (a.abs() + b));
    }

    #[test]
    fn kappa_recursion(d in 3u64..300) {
        // kappa_d = 2 pi / d * kappa_{d-2}
        let lhs = exact::kappa(d).ln();
        let rhs = (2.0 * PI / d as f64).ln() + exact::kappa(d - 2).ln();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0));
    }

    #[test]
    fn ratio_bound_lies_between_brackets(d in 1u64..=200) {
        let (lo, v, hi) = exact::kappa_ratio_bounds(d).unwrap();
        prop_assert!(lo <= v && v <= hi);
    }

    #[test]
    fn chain_bound_dominates_ratio_bound(d in 4u64..12, k in 1u64..40) {
        let m = exact::moment_ratio_bound(d, k).unwrap().value();
        prop_assert!(m < 1.0);
        prop_assert!(m <= exact::chain_bound(d, k).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn matrix_inverse_roundtrip(entries in proptest::collection::vec(-3.0..3.0f64, 9)) {
        let rows: Vec<Vec<f64>> = entries.chunks(3).map(|c| c.to_vec()).collect();
        let m = Matrix::from_rows(&rows).unwrap();
        prop_assume!(m.det().abs() > 1e-3);
        let inv = m.inverse().unwrap();
        prop_assert!(m.mul(&inv).max_abs_diff(&Matrix::identity(3)) <= 1e-8);
        prop_assert!((m.det() * inv.det() - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn json_roundtrip_ball(c in proptest::collection::vec(-10.0..10.0f64, 1..=4), r in 0.1..5.0f64) {
        let b = ConvexBody::ball(Point::new(&c).unwrap(), r).unwrap();
        let back = ConvexBody::from_json(&b.to_json()).unwrap();
        prop_assert_eq!(back, b);
    }

    #[test]
    fn cut_bodies_are_nested(frac in 0.05..0.95f64) {
        let fam = CutFamily::new(ConvexBody::half_ball(3).unwrap(), Point::axis(3, 0)).unwrap();
        let t = fam.a() + frac * (fam.b() - fam.a());
        let kt = fam.body_at(t).unwrap();
        let mut st = SampleStream::new(Seed::new(frac.to_bits()));
        for _ in 0..100 {
            let x = sample_body(&kt, &mut st).unwrap();
            prop_assert!(x[0] >= t - 1e-12);
            prop_assert!(fam.body().contains_within(&x, 1e-12));
        }
    }
}

proptest! {
    #![proptest_config(config(8))]

    #[test]
    fn constant_function_has_zero_crofton_derivative(frac in 0.1..0.9f64, s in any::<u64>()) {
        let fam = CutFamily::new(ConvexBody::cube(3).unwrap(), Point::axis(3, 1)).unwrap();
        let t = fam.a() + frac * (fam.b() - fam.a());
        let r = crofton_derivative_rhs(&fam, t, &SymmetricFunction::one(4), 2000, Seed::new(s)).unwrap();
        prop_assert_eq!(r.mean, 0.0);
        prop_assert_eq!(r.stderr, 0.0);
    }
}
