mod common;

use proptest::prelude::*;

use common::dist;
use semidirect::geometry::{
    christoffel_coords, christoffel_from_frame, covariant_derivative, frame_connection, geodesic_integrate,
    sectional_curvature, GeodesicState,
};
use semidirect::group::{coord_to_frame, left_frame_at, metric_at, multiply};
use semidirect::{CoordVector, FrameVector, GroupPoint, Matrix2};

fn matrix(bound: f64) -> impl Strategy<Value = Matrix2> {
    prop::array::uniform4(-bound..=bound).prop_map(|[a, b, c, d]| Matrix2::new(a, b, c, d).unwrap())
}

fn point(bound: f64) -> impl Strategy<Value = GroupPoint> {
    prop::array::uniform3(-bound..=bound).prop_map(GroupPoint::from_array)
}

fn frame_vec() -> impl Strategy<Value = FrameVector> {
    prop::array::uniform3(-1.0..1.0f64)
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-2)
        .prop_map(FrameVector::from_array)
}

/// Quadratic curve `c(t) = p + t w + t² u` in coordinates.
fn curve(p: [f64; 3], w: [f64; 3], u: [f64; 3], t: f64) -> [f64; 3] {
    [0, 1, 2].map(|k| p[k] + t * w[k] + t * t * u[k])
}

fn poly(c: [[f64; 3]; 2], t: f64) -> [f64; 3] {
    [0, 1, 2].map(|k| c[0][k] + t * c[1][k])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn frame_christoffels_match_finite_differences(a in matrix(1.0), p in point(1.0)) {
        let fd = christoffel_coords(&p, &a, 1e-4).unwrap();
        prop_assert!(fd.max_abs_diff(&christoffel_from_frame(&p, &a)) <= 1e-6);
    }

    #[test]
    fn connection_is_torsion_free(a in matrix(2.0), p in point(1.0)) {
        // coordinate bracket of the frame fields by a fourth-order stencil
        let h = 1e-3;
        let field = |x: [f64; 3], k: usize| left_frame_at(&GroupPoint::from_array(x), &a)[k].to_array();
        let deriv = |k: usize, dir: [f64; 3]| -> [f64; 3] {
            let at = |t: f64| field([0, 1, 2].map(|m| p.to_array()[m] + t * dir[m]), k);
            let (f1, f2, m1, m2) = (at(h), at(2.0 * h), at(-h), at(-2.0 * h));
            [0, 1, 2].map(|m| (8.0 * (f1[m] - m1[m]) - (f2[m] - m2[m])) / (12.0 * h))
        };
        let table = frame_connection(&a);
        let basis = [FrameVector::E1, FrameVector::E2, FrameVector::E3];
        for i in 0..3 {
            for j in 0..3 {
                let dj = deriv(j, field(p.to_array(), i));
                let di = deriv(i, field(p.to_array(), j));
                let br = coord_to_frame(&CoordVector::from_array([0, 1, 2].map(|m| dj[m] - di[m])), &p, &a);
                prop_assert!(table.bracket(&basis[i], &basis[j]).sub(&br).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn connection_is_metric_along_curves(
        a in matrix(1.0), p in prop::array::uniform3(-1.0..1.0f64),
        w in prop::array::uniform3(-1.0..1.0f64), u in prop::array::uniform3(-0.5..0.5f64),
        vc in prop::array::uniform2(prop::array::uniform3(-1.0..1.0f64)),
        wc in prop::array::uniform2(prop::array::uniform3(-1.0..1.0f64)),
        t in -0.5..0.5f64,
    ) {
        let h = 1e-5;
        let inner = |s: f64| {
            let x = GroupPoint::from_array(curve(p, w, u, s));
            metric_at(&x, &a).inner(&CoordVector::from_array(poly(vc, s)), &CoordVector::from_array(poly(wc, s)))
        };
        let lhs = (inner(t + h) - inner(t - h)) / (2.0 * h);

        let frame = |c: [[f64; 3]; 2], s: f64| {
            coord_to_frame(&CoordVector::from_array(poly(c, s)), &GroupPoint::from_array(curve(p, w, u, s)), &a)
        };
        let rate = |c: [[f64; 3]; 2]| frame(c, t + h).sub(&frame(c, t - h)).scale(0.5 / h);
        let x = GroupPoint::from_array(curve(p, w, u, t));
        let tangent = coord_to_frame(&CoordVector::from_array([0, 1, 2].map(|k| w[k] + 2.0 * t * u[k])), &x, &a);
        let (v, wv) = (frame(vc, t), frame(wc, t));
        let dv = covariant_derivative(&tangent, &v, &rate(vc), &a);
        let dw = covariant_derivative(&tangent, &wv, &rate(wc), &a);
        let rhs = dv.dot(&wv) + v.dot(&dw);
        prop_assert!((lhs - rhs).abs() <= 1e-6 * lhs.abs().max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn geodesics_keep_unit_speed(a in matrix(1.0), p in point(1.0), v in frame_vec()) {
        let path = geodesic_integrate(&GeodesicState { point: p, velocity: v }, 1.0, 1000, &a).unwrap();
        prop_assert!(path.max_speed_drift() <= 1e-8);
    }

    #[test]
    fn geodesics_commute_with_left_translation(a in matrix(1.0), g in point(1.0), p in point(1.0), v in frame_vec()) {
        let path = geodesic_integrate(&GeodesicState { point: p, velocity: v }, 1.0, 200, &a).unwrap();
        let moved = geodesic_integrate(
            &GeodesicState { point: multiply(&g, &p, &a), velocity: v },
            1.0,
            200,
            &a,
        )
        .unwrap();
        for (s, m) in path.samples.iter().zip(&moved.samples) {
            let want = multiply(&g, &s.point, &a);
            prop_assert!(dist(&want, &m.point) <= 1e-9 * want.to_array().iter().fold(1.0f64, |acc, x| acc.max(x.abs())));
            prop_assert!(s.velocity.sub(&m.velocity).norm() <= 1e-9);
        }
    }

    #[test]
    fn hyperbolic_family_has_constant_curvature(b in 0.0..3.0f64, x in frame_vec(), y in frame_vec()) {
        prop_assume!(x.cross(&y).norm() > 1e-2);
        let k = sectional_curvature(&Matrix2::constant_curvature(b).unwrap(), &x, &y).unwrap();
        prop_assert!((k + 1.0).abs() <= 1e-9);
    }
}

#[test]
fn rk4_is_fourth_order() {
    let a = Matrix2::new(0.7, 1.1, -0.4, 0.9).unwrap();
    let start = GeodesicState { point: GroupPoint::new(0.2, -0.1, 0.3), velocity: FrameVector::new(0.6, -0.5, 0.4) };
    let end = |n: usize| geodesic_integrate(&start, 2.0, n, &a).unwrap().end().unwrap().point;
    let reference = end(1280);
    let e1 = dist(&end(20), &reference);
    let e2 = dist(&end(40), &reference);
    let ratio = e1 / e2;
    assert!((14.0..=18.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn euclidean_geodesics_are_straight_lines() {
    let p = GroupPoint::new(1.0, -2.0, 0.5);
    let v = FrameVector::new(0.3, -0.4, 1.2);
    let path = geodesic_integrate(&GeodesicState { point: p, velocity: v }, 3.0, 300, &Matrix2::zero()).unwrap();
    let u = v.scale(1.0 / v.norm());
    for s in &path.samples {
        let want = GroupPoint::new(p.x1 + s.t * u.v1, p.x2 + s.t * u.v2, p.x3 + s.t * u.v3);
        assert!(dist(&want, &s.point) <= 1e-12);
    }
}

#[test]
fn vertical_axis_is_a_geodesic() {
    for a in [Matrix2::hyperbolic(), Matrix2::nil3(), Matrix2::new(0.3, 2.0, -1.0, 0.8).unwrap()] {
        let path = geodesic_integrate(
            &GeodesicState { point: GroupPoint::ORIGIN, velocity: FrameVector::E3 },
            2.0,
            100,
            &a,
        )
        .unwrap();
        for s in &path.samples {
            assert_eq!((s.point.x1, s.point.x2), (0.0, 0.0));
            assert!((s.point.x3 - s.t).abs() <= 1e-14);
        }
    }
}

#[test]
fn covariant_derivative_examples() {
    let zero = FrameVector::default();
    let e3 = covariant_derivative(&FrameVector::E3, &FrameVector::E3, &zero, &Matrix2::new(0.5, 1.0, 2.0, 0.3).unwrap());
    assert_eq!(e3.norm(), 0.0);
    let flat = covariant_derivative(&FrameVector::new(1.0, 2.0, 3.0), &FrameVector::new(-1.0, 0.5, 2.0), &zero, &Matrix2::zero());
    assert_eq!(flat.norm(), 0.0);
    let h3 = covariant_derivative(&FrameVector::E1, &FrameVector::E2, &zero, &Matrix2::hyperbolic());
    assert_eq!(h3.norm(), 0.0);
}

#[test]
fn flat_space_has_zero_curvature_and_christoffels() {
    let a = Matrix2::zero();
    let g = christoffel_coords(&GroupPoint::new(0.4, 1.0, -0.7), &a, 1e-4).unwrap();
    assert!(g.gamma.iter().flatten().flatten().all(|v| v.abs() <= 1e-10));
    let k = sectional_curvature(&a, &FrameVector::new(1.0, 2.0, 0.0), &FrameVector::new(0.0, 1.0, 3.0)).unwrap();
    assert_eq!(k, 0.0);
}
