mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{immersion_mesh, inward_sphere};
use semidirect::group::multiply;
use semidirect::surface::analytic::{
    a3_zbar_fd, frame_coefficients, jet_at, tension_fd, HalfSpaceSphere, HorizontalCatenoid, Immersion,
    MercatorSphere, WavyPatch,
};
use semidirect::surface::io::{read_obj, read_scalar_csv, write_obj, write_scalar_csv};
use semidirect::surface::jet::{
    a3_zbar_rhs, a3_zbar_rhs_general, mean_curvature_from_jet, tension_from_coords, ConformalJet,
};
use semidirect::surface::{
    area_gradient, discrete_mean_curvature, laplace_beltrami, mesh_area, mesh_volume_below, Quadrature, ScalarField,
    TriMesh,
};
use semidirect::variational::{make_annulus_mesh, BoundaryCircles};
use semidirect::{FrameVector, GroupPoint, Matrix2};

fn matrix(bound: f64) -> impl Strategy<Value = Matrix2> {
    prop::array::uniform4(-bound..=bound).prop_map(|[a, b, c, d]| Matrix2::new(a, b, c, d).unwrap())
}

fn ramp() -> TriMesh {
    let c = BoundaryCircles { r_in: 0.5, h_in: 0.4, r_out: 2.0, h_out: 0.1, n_seg: 24 };
    let m = make_annulus_mesh(&c, 8).unwrap();
    // bend the interior so the surface is not a ruled ramp
    let pos = m
        .vertices()
        .iter()
        .map(|p| GroupPoint::new(p.x1, p.x2, p.x3 + 0.05 * (p.x1 * p.x2).sin()))
        .collect();
    m.with_positions(pos).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn area_and_volume_ignore_labels(a in matrix(1.5), seed in any::<u64>()) {
        let m = ramp();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<usize> = (0..m.vertex_count()).collect();
        perm.shuffle(&mut rng);
        let mut order: Vec<usize> = (0..m.face_count()).collect();
        order.shuffle(&mut rng);
        let r = m.relabel(&perm, &order).unwrap();
        for q in [Quadrature::Barycenter, Quadrature::EdgeMidpoints] {
            prop_assert_eq!(mesh_area(&m, &a, q).unwrap(), mesh_area(&r, &a, q).unwrap());
        }
        prop_assert_eq!(mesh_volume_below(&m, &a).unwrap(), mesh_volume_below(&r, &a).unwrap());
    }

    #[test]
    fn horizontal_translation_preserves_area_and_volume(a in matrix(1.5), g in prop::array::uniform2(-3.0..3.0f64)) {
        let m = ramp();
        let t = m.left_translate(&GroupPoint::new(g[0], g[1], 0.0), &a);
        let (a0, a1) = (mesh_area(&m, &a, Quadrature::Barycenter).unwrap(), mesh_area(&t, &a, Quadrature::Barycenter).unwrap());
        prop_assert!((a0 - a1).abs() <= 1e-10 * a0);
        let (v0, v1) = (mesh_volume_below(&m, &a).unwrap(), mesh_volume_below(&t, &a).unwrap());
        prop_assert!((v0 - v1).abs() <= 1e-10 * v0.abs().max(1.0));
    }

    #[test]
    fn left_translation_is_an_isometry_for_area(a in matrix(1.0), g in prop::array::uniform3(-1.0..1.0f64)) {
        let m = ramp();
        let t = m.left_translate(&GroupPoint::from_array(g), &a);
        let (a0, a1) = (mesh_area(&m, &a, Quadrature::Barycenter).unwrap(), mesh_area(&t, &a, Quadrature::Barycenter).unwrap());
        prop_assert!((a0 - a1).abs() <= 1e-10 * a0);
        let h0 = discrete_mean_curvature(&m, &a).unwrap();
        let h1 = discrete_mean_curvature(&t, &a).unwrap();
        for (x, y) in h0.h.iter().zip(&h1.h) {
            prop_assert!((x - y).abs() <= 1e-8 * x.abs().max(1.0));
        }
    }

    #[test]
    fn constants_are_in_the_laplacian_kernel(a in matrix(1.5), c in -5.0..5.0f64) {
        let m = ramp();
        let f = ScalarField::new(&m, vec![c; m.vertex_count()]).unwrap();
        prop_assert!(laplace_beltrami(&m, &f, &a).unwrap().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn area_gradient_matches_finite_differences(a in matrix(1.0), vertex in 24usize..168) {
        let m = ramp();
        let g = area_gradient(&m, &a, Quadrature::Barycenter).unwrap();
        let h = 1e-6;
        for k in 0..3 {
            let shifted = |d: f64| {
                let mut x = m.vertex(vertex).to_array();
                x[k] += d;
                let mut mm = m.clone();
                mm.set_vertex(vertex, GroupPoint::from_array(x));
                mesh_area(&mm, &a, Quadrature::Barycenter).unwrap()
            };
            let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
            prop_assert!((fd - g[vertex][k]).abs() <= 1e-5 * g[vertex][k].abs().max(1e-2));
        }
    }

    #[test]
    fn a3_zbar_general_form_on_a_non_conformal_patch(
        a in matrix(1.5), alpha in -0.4..0.4f64, gamma in -0.5..0.5f64, u in -2.0..2.0f64, v in -2.0..2.0f64,
    ) {
        let s = WavyPatch { alpha, beta: 0.3, gamma };
        let coeffs = frame_coefficients(&s, &a, u, v);
        let jet = ConformalJet {
            point: s.position(u, v),
            a1: coeffs[0],
            a2: coeffs[1],
            a3: coeffs[2],
            normal: FrameVector::E3,
            lambda: coeffs.iter().map(|c| c.norm_sqr()).sum(),
        };
        let rhs = a3_zbar_rhs_general(&jet, tension_fd(&s, &a, u, v, 1e-5)[2], &a);
        let fd = a3_zbar_fd(&s, &a, u, v, 1e-4);
        prop_assert!((fd - rhs).norm() <= 1e-6 * rhs.norm().max(1.0), "{fd} vs {rhs}");
    }

    #[test]
    fn a3_zbar_closed_form_on_cmc_surfaces(u in -3.0..3.0f64, v in -1.2..1.2f64) {
        let cases: [(&dyn Immersion, Matrix2, f64); 3] = [
            (&MercatorSphere { r: 1.7 }, Matrix2::zero(), -1.0 / 1.7),
            (&HorizontalCatenoid, Matrix2::zero(), 0.0),
            (&HalfSpaceSphere { y0: 2.5, rho: 1.2 }, Matrix2::hyperbolic(), -2.5 / 1.2),
        ];
        for (s, a, h) in cases {
            let jet = jet_at(s, &a, u, v).unwrap();
            let fd = a3_zbar_fd(s, &a, u, v, 1e-4);
            let rhs = a3_zbar_rhs(&jet, h, &a);
            prop_assert!((fd - rhs).norm() <= 1e-6 * rhs.norm().max(1.0));
            let got = mean_curvature_from_jet(&jet, tension_fd(s, &a, u, v, 1e-5)).unwrap();
            prop_assert!((got - h).abs() <= 1e-6 * h.abs().max(1.0));
        }
    }

    #[test]
    fn obj_round_trip_is_lossless(a in matrix(1.0), g in prop::array::uniform3(-2.0..2.0f64)) {
        let m = ramp().left_translate(&GroupPoint::from_array(g), &a);
        let back = read_obj(&write_obj(&m)).unwrap();
        prop_assert_eq!(back.vertices(), m.vertices());
        prop_assert_eq!(back.faces(), m.faces());
        let f = ScalarField::from_fn(&m, |p| p.x1.sin() / 3.0 + p.x3).unwrap();
        prop_assert_eq!(read_scalar_csv(&write_scalar_csv(&f), &m).unwrap(), f);
    }
}

#[test]
fn sphere_mean_curvature_is_inverse_radius() {
    let r = 1.5;
    let m = inward_sphere(5, r);
    assert!(m.face_count() >= 8000);
    let h = discrete_mean_curvature(&m, &Matrix2::zero()).unwrap();
    let dev = h.max_deviation(1.0 / r) * r;
    assert!(dev > 0.0 && dev <= 0.02, "relative deviation {dev}");
}

#[test]
fn sphere_area_converges_quadratically() {
    let exact = 4.0 * std::f64::consts::PI;
    let errs: Vec<f64> = (3..6)
        .map(|l| (mesh_area(&inward_sphere(l, 1.0), &Matrix2::zero(), Quadrature::Barycenter).unwrap() - exact).abs())
        .collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn curved_leaf_patch_area_converges_quadratically() {
    // graph x3 = 0.3 + 0.2 sin(u) sin(v) in the hyperbolic group, integrated
    // with 3-point quadrature on a very fine mesh as the reference
    struct Bump;
    impl Immersion for Bump {
        fn position(&self, u: f64, v: f64) -> GroupPoint {
            GroupPoint::new(u, v, 0.3 + 0.2 * u.sin() * v.sin())
        }
        fn du(&self, u: f64, v: f64) -> [f64; 3] {
            [1.0, 0.0, 0.2 * u.cos() * v.sin()]
        }
        fn dv(&self, u: f64, v: f64) -> [f64; 3] {
            [0.0, 1.0, 0.2 * u.sin() * v.cos()]
        }
    }
    let a = Matrix2::hyperbolic();
    let area = |n: usize, q| mesh_area(&immersion_mesh(&Bump, (0.0, 2.0), (0.0, 2.0), n, n), &a, q).unwrap();
    let reference = area(512, Quadrature::EdgeMidpoints);
    let e: Vec<f64> = [16, 32, 64].iter().map(|&n| (area(n, Quadrature::Barycenter) - reference).abs()).collect();
    for w in e.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn graph_mean_curvature_from_jet() {
    // x3 = eps x1² at the origin in Euclidean space, parameterized by (x1, x2)
    for eps in [1e-3, 0.1, 0.7] {
        let fz = [Complex64::new(0.5, 0.0), Complex64::new(0.0, -0.5), Complex64::new(0.0, 0.0)];
        let fzz = [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.5 * eps, 0.0)];
        let a = Matrix2::zero();
        let p = GroupPoint::ORIGIN;
        let jet = ConformalJet::from_isotropic(p, [fz[0], fz[1], fz[2]]).unwrap();
        let h = mean_curvature_from_jet(&jet, tension_from_coords(&p, fz, fzz, &a)).unwrap();
        assert!((h - eps).abs() <= eps * eps, "{h} vs {eps}");
    }
}

#[test]
fn leaf_jets_have_trace_half_curvature() {
    let a = Matrix2::new(0.8, -0.3, 1.1, 1.4).unwrap();
    let p = GroupPoint::new(0.5, -0.2, 0.9);
    // leaf parameterized by frame directions: f_z = (E1 - i E2) / 2 in frame components
    let coeffs = [Complex64::new(0.5, 0.0), Complex64::new(0.0, -0.5), Complex64::new(0.0, 0.0)];
    let jet = ConformalJet::from_isotropic(p, coeffs).unwrap();
    let table = semidirect::geometry::frame_connection(&a);
    // tension = Σ conj(A_i) A_j ∇_{E_i} E_j for a frame-constant f_z
    let mut t = [Complex64::new(0.0, 0.0); 3];
    for i in 0..3 {
        for j in 0..3 {
            let w = coeffs[i].conj() * coeffs[j];
            let n = table.nabla(i, j).to_array();
            for k in 0..3 {
                t[k] += w * n[k];
            }
        }
    }
    let h = mean_curvature_from_jet(&jet, t).unwrap();
    assert!((h - 0.5 * a.trace()).abs() <= 1e-14, "{h}");
    assert!(a3_zbar_rhs(&jet, h, &a).norm() <= 1e-14);
}

#[test]
fn leaf_translation_moves_along_the_group() {
    let a = Matrix2::hyperbolic();
    let m = ramp();
    let g = GroupPoint::new(0.3, -0.7, 0.0);
    let t = m.left_translate(&g, &a);
    for (p, q) in m.vertices().iter().zip(t.vertices()) {
        assert_eq!(multiply(&g, p, &a), *q);
    }
}
