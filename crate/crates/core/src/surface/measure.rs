//! Area and enclosed volume of triangle meshes in the canonical metric, with
//! analytic gradients with respect to the vertex coordinates.
//!
//! Each face is the coordinate-affine triangle through its vertices. Its area
//! uses the metric frozen at quadrature points; the volume between the face
//! and a base leaf integrates the Riemannian density `e^{-tr(A) x3}` exactly in
//! `x3` and over the projected triangle.

use crate::error::{GeomError, Result};
use crate::group::{planar_metric, planar_metric_dx3, GroupPoint, Matrix2};
use crate::surface::mesh::TriMesh;

/// Faces whose metric area is at or below this abort the computation.
pub const DEGENERATE_AREA: f64 = 1e-14;

/// Where the metric is sampled on each face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Quadrature {
    /// One point at the barycenter.
    #[default]
    Barycenter,
    /// Average of the areas with the metric frozen at the three edge midpoints.
    EdgeMidpoints,
}

type Vec3 = [f64; 3];

fn sub(a: &GroupPoint, b: &GroupPoint) -> Vec3 {
    [a.x1 - b.x1, a.x2 - b.x2, a.x3 - b.x3]
}

fn quad_form(g: &[[f64; 2]; 2], u: &Vec3, v: &Vec3) -> f64 {
    u[0] * (g[0][0] * v[0] + g[0][1] * v[1]) + u[1] * (g[1][0] * v[0] + g[1][1] * v[1]) + u[2] * v[2]
}

fn quad_form_dx3(gd: &[[f64; 2]; 2], u: &Vec3, v: &Vec3) -> f64 {
    u[0] * (gd[0][0] * v[0] + gd[0][1] * v[1]) + u[1] * (gd[1][0] * v[0] + gd[1][1] * v[1])
}

fn g_apply(g: &[[f64; 2]; 2], u: &Vec3) -> Vec3 {
    [
        g[0][0] * u[0] + g[0][1] * u[1],
        g[1][0] * u[0] + g[1][1] * u[1],
        u[2],
    ]
}

/// Area of the triangle with edge vectors `e1`, `e2` under the metric at
/// height `x3`, and its partial derivatives with respect to `e1`, `e2` and `x3`.
fn frozen_area_with_grad(e1: &Vec3, e2: &Vec3, x3: f64, a: &Matrix2) -> (f64, Vec3, Vec3, f64) {
    let g = planar_metric(x3, a);
    let gd = planar_metric_dx3(x3, a);
    let p = quad_form(&g, e1, e1);
    let q = quad_form(&g, e2, e2);
    let r = quad_form(&g, e1, e2);
    let det = (p * q - r * r).max(0.0);
    let s = det.sqrt();
    let area = 0.5 * s;
    if s == 0.0 {
        return (0.0, [0.0; 3], [0.0; 3], 0.0);
    }
    let ge1 = g_apply(&g, e1);
    let ge2 = g_apply(&g, e2);
    // d(det)/de1 = 2q G e1 - 2r G e2, and d(area) = d(det) / (4 s)
    let k = 1.0 / (4.0 * s);
    let mut d1 = [0.0; 3];
    let mut d2 = [0.0; 3];
    for i in 0..3 {
        d1[i] = k * (2.0 * q * ge1[i] - 2.0 * r * ge2[i]);
        d2[i] = k * (2.0 * p * ge2[i] - 2.0 * r * ge1[i]);
    }
    let dp = quad_form_dx3(&gd, e1, e1);
    let dq = quad_form_dx3(&gd, e2, e2);
    let dr = quad_form_dx3(&gd, e1, e2);
    let dz = k * (dp * q + p * dq - 2.0 * r * dr);
    (area, d1, d2, dz)
}

/// Metric area of one face and its gradient with respect to its three vertices.
pub fn face_area_with_grad(
    v: [&GroupPoint; 3],
    a: &Matrix2,
    quad: Quadrature,
) -> (f64, [Vec3; 3]) {
    let e1 = sub(v[1], v[0]);
    let e2 = sub(v[2], v[0]);
    let mut grad = [[0.0; 3]; 3];
    let mut total = 0.0;
    // (weight, barycentric coordinates of the sample point)
    let samples: &[(f64, [f64; 3])] = match quad {
        Quadrature::Barycenter => &[(1.0, [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0])],
        Quadrature::EdgeMidpoints => &[
            (1.0 / 3.0, [0.5, 0.5, 0.0]),
            (1.0 / 3.0, [0.0, 0.5, 0.5]),
            (1.0 / 3.0, [0.5, 0.0, 0.5]),
        ],
    };
    for &(w, bc) in samples {
        let z = bc[0] * v[0].x3 + bc[1] * v[1].x3 + bc[2] * v[2].x3;
        let (ar, d1, d2, dz) = frozen_area_with_grad(&e1, &e2, z, a);
        total += w * ar;
        for i in 0..3 {
            grad[1][i] += w * d1[i];
            grad[2][i] += w * d2[i];
            grad[0][i] -= w * (d1[i] + d2[i]);
        }
        for (k, g) in grad.iter_mut().enumerate() {
            g[2] += w * bc[k] * dz;
        }
    }
    (total, grad)
}

pub fn face_area(v: [&GroupPoint; 3], a: &Matrix2, quad: Quadrature) -> f64 {
    face_area_with_grad(v, a, quad).0
}

fn face_vertices<'m>(m: &'m TriMesh, f: &[usize; 3]) -> [&'m GroupPoint; 3] {
    let v = m.vertices();
    [&v[f[0]], &v[f[1]], &v[f[2]]]
}

/// Sum in ascending order, so totals do not depend on face order.
fn ordered_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.iter().sum()
}

pub fn mesh_area(m: &TriMesh, a: &Matrix2, quad: Quadrature) -> Result<f64> {
    let mut terms = Vec::with_capacity(m.face_count());
    for (fi, f) in m.faces().iter().enumerate() {
        let ar = face_area(face_vertices(m, f), a, quad);
        if !(ar > DEGENERATE_AREA) {
            return Err(GeomError::DegenerateFace { face: fi, area: ar });
        }
        terms.push(ar);
    }
    Ok(ordered_sum(terms))
}

/// Per-vertex coordinate gradient of [`mesh_area`].
pub fn area_gradient(m: &TriMesh, a: &Matrix2, quad: Quadrature) -> Result<Vec<Vec3>> {
    let mut grad = vec![[0.0; 3]; m.vertex_count()];
    for (fi, f) in m.faces().iter().enumerate() {
        let (ar, g) = face_area_with_grad(face_vertices(m, f), a, quad);
        if !(ar > DEGENERATE_AREA) {
            return Err(GeomError::DegenerateFace { face: fi, area: ar });
        }
        for k in 0..3 {
            for i in 0..3 {
                grad[f[k]][i] += g[k][i];
            }
        }
    }
    Ok(grad)
}

/// Mean metric edge length, each edge measured with the metric at its midpoint.
pub fn mean_edge_length(m: &TriMesh, a: &Matrix2) -> f64 {
    let edges = m.edges();
    if edges.is_empty() {
        return 0.0;
    }
    let total: f64 = edges
        .iter()
        .map(|&(i, j)| edge_length(&m.vertex(i), &m.vertex(j), a))
        .sum();
    total / edges.len() as f64
}

/// Length of the coordinate segment `p q` with the metric frozen at its midpoint.
pub fn edge_length(p: &GroupPoint, q: &GroupPoint, a: &Matrix2) -> f64 {
    let e = sub(q, p);
    let g = planar_metric(0.5 * (p.x3 + q.x3), a);
    quad_form(&g, &e, &e).max(0.0).sqrt()
}

// ---------------------------------------------------------------------------
// Exponential divided differences

const SERIES_TERMS: usize = 60;

/// Complete homogeneous symmetric polynomials `h_0..=h_n` of `vars`.
fn complete_homogeneous(vars: &[f64], n: usize) -> Vec<f64> {
    let mut h = vec![0.0; n + 1];
    h[0] = 1.0;
    for &y in vars {
        for k in 1..=n {
            h[k] += y * h[k - 1];
        }
    }
    h
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Divided difference `exp[x_0, ..., x_k]` of the exponential, stable for
/// nearly equal or repeated nodes.
///
/// By Hermite–Genocchi this equals the integral of `exp(Σ λ_i x_i)` over the
/// standard `k`-simplex.
pub fn exp_divided_difference(nodes: &[f64]) -> f64 {
    assert!(!nodes.is_empty());
    let mut x = nodes.to_vec();
    x.sort_by(|p, q| p.total_cmp(q));
    dd_sorted(&x)
}

fn dd_sorted(x: &[f64]) -> f64 {
    let k = x.len() - 1;
    if k == 0 {
        return x[0].exp();
    }
    let spread = x[k] - x[0];
    if spread < 1.0 {
        // centered Taylor series: e^m Σ_n h_n(x - m) / (n + k)!
        let m = x.iter().sum::<f64>() / x.len() as f64;
        let y: Vec<f64> = x.iter().map(|v| v - m).collect();
        let h = complete_homogeneous(&y, SERIES_TERMS);
        let mut sum = 0.0;
        let mut fact = factorial(k);
        let mut prev = f64::INFINITY;
        for (n, hn) in h.iter().enumerate() {
            if n > 0 {
                fact *= (n + k) as f64;
            }
            let term = hn / fact;
            sum += term;
            // odd terms can vanish for symmetric nodes, so wait for two small ones
            if n > 4 && prev.max(term.abs()) < 1e-18 * sum.abs() {
                break;
            }
            prev = term.abs();
        }
        m.exp() * sum
    } else {
        (dd_sorted(&x[1..]) - dd_sorted(&x[..k])) / spread
    }
}

/// `Φ(h) = ∫_{Σ₂} F(Σ λ_i h_i) dλ` with `F(h) = (1 - e^{-τh}) / τ` (and
/// `F(h) = h` at `τ = 0`), together with `∂Φ/∂h_i = ∫_{Σ₂} λ_i e^{-τ Σ λ h} dλ`.
/// The volume of the slab between a face and `x3 = 0` is `2 S Φ` for projected
/// area `S`.
pub fn slab_profile(tau: f64, h: [f64; 3]) -> (f64, [f64; 3]) {
    let hmax = h.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if tau.abs() * hmax <= 1.0 {
        // Φ = Σ_{n≥1} (-τ)^{n-1} h_n(h) / (n+2)!
        let phi = alternating_series(tau, &complete_homogeneous(&h, SERIES_TERMS), 0);
        let mut grad = [0.0; 3];
        for (i, gi) in grad.iter_mut().enumerate() {
            // ∂h_n(h)/∂h_i = h_{n-1}(h, h_i)
            let vars = [h[0], h[1], h[2], h[i]];
            *gi = alternating_series(tau, &complete_homogeneous(&vars, SERIES_TERMS), 1);
        }
        (phi, grad)
    } else {
        let l = [-tau * h[0], -tau * h[1], -tau * h[2]];
        let phi = (0.5 - exp_divided_difference(&l)) / tau;
        let mut grad = [0.0; 3];
        for (i, gi) in grad.iter_mut().enumerate() {
            *gi = exp_divided_difference(&[l[0], l[1], l[2], l[i]]);
        }
        (phi, grad)
    }
}

/// `Σ_{n≥1} (-τ)^{n-1} hs[n - shift] / (n+2)!`.
fn alternating_series(tau: f64, hs: &[f64], shift: usize) -> f64 {
    let mut sum = 0.0;
    let mut tpow = 1.0;
    let mut fact = factorial(3);
    let mut prev = f64::INFINITY;
    for n in 1..SERIES_TERMS {
        if n > 1 {
            fact *= (n + 2) as f64;
        }
        let term = tpow * hs[n - shift] / fact;
        sum += term;
        if n > 3 && prev.max(term.abs()) <= 1e-18 * sum.abs().max(1e-300) {
            break;
        }
        prev = term.abs();
        tpow *= -tau;
    }
    sum
}

fn projected_signed_area(v: [&GroupPoint; 3]) -> f64 {
    0.5 * ((v[1].x1 - v[0].x1) * (v[2].x2 - v[0].x2) - (v[2].x1 - v[0].x1) * (v[1].x2 - v[0].x2))
}

/// Gradient of the projected signed area with respect to `(x1, x2)` of each vertex.
fn projected_area_grad(v: [&GroupPoint; 3]) -> [[f64; 2]; 3] {
    let mut g = [[0.0; 2]; 3];
    for k in 0..3 {
        let a = v[(k + 1) % 3];
        let b = v[(k + 2) % 3];
        g[k] = [0.5 * (a.x2 - b.x2), 0.5 * (b.x1 - a.x1)];
    }
    g
}

/// Orientation sign of a graph-like mesh projected to the `x3 = 0` plane.
/// Fails when the projection folds (faces of both orientations).
fn graph_orientation(m: &TriMesh) -> Result<f64> {
    let areas: Vec<f64> = m
        .faces()
        .iter()
        .map(|f| projected_signed_area(face_vertices(m, f)))
        .collect();
    let total: f64 = areas.iter().sum();
    let sign = if total >= 0.0 { 1.0 } else { -1.0 };
    if let Some(face) = areas.iter().position(|&s| sign * s < -1e-14) {
        return Err(GeomError::NonGraph { face });
    }
    Ok(sign)
}

fn volume_impl(m: &TriMesh, a: &Matrix2, base: f64, sign: f64, want_grad: bool) -> (f64, Vec<Vec3>) {
    let tau = a.trace();
    let scale = (-tau * base).exp();
    let mut terms = Vec::with_capacity(m.face_count());
    let mut grad = if want_grad {
        vec![[0.0; 3]; m.vertex_count()]
    } else {
        Vec::new()
    };
    for f in m.faces() {
        let v = face_vertices(m, f);
        let s = projected_signed_area(v);
        let (phi, dphi) = slab_profile(tau, [v[0].x3 - base, v[1].x3 - base, v[2].x3 - base]);
        terms.push(2.0 * s * phi);
        if want_grad {
            let ds = projected_area_grad(v);
            for k in 0..3 {
                let g = &mut grad[f[k]];
                g[0] += sign * scale * 2.0 * phi * ds[k][0];
                g[1] += sign * scale * 2.0 * phi * ds[k][1];
                g[2] += sign * scale * 2.0 * s * dphi[k];
            }
        }
    }
    (sign * scale * ordered_sum(terms), grad)
}

/// Riemannian volume between a graph-like mesh and the leaf `x3 = 0`
/// (negative where the mesh lies below the leaf).
pub fn mesh_volume_below(m: &TriMesh, a: &Matrix2) -> Result<f64> {
    let sign = graph_orientation(m)?;
    Ok(volume_impl(m, a, 0.0, sign, false).0)
}

/// Coordinate gradient of [`mesh_volume_below`].
pub fn volume_gradient(m: &TriMesh, a: &Matrix2) -> Result<Vec<Vec3>> {
    let sign = graph_orientation(m)?;
    Ok(volume_impl(m, a, 0.0, sign, true).1)
}

/// Oriented volume between an arbitrary mesh and the leaf `x3 = base`,
/// each face contributing with the sign of its projected orientation. No
/// graph condition is required.
pub fn mesh_volume_signed(m: &TriMesh, a: &Matrix2, base: f64) -> f64 {
    volume_impl(m, a, base, 1.0, false).0
}
