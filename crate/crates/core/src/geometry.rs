//! Levi-Civita connection of the canonical metric, geodesics and curvature.
//!
//! In the left-invariant frame the connection coefficients are constants,
//! so covariant derivatives and curvature of left-invariant fields are pure
//! algebra. The coordinate Christoffel symbols are available both from the
//! frame table and from finite differences of the metric, which lets the two
//! be checked against each other.

use crate::error::{GeomError, Result};
use crate::group::{exp_za, metric_at, FrameVector, GroupPoint, Matrix2};

/// Default finite-difference step for [`christoffel_coords`].
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Gram determinant below which a plane is considered degenerate.
pub const GRAM_EPS: f64 = 1e-12;

/// `∇_{E_i} E_j = Σ_k gamma[i][j][k] E_k`, constant over the group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameConnectionTable {
    pub gamma: [[[f64; 3]; 3]; 3],
}

impl FrameConnectionTable {
    /// `∇_{E_i} E_j` as a frame vector (indices are 0-based).
    pub fn nabla(&self, i: usize, j: usize) -> FrameVector {
        FrameVector::from_array(self.gamma[i][j])
    }

    /// `∇_X Y` for fields with constant frame components.
    pub fn apply(&self, x: &FrameVector, y: &FrameVector) -> FrameVector {
        let x = x.to_array();
        let y = y.to_array();
        let mut out = [0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o += w * self.gamma[i][j][k];
                }
            }
        }
        FrameVector::from_array(out)
    }

    /// `[X, Y] = ∇_X Y - ∇_Y X` for left-invariant fields.
    pub fn bracket(&self, x: &FrameVector, y: &FrameVector) -> FrameVector {
        self.apply(x, y).sub(&self.apply(y, x))
    }

    /// `R(X, Y) Z = ∇_X ∇_Y Z - ∇_Y ∇_X Z - ∇_{[X,Y]} Z` for left-invariant fields.
    pub fn curvature(&self, x: &FrameVector, y: &FrameVector, z: &FrameVector) -> FrameVector {
        let xyz = self.apply(x, &self.apply(y, z));
        let yxz = self.apply(y, &self.apply(x, z));
        let bz = self.apply(&self.bracket(x, y), z);
        xyz.sub(&yxz).sub(&bz)
    }
}

pub fn frame_connection(a: &Matrix2) -> FrameConnectionTable {
    let (pa, pd) = (a.a(), a.d());
    let s = a.sym_offdiag();
    let skew = 0.5 * (a.c() - a.b());
    let mut g = [[[0.0; 3]; 3]; 3];
    // ∇_{E1}
    g[0][0] = [0.0, 0.0, pa];
    g[0][1] = [0.0, 0.0, s];
    g[0][2] = [-pa, -s, 0.0];
    // ∇_{E2}
    g[1][0] = [0.0, 0.0, s];
    g[1][1] = [0.0, 0.0, pd];
    g[1][2] = [-s, -pd, 0.0];
    // ∇_{E3}
    g[2][0] = [0.0, skew, 0.0];
    g[2][1] = [-skew, 0.0, 0.0];
    g[2][2] = [0.0, 0.0, 0.0];
    FrameConnectionTable { gamma: g }
}

/// Coordinate Christoffel symbols, `gamma[k][i][j] = Γᵏᵢⱼ`, so that
/// `∇_{∂i} ∂j = Σ_k Γᵏᵢⱼ ∂k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordChristoffel {
    pub gamma: [[[f64; 3]; 3]; 3],
}

impl CoordChristoffel {
    pub fn max_abs_diff(&self, other: &CoordChristoffel) -> f64 {
        let mut m: f64 = 0.0;
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    m = m.max((self.gamma[k][i][j] - other.gamma[k][i][j]).abs());
                }
            }
        }
        m
    }

    /// `Σ_ij Γᵏᵢⱼ u^i v^j` for each `k`.
    pub fn contract(&self, u: [f64; 3], v: [f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            for i in 0..3 {
                for j in 0..3 {
                    *o += self.gamma[k][i][j] * u[i] * v[j];
                }
            }
        }
        out
    }
}

fn metric_partials(p: &GroupPoint, a: &Matrix2, h: f64) -> [[[f64; 3]; 3]; 3] {
    // dg[l][i][j] = ∂_l g_ij
    let mut dg = [[[0.0; 3]; 3]; 3];
    let x = p.to_array();
    for (l, d) in dg.iter_mut().enumerate() {
        let mut xp = x;
        let mut xm = x;
        xp[l] += h;
        xm[l] -= h;
        let gp = metric_at(&GroupPoint::from_array(xp), a).g;
        let gm = metric_at(&GroupPoint::from_array(xm), a).g;
        for i in 0..3 {
            for j in 0..3 {
                d[i][j] = (gp[i][j] - gm[i][j]) / (2.0 * h);
            }
        }
    }
    dg
}

fn inverse3(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let mut inv = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            inv[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / det;
        }
    }
    inv
}

fn christoffel_fd_once(p: &GroupPoint, a: &Matrix2, h: f64) -> CoordChristoffel {
    let dg = metric_partials(p, a, h);
    let ginv = inverse3(&metric_at(p, a).g);
    let mut gamma = [[[0.0; 3]; 3]; 3];
    for (k, gk) in gamma.iter_mut().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for l in 0..3 {
                    s += ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                }
                gk[i][j] = 0.5 * s;
            }
        }
    }
    CoordChristoffel { gamma }
}

/// Coordinate Christoffel symbols from central differences of the metric.
///
/// The step is checked by comparing the results at `2h`, `h`, `h/2`: if the
/// finer pair differs by more than the coarser pair, round-off dominates and
/// [`GeomError::StepTooSmall`] is returned.
pub fn christoffel_coords(p: &GroupPoint, a: &Matrix2, h: f64) -> Result<CoordChristoffel> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(GeomError::InvalidArgument(format!("step must be positive, got {h}")));
    }
    let coarse = christoffel_fd_once(p, a, 2.0 * h);
    let mid = christoffel_fd_once(p, a, h);
    let fine = christoffel_fd_once(p, a, 0.5 * h);
    let d_coarse = coarse.max_abs_diff(&mid);
    let d_fine = mid.max_abs_diff(&fine);
    if d_fine > d_coarse && d_fine > 1e-12 {
        return Err(GeomError::StepTooSmall {
            step: h,
            fine: d_fine,
            coarse: d_coarse,
        });
    }
    Ok(mid)
}

/// Coordinate Christoffel symbols obtained by rewriting the frame table in
/// the coordinate basis.
pub fn christoffel_from_frame(p: &GroupPoint, a: &Matrix2) -> CoordChristoffel {
    let table = frame_connection(a);
    // P: coordinate components -> frame components; Q = P^{-1}
    let em = exp_za(a, -p.x3);
    let ep = exp_za(a, p.x3);
    let pm = [
        [em.a11, em.a12, 0.0],
        [em.a21, em.a22, 0.0],
        [0.0, 0.0, 1.0],
    ];
    let qm = [
        [ep.a11, ep.a12, 0.0],
        [ep.a21, ep.a22, 0.0],
        [0.0, 0.0, 1.0],
    ];
    // ∂_{x3} P = -A e^{-x3 A}
    let ar = a.rows();
    let mut dp = [[0.0; 3]; 3];
    for r in 0..2 {
        for c in 0..2 {
            dp[r][c] = -(ar[r][0] * pm[0][c] + ar[r][1] * pm[1][c]);
        }
    }

    let mut gamma = [[[0.0; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            // frame components of ∇_{∂i} ∂j
            let mut f = [0.0; 3];
            if i == 2 {
                for (k, fk) in f.iter_mut().enumerate() {
                    *fk += dp[k][j];
                }
            }
            for m in 0..3 {
                for n in 0..3 {
                    let w = pm[m][i] * pm[n][j];
                    if w == 0.0 {
                        continue;
                    }
                    for (k, fk) in f.iter_mut().enumerate() {
                        *fk += w * table.gamma[m][n][k];
                    }
                }
            }
            for l in 0..3 {
                gamma[l][i][j] = (0..3).map(|k| qm[l][k] * f[k]).sum();
            }
        }
    }
    CoordChristoffel { gamma }
}

/// `∇_T V` along a curve, given the frame components of `V` and of their
/// parameter derivatives.
pub fn covariant_derivative(
    curve_tangent: &FrameVector,
    field: &FrameVector,
    field_rate: &FrameVector,
    a: &Matrix2,
) -> FrameVector {
    field_rate.add(&frame_connection(a).apply(curve_tangent, field))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicState {
    pub point: GroupPoint,
    pub velocity: FrameVector,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSample {
    pub t: f64,
    pub point: GroupPoint,
    pub velocity: FrameVector,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Path {
    pub samples: Vec<PathSample>,
}

impl Path {
    pub fn end(&self) -> Option<&PathSample> {
        self.samples.last()
    }

    /// `max |‖γ'‖ - 1|` over the samples.
    pub fn max_speed_drift(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (s.velocity.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

fn geodesic_rhs(
    table: &FrameConnectionTable,
    a: &Matrix2,
    x: &[f64; 6],
) -> [f64; 6] {
    let e = exp_za(a, x[2]);
    let w = e.apply([x[3], x[4]]);
    let v = FrameVector::new(x[3], x[4], x[5]);
    let acc = table.apply(&v, &v);
    [w[0], w[1], x[5], -acc.v1, -acc.v2, -acc.v3]
}

/// Unit-speed geodesic by classical RK4 on `(x, v)`, with `x` in coordinates
/// and `v` in frame components. Returns `steps + 1` samples.
pub fn geodesic_integrate(
    start: &GeodesicState,
    length: f64,
    steps: usize,
    a: &Matrix2,
) -> Result<Path> {
    if steps < 1 {
        return Err(GeomError::InvalidArgument("steps must be >= 1".into()));
    }
    if !(length > 0.0 && length.is_finite()) {
        return Err(GeomError::InvalidArgument(format!(
            "length must be positive, got {length}"
        )));
    }
    let speed = start.velocity.norm();
    if !(speed > 0.0 && speed.is_finite()) {
        return Err(GeomError::InvalidArgument(
            "initial velocity must be nonzero".into(),
        ));
    }
    let v0 = start.velocity.scale(1.0 / speed);
    let table = frame_connection(a);
    let dt = length / steps as f64;

    let mut x = [
        start.point.x1,
        start.point.x2,
        start.point.x3,
        v0.v1,
        v0.v2,
        v0.v3,
    ];
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(PathSample {
        t: 0.0,
        point: start.point,
        velocity: v0,
    });

    let axpy = |x: &[f64; 6], k: &[f64; 6], s: f64| -> [f64; 6] {
        let mut o = *x;
        for i in 0..6 {
            o[i] += s * k[i];
        }
        o
    };

    for step in 1..=steps {
        let k1 = geodesic_rhs(&table, a, &x);
        let k2 = geodesic_rhs(&table, a, &axpy(&x, &k1, 0.5 * dt));
        let k3 = geodesic_rhs(&table, a, &axpy(&x, &k2, 0.5 * dt));
        let k4 = geodesic_rhs(&table, a, &axpy(&x, &k3, dt));
        for i in 0..6 {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if x.iter().any(|c| !c.is_finite()) {
            return Err(GeomError::GeodesicBlowUp { step });
        }
        samples.push(PathSample {
            t: step as f64 * dt,
            point: GroupPoint::new(x[0], x[1], x[2]),
            velocity: FrameVector::new(x[3], x[4], x[5]),
        });
    }
    Ok(Path { samples })
}

/// Sectional curvature of the plane spanned by `x` and `y` (frame components).
///
/// The metric is left-invariant, so the value does not depend on the base
/// point; it is computed algebraically from the frame table.
pub fn sectional_curvature(a: &Matrix2, x: &FrameVector, y: &FrameVector) -> Result<f64> {
    let gram = x.norm_squared() * y.norm_squared() - x.dot(y).powi(2);
    let scale = x.norm_squared() * y.norm_squared();
    if !(gram > GRAM_EPS * scale.max(1.0)) {
        return Err(GeomError::DegeneratePlane { gram });
    }
    let table = frame_connection(a);
    let r = table.curvature(x, y, y);
    Ok(r.dot(x) / gram)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn table_for_hyperbolic_space() {
        let t = frame_connection(&Matrix2::hyperbolic());
        assert_eq!(t.nabla(0, 0), FrameVector::E3);
        assert_eq!(t.nabla(0, 2), FrameVector::new(-1.0, -0.0, 0.0));
    }

    #[test]
    fn table_vanishes_for_zero_matrix() {
        let t = frame_connection(&Matrix2::zero());
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(t.nabla(i, j).norm(), 0.0);
            }
        }
    }

    #[test]
    fn e3_is_autoparallel_and_table_is_skew() {
        let a = Matrix2::new(0.4, -1.3, 0.7, 2.0).unwrap();
        let t = frame_connection(&a);
        assert_eq!(t.nabla(2, 2), FrameVector::default());
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert_eq!(t.gamma[i][j][k], -t.gamma[i][k][j]);
                }
            }
        }
    }

    #[test]
    fn covariant_derivative_examples() {
        let a = Matrix2::new(0.4, -1.3, 0.7, 2.0).unwrap();
        let zero = FrameVector::default();
        let d = covariant_derivative(&FrameVector::E3, &FrameVector::E3, &zero, &a);
        assert_eq!(d, zero);
        let v = FrameVector::new(0.3, 1.0, -2.0);
        let d = covariant_derivative(&FrameVector::new(1.0, 2.0, 3.0), &v, &zero, &Matrix2::zero());
        assert_eq!(d.norm(), 0.0);
        let d = covariant_derivative(&FrameVector::E1, &FrameVector::E2, &zero, &Matrix2::hyperbolic());
        assert_eq!(d.norm(), 0.0);
    }

    #[test]
    fn christoffel_zero_matrix() {
        let c = christoffel_coords(&GroupPoint::new(1.0, 2.0, 3.0), &Matrix2::zero(), 1e-4).unwrap();
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    assert!(c.gamma[k][i][j].abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn christoffel_fd_matches_frame_for_hyperbolic() {
        let p = GroupPoint::new(0.2, -0.1, 0.0);
        let a = Matrix2::hyperbolic();
        let fd = christoffel_coords(&p, &a, 1e-4).unwrap();
        let an = christoffel_from_frame(&p, &a);
        assert!(fd.max_abs_diff(&an) < 1e-6);
    }

    #[test]
    fn christoffel_tiny_step_is_rejected() {
        let a = Matrix2::new(0.4, -1.3, 0.7, 2.0).unwrap();
        let r = christoffel_coords(&GroupPoint::new(0.0, 0.0, 0.5), &a, 1e-12);
        assert!(matches!(r, Err(GeomError::StepTooSmall { .. })));
        assert!(christoffel_coords(&GroupPoint::ORIGIN, &a, 0.0).is_err());
    }

    #[test]
    fn geodesic_flat_is_straight_line() {
        let start = GeodesicState {
            point: GroupPoint::new(1.0, -2.0, 0.5),
            velocity: FrameVector::new(0.6, 0.0, 0.8),
        };
        let path = geodesic_integrate(&start, 2.0, 50, &Matrix2::zero()).unwrap();
        for s in &path.samples {
            assert!((s.point.x1 - (1.0 + 0.6 * s.t)).abs() < 1e-12);
            assert!((s.point.x2 + 2.0).abs() < 1e-12);
            assert!((s.point.x3 - (0.5 + 0.8 * s.t)).abs() < 1e-12);
        }
    }

    #[test]
    fn vertical_axis_is_a_geodesic() {
        let a = Matrix2::new(0.4, -1.3, 0.7, 2.0).unwrap();
        let start = GeodesicState {
            point: GroupPoint::ORIGIN,
            velocity: FrameVector::E3,
        };
        let path = geodesic_integrate(&start, 3.0, 30, &a).unwrap();
        for s in &path.samples {
            assert_eq!(s.point.x1, 0.0);
            assert_eq!(s.point.x2, 0.0);
            assert_relative_eq!(s.point.x3, s.t, epsilon = 1e-14);
        }
    }

    #[test]
    fn geodesic_argument_errors() {
        let a = Matrix2::hyperbolic();
        let s = GeodesicState {
            point: GroupPoint::ORIGIN,
            velocity: FrameVector::E1,
        };
        assert!(geodesic_integrate(&s, 1.0, 0, &a).is_err());
        assert!(geodesic_integrate(&s, -1.0, 10, &a).is_err());
        let z = GeodesicState {
            point: GroupPoint::ORIGIN,
            velocity: FrameVector::default(),
        };
        assert!(geodesic_integrate(&z, 1.0, 10, &a).is_err());
    }

    #[test]
    fn geodesic_blow_up_is_reported() {
        // e^{x3 A} overflows long before x3 reaches 1e3 with a large trace
        let a = Matrix2::new(400.0, 0.0, 0.0, 400.0).unwrap();
        let s = GeodesicState {
            point: GroupPoint::ORIGIN,
            velocity: FrameVector::new(1e-3, 0.0, 1.0),
        };
        let r = geodesic_integrate(&s, 10.0, 100, &a);
        assert!(matches!(r, Err(GeomError::GeodesicBlowUp { .. })), "{r:?}");
    }

    #[test]
    fn curvature_examples() {
        let x = FrameVector::new(0.3, -1.0, 0.5);
        let y = FrameVector::new(1.0, 0.2, -0.7);
        let k = sectional_curvature(&Matrix2::hyperbolic(), &x, &y).unwrap();
        assert!((k + 1.0).abs() < 1e-9);
        let k = sectional_curvature(&Matrix2::constant_curvature(0.5).unwrap(), &x, &y).unwrap();
        assert!((k + 1.0).abs() < 1e-9);
        let k = sectional_curvature(&Matrix2::zero(), &x, &y).unwrap();
        assert!(k.abs() < 1e-12);
        // symmetric off-diagonal part: eigenvalues 1.5 and 0.5
        let sym = Matrix2::new(1.0, 0.5, 0.5, 1.0).unwrap();
        let k12 = sectional_curvature(&sym, &FrameVector::E1, &FrameVector::E2).unwrap();
        let k13 = sectional_curvature(&sym, &FrameVector::E1, &FrameVector::E3).unwrap();
        assert_relative_eq!(k12, -0.75, epsilon = 1e-14);
        assert_relative_eq!(k13, -1.25, epsilon = 1e-14);
        assert!(sectional_curvature(&Matrix2::hyperbolic(), &x, &x.scale(2.0)).is_err());
    }

    #[test]
    fn nil3_curvatures() {
        // E1 spans the center here: planes containing it have K = 1/4, the
        // orthogonal plane has K = -3/4
        let n = Matrix2::nil3();
        let k12 = sectional_curvature(&n, &FrameVector::E1, &FrameVector::E2).unwrap();
        let k13 = sectional_curvature(&n, &FrameVector::E1, &FrameVector::E3).unwrap();
        let k23 = sectional_curvature(&n, &FrameVector::E2, &FrameVector::E3).unwrap();
        assert_relative_eq!(k12, 0.25, epsilon = 1e-14);
        assert_relative_eq!(k13, 0.25, epsilon = 1e-14);
        assert_relative_eq!(k23, -0.75, epsilon = 1e-14);
    }
}
