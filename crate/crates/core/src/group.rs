//! The Lie group ℝ² ⋊_A ℝ.
//!
//! Points are `(x1, x2, x3)` with `(x1, x2)` in the normal ℝ² factor and
//! `x3` in the ℝ factor. The product is
//!
//! ```text
//! (p, z) * (q, w) = (p + e^{zA} q, z + w)
//! ```
//!
//! and the canonical metric is the one making the left-invariant frame
//! `E1 = a11(x3) ∂1 + a21(x3) ∂2`, `E2 = a12(x3) ∂1 + a22(x3) ∂2`, `E3 = ∂3`
//! orthonormal, where `a_ij(x3)` are the entries of `e^{x3 A}`.

use crate::error::{GeomError, Result};

/// Below this value of the characteristic discriminant the two eigenvalues
/// of `zA` are treated as equal.
pub const DISCRIMINANT_EPS: f64 = 1e-12;

/// Tolerance on `trace(A)` for the unimodular flag.
pub const UNIMODULAR_EPS: f64 = 1e-14;

/// Experiment configs warn when `|x3 * trace(A)|` exceeds this; beyond it the
/// metric determinant `e^{-2 x3 tr A}` leaves the comfortable f64 range.
pub const HEIGHT_WARN: f64 = 30.0;

/// The 2×2 matrix `A = [[a, b], [c, d]]` defining the group and its metric.
///
/// Construction enforces `trace(A) >= 0` by replacing `A` with `-A` when
/// needed; [`Matrix2::was_negated`] reports whether that happened.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2 {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    negated: bool,
}

impl Matrix2 {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite() && d.is_finite()) {
            return Err(GeomError::NonFinite("matrix entry"));
        }
        if a + d < 0.0 {
            Ok(Self {
                a: -a,
                b: -b,
                c: -c,
                d: -d,
                negated: true,
            })
        } else {
            Ok(Self {
                a,
                b,
                c,
                d,
                negated: false,
            })
        }
    }

    /// Row-major `[[a, b], [c, d]]`.
    pub fn from_rows(rows: [[f64; 2]; 2]) -> Result<Self> {
        Self::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1])
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0).unwrap()
    }

    /// `[[0, 1], [0, 0]]`: the Heisenberg group Nil₃.
    pub fn nil3() -> Self {
        Self::new(0.0, 1.0, 0.0, 0.0).unwrap()
    }

    /// The identity matrix: hyperbolic space ℍ³.
    pub fn hyperbolic() -> Self {
        Self::new(1.0, 0.0, 0.0, 1.0).unwrap()
    }

    /// `[[1, -b], [b, 1]]`, a metric of constant sectional curvature -1 for
    /// every `b >= 0`. The skew part only rotates the frame along `E3`.
    ///
    /// The symmetric matrix `[[1, b], [b, 1]]` is not in this family for
    /// `b != 0`: its eigenvalues `1 ± b` give curvatures between `-(1+b)²`
    /// and `-(1-b)²`.
    pub fn constant_curvature(b: f64) -> Result<Self> {
        Self::new(1.0, -b, b, 1.0)
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// True when the input had negative trace and was replaced by its negative.
    pub fn was_negated(&self) -> bool {
        self.negated
    }

    pub fn rows(&self) -> [[f64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }

    /// Half of the off-diagonal sum, `(b + c) / 2`; appears throughout the
    /// connection table.
    pub fn sym_offdiag(&self) -> f64 {
        0.5 * (self.b + self.c)
    }
}

/// The matrix `e^{zA}` together with its parameter `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpAz {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
    pub z: f64,
}

impl ExpAz {
    pub fn identity() -> Self {
        Self {
            a11: 1.0,
            a12: 0.0,
            a21: 0.0,
            a22: 1.0,
            z: 0.0,
        }
    }

    pub fn rows(&self) -> [[f64; 2]; 2] {
        [[self.a11, self.a12], [self.a21, self.a22]]
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.a11 * v[0] + self.a12 * v[1],
            self.a21 * v[0] + self.a22 * v[1],
        ]
    }

    pub fn apply_transpose(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.a11 * v[0] + self.a21 * v[1],
            self.a12 * v[0] + self.a22 * v[1],
        ]
    }

    /// Matrix product; the parameters add.
    pub fn compose(&self, other: &ExpAz) -> ExpAz {
        ExpAz {
            a11: self.a11 * other.a11 + self.a12 * other.a21,
            a12: self.a11 * other.a12 + self.a12 * other.a22,
            a21: self.a21 * other.a11 + self.a22 * other.a21,
            a22: self.a21 * other.a12 + self.a22 * other.a22,
            z: self.z + other.z,
        }
    }
}

/// `e^{zA}` in closed form.
///
/// Writing `zA = m I + B` with `m = z tr(A) / 2` and `B` traceless, `B² = q I`
/// where `q = disc / 4` is a quarter of the discriminant of the characteristic
/// polynomial. Then `e^{zA} = e^m (C(q) I + S(q) B)` with
/// `C = cosh √q`, `S = sinh √q / √q` for `q > 0`, the trigonometric versions for
/// `q < 0`, and their Taylor expansions when the discriminant is below
/// [`DISCRIMINANT_EPS`].
pub fn exp_za(a: &Matrix2, z: f64) -> ExpAz {
    let m = 0.5 * z * a.trace();
    let p = 0.5 * z * (a.a - a.d);
    let bz = z * a.b;
    let cz = z * a.c;
    let q = p * p + bz * cz;

    let (ch, sh) = if 4.0 * q.abs() <= DISCRIMINANT_EPS {
        // repeated eigenvalue, including nilpotent and scalar A
        (1.0 + q / 2.0 + q * q / 24.0, 1.0 + q / 6.0 + q * q / 120.0)
    } else if q > 0.0 {
        let s = q.sqrt();
        (s.cosh(), s.sinh() / s)
    } else {
        let w = (-q).sqrt();
        (w.cos(), w.sin() / w)
    };

    let em = m.exp();
    ExpAz {
        a11: em * (ch + sh * p),
        a12: em * sh * bz,
        a21: em * sh * cz,
        a22: em * (ch - sh * p),
        z,
    }
}

/// A point `(x1, x2, x3)` of the group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupPoint {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl GroupPoint {
    pub const ORIGIN: GroupPoint = GroupPoint {
        x1: 0.0,
        x2: 0.0,
        x3: 0.0,
    };

    pub fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Self { x1, x2, x3 }
    }

    pub fn try_new(x1: f64, x2: f64, x3: f64) -> Result<Self> {
        if x1.is_finite() && x2.is_finite() && x3.is_finite() {
            Ok(Self { x1, x2, x3 })
        } else {
            Err(GeomError::NonFinite("group point coordinate"))
        }
    }

    pub fn from_array(x: [f64; 3]) -> Self {
        Self::new(x[0], x[1], x[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    pub fn planar(self) -> [f64; 2] {
        [self.x1, self.x2]
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.x3.is_finite()
    }
}

/// Tangent vector in the orthonormal left-invariant frame `{E1, E2, E3}`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FrameVector {
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
}

impl FrameVector {
    pub const E1: FrameVector = FrameVector {
        v1: 1.0,
        v2: 0.0,
        v3: 0.0,
    };
    pub const E2: FrameVector = FrameVector {
        v1: 0.0,
        v2: 1.0,
        v3: 0.0,
    };
    pub const E3: FrameVector = FrameVector {
        v1: 0.0,
        v2: 0.0,
        v3: 1.0,
    };

    pub fn new(v1: f64, v2: f64, v3: f64) -> Self {
        Self { v1, v2, v3 }
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.v1, self.v2, self.v3]
    }

    pub fn dot(&self, o: &FrameVector) -> f64 {
        self.v1 * o.v1 + self.v2 * o.v2 + self.v3 * o.v3
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn cross(&self, o: &FrameVector) -> FrameVector {
        FrameVector::new(
            self.v2 * o.v3 - self.v3 * o.v2,
            self.v3 * o.v1 - self.v1 * o.v3,
            self.v1 * o.v2 - self.v2 * o.v1,
        )
    }

    pub fn scale(&self, s: f64) -> FrameVector {
        FrameVector::new(s * self.v1, s * self.v2, s * self.v3)
    }

    pub fn add(&self, o: &FrameVector) -> FrameVector {
        FrameVector::new(self.v1 + o.v1, self.v2 + o.v2, self.v3 + o.v3)
    }

    pub fn sub(&self, o: &FrameVector) -> FrameVector {
        FrameVector::new(self.v1 - o.v1, self.v2 - o.v2, self.v3 - o.v3)
    }
}

/// Tangent vector in the coordinate basis `{∂x1, ∂x2, ∂x3}`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoordVector {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
}

impl CoordVector {
    pub fn new(w1: f64, w2: f64, w3: f64) -> Self {
        Self { w1, w2, w3 }
    }

    pub fn from_array(w: [f64; 3]) -> Self {
        Self::new(w[0], w[1], w[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.w1, self.w2, self.w3]
    }
}

/// Inner products of the coordinate basis vectors at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricTensor {
    pub g: [[f64; 3]; 3],
}

impl MetricTensor {
    pub fn inner(&self, u: &CoordVector, v: &CoordVector) -> f64 {
        let u = u.to_array();
        let v = v.to_array();
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += u[i] * self.g[i][j] * v[j];
            }
        }
        s
    }

    pub fn norm(&self, u: &CoordVector) -> f64 {
        self.inner(u, u).sqrt()
    }

    pub fn det(&self) -> f64 {
        let g = &self.g;
        g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1])
            - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
            + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0])
    }
}

/// `p * q`.
pub fn multiply(p: &GroupPoint, q: &GroupPoint, a: &Matrix2) -> GroupPoint {
    let e = exp_za(a, p.x3);
    let w = e.apply(q.planar());
    GroupPoint::new(p.x1 + w[0], p.x2 + w[1], p.x3 + q.x3)
}

pub fn inverse(p: &GroupPoint, a: &Matrix2) -> GroupPoint {
    let e = exp_za(a, -p.x3);
    let w = e.apply(p.planar());
    GroupPoint::new(-w[0], -w[1], -p.x3)
}

/// The rotation `(x1, x2, x3) -> (-x1, -x2, x3)`, an isometry for every `A`.
pub fn rotate_half_turn(p: &GroupPoint) -> GroupPoint {
    GroupPoint::new(-p.x1, -p.x2, p.x3)
}

/// Left-invariant frame `(E1, E2, E3)` at `p`, in coordinates.
pub fn left_frame_at(p: &GroupPoint, a: &Matrix2) -> [CoordVector; 3] {
    let e = exp_za(a, p.x3);
    [
        CoordVector::new(e.a11, e.a21, 0.0),
        CoordVector::new(e.a12, e.a22, 0.0),
        CoordVector::new(0.0, 0.0, 1.0),
    ]
}

/// Right-invariant frame `(F1, F2, F3)` at `p`, in coordinates.
pub fn right_frame_at(p: &GroupPoint, a: &Matrix2) -> [CoordVector; 3] {
    let w = a.apply(p.planar());
    [
        CoordVector::new(1.0, 0.0, 0.0),
        CoordVector::new(0.0, 1.0, 0.0),
        CoordVector::new(w[0], w[1], 1.0),
    ]
}

/// Upper-left block `(e^{-x3 A})ᵀ e^{-x3 A}` of the metric at height `x3`.
pub fn planar_metric(x3: f64, a: &Matrix2) -> [[f64; 2]; 2] {
    let m = exp_za(a, -x3);
    let g11 = m.a11 * m.a11 + m.a21 * m.a21;
    let g12 = m.a11 * m.a12 + m.a21 * m.a22;
    let g22 = m.a12 * m.a12 + m.a22 * m.a22;
    [[g11, g12], [g12, g22]]
}

/// Derivative in `x3` of [`planar_metric`]: `-Mᵀ(A + Aᵀ)M` with `M = e^{-x3 A}`.
pub fn planar_metric_dx3(x3: f64, a: &Matrix2) -> [[f64; 2]; 2] {
    let m = exp_za(a, -x3);
    let s = [[2.0 * a.a, a.b + a.c], [a.b + a.c, 2.0 * a.d]];
    let mr = m.rows();
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = 0.0;
            for k in 0..2 {
                for l in 0..2 {
                    acc += mr[k][i] * s[k][l] * mr[l][j];
                }
            }
            out[i][j] = -acc;
        }
    }
    out
}

pub fn metric_at(p: &GroupPoint, a: &Matrix2) -> MetricTensor {
    let h = planar_metric(p.x3, a);
    MetricTensor {
        g: [
            [h[0][0], h[0][1], 0.0],
            [h[1][0], h[1][1], 0.0],
            [0.0, 0.0, 1.0],
        ],
    }
}

pub fn coord_to_frame(v: &CoordVector, p: &GroupPoint, a: &Matrix2) -> FrameVector {
    let m = exp_za(a, -p.x3);
    let w = m.apply([v.w1, v.w2]);
    FrameVector::new(w[0], w[1], v.w3)
}

pub fn frame_to_coord(v: &FrameVector, p: &GroupPoint, a: &Matrix2) -> CoordVector {
    let e = exp_za(a, p.x3);
    let w = e.apply([v.v1, v.v2]);
    CoordVector::new(w[0], w[1], v.v3)
}

/// Differential of left translation by `g`; identical at every point:
/// block-diagonal `(e^{g.x3 A}, 1)`.
pub fn left_translation_differential(g: &GroupPoint, a: &Matrix2) -> [[f64; 3]; 3] {
    let e = exp_za(a, g.x3);
    [
        [e.a11, e.a12, 0.0],
        [e.a21, e.a22, 0.0],
        [0.0, 0.0, 1.0],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupConstants {
    /// `trace(A) / 2`: mean curvature of the leaves and the critical value H₀.
    pub h0: f64,
    pub unimodular: bool,
    pub trace: f64,
}

pub fn group_constants(a: &Matrix2) -> GroupConstants {
    let trace = a.trace();
    GroupConstants {
        h0: 0.5 * trace,
        unimodular: trace.abs() <= UNIMODULAR_EPS,
        trace,
    }
}

/// True when `|x3 * trace(A)|` exceeds [`HEIGHT_WARN`].
pub fn height_out_of_range(x3: f64, a: &Matrix2) -> bool {
    (x3 * a.trace()).abs() > HEIGHT_WARN
}
