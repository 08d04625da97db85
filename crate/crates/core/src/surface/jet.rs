//! First-order data of a conformal immersion at a point.
//!
//! With `z` a conformal parameter and `f_z = A1 E1 + A2 E2 + A3 E3`, the
//! triple `(A1, A2, A3)` is isotropic (`A1² + A2² + A3² = 0`) and the induced
//! metric is `2λ|dz|²` with `λ = |A1|² + |A2|² + |A3|²`.

use num_complex::Complex64;

use crate::error::{GeomError, Result};
use crate::geometry::christoffel_from_frame;
use crate::group::{exp_za, FrameVector, GroupPoint, Matrix2};

/// Smallest `λ` accepted before a parameterization is called degenerate.
pub const LAMBDA_EPS: f64 = 1e-14;

/// Default tolerance on the conformality defect of synthetic jets.
pub const DEFAULT_DEFECT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalJet {
    pub point: GroupPoint,
    pub a1: Complex64,
    pub a2: Complex64,
    pub a3: Complex64,
    /// Unit normal in frame components. Stored rather than derived so that
    /// inconsistent data can be represented and caught by [`ConformalJet::validate`].
    pub normal: FrameVector,
    pub lambda: f64,
}

impl ConformalJet {
    pub fn new(point: GroupPoint, a: [Complex64; 3], normal: FrameVector) -> Result<Self> {
        let lambda = a.iter().map(|c| c.norm_sqr()).sum::<f64>();
        if !(lambda > LAMBDA_EPS) || !lambda.is_finite() {
            return Err(GeomError::DegenerateJet(lambda));
        }
        Ok(Self {
            point,
            a1: a[0],
            a2: a[1],
            a3: a[2],
            normal,
            lambda,
        })
    }

    /// Builds the jet with the normal `f_x × f_y / |f_x × f_y|`, where
    /// `f_x = 2 Re f_z` and `f_y = -2 Im f_z`.
    pub fn from_isotropic(point: GroupPoint, a: [Complex64; 3]) -> Result<Self> {
        let re = FrameVector::new(a[0].re, a[1].re, a[2].re);
        let im = FrameVector::new(a[0].im, a[1].im, a[2].im);
        let n = im.cross(&re);
        let len = n.norm();
        if !(len > LAMBDA_EPS) {
            return Err(GeomError::DegenerateJet(len));
        }
        Self::new(point, a, n.scale(1.0 / len))
    }

    pub fn components(&self) -> [Complex64; 3] {
        [self.a1, self.a2, self.a3]
    }

    /// `N3 = <N, E3>`.
    pub fn n3(&self) -> f64 {
        self.normal.v3
    }

    pub fn real_part(&self) -> FrameVector {
        FrameVector::new(self.a1.re, self.a2.re, self.a3.re)
    }

    pub fn imag_part(&self) -> FrameVector {
        FrameVector::new(self.a1.im, self.a2.im, self.a3.im)
    }

    /// Checks conformality, unit normal and orthogonality of the normal to
    /// `Re f_z` and `Im f_z`.
    pub fn validate(&self, defect_tol: f64) -> Result<()> {
        let defect = conformal_defect(self);
        if defect > defect_tol * self.lambda.max(1.0) {
            return Err(GeomError::Precondition(format!(
                "conformality defect {defect:e} exceeds {defect_tol:e}"
            )));
        }
        if (self.normal.norm() - 1.0).abs() > 1e-12 {
            return Err(GeomError::Precondition(format!(
                "normal has length {}",
                self.normal.norm()
            )));
        }
        let scale = self.lambda.sqrt();
        let d_re = self.normal.dot(&self.real_part()).abs();
        let d_im = self.normal.dot(&self.imag_part()).abs();
        if d_re.max(d_im) > 1e-10 * scale.max(1.0) {
            return Err(GeomError::Precondition(format!(
                "normal is not orthogonal to f_z (residual {:e})",
                d_re.max(d_im)
            )));
        }
        Ok(())
    }
}

/// `|A1² + A2² + A3²|`.
pub fn conformal_defect(jet: &ConformalJet) -> f64 {
    (jet.a1 * jet.a1 + jet.a2 * jet.a2 + jet.a3 * jet.a3).norm()
}

/// `A1 conj(A2) + conj(A1) A2`, which is real.
pub fn mixed_term(jet: &ConformalJet) -> f64 {
    2.0 * (jet.a1 * jet.a2.conj()).re
}

/// The part of `A_{3 z̄}` contributed by `<∇_{f_z̄} E3, f_z>`:
/// `-a|A1|² - d|A2|² - ((b+c)/2)(A1 conj(A2) + conj(A1) A2)`.
fn frame_drift(jet: &ConformalJet, a: &Matrix2) -> f64 {
    -a.a() * jet.a1.norm_sqr() - a.d() * jet.a2.norm_sqr() - a.sym_offdiag() * mixed_term(jet)
}

/// Closed form of `A_{3 z̄}` on a surface of mean curvature `h`.
pub fn a3_zbar_rhs(jet: &ConformalJet, h: f64, a: &Matrix2) -> Complex64 {
    Complex64::new(frame_drift(jet, a) + h * jet.n3() * jet.lambda, 0.0)
}

/// `A_{3 z̄}` for an arbitrary immersion: the term `H N3 λ` is replaced by
/// `<∇_{f_z̄} f_z, E3>`, supplied as `tension_e3`.
pub fn a3_zbar_rhs_general(jet: &ConformalJet, tension_e3: Complex64, a: &Matrix2) -> Complex64 {
    Complex64::new(frame_drift(jet, a), 0.0) + tension_e3
}

/// `H = <∇_{f_z̄} f_z, N> / λ`, with `tension` the frame components of
/// `∇_{f_z̄} f_z`.
pub fn mean_curvature_from_jet(jet: &ConformalJet, tension: [Complex64; 3]) -> Result<f64> {
    if !(jet.lambda > LAMBDA_EPS) {
        return Err(GeomError::DegenerateJet(jet.lambda));
    }
    let n = jet.normal.to_array();
    let proj: Complex64 = tension.iter().zip(n.iter()).map(|(t, &ni)| *t * ni).sum();
    Ok(proj.re / jet.lambda)
}

/// Frame components of a complex coordinate vector at `p`.
pub fn coord_to_frame_complex(w: [Complex64; 3], p: &GroupPoint, a: &Matrix2) -> [Complex64; 3] {
    let m = exp_za(a, -p.x3);
    [
        w[0] * m.a11 + w[1] * m.a12,
        w[0] * m.a21 + w[1] * m.a22,
        w[2],
    ]
}

/// Frame components of `∇_{f_z̄} f_z`, from the coordinate derivatives
/// `f_z` and `f_{z z̄}` of an immersion at `p`.
pub fn tension_from_coords(
    p: &GroupPoint,
    f_z: [Complex64; 3],
    f_zzbar: [Complex64; 3],
    a: &Matrix2,
) -> [Complex64; 3] {
    let gamma = christoffel_from_frame(p, a).gamma;
    let mut t = f_zzbar;
    for (k, tk) in t.iter_mut().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                *tk += gamma[k][i][j] * f_z[i].conj() * f_z[j];
            }
        }
    }
    coord_to_frame_complex(t, p, a)
}
