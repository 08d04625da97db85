//! Parameterized surfaces with closed-form first derivatives, and
//! finite-difference evaluation of the conformal-jet identities on them.

use num_complex::Complex64;

use crate::error::Result;
use crate::group::{GroupPoint, Matrix2};
use crate::surface::jet::{coord_to_frame_complex, tension_from_coords, ConformalJet};

/// A smooth map `(u, v) -> x` into group coordinates with exact first
/// derivatives.
pub trait Immersion {
    fn position(&self, u: f64, v: f64) -> GroupPoint;
    fn du(&self, u: f64, v: f64) -> [f64; 3];
    fn dv(&self, u: f64, v: f64) -> [f64; 3];
}

/// Round sphere of radius `r` in ℝ³ (`A = 0`) in Mercator coordinates:
/// `r (sech v cos u, sech v sin u, tanh v)`. Conformal; `f_u × f_v` points
/// outward, so `H = -1/r` with respect to the jet normal.
#[derive(Debug, Clone, Copy)]
pub struct MercatorSphere {
    pub r: f64,
}

impl MercatorSphere {
    pub fn mean_curvature(&self) -> f64 {
        -1.0 / self.r
    }
}

impl Immersion for MercatorSphere {
    fn position(&self, u: f64, v: f64) -> GroupPoint {
        let s = 1.0 / v.cosh();
        GroupPoint::new(self.r * s * u.cos(), self.r * s * u.sin(), self.r * v.tanh())
    }
    fn du(&self, u: f64, v: f64) -> [f64; 3] {
        let s = 1.0 / v.cosh();
        [-self.r * s * u.sin(), self.r * s * u.cos(), 0.0]
    }
    fn dv(&self, u: f64, v: f64) -> [f64; 3] {
        let s = 1.0 / v.cosh();
        let t = v.tanh();
        [-self.r * s * t * u.cos(), -self.r * s * t * u.sin(), self.r * s * s]
    }
}

/// Catenoid in ℝ³ about the `x2` axis: `(cosh v cos u, v, cosh v sin u)`.
/// Conformal and minimal.
#[derive(Debug, Clone, Copy)]
pub struct HorizontalCatenoid;

impl Immersion for HorizontalCatenoid {
    fn position(&self, u: f64, v: f64) -> GroupPoint {
        GroupPoint::new(v.cosh() * u.cos(), v, v.cosh() * u.sin())
    }
    fn du(&self, u: f64, v: f64) -> [f64; 3] {
        [-v.cosh() * u.sin(), 0.0, v.cosh() * u.cos()]
    }
    fn dv(&self, u: f64, v: f64) -> [f64; 3] {
        [v.sinh() * u.cos(), 1.0, v.sinh() * u.sin()]
    }
}

/// Geodesic sphere of ℍ³ (`A = I`). With `y = e^{x3}` the metric is the
/// upper half-space metric, and this is the Euclidean sphere of radius `rho`
/// centered at height `y0 > rho`, in Mercator coordinates. Its mean curvature
/// is `y0/rho` toward the inside, so `-y0/rho` for the jet normal.
#[derive(Debug, Clone, Copy)]
pub struct HalfSpaceSphere {
    pub y0: f64,
    pub rho: f64,
}

impl HalfSpaceSphere {
    pub fn mean_curvature(&self) -> f64 {
        -self.y0 / self.rho
    }

    fn euclid(&self) -> MercatorSphere {
        MercatorSphere { r: self.rho }
    }
}

impl Immersion for HalfSpaceSphere {
    fn position(&self, u: f64, v: f64) -> GroupPoint {
        let p = self.euclid().position(u, v);
        GroupPoint::new(p.x1, p.x2, (self.y0 + p.x3).ln())
    }
    fn du(&self, u: f64, v: f64) -> [f64; 3] {
        let y = self.y0 + self.euclid().position(u, v).x3;
        let d = self.euclid().du(u, v);
        [d[0], d[1], d[2] / y]
    }
    fn dv(&self, u: f64, v: f64) -> [f64; 3] {
        let y = self.y0 + self.euclid().position(u, v).x3;
        let d = self.euclid().dv(u, v);
        [d[0], d[1], d[2] / y]
    }
}

/// A non-conformal test immersion
/// `(u + α sin v, v + α cos u, β + γ sin(u + 2v))`.
#[derive(Debug, Clone, Copy)]
pub struct WavyPatch {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Immersion for WavyPatch {
    fn position(&self, u: f64, v: f64) -> GroupPoint {
        GroupPoint::new(
            u + self.alpha * v.sin(),
            v + self.alpha * u.cos(),
            self.beta + self.gamma * (u + 2.0 * v).sin(),
        )
    }
    fn du(&self, u: f64, v: f64) -> [f64; 3] {
        [1.0, -self.alpha * u.sin(), self.gamma * (u + 2.0 * v).cos()]
    }
    fn dv(&self, u: f64, v: f64) -> [f64; 3] {
        [self.alpha * v.cos(), 1.0, 2.0 * self.gamma * (u + 2.0 * v).cos()]
    }
}

/// Coordinate components of `f_z = (f_u - i f_v) / 2`.
pub fn coord_fz(s: &dyn Immersion, u: f64, v: f64) -> [Complex64; 3] {
    let du = s.du(u, v);
    let dv = s.dv(u, v);
    [0, 1, 2].map(|k| Complex64::new(0.5 * du[k], -0.5 * dv[k]))
}

/// Frame coefficients `(A1, A2, A3)` of `f_z`.
pub fn frame_coefficients(s: &dyn Immersion, a: &Matrix2, u: f64, v: f64) -> [Complex64; 3] {
    coord_to_frame_complex(coord_fz(s, u, v), &s.position(u, v), a)
}

/// Jet at `(u, v)` with the normal of the parameterization.
pub fn jet_at(s: &dyn Immersion, a: &Matrix2, u: f64, v: f64) -> Result<ConformalJet> {
    ConformalJet::from_isotropic(s.position(u, v), frame_coefficients(s, a, u, v))
}

/// `∂_z̄ A3 = (∂_u A3 + i ∂_v A3) / 2` by central differences of step `h`.
pub fn a3_zbar_fd(s: &dyn Immersion, a: &Matrix2, u: f64, v: f64, h: f64) -> Complex64 {
    let a3 = |u: f64, v: f64| frame_coefficients(s, a, u, v)[2];
    let d_u = (a3(u + h, v) - a3(u - h, v)) / (2.0 * h);
    let d_v = (a3(u, v + h) - a3(u, v - h)) / (2.0 * h);
    0.5 * (d_u + Complex64::i() * d_v)
}

/// Frame components of `∇_{f_z̄} f_z`, with `f_{zz̄} = (f_uu + f_vv) / 4`
/// from central differences of the exact first derivatives.
pub fn tension_fd(s: &dyn Immersion, a: &Matrix2, u: f64, v: f64, h: f64) -> [Complex64; 3] {
    let fuu = {
        let (p, m) = (s.du(u + h, v), s.du(u - h, v));
        [0, 1, 2].map(|k| (p[k] - m[k]) / (2.0 * h))
    };
    let fvv = {
        let (p, m) = (s.dv(u, v + h), s.dv(u, v - h));
        [0, 1, 2].map(|k| (p[k] - m[k]) / (2.0 * h))
    };
    let fzzbar = [0, 1, 2].map(|k| Complex64::new(0.25 * (fuu[k] + fvv[k]), 0.0));
    tension_from_coords(&s.position(u, v), coord_fz(s, u, v), fzzbar, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::jet::{a3_zbar_rhs, conformal_defect, mean_curvature_from_jet};

    fn fd_du(s: &dyn Immersion, u: f64, v: f64) -> [f64; 3] {
        let h = 1e-6;
        let (p, m) = (s.position(u + h, v), s.position(u - h, v));
        [(p.x1 - m.x1) / (2.0 * h), (p.x2 - m.x2) / (2.0 * h), (p.x3 - m.x3) / (2.0 * h)]
    }

    fn fd_dv(s: &dyn Immersion, u: f64, v: f64) -> [f64; 3] {
        let h = 1e-6;
        let (p, m) = (s.position(u, v + h), s.position(u, v - h));
        [(p.x1 - m.x1) / (2.0 * h), (p.x2 - m.x2) / (2.0 * h), (p.x3 - m.x3) / (2.0 * h)]
    }

    #[test]
    fn derivatives_match_positions() {
        let surfaces: [&dyn Immersion; 4] = [
            &MercatorSphere { r: 2.0 },
            &HorizontalCatenoid,
            &HalfSpaceSphere { y0: 3.0, rho: 1.5 },
            &WavyPatch { alpha: 0.3, beta: 0.5, gamma: 0.2 },
        ];
        for s in surfaces {
            for (u, v) in [(0.3, -0.4), (1.7, 0.9)] {
                let (a, b) = (s.du(u, v), fd_du(s, u, v));
                let (c, d) = (s.dv(u, v), fd_dv(s, u, v));
                for k in 0..3 {
                    assert!((a[k] - b[k]).abs() < 1e-8);
                    assert!((c[k] - d[k]).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn test_surfaces_are_conformal_with_known_curvature() {
        let cases: [(&dyn Immersion, Matrix2, f64); 3] = [
            (&MercatorSphere { r: 2.0 }, Matrix2::zero(), -0.5),
            (&HorizontalCatenoid, Matrix2::zero(), 0.0),
            (&HalfSpaceSphere { y0: 3.0, rho: 1.5 }, Matrix2::hyperbolic(), -2.0),
        ];
        for (s, a, h) in cases {
            let (u, v) = (0.7, 0.3);
            let jet = jet_at(s, &a, u, v).unwrap();
            assert!(conformal_defect(&jet) < 1e-14 * jet.lambda.max(1.0));
            let got = mean_curvature_from_jet(&jet, tension_fd(s, &a, u, v, 1e-5)).unwrap();
            assert!((got - h).abs() < 1e-8, "{got} vs {h}");
            let fd = a3_zbar_fd(s, &a, u, v, 1e-4);
            let rhs = a3_zbar_rhs(&jet, h, &a);
            assert!((fd - rhs).norm() < 1e-7 * rhs.norm().max(1.0));
        }
    }
}
