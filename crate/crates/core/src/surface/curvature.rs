//! Discrete mean curvature from the first variation of area.

use crate::error::{GeomError, Result};
use crate::group::{coord_to_frame, frame_to_coord, CoordVector, FrameVector, Matrix2};
use crate::surface::laplace::{CotanLaplacian, MASS_EPS};
use crate::surface::measure::{area_gradient, Quadrature};
use crate::surface::mesh::TriMesh;

/// Per-vertex mean curvature and unit normal (frame components).
#[derive(Debug, Clone)]
pub struct DiscreteCurvature {
    pub h: Vec<f64>,
    pub normals: Vec<FrameVector>,
    pub interior: Vec<bool>,
}

impl DiscreteCurvature {
    /// Values at interior vertices.
    pub fn interior_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.h.iter().zip(&self.interior).filter(|(_, &i)| i).map(|(&h, _)| h)
    }

    /// Largest `|H - target|` over interior vertices.
    pub fn max_deviation(&self, target: f64) -> f64 {
        self.interior_values().map(|h| (h - target).abs()).fold(0.0, f64::max)
    }

    pub fn mean(&self) -> f64 {
        let (s, n) = self.interior_values().fold((0.0, 0usize), |(s, n), h| (s + h, n + 1));
        if n == 0 {
            0.0
        } else {
            s / n as f64
        }
    }
}

/// `H_v = -dArea(n_v) / (2 m_v)`.
///
/// `n_v` is the metric unit normal at the vertex given by the face winding:
/// the sum of the cross products of incident face edges, taken in the
/// orthonormal frame at the vertex. `m_v` is the mixed Voronoi area. With
/// this sign an upward (counterclockwise seen from above) graph mesh of a leaf
/// has `H = tr(A)/2`, and a sphere wound with inward normals has `H = 1/r`.
/// Boundary vertices get `H = 0`.
pub fn discrete_mean_curvature(m: &TriMesh, a: &Matrix2) -> Result<DiscreteCurvature> {
    let lap = CotanLaplacian::assemble(m, a)?;
    let grad = area_gradient(m, a, Quadrature::Barycenter)?;
    let n = m.vertex_count();
    let mut sum = vec![FrameVector::default(); n];
    for f in m.faces() {
        for k in 0..3 {
            let (i, j, l) = (f[k], f[(k + 1) % 3], f[(k + 2) % 3]);
            let p = m.vertex(i);
            let edge = |q: usize| {
                let q = m.vertex(q);
                coord_to_frame(&CoordVector::new(q.x1 - p.x1, q.x2 - p.x2, q.x3 - p.x3), &p, a)
            };
            sum[i] = sum[i].add(&edge(j).cross(&edge(l)));
        }
    }
    let mut h = vec![0.0; n];
    let mut normals = vec![FrameVector::default(); n];
    for i in 0..n {
        let len = sum[i].norm();
        if !(len > 0.0) {
            return Err(GeomError::InvalidMesh(format!("vertex {i} has no normal")));
        }
        normals[i] = sum[i].scale(1.0 / len);
        if !lap.interior[i] {
            continue;
        }
        if !(lap.mass[i] > MASS_EPS) {
            return Err(GeomError::ZeroMass { vertex: i });
        }
        let nc = frame_to_coord(&normals[i], &m.vertex(i), a).to_array();
        let da: f64 = (0..3).map(|k| grad[i][k] * nc[k]).sum();
        h[i] = -da / (2.0 * lap.mass[i]);
    }
    Ok(DiscreteCurvature {
        h,
        normals,
        interior: lap.interior,
    })
}
