//! Cotangent Laplace–Beltrami operator on meshes measured in the canonical
//! metric. Edge lengths use the metric at the edge midpoint; vertex masses
//! are mixed Voronoi areas.

use crate::error::{GeomError, Result};
use crate::group::Matrix2;
use crate::surface::measure::edge_length;
use crate::surface::mesh::{ScalarField, TriMesh};

/// Mixed areas at or below this abort the operator.
pub const MASS_EPS: f64 = 1e-14;

/// Assembled operator: `(Δf)_i = (1 / 2m_i) Σ_j w_ij (f_j - f_i)` with
/// `w_ij = cot α_ij + cot β_ij`.
#[derive(Debug, Clone)]
pub struct CotanLaplacian {
    /// Neighbor lists with summed cotangent weights, sorted by neighbor index.
    pub weights: Vec<Vec<(usize, f64)>>,
    /// Mixed Voronoi area per vertex.
    pub mass: Vec<f64>,
    pub interior: Vec<bool>,
}

/// Lengths of the edges opposite each corner of a face.
fn face_lengths(m: &TriMesh, f: &[usize; 3], a: &Matrix2) -> [f64; 3] {
    let v = |k: usize| m.vertex(f[k]);
    [
        edge_length(&v(1), &v(2), a),
        edge_length(&v(2), &v(0), a),
        edge_length(&v(0), &v(1), a),
    ]
}

/// Area from side lengths (Kahan's stable Heron formula).
fn heron(l: [f64; 3]) -> f64 {
    let mut s = l;
    s.sort_by(|x, y| y.total_cmp(x));
    let (a, b, c) = (s[0], s[1], s[2]);
    let p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    0.25 * p.max(0.0).sqrt()
}

impl CotanLaplacian {
    pub fn assemble(m: &TriMesh, a: &Matrix2) -> Result<Self> {
        let n = m.vertex_count();
        let mut pairs: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut mass = vec![0.0; n];
        for (fi, f) in m.faces().iter().enumerate() {
            let l = face_lengths(m, f, a);
            let area = heron(l);
            if !(area > MASS_EPS) {
                return Err(GeomError::DegenerateFace { face: fi, area });
            }
            let l2 = [l[0] * l[0], l[1] * l[1], l[2] * l[2]];
            // cotangent of the angle at corner k, opposite edge k
            let cot = |k: usize| (l2[(k + 1) % 3] + l2[(k + 2) % 3] - l2[k]) / (4.0 * area);
            let cots = [cot(0), cot(1), cot(2)];
            for k in 0..3 {
                let (i, j) = (f[(k + 1) % 3], f[(k + 2) % 3]);
                pairs[i].push((j, cots[k]));
                pairs[j].push((i, cots[k]));
            }
            let obtuse = (0..3).find(|&k| cots[k] < 0.0);
            for k in 0..3 {
                let vm = match obtuse {
                    None => {
                        // Voronoi region: edges k-(k+1) and k-(k+2), opposite corners k+2 and k+1
                        let e_next = l2[(k + 2) % 3];
                        let e_prev = l2[(k + 1) % 3];
                        (e_next * cots[(k + 2) % 3] + e_prev * cots[(k + 1) % 3]) / 8.0
                    }
                    Some(o) if o == k => area / 2.0,
                    Some(_) => area / 4.0,
                };
                mass[f[k]] += vm;
            }
        }
        let weights = pairs
            .into_iter()
            .map(|mut p| {
                p.sort_by_key(|&(j, _)| j);
                let mut out: Vec<(usize, f64)> = Vec::with_capacity(p.len());
                for (j, w) in p {
                    match out.last_mut() {
                        Some(last) if last.0 == j => last.1 += w,
                        _ => out.push((j, w)),
                    }
                }
                out
            })
            .collect();
        let interior: Vec<bool> = m.boundary_flags().iter().map(|b| !b).collect();
        for i in 0..n {
            if interior[i] && !(mass[i] > MASS_EPS) {
                return Err(GeomError::ZeroMass { vertex: i });
            }
        }
        Ok(Self {
            weights,
            mass,
            interior,
        })
    }

    /// `Δf` at interior vertices; boundary entries are set to zero.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        (0..f.len())
            .map(|i| {
                if !self.interior[i] {
                    return 0.0;
                }
                let s: f64 = self.weights[i].iter().map(|&(j, w)| w * (f[j] - f[i])).sum();
                s / (2.0 * self.mass[i])
            })
            .collect()
    }
}

pub fn laplace_beltrami(m: &TriMesh, f: &ScalarField, a: &Matrix2) -> Result<ScalarField> {
    if f.len() != m.vertex_count() {
        return Err(GeomError::InvalidArgument("field size does not match mesh".into()));
    }
    let op = CotanLaplacian::assemble(m, a)?;
    ScalarField::new(m, op.apply(f.values()))
}

/// Mixed Voronoi vertex areas.
pub fn vertex_masses(m: &TriMesh, a: &Matrix2) -> Result<Vec<f64>> {
    Ok(CotanLaplacian::assemble(m, a)?.mass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupPoint;
    use crate::surface::measure::{mesh_area, Quadrature};
    use crate::surface::mesh::tests::grid;

    #[test]
    fn constants_are_harmonic() {
        let m = grid(6, 1.0, 0.3);
        let a = Matrix2::new(0.2, 1.0, -0.5, 0.9).unwrap();
        let f = ScalarField::new(&m, vec![2.5; m.vertex_count()]).unwrap();
        let lf = laplace_beltrami(&m, &f, &a).unwrap();
        assert!(lf.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn linear_function_is_harmonic_on_flat_patch() {
        let m = grid(6, 1.0, 0.0);
        let f = ScalarField::from_fn(&m, |p| p.x1 - 0.3 * p.x2).unwrap();
        let lf = laplace_beltrami(&m, &f, &Matrix2::zero()).unwrap();
        assert!(lf.values().iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn quadratic_has_laplacian_four() {
        let m = grid(8, 1.0, 0.0);
        let f = ScalarField::from_fn(&m, |p| p.x1 * p.x1 + p.x2 * p.x2).unwrap();
        let lf = laplace_beltrami(&m, &f, &Matrix2::zero()).unwrap();
        for i in m.interior_vertices() {
            assert!((lf.get(i) - 4.0).abs() < 1e-10, "{}", lf.get(i));
        }
    }

    #[test]
    fn masses_sum_to_area() {
        let m = grid(5, 2.0, 0.4);
        let a = Matrix2::hyperbolic();
        let total: f64 = vertex_masses(&m, &a).unwrap().iter().sum();
        let area = mesh_area(&m, &a, Quadrature::Barycenter).unwrap();
        assert!((total - area).abs() < 1e-12 * area);
    }

    #[test]
    fn obtuse_triangles_use_mixed_areas() {
        let v = vec![
            GroupPoint::new(0.0, 0.0, 0.0),
            GroupPoint::new(4.0, 0.0, 0.0),
            GroupPoint::new(2.0, 0.5, 0.0),
        ];
        let m = TriMesh::new(v, vec![[0, 1, 2]]).unwrap();
        let mass = vertex_masses(&m, &Matrix2::zero()).unwrap();
        assert!((mass[2] - 0.5).abs() < 1e-14);
        assert!((mass[0] - 0.25).abs() < 1e-14);
        assert!((mass[1] - 0.25).abs() < 1e-14);
    }
}
