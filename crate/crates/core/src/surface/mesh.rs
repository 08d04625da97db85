use std::collections::HashMap;

use crate::error::{GeomError, Result};
use crate::group::{multiply, GroupPoint, Matrix2};

/// Triangle mesh with vertices in group coordinates.
///
/// Faces are consistently oriented (every directed edge appears at most
/// once) and every undirected edge has one or two incident faces. Vertices on
/// an edge with a single face are boundary vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    vertices: Vec<GroupPoint>,
    faces: Vec<[usize; 3]>,
    boundary: Vec<bool>,
}

impl TriMesh {
    pub fn new(vertices: Vec<GroupPoint>, faces: Vec<[usize; 3]>) -> Result<Self> {
        let n = vertices.len();
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(GeomError::InvalidMesh(format!("vertex {i} is not finite")));
        }
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (fi, f) in faces.iter().enumerate() {
            if f.iter().any(|&v| v >= n) {
                return Err(GeomError::InvalidMesh(format!(
                    "face {fi} references a vertex out of range"
                )));
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(GeomError::InvalidMesh(format!("face {fi} repeats a vertex")));
            }
            for k in 0..3 {
                let e = (f[k], f[(k + 1) % 3]);
                if directed.insert(e, fi).is_some() {
                    return Err(GeomError::InvalidMesh(format!(
                        "edge {}-{} is used twice in the same direction (face {fi}): inconsistent orientation or non-manifold",
                        e.0, e.1
                    )));
                }
            }
        }
        let mut boundary = vec![false; n];
        for &(u, v) in directed.keys() {
            if !directed.contains_key(&(v, u)) {
                boundary[u] = true;
                boundary[v] = true;
            }
        }
        Ok(Self {
            vertices,
            faces,
            boundary,
        })
    }

    pub fn vertices(&self) -> &[GroupPoint] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn vertex(&self, i: usize) -> GroupPoint {
        self.vertices[i]
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        self.boundary[i]
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn interior_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertices.len()).filter(move |&i| !self.boundary[i])
    }

    /// Moves vertex `i`; the connectivity and boundary flags are unchanged.
    pub fn set_vertex(&mut self, i: usize, p: GroupPoint) {
        self.vertices[i] = p;
    }

    /// Same connectivity with new positions.
    pub fn with_positions(&self, positions: Vec<GroupPoint>) -> Result<Self> {
        if positions.len() != self.vertices.len() {
            return Err(GeomError::InvalidMesh(format!(
                "expected {} positions, got {}",
                self.vertices.len(),
                positions.len()
            )));
        }
        if let Some(i) = positions.iter().position(|p| !p.is_finite()) {
            return Err(GeomError::InvalidMesh(format!("vertex {i} is not finite")));
        }
        Ok(Self {
            vertices: positions,
            faces: self.faces.clone(),
            boundary: self.boundary.clone(),
        })
    }

    /// Undirected edges, each listed once with the smaller index first, in
    /// sorted order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = self
            .faces
            .iter()
            .flat_map(|f| (0..3).map(move |k| (f[k].min(f[(k + 1) % 3]), f[k].max(f[(k + 1) % 3]))))
            .collect();
        e.sort_unstable();
        e.dedup();
        e
    }

    /// Faces incident to each vertex.
    pub fn vertex_faces(&self) -> Vec<Vec<usize>> {
        let mut vf = vec![Vec::new(); self.vertices.len()];
        for (fi, f) in self.faces.iter().enumerate() {
            for &v in f {
                vf[v].push(fi);
            }
        }
        vf
    }

    /// Image of the mesh under left translation by `g`.
    pub fn left_translate(&self, g: &GroupPoint, a: &Matrix2) -> TriMesh {
        TriMesh {
            vertices: self.vertices.iter().map(|p| multiply(g, p, a)).collect(),
            faces: self.faces.clone(),
            boundary: self.boundary.clone(),
        }
    }

    /// Relabels vertices by `perm` (old index `i` becomes `perm[i]`) and
    /// reorders faces by `face_order`; geometry is unchanged.
    pub fn relabel(&self, perm: &[usize], face_order: &[usize]) -> Result<TriMesh> {
        let n = self.vertices.len();
        if perm.len() != n || face_order.len() != self.faces.len() {
            return Err(GeomError::InvalidArgument("permutation length mismatch".into()));
        }
        let mut vertices = vec![GroupPoint::ORIGIN; n];
        for (old, &new) in perm.iter().enumerate() {
            vertices[new] = self.vertices[old];
        }
        let faces = face_order
            .iter()
            .map(|&fi| {
                let f = self.faces[fi];
                [perm[f[0]], perm[f[1]], perm[f[2]]]
            })
            .collect();
        TriMesh::new(vertices, faces)
    }
}

/// Per-vertex real values on a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(mesh: &TriMesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.vertex_count() {
            return Err(GeomError::InvalidArgument(format!(
                "field has {} values for {} vertices",
                values.len(),
                mesh.vertex_count()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(GeomError::NonFinite("field value"));
        }
        Ok(Self { values })
    }

    pub fn from_fn(mesh: &TriMesh, f: impl Fn(&GroupPoint) -> f64) -> Result<Self> {
        Self::new(mesh, mesh.vertices().iter().map(f).collect())
    }

    /// `1/x3`, defined when every vertex has `x3 > 0`.
    pub fn inverse_height(mesh: &TriMesh) -> Result<Self> {
        if let Some(i) = mesh.vertices().iter().position(|p| !(p.x3 > 0.0)) {
            return Err(GeomError::Precondition(format!(
                "vertex {i} has x3 = {} <= 0",
                mesh.vertex(i).x3
            )));
        }
        Self::from_fn(mesh, |p| 1.0 / p.x3)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
