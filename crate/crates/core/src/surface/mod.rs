//! Surfaces in ℝ² ⋊_A ℝ: pointwise conformal jets and triangle meshes.

pub mod analytic;
pub mod curvature;
pub mod io;
pub mod jet;
pub mod laplace;
pub mod measure;
pub mod mesh;

pub use curvature::{discrete_mean_curvature, DiscreteCurvature};
pub use jet::ConformalJet;
pub use laplace::{laplace_beltrami, vertex_masses, CotanLaplacian};
pub use measure::{area_gradient, mesh_area, mesh_volume_below, volume_gradient, Quadrature};
pub use mesh::{ScalarField, TriMesh};
