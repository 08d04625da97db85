//! Numerical geometry of the three-dimensional metric Lie groups ℝ² ⋊_A ℝ.
//!
//! - [`group`]: group law, `e^{zA}`, invariant frames, canonical metric.
//! - [`geometry`]: Levi-Civita connection, geodesics, sectional curvature.
//! - [`surface`]: conformal jets and triangle meshes measured in the metric.
//! - [`variational`]: minimizing `Area + 2 H₀ Volume` between boundary circles in a slab.
//! - [`lemma`]: the subharmonicity of `1/x3` on H-surfaces near a leaf.

pub mod error;
pub mod geometry;
pub mod group;
pub mod lemma;
pub mod surface;
pub mod variational;

pub use error::{GeomError, Result};
pub use group::{CoordVector, ExpAz, FrameVector, GroupPoint, Matrix2, MetricTensor};
