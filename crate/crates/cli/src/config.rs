//! JSON experiment configs. Unknown keys are rejected.

use std::path::Path;

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use semidirect::variational::{BoundaryCircles, RadialSpacing};
use semidirect::Matrix2;

pub type Rows = [[f64; 2]; 2];

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

pub fn matrix(rows: &Rows) -> Result<Matrix2> {
    Matrix2::from_rows(*rows).context("invalid matrix A")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupInfoConfig {
    #[serde(rename = "A")]
    pub a: Rows,
    /// Mean curvature for C1; defaults to H0.
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn default_speed_tol() -> f64 {
    1e-8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicConfig {
    #[serde(rename = "A")]
    pub a: Rows,
    pub start: [f64; 3],
    /// Initial velocity in frame components; normalized before integrating.
    pub velocity: [f64; 3],
    pub length: f64,
    pub steps: usize,
    #[serde(default = "default_speed_tol")]
    pub speed_tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Geometric,
    Uniform,
}

impl From<Spacing> for RadialSpacing {
    fn from(s: Spacing) -> Self {
        match s {
            Spacing::Geometric => RadialSpacing::Geometric,
            Spacing::Uniform => RadialSpacing::Uniform,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Circles {
    #[serde(rename = "R_in")]
    pub r_in: f64,
    pub h_in: f64,
    #[serde(rename = "R_out")]
    pub r_out: f64,
    pub h_out: f64,
    pub n_seg: usize,
    pub rings: usize,
}

impl Circles {
    pub fn boundary(&self) -> BoundaryCircles {
        BoundaryCircles {
            r_in: self.r_in,
            h_in: self.h_in,
            r_out: self.r_out,
            h_out: self.h_out,
            n_seg: self.n_seg,
        }
    }
}

fn zero_rows() -> Rows {
    [[0.0; 2]; 2]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    /// Only used to report the metric area.
    #[serde(rename = "A", default = "zero_rows")]
    pub a: Rows,
    pub circles: Circles,
    #[serde(default)]
    pub spacing: Spacing,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn default_max_iter() -> usize {
    1000
}

fn default_h_tol() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinimizeConfig {
    #[serde(rename = "A")]
    pub a: Rows,
    pub eps: f64,
    pub circles: Circles,
    /// Defaults to `1e-6 · T` of the starting mesh.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_grad: Option<f64>,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// Echoed only: the descent is deterministic.
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flat_target: Option<f64>,
    /// Allowed interior `|H - H0|` on the converged mesh.
    #[serde(default = "default_h_tol")]
    pub h_tol: f64,
    #[serde(default)]
    pub spacing: Spacing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LemmaMode {
    Jets,
    Mesh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalMode {
    #[default]
    Stored,
    Adversarial,
}

fn default_k() -> f64 {
    semidirect::lemma::DEFAULT_MESH_K
}

fn default_tol() -> f64 {
    semidirect::lemma::DEFAULT_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyLemmaConfig {
    #[serde(rename = "A")]
    pub a: Rows,
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(default)]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    pub mode: LemmaMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh_path: Option<String>,
    /// Height of a vertical left translation applied to the mesh first.
    #[serde(default)]
    pub lift: f64,
    /// Violation threshold constant: `Δφ ≥ -k h`.
    #[serde(default = "default_k")]
    pub k: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub normal_mode: NormalMode,
}
