//! Minimizing `T = Area + 2 H₀ Volume` over graph meshes in the slab
//! `0 ≤ x3 ≤ ε` with boundary circles held fixed.
//!
//! Only vertex heights move. Horizontal positions stay where the mesh
//! builder put them, which keeps every face non-degenerate and the mesh a
//! graph over its projection.

use std::f64::consts::PI;

use crate::error::{GeomError, Result};
use crate::group::{GroupPoint, Matrix2};
use crate::surface::curvature::discrete_mean_curvature;
use crate::surface::laplace::CotanLaplacian;
use crate::surface::measure::{
    area_gradient, mean_edge_length, mesh_area, mesh_volume_below, volume_gradient, Quadrature,
};
use crate::surface::mesh::TriMesh;

/// Armijo slope fraction.
pub const ARMIJO_C: f64 = 1e-4;
/// Backtracking factor.
pub const ARMIJO_SHRINK: f64 = 0.5;
/// Consecutive rejected trial steps before giving up.
pub const MAX_LINE_SEARCH_FAILURES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabConfig {
    pub eps: f64,
    pub a: Matrix2,
}

impl SlabConfig {
    pub fn new(eps: f64, a: Matrix2) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(GeomError::InvalidArgument(format!("slab height must be positive, got {eps}")));
        }
        Ok(Self { eps, a })
    }

    pub fn h0(&self) -> f64 {
        0.5 * self.a.trace()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCircles {
    pub r_in: f64,
    pub h_in: f64,
    pub r_out: f64,
    pub h_out: f64,
    pub n_seg: usize,
}

impl BoundaryCircles {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(GeomError::InvalidArgument(m));
        if ![self.r_in, self.h_in, self.r_out, self.h_out].iter().all(|v| v.is_finite()) {
            return Err(GeomError::NonFinite("boundary circle"));
        }
        if !(self.r_in > 0.0) {
            return bad(format!("inner radius must be positive, got {}", self.r_in));
        }
        if self.r_in >= self.r_out {
            return bad(format!("radii overlap: R_in = {} >= R_out = {}", self.r_in, self.r_out));
        }
        if self.n_seg < 8 {
            return bad(format!("n_seg must be at least 8, got {}", self.n_seg));
        }
        Ok(())
    }

    /// Checks that both boundary heights lie in `[0, eps]`.
    pub fn validate_in_slab(&self, eps: f64) -> Result<()> {
        self.validate()?;
        for h in [self.h_in, self.h_out] {
            if !(0.0..=eps).contains(&h) {
                return Err(GeomError::InvalidArgument(format!(
                    "boundary height {h} outside the slab [0, {eps}]"
                )));
            }
        }
        Ok(())
    }
}

/// Placement of the rings between the two circles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RadialSpacing {
    /// Equal radial steps.
    Uniform,
    /// Radii in geometric progression, so every cell has the same shape.
    #[default]
    Geometric,
}

/// Annulus with geometric ring spacing; see [`make_annulus_mesh_with`].
pub fn make_annulus_mesh(circles: &BoundaryCircles, rings: usize) -> Result<TriMesh> {
    make_annulus_mesh_with(circles, rings, RadialSpacing::Geometric)
}

/// Structured annulus with `rings + 1` circles of `n_seg` vertices each.
/// Vertex `k * n_seg + j` sits on circle `k` (0 = inner) at angle
/// `2πj / n_seg`. Heights interpolate linearly in the radius. Faces are
/// counterclockwise seen from above.
pub fn make_annulus_mesh_with(
    circles: &BoundaryCircles,
    rings: usize,
    spacing: RadialSpacing,
) -> Result<TriMesh> {
    circles.validate()?;
    if rings < 1 {
        return Err(GeomError::InvalidArgument("at least one ring is required".into()));
    }
    let n = circles.n_seg;
    let (r0, r1) = (circles.r_in, circles.r_out);
    let radius = |k: usize| {
        if k == rings {
            return r1;
        }
        let t = k as f64 / rings as f64;
        match spacing {
            RadialSpacing::Uniform => r0 + (r1 - r0) * t,
            RadialSpacing::Geometric => r0 * (r1 / r0).powf(t),
        }
    };
    let mut vertices = Vec::with_capacity(n * (rings + 1));
    for k in 0..=rings {
        let r = radius(k);
        let t = (r - r0) / (r1 - r0);
        let z = (1.0 - t) * circles.h_in + t * circles.h_out;
        for j in 0..n {
            let th = 2.0 * PI * j as f64 / n as f64;
            vertices.push(GroupPoint::new(r * th.cos(), r * th.sin(), z));
        }
    }
    let id = |k: usize, j: usize| k * n + j % n;
    let mut faces = Vec::with_capacity(2 * n * rings);
    for k in 0..rings {
        for j in 0..n {
            faces.push([id(k, j), id(k + 1, j), id(k + 1, j + 1)]);
            faces.push([id(k, j), id(k + 1, j + 1), id(k, j + 1)]);
        }
    }
    TriMesh::new(vertices, faces)
}

pub fn functional_t(m: &TriMesh, cfg: &SlabConfig) -> Result<f64> {
    let area = mesh_area(m, &cfg.a, Quadrature::Barycenter)?;
    let h0 = cfg.h0();
    if h0 == 0.0 {
        return Ok(area);
    }
    Ok(area + 2.0 * h0 * mesh_volume_below(m, &cfg.a)?)
}

/// Coordinate gradient of [`functional_t`], zero at boundary vertices.
pub fn grad_t(m: &TriMesh, cfg: &SlabConfig) -> Result<Vec<[f64; 3]>> {
    let mut g = area_gradient(m, &cfg.a, Quadrature::Barycenter)?;
    let h0 = cfg.h0();
    if h0 != 0.0 {
        let gv = volume_gradient(m, &cfg.a)?;
        for (gi, vi) in g.iter_mut().zip(&gv) {
            for k in 0..3 {
                gi[k] += 2.0 * h0 * vi[k];
            }
        }
    }
    for (i, gi) in g.iter_mut().enumerate() {
        if m.is_boundary(i) {
            *gi = [0.0; 3];
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeOptions {
    /// Stop when `max_v |∂T/∂x3_v| / m_v` over free interior vertices drops
    /// to this value (`m_v` the mixed vertex area).
    pub tol_grad: f64,
    pub max_iter: usize,
    /// Flatness is measured over vertices with `x1² + x2² ≤ probe_radius²`.
    pub probe_radius: f64,
    /// Height the flatness is measured against.
    pub flat_target: f64,
}

impl MinimizeOptions {
    /// Probe disk `min(2 R_in, (R_in + R_out) / 2)` against the inner height.
    pub fn for_circles(circles: &BoundaryCircles, tol_grad: f64, max_iter: usize) -> Self {
        Self {
            tol_grad,
            max_iter,
            probe_radius: (2.0 * circles.r_in).min(0.5 * (circles.r_in + circles.r_out)),
            flat_target: circles.h_in,
        }
    }
}

/// `1e-6 · T` of the starting mesh.
pub fn default_tol_grad(m: &TriMesh, cfg: &SlabConfig) -> Result<f64> {
    Ok(1e-6 * functional_t(m, cfg)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub t: f64,
    pub grad_norm: f64,
    pub flatness: f64,
    /// Accepted step length along the search direction (0 for the initial row).
    pub step: f64,
    pub min_height: f64,
    pub max_height: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeReport {
    pub t: f64,
    pub area: f64,
    pub volume: f64,
    pub grad_norm: f64,
    pub tol_grad: f64,
    pub converged: bool,
    pub iterations: usize,
    pub h0: f64,
    pub h_mean: f64,
    pub h_max_dev: f64,
    pub flatness: f64,
    pub probe_radius: f64,
    pub mean_edge_length: f64,
    /// `(R, area of the part of the mesh within radius R)`.
    pub area_samples: Vec<(f64, f64)>,
    pub armijo_c: f64,
    pub armijo_shrink: f64,
    pub initial_step: f64,
    pub log: Vec<IterationRecord>,
}

/// Largest `|x3 - target|` over vertices within `radius` of the axis.
pub fn flatness(m: &TriMesh, radius: f64, target: f64) -> Result<f64> {
    let mut found = false;
    let mut worst = 0.0f64;
    for p in m.vertices() {
        if p.x1 * p.x1 + p.x2 * p.x2 <= radius * radius * (1.0 + 1e-12) {
            found = true;
            worst = worst.max((p.x3 - target).abs());
        }
    }
    if !found {
        return Err(GeomError::InvalidArgument(format!("no vertices within probe radius {radius}")));
    }
    Ok(worst)
}

/// Metric area of the faces whose vertices all lie within `radius` of the axis.
pub fn area_within(m: &TriMesh, a: &Matrix2, radius: f64) -> f64 {
    let r2 = radius * radius * (1.0 + 1e-12);
    let inside = |i: usize| {
        let p = m.vertex(i);
        p.x1 * p.x1 + p.x2 * p.x2 <= r2
    };
    m.faces()
        .iter()
        .filter(|f| f.iter().all(|&i| inside(i)))
        .map(|f| {
            crate::surface::measure::face_area(
                [&m.vertices()[f[0]], &m.vertices()[f[1]], &m.vertices()[f[2]]],
                a,
                Quadrature::Barycenter,
            )
        })
        .sum()
}

/// Sparse symmetric matrix restricted to the free vertices, stored by rows.
struct FreeSystem {
    rows: Vec<Vec<(usize, f64)>>,
    diag: Vec<f64>,
}

impl FreeSystem {
    /// Dirichlet-energy stiffness `K_ii = ½ Σ w_ij`, `K_ij = -½ w_ij`, with
    /// non-free vertices eliminated.
    fn stiffness(lap: &CotanLaplacian, free_index: &[Option<usize>], n_free: usize) -> Self {
        let mut rows = vec![Vec::new(); n_free];
        let mut diag = vec![0.0; n_free];
        for (i, nbrs) in lap.weights.iter().enumerate() {
            let Some(fi) = free_index[i] else { continue };
            for &(j, w) in nbrs {
                diag[fi] += 0.5 * w;
                if let Some(fj) = free_index[j] {
                    rows[fi].push((fj, -0.5 * w));
                }
            }
        }
        Self { rows, diag }
    }

    fn mul(&self, x: &[f64]) -> Vec<f64> {
        (0..x.len())
            .map(|i| self.diag[i] * x[i] + self.rows[i].iter().map(|&(j, w)| w * x[j]).sum::<f64>())
            .collect()
    }

    /// Jacobi-preconditioned conjugate gradients.
    fn solve(&self, b: &[f64], rel_tol: f64, max_iter: usize) -> Option<Vec<f64>> {
        let n = b.len();
        if self.diag.iter().any(|&d| !(d > 0.0)) {
            return None;
        }
        let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
        let bnorm = dot(b, b).sqrt();
        let mut x = vec![0.0; n];
        if bnorm == 0.0 {
            return Some(x);
        }
        let mut r = b.to_vec();
        let mut z: Vec<f64> = r.iter().zip(&self.diag).map(|(r, d)| r / d).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        for _ in 0..max_iter {
            let ap = self.mul(&p);
            let pap = dot(&p, &ap);
            if !(pap > 0.0) {
                return None;
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            if dot(&r, &r).sqrt() <= rel_tol * bnorm {
                return Some(x);
            }
            z = r.iter().zip(&self.diag).map(|(r, d)| r / d).collect();
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        Some(x)
    }
}

fn with_heights(m: &TriMesh, z: &[f64]) -> Result<TriMesh> {
    let pos = m
        .vertices()
        .iter()
        .zip(z)
        .map(|(p, &h)| GroupPoint::new(p.x1, p.x2, h))
        .collect();
    m.with_positions(pos)
}

struct Evaluation {
    t: f64,
    dz: Vec<f64>,
}

fn evaluate(m: &TriMesh, cfg: &SlabConfig) -> Result<Evaluation> {
    let t = functional_t(m, cfg)?;
    let dz = grad_t(m, cfg)?.iter().map(|g| g[2]).collect();
    Ok(Evaluation { t, dz })
}

/// A vertex is held if it is on the boundary or pressed against a slab
/// face by the gradient.
fn held(m: &TriMesh, z: &[f64], g: &[f64], eps: f64) -> Vec<bool> {
    (0..z.len())
        .map(|i| m.is_boundary(i) || (z[i] <= 0.0 && g[i] > 0.0) || (z[i] >= eps && g[i] < 0.0))
        .collect()
}

fn projected_grad_norm(g: &[f64], hold: &[bool], mass: &[f64]) -> f64 {
    (0..g.len())
        .filter(|&i| !hold[i])
        .map(|i| (g[i] / mass[i]).abs())
        .fold(0.0, f64::max)
}

/// Projected descent on vertex heights with Armijo backtracking.
///
/// The search direction solves `K d = -∇T` with `K` the cotangent
/// stiffness of the current mesh, which is the Hessian of `T` near a leaf
/// up to lower-order terms; the plain gradient is used if that system
/// cannot be solved. Trial heights are clamped to `[0, eps]`; a trial is
/// accepted when `T(z') ≤ T(z) + c ∇T·(z' - z)`.
pub fn minimize(
    m: &TriMesh,
    cfg: &SlabConfig,
    opts: &MinimizeOptions,
) -> Result<(TriMesh, MinimizeReport)> {
    let eps = cfg.eps;
    let n = m.vertex_count();
    for i in 0..n {
        let z = m.vertex(i).x3;
        if !(0.0..=eps).contains(&z) {
            return Err(GeomError::Precondition(format!(
                "vertex {i} has x3 = {z} outside the slab [0, {eps}]"
            )));
        }
    }
    let mut mesh = m.clone();
    let mut z: Vec<f64> = mesh.vertices().iter().map(|p| p.x3).collect();
    let mut cur = evaluate(&mesh, cfg)?;
    let mut lap = CotanLaplacian::assemble(&mesh, &cfg.a)?;
    let mut hold = held(&mesh, &z, &cur.dz, eps);
    let mut gnorm = projected_grad_norm(&cur.dz, &hold, &lap.mass);
    let mut log = vec![IterationRecord {
        iter: 0,
        t: cur.t,
        grad_norm: gnorm,
        flatness: flatness(&mesh, opts.probe_radius, opts.flat_target)?,
        step: 0.0,
        min_height: z.iter().cloned().fold(f64::INFINITY, f64::min),
        max_height: z.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    }];
    let mut iter = 0;
    let mut failures = 0;
    while gnorm > opts.tol_grad && iter < opts.max_iter {
        let mut free_index = vec![None; n];
        let mut n_free = 0;
        for i in 0..n {
            if !hold[i] {
                free_index[i] = Some(n_free);
                n_free += 1;
            }
        }
        let rhs: Vec<f64> = (0..n).filter(|&i| !hold[i]).map(|i| -cur.dz[i]).collect();
        let sys = FreeSystem::stiffness(&lap, &free_index, n_free);
        let mut dir = vec![0.0; n];
        match sys.solve(&rhs, 1e-10, 4 * n_free + 100) {
            Some(d) if d.iter().zip(&rhs).map(|(a, b)| a * b).sum::<f64>() > 0.0 => {
                for i in 0..n {
                    if let Some(fi) = free_index[i] {
                        dir[i] = d[fi];
                    }
                }
            }
            _ => {
                for i in 0..n {
                    if !hold[i] {
                        dir[i] = -cur.dz[i] / lap.mass[i];
                    }
                }
            }
        }
        let mut alpha = 1.0;
        let accepted = loop {
            let trial: Vec<f64> = (0..n).map(|i| (z[i] + alpha * dir[i]).clamp(0.0, eps)).collect();
            let slope: f64 = (0..n).map(|i| cur.dz[i] * (trial[i] - z[i])).sum();
            let ok = if slope < 0.0 {
                let tm = with_heights(&mesh, &trial)?;
                match evaluate(&tm, cfg) {
                    Ok(ev) if ev.t <= cur.t + ARMIJO_C * slope => Some((tm, trial, ev)),
                    Ok(_) | Err(GeomError::DegenerateFace { .. }) => None,
                    Err(e) => return Err(e),
                }
            } else {
                None
            };
            if let Some(acc) = ok {
                failures = 0;
                break Some(acc);
            }
            failures += 1;
            if failures >= MAX_LINE_SEARCH_FAILURES {
                break None;
            }
            alpha *= ARMIJO_SHRINK;
        };
        let Some((tm, trial, ev)) = accepted else {
            return Err(GeomError::LineSearch {
                failures,
                iteration: iter,
                value: cur.t,
                grad_norm: gnorm,
            });
        };
        if ev.t > cur.t {
            return Err(GeomError::LineSearch {
                failures: 0,
                iteration: iter,
                value: ev.t,
                grad_norm: gnorm,
            });
        }
        mesh = tm;
        z = trial;
        cur = ev;
        iter += 1;
        lap = CotanLaplacian::assemble(&mesh, &cfg.a)?;
        hold = held(&mesh, &z, &cur.dz, eps);
        gnorm = projected_grad_norm(&cur.dz, &hold, &lap.mass);
        log.push(IterationRecord {
            iter,
            t: cur.t,
            grad_norm: gnorm,
            flatness: flatness(&mesh, opts.probe_radius, opts.flat_target)?,
            step: alpha,
            min_height: z.iter().cloned().fold(f64::INFINITY, f64::min),
            max_height: z.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        });
    }
    let dc = discrete_mean_curvature(&mesh, &cfg.a)?;
    let area = mesh_area(&mesh, &cfg.a, Quadrature::Barycenter)?;
    let volume = mesh_volume_below(&mesh, &cfg.a)?;
    let rmax = mesh
        .vertices()
        .iter()
        .map(|p| p.x1.hypot(p.x2))
        .fold(0.0, f64::max);
    let mut radii = Vec::new();
    let mut r = 1.0;
    while r < rmax {
        radii.push(r);
        r *= 2.0;
    }
    radii.push(rmax);
    let area_samples = radii.iter().map(|&r| (r, area_within(&mesh, &cfg.a, r))).collect();
    let report = MinimizeReport {
        t: cur.t,
        area,
        volume,
        grad_norm: gnorm,
        tol_grad: opts.tol_grad,
        converged: gnorm <= opts.tol_grad,
        iterations: iter,
        h0: cfg.h0(),
        h_mean: dc.mean(),
        h_max_dev: dc.max_deviation(cfg.h0()),
        flatness: log.last().map(|r| r.flatness).unwrap_or(0.0),
        probe_radius: opts.probe_radius,
        mean_edge_length: mean_edge_length(&mesh, &cfg.a),
        area_samples,
        armijo_c: ARMIJO_C,
        armijo_shrink: ARMIJO_SHRINK,
        initial_step: 1.0,
        log,
    };
    debug_assert!(report.log.windows(2).all(|w| w[1].t <= w[0].t));
    Ok((mesh, report))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthSample {
    pub radius: f64,
    pub flatness: f64,
    pub area: f64,
    pub area_over_r2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    pub samples: Vec<GrowthSample>,
    /// Least-squares `c` in `Area ≈ c R²`.
    pub c_fit: f64,
    /// Root-mean-square relative residual of that fit.
    pub fit_residual: f64,
    /// Largest over smallest `Area / R²`.
    pub band_ratio: f64,
    /// `flatness[k+1] ≤ 1.1 · flatness[k]` for every consecutive pair.
    pub flatness_monotone: bool,
}

/// Flattening and area growth across minimized meshes of increasing outer
/// radius. `series` holds `(R, mesh)` pairs.
pub fn flatness_and_growth_report(
    series: &[(f64, TriMesh)],
    a: &Matrix2,
    probe_radius: f64,
    target: f64,
) -> Result<GrowthReport> {
    if series.len() < 3 {
        return Err(GeomError::InvalidArgument(format!(
            "need at least 3 radii, got {}",
            series.len()
        )));
    }
    if series.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(GeomError::InvalidArgument("radii must increase".into()));
    }
    let mut samples = Vec::with_capacity(series.len());
    for (r, m) in series {
        let area = mesh_area(m, a, Quadrature::Barycenter)?;
        samples.push(GrowthSample {
            radius: *r,
            flatness: flatness(m, probe_radius, target)?,
            area,
            area_over_r2: area / (r * r),
        });
    }
    let num: f64 = samples.iter().map(|s| s.area * s.radius.powi(2)).sum();
    let den: f64 = samples.iter().map(|s| s.radius.powi(4)).sum();
    let c_fit = num / den;
    let fit_residual = (samples
        .iter()
        .map(|s| ((s.area - c_fit * s.radius.powi(2)) / s.area).powi(2))
        .sum::<f64>()
        / samples.len() as f64)
        .sqrt();
    let ratios: Vec<f64> = samples.iter().map(|s| s.area_over_r2).collect();
    let band_ratio = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let flatness_monotone = samples
        .windows(2)
        .all(|w| w[1].flatness <= 1.1 * w[0].flatness);
    Ok(GrowthReport {
        samples,
        c_fit,
        fit_residual,
        band_ratio,
        flatness_monotone,
    })
}
