//! One function per subcommand. Each writes its artifacts into `out` and
//! returns the run report.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::{json, Map, Value};

use semidirect::geometry::{geodesic_integrate, GeodesicState};
use semidirect::group::{group_constants, left_frame_at, metric_at, right_frame_at};
use semidirect::lemma::{c1_constant, fuzz_breakdown, fuzz_inequalities, verify_subharmonic_on_mesh, LemmaConfig, N3Mode};
use semidirect::surface::io::{fmt17, read_obj, write_obj, write_scalar_csv};
use semidirect::surface::{mesh_area, mesh_volume_below, Quadrature, TriMesh};
use semidirect::variational::{
    default_tol_grad, make_annulus_mesh_with, minimize, MinimizeOptions, SlabConfig,
};
use semidirect::{FrameVector, GroupPoint, Matrix2};

use crate::config::{
    matrix, GeodesicConfig, GroupInfoConfig, LemmaMode, MeshConfig, MinimizeConfig, NormalMode, VerifyLemmaConfig,
};
use crate::output::{json_text, num, nums, write_atomic, Check, Report};

fn rows_json(m: &Matrix2) -> Value {
    let r = m.rows();
    json!([nums(&r[0]), nums(&r[1])])
}

fn matrix_header(report: &mut Report, a: &Matrix2) {
    report.field("A_used", rows_json(a));
    report.field("negated", Value::Bool(a.was_negated()));
}

fn finish(report: Report, out: &Path, name: &str) -> Result<Report> {
    let mut report = report;
    report.artifact(name);
    write_atomic(out, name, json_text(&report.to_json())?.as_bytes())?;
    Ok(report)
}

pub fn group_info(cfg: &GroupInfoConfig, out: &Path) -> Result<Report> {
    let a = matrix(&cfg.a)?;
    let k = group_constants(&a);
    let h = cfg.h.unwrap_or(k.h0);
    let mut report = Report::new("group-info", cfg)?;
    matrix_header(&mut report, &a);
    report.field("trace", num(k.trace));
    report.field("H0", num(k.h0));
    report.field("unimodular", Value::Bool(k.unimodular));
    report.field("H", num(h));
    report.field("C1", num(c1_constant(&a, h)));
    report.field("in_regime", Value::Bool(h.abs() <= k.h0));

    let points = if cfg.points.is_empty() { vec![[0.0; 3]] } else { cfg.points.clone() };
    let mut samples = Vec::new();
    let mut ortho = 0.0f64;
    for x in points {
        let p = GroupPoint::try_new(x[0], x[1], x[2]).context("sample point")?;
        let e = left_frame_at(&p, &a);
        let f = right_frame_at(&p, &a);
        let g = metric_at(&p, &a);
        let gn = g.g.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
        for i in 0..3 {
            for j in 0..3 {
                let len = |v: [f64; 3]| v.iter().map(|c| c * c).sum::<f64>().sqrt();
                let scale = (gn * len(e[i].to_array()) * len(e[j].to_array())).max(1.0);
                let d = if i == j { 1.0 } else { 0.0 };
                ortho = ortho.max((g.inner(&e[i], &e[j]) - d).abs() / scale);
            }
        }
        samples.push(json!({
            "point": nums(&x),
            "left_frame": e.iter().map(|v| nums(&v.to_array())).collect::<Vec<_>>(),
            "right_frame": f.iter().map(|v| nums(&v.to_array())).collect::<Vec<_>>(),
            "metric": g.g.iter().map(|r| nums(r)).collect::<Vec<_>>(),
        }));
    }
    report.field("samples", Value::Array(samples));
    report.assert(Check::at_most("frame_orthonormality", ortho, 1e-12));
    finish(report, out, "group_info.json")
}

pub fn geodesic(cfg: &GeodesicConfig, out: &Path) -> Result<Report> {
    let a = matrix(&cfg.a)?;
    let start = GeodesicState {
        point: GroupPoint::try_new(cfg.start[0], cfg.start[1], cfg.start[2]).context("start point")?,
        velocity: FrameVector::from_array(cfg.velocity),
    };
    let path = geodesic_integrate(&start, cfg.length, cfg.steps, &a)?;
    let mut csv = String::from("t,x1,x2,x3,v1,v2,v3\n");
    for s in &path.samples {
        let row = [s.t, s.point.x1, s.point.x2, s.point.x3, s.velocity.v1, s.velocity.v2, s.velocity.v3];
        csv.push_str(&row.map(fmt17).join(","));
        csv.push('\n');
    }
    write_atomic(out, "geodesic.csv", csv.as_bytes())?;

    let mut report = Report::new("geodesic", cfg)?;
    matrix_header(&mut report, &a);
    let end = path.end().expect("at least one sample");
    report.field("end_point", nums(&end.point.to_array()));
    report.field("end_velocity", nums(&end.velocity.to_array()));
    report.field("samples", json!(path.samples.len()));
    report.artifact("geodesic.csv");
    report.assert(Check::at_most("speed_drift", path.max_speed_drift(), cfg.speed_tol));
    finish(report, out, "geodesic.json")
}

pub fn make_annulus(cfg: &MeshConfig, out: &Path) -> Result<Report> {
    let a = matrix(&cfg.a)?;
    let c = cfg.circles.boundary();
    let m = make_annulus_mesh_with(&c, cfg.circles.rings, cfg.spacing.into())?;
    write_atomic(out, "annulus.obj", write_obj(&m).as_bytes())?;

    let mut report = Report::new("mesh make-annulus", cfg)?;
    matrix_header(&mut report, &a);
    report.field("vertex_count", json!(m.vertex_count()));
    report.field("face_count", json!(m.face_count()));
    report.field("boundary_vertices", json!(m.boundary_flags().iter().filter(|b| **b).count()));
    report.field("area", num(mesh_area(&m, &a, Quadrature::Barycenter)?));
    report.field("volume_below", num(mesh_volume_below(&m, &a)?));
    report.artifact("annulus.obj");
    let n = c.n_seg;
    let last = cfg.circles.rings * n;
    let off: f64 = (0..n)
        .map(|j| (m.vertex(j).x3 - c.h_in).abs().max((m.vertex(last + j).x3 - c.h_out).abs()))
        .fold(0.0, f64::max);
    report.assert(Check::at_most("boundary_height_error", off, 0.0));
    finish(report, out, "mesh.json")
}

pub fn run_minimize(cfg: &MinimizeConfig, out: &Path) -> Result<Report> {
    let a = matrix(&cfg.a)?;
    let c = cfg.circles.boundary();
    c.validate_in_slab(cfg.eps)?;
    let slab = SlabConfig::new(cfg.eps, a)?;
    let start = make_annulus_mesh_with(&c, cfg.circles.rings, cfg.spacing.into())?;
    let tol = match cfg.tol_grad {
        Some(t) => t,
        None => default_tol_grad(&start, &slab)?,
    };
    let mut opts = MinimizeOptions::for_circles(&c, tol, cfg.max_iter);
    if let Some(r) = cfg.probe_radius {
        opts.probe_radius = r;
    }
    if let Some(t) = cfg.flat_target {
        opts.flat_target = t;
    }
    let (m, r) = minimize(&start, &slab, &opts)?;

    write_atomic(out, "minimized.obj", write_obj(&m).as_bytes())?;
    let mut csv = String::from("iter,T,grad_norm,flatness\n");
    for rec in &r.log {
        csv.push_str(&format!("{},{},{},{}\n", rec.iter, fmt17(rec.t), fmt17(rec.grad_norm), fmt17(rec.flatness)));
    }
    write_atomic(out, "minimize_log.csv", csv.as_bytes())?;

    let mut report = Report::new("minimize", cfg)?;
    matrix_header(&mut report, &a);
    let mut f = Map::new();
    for (k, v) in [
        ("T", r.t),
        ("area", r.area),
        ("volume", r.volume),
        ("grad_norm", r.grad_norm),
        ("tol_grad", r.tol_grad),
        ("H0", r.h0),
        ("H_mean", r.h_mean),
        ("H_max_dev", r.h_max_dev),
        ("flatness", r.flatness),
        ("probe_radius", r.probe_radius),
        ("flat_target", opts.flat_target),
        ("mean_edge_length", r.mean_edge_length),
        ("armijo_c", r.armijo_c),
        ("armijo_shrink", r.armijo_shrink),
        ("initial_step", r.initial_step),
    ] {
        f.insert(k.into(), num(v));
    }
    f.insert("converged".into(), Value::Bool(r.converged));
    f.insert("iterations".into(), json!(r.iterations));
    f.insert(
        "area_samples".into(),
        Value::Array(r.area_samples.iter().map(|(rad, ar)| nums(&[*rad, *ar])).collect()),
    );
    report.field("result", Value::Object(f));
    report.artifact("minimized.obj");
    report.artifact("minimize_log.csv");

    let rise = r.log.windows(2).map(|w| w[1].t - w[0].t).fold(0.0, f64::max);
    let slab_excess = r
        .log
        .iter()
        .map(|x| (-x.min_height).max(x.max_height - cfg.eps))
        .fold(0.0, f64::max);
    let moved = (0..m.vertex_count())
        .filter(|&i| m.is_boundary(i))
        .map(|i| {
            let (p, q) = (m.vertex(i).to_array(), start.vertex(i).to_array());
            (0..3).map(|k| (p[k] - q[k]).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    report.assert(Check::at_most("grad_norm", r.grad_norm, r.tol_grad));
    report.assert(Check::at_most("energy_increase", rise, 0.0));
    report.assert(Check::at_most("slab_excess", slab_excess, 0.0));
    report.assert(Check::at_most("boundary_displacement", moved, 0.0));
    report.assert(Check::at_most("mean_curvature_deviation", r.h_max_dev, cfg.h_tol));
    finish(report, out, "minimize_report.json")
}

pub fn verify_lemma(cfg: &VerifyLemmaConfig, config_dir: &Path, out: &Path) -> Result<Report> {
    let a = matrix(&cfg.a)?;
    let mut lemma = LemmaConfig::new(a, cfg.h)?;
    lemma.tol = cfg.tol;
    let mut report = Report::new("verify-lemma", cfg)?;
    matrix_header(&mut report, &a);
    report.field("C1", num(lemma.c1()));
    report.field("in_regime", Value::Bool(lemma.in_regime()));
    match cfg.mode {
        LemmaMode::Jets => {
            if cfg.samples == 0 {
                bail!("jets mode needs samples > 0");
            }
            let mode = match cfg.normal_mode {
                NormalMode::Stored => N3Mode::Stored,
                NormalMode::Adversarial => N3Mode::Adversarial,
            };
            let r = fuzz_breakdown(&lemma, cfg.samples, cfg.seed, mode)?;
            let ineq = fuzz_inequalities(cfg.samples, cfg.seed, cfg.tol);
            report.field("min_total", num(r.min_total));
            report.field("min_margin", num(r.min_margin));
            report.field("violations", json!(r.violations));
            report.field("samples", json!(r.samples));
            report.field("max_decomposition_residual", num(r.max_decomposition_residual));
            report.field("max_imag_residue", num(r.max_imag_residue));
            report.field("inequality_violations", json!(ineq.violations));
            report.field("inequality_min_margin_diff", num(ineq.min_margin_diff));
            report.field("inequality_min_margin_mixed", num(ineq.min_margin_mixed));
            let bound = Check::at_most("lower_bound_violations", r.violations as f64, 0.0);
            // outside the hypotheses the bound is not claimed
            if lemma.in_regime() {
                report.assert(bound);
            } else {
                report.note(bound);
            }
            report.assert(Check::at_most("inequality_violations", ineq.violations as f64, 0.0));
            report.assert(Check::at_most("decomposition_residual", r.max_decomposition_residual, 1e-12));
        }
        LemmaMode::Mesh => {
            let Some(rel) = &cfg.mesh_path else {
                bail!("mesh mode needs mesh_path");
            };
            let path = config_dir.join(rel);
            let text = std::fs::read_to_string(&path).with_context(|| format!("reading mesh {}", path.display()))?;
            let mut m: TriMesh = read_obj(&text).with_context(|| format!("parsing mesh {}", path.display()))?;
            if cfg.lift != 0.0 {
                m = m.left_translate(&GroupPoint::new(0.0, 0.0, cfg.lift), &a);
            }
            let r = verify_subharmonic_on_mesh(&m, &lemma, cfg.k)?;
            let violations = m.interior_vertices().filter(|&i| r.laplacian.get(i) < r.threshold).count();
            write_atomic(out, "laplacian.csv", write_scalar_csv(&r.laplacian).as_bytes())?;
            report.field("min_total", num(r.min_laplacian));
            report.field("min_margin", num(r.min_laplacian - r.threshold));
            report.field("violations", json!(violations));
            report.field("mesh_size", num(r.h));
            report.field("threshold", num(r.threshold));
            report.field("negative_fraction", num(r.negative_fraction));
            report.field("cmc_deviation", num(r.cmc_deviation));
            report.artifact("laplacian.csv");
            report.assert(Check::at_least("min_laplacian", r.min_laplacian, r.threshold));
        }
    }
    finish(report, out, "lemma_report.json")
}
