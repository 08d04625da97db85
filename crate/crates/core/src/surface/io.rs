//! Text formats: an OBJ subset for meshes (`v x1 x2 x3`, `f i j k` with
//! 1-based indices, `#` comments) and `vertex_index,value` CSV for scalar
//! fields. Reals are written with 17 significant digits so that they
//! round-trip exactly.

use std::fmt::Write;

use crate::error::{GeomError, Result};
use crate::group::GroupPoint;
use crate::surface::mesh::{ScalarField, TriMesh};

/// Formats a real with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x == 0.0 {
        // keeps the sign of -0.0 out of artifacts
        return "0.0000000000000000e0".to_string();
    }
    format!("{x:.16e}")
}

fn parse_err(line: usize, msg: impl Into<String>) -> GeomError {
    GeomError::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_real(tok: &str, line: usize) -> Result<f64> {
    let x: f64 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("invalid number {tok:?}")))?;
    if !x.is_finite() {
        return Err(parse_err(line, format!("non-finite number {tok:?}")));
    }
    Ok(x)
}

pub fn read_obj(text: &str) -> Result<TriMesh> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut toks = content.split_whitespace();
        let tag = toks.next().unwrap_or_default();
        let rest: Vec<&str> = toks.collect();
        match tag {
            "v" => {
                if rest.len() != 3 {
                    return Err(parse_err(line, "vertex needs 3 coordinates"));
                }
                vertices.push(GroupPoint::new(
                    parse_real(rest[0], line)?,
                    parse_real(rest[1], line)?,
                    parse_real(rest[2], line)?,
                ));
            }
            "f" => {
                if rest.len() != 3 {
                    return Err(parse_err(line, "only triangular faces are supported"));
                }
                let mut f = [0usize; 3];
                for (slot, tok) in f.iter_mut().zip(&rest) {
                    let idx: usize = tok
                        .parse()
                        .map_err(|_| parse_err(line, format!("invalid index {tok:?}")))?;
                    if idx == 0 {
                        return Err(parse_err(line, "indices are 1-based"));
                    }
                    *slot = idx - 1;
                }
                faces.push(f);
            }
            other => return Err(parse_err(line, format!("unsupported directive {other:?}"))),
        }
    }
    TriMesh::new(vertices, faces)
}

pub fn write_obj(m: &TriMesh) -> String {
    let mut out = String::new();
    writeln!(out, "# {} vertices, {} faces", m.vertex_count(), m.face_count()).unwrap();
    for p in m.vertices() {
        writeln!(out, "v {} {} {}", fmt17(p.x1), fmt17(p.x2), fmt17(p.x3)).unwrap();
    }
    for f in m.faces() {
        writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1).unwrap();
    }
    out
}

/// Reads `vertex_index,value` rows (0-based indices, any order, each vertex
/// exactly once). An optional header line is skipped.
pub fn read_scalar_csv(text: &str, m: &TriMesh) -> Result<ScalarField> {
    let n = m.vertex_count();
    let mut values: Vec<Option<f64>> = vec![None; n];
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        if line == 1 && content.starts_with("vertex_index") {
            continue;
        }
        let (i, v) = content
            .split_once(',')
            .ok_or_else(|| parse_err(line, "expected vertex_index,value"))?;
        let i: usize = i
            .trim()
            .parse()
            .map_err(|_| parse_err(line, format!("invalid index {i:?}")))?;
        if i >= n {
            return Err(parse_err(line, format!("index {i} out of range")));
        }
        if values[i].replace(parse_real(v.trim(), line)?).is_some() {
            return Err(parse_err(line, format!("index {i} repeated")));
        }
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| parse_err(0, format!("no value for vertex {i}"))))
        .collect::<Result<Vec<_>>>()?;
    ScalarField::new(m, values)
}

pub fn write_scalar_csv(f: &ScalarField) -> String {
    let mut out = String::from("vertex_index,value\n");
    for (i, v) in f.values().iter().enumerate() {
        writeln!(out, "{i},{}", fmt17(*v)).unwrap();
    }
    out
}
