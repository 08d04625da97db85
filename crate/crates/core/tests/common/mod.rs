#![allow(dead_code)]

use rand::Rng;
use semidirect::group::multiply;
use semidirect::surface::analytic::Immersion;
use semidirect::{GroupPoint, Matrix2};

pub type M2 = [[f64; 2]; 2];

fn mm(a: &M2, b: &M2) -> M2 {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// Scaling-and-squaring matrix exponential with a degree-18 Taylor core.
pub fn expm_oracle(a: &M2) -> M2 {
    let norm = a.iter().flatten().map(|v| v.abs()).sum::<f64>();
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scale = 0.5f64.powi(s);
    let b = [[a[0][0] * scale, a[0][1] * scale], [a[1][0] * scale, a[1][1] * scale]];
    let mut term = [[1.0, 0.0], [0.0, 1.0]];
    let mut sum = term;
    for k in 1..=18 {
        term = mm(&term, &b);
        for row in term.iter_mut() {
            for v in row.iter_mut() {
                *v /= k as f64;
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..s {
        sum = mm(&sum, &sum);
    }
    sum
}

pub fn scaled(a: &Matrix2, z: f64) -> M2 {
    let r = a.rows();
    [[r[0][0] * z, r[0][1] * z], [r[1][0] * z, r[1][1] * z]]
}

pub fn max_abs(m: &M2) -> f64 {
    m.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max)
}

pub fn max_diff(a: &M2, b: &M2) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            d = d.max((a[i][j] - b[i][j]).abs());
        }
    }
    d
}

pub fn random_matrix<R: Rng>(rng: &mut R, bound: f64) -> Matrix2 {
    let mut e = || rng.gen_range(-bound..=bound);
    Matrix2::new(e(), e(), e(), e()).unwrap()
}

pub fn random_point<R: Rng>(rng: &mut R, bound: f64) -> GroupPoint {
    GroupPoint::new(
        rng.gen_range(-bound..=bound),
        rng.gen_range(-bound..=bound),
        rng.gen_range(-bound..=bound),
    )
}

pub fn dist(p: &GroupPoint, q: &GroupPoint) -> f64 {
    (p.x1 - q.x1).abs().max((p.x2 - q.x2).abs()).max((p.x3 - q.x3).abs())
}

pub fn size(p: &GroupPoint) -> f64 {
    p.x1.abs().max(p.x2.abs()).max(p.x3.abs())
}

/// Differential of `q -> g q` at `p` by central differences.
pub fn fd_left_differential(g: &GroupPoint, p: &GroupPoint, a: &Matrix2, h: f64) -> [[f64; 3]; 3] {
    let mut d = [[0.0; 3]; 3];
    for j in 0..3 {
        let mut xp = p.to_array();
        let mut xm = p.to_array();
        xp[j] += h;
        xm[j] -= h;
        let fp = multiply(g, &GroupPoint::from_array(xp), a).to_array();
        let fm = multiply(g, &GroupPoint::from_array(xm), a).to_array();
        for i in 0..3 {
            d[i][j] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    d
}

/// Octahedron refined `level` times and projected onto the sphere of radius
/// `r`, wound so that face normals point inward.
pub fn inward_sphere(level: usize, r: f64) -> semidirect::surface::TriMesh {
    let mut v: Vec<[f64; 3]> = vec![
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ];
    let mut f: Vec<[usize; 3]> = vec![
        [0, 2, 4],
        [2, 1, 4],
        [1, 3, 4],
        [3, 0, 4],
        [2, 0, 5],
        [1, 2, 5],
        [3, 1, 5],
        [0, 3, 5],
    ];
    for _ in 0..level {
        let mut cache = std::collections::HashMap::new();
        let mut mid = |i: usize, j: usize, v: &mut Vec<[f64; 3]>| -> usize {
            let key = (i.min(j), i.max(j));
            *cache.entry(key).or_insert_with(|| {
                let m = [0, 1, 2].map(|k| 0.5 * (v[i][k] + v[j][k]));
                let n = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
                v.push([m[0] / n, m[1] / n, m[2] / n]);
                v.len() - 1
            })
        };
        let mut nf = Vec::with_capacity(4 * f.len());
        for t in &f {
            let a = mid(t[0], t[1], &mut v);
            let b = mid(t[1], t[2], &mut v);
            let c = mid(t[2], t[0], &mut v);
            nf.push([t[0], a, c]);
            nf.push([a, t[1], b]);
            nf.push([c, b, t[2]]);
            nf.push([a, b, c]);
        }
        f = nf;
    }
    let verts = v.iter().map(|p| GroupPoint::new(r * p[0], r * p[1], r * p[2])).collect();
    // outward winding above; reverse for inward normals
    let faces = f.iter().map(|t| [t[0], t[2], t[1]]).collect();
    semidirect::surface::TriMesh::new(verts, faces).unwrap()
}

/// Structured mesh of an immersion over `[u0,u1] x [v0,v1]`, counterclockwise
/// in the parameter plane.
pub fn immersion_mesh(s: &dyn Immersion, u: (f64, f64), v: (f64, f64), nu: usize, nv: usize) -> semidirect::surface::TriMesh {
    let mut verts = Vec::new();
    for j in 0..=nv {
        for i in 0..=nu {
            let uu = u.0 + (u.1 - u.0) * i as f64 / nu as f64;
            let vv = v.0 + (v.1 - v.0) * j as f64 / nv as f64;
            verts.push(s.position(uu, vv));
        }
    }
    let id = |i: usize, j: usize| j * (nu + 1) + i;
    let mut faces = Vec::new();
    for j in 0..nv {
        for i in 0..nu {
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    semidirect::surface::TriMesh::new(verts, faces).unwrap()
}
