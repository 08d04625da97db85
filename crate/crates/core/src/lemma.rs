//! Subharmonicity of `φ = 1/x3` on H-surfaces close to a leaf.
//!
//! For a conformal immersion with `f_z = A1 E1 + A2 E2 + A3 E3`,
//! `x3³ φ_{zz̄} = 2|A3|² - x3 A_{3z̄}`, which on an H-surface splits into four
//! terms. Each is bounded below using the isotropy of `(A1, A2, A3)`, giving
//! `x3³ φ_{zz̄} ≥ (2 - x3 D)|A3|²` with `D = |H| + |a-d|/2 + |b+c|/2`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{GeomError, Result};
use crate::group::{FrameVector, GroupPoint, Matrix2};
use crate::surface::curvature::discrete_mean_curvature;
use crate::surface::jet::{a3_zbar_rhs, conformal_defect, ConformalJet, DEFAULT_DEFECT_TOL};
use crate::surface::laplace::laplace_beltrami;
use crate::surface::measure::mean_edge_length;
use crate::surface::mesh::{ScalarField, TriMesh};

/// Default absolute/relative tolerance of the fuzzers.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default `K` in the mesh threshold `-K h`.
pub const DEFAULT_MESH_K: f64 = 10.0;
/// Largest `|H_discrete - H|` accepted as a CMC certificate.
pub const CMC_CERTIFICATE_TOL: f64 = 0.05;

const BATCH: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaConfig {
    pub a: Matrix2,
    pub h: f64,
    pub tol: f64,
}

impl LemmaConfig {
    pub fn new(a: Matrix2, h: f64) -> Result<Self> {
        if !h.is_finite() {
            return Err(GeomError::NonFinite("H"));
        }
        Ok(Self { a, h, tol: DEFAULT_TOL })
    }

    /// `|H| ≤ tr(A)/2`, the hypothesis of the lemma.
    pub fn in_regime(&self) -> bool {
        self.h.abs() <= 0.5 * self.a.trace()
    }

    pub fn c1(&self) -> f64 {
        c1_constant(&self.a, self.h)
    }
}

/// `D = |H| + |a-d|/2 + |b+c|/2`.
pub fn denominator(a: &Matrix2, h: f64) -> f64 {
    h.abs() + 0.5 * (a.a() - a.d()).abs() + 0.5 * (a.b() + a.c()).abs()
}

/// `C1 = 2 / D`, infinite when `D = 0`.
pub fn c1_constant(a: &Matrix2, h: f64) -> f64 {
    let d = denominator(a, h);
    if d == 0.0 {
        f64::INFINITY
    } else {
        2.0 / d
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaBreakdown {
    /// `(2 - H N3 x3)|A3|²`
    pub term1: f64,
    /// `x3((a+d)/2 - H N3)(|A1|² + |A2|²)`
    pub term2: f64,
    /// `x3((a-d)/2)(|A1|² - |A2|²)`
    pub term3: f64,
    /// `x3((b+c)/2)(A1 conj(A2) + conj(A1) A2)`
    pub term4: f64,
    /// `term1 + term2 + term3 + term4 = x3³ φ_{zz̄}`
    pub total: f64,
    /// Imaginary part of `A1 conj(A2) + conj(A1) A2` before it is dropped.
    pub imag_residue: f64,
}

fn check_jet(jet: &ConformalJet) -> Result<()> {
    let x3 = jet.point.x3;
    if !(x3 > 0.0) {
        return Err(GeomError::Precondition(format!("x3 = {x3} is not positive")));
    }
    let defect = conformal_defect(jet);
    if defect > DEFAULT_DEFECT_TOL * jet.lambda.max(1.0) {
        return Err(GeomError::Precondition(format!("conformality defect {defect:e}")));
    }
    Ok(())
}

pub fn lemma_breakdown(jet: &ConformalJet, cfg: &LemmaConfig) -> Result<LemmaBreakdown> {
    check_jet(jet)?;
    let a = &cfg.a;
    let x3 = jet.point.x3;
    let hn3 = cfg.h * jet.n3();
    let (p1, p2, p3) = (jet.a1.norm_sqr(), jet.a2.norm_sqr(), jet.a3.norm_sqr());
    let mixed = jet.a1 * jet.a2.conj() + jet.a1.conj() * jet.a2;
    let term1 = (2.0 - hn3 * x3) * p3;
    let term2 = x3 * (0.5 * (a.a() + a.d()) - hn3) * (p1 + p2);
    let term3 = x3 * (0.5 * (a.a() - a.d())) * (p1 - p2);
    let term4 = x3 * a.sym_offdiag() * mixed.re;
    Ok(LemmaBreakdown {
        term1,
        term2,
        term3,
        term4,
        total: term1 + term2 + term3 + term4,
        imag_residue: mixed.im,
    })
}

/// `x3³ φ_{zz̄} = 2|A3|² - x3 A_{3z̄}` with the closed form of `A_{3z̄}`.
pub fn direct_total(jet: &ConformalJet, cfg: &LemmaConfig) -> Result<Complex64> {
    check_jet(jet)?;
    let x3 = jet.point.x3;
    Ok(Complex64::new(2.0 * jet.a3.norm_sqr(), 0.0) - x3 * a3_zbar_rhs(jet, cfg.h, &cfg.a))
}

/// `(2 - x3 D)|A3|²`.
pub fn lower_bound(jet: &ConformalJet, cfg: &LemmaConfig) -> Result<f64> {
    check_jet(jet)?;
    Ok((2.0 - jet.point.x3 * denominator(&cfg.a, cfg.h)) * jet.a3.norm_sqr())
}

/// `A1`, `A2` with real and imaginary parts uniform in `[-1, 1]` and
/// `A3 = ± i sqrt(A1² + A2²)` (principal root, sign chosen at random).
pub fn random_isotropic_triple<R: Rng>(rng: &mut R) -> [Complex64; 3] {
    let mut c = || Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
    let a1 = c();
    let a2 = c();
    let root = Complex64::i() * (a1 * a1 + a2 * a2).sqrt();
    let a3 = if rng.gen_bool(0.5) { root } else { -root };
    [a1, a2, a3]
}

/// Runs `f` on `samples` draws split into batches, batch `k` using stream `k`
/// of the generator seeded with `seed`; results come back in batch order.
fn batched<T: Send>(
    samples: usize,
    seed: u64,
    f: impl Fn(&mut ChaCha8Rng, usize) -> T + Sync,
) -> Vec<T> {
    let batches = samples.div_ceil(BATCH);
    (0..batches)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let n = BATCH.min(samples - k * BATCH);
            f(&mut rng, n)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityReport {
    pub samples: usize,
    pub violations: usize,
    /// Smallest `(|A3|⁴ - (|A1|² - |A2|²)²) / λ²`.
    pub min_margin_diff: f64,
    /// Smallest `(|A3|⁴ - (A1 conj(A2) + conj(A1) A2)²) / λ²`.
    pub min_margin_mixed: f64,
}

/// Checks `|A3|⁴ ≥ (|A1|² - |A2|²)²` and `|A3|⁴ ≥ (A1 conj(A2) + conj(A1) A2)²`
/// on random isotropic triples, relative to `λ²`.
pub fn fuzz_inequalities(samples: usize, seed: u64, tol: f64) -> InequalityReport {
    let parts = batched(samples, seed, |rng, n| {
        let mut r = InequalityReport {
            samples: 0,
            violations: 0,
            min_margin_diff: f64::INFINITY,
            min_margin_mixed: f64::INFINITY,
        };
        for _ in 0..n {
            let t = random_isotropic_triple(rng);
            let (p1, p2, p3) = (t[0].norm_sqr(), t[1].norm_sqr(), t[2].norm_sqr());
            let lam2 = (p1 + p2 + p3).powi(2).max(f64::MIN_POSITIVE);
            let mixed = 2.0 * (t[0] * t[1].conj()).re;
            let m1 = (p3 * p3 - (p1 - p2).powi(2)) / lam2;
            let m2 = (p3 * p3 - mixed * mixed) / lam2;
            r.samples += 1;
            if m1 < -tol || m2 < -tol {
                r.violations += 1;
            }
            r.min_margin_diff = r.min_margin_diff.min(m1);
            r.min_margin_mixed = r.min_margin_mixed.min(m2);
        }
        r
    });
    parts.into_iter().fold(
        InequalityReport {
            samples: 0,
            violations: 0,
            min_margin_diff: f64::INFINITY,
            min_margin_mixed: f64::INFINITY,
        },
        |acc, r| InequalityReport {
            samples: acc.samples + r.samples,
            violations: acc.violations + r.violations,
            min_margin_diff: acc.min_margin_diff.min(r.min_margin_diff),
            min_margin_mixed: acc.min_margin_mixed.min(r.min_margin_mixed),
        },
    )
}

/// Where `N3` comes from in the jet fuzzer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum N3Mode {
    /// The normal of the sampled triple.
    Stored,
    /// A unit normal with `N3` cycling through `-1, 0, 1`, independent of the
    /// triple; the bound only uses `|N3| ≤ 1`.
    Adversarial,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JetFuzzReport {
    pub samples: usize,
    /// Smallest `x3³ φ_{zz̄}` seen.
    pub min_total: f64,
    /// Smallest `total - lower_bound`.
    pub min_margin: f64,
    /// Samples with `total < lower_bound - tol · max(1, λ)`.
    pub violations: usize,
    /// Largest `|breakdown total - direct total|`.
    pub max_decomposition_residual: f64,
    /// Largest imaginary residue of the mixed term or the direct total.
    pub max_imag_residue: f64,
    pub c1: f64,
    pub in_regime: bool,
}

/// Heights are drawn uniformly from `(0, C1]`, or `(0, 10]` when `C1` is
/// infinite.
pub fn fuzz_breakdown(cfg: &LemmaConfig, samples: usize, seed: u64, mode: N3Mode) -> Result<JetFuzzReport> {
    let c1 = cfg.c1();
    let top = if c1.is_finite() { c1 } else { 10.0 };
    let parts = batched(samples, seed, |rng, n| -> Result<JetFuzzReport> {
        let mut r = JetFuzzReport {
            samples: 0,
            min_total: f64::INFINITY,
            min_margin: f64::INFINITY,
            violations: 0,
            max_decomposition_residual: 0.0,
            max_imag_residue: 0.0,
            c1,
            in_regime: cfg.in_regime(),
        };
        for i in 0..n {
            let t = random_isotropic_triple(rng);
            let x3 = top * (1.0 - rng.gen::<f64>());
            let p = GroupPoint::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0), x3);
            let jet = match mode {
                N3Mode::Stored => match ConformalJet::from_isotropic(p, t) {
                    Ok(j) => j,
                    Err(GeomError::DegenerateJet(_)) => continue,
                    Err(e) => return Err(e),
                },
                N3Mode::Adversarial => {
                    let n3 = [-1.0, 0.0, 1.0][i % 3];
                    let normal = FrameVector::new((1.0f64 - n3 * n3).sqrt(), 0.0, n3);
                    match ConformalJet::new(p, t, normal) {
                        Ok(j) => j,
                        Err(GeomError::DegenerateJet(_)) => continue,
                        Err(e) => return Err(e),
                    }
                }
            };
            let b = lemma_breakdown(&jet, cfg)?;
            let lb = lower_bound(&jet, cfg)?;
            let direct = direct_total(&jet, cfg)?;
            let margin = b.total - lb;
            r.samples += 1;
            if margin < -cfg.tol * jet.lambda.max(1.0) {
                r.violations += 1;
            }
            r.min_total = r.min_total.min(b.total);
            r.min_margin = r.min_margin.min(margin);
            r.max_decomposition_residual = r.max_decomposition_residual.max((b.total - direct.re).abs());
            r.max_imag_residue = r.max_imag_residue.max(b.imag_residue.abs()).max(direct.im.abs());
        }
        Ok(r)
    });
    let mut acc = JetFuzzReport {
        samples: 0,
        min_total: f64::INFINITY,
        min_margin: f64::INFINITY,
        violations: 0,
        max_decomposition_residual: 0.0,
        max_imag_residue: 0.0,
        c1,
        in_regime: cfg.in_regime(),
    };
    for r in parts {
        let r = r?;
        acc.samples += r.samples;
        acc.violations += r.violations;
        acc.min_total = acc.min_total.min(r.min_total);
        acc.min_margin = acc.min_margin.min(r.min_margin);
        acc.max_decomposition_residual = acc.max_decomposition_residual.max(r.max_decomposition_residual);
        acc.max_imag_residue = acc.max_imag_residue.max(r.max_imag_residue);
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpnessReport {
    pub x3: f64,
    pub samples: usize,
    /// Jets whose lower bound is negative at this height.
    pub negative_bounds: usize,
    pub min_lower_bound: f64,
    /// Smallest actual `x3³ φ_{zz̄}`; it may stay positive, since the lemma
    /// is only a sufficient condition.
    pub min_total: f64,
}

/// Evaluates the bound at the fixed height `factor · C1` (`factor > 1`).
pub fn sharpness_probe(cfg: &LemmaConfig, factor: f64, samples: usize, seed: u64) -> Result<SharpnessReport> {
    let c1 = cfg.c1();
    if !c1.is_finite() {
        return Err(GeomError::InvalidArgument("C1 is infinite; the bound never degenerates".into()));
    }
    let x3 = factor * c1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = SharpnessReport {
        x3,
        samples: 0,
        negative_bounds: 0,
        min_lower_bound: f64::INFINITY,
        min_total: f64::INFINITY,
    };
    for _ in 0..samples {
        let t = random_isotropic_triple(&mut rng);
        let Ok(jet) = ConformalJet::from_isotropic(GroupPoint::new(0.0, 0.0, x3), t) else {
            continue;
        };
        let lb = lower_bound(&jet, cfg)?;
        let b = lemma_breakdown(&jet, cfg)?;
        r.samples += 1;
        if lb < 0.0 {
            r.negative_bounds += 1;
        }
        r.min_lower_bound = r.min_lower_bound.min(lb);
        r.min_total = r.min_total.min(b.total);
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshLemmaReport {
    /// Smallest `Δ_Σ(1/x3)` over interior vertices.
    pub min_laplacian: f64,
    /// Mean metric edge length.
    pub h: f64,
    /// `-K h`.
    pub threshold: f64,
    /// Fraction of interior vertices with `Δ_Σ(1/x3) < 0`.
    pub negative_fraction: f64,
    /// Largest `|H_discrete - H|` on the interior (the CMC certificate).
    pub cmc_deviation: f64,
    pub c1: f64,
    pub passed: bool,
    pub laplacian: ScalarField,
}

/// Discrete check of `Δ_Σ(1/x3) ≥ 0` on a mesh approximating an H-surface
/// with `0 < x3 ≤ C1`: passes when the minimum over interior vertices is at
/// least `-k h`.
pub fn verify_subharmonic_on_mesh(m: &TriMesh, cfg: &LemmaConfig, k: f64) -> Result<MeshLemmaReport> {
    let c1 = cfg.c1();
    for (i, p) in m.vertices().iter().enumerate() {
        if !(p.x3 > 0.0 && p.x3 <= c1) {
            return Err(GeomError::Precondition(format!(
                "vertex {i} has x3 = {} outside (0, C1 = {c1}]",
                p.x3
            )));
        }
    }
    let dc = discrete_mean_curvature(m, &cfg.a)?;
    let cmc_deviation = dc.max_deviation(cfg.h);
    if cmc_deviation > CMC_CERTIFICATE_TOL {
        return Err(GeomError::Precondition(format!(
            "mesh is not an H-surface: interior |H - {}| reaches {cmc_deviation}",
            cfg.h
        )));
    }
    let phi = ScalarField::inverse_height(m)?;
    let lap = laplace_beltrami(m, &phi, &cfg.a)?;
    let interior: Vec<usize> = m.interior_vertices().collect();
    if interior.is_empty() {
        return Err(GeomError::InvalidMesh("mesh has no interior vertices".into()));
    }
    let min_laplacian = interior.iter().map(|&i| lap.get(i)).fold(f64::INFINITY, f64::min);
    let negative = interior.iter().filter(|&&i| lap.get(i) < 0.0).count();
    let h = mean_edge_length(m, &cfg.a);
    let threshold = -k * h;
    Ok(MeshLemmaReport {
        min_laplacian,
        h,
        threshold,
        negative_fraction: negative as f64 / interior.len() as f64,
        cmc_deviation,
        c1,
        passed: min_laplacian >= threshold,
        laplacian: lap,
    })
}

/// `2|A3|² / x3³`, the value of `φ_{zz̄}` on a minimal surface in ℝ³.
pub fn euclidean_minimal_phi_zzbar(jet: &ConformalJet) -> f64 {
    2.0 * jet.a3.norm_sqr() / jet.point.x3.powi(3)
}
