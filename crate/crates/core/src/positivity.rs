//! Gram matrices, non-negative definiteness verdicts, kernel ordering and
//! Wallach-set scans.
//!
//! A passing verdict is evidence over a finite sample; a failing verdict
//! exhibits a genuine negative direction and is therefore a proof.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{KernelError, Result};
use crate::expr::{eval, KernelExpr};
use crate::geometry::{sample_points, DomainSpec, Point, RngSeed};
use crate::linalg::{hermitian_eigenvalues, CMat};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_RESOLUTION: f64 = 0.01;

/// Block Gram matrix (K(z_p, z_q))_{p,q}, blocks of size k×k.
pub fn gram(expr: &KernelExpr, points: &[Point]) -> Result<CMat> {
    let n = points.len();
    let k = expr.size();
    let blocks: Vec<CMat> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (p, q) = (idx / n, idx % n);
            eval(expr, &points[p], &points[q]).map_err(|e| KernelError::AtPair { p, q, source: Box::new(e) })
        })
        .collect::<Result<_>>()?;
    let mut g = CMat::zeros(n * k, n * k);
    for (idx, b) in blocks.iter().enumerate() {
        g.set_block((idx / n) * k, (idx % n) * k, b);
    }
    Ok(g)
}

/// How much a verdict proves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Evidence {
    /// No negative direction found on this sample.
    SampledEvidence,
    /// A negative eigenvalue beyond tolerance: the kernel is not NND.
    NegativeDirection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramReport {
    pub kernel: String,
    pub points: Vec<Point>,
    pub min_eig: f64,
    pub psd: bool,
    pub tol: f64,
    pub seed: Option<u64>,
    pub size: usize,
    pub max_diag: f64,
    pub evidence: Evidence,
    pub eigenvalues: Vec<f64>,
}

pub fn psd_verdict(min_eig: f64, max_diag: f64, tol: f64) -> bool {
    min_eig >= -tol * (1.0 + max_diag)
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(())
    } else {
        Err(KernelError::InvalidParameter(format!("tolerance must be a non-negative number, got {tol}")))
    }
}

fn check_domain(expr: &KernelExpr, domain: &DomainSpec) -> Result<()> {
    if domain.dim() == expr.dim() {
        Ok(())
    } else {
        Err(KernelError::DimensionMismatch { expected: expr.dim(), actual: domain.dim() })
    }
}

/// Verdict on an explicit point set.
pub fn psd_check_points(expr: &KernelExpr, points: Vec<Point>, seed: Option<RngSeed>, tol: f64) -> Result<GramReport> {
    check_tol(tol)?;
    if points.is_empty() {
        return Err(KernelError::InvalidParameter("at least one point is required".into()));
    }
    let g = gram(expr, &points)?;
    let eigenvalues = hermitian_eigenvalues(&g)?;
    let max_diag = (0..g.rows()).map(|i| g[(i, i)].re.abs()).fold(0.0, f64::max);
    let min_eig = eigenvalues[0];
    let psd = psd_verdict(min_eig, max_diag, tol);
    Ok(GramReport {
        kernel: expr.canonical(),
        points,
        min_eig,
        psd,
        tol,
        seed: seed.map(|s| s.0),
        size: g.rows(),
        max_diag,
        evidence: if psd { Evidence::SampledEvidence } else { Evidence::NegativeDirection },
        eigenvalues,
    })
}

pub fn psd_check(expr: &KernelExpr, domain: &DomainSpec, n: usize, seed: RngSeed, tol: f64) -> Result<GramReport> {
    check_domain(expr, domain)?;
    if n == 0 {
        return Err(KernelError::InvalidParameter("point count must be positive".into()));
    }
    psd_check_points(expr, sample_points(domain, n, seed), Some(seed), tol)
}

/// Tests K₁ ⪯ K₂, i.e. non-negative definiteness of K₂ − K₁.
pub fn kernel_order_check(k1: &KernelExpr, k2: &KernelExpr, domain: &DomainSpec, n: usize, seed: RngSeed, tol: f64) -> Result<GramReport> {
    let diff = KernelExpr::difference(k2.clone(), k1.clone())?;
    psd_check(&diff, domain, n, seed, tol)
}

/// A seeded point sample of fixed size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointFamily {
    pub n: usize,
    pub seed: u64,
}

impl PointFamily {
    pub fn sample(&self, domain: &DomainSpec) -> Vec<Point> {
        sample_points(domain, self.n, RngSeed(self.seed))
    }
}

/// Three families of sizes 20, 30, 40 with consecutive seeds.
pub fn default_families(seed: u64) -> Vec<PointFamily> {
    vec![
        PointFamily { n: 20, seed },
        PointFamily { n: 30, seed: seed.wrapping_add(1) },
        PointFamily { n: 40, seed: seed.wrapping_add(2) },
    ]
}

/// Verdict of one kernel over several fixed samples: psd only if every sample passes.
pub(crate) fn all_psd(expr: &KernelExpr, samples: &[Vec<Point>], tol: f64) -> Result<bool> {
    for pts in samples {
        let g = gram(expr, pts)?;
        let eig = hermitian_eigenvalues(&g)?;
        let max_diag = (0..g.rows()).map(|i| g[(i, i)].re.abs()).fold(0.0, f64::max);
        if !psd_verdict(eig[0], max_diag, tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub(crate) fn check_families(families: &[PointFamily]) -> Result<()> {
    if families.is_empty() || families.iter().any(|f| f.n == 0) {
        return Err(KernelError::InvalidParameter("need at least one non-empty point family".into()));
    }
    Ok(())
}

pub(crate) fn check_resolution(resolution: f64) -> Result<()> {
    if resolution.is_finite() && resolution > 0.0 {
        Ok(())
    } else {
        Err(KernelError::InvalidParameter(format!("resolution must be positive, got {resolution}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallachEstimate {
    pub kernel: String,
    pub boundary: f64,
    pub bracket: (f64, f64),
    pub resolution: f64,
    pub verdicts: Vec<(f64, bool)>,
    pub families: Vec<PointFamily>,
    pub tol: f64,
}

/// Bisects for the boundary of {t : K^t·(∂ᵢ∂̄ⱼ log K) is NND}. Requires a
/// failing verdict at `t_lo` and a passing one at `t_hi`.
pub fn wallach_scan(
    base: &KernelExpr,
    t_lo: f64,
    t_hi: f64,
    domain: &DomainSpec,
    families: &[PointFamily],
    tol: f64,
    resolution: f64,
) -> Result<WallachEstimate> {
    check_domain(base, domain)?;
    check_tol(tol)?;
    check_families(families)?;
    check_resolution(resolution)?;
    if !(t_lo.is_finite() && t_hi.is_finite() && t_lo < t_hi) {
        return Err(KernelError::InvalidParameter(format!("need t_lo < t_hi, got [{t_lo}, {t_hi}]")));
    }
    let samples: Vec<Vec<Point>> = families.iter().map(|f| f.sample(domain)).collect();
    let verdict = |t: f64| -> Result<bool> { all_psd(&KernelExpr::wallach_kernel(base.clone(), t)?, &samples, tol) };

    let mut verdicts = Vec::new();
    let (mut lo, mut hi) = (t_lo, t_hi);
    let v_lo = verdict(lo)?;
    let v_hi = verdict(hi)?;
    verdicts.push((lo, v_lo));
    verdicts.push((hi, v_hi));
    if v_lo || !v_hi {
        return Err(KernelError::NoSignChange { lo, hi });
    }
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        let v = verdict(mid)?;
        verdicts.push((mid, v));
        if v {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(WallachEstimate {
        kernel: base.canonical(),
        boundary: 0.5 * (lo + hi),
        bracket: (lo, hi),
        resolution,
        verdicts,
        families: families.to_vec(),
        tol,
    })
}

/// Per-t verdicts for K^t on fixed samples.
pub fn ordinary_wallach_scan(base: &KernelExpr, ts: &[f64], domain: &DomainSpec, families: &[PointFamily], tol: f64) -> Result<Vec<(f64, bool)>> {
    check_domain(base, domain)?;
    check_tol(tol)?;
    check_families(families)?;
    if let Some(t) = ts.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        return Err(KernelError::InvalidParameter(format!("ordinary Wallach parameters must be positive, got {t}")));
    }
    let samples: Vec<Vec<Point>> = families.iter().map(|f| f.sample(domain)).collect();
    ts.iter().map(|&t| Ok((t, all_psd(&KernelExpr::pow(base.clone(), t)?, &samples, tol)?))).collect()
}
