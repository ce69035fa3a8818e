//! Derived kernels and closed forms: log-Hessians, the curvature kernel
//! K^{α+β}·(∂ᵢ∂̄ⱼ log K), jet kernels, the explicit ball matrix 𝕂_λ, and the
//! φ-vector Gram factorization of the curvature kernel.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{KernelError, Result};
use crate::expr::{eval_jet, KernelExpr, DEFAULT_ORDER_CAP};
use crate::geometry::{MultiIndex, Point};
use crate::linalg::CMat;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureParams {
    alpha: f64,
    beta: f64,
}

impl CurvatureParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        for (name, v) in [("α", alpha), ("β", beta)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(KernelError::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

fn require_scalar(e: &KernelExpr) -> Result<()> {
    if e.shape().is_scalar() {
        Ok(())
    } else {
        Err(KernelError::Shape(format!("expected a scalar kernel, got `{e}`")))
    }
}

/// (K·∂ᵢ∂̄ⱼK − ∂ᵢK·∂̄ⱼK)/K², from first-order jets only.
pub fn log_hessian_eval(expr: &KernelExpr, z: &Point, w: &Point) -> Result<CMat> {
    require_scalar(expr)?;
    let t = eval_jet(expr, z, w, 1)?;
    let m = expr.dim();
    let k = t.value()[(0, 0)];
    if k == Complex64::new(0.0, 0.0) {
        return Err(KernelError::ZeroKernelValue);
    }
    let zero = MultiIndex::zero(m);
    let d = |i: &MultiIndex, j: &MultiIndex| t.entry(i, j).expect("order-1 table")[(0, 0)];
    Ok(CMat::from_fn(m, m, |i, j| {
        let (ei, ej) = (MultiIndex::unit(m, i), MultiIndex::unit(m, j));
        (k * d(&ei, &ej) - d(&ei, &zero) * d(&zero, &ej)) / (k * k)
    }))
}

/// The m×m kernel 𝕂^(α,β) = K^{α+β}·(∂ᵢ∂̄ⱼ log K).
pub fn curvature_kernel(expr: &KernelExpr, params: CurvatureParams) -> Result<KernelExpr> {
    KernelExpr::curvature(expr.clone(), params.alpha, params.beta)
}

/// ⟨φⱼ(w), φᵢ(z)⟩ where φᵢ(w) = β ∂̄ᵢK^α(·,w)⊗K^β(·,w) − α K^α(·,w)⊗∂̄ᵢK^β(·,w),
/// expanded through the jets of K^α and K^β. Indices are zero-based.
pub fn phi_gram_entry(expr: &KernelExpr, params: CurvatureParams, z: &Point, w: &Point, i: usize, j: usize) -> Result<Complex64> {
    require_scalar(expr)?;
    let m = expr.dim();
    if i >= m || j >= m {
        return Err(KernelError::InvalidParameter(format!("index ({i}, {j}) out of range for dimension {m}")));
    }
    let (a, b) = (params.alpha, params.beta);
    let ta = eval_jet(&KernelExpr::pow(expr.clone(), a)?, z, w, 1)?;
    let tb = eval_jet(&KernelExpr::pow(expr.clone(), b)?, z, w, 1)?;
    let (o, ei, ej) = (MultiIndex::zero(m), MultiIndex::unit(m, i), MultiIndex::unit(m, j));
    let ka = |x: &MultiIndex, y: &MultiIndex| ta.entry(x, y).expect("order-1 table")[(0, 0)];
    let kb = |x: &MultiIndex, y: &MultiIndex| tb.entry(x, y).expect("order-1 table")[(0, 0)];
    Ok(ka(&ei, &ej) * kb(&o, &o) * (b * b) + ka(&o, &o) * kb(&ei, &ej) * (a * a)
        - (ka(&ei, &o) * kb(&o, &ej) + ka(&o, &ej) * kb(&ei, &o)) * (a * b))
}

/// (K₁·∂^i∂̄^j K₂) over |i|,|j| ≤ k in graded-lex order.
pub fn jet_kernel(k1: &KernelExpr, k2: &KernelExpr, k: usize) -> Result<KernelExpr> {
    if k > DEFAULT_ORDER_CAP {
        return Err(KernelError::OrderCap { order: k, cap: DEFAULT_ORDER_CAP });
    }
    KernelExpr::jet(k1.clone(), k2.clone(), k)
}

/// 𝕂_λ(z, w) = (1 − ⟨z,w⟩)^{−λ}·M(z, w), written out by hand.
pub fn ball_curvature_closed_form(m: usize, lambda: f64, z: &Point, w: &Point) -> Result<CMat> {
    if m < 2 {
        return Err(KernelError::InvalidParameter("ball curvature needs m ≥ 2".into()));
    }
    for p in [z, w] {
        if p.dim() != m {
            return Err(KernelError::DimensionMismatch { expected: m, actual: p.dim() });
        }
    }
    let base = Complex64::new(1.0, 0.0) - z.inner(w);
    if base.norm() == 0.0 {
        return Err(KernelError::Domain("⟨z, w⟩ = 1".into()));
    }
    let pref = (-lambda * base.ln()).exp();
    let (zc, wc) = (z.coords(), w.coords());
    Ok(CMat::from_fn(m, m, |a, b| {
        let entry = if a == b {
            let mut s = Complex64::new(1.0, 0.0);
            for j in (0..m).filter(|&j| j != a) {
                s -= zc[j] * wc[j].conj();
            }
            s
        } else {
            zc[b] * wc[a].conj()
        };
        pref * entry
    }))
}

/// First two diagonal Taylor coefficients (c₀, c₁) of K^t·∂∂̄ log K for
/// K = 1 + Σ aₙ (z w̄)ⁿ, read off the jet of that kernel at the origin.
pub fn series_head_coefficients(a: &[f64], t: f64) -> Result<(f64, f64)> {
    let base = KernelExpr::diagonal_series(a.to_vec())?;
    let k = KernelExpr::wallach_kernel(base, t)?;
    let o = Point::origin(1);
    let table = eval_jet(&k, &o, &o, 1)?;
    let e = MultiIndex::unit(1, 0);
    let c0 = table.value()[(0, 0)];
    // ∂∂̄ at the origin is 1!·1! times the z w̄ coefficient
    let c1 = table.entry(&e, &e).expect("order-1 table")[(0, 0)];
    Ok((c0.re, c1.re))
}
