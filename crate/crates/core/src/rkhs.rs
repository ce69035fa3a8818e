//! Finite combinations of derivative sections ∂̄^j K(·, w)η and their inner
//! products, which the reproducing property turns into jet lookups:
//!
//! ⟨∂̄^j K(·,w)η, ∂̄^i K(·,v)ξ⟩ = ⟨(∂^i ∂̄^j K)(v, w) η, ξ⟩.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{KernelError, Result};
use crate::expr::{eval_jet, KernelExpr, Polynomial, DEFAULT_ORDER_CAP};
use crate::geometry::{DomainSpec, MultiIndex, Point};
use crate::positivity::{all_psd, check_families, check_resolution, PointFamily};

/// One term c·∂̄^index K(·, base)·dir.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Section {
    #[serde(with = "complex_pair")]
    pub coef: Complex64,
    pub base: Point,
    pub index: Vec<u32>,
    #[serde(with = "complex_vec")]
    pub dir: Vec<Complex64>,
}

mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(c: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [c.re, c.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

mod complex_vec {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        Ok(Vec::<[f64; 2]>::deserialize(d)?.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

impl Section {
    pub fn new(coef: Complex64, base: Point, index: MultiIndex, dir: Vec<Complex64>) -> Self {
        Self { coef, base, index: index.entries().to_vec(), dir }
    }

    pub fn multi_index(&self) -> MultiIndex {
        MultiIndex::new(self.index.clone())
    }
}

/// An element of the reproducing kernel Hilbert space of `kernel`.
#[derive(Debug, Clone, PartialEq)]
pub struct RkhsElement {
    kernel: KernelExpr,
    terms: Vec<Section>,
}

impl RkhsElement {
    pub fn new(kernel: KernelExpr, terms: Vec<Section>) -> Result<Self> {
        let (m, k) = (kernel.dim(), kernel.size());
        for t in &terms {
            kernel.check_point(&t.base)?;
            if t.index.len() != m {
                return Err(KernelError::DimensionMismatch { expected: m, actual: t.index.len() });
            }
            if t.dir.len() != k {
                return Err(KernelError::DimensionMismatch { expected: k, actual: t.dir.len() });
            }
            let order = t.multi_index().order();
            if order > DEFAULT_ORDER_CAP {
                return Err(KernelError::OrderCap { order, cap: DEFAULT_ORDER_CAP });
            }
            let len: f64 = t.dir.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if (len - 1.0).abs() > 1e-12 {
                return Err(KernelError::InvalidParameter(format!("direction must be a unit vector, has length {len}")));
            }
            if !(t.coef.re.is_finite() && t.coef.im.is_finite()) {
                return Err(KernelError::InvalidParameter("coefficient must be finite".into()));
            }
        }
        Ok(Self { kernel, terms })
    }

    pub fn zero(kernel: KernelExpr) -> Self {
        Self { kernel, terms: Vec::new() }
    }

    /// K(·, w)·e₀ for scalar kernels.
    pub fn kernel_section(kernel: KernelExpr, w: Point) -> Result<Self> {
        let m = kernel.dim();
        let k = kernel.size();
        let mut dir = vec![Complex64::new(0.0, 0.0); k];
        dir[0] = Complex64::new(1.0, 0.0);
        Self::new(kernel, vec![Section::new(Complex64::new(1.0, 0.0), w, MultiIndex::zero(m), dir)])
    }

    pub fn kernel(&self) -> &KernelExpr {
        &self.kernel
    }

    pub fn terms(&self) -> &[Section] {
        &self.terms
    }

    /// Terms as JSON: `[{coef, base, index, dir}, ...]`.
    pub fn terms_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.terms).expect("sections serialize")
    }

    pub fn from_terms_json(kernel: KernelExpr, value: serde_json::Value) -> Result<Self> {
        let terms: Vec<Section> = serde_json::from_value(value).map_err(|e| KernelError::InvalidParameter(format!("bad element JSON: {e}")))?;
        Self::new(kernel, terms)
    }
}

/// Conjugate-linear in the second argument.
pub fn inner_product(e1: &RkhsElement, e2: &RkhsElement) -> Result<Complex64> {
    if e1.kernel != e2.kernel {
        return Err(KernelError::KernelMismatch);
    }
    let kernel = &e1.kernel;
    let mut acc = Complex64::new(0.0, 0.0);
    for b in &e2.terms {
        let i = b.multi_index();
        for a in &e1.terms {
            let j = a.multi_index();
            let order = i.order().max(j.order());
            let table = eval_jet(kernel, &b.base, &a.base, order)?;
            let d = table.entry(&i, &j).expect("index within table order");
            let v = d.apply(&a.dir);
            let s: Complex64 = v.iter().zip(&b.dir).map(|(x, y)| x * y.conj()).sum();
            acc += a.coef * b.coef.conj() * s;
        }
    }
    Ok(acc)
}

/// Squared norms below −1e−10 (relative to the size of the element) mean the
/// kernel is not non-negative definite on the span.
pub fn norm(e: &RkhsElement) -> Result<f64> {
    let sq = inner_product(e, e)?.re;
    let scale: f64 = e.terms.iter().map(|t| t.coef.norm_sqr()).sum::<f64>().max(1.0);
    if sq < -1e-10 * scale {
        return Err(KernelError::NegativeNorm(sq));
    }
    Ok(sq.max(0.0).sqrt())
}

/// Norm of z₂⊗e₁ in the space of 𝕂_λ on 𝔹_m, obtained from the element
/// (λ−1)∂̄₂𝕂_λ(·,0)e₁ − ∂̄₁𝕂_λ(·,0)e₂ = (λ²−2λ)·z₂⊗e₁.
pub fn z2_tensor_e1_norm(m: usize, lambda: f64) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 2.0) {
        return Err(KernelError::InvalidParameter(format!("λ must exceed 2, got {lambda}")));
    }
    let e = z2_tensor_e1_element(m, lambda)?;
    Ok(norm(&e)? / (lambda * lambda - 2.0 * lambda).abs())
}

/// The combination (λ−1)∂̄₂𝕂_λ(·,0)e₁ − ∂̄₁𝕂_λ(·,0)e₂, for any λ.
pub fn z2_tensor_e1_element(m: usize, lambda: f64) -> Result<RkhsElement> {
    let k = KernelExpr::ball_curvature(m, lambda)?;
    let unit = |i: usize| {
        let mut v = vec![Complex64::new(0.0, 0.0); m];
        v[i] = Complex64::new(1.0, 0.0);
        v
    };
    let o = Point::origin(m);
    RkhsElement::new(
        k,
        vec![
            Section::new(Complex64::new(lambda - 1.0, 0.0), o.clone(), MultiIndex::unit(m, 1), unit(0)),
            Section::new(Complex64::new(-1.0, 0.0), o, MultiIndex::unit(m, 0), unit(1)),
        ],
    )
}

pub const MULTIPLIER_SEARCH_LIMIT: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierBound {
    pub kernel: String,
    pub function: String,
    pub bound: f64,
    pub bracket: (f64, f64),
    pub resolution: f64,
    pub families: Vec<PointFamily>,
    pub tol: f64,
}

/// Smallest sampled c ≥ 0 with (c² − f(z)conj(f(w)))·K non-negative definite.
pub fn multiplier_bound(
    expr: &KernelExpr,
    f: &Polynomial,
    domain: &DomainSpec,
    families: &[PointFamily],
    tol: f64,
    resolution: f64,
) -> Result<MultiplierBound> {
    if f.dim() != expr.dim() || domain.dim() != expr.dim() {
        return Err(KernelError::DimensionMismatch { expected: expr.dim(), actual: if f.dim() != expr.dim() { f.dim() } else { domain.dim() } });
    }
    if expr.size() != 1 {
        return Err(KernelError::Shape(format!("multiplier bound needs a scalar or 1×1 kernel, got `{expr}`")));
    }
    check_families(families)?;
    check_resolution(resolution)?;
    let samples: Vec<Vec<Point>> = families.iter().map(|fam| fam.sample(domain)).collect();
    let psd = |c: f64| -> Result<bool> {
        let k = KernelExpr::product(KernelExpr::defect(c, f.clone())?, expr.clone())?;
        all_psd(&k, &samples, tol)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    if psd(0.0)? {
        hi = 0.0;
    } else {
        while !psd(hi)? {
            if hi >= MULTIPLIER_SEARCH_LIMIT {
                return Err(KernelError::NoBracket { limit: MULTIPLIER_SEARCH_LIMIT });
            }
            lo = hi;
            hi = (2.0 * hi).min(MULTIPLIER_SEARCH_LIMIT);
        }
        while hi - lo > resolution {
            let mid = 0.5 * (lo + hi);
            if psd(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    Ok(MultiplierBound {
        kernel: expr.canonical(),
        function: f.to_string(),
        bound: hi,
        bracket: (lo, hi),
        resolution,
        families: families.to_vec(),
        tol,
    })
}
