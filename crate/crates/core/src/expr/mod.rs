//! The kernel expression language.
//!
//! A [`KernelExpr`] denotes a sesqui-analytic kernel K(z, w) on a domain in
//! ℂ^m, scalar or k×k matrix valued. Expressions are built through checked
//! constructors (or [`parse_kernel`]) so that dimensions and shapes are
//! always consistent; evaluation and jet differentiation live in [`eval`].

mod eval;
mod parse;
mod poly;

pub use eval::{eval, eval_jet, eval_jet_with_cap, JetTable, DEFAULT_ORDER_CAP};
pub use parse::parse_kernel;
pub use poly::Polynomial;

#[allow(unused_imports)]
pub(crate) use eval::{log_jet, value_jet};

use std::fmt;

use crate::error::{KernelError, Result};
use crate::geometry::{binomial, Point};

/// Largest jet order accepted by the `jet` constructor.
pub const MAX_JET_KERNEL_ORDER: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Scalar,
    /// k×k matrix valued. A 1×1 matrix kernel is still a matrix kernel.
    Matrix(usize),
}

impl Shape {
    pub fn size(self) -> usize {
        match self {
            Shape::Scalar => 1,
            Shape::Matrix(k) => k,
        }
    }

    pub fn is_scalar(self) -> bool {
        matches!(self, Shape::Scalar)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    /// (1 − z w̄)^{-1} on the disc.
    SzegoDisc,
    /// (1 − ⟨z, w⟩)^{-λ} on 𝔹_m.
    BallPower { m: usize, lambda: f64 },
    /// 1 + Σ_{n≥1} aₙ (z w̄)ⁿ on the disc.
    DiagonalSeries(Vec<f64>),
    /// (1 − ⟨z, w⟩)^{-λ} · M(z, w), M(z,w)_{ab} = δ_{ab}(1 − Σ_{j≠a} z_j w̄_j) + (1 − δ_{ab}) z_b w̄_a.
    BallCurvature { m: usize, lambda: f64 },
    /// c² − f(z) conj(f(w)).
    Defect { c: f64, f: Polynomial },
    Pow(Box<KernelExpr>, f64),
    Product(Box<KernelExpr>, Box<KernelExpr>),
    Sum(Box<KernelExpr>, Box<KernelExpr>),
    /// left − right.
    Difference(Box<KernelExpr>, Box<KernelExpr>),
    Tensor(Box<KernelExpr>, Box<KernelExpr>),
    LogHessian(Box<KernelExpr>),
    Curvature { child: Box<KernelExpr>, alpha: f64, beta: f64 },
    Jet { k1: Box<KernelExpr>, k2: Box<KernelExpr>, order: usize },
    Scale(Box<KernelExpr>, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelExpr {
    node: Node,
    dim: usize,
    shape: Shape,
}

fn finite(name: &str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(KernelError::InvalidParameter(format!("{name} must be finite, got {x}")))
    }
}

fn require_scalar(op: &str, e: &KernelExpr) -> Result<()> {
    if e.shape.is_scalar() {
        Ok(())
    } else {
        Err(KernelError::Shape(format!("{op} requires a scalar kernel, got {}x{} matrix kernel `{e}`", e.size(), e.size())))
    }
}

fn require_same_dim(op: &str, a: &KernelExpr, b: &KernelExpr) -> Result<()> {
    if a.dim == b.dim {
        Ok(())
    } else {
        Err(KernelError::Shape(format!("{op} of kernels on ℂ^{} and ℂ^{}", a.dim, b.dim)))
    }
}

impl KernelExpr {
    pub fn node(&self) -> &Node {
        &self.node
    }

    /// Ambient dimension m of the domain.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    /// Output size k (values are k×k matrices; 1 for scalar kernels).
    pub fn size(&self) -> usize {
        self.shape.size()
    }

    pub fn szego_disc() -> Self {
        Self { node: Node::SzegoDisc, dim: 1, shape: Shape::Scalar }
    }

    pub fn ball_power(m: usize, lambda: f64) -> Result<Self> {
        if m == 0 {
            return Err(KernelError::InvalidParameter("ball dimension must be positive".into()));
        }
        let lambda = finite("λ", lambda)?;
        Ok(Self { node: Node::BallPower { m, lambda }, dim: m, shape: Shape::Scalar })
    }

    /// Bergman kernel of 𝔹_m, (1 − ⟨z,w⟩)^{-(m+1)}.
    pub fn bergman_ball(m: usize) -> Result<Self> {
        Self::ball_power(m, (m + 1) as f64)
    }

    /// Bergman kernel of the disc as the square of the Szegő kernel.
    pub fn bergman_disc() -> Self {
        Self::pow(Self::szego_disc(), 2.0).expect("Szegő kernel is scalar")
    }

    pub fn diagonal_series(coeffs: Vec<f64>) -> Result<Self> {
        for &a in &coeffs {
            finite("series coefficient", a)?;
        }
        Ok(Self { node: Node::DiagonalSeries(coeffs), dim: 1, shape: Shape::Scalar })
    }

    /// The constant kernel 1 on the disc.
    pub fn constant_one() -> Self {
        Self::diagonal_series(Vec::new()).expect("empty series")
    }

    pub fn ball_curvature(m: usize, lambda: f64) -> Result<Self> {
        if m < 2 {
            return Err(KernelError::InvalidParameter("ball_curvature needs m ≥ 2".into()));
        }
        let lambda = finite("λ", lambda)?;
        Ok(Self { node: Node::BallCurvature { m, lambda }, dim: m, shape: Shape::Matrix(m) })
    }

    pub fn defect(c: f64, f: Polynomial) -> Result<Self> {
        let c = finite("c", c)?;
        if c < 0.0 {
            return Err(KernelError::InvalidParameter(format!("defect constant must be non-negative, got {c}")));
        }
        let dim = f.dim();
        Ok(Self { node: Node::Defect { c, f }, dim, shape: Shape::Scalar })
    }

    pub fn pow(child: KernelExpr, t: f64) -> Result<Self> {
        require_scalar("pow", &child)?;
        let t = finite("exponent", t)?;
        let dim = child.dim;
        Ok(Self { node: Node::Pow(Box::new(child), t), dim, shape: Shape::Scalar })
    }

    /// Pointwise product. At most one factor may be matrix valued.
    pub fn product(left: KernelExpr, right: KernelExpr) -> Result<Self> {
        require_same_dim("product", &left, &right)?;
        let shape = match (left.shape, right.shape) {
            (Shape::Scalar, s) | (s, Shape::Scalar) => s,
            _ => return Err(KernelError::Shape("product of two matrix kernels".into())),
        };
        let dim = left.dim;
        Ok(Self { node: Node::Product(Box::new(left), Box::new(right)), dim, shape })
    }

    pub fn sum(left: KernelExpr, right: KernelExpr) -> Result<Self> {
        require_same_dim("sum", &left, &right)?;
        if left.shape != right.shape {
            return Err(KernelError::Shape(format!("sum of {:?} and {:?} kernels", left.shape, right.shape)));
        }
        let (dim, shape) = (left.dim, left.shape);
        Ok(Self { node: Node::Sum(Box::new(left), Box::new(right)), dim, shape })
    }

    /// Pointwise difference, used for kernel order comparisons.
    pub fn difference(left: KernelExpr, right: KernelExpr) -> Result<Self> {
        require_same_dim("difference", &left, &right)?;
        if left.shape != right.shape {
            return Err(KernelError::Shape(format!("difference of {:?} and {:?} kernels", left.shape, right.shape)));
        }
        let (dim, shape) = (left.dim, left.shape);
        Ok(Self { node: Node::Difference(Box::new(left), Box::new(right)), dim, shape })
    }

    pub fn tensor(left: KernelExpr, right: KernelExpr) -> Result<Self> {
        require_scalar("tensor", &left)?;
        require_scalar("tensor", &right)?;
        let dim = left.dim + right.dim;
        Ok(Self { node: Node::Tensor(Box::new(left), Box::new(right)), dim, shape: Shape::Scalar })
    }

    pub fn log_hessian(child: KernelExpr) -> Result<Self> {
        require_scalar("log_hessian", &child)?;
        let dim = child.dim;
        Ok(Self { node: Node::LogHessian(Box::new(child)), dim, shape: Shape::Matrix(dim) })
    }

    pub fn curvature(child: KernelExpr, alpha: f64, beta: f64) -> Result<Self> {
        require_scalar("curvature", &child)?;
        for (name, v) in [("α", alpha), ("β", beta)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(KernelError::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        let dim = child.dim;
        Ok(Self { node: Node::Curvature { child: Box::new(child), alpha, beta }, dim, shape: Shape::Matrix(dim) })
    }

    pub fn jet(k1: KernelExpr, k2: KernelExpr, order: usize) -> Result<Self> {
        require_scalar("jet", &k1)?;
        require_scalar("jet", &k2)?;
        require_same_dim("jet", &k1, &k2)?;
        if order > MAX_JET_KERNEL_ORDER {
            return Err(KernelError::InvalidParameter(format!("jet order {order} exceeds {MAX_JET_KERNEL_ORDER}")));
        }
        let dim = k1.dim;
        let d = binomial(dim + order, dim);
        Ok(Self { node: Node::Jet { k1: Box::new(k1), k2: Box::new(k2), order }, dim, shape: Shape::Matrix(d) })
    }

    pub fn scale(child: KernelExpr, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(KernelError::InvalidParameter(format!("scale factor must be positive, got {c}")));
        }
        let (dim, shape) = (child.dim, child.shape);
        Ok(Self { node: Node::Scale(Box::new(child), c), dim, shape })
    }

    /// K^{t}·(∂ᵢ∂̄ⱼ log K), the kernel whose positivity defines the
    /// generalized Wallach set (K^{t−2}𝕂 with 𝕂 = K²∂∂̄ log K).
    pub fn wallach_kernel(base: KernelExpr, t: f64) -> Result<Self> {
        let lh = Self::log_hessian(base.clone())?;
        Self::product(Self::pow(base, t)?, lh)
    }

    /// Checks that `z` lies in the domain where this expression is defined.
    pub fn check_point(&self, z: &Point) -> Result<()> {
        if z.dim() != self.dim {
            return Err(KernelError::DimensionMismatch { expected: self.dim, actual: z.dim() });
        }
        match &self.node {
            Node::SzegoDisc | Node::DiagonalSeries(_) | Node::BallPower { .. } | Node::BallCurvature { .. } => {
                if z.norm() < 1.0 {
                    Ok(())
                } else {
                    Err(KernelError::Domain(format!("‖z‖ = {} is not < 1", z.norm())))
                }
            }
            Node::Defect { .. } => Ok(()),
            Node::Tensor(l, r) => {
                let (a, b) = z.split_at(l.dim);
                l.check_point(&a)?;
                r.check_point(&b)
            }
            Node::Pow(c, _) | Node::LogHessian(c) | Node::Scale(c, _) | Node::Curvature { child: c, .. } => c.check_point(z),
            Node::Product(a, b) | Node::Sum(a, b) | Node::Difference(a, b) | Node::Jet { k1: a, k2: b, .. } => {
                a.check_point(z)?;
                b.check_point(z)
            }
        }
    }

    /// Canonical DSL text; `parse_kernel(&e.to_string()) == Ok(e)`.
    pub fn canonical(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for KernelExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.node {
            Node::SzegoDisc => write!(f, "szego_disc()"),
            Node::BallPower { m, lambda } if *lambda == (*m + 1) as f64 => write!(f, "bergman_ball({m})"),
            Node::BallPower { m, lambda } => write!(f, "ball_power({m}, {lambda})"),
            Node::DiagonalSeries(a) => {
                write!(f, "diagonal_series([")?;
                for (k, x) in a.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "])")
            }
            Node::BallCurvature { m, lambda } => write!(f, "ball_curvature({m}, {lambda})"),
            Node::Defect { c, f: p } => write!(f, "defect({c}, {p})"),
            Node::Pow(c, t) => write!(f, "pow({c}, {t})"),
            Node::Product(a, b) => write!(f, "product({a}, {b})"),
            Node::Sum(a, b) => write!(f, "sum({a}, {b})"),
            Node::Difference(a, b) => write!(f, "difference({a}, {b})"),
            Node::Tensor(a, b) => write!(f, "tensor({a}, {b})"),
            Node::LogHessian(c) => write!(f, "log_hessian({c})"),
            Node::Curvature { child, alpha, beta } => write!(f, "curvature({child}, {alpha}, {beta})"),
            Node::Jet { k1, k2, order } => write!(f, "jet({k1}, {k2}, {order})"),
            Node::Scale(c, s) => write!(f, "scale({c}, {s})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_and_dims() {
        let s = KernelExpr::szego_disc();
        let c = KernelExpr::curvature(s.clone(), 1.0, 1.0).unwrap();
        assert_eq!((c.dim(), c.size()), (1, 1));
        assert!(!c.shape().is_scalar());

        let b = KernelExpr::bergman_ball(3).unwrap();
        assert_eq!(KernelExpr::log_hessian(b.clone()).unwrap().size(), 3);
        let t = KernelExpr::tensor(s.clone(), b).unwrap();
        assert_eq!(t.dim(), 4);
        let j = KernelExpr::jet(t.clone(), t, 2).unwrap();
        assert_eq!(j.size(), binomial(6, 4));
    }

    #[test]
    fn scalar_only_combinators_reject_matrices() {
        let lh = KernelExpr::log_hessian(KernelExpr::szego_disc()).unwrap();
        assert!(matches!(KernelExpr::pow(lh.clone(), 2.0), Err(KernelError::Shape(_))));
        assert!(matches!(KernelExpr::tensor(lh.clone(), KernelExpr::szego_disc()), Err(KernelError::Shape(_))));
        assert!(matches!(KernelExpr::product(lh.clone(), lh.clone()), Err(KernelError::Shape(_))));
        assert!(matches!(KernelExpr::sum(lh, KernelExpr::szego_disc()), Err(KernelError::Shape(_))));
        // scalar × matrix is fine
        let lh = KernelExpr::log_hessian(KernelExpr::szego_disc()).unwrap();
        assert!(KernelExpr::product(KernelExpr::szego_disc(), lh).is_ok());
    }

    #[test]
    fn parameter_validation() {
        assert!(KernelExpr::curvature(KernelExpr::szego_disc(), 0.0, 1.0).is_err());
        assert!(KernelExpr::scale(KernelExpr::szego_disc(), -1.0).is_err());
        assert!(KernelExpr::ball_curvature(1, 3.0).is_err());
        assert!(KernelExpr::ball_power(2, f64::NAN).is_err());
        assert!(KernelExpr::sum(KernelExpr::szego_disc(), KernelExpr::bergman_ball(2).unwrap()).is_err());
    }

    #[test]
    fn domain_checks() {
        let k = KernelExpr::tensor(KernelExpr::szego_disc(), KernelExpr::szego_disc()).unwrap();
        let inside = Point::from_reals(&[0.9, 0.9]).unwrap();
        assert!(k.check_point(&inside).is_ok());
        let b = KernelExpr::bergman_ball(2).unwrap();
        assert!(matches!(b.check_point(&inside), Err(KernelError::Domain(_))));
        assert!(matches!(b.check_point(&Point::origin(3)), Err(KernelError::DimensionMismatch { .. })));
    }
}
