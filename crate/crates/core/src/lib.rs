//! Numerical calculus for sesqui-analytic reproducing kernels.
//!
//! Kernels are described by [`KernelExpr`] trees (built directly or parsed
//! from the small DSL in [`expr`]), evaluated together with their mixed
//! Wirtinger derivatives by truncated Taylor arithmetic, and certified
//! non-negative definite on finite point samples through Hermitian
//! eigenvalue computations.

pub mod automorphism;
pub mod calculus;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod jet;
pub mod linalg;
pub mod oracle;
pub mod positivity;
pub mod repro;
pub mod rkhs;

pub use error::{KernelError, Result};
pub use expr::{eval, eval_jet, parse_kernel, JetTable, KernelExpr, Polynomial, Shape};
pub use geometry::{enumerate_multi_indices, sample_points, DomainKind, DomainSpec, MultiIndex, Point, RngSeed};
pub use linalg::{hermitian_eigenvalues, min_eigenvalue, CMat};
pub use automorphism::{Automorphism, CocycleSpec, MobiusMap};
pub use calculus::CurvatureParams;
pub use positivity::{GramReport, PointFamily, WallachEstimate};
pub use rkhs::{MultiplierBound, RkhsElement, Section};

/// Crate version, embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
