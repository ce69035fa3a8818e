//! Möbius automorphisms of the ball and polydisc, their Jacobians, and
//! quasi-invariance residuals J(φ,z)·K(φz, φw)·J(φ,w)^* − K(z, w).

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{KernelError, Result};
use crate::expr::{eval, KernelExpr};
use crate::geometry::{uniform_disc, MultiIndex, Point};
use crate::jet::{Jet, JetSpace};
use crate::linalg::CMat;

/// Number of steps used to follow log det Dφ from the origin.
const LOG_DET_STEPS: usize = 16;

/// A holomorphic self-map evaluated on jets, so that derivatives come from
/// the same arithmetic as the map itself.
pub trait Automorphism {
    fn dim(&self) -> usize;

    /// Image coordinates as jets of the input coordinate jets.
    fn apply_jets(&self, z: &[Jet]) -> Result<Vec<Jet>>;

    /// Domain membership of the input.
    fn contains(&self, z: &Point) -> bool;

    fn apply(&self, z: &Point) -> Result<Point> {
        self.check(z)?;
        let space = JetSpace::get(self.dim(), 0, 0);
        let vars: Vec<Jet> = z.coords().iter().map(|&c| Jet::constant(&space, c)).collect();
        Point::new(self.apply_jets(&vars)?.iter().map(Jet::value).collect())
    }

    /// Dφ(z), entry (k, i) = ∂φ_k/∂z_i.
    fn derivative(&self, z: &Point) -> Result<CMat> {
        self.check(z)?;
        let m = self.dim();
        let space = JetSpace::get(m, 1, 0);
        let vars: Vec<Jet> = z.coords().iter().enumerate().map(|(i, &c)| Jet::z_var(&space, i, c)).collect();
        let out = self.apply_jets(&vars)?;
        let zero = MultiIndex::zero(m);
        Ok(CMat::from_fn(m, m, |k, i| out[k].derivative(&MultiIndex::unit(m, i), &zero)))
    }

    fn det_derivative(&self, z: &Point) -> Result<Complex64> {
        Ok(self.derivative(z)?.det())
    }

    /// log det Dφ(z) on the branch continued along the segment from 0 to z,
    /// starting from the principal value at 0.
    fn log_det_derivative(&self, z: &Point) -> Result<Complex64> {
        let origin = Point::origin(self.dim());
        let mut prev = self.det_derivative(&origin)?;
        if prev.norm() == 0.0 {
            return Err(KernelError::ZeroKernelValue);
        }
        let mut log = prev.ln();
        for s in 1..=LOG_DET_STEPS {
            let f = s as f64 / LOG_DET_STEPS as f64;
            let p = Point::new(z.coords().iter().map(|c| c * f).collect())?;
            let d = self.det_derivative(&p)?;
            if d.norm() == 0.0 {
                return Err(KernelError::ZeroKernelValue);
            }
            log += (d / prev).ln();
            prev = d;
        }
        Ok(log)
    }

    fn check(&self, z: &Point) -> Result<()> {
        if z.dim() != self.dim() {
            return Err(KernelError::DimensionMismatch { expected: self.dim(), actual: z.dim() });
        }
        if !self.contains(z) {
            return Err(KernelError::Domain(format!("point {:?} is outside the domain of the map", z.coords())));
        }
        Ok(())
    }
}

/// z ↦ U·φ_a(z), φ_a(z) = (a − P_a z − s_a Q_a z)/(1 − ⟨z,a⟩), s_a = √(1 − ‖a‖²).
///
/// φ_a is an involution exchanging 0 and a; note φ_0(z) = −z.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMobius")]
pub struct MobiusMap {
    a: Point,
    #[serde(rename = "U")]
    u: CMat,
}

#[derive(Deserialize)]
struct RawMobius {
    a: Point,
    #[serde(rename = "U")]
    u: CMat,
}

impl TryFrom<RawMobius> for MobiusMap {
    type Error = KernelError;

    fn try_from(raw: RawMobius) -> Result<Self> {
        MobiusMap::new(raw.a, raw.u)
    }
}

impl MobiusMap {
    pub fn new(a: Point, u: CMat) -> Result<Self> {
        let m = a.dim();
        if a.norm() >= 1.0 {
            return Err(KernelError::InvalidParameter(format!("base point must lie in the open ball, ‖a‖ = {}", a.norm())));
        }
        if u.rows() != m || u.cols() != m {
            return Err(KernelError::DimensionMismatch { expected: m, actual: u.rows() });
        }
        if u.unitarity_defect() > 1e-10 {
            return Err(KernelError::InvalidParameter(format!("U is not unitary (defect {:.3e})", u.unitarity_defect())));
        }
        Ok(Self { a, u })
    }

    /// The involution φ_a (U = I).
    pub fn involution(a: Point) -> Result<Self> {
        let m = a.dim();
        Self::new(a, CMat::identity(m))
    }

    /// The identity map: a = 0, U = −I.
    pub fn identity(m: usize) -> Self {
        Self { a: Point::origin(m), u: CMat::identity(m).scale(Complex64::new(-1.0, 0.0)) }
    }

    /// Base point uniform in the ball of radius `radius`, Haar-like unitary.
    pub fn random<R: Rng + ?Sized>(m: usize, radius: f64, rng: &mut R) -> Self {
        let a = loop {
            let p = Point::new((0..m).map(|_| uniform_disc(rng, radius)).collect()).expect("m ≥ 1");
            if p.norm() <= radius {
                break p;
            }
        };
        let u = CMat::random_unitary(m, rng);
        Self { a, u }
    }

    pub fn base_point(&self) -> &Point {
        &self.a
    }

    pub fn unitary(&self) -> &CMat {
        &self.u
    }

    /// Post-composition with another unitary: z ↦ V·U·φ_a(z).
    pub fn rotated(&self, v: &CMat) -> Result<Self> {
        Self::new(self.a.clone(), v * &self.u)
    }
}

impl Automorphism for MobiusMap {
    fn dim(&self) -> usize {
        self.a.dim()
    }

    fn contains(&self, z: &Point) -> bool {
        z.norm() < 1.0
    }

    fn apply_jets(&self, z: &[Jet]) -> Result<Vec<Jet>> {
        let m = self.dim();
        let space = z[0].space().clone();
        let a = self.a.coords();
        let a2: f64 = a.iter().map(|c| c.norm_sqr()).sum();
        let s = (1.0 - a2).sqrt();
        // ⟨z, a⟩
        let mut za = Jet::zero(&space);
        for (zi, ai) in z.iter().zip(a) {
            za = za.add(&zi.scale(ai.conj()));
        }
        let denom = za.scale(Complex64::new(-1.0, 0.0)).add_const(Complex64::new(1.0, 0.0)).recip()?;
        let phi: Vec<Jet> = (0..m)
            .map(|l| {
                // P_a z = a⟨z,a⟩/‖a‖², Q_a z = z − P_a z
                let pz = if a2 > 0.0 { za.scale(a[l] / a2) } else { Jet::zero(&space) };
                let qz = z[l].sub(&pz);
                pz.add(&qz.scale(Complex64::new(s, 0.0))).scale(Complex64::new(-1.0, 0.0)).add_const(a[l]).mul(&denom)
            })
            .collect();
        Ok((0..m)
            .map(|k| {
                let mut acc = Jet::zero(&space);
                for (l, p) in phi.iter().enumerate() {
                    acc = acc.add(&p.scale(self.u[(k, l)]));
                }
                acc
            })
            .collect())
    }
}

/// Coordinatewise disc automorphisms z_i ↦ e^{iθ_i}(a_i − z_i)/(1 − ā_i z_i).
#[derive(Debug, Clone, PartialEq)]
pub struct PolydiscMap {
    a: Vec<Complex64>,
    theta: Vec<f64>,
}

impl PolydiscMap {
    pub fn new(a: Vec<Complex64>, theta: Vec<f64>) -> Result<Self> {
        if a.is_empty() || a.len() != theta.len() {
            return Err(KernelError::DimensionMismatch { expected: a.len(), actual: theta.len() });
        }
        if a.iter().any(|c| c.norm() >= 1.0) {
            return Err(KernelError::InvalidParameter("polydisc base point must lie in the open polydisc".into()));
        }
        Ok(Self { a, theta })
    }
}

impl Automorphism for PolydiscMap {
    fn dim(&self) -> usize {
        self.a.len()
    }

    fn contains(&self, z: &Point) -> bool {
        z.max_modulus() < 1.0
    }

    fn apply_jets(&self, z: &[Jet]) -> Result<Vec<Jet>> {
        z.iter()
            .zip(self.a.iter().zip(&self.theta))
            .map(|(zi, (ai, th))| {
                let num = zi.scale(Complex64::new(-1.0, 0.0)).add_const(*ai);
                let den = zi.scale(-ai.conj()).add_const(Complex64::new(1.0, 0.0)).recip()?;
                Ok(num.mul(&den).scale(Complex64::from_polar(1.0, *th)))
            })
            .collect()
    }
}

/// z ↦ outer(inner(z)).
#[derive(Debug, Clone)]
pub struct Composed<A, B> {
    pub outer: A,
    pub inner: B,
}

impl<A: Automorphism, B: Automorphism> Automorphism for Composed<A, B> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn contains(&self, z: &Point) -> bool {
        self.inner.contains(z)
    }

    fn apply_jets(&self, z: &[Jet]) -> Result<Vec<Jet>> {
        self.outer.apply_jets(&self.inner.apply_jets(z)?)
    }
}

/// The holomorphic cocycle J(φ, z).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "t", rename_all = "snake_case")]
pub enum CocycleSpec {
    /// (det Dφ(z))^t times the identity.
    DetJacobianPower(f64),
    /// (det Dφ(z))^t·Dφ(z)^tr.
    CurvatureCocycle(f64),
}

impl CocycleSpec {
    pub fn value<M: Automorphism + ?Sized>(&self, phi: &M, z: &Point, size: usize) -> Result<CMat> {
        match *self {
            CocycleSpec::DetJacobianPower(t) => {
                let f = (phi.log_det_derivative(z)? * t).exp();
                Ok(CMat::identity(size).scale(f))
            }
            CocycleSpec::CurvatureCocycle(t) => {
                let f = (phi.log_det_derivative(z)? * t).exp();
                Ok(phi.derivative(z)?.transpose().scale(f))
            }
        }
    }
}

/// max over pairs of ‖J(z)K(φz,φw)J(w)^* − K(z,w)‖_F / (1 + ‖K(z,w)‖_F).
pub fn quasi_invariance_residual<M: Automorphism + ?Sized>(expr: &KernelExpr, cocycle: CocycleSpec, phi: &M, pairs: &[(Point, Point)]) -> Result<f64> {
    if phi.dim() != expr.dim() {
        return Err(KernelError::DimensionMismatch { expected: expr.dim(), actual: phi.dim() });
    }
    let k = expr.size();
    if matches!(cocycle, CocycleSpec::CurvatureCocycle(_)) && k != expr.dim() {
        return Err(KernelError::Shape(format!("curvature cocycle needs an m×m kernel, got {k}×{k}")));
    }
    let mut worst: f64 = 0.0;
    for (z, w) in pairs {
        let (pz, pw) = (phi.apply(z)?, phi.apply(w)?);
        let jz = cocycle.value(phi, z, k)?;
        let jw = cocycle.value(phi, w, k)?;
        let moved = &(&jz * &eval(expr, &pz, &pw)?) * &jw.adjoint();
        let here = eval(expr, z, w)?;
        worst = worst.max((&moved - &here).frobenius_norm() / (1.0 + here.frobenius_norm()));
    }
    Ok(worst)
}

/// Residual of the transformation rule of B^t·(∂ᵢ∂̄ⱼ log B) under (det Dφ)^t·Dφ^tr.
pub fn curvature_quasi_check<M: Automorphism + ?Sized>(base: &KernelExpr, t: f64, phi: &M, pairs: &[(Point, Point)]) -> Result<f64> {
    let k = KernelExpr::wallach_kernel(base.clone(), t)?;
    quasi_invariance_residual(&k, CocycleSpec::CurvatureCocycle(t), phi, pairs)
}
