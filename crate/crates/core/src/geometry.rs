//! Points of ℂ^m, multi-indices, sampling domains and seeded point sampling.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{KernelError, Result};

pub const DEFAULT_SAMPLE_RADIUS: f64 = 0.8;

/// A point of ℂ^m.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<Complex64>,
}

impl Point {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(KernelError::InvalidParameter("a point needs at least one coordinate".into()));
        }
        Ok(Self { coords })
    }

    pub fn origin(m: usize) -> Self {
        assert!(m >= 1, "ambient dimension must be positive");
        Self { coords: vec![Complex64::new(0.0, 0.0); m] }
    }

    pub fn from_reals(xs: &[f64]) -> Result<Self> {
        Self::new(xs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_modulus(&self) -> f64 {
        self.coords.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// ⟨self, other⟩ = Σ selfᵢ · conj(otherᵢ).
    pub fn inner(&self, other: &Point) -> Complex64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| a * b.conj()).sum()
    }

    /// Concatenation (z, ζ) used by tensor-product kernels.
    pub fn concat(&self, other: &Point) -> Point {
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        Point { coords }
    }

    pub fn split_at(&self, m: usize) -> (Point, Point) {
        let (a, b) = self.coords.split_at(m);
        (Point { coords: a.to_vec() }, Point { coords: b.to_vec() })
    }
}

impl From<Complex64> for Point {
    fn from(z: Complex64) -> Self {
        Point { coords: vec![z] }
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.coords.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Point::new(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
            .map_err(serde::de::Error::custom)
    }
}

/// A multi-index i ∈ ℤ₊^m.
///
/// Ordering is graded lexicographic: lower total degree first, then a larger
/// leading entry first, so `(1,0) < (0,1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zero(m: usize) -> Self {
        MultiIndex(vec![0; m])
    }

    /// The unit multi-index with a one in slot `i` (zero-based).
    pub fn unit(m: usize, i: usize) -> Self {
        let mut e = vec![0; m];
        e[i] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    /// Componentwise `self ≤ other`.
    pub fn le_componentwise(&self, other: &MultiIndex) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// i! = i₁!⋯i_m!
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&e| (1..=e).map(f64::from).product::<f64>()).product()
    }

    pub fn checked_add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// All multi-indices of length `m` with |i| ≤ `max_order`, in graded
/// lexicographic order. There are binom(m + max_order, m) of them.
pub fn enumerate_multi_indices(m: usize, max_order: usize) -> Vec<MultiIndex> {
    assert!(m >= 1, "multi-index length must be positive");
    let mut out = Vec::new();
    let mut buf = vec![0u32; m];
    for degree in 0..=max_order {
        compositions(degree as u32, 0, &mut buf, &mut out);
    }
    out
}

fn compositions(remaining: u32, slot: usize, buf: &mut [u32], out: &mut Vec<MultiIndex>) {
    if slot + 1 == buf.len() {
        buf[slot] = remaining;
        out.push(MultiIndex(buf.to_vec()));
        return;
    }
    for e in (0..=remaining).rev() {
        buf[slot] = e;
        compositions(remaining - e, slot + 1, buf, out);
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "dim")]
pub enum DomainKind {
    UnitDisc,
    UnitBall(usize),
    Polydisc(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub sample_radius: f64,
}

impl DomainSpec {
    pub fn new(kind: DomainKind, sample_radius: f64) -> Result<Self> {
        if !(sample_radius > 0.0 && sample_radius < 1.0) {
            return Err(KernelError::InvalidParameter(format!(
                "sample radius must lie in (0,1), got {sample_radius}"
            )));
        }
        match kind {
            DomainKind::UnitBall(0) | DomainKind::Polydisc(0) => {
                return Err(KernelError::InvalidParameter("domain dimension must be positive".into()))
            }
            _ => {}
        }
        Ok(Self { kind, sample_radius })
    }

    pub fn disc() -> Self {
        Self { kind: DomainKind::UnitDisc, sample_radius: DEFAULT_SAMPLE_RADIUS }
    }

    pub fn ball(m: usize) -> Self {
        Self::new(DomainKind::UnitBall(m), DEFAULT_SAMPLE_RADIUS).expect("positive dimension")
    }

    pub fn polydisc(m: usize) -> Self {
        Self::new(DomainKind::Polydisc(m), DEFAULT_SAMPLE_RADIUS).expect("positive dimension")
    }

    pub fn with_radius(self, sample_radius: f64) -> Result<Self> {
        Self::new(self.kind, sample_radius)
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            DomainKind::UnitDisc => 1,
            DomainKind::UnitBall(m) | DomainKind::Polydisc(m) => m,
        }
    }

    /// Membership in the open domain itself (not the sampling sub-domain).
    pub fn contains(&self, z: &Point) -> bool {
        if z.dim() != self.dim() {
            return false;
        }
        match self.kind {
            DomainKind::UnitDisc | DomainKind::UnitBall(_) => z.norm() < 1.0,
            DomainKind::Polydisc(_) => z.max_modulus() < 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

/// Uniform in the disc of radius `r`.
pub(crate) fn uniform_disc<R: Rng + ?Sized>(rng: &mut R, r: f64) -> Complex64 {
    let rho = r * rng.random::<f64>().sqrt();
    let theta = std::f64::consts::TAU * rng.random::<f64>();
    Complex64::from_polar(rho, theta)
}

/// Deterministic sample of `count` points inside the closed sub-domain of
/// radius `domain.sample_radius`: uniform on the polydisc of that radius,
/// with rejection into the ball for ball domains.
pub fn sample_points(domain: &DomainSpec, count: usize, seed: RngSeed) -> Vec<Point> {
    let mut rng = seed.rng();
    sample_points_with(domain, count, &mut rng)
}

pub(crate) fn sample_points_with<R: Rng + ?Sized>(domain: &DomainSpec, count: usize, rng: &mut R) -> Vec<Point> {
    let m = domain.dim();
    let r = domain.sample_radius;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let coords: Vec<Complex64> = (0..m).map(|_| uniform_disc(rng, r)).collect();
        let p = Point { coords };
        let keep = match domain.kind {
            DomainKind::UnitBall(_) | DomainKind::UnitDisc => p.norm() <= r,
            DomainKind::Polydisc(_) => true,
        };
        if keep {
            out.push(p);
        }
    }
    out
}
