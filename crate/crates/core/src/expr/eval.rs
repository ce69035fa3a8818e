//! Pointwise evaluation and jet propagation.
//!
//! Every node propagates a truncated Taylor jet in (z, w̄). Powers and
//! log-Hessians go through a *continuous* logarithm: built-in kernels supply
//! their own analytic logarithm (−λ log(1 − ⟨z,w⟩) for ball powers), powers
//! and products combine logarithms additively, and only kernels without a
//! known logarithm fall back to the principal branch of their value, which
//! must then lie in the open right half-plane.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::{KernelExpr, Node};
use crate::error::{KernelError, Result};
use crate::geometry::{enumerate_multi_indices, MultiIndex, Point};
use crate::jet::{Jet, JetSpace};
use crate::linalg::CMat;

pub const DEFAULT_ORDER_CAP: usize = 4;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// k×k matrix of jets, row-major.
#[derive(Debug, Clone)]
pub(crate) struct MatJet {
    k: usize,
    entries: Vec<Jet>,
}

impl MatJet {
    fn scalar(j: Jet) -> Self {
        MatJet { k: 1, entries: vec![j] }
    }

    fn map(&self, f: impl Fn(&Jet) -> Jet) -> Self {
        MatJet { k: self.k, entries: self.entries.iter().map(f).collect() }
    }

    pub(crate) fn size(&self) -> usize {
        self.k
    }

    pub(crate) fn entry(&self, a: usize, b: usize) -> &Jet {
        &self.entries[a * self.k + b]
    }

    pub(crate) fn into_scalar(self) -> Jet {
        debug_assert_eq!(self.k, 1);
        self.entries.into_iter().next().expect("one entry")
    }

    fn values(&self) -> CMat {
        CMat::from_fn(self.k, self.k, |a, b| self.entry(a, b).value())
    }
}

struct Vars {
    space: Arc<JetSpace>,
    z: Vec<Jet>,
    wbar: Vec<Jet>,
}

impl Vars {
    fn new(z: &Point, w: &Point, p: usize, q: usize) -> Vars {
        let space = JetSpace::get(z.dim(), p, q);
        let zj = z.coords().iter().enumerate().map(|(i, &v)| Jet::z_var(&space, i, v)).collect();
        let wj = w.coords().iter().enumerate().map(|(i, &v)| Jet::wbar_var(&space, i, v.conj())).collect();
        Vars { space, z: zj, wbar: wj }
    }

    /// ⟨z, w⟩ = Σ zᵢ w̄ᵢ
    fn inner(&self) -> Jet {
        let mut acc = Jet::zero(&self.space);
        for (a, b) in self.z.iter().zip(&self.wbar) {
            acc = acc.add(&a.mul(b));
        }
        acc
    }

    /// log(1 − ⟨z, w⟩), principal branch (Re(1 − ⟨z,w⟩) > 0 on the ball).
    fn ball_log(&self) -> Result<Jet> {
        self.inner().scale(re(-1.0)).add_const(ONE).ln()
    }

    fn one(&self) -> Jet {
        Jet::constant(&self.space, ONE)
    }
}

pub(crate) fn value_jet(e: &KernelExpr, z: &Point, w: &Point, p: usize, q: usize) -> Result<MatJet> {
    let v = Vars::new(z, w, p, q);
    let out = match e.node() {
        Node::SzegoDisc => MatJet::scalar(v.inner().scale(re(-1.0)).add_const(ONE).recip()?),
        Node::BallPower { lambda, .. } => MatJet::scalar(v.ball_log()?.scale(re(-lambda)).exp()),
        Node::DiagonalSeries(a) => {
            let u = v.inner();
            let mut acc = Jet::zero(&v.space);
            for &an in a.iter().rev() {
                acc = acc.add_const(re(an)).mul(&u);
            }
            MatJet::scalar(acc.add_const(ONE))
        }
        Node::BallCurvature { m, lambda } => {
            let m = *m;
            let pref = v.ball_log()?.scale(re(-lambda)).exp();
            let mut entries = Vec::with_capacity(m * m);
            for a in 0..m {
                for b in 0..m {
                    let poly = if a == b {
                        let mut acc = v.one();
                        for j in (0..m).filter(|&j| j != a) {
                            acc = acc.sub(&v.z[j].mul(&v.wbar[j]));
                        }
                        acc
                    } else {
                        v.z[b].mul(&v.wbar[a])
                    };
                    entries.push(pref.mul(&poly));
                }
            }
            MatJet { k: m, entries }
        }
        Node::Defect { c, f } => {
            let fz = f.holomorphic_jet(&v.space, &v.z);
            let fw = f.antiholomorphic_jet(&v.space, &v.wbar);
            MatJet::scalar(fz.mul(&fw).scale(re(-1.0)).add_const(re(c * c)))
        }
        Node::Pow(child, t) => MatJet::scalar(pow_jet(child, *t, z, w, p, q)?),
        Node::Product(a, b) => {
            let ja = value_jet(a, z, w, p, q)?;
            let jb = value_jet(b, z, w, p, q)?;
            if a.shape().is_scalar() {
                let s = ja.into_scalar();
                jb.map(|x| s.mul(x))
            } else {
                let s = jb.into_scalar();
                ja.map(|x| x.mul(&s))
            }
        }
        Node::Sum(a, b) => {
            let ja = value_jet(a, z, w, p, q)?;
            let jb = value_jet(b, z, w, p, q)?;
            MatJet { k: ja.k, entries: ja.entries.iter().zip(&jb.entries).map(|(x, y)| x.add(y)).collect() }
        }
        Node::Difference(a, b) => {
            let ja = value_jet(a, z, w, p, q)?;
            let jb = value_jet(b, z, w, p, q)?;
            MatJet { k: ja.k, entries: ja.entries.iter().zip(&jb.entries).map(|(x, y)| x.sub(y)).collect() }
        }
        Node::Tensor(l, r) => {
            let m1 = l.dim();
            let (z1, z2) = z.split_at(m1);
            let (w1, w2) = w.split_at(m1);
            let a = value_jet(l, &z1, &w1, p, q)?.into_scalar().embed(&v.space, 0);
            let b = value_jet(r, &z2, &w2, p, q)?.into_scalar().embed(&v.space, m1);
            MatJet::scalar(a.mul(&b))
        }
        Node::LogHessian(child) => log_hessian_jets(child, z, w, p, q, &v.space)?,
        Node::Curvature { child, alpha, beta } => {
            let pw = pow_jet(child, alpha + beta, z, w, p, q)?;
            log_hessian_jets(child, z, w, p, q, &v.space)?.map(|x| pw.mul(x))
        }
        Node::Jet { k1, k2, order } => {
            let a = value_jet(k1, z, w, p, q)?.into_scalar();
            let b = value_jet(k2, z, w, p + order, q + order)?.into_scalar();
            let idx = enumerate_multi_indices(e.dim(), *order);
            let mut entries = Vec::with_capacity(idx.len() * idx.len());
            for i in &idx {
                for j in &idx {
                    entries.push(a.mul(&b.derive(i, j, &v.space)));
                }
            }
            MatJet { k: idx.len(), entries }
        }
        Node::Scale(child, c) => value_jet(child, z, w, p, q)?.map(|x| x.scale(re(*c))),
    };
    if let Some(bad) = out.entries.iter().position(|j| !j.is_finite()) {
        return Err(KernelError::NonFinite { row: bad / out.k, col: bad % out.k });
    }
    Ok(out)
}

fn pow_jet(child: &KernelExpr, t: f64, z: &Point, w: &Point, p: usize, q: usize) -> Result<Jet> {
    if t == 0.0 {
        return Ok(Jet::constant(&JetSpace::get(z.dim(), p, q), ONE));
    }
    if t == 1.0 {
        return Ok(value_jet(child, z, w, p, q)?.into_scalar());
    }
    if t.fract() == 0.0 && (2.0..=8.0).contains(&t) {
        return Ok(value_jet(child, z, w, p, q)?.into_scalar().powi(t as u32));
    }
    Ok(log_jet(child, z, w, p, q)?.scale(re(t)).exp())
}

/// ∂ᵢ∂̄ⱼ log K as an m×m matrix of jets of bidegree (p, q).
fn log_hessian_jets(child: &KernelExpr, z: &Point, w: &Point, p: usize, q: usize, space: &Arc<JetSpace>) -> Result<MatJet> {
    let m = child.dim();
    let l = log_jet(child, z, w, p + 1, q + 1)?;
    let mut entries = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            entries.push(l.derive(&MultiIndex::unit(m, i), &MultiIndex::unit(m, j), space));
        }
    }
    Ok(MatJet { k: m, entries })
}

/// Continuous logarithm of a scalar kernel as a jet.
pub(crate) fn log_jet(e: &KernelExpr, z: &Point, w: &Point, p: usize, q: usize) -> Result<Jet> {
    if !e.shape().is_scalar() {
        return Err(KernelError::Shape(format!("logarithm of matrix kernel `{e}`")));
    }
    match e.node() {
        Node::SzegoDisc => Ok(Vars::new(z, w, p, q).ball_log()?.scale(re(-1.0))),
        Node::BallPower { lambda, .. } => Ok(Vars::new(z, w, p, q).ball_log()?.scale(re(-lambda))),
        Node::Pow(child, t) => Ok(log_jet(child, z, w, p, q)?.scale(re(*t))),
        Node::Product(a, b) => Ok(log_jet(a, z, w, p, q)?.add(&log_jet(b, z, w, p, q)?)),
        Node::Scale(child, c) => Ok(log_jet(child, z, w, p, q)?.add_const(re(c.ln()))),
        Node::Tensor(l, r) => {
            let space = JetSpace::get(e.dim(), p, q);
            let m1 = l.dim();
            let (z1, z2) = z.split_at(m1);
            let (w1, w2) = w.split_at(m1);
            let a = log_jet(l, &z1, &w1, p, q)?.embed(&space, 0);
            let b = log_jet(r, &z2, &w2, p, q)?.embed(&space, m1);
            Ok(a.add(&b))
        }
        _ => value_jet(e, z, w, p, q)?.into_scalar().ln(),
    }
}

/// K(z, w) as a k×k matrix.
pub fn eval(expr: &KernelExpr, z: &Point, w: &Point) -> Result<CMat> {
    expr.check_point(z)?;
    expr.check_point(w)?;
    Ok(value_jet(expr, z, w, 0, 0)?.values())
}

/// All mixed derivatives ∂^i ∂̄^j K(z, w) with |i|, |j| ≤ order.
#[derive(Debug, Clone, Serialize)]
pub struct JetTable {
    order: usize,
    dim: usize,
    size: usize,
    indices: Vec<MultiIndex>,
    /// entries[a * n + b] = ∂^{indices[a]} ∂̄^{indices[b]} K(z, w)
    entries: Vec<CMat>,
}

impl JetTable {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Output size k of the kernel.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn value(&self) -> &CMat {
        &self.entries[0]
    }

    /// ∂^i ∂̄^j K(z, w), or `None` if an index is outside the table.
    pub fn entry(&self, i: &MultiIndex, j: &MultiIndex) -> Option<&CMat> {
        let a = self.indices.iter().position(|x| x == i)?;
        let b = self.indices.iter().position(|x| x == j)?;
        Some(&self.entries[a * self.indices.len() + b])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &MultiIndex, &CMat)> {
        let n = self.indices.len();
        self.entries.iter().enumerate().map(move |(k, m)| (&self.indices[k / n], &self.indices[k % n], m))
    }
}

pub fn eval_jet(expr: &KernelExpr, z: &Point, w: &Point, order: usize) -> Result<JetTable> {
    eval_jet_with_cap(expr, z, w, order, DEFAULT_ORDER_CAP)
}

pub fn eval_jet_with_cap(expr: &KernelExpr, z: &Point, w: &Point, order: usize, cap: usize) -> Result<JetTable> {
    if order > cap {
        return Err(KernelError::OrderCap { order, cap });
    }
    expr.check_point(z)?;
    expr.check_point(w)?;
    let jets = value_jet(expr, z, w, order, order)?;
    let indices = enumerate_multi_indices(expr.dim(), order);
    let k = jets.size();
    let mut entries = Vec::with_capacity(indices.len() * indices.len());
    for i in &indices {
        for j in &indices {
            entries.push(CMat::from_fn(k, k, |a, b| jets.entry(a, b).derivative(i, j)));
        }
    }
    Ok(JetTable { order, dim: expr.dim(), size: k, indices, entries })
}
