//! Truncated multivariate Taylor arithmetic in 2m independent holomorphic
//! variables (z₁..z_m, w̄₁..w̄_m).
//!
//! A [`Jet`] holds the Taylor coefficients `c[i,j] = ∂^i ∂̄^j f / (i! j!)` of a
//! function at an expansion point, for all multi-indices with |i| ≤ p and
//! |j| ≤ q. Monomials outside that box form an ideal, so products and
//! compositions with univariate analytic functions are exact up to truncation.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{KernelError, Result};
use crate::geometry::{enumerate_multi_indices, MultiIndex};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Index bookkeeping for jets of bidegree (p, q) in m + m variables.
#[derive(Debug)]
pub struct JetSpace {
    m: usize,
    p: usize,
    q: usize,
    zidx: Vec<MultiIndex>,
    widx: Vec<MultiIndex>,
    zpos: HashMap<MultiIndex, usize>,
    wpos: HashMap<MultiIndex, usize>,
    // (a, b, position of a+b) for all pairs whose sum stays in range
    zpairs: Vec<(u32, u32, u32)>,
    wpairs: Vec<(u32, u32, u32)>,
}

thread_local! {
    static SPACES: RefCell<HashMap<(usize, usize, usize), Arc<JetSpace>>> = RefCell::new(HashMap::new());
}

impl JetSpace {
    /// Shared (per-thread cached) space for dimension `m` and bidegree (p, q).
    pub fn get(m: usize, p: usize, q: usize) -> Arc<JetSpace> {
        SPACES.with(|cache| {
            cache
                .borrow_mut()
                .entry((m, p, q))
                .or_insert_with(|| Arc::new(JetSpace::build(m, p, q)))
                .clone()
        })
    }

    fn build(m: usize, p: usize, q: usize) -> JetSpace {
        let zidx = enumerate_multi_indices(m, p);
        let widx = enumerate_multi_indices(m, q);
        let zpos: HashMap<_, _> = zidx.iter().cloned().enumerate().map(|(k, i)| (i, k)).collect();
        let wpos: HashMap<_, _> = widx.iter().cloned().enumerate().map(|(k, i)| (i, k)).collect();
        let pairs = |idx: &[MultiIndex], pos: &HashMap<MultiIndex, usize>, cap: usize| {
            let mut out = Vec::new();
            for (a, ia) in idx.iter().enumerate() {
                for (b, ib) in idx.iter().enumerate() {
                    if ia.order() + ib.order() <= cap {
                        out.push((a as u32, b as u32, pos[&ia.checked_add(ib)] as u32));
                    }
                }
            }
            out
        };
        let zpairs = pairs(&zidx, &zpos, p);
        let wpairs = pairs(&widx, &wpos, q);
        JetSpace { m, p, q, zidx, widx, zpos, wpos, zpairs, wpairs }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn z_degree(&self) -> usize {
        self.p
    }

    pub fn w_degree(&self) -> usize {
        self.q
    }

    pub fn z_indices(&self) -> &[MultiIndex] {
        &self.zidx
    }

    pub fn w_indices(&self) -> &[MultiIndex] {
        &self.widx
    }

    fn len(&self) -> usize {
        self.zidx.len() * self.widx.len()
    }

    fn pos(&self, i: &MultiIndex, j: &MultiIndex) -> Option<usize> {
        let a = *self.zpos.get(i)?;
        let b = *self.wpos.get(j)?;
        Some(a * self.widx.len() + b)
    }
}

#[derive(Debug, Clone)]
pub struct Jet {
    space: Arc<JetSpace>,
    coef: Vec<Complex64>,
}

impl Jet {
    pub fn zero(space: &Arc<JetSpace>) -> Jet {
        Jet { space: space.clone(), coef: vec![ZERO; space.len()] }
    }

    pub fn constant(space: &Arc<JetSpace>, c: Complex64) -> Jet {
        let mut j = Jet::zero(space);
        j.coef[0] = c;
        j
    }

    /// The coordinate function zᵢ expanded at `value`.
    pub fn z_var(space: &Arc<JetSpace>, i: usize, value: Complex64) -> Jet {
        let mut j = Jet::constant(space, value);
        if space.p >= 1 {
            let k = space.pos(&MultiIndex::unit(space.m, i), &MultiIndex::zero(space.m)).expect("unit index");
            j.coef[k] = ONE;
        }
        j
    }

    /// The conjugated coordinate w̄ⱼ expanded at `value` (= conj(wⱼ)).
    pub fn wbar_var(space: &Arc<JetSpace>, j: usize, value: Complex64) -> Jet {
        let mut out = Jet::constant(space, value);
        if space.q >= 1 {
            let k = space.pos(&MultiIndex::zero(space.m), &MultiIndex::unit(space.m, j)).expect("unit index");
            out.coef[k] = ONE;
        }
        out
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn value(&self) -> Complex64 {
        self.coef[0]
    }

    /// Taylor coefficient at (i, j); zero outside the truncation box.
    pub fn coefficient(&self, i: &MultiIndex, j: &MultiIndex) -> Complex64 {
        self.space.pos(i, j).map_or(ZERO, |k| self.coef[k])
    }

    /// ∂^i ∂̄^j at the expansion point.
    pub fn derivative(&self, i: &MultiIndex, j: &MultiIndex) -> Complex64 {
        self.coefficient(i, j) * (i.factorial() * j.factorial())
    }

    pub fn is_finite(&self) -> bool {
        self.coef.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    fn same_space(&self, other: &Jet) {
        debug_assert!(Arc::ptr_eq(&self.space, &other.space) || (self.space.m, self.space.p, self.space.q) == (other.space.m, other.space.p, other.space.q));
    }

    pub fn add(&self, other: &Jet) -> Jet {
        self.same_space(other);
        Jet { space: self.space.clone(), coef: self.coef.iter().zip(&other.coef).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        self.same_space(other);
        Jet { space: self.space.clone(), coef: self.coef.iter().zip(&other.coef).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: Complex64) -> Jet {
        Jet { space: self.space.clone(), coef: self.coef.iter().map(|a| a * c).collect() }
    }

    pub fn add_const(&self, c: Complex64) -> Jet {
        let mut out = self.clone();
        out.coef[0] += c;
        out
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        self.same_space(other);
        let nw = self.space.widx.len();
        let mut out = vec![ZERO; self.coef.len()];
        for &(za, zb, zs) in &self.space.zpairs {
            let (ra, rb, rs) = (za as usize * nw, zb as usize * nw, zs as usize * nw);
            for &(wa, wb, ws) in &self.space.wpairs {
                let a = self.coef[ra + wa as usize];
                if a == ZERO {
                    continue;
                }
                out[rs + ws as usize] += a * other.coef[rb + wb as usize];
            }
        }
        Jet { space: self.space.clone(), coef: out }
    }

    /// Σₙ cₙ (self − self(0))ⁿ, with `taylor[n] = f⁽ⁿ⁾(u₀)/n!`.
    ///
    /// `taylor` must hold at least p + q + 1 terms; higher powers of the
    /// nilpotent part vanish.
    pub fn compose(&self, taylor: &[Complex64]) -> Jet {
        let nil = self.nilpotent_order();
        let delta = self.add_const(-self.value());
        let top = nil.min(taylor.len() - 1);
        let mut acc = Jet::constant(&self.space, taylor[top]);
        for n in (0..top).rev() {
            acc = acc.mul(&delta).add_const(taylor[n]);
        }
        acc
    }

    fn nilpotent_order(&self) -> usize {
        self.space.p + self.space.q
    }

    pub fn exp(&self) -> Jet {
        let u0 = self.value();
        let e = u0.exp();
        let mut taylor = Vec::with_capacity(self.nilpotent_order() + 1);
        let mut fact = 1.0;
        for n in 0..=self.nilpotent_order() {
            if n > 0 {
                fact *= n as f64;
            }
            taylor.push(e / fact);
        }
        self.compose(&taylor)
    }

    /// Principal logarithm; the value must lie in the open right half-plane.
    pub fn ln(&self) -> Result<Jet> {
        let u0 = self.value();
        if u0.re <= 0.0 || !u0.re.is_finite() || !u0.im.is_finite() {
            return Err(KernelError::Branch { value: u0 });
        }
        let inv = u0.inv();
        let mut taylor = vec![u0.ln()];
        let mut pw = ONE;
        for n in 1..=self.nilpotent_order() {
            pw *= inv;
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            taylor.push(pw * (sign / n as f64));
        }
        Ok(self.compose(&taylor))
    }

    /// Principal power u^t; the value must lie in the open right half-plane.
    pub fn powf(&self, t: f64) -> Result<Jet> {
        Ok(self.ln()?.scale(Complex64::new(t, 0.0)).exp())
    }

    /// Non-negative integer power by repeated squaring (no branch needed).
    pub fn powi(&self, n: u32) -> Jet {
        let mut result = Jet::constant(&self.space, ONE);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn recip(&self) -> Result<Jet> {
        let u0 = self.value();
        if u0 == ZERO {
            return Err(KernelError::ZeroKernelValue);
        }
        let inv = u0.inv();
        let mut taylor = Vec::with_capacity(self.nilpotent_order() + 1);
        let mut pw = inv;
        for n in 0..=self.nilpotent_order() {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            taylor.push(pw * sign);
            pw *= inv;
        }
        Ok(self.compose(&taylor))
    }

    /// ∂^i ∂̄^j of this jet, re-expanded in `target`, whose degrees must not
    /// exceed (p − |i|, q − |j|).
    pub fn derive(&self, i: &MultiIndex, j: &MultiIndex, target: &Arc<JetSpace>) -> Jet {
        assert_eq!(target.m, self.space.m);
        assert!(target.p + i.order() <= self.space.p && target.q + j.order() <= self.space.q);
        let nw = target.widx.len();
        let mut out = Jet::zero(target);
        for (a, ia) in target.zidx.iter().enumerate() {
            let shifted_z = ia.checked_add(i);
            let fz = shifted_z.factorial() / ia.factorial();
            for (b, jb) in target.widx.iter().enumerate() {
                let shifted_w = jb.checked_add(j);
                let fw = shifted_w.factorial() / jb.factorial();
                let src = self.space.pos(&shifted_z, &shifted_w).expect("index inside source box");
                out.coef[a * nw + b] = self.coef[src] * (fz * fw);
            }
        }
        out
    }

    /// Restriction to a smaller bidegree box in the same variables.
    pub fn truncate(&self, target: &Arc<JetSpace>) -> Jet {
        let zero = MultiIndex::zero(self.space.m);
        self.derive(&zero, &zero.clone(), target)
    }

    /// Re-express a jet in m_src variables as a jet in `target` (m_dst ≥ m_src
    /// variables) where source variable k becomes target variable k + offset.
    pub fn embed(&self, target: &Arc<JetSpace>, offset: usize) -> Jet {
        let m_src = self.space.m;
        assert!(offset + m_src <= target.m);
        assert!(target.p <= self.space.p && target.q <= self.space.q);
        let lift = |i: &MultiIndex| {
            let mut e = vec![0u32; target.m];
            e[offset..offset + m_src].copy_from_slice(i.entries());
            MultiIndex::new(e)
        };
        let mut out = Jet::zero(target);
        for ia in self.space.zidx.iter().filter(|i| i.order() <= target.p) {
            for jb in self.space.widx.iter().filter(|j| j.order() <= target.q) {
                let dst = target.pos(&lift(ia), &lift(jb)).expect("lifted index in range");
                out.coef[dst] = self.coefficient(ia, jb);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn geometric_series_coefficients() {
        // 1/(1 − z w̄) at the origin has coefficient 1 at every (n, n), 0 elsewhere.
        let sp = JetSpace::get(1, 4, 4);
        let u = Jet::z_var(&sp, 0, ZERO).mul(&Jet::wbar_var(&sp, 0, ZERO));
        let k = u.scale(c(-1.0, 0.0)).add_const(ONE).recip().unwrap();
        for a in 0..=4u32 {
            for b in 0..=4u32 {
                let want = if a == b { ONE } else { ZERO };
                let got = k.coefficient(&MultiIndex::new(vec![a]), &MultiIndex::new(vec![b]));
                assert!(close(got, want, 1e-15), "({a},{b}) {got}");
            }
        }
    }

    #[test]
    fn exp_log_roundtrip_and_power_law() {
        let sp = JetSpace::get(2, 3, 2);
        let z0 = Jet::z_var(&sp, 0, c(0.3, 0.1));
        let z1 = Jet::z_var(&sp, 1, c(-0.2, 0.4));
        let w0 = Jet::wbar_var(&sp, 0, c(0.1, -0.5));
        let f = z0.mul(&w0).add(&z1).add_const(c(2.0, 0.5));
        let back = f.ln().unwrap().exp();
        for (a, b) in back.coef.iter().zip(&f.coef) {
            assert!(close(*a, *b, 1e-14));
        }
        let lhs = f.powf(1.7).unwrap();
        let rhs = f.powf(0.5).unwrap().mul(&f.powf(1.2).unwrap());
        for (a, b) in lhs.coef.iter().zip(&rhs.coef) {
            assert!(close(*a, *b, 1e-13));
        }
        let sq = f.powi(3);
        let sq2 = f.mul(&f).mul(&f);
        for (a, b) in sq.coef.iter().zip(&sq2.coef) {
            assert!(close(*a, *b, 1e-14));
        }
    }

    #[test]
    fn branch_violation() {
        let sp = JetSpace::get(1, 1, 1);
        let f = Jet::constant(&sp, c(-1.0, 0.2));
        assert!(matches!(f.ln(), Err(KernelError::Branch { .. })));
        assert!(f.powf(0.5).is_err());
    }

    #[test]
    fn derive_shifts_coefficients() {
        // f = z² w̄ ⇒ ∂∂̄f = 2z
        let sp = JetSpace::get(1, 3, 3);
        let z = Jet::z_var(&sp, 0, ZERO);
        let w = Jet::wbar_var(&sp, 0, ZERO);
        let f = z.mul(&z).mul(&w);
        let tgt = JetSpace::get(1, 2, 2);
        let d = f.derive(&MultiIndex::new(vec![1]), &MultiIndex::new(vec![1]), &tgt);
        assert_eq!(d.coefficient(&MultiIndex::new(vec![1]), &MultiIndex::new(vec![0])), c(2.0, 0.0));
        assert_eq!(d.value(), ZERO);
        assert_eq!(f.derivative(&MultiIndex::new(vec![2]), &MultiIndex::new(vec![1])), c(2.0, 0.0));
    }

    #[test]
    fn embed_places_variables() {
        let sp1 = JetSpace::get(1, 2, 2);
        let sp2 = JetSpace::get(2, 2, 2);
        let z = Jet::z_var(&sp1, 0, c(0.5, 0.0));
        let e = z.embed(&sp2, 1);
        assert_eq!(e.value(), c(0.5, 0.0));
        assert_eq!(e.coefficient(&MultiIndex::new(vec![0, 1]), &MultiIndex::zero(2)), ONE);
        assert_eq!(e.coefficient(&MultiIndex::new(vec![1, 0]), &MultiIndex::zero(2)), ZERO);
    }
}
