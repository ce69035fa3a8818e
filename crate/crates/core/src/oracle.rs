//! Independent derivative oracle: Taylor coefficients by the multivariate
//! Cauchy integral formula, discretized with the trapezoid rule on a small
//! torus around (z, w̄). Uses only pointwise [`eval`]; no jets.
//!
//! With N nodes per variable and radius r the aliasing error of a
//! coefficient is O(r^N) and the roundoff error O(ε/r^{|i|+|j|}).

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::expr::{eval, KernelExpr};
use crate::geometry::{enumerate_multi_indices, MultiIndex, Point};
use crate::linalg::CMat;

pub const DEFAULT_NODES: usize = 8;
pub const DEFAULT_RADIUS: f64 = 0.01;

/// ∂^i ∂̄^j K(z, w) for all |i|, |j| ≤ order, as (i, j, value) triples.
pub fn cauchy_derivatives(expr: &KernelExpr, z: &Point, w: &Point, order: usize, nodes: usize, radius: f64) -> Result<Vec<(MultiIndex, MultiIndex, CMat)>> {
    let m = expr.dim();
    let nv = 2 * m;
    let total = nodes.pow(nv as u32);
    let roots: Vec<Complex64> = (0..nodes).map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / nodes as f64)).collect();
    let digits = |mut g: usize| {
        let mut d = vec![0usize; nv];
        for x in d.iter_mut() {
            *x = g % nodes;
            g /= nodes;
        }
        d
    };

    // w̄ + r e^{iψ} corresponds to w + r e^{−iψ}
    let values: Vec<CMat> = (0..total)
        .into_par_iter()
        .map(|g| {
            let d = digits(g);
            let zp: Vec<Complex64> = (0..m).map(|v| z.coords()[v] + roots[d[v]] * radius).collect();
            let wp: Vec<Complex64> = (0..m).map(|v| w.coords()[v] + roots[d[m + v]].conj() * radius).collect();
            eval(expr, &Point::new(zp)?, &Point::new(wp)?)
        })
        .collect::<Result<_>>()?;

    let idx = enumerate_multi_indices(m, order);
    let k = expr.size();
    let mut out = Vec::with_capacity(idx.len() * idx.len());
    for i in &idx {
        for j in &idx {
            let exps: Vec<usize> = i.entries().iter().chain(j.entries()).map(|&e| e as usize).collect();
            let mut acc = vec![Complex64::new(0.0, 0.0); k * k];
            for (g, v) in values.iter().enumerate() {
                let d = digits(g);
                let mut phase = Complex64::new(1.0, 0.0);
                for (dv, e) in d.iter().zip(&exps) {
                    // e^{−i e θ}
                    phase *= roots[(dv * e) % nodes].conj();
                }
                for (a, x) in acc.iter_mut().zip(v.as_slice()) {
                    *a += x * phase;
                }
            }
            let deg = (i.order() + j.order()) as i32;
            let scale = i.factorial() * j.factorial() / (total as f64 * radius.powi(deg));
            out.push((i.clone(), j.clone(), CMat::from_fn(k, k, |r, c| acc[r * k + c] * scale)));
        }
    }
    Ok(out)
}

/// |a − b| / max(|b|, 1), maximized over entries.
pub fn relative_error(a: &CMat, b: &CMat) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).norm() / y.norm().max(1.0)).fold(0.0, f64::max)
}

/// Largest relative discrepancy between the jet engine and the oracle.
pub fn jet_discrepancy(expr: &KernelExpr, z: &Point, w: &Point, order: usize) -> Result<f64> {
    let table = crate::expr::eval_jet(expr, z, w, order)?;
    let oracle = cauchy_derivatives(expr, z, w, order, DEFAULT_NODES, DEFAULT_RADIUS)?;
    Ok(oracle
        .iter()
        .map(|(i, j, v)| relative_error(table.entry(i, j).expect("same index set"), v))
        .fold(0.0, f64::max))
}
