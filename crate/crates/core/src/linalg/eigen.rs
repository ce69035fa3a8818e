use num_complex::Complex64;

use super::CMat;
use crate::error::{KernelError, Result};

const MAX_SWEEPS: usize = 80;

/// Eigenvalues of the Hermitian part of `h`, ascending.
///
/// Cyclic complex Jacobi: each rotation first removes the phase of the
/// pivot entry with a diagonal unitary, then applies a real Givens rotation.
pub fn hermitian_eigenvalues(h: &CMat) -> Result<Vec<f64>> {
    if !h.is_square() {
        return Err(KernelError::Shape(format!("eigenvalues of a {}x{} matrix", h.rows(), h.cols())));
    }
    for i in 0..h.rows() {
        for j in 0..h.cols() {
            let v = h[(i, j)];
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(KernelError::NonFinite { row: i, col: j });
            }
        }
    }
    let n = h.rows();
    let herm = h.hermitian_part();
    let mut a: Vec<Complex64> = herm.as_slice().to_vec();
    let idx = |i: usize, j: usize| i * n + j;

    let total: f64 = a.iter().map(|v| v.norm_sqr()).sum::<f64>();
    if total == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let target = (f64::EPSILON * 1e-2).powi(2) * total;

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[idx(p, q)].norm_sqr();
            }
        }
        if off <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let g = a[idx(p, q)];
                let abs_g = g.norm();
                if abs_g == 0.0 {
                    continue;
                }
                let app = a[idx(p, p)].re;
                let aqq = a[idx(q, q)].re;
                // Entry is already negligible against both diagonal entries.
                if abs_g < f64::EPSILON * 1e-3 * (app.abs().min(aqq.abs())) {
                    a[idx(p, q)] = Complex64::new(0.0, 0.0);
                    a[idx(q, p)] = Complex64::new(0.0, 0.0);
                    continue;
                }
                let phase = g / abs_g;
                let tau = (aqq - app) / (2.0 * abs_g);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let ph_conj = phase.conj();

                // A ← A W with W = [[c, s], [−s·ē, c·ē]] on columns p, q
                for k in 0..n {
                    let akp = a[idx(k, p)];
                    let akq = a[idx(k, q)];
                    a[idx(k, p)] = akp * c - akq * ph_conj * s;
                    a[idx(k, q)] = akp * s + akq * ph_conj * c;
                }
                // A ← W^* A on rows p, q
                for k in 0..n {
                    let apk = a[idx(p, k)];
                    let aqk = a[idx(q, k)];
                    a[idx(p, k)] = apk * c - aqk * phase * s;
                    a[idx(q, k)] = apk * s + aqk * phase * c;
                }
                a[idx(p, q)] = Complex64::new(0.0, 0.0);
                a[idx(q, p)] = Complex64::new(0.0, 0.0);
                a[idx(p, p)] = Complex64::new(a[idx(p, p)].re, 0.0);
                a[idx(q, q)] = Complex64::new(a[idx(q, q)].re, 0.0);
            }
        }
    }

    let mut eig: Vec<f64> = (0..n).map(|i| a[idx(i, i)].re).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// Smallest eigenvalue of the Hermitian part of `h`.
pub fn min_eigenvalue(h: &CMat) -> Result<f64> {
    let eig = hermitian_eigenvalues(h)?;
    eig.first()
        .copied()
        .ok_or_else(|| KernelError::Shape("eigenvalues of an empty matrix".into()))
}
