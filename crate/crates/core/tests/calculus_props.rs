//! Identities of derived kernels.

use kerncalc::calculus::{ball_curvature_closed_form, curvature_kernel, jet_kernel, log_hessian_eval, phi_gram_entry, series_head_coefficients};
use kerncalc::{eval, sample_points, CMat, CurvatureParams, DomainSpec, KernelExpr, Point, RngSeed};
use num_complex::Complex64;
use proptest::prelude::*;

fn pairs(domain: &DomainSpec, count: usize, seed: u64) -> Vec<(Point, Point)> {
    let pts = sample_points(domain, 2 * count, RngSeed(seed));
    pts.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect()
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

#[test]
fn szego_curvature_is_a_ball_power() {
    let grid = [0.5, 1.0, 2.0];
    for a in grid {
        for b in grid {
            let lhs = curvature_kernel(&KernelExpr::szego_disc(), CurvatureParams::new(a, b).unwrap()).unwrap();
            let rhs = KernelExpr::ball_power(1, a + b + 2.0).unwrap();
            for (z, w) in pairs(&DomainSpec::disc(), 40, 7) {
                let (x, y) = (eval(&lhs, &z, &w).unwrap()[(0, 0)], eval(&rhs, &z, &w).unwrap()[(0, 0)]);
                assert!((x - y).norm() < 1e-12 * y.norm());
            }
        }
    }
}

#[test]
fn log_hessian_quotient_formula() {
    // Bergman kernel of the disc: 2(1 − z w̄)^{−2}
    for (z, w) in pairs(&DomainSpec::disc(), 30, 8) {
        let got = log_hessian_eval(&KernelExpr::bergman_disc(), &z, &w).unwrap()[(0, 0)];
        let want = 2.0 * (one() - z.inner(&w)).powi(-2);
        assert!((got - want).norm() < 1e-12 * want.norm());
    }
    // quotient formula agrees with the log-jet route
    for (text, d) in [("bergman_ball(3)", DomainSpec::ball(3)), ("diagonal_series([0.4, 0.3])", DomainSpec::disc())] {
        let k = kerncalc::parse_kernel(text).unwrap();
        let lh = KernelExpr::log_hessian(k.clone()).unwrap();
        for (z, w) in pairs(&d, 20, 9) {
            let a = log_hessian_eval(&k, &z, &w).unwrap();
            let b = eval(&lh, &z, &w).unwrap();
            assert!((&a - &b).max_abs() < 1e-12 * b.max_abs());
        }
    }
}

#[test]
fn phi_gram_factorization() {
    for (base, d) in [
        (KernelExpr::szego_disc(), DomainSpec::disc()),
        (KernelExpr::bergman_ball(2).unwrap(), DomainSpec::ball(2)),
        (KernelExpr::bergman_ball(3).unwrap(), DomainSpec::ball(3)),
    ] {
        for (a, b) in [(1.0, 1.0), (0.5, 1.5), (2.0, 0.25)] {
            let p = CurvatureParams::new(a, b).unwrap();
            let curv = curvature_kernel(&base, p).unwrap();
            for (z, w) in pairs(&d, 20, 10) {
                let c = eval(&curv, &z, &w).unwrap();
                for i in 0..base.dim() {
                    for j in 0..base.dim() {
                        let g = phi_gram_entry(&base, p, &z, &w, i, j).unwrap();
                        let want = c[(i, j)] * (a * b * (a + b));
                        assert!((g - want).norm() < 1e-10 * want.norm().max(1e-300), "{base} ({a},{b}) [{i},{j}]");
                    }
                }
            }
        }
    }
}

#[test]
fn jet_kernel_examples() {
    let s = KernelExpr::szego_disc();
    for (z, w) in pairs(&DomainSpec::disc(), 30, 11) {
        let j0 = eval(&jet_kernel(&s, &s, 0).unwrap(), &z, &w).unwrap();
        let prod = eval(&KernelExpr::product(s.clone(), s.clone()).unwrap(), &z, &w).unwrap();
        assert!((&j0 - &prod).max_abs() <= 1e-14 * prod.max_abs());

        let p1 = KernelExpr::pow(s.clone(), 1.0).unwrap();
        let j1 = eval(&jet_kernel(&p1, &p1, 1).unwrap(), &z, &w).unwrap();
        let want = (one() - z.inner(&w)).powi(-2);
        assert!((j1[(0, 0)] - want).norm() < 1e-14 * want.norm());
        // K·∂∂̄K = (1 − zw̄)^{−1}·(1 + zw̄)(1 − zw̄)^{−3}
        let u = z.inner(&w);
        let want11 = (one() + u) * (one() - u).powi(-4);
        assert!((j1[(1, 1)] - want11).norm() < 1e-13 * want11.norm());
    }
}

#[test]
fn ball_closed_form_matches_ast_route() {
    for m in [2usize, 3] {
        let b = KernelExpr::bergman_ball(m).unwrap();
        for t in [-0.5, 0.0, 1.0 / 3.0, 1.0, 2.0] {
            let lambda = t * (m + 1) as f64 + 2.0;
            let route = KernelExpr::wallach_kernel(b.clone(), t).unwrap();
            let node = KernelExpr::ball_curvature(m, lambda).unwrap();
            for (z, w) in pairs(&DomainSpec::ball(m), 20, 12) {
                let closed = ball_curvature_closed_form(m, lambda, &z, &w).unwrap().scale(Complex64::new((m + 1) as f64, 0.0));
                let via_ast = eval(&route, &z, &w).unwrap();
                assert!((&closed - &via_ast).frobenius_norm() < 1e-10 * via_ast.frobenius_norm());
                let direct = eval(&node, &z, &w).unwrap().scale(Complex64::new((m + 1) as f64, 0.0));
                assert!((&closed - &direct).frobenius_norm() < 1e-12 * direct.frobenius_norm());
            }
        }
    }
}

#[test]
fn derived_kernels_are_sesqui_symmetric() {
    let b = KernelExpr::bergman_ball(2).unwrap();
    let kernels = [
        KernelExpr::log_hessian(b.clone()).unwrap(),
        KernelExpr::curvature(b.clone(), 0.7, 1.3).unwrap(),
        KernelExpr::jet(b.clone(), KernelExpr::ball_power(2, 0.5).unwrap(), 2).unwrap(),
        KernelExpr::ball_curvature(2, 3.5).unwrap(),
    ];
    for k in &kernels {
        for (z, w) in pairs(&DomainSpec::ball(2), 20, 13) {
            let a = eval(k, &z, &w).unwrap();
            let bb = eval(k, &w, &z).unwrap().adjoint();
            assert!((&a - &bb).max_abs() <= 1e-12 * a.max_abs().max(1.0), "{k}");
        }
    }
    for (z, w) in pairs(&DomainSpec::ball(3), 20, 14) {
        let a = ball_curvature_closed_form(3, 2.7, &z, &w).unwrap();
        let bb = ball_curvature_closed_form(3, 2.7, &w, &z).unwrap().adjoint();
        assert!((&a - &bb).max_abs() <= 1e-12 * a.max_abs());
    }
}

#[test]
fn constant_kernel_has_zero_curvature() {
    let p = CurvatureParams::new(1.0, 2.0).unwrap();
    let k = KernelExpr::constant_one();
    for (z, w) in pairs(&DomainSpec::disc(), 5, 15) {
        assert_eq!(phi_gram_entry(&k, p, &z, &w, 0, 0).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(log_hessian_eval(&k, &z, &w).unwrap(), CMat::zeros(1, 1));
    }
}

proptest! {
    #[test]
    fn series_head_matches_formula(a1 in -2.0f64..2.0, a2 in -2.0f64..2.0, t in -3.0f64..3.0) {
        let (c0, c1) = series_head_coefficients(&[a1, a2], t).unwrap();
        prop_assert!((c0 - a1).abs() < 1e-10);
        prop_assert!((c1 - (4.0 * a2 + (t - 2.0) * a1 * a1)).abs() < 1e-10);
        // trailing coefficients do not enter the head
        let (d0, d1) = series_head_coefficients(&[a1, a2, 0.7, -0.3], t).unwrap();
        prop_assert!((d0 - c0).abs() < 1e-12 && (d1 - c1).abs() < 1e-12);
    }
}

#[test]
fn series_head_missing_coefficients_are_zero() {
    let (c0, c1) = series_head_coefficients(&[], 1.0).unwrap();
    assert_eq!((c0, c1), (0.0, 0.0));
    let (c0, c1) = series_head_coefficients(&[0.5], 1.0).unwrap();
    assert!((c0 - 0.5).abs() < 1e-15 && (c1 + 0.25).abs() < 1e-14);
}
