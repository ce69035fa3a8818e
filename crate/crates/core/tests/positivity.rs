//! Gram verdicts, kernel ordering and Wallach scans.

use kerncalc::positivity::{default_families, kernel_order_check, ordinary_wallach_scan, psd_check, psd_check_points, wallach_scan, DEFAULT_RESOLUTION, DEFAULT_TOL};
use kerncalc::{parse_kernel, sample_points, DomainSpec, KernelError, KernelExpr, PointFamily, RngSeed};

const TOL: f64 = DEFAULT_TOL;

#[test]
fn szego_curvature_is_psd() {
    let k = parse_kernel("curvature(szego_disc(), 1, 1)").unwrap();
    for seed in [1, 2, 3] {
        let r = psd_check(&k, &DomainSpec::disc(), 20, RngSeed(seed), TOL).unwrap();
        assert!(r.psd, "min eig {}", r.min_eig);
    }
}

#[test]
fn log_hessian_of_szego_is_psd() {
    let k = KernelExpr::log_hessian(KernelExpr::szego_disc()).unwrap();
    assert!(psd_check(&k, &DomainSpec::disc(), 25, RngSeed(4), TOL).unwrap().psd);
}

#[test]
fn matrix_kernel_below_two_fails() {
    let k = KernelExpr::ball_curvature(2, 1.5).unwrap();
    let r = psd_check(&k, &DomainSpec::ball(2), 30, RngSeed(404), TOL).unwrap();
    assert!(!r.psd && r.min_eig < -1e-3);
    assert_eq!(r.evidence, kerncalc::positivity::Evidence::NegativeDirection);
}

#[test]
fn matrix_kernel_gram_has_block_size() {
    let k = KernelExpr::ball_curvature(2, 3.0).unwrap();
    let r = psd_check(&k, &DomainSpec::ball(2), 12, RngSeed(5), TOL).unwrap();
    assert_eq!(r.size, 24);
    assert_eq!(r.eigenvalues.len(), 24);
    assert!(r.psd);
    assert!(r.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn matrix_family_is_monotone() {
    let d = DomainSpec::ball(2);
    for (small, big) in [(2.0, 2.5), (2.5, 4.0), (3.0, 3.0), (2.2, 7.0)] {
        let k1 = KernelExpr::ball_curvature(2, small).unwrap();
        let k2 = KernelExpr::ball_curvature(2, big).unwrap();
        let up = kernel_order_check(&k1, &k2, &d, 15, RngSeed(6), TOL).unwrap();
        assert!(up.psd, "{small} ⪯ {big}: {}", up.min_eig);
        if big > small {
            let down = kernel_order_check(&k2, &k1, &d, 15, RngSeed(6), TOL).unwrap();
            assert!(!down.psd, "{big} ⪯ {small} should fail");
        }
    }
}

#[test]
fn kernel_against_itself_is_zero() {
    let k = KernelExpr::bergman_ball(2).unwrap();
    let r = kernel_order_check(&k, &k, &DomainSpec::ball(2), 10, RngSeed(7), TOL).unwrap();
    assert!(r.psd && r.min_eig.abs() < 1e-12 && r.eigenvalues.iter().all(|e| e.abs() < 1e-12));
}

#[test]
fn scaled_szego_order_is_one_sided() {
    let s = KernelExpr::szego_disc();
    let half = KernelExpr::scale(s.clone(), 0.5).unwrap();
    let d = DomainSpec::disc();
    assert!(kernel_order_check(&half, &s, &d, 15, RngSeed(8), TOL).unwrap().psd);
    assert!(!kernel_order_check(&s, &half, &d, 15, RngSeed(8), TOL).unwrap().psd);
}

#[test]
fn first_jet_kernel_is_positive_definite() {
    let s = KernelExpr::szego_disc();
    let j1 = KernelExpr::jet(s.clone(), s, 1).unwrap();
    let pts = sample_points(&DomainSpec::disc(), 10, RngSeed(9));
    let r = psd_check_points(&j1, pts, None, TOL).unwrap();
    assert!(r.min_eig > 0.0 && r.size == 20);
}

#[test]
fn szego_wallach_boundary() {
    // K^t ∂∂̄ log K = (1 − zw̄)^{−(t+2)} for the Szegő kernel
    let fam = [PointFamily { n: 15, seed: 10 }, PointFamily { n: 25, seed: 11 }];
    let est = wallach_scan(&KernelExpr::szego_disc(), -3.0, -1.0, &DomainSpec::disc(), &fam, TOL, 0.02).unwrap();
    assert!((est.boundary + 2.0).abs() < 0.05, "{}", est.boundary);
    assert!(est.bracket.1 - est.bracket.0 <= 0.02);
    assert!(est.verdicts.iter().all(|&(t, v)| v == (t >= -2.0)));
}

#[test]
fn ball_wallach_boundary() {
    let est = wallach_scan(&KernelExpr::bergman_ball(2).unwrap(), -1.0, 1.0, &DomainSpec::ball(2), &default_families(303), TOL, DEFAULT_RESOLUTION).unwrap();
    assert!(est.boundary.abs() <= 0.05);
    assert_eq!(est.families.len(), 3);
}

#[test]
fn wallach_scan_requires_sign_change() {
    let s = KernelExpr::szego_disc();
    let fam = [PointFamily { n: 10, seed: 1 }];
    let d = DomainSpec::disc();
    assert!(matches!(wallach_scan(&s, 0.0, 1.0, &d, &fam, TOL, 0.1), Err(KernelError::NoSignChange { .. })));
    assert!(matches!(wallach_scan(&s, -5.0, -4.0, &d, &fam, TOL, 0.1), Err(KernelError::NoSignChange { .. })));
    assert!(wallach_scan(&s, 1.0, 0.0, &d, &fam, TOL, 0.1).is_err());
    assert!(wallach_scan(&s, -3.0, -1.0, &d, &[], TOL, 0.1).is_err());
    assert!(wallach_scan(&s, -3.0, -1.0, &d, &fam, TOL, 0.0).is_err());
}

#[test]
fn ordinary_wallach_scans() {
    let fam = default_families(12);
    let disc = DomainSpec::disc();
    for (t, v) in ordinary_wallach_scan(&KernelExpr::szego_disc(), &[0.5, 1.0, 2.0], &disc, &fam, TOL).unwrap() {
        assert!(v, "szego^{t}");
    }
    let b2 = KernelExpr::bergman_ball(2).unwrap();
    for (t, v) in ordinary_wallach_scan(&b2, &[1.0 / 3.0, 2.0 / 3.0, 1.0], &DomainSpec::ball(2), &fam, TOL).unwrap() {
        assert!(v, "B^{t}");
    }
    for (_, v) in ordinary_wallach_scan(&KernelExpr::constant_one(), &[0.5, 3.0], &disc, &fam, TOL).unwrap() {
        assert!(v);
    }
    assert!(ordinary_wallach_scan(&KernelExpr::szego_disc(), &[0.0], &disc, &fam, TOL).is_err());
}

#[test]
fn report_json_shape() {
    let r = psd_check(&KernelExpr::szego_disc(), &DomainSpec::disc(), 3, RngSeed(13), TOL).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    for key in ["kernel", "points", "min_eig", "psd", "tol", "seed", "size", "max_diag", "evidence", "eigenvalues"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["kernel"], "szego_disc()");
    assert_eq!(v["seed"], 13);
    assert_eq!(v["evidence"], "sampled-evidence");
    assert_eq!(v["points"].as_array().unwrap().len(), 3);
    let back: kerncalc::GramReport = serde_json::from_value(v).unwrap();
    assert_eq!(back, r);
}

#[test]
fn same_seed_same_verdict() {
    let k = KernelExpr::ball_curvature(2, 2.5).unwrap();
    let a = psd_check(&k, &DomainSpec::ball(2), 10, RngSeed(14), TOL).unwrap();
    let b = psd_check(&k, &DomainSpec::ball(2), 10, RngSeed(14), TOL).unwrap();
    assert_eq!(a, b);
}
