//! Möbius maps: Jacobians, the chain rule and quasi-invariance residuals.

use kerncalc::automorphism::{curvature_quasi_check, quasi_invariance_residual, Composed, PolydiscMap};
use kerncalc::{sample_points, Automorphism, CMat, CocycleSpec, DomainSpec, KernelExpr, MobiusMap, Point, RngSeed};
use num_complex::Complex64;

fn pairs(domain: &DomainSpec, count: usize, seed: u64) -> Vec<(Point, Point)> {
    sample_points(domain, 2 * count, RngSeed(seed)).chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect()
}

fn bergman(m: usize) -> KernelExpr {
    if m == 1 {
        KernelExpr::bergman_disc()
    } else {
        KernelExpr::bergman_ball(m).unwrap()
    }
}

#[test]
fn chain_rule_for_compositions() {
    let mut rng = RngSeed(31).rng();
    for m in 1..=3 {
        for _ in 0..5 {
            let outer = MobiusMap::random(m, 0.7, &mut rng);
            let inner = MobiusMap::random(m, 0.7, &mut rng);
            let comp = Composed { outer: outer.clone(), inner: inner.clone() };
            for z in sample_points(&DomainSpec::ball(m), 10, RngSeed(32)) {
                let mid = inner.apply(&z).unwrap();
                let want_point = outer.apply(&mid).unwrap();
                let got_point = comp.apply(&z).unwrap();
                let perr: f64 = got_point.coords().iter().zip(want_point.coords()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                assert!(perr < 1e-12);
                let want = &outer.derivative(&mid).unwrap() * &inner.derivative(&z).unwrap();
                let got = comp.derivative(&z).unwrap();
                assert!((&got - &want).max_abs() < 1e-10 * want.max_abs().max(1.0));
                let dd = comp.det_derivative(&z).unwrap() - outer.det_derivative(&mid).unwrap() * inner.det_derivative(&z).unwrap();
                assert!(dd.norm() < 1e-10);
            }
        }
    }
}

#[test]
fn log_det_is_a_logarithm() {
    let mut rng = RngSeed(33).rng();
    for m in 1..=3 {
        let phi = MobiusMap::random(m, 0.8, &mut rng);
        for z in sample_points(&DomainSpec::ball(m), 10, RngSeed(34)) {
            let l = phi.log_det_derivative(&z).unwrap();
            assert!((l.exp() - phi.det_derivative(&z).unwrap()).norm() < 1e-12);
        }
    }
}

#[test]
fn bergman_transformation_rule() {
    let mut rng = RngSeed(35).rng();
    for m in 1..=3 {
        for map in 0..10 {
            let phi = MobiusMap::random(m, 0.7, &mut rng);
            let r = quasi_invariance_residual(&bergman(m), CocycleSpec::DetJacobianPower(1.0), &phi, &pairs(&DomainSpec::ball(m), 20, 36 + map)).unwrap();
            assert!(r < 1e-8, "m={m}: {r}");
        }
    }
}

#[test]
fn ball_power_rule_with_fractional_weight() {
    let mut rng = RngSeed(37).rng();
    for m in 1..=3 {
        for lambda in [0.5, 1.7, 4.0] {
            let phi = MobiusMap::random(m, 0.6, &mut rng);
            let k = KernelExpr::ball_power(m, lambda).unwrap();
            let cocycle = CocycleSpec::DetJacobianPower(lambda / (m + 1) as f64);
            let r = quasi_invariance_residual(&k, cocycle, &phi, &pairs(&DomainSpec::ball(m), 15, 38)).unwrap();
            assert!(r < 1e-8, "m={m} λ={lambda}: {r}");
        }
    }
}

#[test]
fn log_hessian_rule_on_the_diagonal() {
    let mut rng = RngSeed(39).rng();
    for m in 2..=3 {
        let lh = KernelExpr::log_hessian(bergman(m)).unwrap();
        for _ in 0..5 {
            let phi = MobiusMap::random(m, 0.7, &mut rng);
            let diag: Vec<(Point, Point)> = sample_points(&DomainSpec::ball(m), 20, RngSeed(40)).into_iter().map(|z| (z.clone(), z)).collect();
            let r = quasi_invariance_residual(&lh, CocycleSpec::CurvatureCocycle(0.0), &phi, &diag).unwrap();
            assert!(r < 1e-8, "{r}");
        }
    }
}

#[test]
fn curvature_cocycle_rule() {
    let mut rng = RngSeed(41).rng();
    for m in 2..=3 {
        let b = bergman(m);
        for t in [0.0, 0.5, 1.0] {
            for map in 0..5 {
                let phi = MobiusMap::random(m, 0.7, &mut rng);
                let r = curvature_quasi_check(&b, t, &phi, &pairs(&DomainSpec::ball(m), 20, 42 + map)).unwrap();
                assert!(r < 1e-8, "m={m} t={t}: {r}");
            }
        }
    }
}

#[test]
fn closed_form_matrix_kernel_is_quasi_invariant() {
    let mut rng = RngSeed(43).rng();
    for m in 2..=3 {
        for t in [0.0, 0.5, 2.0] {
            let lambda = t * (m + 1) as f64 + 2.0;
            let k = KernelExpr::ball_curvature(m, lambda).unwrap();
            let phi = MobiusMap::random(m, 0.7, &mut rng);
            let r = quasi_invariance_residual(&k, CocycleSpec::CurvatureCocycle(t), &phi, &pairs(&DomainSpec::ball(m), 20, 44)).unwrap();
            assert!(r < 1e-8, "m={m} λ={lambda}: {r}");
        }
    }
}

#[test]
fn unitary_maps_preserve_radial_kernels() {
    let mut rng = RngSeed(45).rng();
    for m in 1..=3 {
        let v = CMat::random_unitary(m, &mut rng);
        let phi = MobiusMap::new(Point::origin(m), v).unwrap();
        let z = sample_points(&DomainSpec::ball(m), 1, RngSeed(46)).remove(0);
        let image = phi.apply(&z).unwrap();
        assert!((image.norm() - z.norm()).abs() < 1e-14);
        for k in [KernelExpr::ball_power(m, 0.7).unwrap(), bergman(m)] {
            let r = quasi_invariance_residual(&k, CocycleSpec::DetJacobianPower(0.0), &phi, &pairs(&DomainSpec::ball(m), 10, 47)).unwrap();
            assert!(r < 1e-13, "{r}");
        }
    }
}

#[test]
fn rotation_composes_unitaries() {
    let mut rng = RngSeed(48).rng();
    let phi = MobiusMap::random(2, 0.5, &mut rng);
    let v = CMat::random_unitary(2, &mut rng);
    let rot = phi.rotated(&v).unwrap();
    for z in sample_points(&DomainSpec::ball(2), 5, RngSeed(49)) {
        let want = v.apply(phi.apply(&z).unwrap().coords());
        let got = rot.apply(&z).unwrap();
        let err: f64 = got.coords().iter().zip(&want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-14);
    }
}

#[test]
fn identity_has_zero_residual() {
    for m in 1..=3 {
        let id = MobiusMap::identity(m);
        for t in [0.0, 0.5, 1.0] {
            let k = KernelExpr::ball_power(m, (m + 1) as f64 * t + 0.3).unwrap();
            let r = quasi_invariance_residual(&k, CocycleSpec::DetJacobianPower(t), &id, &pairs(&DomainSpec::ball(m), 10, 50)).unwrap();
            assert!(r < 1e-15, "{r}");
        }
    }
}

#[test]
fn disc_weight_zero_case() {
    // t = 0: the rule for ∂∂̄ log B alone
    let mut rng = RngSeed(51).rng();
    let b = KernelExpr::bergman_disc();
    for _ in 0..5 {
        let phi = MobiusMap::random(1, 0.8, &mut rng);
        let r = curvature_quasi_check(&b, 0.0, &phi, &pairs(&DomainSpec::disc(), 20, 52)).unwrap();
        assert!(r < 1e-8, "{r}");
    }
}

#[test]
fn polydisc_szego_is_quasi_invariant() {
    let k = KernelExpr::tensor(KernelExpr::szego_disc(), KernelExpr::szego_disc()).unwrap();
    let maps = [
        PolydiscMap::new(vec![Complex64::new(0.3, -0.2), Complex64::new(-0.5, 0.1)], vec![0.4, -1.1]).unwrap(),
        PolydiscMap::new(vec![Complex64::new(0.0, 0.7), Complex64::new(0.2, 0.2)], vec![2.0, 0.0]).unwrap(),
    ];
    for phi in &maps {
        let r = quasi_invariance_residual(&k, CocycleSpec::DetJacobianPower(0.5), phi, &pairs(&DomainSpec::polydisc(2), 20, 53)).unwrap();
        assert!(r < 1e-8, "{r}");
    }
    assert!(PolydiscMap::new(vec![Complex64::new(1.0, 0.0)], vec![0.0]).is_err());
    assert!(PolydiscMap::new(vec![Complex64::new(0.1, 0.0)], vec![]).is_err());
}

#[test]
fn dimension_mismatch_is_rejected() {
    let phi = MobiusMap::identity(2);
    let r = quasi_invariance_residual(&KernelExpr::szego_disc(), CocycleSpec::DetJacobianPower(1.0), &phi, &[]);
    assert!(r.is_err());
    let r = quasi_invariance_residual(&KernelExpr::bergman_ball(2).unwrap(), CocycleSpec::CurvatureCocycle(1.0), &phi, &[]);
    assert!(r.is_err());
}
