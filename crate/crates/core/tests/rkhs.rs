//! Reproducing-kernel inner products, norms and multiplier bounds.

use kerncalc::positivity::{default_families, psd_check, DEFAULT_RESOLUTION, DEFAULT_TOL};
use kerncalc::rkhs::{inner_product, multiplier_bound, norm, z2_tensor_e1_element, z2_tensor_e1_norm};
use kerncalc::{eval, parse_kernel, sample_points, DomainSpec, KernelError, KernelExpr, MultiIndex, Point, Polynomial, RkhsElement, RngSeed, Section};
use num_complex::Complex64;
use rand::Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn unit(k: usize, i: usize) -> Vec<Complex64> {
    let mut v = vec![c(0.0, 0.0); k];
    v[i] = c(1.0, 0.0);
    v
}

fn shift(p: &Point, i: usize, h: f64) -> Point {
    let mut z = p.coords().to_vec();
    z[i] += h;
    Point::new(z).unwrap()
}

#[test]
fn reproducing_property_against_finite_differences() {
    let h = 1e-4;
    let cases = [(parse_kernel("bergman_ball(2)").unwrap(), 0usize), (KernelExpr::ball_curvature(2, 3.0).unwrap(), 1)];
    for (kern, row) in cases {
        let k = kern.size();
        let pts = sample_points(&DomainSpec::ball(2).with_radius(0.8).unwrap(), 60, RngSeed(21));
        for pair in pts.chunks(2) {
            let (v, w) = (&pair[0], &pair[1]);
            for dir in 0..2 {
                // ⟨∂̄_dir K(·,w)e₀, K(·,v)e_row⟩ = ∂̄_dir K(v,w)[row, 0]; K is antiholomorphic in w, so ∂̄ is the real partial
                let e1 = RkhsElement::new(kern.clone(), vec![Section::new(c(1.0, 0.0), w.clone(), MultiIndex::unit(2, dir), unit(k, 0))]).unwrap();
                let e2 = RkhsElement::new(kern.clone(), vec![Section::new(c(1.0, 0.0), v.clone(), MultiIndex::zero(2), unit(k, row))]).unwrap();
                let got = inner_product(&e1, &e2).unwrap();
                let fd = (eval(&kern, v, &shift(w, dir, h)).unwrap()[(row, 0)] - eval(&kern, v, &shift(w, dir, -h)).unwrap()[(row, 0)]) / (2.0 * h);
                assert!((got - fd).norm() < 1e-6 * fd.norm().max(1.0), "{kern} ∂̄: {got} vs {fd}");

                // ⟨K(·,w)e₀, ∂̄_dir K(·,v)e_row⟩ = ∂_dir K(v,w)[row, 0]
                let e3 = RkhsElement::new(kern.clone(), vec![Section::new(c(1.0, 0.0), v.clone(), MultiIndex::unit(2, dir), unit(k, row))]).unwrap();
                let e4 = RkhsElement::new(kern.clone(), vec![Section::new(c(1.0, 0.0), w.clone(), MultiIndex::zero(2), unit(k, 0))]).unwrap();
                let got = inner_product(&e4, &e3).unwrap();
                let fd = (eval(&kern, &shift(v, dir, h), w).unwrap()[(row, 0)] - eval(&kern, &shift(v, dir, -h), w).unwrap()[(row, 0)]) / (2.0 * h);
                assert!((got - fd).norm() < 1e-6 * fd.norm().max(1.0), "{kern} ∂: {got} vs {fd}");
            }
        }
    }
}

fn random_element<R: Rng>(kern: &KernelExpr, domain: &DomainSpec, rng: &mut R) -> RkhsElement {
    let (m, k) = (kern.dim(), kern.size());
    let n = rng.random_range(1..=4);
    let bases = sample_points(domain, n, RngSeed(rng.random()));
    let terms = bases
        .into_iter()
        .map(|b| {
            let mut index = vec![0u32; m];
            for _ in 0..rng.random_range(0..=2) {
                index[rng.random_range(0..m)] += 1;
            }
            let raw: Vec<Complex64> = (0..k).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let len = raw.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            let dir = raw.iter().map(|x| x / len).collect();
            Section::new(c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)), b, MultiIndex::new(index), dir)
        })
        .collect();
    RkhsElement::new(kern.clone(), terms).unwrap()
}

#[test]
fn squared_norms_are_non_negative() {
    let mut rng = RngSeed(22).rng();
    let cases = [
        (KernelExpr::szego_disc(), DomainSpec::disc()),
        (KernelExpr::ball_curvature(2, 2.5).unwrap(), DomainSpec::ball(2)),
        (parse_kernel("curvature(bergman_ball(2), 1, 1)").unwrap(), DomainSpec::ball(2)),
    ];
    for (kern, d) in &cases {
        for _ in 0..50 {
            let e = random_element(kern, &d.with_radius(0.8).unwrap(), &mut rng);
            let ip = inner_product(&e, &e).unwrap();
            assert!(ip.im.abs() <= 1e-9 * ip.re.abs().max(1.0));
            let n = norm(&e).unwrap();
            assert!(n >= 0.0 && n.is_finite());
        }
    }
}

#[test]
fn inner_product_is_hermitian_and_sesquilinear() {
    let mut rng = RngSeed(23).rng();
    let kern = KernelExpr::ball_curvature(2, 3.0).unwrap();
    let d = DomainSpec::ball(2).with_radius(0.8).unwrap();
    for _ in 0..10 {
        let a = random_element(&kern, &d, &mut rng);
        let b = random_element(&kern, &d, &mut rng);
        let ab = inner_product(&a, &b).unwrap();
        let ba = inner_product(&b, &a).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-10 * ab.norm().max(1.0));
        let s = c(0.3, -1.2);
        let scaled: Vec<Section> = b.terms().iter().map(|t| Section { coef: t.coef * s, ..t.clone() }).collect();
        let bs = RkhsElement::new(kern.clone(), scaled).unwrap();
        assert!((inner_product(&a, &bs).unwrap() - ab * s.conj()).norm() < 1e-10 * ab.norm().max(1.0));
    }
}

#[test]
fn z2_tensor_e1_closed_form() {
    for m in [2usize, 3] {
        for lambda in [2.5, 3.0, 5.0, 10.0] {
            let got = z2_tensor_e1_norm(m, lambda).unwrap();
            let want = ((lambda - 1.0) / (lambda * (lambda - 2.0))).sqrt();
            assert!((got - want).abs() < 1e-8 * want, "m={m} λ={lambda}: {got} vs {want}");
        }
    }
}

#[test]
fn z2_tensor_e1_norm_decreases_in_lambda() {
    let grid = [2.01, 2.05, 2.2, 2.5, 3.0, 4.0, 8.0, 20.0];
    let vals: Vec<f64> = grid.iter().map(|&l| z2_tensor_e1_norm(2, l).unwrap()).collect();
    assert!(vals.windows(2).all(|w| w[0] > w[1]));
    assert!(z2_tensor_e1_norm(2, 2.0).is_err());
}

#[test]
fn below_two_the_span_is_indefinite() {
    let e = z2_tensor_e1_element(2, 1.5).unwrap();
    assert!(matches!(norm(&e), Err(KernelError::NegativeNorm(x)) if x < 0.0));
}

#[test]
fn elements_roundtrip_through_json() {
    let mut rng = RngSeed(24).rng();
    let kern = KernelExpr::ball_curvature(2, 2.5).unwrap();
    let e = random_element(&kern, &DomainSpec::ball(2), &mut rng);
    let text = serde_json::to_string(&e.terms_json()).unwrap();
    let back = RkhsElement::from_terms_json(kern.clone(), serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back, e);
    assert!(RkhsElement::from_terms_json(kern, serde_json::json!([{"coef": [1, 0]}])).is_err());
}

#[test]
fn mismatched_kernels_are_rejected() {
    let o = Point::origin(1);
    let a = RkhsElement::kernel_section(KernelExpr::szego_disc(), o.clone()).unwrap();
    let b = RkhsElement::kernel_section(KernelExpr::bergman_disc(), o).unwrap();
    assert!(matches!(inner_product(&a, &b), Err(KernelError::KernelMismatch)));
}

#[test]
fn szego_multiplier_bound_is_one() {
    let f = Polynomial::coordinate(1, 0).unwrap();
    let b = multiplier_bound(&KernelExpr::szego_disc(), &f, &DomainSpec::disc(), &default_families(25), DEFAULT_TOL, DEFAULT_RESOLUTION).unwrap();
    assert!((b.bound - 1.0).abs() <= 0.01, "{}", b.bound);
    assert!(b.bracket.1 - b.bracket.0 <= DEFAULT_RESOLUTION);
    assert_eq!(b.function, f.to_string());
}

#[test]
fn curvature_bound_does_not_exceed_base_bound() {
    let f = Polynomial::coordinate(1, 0).unwrap();
    let fam = default_families(26);
    let d = DomainSpec::disc();
    let s = KernelExpr::szego_disc();
    let base = multiplier_bound(&s, &f, &d, &fam, DEFAULT_TOL, DEFAULT_RESOLUTION).unwrap();
    let curv = multiplier_bound(&KernelExpr::curvature(s, 1.0, 1.0).unwrap(), &f, &d, &fam, DEFAULT_TOL, DEFAULT_RESOLUTION).unwrap();
    assert!(curv.bound <= base.bound + DEFAULT_RESOLUTION, "{} vs {}", curv.bound, base.bound);
}

#[test]
fn constant_kernel_has_no_bracket() {
    let f = Polynomial::coordinate(1, 0).unwrap();
    let r = multiplier_bound(&KernelExpr::constant_one(), &f, &DomainSpec::disc(), &default_families(27), DEFAULT_TOL, DEFAULT_RESOLUTION);
    match r {
        Err(e @ KernelError::NoBracket { .. }) => assert!(e.is_bracket_failure()),
        other => panic!("{other:?}"),
    }
}

#[test]
fn squared_defect_times_curvature_is_psd() {
    let k = parse_kernel("product(pow(defect(1, coord(1, 1)), 2), curvature(szego_disc(), 1, 1))").unwrap();
    for seed in [28, 29] {
        assert!(psd_check(&k, &DomainSpec::disc(), 25, RngSeed(seed), DEFAULT_TOL).unwrap().psd);
    }
}
