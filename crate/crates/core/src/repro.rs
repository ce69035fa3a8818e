//! The acceptance suite: eleven numerical claims with pinned tolerances.
//!
//! Each check returns a [`CriterionOutcome`] instead of panicking so the
//! same code drives the test target and the `repro` command.

use std::fmt;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::automorphism::{curvature_quasi_check, quasi_invariance_residual, CocycleSpec, MobiusMap};
use crate::calculus::{phi_gram_entry, series_head_coefficients, CurvatureParams};
use crate::error::Result;
use crate::expr::{eval, eval_jet, parse_kernel, KernelExpr, Polynomial};
use crate::geometry::{sample_points, DomainSpec, MultiIndex, Point, RngSeed};
use crate::linalg::{min_eigenvalue, CMat};
use crate::oracle::{jet_discrepancy, relative_error};
use crate::positivity::{default_families, gram, psd_check, psd_check_points, wallach_scan, PointFamily, DEFAULT_RESOLUTION, DEFAULT_TOL};
use crate::rkhs::{multiplier_bound, z2_tensor_e1_norm};

#[derive(Debug, Clone, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2}. {:<34} {} ({:.2} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.seconds
        )
    }
}

fn run(id: u8, title: &'static str, body: impl FnOnce() -> Result<(bool, String)>) -> CriterionOutcome {
    let start = Instant::now();
    let (passed, detail) = match body() {
        Ok(x) => x,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionOutcome { id, title, passed, detail, seconds: start.elapsed().as_secs_f64() }
}

fn pairs(domain: &DomainSpec, count: usize, seed: u64) -> Vec<(Point, Point)> {
    let pts = sample_points(domain, 2 * count, RngSeed(seed));
    pts.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect()
}

fn k(text: &str) -> KernelExpr {
    parse_kernel(text).expect("built-in DSL text parses")
}

pub const C1_TOL: f64 = 1e-12;
pub const C1_SECONDS: f64 = 1.0;

/// Curvature kernel of the Szegő kernel equals (1 − z w̄)^{−(α+β+2)}.
pub fn criterion_1() -> CriterionOutcome {
    run(1, "curvature exact disc identity", || {
        let start = Instant::now();
        let ps = pairs(&DomainSpec::disc(), 100, 101);
        let mut worst: f64 = 0.0;
        for (a, b) in [(1.0, 1.0), (0.5, 2.0), (2.0, 3.0)] {
            let lhs = KernelExpr::curvature(KernelExpr::szego_disc(), a, b)?;
            let rhs = KernelExpr::ball_power(1, a + b + 2.0)?;
            for (z, w) in &ps {
                let (x, y) = (eval(&lhs, z, w)?[(0, 0)], eval(&rhs, z, w)?[(0, 0)]);
                worst = worst.max((x - y).norm() / y.norm());
            }
        }
        let secs = start.elapsed().as_secs_f64();
        Ok((worst < C1_TOL && secs < C1_SECONDS, format!("max rel err {worst:.2e} < {C1_TOL:.0e}, {secs:.3} s < {C1_SECONDS} s")))
    })
}

pub const C2_TOL: f64 = 1e-10;

/// ⟨φⱼ(w), φᵢ(z)⟩ = αβ(α+β)·𝕂^(α,β)(z, w)ᵢⱼ.
pub fn criterion_2() -> CriterionOutcome {
    run(2, "phi-vector Gram factorization", || {
        let (a, b) = (1.0, 2.0);
        let params = CurvatureParams::new(a, b)?;
        let mut worst: f64 = 0.0;
        for (base, domain) in [(KernelExpr::szego_disc(), DomainSpec::disc()), (KernelExpr::bergman_ball(2)?, DomainSpec::ball(2))] {
            let curv = KernelExpr::curvature(base.clone(), a, b)?;
            let m = base.dim();
            for (z, w) in pairs(&domain, 50, 202) {
                let c = eval(&curv, &z, &w)?;
                for i in 0..m {
                    for j in 0..m {
                        let g = phi_gram_entry(&base, params, &z, &w, i, j)?;
                        let want = c[(i, j)] * (a * b * (a + b));
                        worst = worst.max((g - want).norm() / want.norm());
                    }
                }
            }
        }
        Ok((worst < C2_TOL, format!("max entrywise rel err {worst:.2e} < {C2_TOL:.0e}")))
    })
}

pub const C3_HALF_WIDTH: f64 = 0.05;
pub const C3_SECONDS: f64 = 60.0;

/// Generalized Wallach set boundaries: 0 for ball Bergman kernels, −1 for the disc.
pub fn criterion_3() -> CriterionOutcome {
    run(3, "generalized Wallach boundaries", || {
        let cases = [
            ("bergman_ball(2)", DomainSpec::ball(2), -1.0, 1.0, 0.0),
            ("bergman_ball(3)", DomainSpec::ball(3), -1.0, 1.0, 0.0),
            ("bergman_disc()", DomainSpec::disc(), -2.0, 0.0, -1.0),
        ];
        let mut ok = true;
        let mut parts = Vec::new();
        for (text, domain, lo, hi, target) in cases {
            let start = Instant::now();
            let est = wallach_scan(&k(text), lo, hi, &domain, &default_families(303), DEFAULT_TOL, DEFAULT_RESOLUTION)?;
            let secs = start.elapsed().as_secs_f64();
            let good = (est.boundary - target).abs() <= C3_HALF_WIDTH && secs < C3_SECONDS;
            ok &= good;
            parts.push(format!("{text}: t*≈{:.3} [{:.3},{:.3}] {secs:.1}s", est.boundary, est.bracket.0, est.bracket.1));
        }
        Ok((ok, parts.join("; ")))
    })
}

/// 𝕂_{1.5} on 𝔹₂ has a negative Gram eigenvalue.
pub fn criterion_4() -> CriterionOutcome {
    run(4, "lambda<2 failure certificate", || {
        let kern = KernelExpr::ball_curvature(2, 1.5)?;
        let mut best = f64::INFINITY;
        let mut any = false;
        for fam in [404u64, 405, 406] {
            let r = psd_check(&kern, &DomainSpec::ball(2), 30, RngSeed(fam), DEFAULT_TOL)?;
            best = best.min(r.min_eig);
            any |= !r.psd && r.min_eig < -DEFAULT_TOL;
        }
        Ok((any, format!("most negative eigenvalue {best:.3e} (tol {DEFAULT_TOL:.0e})")))
    })
}

pub const C5_TOL: f64 = 1e-8;

/// ‖z₂⊗e₁‖ in the space of 𝕂_λ against √((λ−1)/(λ(λ−2))), and blow-up as λ↓2.
pub fn criterion_5() -> CriterionOutcome {
    run(5, "z2 x e1 norm formula", || {
        let mut worst: f64 = 0.0;
        for lambda in [2.5, 3.0, 5.0, 10.0] {
            let got = z2_tensor_e1_norm(2, lambda)?;
            let want = ((lambda - 1.0) / (lambda * (lambda - 2.0))).sqrt();
            worst = worst.max((got - want).abs() / want);
        }
        let grid = [10.0, 5.0, 3.0, 2.5, 2.1, 2.01];
        let vals: Vec<f64> = grid.iter().map(|&l| z2_tensor_e1_norm(2, l)).collect::<Result<_>>()?;
        let increasing = vals.windows(2).all(|w| w[1] > w[0]);
        let last = *vals.last().expect("non-empty grid");
        Ok((
            worst < C5_TOL && increasing && last > 5.0,
            format!("max rel err {worst:.2e} < {C5_TOL:.0e}; λ=2.01 → {last:.4}; increasing as λ↓2: {increasing}"),
        ))
    })
}

pub const C6_TOL: f64 = 1e-12;

/// 𝕂_λ(0,0) = I and ∂ᵢ∂̄ⱼ𝕂_λ(0,0) = (λ−1)δᵢⱼI + Eⱼᵢ.
pub fn criterion_6() -> CriterionOutcome {
    run(6, "ball matrix origin jets", || {
        let mut worst: f64 = 0.0;
        for m in [2usize, 3] {
            for lambda in [2.5, 4.0] {
                let o = Point::origin(m);
                let table = eval_jet(&KernelExpr::ball_curvature(m, lambda)?, &o, &o, 1)?;
                worst = worst.max((table.value() - &CMat::identity(m)).max_abs());
                let closed = crate::calculus::ball_curvature_closed_form(m, lambda, &o, &o)?;
                worst = worst.max((&closed - &CMat::identity(m)).max_abs());
                for i in 0..m {
                    for j in 0..m {
                        let mut want = CMat::zeros(m, m);
                        if i == j {
                            want = CMat::identity(m).scale(Complex64::new(lambda - 1.0, 0.0));
                        }
                        want[(j, i)] += Complex64::new(1.0, 0.0);
                        let got = table.entry(&MultiIndex::unit(m, i), &MultiIndex::unit(m, j)).expect("order 1");
                        worst = worst.max((got - &want).max_abs());
                    }
                }
            }
        }
        Ok((worst < C6_TOL, format!("max abs err {worst:.2e} < {C6_TOL:.0e}")))
    })
}

pub const C7_TOL: f64 = 1e-10;

/// Head coefficients of K^t∂∂̄ log K for K = 1 + zw̄ + 0.1(zw̄)², and the resulting failure of NND.
pub fn criterion_7() -> CriterionOutcome {
    run(7, "series head coefficients", || {
        let (c0, c1) = series_head_coefficients(&[1.0, 0.1], 1.0)?;
        let err = (c0 - 1.0).abs().max((c1 + 0.6).abs());
        let kern = KernelExpr::wallach_kernel(KernelExpr::diagonal_series(vec![1.0, 0.1])?, 1.0)?;
        let domain = DomainSpec::disc().with_radius(0.05)?;
        let r = psd_check(&kern, &domain, 20, RngSeed(707), DEFAULT_TOL)?;
        Ok((
            err < C7_TOL && !r.psd,
            format!("(c0, c1) = ({c0:.12}, {c1:.12}), err {err:.1e}; near-origin min eig {:.3e}, psd={}", r.min_eig, r.psd),
        ))
    })
}

pub const C8_TOL: f64 = 1e-8;

/// Bergman transformation rule and the curvature cocycle rule under random Möbius maps.
pub fn criterion_8() -> CriterionOutcome {
    run(8, "Mobius quasi-invariance", || {
        let mut rng = RngSeed(808).rng();
        let mut bergman: f64 = 0.0;
        for m in 1..=3usize {
            let b = if m == 1 { KernelExpr::bergman_disc() } else { KernelExpr::bergman_ball(m)? };
            for map in 0..10u64 {
                let phi = MobiusMap::random(m, 0.7, &mut rng);
                let ps = pairs(&DomainSpec::ball(m), 20, 8080 + 16 * m as u64 + map);
                bergman = bergman.max(quasi_invariance_residual(&b, CocycleSpec::DetJacobianPower(1.0), &phi, &ps)?);
            }
        }
        let mut curv: f64 = 0.0;
        let b2 = KernelExpr::bergman_ball(2)?;
        for t in [0.0, 0.5, 1.0] {
            for map in 0..10u64 {
                let phi = MobiusMap::random(2, 0.7, &mut rng);
                let ps = pairs(&DomainSpec::ball(2), 20, 8180 + map);
                curv = curv.max(curvature_quasi_check(&b2, t, &phi, &ps)?);
            }
        }
        Ok((
            bergman < C8_TOL && curv < C8_TOL,
            format!("Bergman rule max residual {bergman:.2e}, curvature cocycle max residual {curv:.2e} (< {C8_TOL:.0e})"),
        ))
    })
}

pub const C9_TOL: f64 = 0.01;

/// ‖M_z‖ on the Hardy space, and (c²−ff̄)K ⪰ 0 ⇒ (c²−ff̄)²𝕂 ⪰ 0 on every sample.
pub fn criterion_9() -> CriterionOutcome {
    run(9, "multiplier bound and transfer", || {
        let f = Polynomial::coordinate(1, 0)?;
        let b = multiplier_bound(&KernelExpr::szego_disc(), &f, &DomainSpec::disc(), &default_families(909), DEFAULT_TOL, DEFAULT_RESOLUTION)?;
        let bound_ok = (b.bound - 1.0).abs() <= C9_TOL;
        let (checked, premises, violations) = transfer_property(&f)?;
        Ok((
            bound_ok && violations == 0,
            format!(
                "bound {:.4} in [{:.4},{:.4}]; transfer: {checked} cases, {premises} premises held, {violations} violations",
                b.bound, b.bracket.0, b.bracket.1
            ),
        ))
    })
}

/// Counts (cases, premises that held, implication violations).
pub fn transfer_property(f: &Polynomial) -> Result<(usize, usize, usize)> {
    let kernels = [KernelExpr::szego_disc(), KernelExpr::bergman_disc(), KernelExpr::diagonal_series(vec![0.5, 0.2])?];
    let (mut checked, mut premises, mut violations) = (0, 0, 0);
    for kern in &kernels {
        let curv = KernelExpr::curvature(kern.clone(), 1.0, 1.0)?;
        for c in [0.8, 1.0, 1.5] {
            let d = KernelExpr::defect(c, f.clone())?;
            let premise = KernelExpr::product(d.clone(), kern.clone())?;
            let conclusion = KernelExpr::product(KernelExpr::pow(d, 2.0)?, curv.clone())?;
            for fam in [PointFamily { n: 10, seed: 91 }, PointFamily { n: 20, seed: 92 }, PointFamily { n: 30, seed: 93 }] {
                let pts = fam.sample(&DomainSpec::disc());
                checked += 1;
                if psd_check_points(&premise, pts.clone(), Some(RngSeed(fam.seed)), DEFAULT_TOL)?.psd {
                    premises += 1;
                    if !psd_check_points(&conclusion, pts, Some(RngSeed(fam.seed)), DEFAULT_TOL)?.psd {
                        violations += 1;
                    }
                }
            }
        }
    }
    Ok((checked, premises, violations))
}

pub const C10_TOL: f64 = 1e-14;

/// J₀(K₁,K₂) = K₁K₂ and the J₁ Gram matrix is positive definite.
pub fn criterion_10() -> CriterionOutcome {
    run(10, "jet kernel", || {
        let mut worst: f64 = 0.0;
        for (k1, k2, domain) in [
            ("szego_disc()", "szego_disc()", DomainSpec::disc()),
            ("bergman_ball(2)", "ball_power(2, 0.5)", DomainSpec::ball(2)),
        ] {
            let (k1, k2) = (k(k1), k(k2));
            let j0 = KernelExpr::jet(k1.clone(), k2.clone(), 0)?;
            let prod = KernelExpr::product(k1, k2)?;
            for (z, w) in pairs(&domain, 50, 1010) {
                worst = worst.max(relative_error(&eval(&j0, &z, &w)?, &eval(&prod, &z, &w)?));
            }
        }
        let s = KernelExpr::szego_disc();
        let j1 = KernelExpr::jet(s.clone(), s, 1)?;
        let pts = sample_points(&DomainSpec::disc(), 10, RngSeed(1011));
        let min = min_eigenvalue(&gram(&j1, &pts)?)?;
        Ok((worst < C10_TOL && min > 0.0, format!("J0 vs product max rel err {worst:.1e}; J1 Gram (10 points) min eig {min:.3e}")))
    })
}

pub const C11_TOL: f64 = 1e-6;
pub const C11_PAIRS: usize = 50;

/// Kernels exercising every built-in and every combinator, with their sampling domains.
pub fn oracle_suite() -> Vec<(KernelExpr, DomainSpec)> {
    let ball2 = DomainSpec::ball(2);
    let disc = DomainSpec::disc();
    [
        ("szego_disc()", disc),
        ("bergman_disc()", disc),
        ("bergman_ball(2)", ball2),
        ("ball_power(2, 0.7)", ball2),
        ("diagonal_series([0.5, -0.2, 0.1])", disc),
        ("ball_curvature(2, 2.5)", ball2),
        ("defect(1.2, poly(2, [1, 1, 0], [0.5, 0, 2]))", ball2),
        ("pow(bergman_ball(2), 0.37)", ball2),
        ("product(szego_disc(), diagonal_series([1, 0.25]))", disc),
        ("sum(bergman_ball(2), ball_power(2, 1.5))", ball2),
        ("difference(bergman_ball(2), ball_power(2, 1.5))", ball2),
        ("tensor(szego_disc(), pow(szego_disc(), 1.5))", DomainSpec::polydisc(2)),
        ("log_hessian(bergman_ball(2))", ball2),
        ("curvature(bergman_ball(2), 0.5, 2)", ball2),
        ("jet(szego_disc(), pow(szego_disc(), 2), 1)", disc),
        ("scale(curvature(szego_disc(), 1, 1), 2.5)", disc),
    ]
    .into_iter()
    .map(|(t, d)| (k(t), d))
    .collect()
}

/// Every jet entry of order ≤ 2 against contour-integral derivatives.
pub fn criterion_11() -> CriterionOutcome {
    run(11, "differentiation oracle", || {
        let mut worst: (f64, String) = (0.0, String::new());
        let suite = oracle_suite();
        for (n, (kern, domain)) in suite.iter().enumerate() {
            for (z, w) in pairs(domain, C11_PAIRS, 1100 + n as u64) {
                let e = jet_discrepancy(kern, &z, &w, 2)?;
                if e >= worst.0 {
                    worst = (e, kern.canonical());
                }
            }
        }
        Ok((worst.0 < C11_TOL, format!("{} kernels x {C11_PAIRS} pairs, max rel err {:.2e} < {C11_TOL:.0e} (worst: {})", suite.len(), worst.0, worst.1)))
    })
}

pub fn criterion(id: u8) -> Option<CriterionOutcome> {
    Some(match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        9 => criterion_9(),
        10 => criterion_10(),
        11 => criterion_11(),
        _ => return None,
    })
}

pub fn run_all() -> Vec<CriterionOutcome> {
    (1..=11).filter_map(criterion).collect()
}
