//! Checks against oracles computed independently of the library.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use phi4_lame::atlas::{emit_profile_samples, sweep, GridAxis, SweepSpec};
use phi4_lame::constraints::{feasibility_at, residuals_at};
use phi4_lame::elliptic::{complete_elliptic_k, jacobi_triple};
use phi4_lame::families::{descriptor, evaluate_profile, Coefficients};
use phi4_lame::solver::{solve_family, solve_square_system, Diagnostic, SolutionRecord, SolveOptions, SolveSpec, Status};
use phi4_lame::verify::{collocation_residual, hyperbolic_limit_check, stencil_second_derivative, verify_record};
use phi4_lame::{Assignment, FamilyId, ModelParams, Var};

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Composite Simpson rule with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|k| f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + inner + f(b)) * h / 3.0
}

fn incomplete_f(phi: f64, m: f64) -> f64 {
    simpson(|t| 1.0 / (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, phi, 2000)
}

/// The acceptable root of `3m x² + 2(1+m) x + 1 = 0`.
fn ratio_oracle(m: f64) -> f64 {
    (-(1.0 + m) + (1.0 - m + m * m).sqrt()) / (3.0 * m)
}

#[test]
fn quarter_period_matches_quadrature() {
    for m in [0.0, 0.1, 0.5, 0.9, 0.99] {
        let k = complete_elliptic_k(m).unwrap();
        assert!((k - incomplete_f(FRAC_PI_2, m)).abs() < 1e-11, "m={m}");
    }
}

#[test]
fn sn_inverts_the_incomplete_integral() {
    for m in [0.2, 0.6, 0.95] {
        for phi in [0.1, 0.7, 1.3, 2.5] {
            let u = incomplete_f(phi, m);
            let t = jacobi_triple(u, m).unwrap();
            assert!((t.sn - phi.sin()).abs() < 1e-11, "m={m} phi={phi}");
            assert!((t.cn - phi.cos()).abs() < 1e-11);
        }
    }
}

#[test]
fn affine_and_planted_roots() {
    let c = [1.5, -2.0, 0.25];
    let root = solve_square_system(
        |x: &[f64]| x.iter().zip(&c).map(|(a, b)| a - b).collect(),
        &[0.0; 3],
        &SolveOptions::default(),
    )
    .unwrap();
    assert_eq!(root.iterations, 1);

    // Plant a configuration and subtract its residual so it becomes a root.
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for f in [FamilyId::SymI, FamilyId::AsymI, FamilyId::Mix2III, FamilyId::Mix1II] {
        let mut plant = Assignment::new();
        for v in Var::ALL {
            plant.set(v, rng.random_range(-1.5..1.5));
        }
        plant.set(Var::M, 0.6);
        let offset = residuals_at(f, &plant);
        let free = &descriptor(f).unknowns;
        let start: Vec<f64> = free.iter().map(|&v| plant.get(v) + 0.05).collect();
        let res = |x: &[f64]| {
            let mut a = plant;
            for (v, val) in free.iter().zip(x) {
                a.set(*v, *val);
            }
            residuals_at(f, &a).iter().zip(&offset).map(|(r, o)| r - o).collect()
        };
        let root = solve_square_system(res, &start, &SolveOptions::default()).unwrap();
        for (v, x) in free.iter().zip(&root.x) {
            assert!((x - plant.get(*v)).abs() < 1e-10, "{f} {v:?}");
        }
    }
}

#[test]
fn double_root_is_flagged_singular() {
    let root = solve_square_system(|x: &[f64]| vec![x[0] * x[0]], &[1.0], &SolveOptions::default()).unwrap();
    assert!(root.x[0].abs() < 1e-6);
    assert!(root.singular);
}

fn zero_field(alpha1: f64, m: f64) -> SolveSpec {
    SolveSpec::new(FamilyId::SymII)
        .fix(Var::Hz, 0.0)
        .fix(Var::Alpha1, alpha1)
        .fix(Var::Beta1, 1.0)
        .fix(Var::Beta2, 1.0)
        .fix(Var::Gamma, 2.0)
        .fix(Var::M, m)
        .free(&[Var::A, Var::B, Var::D, Var::F, Var::Alpha2])
        .bounds(Var::D, 0.2, 4.0)
        .bounds(Var::A, -3.0, 3.0)
        .bounds(Var::B, -3.0, 3.0)
        .bounds(Var::F, -3.0, 3.0)
        .bounds(Var::Alpha2, -4.0, 4.0)
        .restarts(48)
        .seed(21)
}

fn converged(spec: &SolveSpec) -> Vec<SolutionRecord> {
    solve_family(spec).unwrap().records.into_iter().filter(|r| r.status == Status::Converged).collect()
}

#[test]
fn ratio_is_independent_of_scale() {
    for m in [0.3, 0.8] {
        for alpha1 in [-1.0, -4.0] {
            let recs = converged(&zero_field(alpha1, m));
            assert!(!recs.is_empty());
            for r in &recs {
                assert!((r.coeffs.f / r.coeffs.a - ratio_oracle(m)).abs() < 1e-9, "m={m} α₁={alpha1}");
                assert!(verify_record(r, 256).unwrap().max_abs() < 1e-8);
            }
        }
    }
}

#[test]
fn ratio_oracle_limits() {
    let xs: Vec<f64> = (1..=100).map(|k| ratio_oracle(k as f64 / 100.0)).collect();
    assert!(xs.windows(2).all(|w| w[1] > w[0]));
    assert!((ratio_oracle(1.0) + 1.0 / 3.0).abs() < 1e-15);
    assert!((ratio_oracle(1e-6) + 0.5).abs() < 1e-6);
}

#[test]
fn solve_is_deterministic() {
    let a = serde_json::to_vec(&solve_family(&zero_field(-1.0, 0.5)).unwrap()).unwrap();
    let b = serde_json::to_vec(&solve_family(&zero_field(-1.0, 0.5)).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn hyperbolic_limit_on_the_zero_field_branch() {
    let reference = converged(&zero_field(-1.0, 1.0)).remove(0);
    let ms = [0.9, 0.99, 0.999999, 1.0];
    let rows = hyperbolic_limit_check(&reference, &ms).unwrap();
    assert!(rows[0].distance > rows[1].distance && rows[1].distance > rows[2].distance);
    assert!(rows[2].distance < 1e-3);
    assert_eq!(rows[3].distance, 0.0);
    for row in &rows {
        let x = row.coeffs.f / row.coeffs.a;
        let m = row.m;
        assert!((3.0 * m * x + (1.0 + m) - (1.0 - m + m * m).sqrt()).abs() < 1e-9, "m={m}");
    }
}

#[test]
fn constraint_failure_shows_in_collocation() {
    let a = phi4_lame::constraints::reductions::zero_field_branch(FamilyId::SymII, -1.0, 2.0, 0.6).unwrap();
    for (v, delta) in [(Var::A, 2e-3), (Var::F, 2e-3), (Var::Alpha2, 5e-3), (Var::D, 2e-3)] {
        let b = a.with(v, a.get(v) + delta);
        assert!(sup(&residuals_at(FamilyId::SymII, &b)) > 1e-3, "{v:?}");
        let rec = SolutionRecord::from_assignment(FamilyId::SymII, &b).unwrap();
        assert!(verify_record(&rec, 256).unwrap().max_abs() > 1e-6, "{v:?}");
    }
}

#[test]
fn stencil_reproduces_the_lattice_curvature() {
    // φ = A·sn²: φ'' at the origin is 2AD².
    let c = Coefficients {
        a: 1.3,
        b: 0.0,
        d: 0.8,
        f: 0.0,
        g: 0.0,
        h: None,
        x0: 0.4,
        m: phi4_lame::elliptic::EllipticParameter::new(0.7).unwrap(),
    };
    let (p2, _) = stencil_second_derivative(FamilyId::SymII, &c, -c.x0).unwrap();
    let expect = 2.0 * c.a * c.d * c.d;
    assert!((p2 - expect).abs() < 1e-6 * expect);
}

#[test]
fn zero_profile_has_zero_residual() {
    let c = Coefficients {
        a: 0.0,
        b: 0.0,
        d: 1.0,
        f: 0.0,
        g: 0.0,
        h: None,
        x0: 0.0,
        m: phi4_lame::elliptic::EllipticParameter::new(0.5).unwrap(),
    };
    let params = ModelParams::zeros(phi4_lame::ModelId::Sym)
        .with(Var::Alpha1, -1.0)
        .unwrap()
        .with(Var::Beta1, 1.0)
        .unwrap()
        .with(Var::Hz, 0.0)
        .unwrap();
    let rep = collocation_residual(FamilyId::SymI, &params, &c, 64).unwrap();
    assert_eq!(rep.max_abs(), 0.0);
}

#[test]
fn sech_pair_configuration() {
    let amp = 1.0 / 37.0f64.sqrt();
    let a = Assignment::new()
        .with(Var::A, amp)
        .with(Var::B, amp)
        .with(Var::D, 1.0)
        .with(Var::H, 6.0 * amp)
        .with(Var::M, 1.0)
        .with(Var::Alpha1, 0.5)
        .with(Var::Alpha2, 0.5)
        .with(Var::Beta1, 1.0)
        .with(Var::Beta2, 1.0)
        .with(Var::Gamma, -3.0)
        .with(Var::Eta, -9.0)
        .with(Var::Delta1, 3.0);
    assert!(sup(&residuals_at(FamilyId::Mix1X, &a)) < 1e-14);
    assert!(feasibility_at(FamilyId::Mix1X, &a).is_feasible());
    // Any other δ₁ breaks the φ sech² balance.
    assert!(sup(&residuals_at(FamilyId::Mix1X, &a.with(Var::Delta1, 2.5))) > 1e-3);
}

#[test]
fn pure_coupling_example() {
    let a = Assignment::new()
        .with(Var::Beta1, 1.0)
        .with(Var::Gamma, -2.0)
        .with(Var::A, 1.0)
        .with(Var::B, 1.0)
        .with(Var::M, 0.5);
    let labels = &descriptor(FamilyId::SymI).equation_labels;
    let k = labels.iter().position(|l| l == "S-I.4").unwrap();
    assert_eq!(residuals_at(FamilyId::SymI, &a)[k], 0.0);
}

#[test]
fn sweep_over_the_zero_field_branch() {
    let spec = SweepSpec {
        grid: BTreeMap::from([(Var::M, GridAxis { start: 0.25, stop: 1.0, count: 4 })]),
        base: zero_field(-1.0, 0.5).restarts(24),
        seed: 5,
    };
    let file = sweep(&spec).unwrap();
    assert_eq!(file.points.len(), 4);
    let mut ms: Vec<f64> = Vec::new();
    for r in file.converged() {
        let m = r.coeffs.m.value();
        assert!((r.coeffs.f / r.coeffs.a - ratio_oracle(m)).abs() < 1e-9);
        assert!(r.pde_max.unwrap() < 1e-8);
        if !ms.contains(&m) {
            ms.push(m);
        }
    }
    assert_eq!(ms, vec![0.25, 0.5, 0.75, 1.0]);
}

#[test]
fn sweep_of_an_infeasible_region_reports_every_point() {
    let base = SolveSpec::new(FamilyId::SymI)
        .fix(Var::Gamma, 1.0)
        .fix(Var::Alpha1, -1.0)
        .fix(Var::Alpha2, -1.0)
        .fix(Var::Beta1, 1.0)
        .fix(Var::Beta2, 1.0)
        .fix(Var::Hz, 0.3)
        .fix(Var::Rho1, 0.2)
        .fix(Var::Rho2, 0.1)
        .fix(Var::Rho3, 0.4)
        .fix(Var::M, 0.5)
        .free(&[Var::A, Var::B, Var::D, Var::F, Var::G])
        .restarts(8);
    let spec = SweepSpec {
        grid: BTreeMap::from([(Var::M, GridAxis { start: 0.2, stop: 0.8, count: 4 })]),
        base,
        seed: 1,
    };
    let file = sweep(&spec).unwrap();
    assert_eq!(file.converged().count(), 0);
    let flagged = file
        .points
        .iter()
        .filter(|p| p.diagnostics.iter().any(|d| matches!(d, Diagnostic::FeasibilityViolation { .. })))
        .count();
    assert_eq!(flagged, 4);
}

#[test]
fn single_point_sweep_equals_a_solve() {
    let base = zero_field(-1.0, 0.5).restarts(12);
    let spec = SweepSpec {
        grid: BTreeMap::from([(Var::M, GridAxis { start: 0.5, stop: 0.5, count: 1 })]),
        base: base.clone(),
        seed: base.seed,
    };
    let file = sweep(&spec).unwrap();
    let direct = solve_family(&base).unwrap();
    assert_eq!(file.records.len(), direct.records.len());
    for (a, b) in file.records.iter().zip(&direct.records) {
        assert_eq!(a.coeffs, b.coeffs);
        assert_eq!(a.params, b.params);
    }
}

#[test]
fn hyperbolic_profile_columns() {
    // S-I at m = 1 with F = 0, G = −B: φ = A·tanh², ψ = −B·sech².
    let a = Assignment::new()
        .with(Var::A, 0.8)
        .with(Var::B, 0.6)
        .with(Var::G, -0.6)
        .with(Var::D, 0.7)
        .with(Var::M, 1.0);
    let mut rec = SolutionRecord::from_assignment(FamilyId::SymI, &a).unwrap();
    rec.status = Status::Converged;
    let rows = emit_profile_samples(&rec, 101).unwrap();
    for (x, p, q) in &rows {
        let t = (0.7 * x).tanh();
        assert!((p - 0.8 * t * t).abs() < 1e-13);
        assert!((q + 0.6 * (1.0 - t * t)).abs() < 1e-13);
        assert!(p.abs() <= 0.8 + 1e-15);
    }
    let ends = emit_profile_samples(&rec, 2).unwrap();
    assert_eq!(ends.len(), 2);
    assert_eq!(ends[0].0, -10.0 / 0.7);
    assert_eq!(ends[1].0, 10.0 / 0.7);
    let (p, _) = evaluate_profile(FamilyId::SymI, &rec.coeffs, 0.0).unwrap();
    assert_eq!(p, 0.0);
}
