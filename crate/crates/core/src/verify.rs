//! Independent check of candidate profiles against the field equations
//! themselves, by dense collocation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::elliptic::{complete_elliptic_k, EllipticParameter};
use crate::error::{Error, Result};
use crate::families::{analytic_second_derivative, evaluate_profile, Coefficients, FamilyId};
use crate::models::{rhs_at, ModelParams};
use crate::solver::{solve_square_system, SolutionRecord, SolveOptions};
use crate::vars::{Assignment, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    AnalyticSecondDerivative,
    FiniteDifference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub max_abs_phi: f64,
    pub max_abs_psi: f64,
    pub rms_phi: f64,
    pub rms_psi: f64,
    pub n_points: usize,
    pub domain: (f64, f64),
    pub method: Method,
}

impl ResidualReport {
    pub fn max_abs(&self) -> f64 {
        self.max_abs_phi.max(self.max_abs_psi)
    }
}

pub const MIN_POINTS: usize = 64;

/// One period `[−x₀, −x₀ + 4K/D]` for m < 1, `[−x₀ − 10/D, −x₀ + 10/D]` at m = 1.
pub fn collocation_domain(coeffs: &Coefficients) -> Result<(f64, f64)> {
    let d = coeffs.d;
    if !(d > 0.0) {
        return Err(Error::domain(format!("D must be positive, got {d}")));
    }
    let x0 = coeffs.x0;
    if coeffs.m.is_hyperbolic() {
        Ok((-x0 - 10.0 / d, -x0 + 10.0 / d))
    } else {
        Ok((-x0, -x0 + 4.0 * complete_elliptic_k(coeffs.m.value())? / d))
    }
}

fn grid((a, b): (f64, f64), n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

fn check_inputs(family: FamilyId, params: &ModelParams, n_points: usize) -> Result<Assignment> {
    if params.model() != family.model() {
        return Err(Error::ParamModelMismatch {
            expected: family.model(),
            found: params.model(),
        });
    }
    if n_points < MIN_POINTS {
        return Err(Error::invalid(format!("need at least {MIN_POINTS} points, got {n_points}")));
    }
    Ok(params.to_assignment())
}

fn report<F>(
    family: FamilyId,
    params: &ModelParams,
    coeffs: &Coefficients,
    n_points: usize,
    method: Method,
    second: F,
) -> Result<ResidualReport>
where
    F: Fn(f64) -> Result<(f64, f64)> + Sync,
{
    let a = check_inputs(family, params, n_points)?;
    let domain = collocation_domain(coeffs)?;
    let model = family.model();
    let rows: Vec<(f64, f64)> = grid(domain, n_points)
        .par_iter()
        .map(|&x| {
            let (p, q) = evaluate_profile(family, coeffs, x)?;
            let (p2, q2) = second(x)?;
            let (rp, rq) = rhs_at(model, &a, p, q);
            Ok((p2 - rp, q2 - rq))
        })
        .collect::<Result<_>>()?;
    let n = rows.len() as f64;
    let fold = |pick: fn(&(f64, f64)) -> f64| {
        let max = rows.iter().map(|r| pick(r).abs()).fold(0.0, f64::max);
        let rms = (rows.iter().map(|r| pick(r).powi(2)).sum::<f64>() / n).sqrt();
        (max, rms)
    };
    let (max_abs_phi, rms_phi) = fold(|r| r.0);
    let (max_abs_psi, rms_psi) = fold(|r| r.1);
    Ok(ResidualReport {
        max_abs_phi,
        max_abs_psi,
        rms_phi,
        rms_psi,
        n_points,
        domain,
        method,
    })
}

/// `φ'' − ∂V/∂φ` and `ψ'' − ∂V/∂ψ` at `n_points` uniform points, with the
/// closed-form second derivatives of the shapes.
pub fn collocation_residual(
    family: FamilyId,
    params: &ModelParams,
    coeffs: &Coefficients,
    n_points: usize,
) -> Result<ResidualReport> {
    report(family, params, coeffs, n_points, Method::AnalyticSecondDerivative, |x| {
        analytic_second_derivative(family, coeffs, x)
    })
}

/// Stencil step `ε^{1/5}·max(1, 1/D)`.
pub fn stencil_step(d: f64) -> f64 {
    f64::EPSILON.powf(0.2) * (1.0 / d).max(1.0)
}

/// Five-point central second derivative of the profile.
pub fn stencil_second_derivative(family: FamilyId, coeffs: &Coefficients, x: f64) -> Result<(f64, f64)> {
    let h = stencil_step(coeffs.d);
    let at = |k: f64| evaluate_profile(family, coeffs, x + k * h);
    let (pm2, qm2) = at(-2.0)?;
    let (pm1, qm1) = at(-1.0)?;
    let (p0, q0) = at(0.0)?;
    let (pp1, qp1) = at(1.0)?;
    let (pp2, qp2) = at(2.0)?;
    let d2 = |m2: f64, m1: f64, c: f64, p1: f64, p2: f64| (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h);
    Ok((d2(pm2, pm1, p0, pp1, pp2), d2(qm2, qm1, q0, qp1, qp2)))
}

/// As [`collocation_residual`] with second derivatives from the stencil.
pub fn finite_difference_crosscheck(
    family: FamilyId,
    params: &ModelParams,
    coeffs: &Coefficients,
    n_points: usize,
) -> Result<ResidualReport> {
    report(family, params, coeffs, n_points, Method::FiniteDifference, |x| {
        stencil_second_derivative(family, coeffs, x)
    })
}

pub const DEFAULT_POINTS: usize = 512;

/// Collocation report for a record.
pub fn verify_record(record: &SolutionRecord, n_points: usize) -> Result<ResidualReport> {
    collocation_residual(record.family, &record.params, &record.coeffs, n_points)
}

/// Fills `pde_max` from collocation at [`DEFAULT_POINTS`].
pub fn attach_pde(record: &mut SolutionRecord) -> Result<()> {
    record.pde_max = Some(verify_record(record, DEFAULT_POINTS)?.max_abs());
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub m: f64,
    /// Sup-norm distance of both fields to the m = 1 profile over
    /// `|x + x₀| ≤ 5/D`.
    pub distance: f64,
    pub coeffs: Coefficients,
    pub params: ModelParams,
}

/// Largest m-step of the internal continuation.
const MAX_M_STEP: f64 = 0.025;

fn profile_distance(family: FamilyId, a: &Coefficients, b: &Coefficients) -> Result<f64> {
    let x0 = b.x0;
    let xs = grid((-x0 - 5.0 / b.d, -x0 + 5.0 / b.d), 401);
    let mut worst = 0.0f64;
    for x in xs {
        let (p, q) = evaluate_profile(family, a, x)?;
        let (r, s) = evaluate_profile(family, b, x)?;
        worst = worst.max((p - r).abs()).max((q - s).abs());
    }
    Ok(worst)
}

/// Re-solves the record's system at each `m` of `m_sequence`, marching from
/// m = 1 with warm starts, and measures the profile distance to the m = 1
/// record. Rows come back in the order of `m_sequence`.
pub fn hyperbolic_limit_check(record: &SolutionRecord, m_sequence: &[f64]) -> Result<Vec<LimitRow>> {
    if !record.coeffs.m.is_hyperbolic() {
        return Err(Error::invalid("the reference record must have m = 1"));
    }
    for &m in m_sequence {
        EllipticParameter::new(m)?;
    }
    let family = record.family;
    let spec = &record.provenance.spec;
    let free = &spec.free;
    if free.is_empty() {
        return Err(Error::invalid("the reference record carries no free names to re-solve"));
    }
    let base = record.assignment();
    let opts = SolveOptions::default();
    let mut order: Vec<usize> = (0..m_sequence.len()).collect();
    order.sort_by(|&i, &j| m_sequence[j].total_cmp(&m_sequence[i]));

    let mut rows: Vec<Option<LimitRow>> = vec![None; m_sequence.len()];
    let mut current = base;
    let mut last_good: Option<f64> = None;
    for i in order {
        let target = m_sequence[i];
        let from = current.get(Var::M);
        let steps = ((from - target).abs() / MAX_M_STEP).ceil().max(1.0) as usize;
        for k in 1..=steps {
            let m = from + (target - from) * k as f64 / steps as f64;
            let mut a = current;
            a.set(Var::M, m);
            let start: Vec<f64> = free.iter().map(|&v| a.get(v)).collect();
            let residual = |x: &[f64]| {
                let mut b = a;
                for (v, val) in free.iter().zip(x) {
                    b.set(*v, *val);
                }
                crate::constraints::residuals_at(family, &b)
            };
            match solve_square_system(residual, &start, &opts) {
                Ok(root) => {
                    for (v, val) in free.iter().zip(&root.x) {
                        a.set(*v, *val);
                    }
                    a.set(Var::D, a.get(Var::D).abs());
                    current = a;
                }
                Err(_) => {
                    return Err(Error::ContinuationFailure {
                        failed_m: m,
                        last_good_m: last_good,
                    })
                }
            }
        }
        last_good = Some(target);
        let coeffs = Coefficients::from_assignment(family, &current)?;
        rows[i] = Some(LimitRow {
            m: target,
            distance: profile_distance(family, &coeffs, &record.coeffs)?,
            coeffs,
            params: ModelParams::from_assignment(family.model(), &current),
        });
    }
    Ok(rows.into_iter().map(|r| r.expect("every m visited")).collect())
}
