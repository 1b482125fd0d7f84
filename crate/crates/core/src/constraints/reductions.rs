//! Closed-form special cases layered over the general systems.
//!
//! Each check is a relation the general constraint system implies on a
//! particular branch (zero field, `m = 1` with a chosen offset, `G = 0`).
//! They take a full assignment in the general parametrization. On the
//! `F = −A, G = −B` branches the relations are stated for the sech²
//! amplitudes `A' = −A`, `B' = −B`, and the mapping is applied here.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::FamilyId;
use crate::vars::{Assignment, Var};

use super::{STRICT_MARGIN, V};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CheckKind {
    /// `value` must vanish.
    Zero,
    /// `value` must be strictly positive.
    Positive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub label: &'static str,
    pub kind: CheckKind,
    pub value: f64,
}

impl Check {
    fn zero(label: &'static str, value: f64) -> Self {
        Check {
            label,
            kind: CheckKind::Zero,
            value,
        }
    }

    fn positive(label: &'static str, value: f64) -> Self {
        Check {
            label,
            kind: CheckKind::Positive,
            value,
        }
    }

    /// Zero checks pass when `|value| ≤ tol`; sign checks need the strict margin.
    pub fn holds(&self, tol: f64) -> bool {
        match self.kind {
            CheckKind::Zero => self.value.abs() <= tol,
            CheckKind::Positive => self.value > STRICT_MARGIN,
        }
    }
}

/// Every check holds at `tol`.
pub fn all_hold(checks: &[Check], tol: f64) -> bool {
    checks.iter().all(|c| c.holds(tol))
}

/// Root `x = F/A` of `3mx² + 2(1+m)x + 1 = 0` on the zero-field sn² branch:
/// `3mx = −(1+m) + √(1 − m + m²)`. Tends to −1/2 as m → 0.
pub fn zero_field_ratio(m: f64) -> f64 {
    if m < 1e-6 {
        // Series avoids the cancellation in the closed form.
        return -0.5 + m / 8.0 + m * m / 16.0;
    }
    (-(1.0 + m) + (1.0 - m + m * m).sqrt()) / (3.0 * m)
}

/// A configuration on the zero-field branch of S-II (`ψ = B·sn·cn`) or S-IV
/// (`ψ = B·sn·dn`) with the given `α₁ < 0`, `γ > 0` and `m ∈ (0, 1]`; β₁ = β₂ = γ/2,
/// `A > 0`, `B > 0`.
pub fn zero_field_branch(family: FamilyId, alpha1: f64, gamma: f64, m: f64) -> Result<Assignment> {
    let dn = match family {
        FamilyId::SymII => false,
        FamilyId::SymIV => true,
        other => return Err(Error::invalid(format!("{other} has no zero-field sn² branch"))),
    };
    if !(alpha1 < 0.0) || !(gamma > 0.0) || !(m > 0.0 && m <= 1.0) {
        return Err(Error::domain(format!(
            "zero-field branch needs alpha1 < 0, gamma > 0, 0 < m <= 1; got {alpha1}, {gamma}, {m}"
        )));
    }
    let x = zero_field_ratio(m);
    let mq = if dn { m } else { 1.0 };
    // From 3m·mq·D² = (1 + 2mq·x)γA² and D² = α₁x + γA²x³.
    let ga2 = alpha1 * x / ((1.0 + 2.0 * mq * x) / (3.0 * m * mq) - x.powi(3));
    let d2 = alpha1 * x + ga2 * x.powi(3);
    let c5 = if dn { 1.0 + 4.0 * m } else { 4.0 + m };
    let alpha2 = (-c5 * d2 - 2.0 * x * x * ga2) / 2.0;
    if !(ga2 > 0.0) || !(d2 > 0.0) {
        return Err(Error::domain(format!("no real branch at m = {m}")));
    }
    let a = (ga2 / gamma).sqrt();
    let b = a / mq.sqrt();
    Ok(Assignment::new()
        .with(Var::A, a)
        .with(Var::B, b)
        .with(Var::D, d2.sqrt())
        .with(Var::F, x * a)
        .with(Var::M, m)
        .with(Var::Alpha1, alpha1)
        .with(Var::Alpha2, alpha2)
        .with(Var::Beta1, gamma / 2.0)
        .with(Var::Beta2, gamma / 2.0)
        .with(Var::Gamma, gamma))
}

/// Zero-field relations of S-II or S-IV; `x = F/A`.
pub fn zero_field(family: FamilyId, a: &Assignment) -> Result<Vec<Check>> {
    let v = V::from(a);
    let V { a: amp, b, d, f, m, a1, a2, b1, b2, gm, hz, .. } = v;
    let d2 = d * d;
    let x = f / amp;
    let ga2 = gm * amp * amp;
    let mut out = vec![
        Check::zero("H_z = 0", hz),
        Check::zero("γ = 2β₁", gm - 2.0 * b1),
        Check::zero("γ = 2β₂", gm - 2.0 * b2),
    ];
    match family {
        FamilyId::SymII => out.extend([
            Check::zero("A² = B²", amp * amp - b * b),
            Check::zero("3mD² = (1+2x)γA²", 3.0 * m * d2 - (1.0 + 2.0 * x) * ga2),
            Check::zero("D² = α₁x + γA²x³", d2 - a1 * x - ga2 * x.powi(3)),
            Check::zero(
                "−2(1+m)D² = α₁ + x(1+3x)γA²",
                -2.0 * (1.0 + m) * d2 - a1 - x * (1.0 + 3.0 * x) * ga2,
            ),
            Check::zero(
                "−(4+m)D² = 2α₂ + 2x²γA²",
                -(4.0 + m) * d2 - 2.0 * a2 - 2.0 * x * x * ga2,
            ),
        ]),
        FamilyId::SymIV => out.extend([
            Check::zero("A² = mB²", amp * amp - m * b * b),
            Check::zero("3m²D² = (1+2mx)γA²", 3.0 * m * m * d2 - (1.0 + 2.0 * m * x) * ga2),
            Check::zero("D² = α₁x + γA²x³", d2 - a1 * x - ga2 * x.powi(3)),
            Check::zero(
                "−2(1+m)mD² = mα₁ + x(1+3mx)γA²",
                -2.0 * (1.0 + m) * m * d2 - m * a1 - x * (1.0 + 3.0 * m * x) * ga2,
            ),
            Check::zero(
                "−(1+4m)D² = 2α₂ + 2x²γA²",
                -(1.0 + 4.0 * m) * d2 - 2.0 * a2 - 2.0 * x * x * ga2,
            ),
        ]),
        other => return Err(Error::invalid(format!("{other} has no zero-field sn² branch"))),
    }
    out.push(Check::zero(
        "3mx = −(1+m) + √(1−m+m²)",
        3.0 * m * x + (1.0 + m) - (1.0 - m + m * m).sqrt(),
    ));
    Ok(out)
}

/// The zero-field S-II branch at m = 1, with the amplitude relation as the
/// general system gives it (`γA² = 9|α₁|/4`).
pub fn zero_field_hyperbolic(a: &Assignment) -> Vec<Check> {
    let v = V::from(a);
    let d2 = v.d * v.d;
    vec![
        Check::zero("m = 1", v.m - 1.0),
        Check::zero("F = −A/3", v.f + v.a / 3.0),
        Check::positive("α₁ < 0", -v.a1),
        Check::positive("α₂ < 0", -v.a2),
        Check::zero("D² = |α₁|/4", d2 - v.a1.abs() / 4.0),
        Check::zero("γA² = 9|α₁|/4", v.gm * v.a * v.a - 2.25 * v.a1.abs()),
        Check::zero("|α₂| = 7|α₁|/8", v.a2.abs() - 0.875 * v.a1.abs()),
    ]
}

/// The amplitude relation as printed for the same branch, `γA² = 3|α₁|/2`.
/// The general system contradicts it; kept so the disagreement is testable.
pub fn zero_field_hyperbolic_printed_amplitude(a: &Assignment) -> Check {
    let v = V::from(a);
    Check::zero("γA² = 3|α₁|/2", v.gm * v.a * v.a - 1.5 * v.a1.abs())
}

fn tanh_sech_frame(v: &V) -> Vec<Check> {
    vec![
        Check::zero("m = 1", v.m - 1.0),
        Check::zero("F = 0", v.f),
        Check::zero("G = −B", v.g + v.b),
    ]
}

fn sech_sech_frame(v: &V) -> Vec<Check> {
    vec![
        Check::zero("m = 1", v.m - 1.0),
        Check::zero("F = −A", v.f + v.a),
        Check::zero("G = −B", v.g + v.b),
    ]
}

/// S-I at m = 1 with `φ = A·tanh²`, `ψ = B·sech²`.
pub fn sym_tanh_sech(a: &Assignment) -> Vec<Check> {
    let v = V::from(a);
    let V { a: amp, b, d, a1, a2, b1, gm, hz, r1, r2, r3, .. } = v;
    let d2 = d * d;
    let mut out = tanh_sech_frame(&v);
    out.extend([
        Check::positive("γ < 0", -gm),
        Check::positive("α₂ < 0", -a2),
        Check::positive("ρ₃ < 0", -r3),
        Check::zero("D² = |α₂| − |γ|A²", d2 - a2.abs() + gm.abs() * amp * amp),
        Check::zero(
            "3|α₂| = H_z|ρ₃|A + |γ|A²",
            3.0 * a2.abs() - hz * r3.abs() * amp - gm.abs() * amp * amp,
        ),
        Check::zero("2AD² = −H_zρ₁ + H_z|ρ₃|B²", 2.0 * amp * d2 + hz * r1 - hz * r3.abs() * b * b),
        Check::zero(
            "H_zρ₁ + 3H_zρ₂A² = 2α₁A + 4β₁A³",
            hz * r1 + 3.0 * hz * r2 * amp * amp - 2.0 * a1 * amp - 4.0 * b1 * amp.powi(3),
        ),
        Check::zero(
            "3α₁A + 10β₁A³ = 6H_zρ₂A² + H_z|ρ₃|B²",
            3.0 * a1 * amp + 10.0 * b1 * amp.powi(3) - 6.0 * hz * r2 * amp * amp - hz * r3.abs() * b * b,
        ),
    ]);
    out
}

/// S-I at m = 1 with both fields pure sech² pulses.
pub fn sym_sech_sech(a: &Assignment) -> Vec<Check> {
    let v = V::from(a);
    let V { d, a1, a2, gm, hz, r1, r2, r3, .. } = v;
    let (ap, bp) = (-v.a, -v.b);
    let d2 = d * d;
    let mut out = sech_sech_frame(&v);
    out.extend([
        Check::zero("ρ₁ = 0", r1),
        Check::positive("γ < 0", -gm),
        Check::zero("α₁ = α₂", a1 - a2),
        Check::positive("α₁ > 0", a1),
        Check::positive("ρ₂ > 0", r2),
        Check::positive("ρ₃ > 0", r3),
        Check::zero("D² = α₁/2", d2 - a1 / 2.0),
        Check::zero("2H_zρ₃A = 3α₁", 2.0 * hz * r3 * ap - 3.0 * a1),
        Check::zero("3ρ₂A² = (2A² − B²)ρ₃", 3.0 * r2 * ap * ap - (2.0 * ap * ap - bp * bp) * r3),
    ]);
    out
}

/// A-I (cubic couplings `d1`, `d2` entering as `+3δφ²`) at m = 1 with
/// `φ = A·tanh²`, `ψ = B·sech²`.
fn pulse_tanh_sech(v: &V, d1: f64, d2: f64) -> Vec<Check> {
    let V { a: amp, b, d, a1, a2, gm, eta, .. } = *v;
    let dd = d * d;
    let g = gm.abs();
    let mut out = tanh_sech_frame(v);
    out.extend([
        Check::positive("γ < 0", -gm),
        Check::positive("α₂ < 0", -a2),
        Check::zero("2AD² = ηB²", 2.0 * amp * dd - eta * b * b),
        Check::zero(
            "6AD² = 3δ₁A² + 4|γ|AB² + ηB²",
            6.0 * amp * dd - 3.0 * d1 * amp * amp - 4.0 * g * amp * b * b - eta * b * b,
        ),
        Check::zero(
            "−4AD² = α₁A − |γ|AB² − ηB²",
            -4.0 * amp * dd - a1 * amp + g * amp * b * b + eta * b * b,
        ),
        Check::zero("2D² = α₂ − |γ|A² + ηA", 2.0 * dd - a2 + g * amp * amp - eta * amp),
        Check::zero(
            "6D² = 3δ₂B − 4|γ|A² + 2ηA",
            6.0 * dd - 3.0 * d2 * b + 4.0 * g * amp * amp - 2.0 * eta * amp,
        ),
    ]);
    out
}

fn pulse_sech_sech(v: &V, d1: f64, d2: f64) -> Vec<Check> {
    let V { d, a1, a2, eta, .. } = *v;
    let (ap, bp) = (-v.a, -v.b);
    let dd = d * d;
    let mut out = sech_sech_frame(v);
    out.extend([
        Check::zero("α₁ = α₂", a1 - a2),
        Check::positive("α₁ > 0", a1),
        Check::zero("2D² = α₁", 2.0 * dd - a1),
        Check::zero("−6AD² = 3δ₁A² + ηB²", -6.0 * ap * dd - 3.0 * d1 * ap * ap - eta * bp * bp),
        Check::zero(
            "−6BD² = 3δ₂B² + 2ηAB",
            -6.0 * bp * dd - 3.0 * d2 * bp * bp - 2.0 * eta * ap * bp,
        ),
    ]);
    out
}

pub fn asym_tanh_sech(a: &Assignment) -> Vec<Check> {
    let v = V::from(a);
    pulse_tanh_sech(&v, v.d1, v.d2)
}

pub fn asym_sech_sech(a: &Assignment) -> Vec<Check> {
    let v = V::from(a);
    pulse_sech_sech(&v, v.d1, v.d2)
}

/// The mixed-model pulse lattice: the asymmetric relations with `δ₂ = 0`
/// and the φ cubic coupling entering as `−3δ₁φ²`.
pub fn mix_tanh_sech(a: &Assignment) -> Vec<Check> {
    let v = V::from(a);
    pulse_tanh_sech(&v, -v.d1, 0.0)
}

pub fn mix_sech_sech(a: &Assignment) -> Vec<Check> {
    let v = V::from(a);
    pulse_sech_sech(&v, -v.d1, 0.0)
}

/// Amplitudes of the kink lattice, valid for any G.
pub fn kink_amplitudes(a: &Assignment) -> Vec<Check> {
    let v = V::from(a);
    let det = 4.0 * v.b1 * v.b2 - v.gm * v.gm;
    let md2 = v.m * v.d * v.d;
    vec![
        Check::zero("A²(4β₁β₂ − γ²) = mD²(2β₂ − γ)", v.a * v.a * det - md2 * (2.0 * v.b2 - v.gm)),
        Check::zero("B²(4β₁β₂ − γ²) = mD²(2β₁ − γ)", v.b * v.b * det - md2 * (2.0 * v.b1 - v.gm)),
    ]
}

/// The `G = 0` kink lattice: amplitudes, `D`, `F` and the three parameter
/// constraints.
pub fn kink_without_offset(a: &Assignment) -> Vec<Check> {
    let v = V::from(a);
    let V { d, f, g, m, a1, a2, b1, gm, d1, eta, .. } = v;
    let mut out = vec![Check::zero("G = 0", g)];
    out.extend(kink_amplitudes(a));
    out.extend([
        Check::zero("D² = α₁/(1+m)", d * d - a1 / (1.0 + m)),
        Check::zero("F = √(α₁/4β₁)", f - (a1 / (4.0 * b1)).sqrt()),
        Check::zero("δ₁² = 4α₁β₁", d1 * d1 - 4.0 * a1 * b1),
        Check::zero("η² = 2γ(α₁ + 2α₂)", eta * eta - 2.0 * gm * (a1 + 2.0 * a2)),
        Check::zero("δ₁η + 2α₁γ = 0", d1 * eta + 2.0 * a1 * gm),
    ]);
    out
}
