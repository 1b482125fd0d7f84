//! Hand transcriptions for the mixed model. The cubic term of φ enters the
//! field equation as `−3δ₁φ²`, so δ₁ carries a minus sign throughout.

use super::sym::scaled;
use super::{asym, Relation, Spec, V};
use crate::families::FamilyId;

pub(super) fn m2_1(v: &V) -> Vec<f64> {
    asym::pulse_pair(v, -v.d1, 0.0)
}

/// `φ = F + A·sn²` with `ψ = B·sn·cn`, or `B·sn·dn` when `dn` is set.
fn m2_2_3(v: &V, dn: bool) -> Vec<f64> {
    let V { a, b, d, f, m, a1, a2, b1, b2, gm, d1, eta, .. } = *v;
    let dd = d * d;
    let bb = b * b;
    let (mq, c5) = if dn { (m, 1.0 + 4.0 * m) } else { (1.0, 4.0 + m) };
    vec![
        2.0 * a1 * f - 3.0 * d1 * f * f + 4.0 * b1 * f.powi(3) - 2.0 * a * dd,
        2.0 * a1 * a - 6.0 * d1 * a * f + 12.0 * b1 * f * f * a + 2.0 * gm * f * bb + eta * bb
            + 4.0 * (1.0 + m) * a * dd,
        -3.0 * d1 * a * a + 12.0 * b1 * f * a * a + 2.0 * gm * bb * (a - mq * f) - mq * eta * bb
            - 6.0 * a * m * dd,
        2.0 * b1 * a * a - mq * gm * bb,
        2.0 * a2 + 2.0 * gm * f * f + 2.0 * eta * f + c5 * dd,
        4.0 * b2 * bb + 4.0 * gm * a * f + 2.0 * eta * a - 6.0 * m * dd,
        2.0 * mq * b2 * bb - gm * a * a,
    ]
}

pub(super) fn m2_2(v: &V) -> Vec<f64> {
    m2_2_3(v, false)
}

pub(super) fn m2_3(v: &V) -> Vec<f64> {
    m2_2_3(v, true)
}

pub(super) fn m2_4(v: &V) -> Vec<f64> {
    let V { a, b, d, f, m, a1, a2, b1, b2, gm, d1, eta, .. } = *v;
    let dd = d * d;
    let bb = b * b;
    vec![
        2.0 * a1 * f - 3.0 * d1 * f * f + 4.0 * b1 * f.powi(3) + 2.0 * gm * bb * f + eta * bb - 2.0 * a * dd,
        2.0 * a1 * a - 6.0 * d1 * a * f + 12.0 * b1 * f * f * a + 2.0 * gm * bb * (a - (1.0 + m) * f)
            - (1.0 + m) * eta * bb
            + 4.0 * (1.0 + m) * a * dd,
        -3.0 * d1 * a * a + 12.0 * b1 * f * a * a + 2.0 * gm * bb * (m * f - (1.0 + m) * a) + m * eta * bb
            - 6.0 * a * m * dd,
        2.0 * b1 * a * a + m * gm * bb,
        2.0 * a2 + 4.0 * b2 * bb + 2.0 * gm * f * f + 2.0 * eta * f + (1.0 + m) * dd,
        -4.0 * (1.0 + m) * b2 * bb + 4.0 * gm * a * f + 2.0 * eta * a - 6.0 * m * dd,
        2.0 * m * b2 * bb + gm * a * a,
    ]
}

/// Kink lattice `φ = F + A·sn`, `ψ = G + B·sn`.
pub(super) fn m1_1(v: &V) -> Vec<f64> {
    let V { a, b, d, f, g, m, a1, a2, b1, b2, gm, d1, eta, .. } = *v;
    let dd = d * d;
    vec![
        2.0 * a1 * f - 3.0 * d1 * f * f + 4.0 * b1 * f.powi(3) + eta * g * g + 2.0 * gm * f * g * g,
        2.0 * a1 * a - 6.0 * d1 * a * f + 12.0 * b1 * f * f * a + 2.0 * eta * b * g + 2.0 * gm * a * g * g
            + 4.0 * gm * f * b * g
            + (1.0 + m) * a * dd,
        -3.0 * d1 * a * a + 12.0 * b1 * f * a * a + eta * b * b + 2.0 * gm * f * b * b + 4.0 * gm * a * b * g,
        2.0 * b1 * a * a + gm * b * b - m * dd,
        2.0 * a2 * g + 4.0 * b2 * g.powi(3) + 2.0 * eta * f * g + 2.0 * gm * g * f * f,
        2.0 * a2 * b + 12.0 * b2 * g * g * b + 2.0 * eta * (a * g + f * b) + 4.0 * gm * a * f * g
            + 2.0 * gm * b * f * f
            + (1.0 + m) * b * dd,
        12.0 * b2 * g * b * b + 2.0 * eta * a * b + 2.0 * gm * g * a * a + 4.0 * gm * a * b * f,
        2.0 * b2 * b * b + gm * a * a - m * dd,
    ]
}

/// Pulse lattices `φ = F + A·cn` (`k1 = 2m − 1`, `k3 = m`) and
/// `φ = F + A·dn` (`k1 = 2 − m`, `k3 = 1`), ψ alike with `G`, `B`.
fn m1_pulse(v: &V, k1: f64, k3: f64) -> Vec<f64> {
    let V { a, b, d, f, g, a1, a2, b1, b2, gm, d1, eta, .. } = *v;
    let dd = d * d;
    vec![
        2.0 * a1 * f - 3.0 * d1 * f * f + 4.0 * b1 * f.powi(3) + eta * g * g + 2.0 * gm * f * g * g,
        2.0 * a1 * a - 6.0 * d1 * a * f + 12.0 * b1 * f * f * a + 2.0 * eta * b * g + 2.0 * gm * a * g * g
            + 4.0 * gm * f * b * g
            - k1 * a * dd,
        -3.0 * d1 * a * a + 12.0 * b1 * f * a * a + eta * b * b + 2.0 * gm * f * b * b + 4.0 * gm * a * b * g,
        2.0 * b1 * a * a + gm * b * b + k3 * dd,
        2.0 * a2 * g + 4.0 * b2 * g.powi(3) + 2.0 * eta * f * g + 2.0 * gm * g * f * f,
        2.0 * a2 * b + 12.0 * b2 * g * g * b + 2.0 * eta * (a * g + f * b) + 4.0 * gm * a * f * g
            + 2.0 * gm * b * f * f
            - k1 * b * dd,
        12.0 * b2 * g * b * b + 2.0 * eta * a * b + 2.0 * gm * g * a * a + 4.0 * gm * a * b * f,
        2.0 * b2 * b * b + gm * a * a + k3 * dd,
    ]
}

pub(super) fn m1_2(v: &V) -> Vec<f64> {
    m1_pulse(v, 2.0 * v.m - 1.0, v.m)
}

pub(super) fn m1_3(v: &V) -> Vec<f64> {
    m1_pulse(v, 2.0 - v.m, 1.0)
}

/// Squaring `cn` or `dn` moves part of the top equation into the offset one:
/// the derived equations are recombinations of the hand ones.
fn pulse_predict(h: &[f64], v: &V, q: f64) -> Vec<f64> {
    let field = |h: &[f64], amp: f64| {
        [
            -h[0] - h[2],
            q * h[2],
            -h[1] - 2.0 * amp * h[3],
            2.0 * amp * q * h[3],
        ]
    };
    let mut out = field(&h[..4], v.a).to_vec();
    out.extend(field(&h[4..], v.b));
    out
}

pub(super) fn m1_2_predict(h: &[f64], v: &V) -> Vec<f64> {
    pulse_predict(h, v, 1.0)
}

pub(super) fn m1_3_predict(h: &[f64], v: &V) -> Vec<f64> {
    pulse_predict(h, v, v.m)
}

/// Rational pulse `φ = A/(cosh u + H)`, `ψ = B/(cosh u + H)` at m = 1.
pub(super) fn m1_10(v: &V) -> Vec<f64> {
    let V { a, b, d, h, a1, a2, b1, b2, gm, d1, eta, .. } = *v;
    let dd = d * d;
    vec![
        2.0 * a1 - dd,
        -3.0 * d1 * a * a + eta * b * b + 3.0 * h * a * dd,
        2.0 * b1 * a * a + gm * b * b - (h * h - 1.0) * dd,
        2.0 * a2 - dd,
        2.0 * eta * a + 3.0 * h * dd,
        2.0 * b2 * b * b + gm * a * a - (h * h - 1.0) * dd,
    ]
}

pub(super) fn m1_10_predict(h: &[f64], v: &V) -> Vec<f64> {
    let (a, b) = (v.a, v.b);
    scaled(h, &[-a, -1.0, -2.0 * a, -b, -b, -2.0 * b])
}

pub(super) fn predicates(family: FamilyId) -> Vec<Spec> {
    use FamilyId::*;
    use Relation::*;
    let mut out = vec![
        Spec::new("β₁ > 0", Gt, |v| (v.b1, 0.0)),
        Spec::new("β₂ > 0", Gt, |v| (v.b2, 0.0)),
    ];
    let product = || Spec::new("γ² = 4β₁β₂", Eq, |v| (v.gm * v.gm, 4.0 * v.b1 * v.b2));
    let ratio = || Spec::new("√β₁A² = √β₂B²", Eq, |v| (v.sb1() * v.a * v.a, v.sb2() * v.b * v.b));
    let m_ratio = || {
        Spec::new("√β₁A² = m√β₂B²", Eq, |v| {
            (v.sb1() * v.a * v.a, v.m * v.sb2() * v.b * v.b)
        })
    };
    let negative = || Spec::new("γ < 0", Lt, |v| (v.gm, 0.0));
    let positive = || Spec::new("γ > 0", Gt, |v| (v.gm, 0.0));
    let strong = || Spec::new("γ² > 4β₁β₂", Gt, |v| (v.gm * v.gm, 4.0 * v.b1 * v.b2));
    let locked = || Spec::new("η + 2γF = 0", Eq, |v| (v.eta + 2.0 * v.gm * v.f, 0.0));
    match family {
        Mix2I => out.extend([negative(), product(), ratio()]),
        Mix2II => out.extend([positive(), product(), ratio()]),
        Mix2III => out.extend([positive(), product(), m_ratio()]),
        Mix2IV => out.extend([negative(), product(), m_ratio()]),
        Mix1I => {}
        Mix1II | Mix1III => out.extend([negative(), strong()]),
        Mix1IV | Mix1V | Mix1VI | Mix1VII => out.extend([
            locked(),
            Spec::new("η < 0", Lt, |v| (v.eta, 0.0)),
            Spec::new("2β₁ > γ", Gt, |v| (2.0 * v.b1, v.gm)),
            Spec::new("γ > 2β₂", Gt, |v| (v.gm, 2.0 * v.b2)),
            Spec::new("2β₂ > 0", Gt, |v| (2.0 * v.b2, 0.0)),
        ]),
        Mix1VIII | Mix1IX => out.extend([locked(), negative(), strong()]),
        Mix1X => out.extend([
            Spec::new("D² = 2α₁", Eq, |v| (v.d * v.d, 2.0 * v.a1)),
            Spec::new("D² = 2α₂", Eq, |v| (v.d * v.d, 2.0 * v.a2)),
            Spec::new("ηA + 3α₁H = 0", Eq, |v| (v.eta * v.a + 3.0 * v.a1 * v.h, 0.0)),
            Spec::new("η(γ + 2β₁) + 3β₁γ = 0", Eq, |v| {
                (v.eta * (v.gm + 2.0 * v.b1) + 3.0 * v.b1 * v.gm, 0.0)
            }),
            Spec::new("A²(4β₁β₂ − γ²) = (H² − 1)D²(2β₂ − γ)", Eq, |v| {
                (
                    v.a * v.a * (4.0 * v.b1 * v.b2 - v.gm * v.gm),
                    (v.h * v.h - 1.0) * v.d * v.d * (2.0 * v.b2 - v.gm),
                )
            }),
            Spec::new("B²(4β₁β₂ − γ²) = (H² − 1)D²(2β₁ − γ)", Eq, |v| {
                (
                    v.b * v.b * (4.0 * v.b1 * v.b2 - v.gm * v.gm),
                    (v.h * v.h - 1.0) * v.d * v.d * (2.0 * v.b1 - v.gm),
                )
            }),
        ]),
        _ => unreachable!("not a mixed-model family"),
    }
    out
}
