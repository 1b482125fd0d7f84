//! Hand transcription for the asymmetric model.

use super::{Relation, Spec, V};

/// Pulse lattice `φ = F + A·sn²`, `ψ = G + B·sn²` with cubic couplings
/// `d1`, `d2` entering as `+3δφ²`.
pub(super) fn pulse_pair(v: &V, d1: f64, d2: f64) -> Vec<f64> {
    let V { a, b, d, f, g, m, a1, a2, b1, b2, gm, eta, .. } = *v;
    let dd = d * d;
    vec![
        2.0 * a1 * f + 3.0 * d1 * f * f + 4.0 * b1 * f.powi(3) + 2.0 * gm * f * g * g + eta * g * g
            - 2.0 * a * dd,
        2.0 * a1 * a
            + 6.0 * d1 * a * f
            + 12.0 * b1 * f * f * a
            + 4.0 * gm * b * f * g
            + 2.0 * gm * a * g * g
            + 2.0 * eta * b * g
            + 4.0 * (1.0 + m) * a * dd,
        3.0 * d1 * a * a + 12.0 * b1 * f * a * a + 2.0 * gm * f * b * b + 4.0 * gm * a * b * g + eta * b * b
            - 6.0 * a * m * dd,
        2.0 * b1 * a * a + gm * b * b,
        2.0 * a2 * g + 3.0 * d2 * g * g + 4.0 * b2 * g.powi(3) + 2.0 * gm * g * f * f + 2.0 * eta * f * g
            - 2.0 * b * dd,
        2.0 * a2 * b
            + 6.0 * d2 * b * g
            + 12.0 * b2 * g * g * b
            + 4.0 * gm * a * f * g
            + 2.0 * gm * b * f * f
            + 2.0 * eta * (a * g + b * f)
            + 4.0 * (1.0 + m) * b * dd,
        3.0 * d2 * b * b + 12.0 * b2 * g * b * b + 2.0 * gm * g * a * a + 4.0 * gm * a * b * f + 2.0 * eta * a * b
            - 6.0 * m * b * dd,
        2.0 * b2 * b * b + gm * a * a,
    ]
}

pub(super) fn a1(v: &V) -> Vec<f64> {
    pulse_pair(v, v.d1, v.d2)
}

pub(super) fn predicates() -> Vec<Spec> {
    use Relation::*;
    vec![
        Spec::new("β₁ > 0", Gt, |v| (v.b1, 0.0)),
        Spec::new("β₂ > 0", Gt, |v| (v.b2, 0.0)),
        Spec::new("γ < 0", Lt, |v| (v.gm, 0.0)),
        Spec::new("γ² = 4β₁β₂", Eq, |v| (v.gm * v.gm, 4.0 * v.b1 * v.b2)),
        Spec::new("√β₁A² = √β₂B²", Eq, |v| (v.sb1() * v.a * v.a, v.sb2() * v.b * v.b)),
    ]
}
