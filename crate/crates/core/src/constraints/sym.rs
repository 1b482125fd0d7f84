//! Hand transcriptions for the symmetric model in an external field.

use super::{Relation, Spec, V};

pub(super) fn s1(v: &V) -> Vec<f64> {
    let V { a, b, d, f, g, m, a1, a2, b1, b2, gm, hz, r1, r2, r3, .. } = *v;
    let d2 = d * d;
    vec![
        2.0 * a1 * f + 4.0 * b1 * f.powi(3) + 2.0 * gm * f * g * g
            - hz * r1
            - 3.0 * hz * r2 * f * f
            - hz * r3 * g * g
            - 2.0 * a * d2,
        2.0 * a1 * a + 12.0 * b1 * f * f * a + 4.0 * gm * b * f * g + 2.0 * gm * a * g * g
            - 6.0 * hz * r2 * a * f
            - 2.0 * hz * r3 * b * g
            + 4.0 * (1.0 + m) * a * d2,
        12.0 * b1 * f * a * a + 2.0 * gm * f * b * b + 4.0 * gm * a * b * g
            - 3.0 * hz * r2 * a * a
            - hz * r3 * b * b
            - 6.0 * a * m * d2,
        2.0 * b1 * a * a + gm * b * b,
        2.0 * a2 * g + 4.0 * b2 * g.powi(3) + 2.0 * gm * g * f * f
            - 2.0 * hz * r3 * g * f
            - 2.0 * b * d2,
        2.0 * a2 * b + 12.0 * b2 * g * g * b + 4.0 * gm * a * f * g + 2.0 * gm * b * f * f
            - 2.0 * hz * r3 * (b * f + a * g)
            + 4.0 * (1.0 + m) * b * d2,
        12.0 * b2 * g * b * b + 2.0 * gm * g * a * a + 4.0 * gm * a * b * f
            - 2.0 * hz * r3 * a * b
            - 6.0 * m * b * d2,
        2.0 * b2 * b * b + gm * a * a,
    ]
}

pub(super) fn s1_predict(h: &[f64], v: &V) -> Vec<f64> {
    scaled(h, &[-1.0, -1.0, -1.0, -2.0 * v.a, -1.0, -1.0, -1.0, -2.0 * v.b])
}

/// `φ = F + A·sn²` with `ψ = B·sn·cn`, or `B·sn·dn` when `dn` is set.
fn s2_s4(v: &V, dn: bool) -> Vec<f64> {
    let V { a, b, d, f, m, a1, a2, b1, b2, gm, hz, r1, r2, r3, .. } = *v;
    let d2 = d * d;
    // sn·dn differs from sn·cn by where m lands.
    let (mq, c5) = if dn { (m, 1.0 + 4.0 * m) } else { (1.0, 4.0 + m) };
    vec![
        2.0 * a1 * f + 4.0 * b1 * f.powi(3) - hz * r1 - 3.0 * hz * r2 * f * f - 2.0 * a * d2,
        2.0 * a1 * a + 12.0 * b1 * f * f * a + 2.0 * gm * f * b * b
            - 6.0 * hz * r2 * a * f
            - hz * r3 * b * b
            + 4.0 * (1.0 + m) * a * d2,
        12.0 * b1 * f * a * a + 2.0 * gm * b * b * (a - f * mq) - 3.0 * hz * r2 * a * a
            + mq * hz * r3 * b * b
            - 6.0 * a * m * d2,
        2.0 * b1 * a * a - mq * gm * b * b,
        2.0 * a2 + 2.0 * gm * f * f - 2.0 * hz * r3 * f + c5 * d2,
        4.0 * b2 * b * b + 4.0 * gm * a * f - 2.0 * hz * r3 * a - 6.0 * m * d2,
        2.0 * mq * b2 * b * b - gm * a * a,
    ]
}

pub(super) fn s2(v: &V) -> Vec<f64> {
    s2_s4(v, false)
}

pub(super) fn s4(v: &V) -> Vec<f64> {
    s2_s4(v, true)
}

pub(super) fn s2_predict(h: &[f64], v: &V) -> Vec<f64> {
    scaled(h, &[-1.0, -1.0, -1.0, -2.0 * v.a, -v.b, -v.b, 2.0 * v.b])
}

pub(super) fn s6(v: &V) -> Vec<f64> {
    let V { a, b, d, f, m, a1, a2, b1, b2, gm, hz, r1, r2, r3, .. } = *v;
    let d2 = d * d;
    let bb = b * b;
    vec![
        2.0 * a1 * f + 4.0 * b1 * f.powi(3) + 2.0 * gm * bb * f
            - hz * r1
            - 3.0 * hz * r2 * f * f
            - hz * r3 * bb
            - 2.0 * a * d2,
        2.0 * a1 * a + 12.0 * b1 * f * f * a + 2.0 * gm * bb * (a - (1.0 + m) * f)
            - 6.0 * hz * r2 * a * f
            + (1.0 + m) * hz * r3 * bb
            + 4.0 * (1.0 + m) * a * d2,
        12.0 * b1 * f * a * a + 2.0 * gm * bb * (m * f - (1.0 + m) * a)
            - 3.0 * hz * r2 * a * a
            - m * hz * r3 * bb
            - 6.0 * a * m * d2,
        // The pairing carries m: ψ² contributes m·B²·sn⁴ at the top power.
        2.0 * b1 * a * a + m * gm * bb,
        2.0 * a2 + 4.0 * b2 * bb + 2.0 * gm * f * f - 2.0 * hz * r3 * f + (1.0 + m) * d2,
        -4.0 * (1.0 + m) * b2 * bb + 4.0 * gm * a * f - 2.0 * hz * r3 * a - 6.0 * m * d2,
        2.0 * m * b2 * bb + gm * a * a,
    ]
}

pub(super) fn s6_predict(h: &[f64], v: &V) -> Vec<f64> {
    scaled(h, &[-1.0, -1.0, -1.0, -2.0 * v.a, -v.b, -v.b, -2.0 * v.b])
}

/// The swapped pairs `φ = B·sn·cn` (or `B·sn·dn`), `ψ = F + A·sn²`.
fn s3_s5(v: &V, dn: bool) -> Vec<f64> {
    let V { a, b, d, f, m, a1, a2, b1, b2, gm, hz, r1, r2, r3, .. } = *v;
    let d2 = d * d;
    let bb = b * b;
    let (mq, c1) = if dn { (m, 1.0 + 4.0 * m) } else { (1.0, 4.0 + m) };
    vec![
        hz * (r1 + r3 * f * f),
        hz * (2.0 * r3 * a * f + 3.0 * r2 * bb),
        hz * (r3 * a * a - 3.0 * mq * r2 * bb),
        2.0 * a1 + 2.0 * gm * f * f + c1 * d2,
        4.0 * b1 * bb + 4.0 * gm * a * f - 6.0 * m * d2,
        2.0 * mq * b1 * bb - gm * a * a,
        2.0 * a2 * f + 4.0 * b2 * f.powi(3) - 2.0 * a * d2,
        2.0 * a2 * a + 12.0 * b2 * f * f * a + 2.0 * gm * f * bb + 4.0 * (1.0 + m) * a * d2,
        12.0 * b2 * f * a * a + 2.0 * gm * bb * (a - mq * f) - 6.0 * a * m * d2,
        2.0 * b2 * a * a - mq * gm * bb,
        hz * r3 * f,
        hz * r3 * a,
    ]
}

pub(super) fn s3(v: &V) -> Vec<f64> {
    s3_s5(v, false)
}

pub(super) fn s5(v: &V) -> Vec<f64> {
    s3_s5(v, true)
}

pub(super) fn s3_predict(h: &[f64], v: &V) -> Vec<f64> {
    let (a, b) = (v.a, v.b);
    scaled(
        h,
        &[
            1.0,
            1.0,
            1.0,
            -b,
            -b,
            2.0 * b,
            -1.0,
            -1.0,
            -1.0,
            -2.0 * a,
            2.0 * b,
            2.0 * b,
        ],
    )
}

pub(super) fn scaled(h: &[f64], s: &[f64]) -> Vec<f64> {
    debug_assert_eq!(h.len(), s.len());
    h.iter().zip(s).map(|(x, k)| x * k).collect()
}

pub(super) fn predicates(family: crate::families::FamilyId) -> Vec<Spec> {
    use crate::families::FamilyId::*;
    use Relation::*;
    let sign = match family {
        SymI | SymVI => Spec::new("γ < 0", Lt, |v| (v.gm, 0.0)),
        _ => Spec::new("γ > 0", Gt, |v| (v.gm, 0.0)),
    };
    let product = Spec::new("γ² = 4β₁β₂", Eq, |v| (v.gm * v.gm, 4.0 * v.b1 * v.b2));
    let ratio = match family {
        SymI | SymII => Spec::new("√β₁A² = √β₂B²", Eq, |v| {
            (v.sb1() * v.a * v.a, v.sb2() * v.b * v.b)
        }),
        SymIII => Spec::new("√β₂A² = √β₁B²", Eq, |v| {
            (v.sb2() * v.a * v.a, v.sb1() * v.b * v.b)
        }),
        // For the cn·dn partner the top-power balances are 2β₁A² + mγB² = 0
        // and 2mβ₂B² + γA² = 0, which give the same pair as sn·dn.
        SymIV | SymVI => Spec::new("√β₁A² = m√β₂B²", Eq, |v| {
            (v.sb1() * v.a * v.a, v.m * v.sb2() * v.b * v.b)
        }),
        SymV => Spec::new("√β₂A² = m√β₁B²", Eq, |v| {
            (v.sb2() * v.a * v.a, v.m * v.sb1() * v.b * v.b)
        }),
        _ => unreachable!("not a symmetric-model family"),
    };
    vec![sign, product, ratio]
}
