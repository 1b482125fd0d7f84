//! The catalog of ansatz families: profile shapes, unknowns, applicability
//! conditions, and closed-form second derivatives.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::elliptic::{jacobi_triple, EllipticParameter, JacobiTriple};
use crate::error::{Error, Result};
use crate::models::ModelId;
use crate::vars::{Assignment, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyId {
    #[serde(rename = "S-I")]
    SymI,
    #[serde(rename = "S-II")]
    SymII,
    #[serde(rename = "S-III")]
    SymIII,
    #[serde(rename = "S-IV")]
    SymIV,
    #[serde(rename = "S-V")]
    SymV,
    #[serde(rename = "S-VI")]
    SymVI,
    #[serde(rename = "A-I")]
    AsymI,
    #[serde(rename = "M1-I")]
    Mix1I,
    #[serde(rename = "M1-II")]
    Mix1II,
    #[serde(rename = "M1-III")]
    Mix1III,
    #[serde(rename = "M1-IV")]
    Mix1IV,
    #[serde(rename = "M1-V")]
    Mix1V,
    #[serde(rename = "M1-VI")]
    Mix1VI,
    #[serde(rename = "M1-VII")]
    Mix1VII,
    #[serde(rename = "M1-VIII")]
    Mix1VIII,
    #[serde(rename = "M1-IX")]
    Mix1IX,
    #[serde(rename = "M1-X")]
    Mix1X,
    #[serde(rename = "M2-I")]
    Mix2I,
    #[serde(rename = "M2-II")]
    Mix2II,
    #[serde(rename = "M2-III")]
    Mix2III,
    #[serde(rename = "M2-IV")]
    Mix2IV,
}

impl FamilyId {
    pub const ALL: [FamilyId; 21] = [
        FamilyId::SymI,
        FamilyId::SymII,
        FamilyId::SymIII,
        FamilyId::SymIV,
        FamilyId::SymV,
        FamilyId::SymVI,
        FamilyId::AsymI,
        FamilyId::Mix1I,
        FamilyId::Mix1II,
        FamilyId::Mix1III,
        FamilyId::Mix1IV,
        FamilyId::Mix1V,
        FamilyId::Mix1VI,
        FamilyId::Mix1VII,
        FamilyId::Mix1VIII,
        FamilyId::Mix1IX,
        FamilyId::Mix1X,
        FamilyId::Mix2I,
        FamilyId::Mix2II,
        FamilyId::Mix2III,
        FamilyId::Mix2IV,
    ];

    pub fn label(self) -> &'static str {
        use FamilyId::*;
        match self {
            SymI => "S-I",
            SymII => "S-II",
            SymIII => "S-III",
            SymIV => "S-IV",
            SymV => "S-V",
            SymVI => "S-VI",
            AsymI => "A-I",
            Mix1I => "M1-I",
            Mix1II => "M1-II",
            Mix1III => "M1-III",
            Mix1IV => "M1-IV",
            Mix1V => "M1-V",
            Mix1VI => "M1-VI",
            Mix1VII => "M1-VII",
            Mix1VIII => "M1-VIII",
            Mix1IX => "M1-IX",
            Mix1X => "M1-X",
            Mix2I => "M2-I",
            Mix2II => "M2-II",
            Mix2III => "M2-III",
            Mix2IV => "M2-IV",
        }
    }

    pub fn model(self) -> ModelId {
        use FamilyId::*;
        match self {
            SymI | SymII | SymIII | SymIV | SymV | SymVI => ModelId::Sym,
            AsymI => ModelId::Asym,
            _ => ModelId::Mix,
        }
    }

    /// Families built from second-order Lamé polynomials.
    pub fn is_order_two(self) -> bool {
        use FamilyId::*;
        matches!(
            self,
            SymI | SymII | SymIII | SymIV | SymV | SymVI | AsymI | Mix2I | Mix2II | Mix2III | Mix2IV
        )
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().to_ascii_uppercase();
        FamilyId::ALL
            .iter()
            .copied()
            .find(|f| f.label() == wanted)
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ShapeKind {
    ConstPlusSn2,
    SnCn,
    SnDn,
    CnDn,
    ConstPlusSn,
    ConstPlusCn,
    ConstPlusDn,
    SechRational,
}

impl ShapeKind {
    fn has_offset(self) -> bool {
        matches!(
            self,
            ShapeKind::ConstPlusSn2
                | ShapeKind::ConstPlusSn
                | ShapeKind::ConstPlusCn
                | ShapeKind::ConstPlusDn
        )
    }

    /// Unit-amplitude shape and its second derivative in `u`.
    fn at(self, t: &JacobiTriple, m: f64, g: f64, h: f64) -> (f64, f64) {
        let JacobiTriple { sn: s, cn: c, dn: d } = *t;
        let s2 = s * s;
        match self {
            ShapeKind::ConstPlusSn2 => (s2, 2.0 - 4.0 * (1.0 + m) * s2 + 6.0 * m * s2 * s2),
            ShapeKind::SnCn => (s * c, s * c * (-(4.0 + m) + 6.0 * m * s2)),
            ShapeKind::SnDn => (s * d, s * d * (-(1.0 + 4.0 * m) + 6.0 * m * s2)),
            ShapeKind::CnDn => (c * d, c * d * (-(1.0 + m) + 6.0 * m * s2)),
            ShapeKind::ConstPlusSn => (s, s * (-(1.0 + m) + 2.0 * m * s2)),
            ShapeKind::ConstPlusCn => (c, c * ((2.0 * m - 1.0) - 2.0 * m * c * c)),
            ShapeKind::ConstPlusDn => (d, d * ((2.0 - m) - 2.0 * d * d)),
            ShapeKind::SechRational => (g, g * (1.0 - 3.0 * h * g + 2.0 * (h * h - 1.0) * g * g)),
        }
    }
}

/// A field profile `offset + amp · shape(D(x + x₀))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeSpec {
    pub kind: ShapeKind,
    pub amp: Var,
    pub offset: Option<Var>,
}

impl ShapeSpec {
    const fn new(kind: ShapeKind, amp: Var, offset: Option<Var>) -> Self {
        ShapeSpec { kind, amp, offset }
    }

    pub fn describe(&self) -> String {
        let body = match self.kind {
            ShapeKind::ConstPlusSn2 => "sn²",
            ShapeKind::SnCn => "sn·cn",
            ShapeKind::SnDn => "sn·dn",
            ShapeKind::CnDn => "cn·dn",
            ShapeKind::ConstPlusSn => "sn",
            ShapeKind::ConstPlusCn => "cn",
            ShapeKind::ConstPlusDn => "dn",
            ShapeKind::SechRational => {
                return format!("{}·sech/(1 + H·sech)", self.amp.pretty());
            }
        };
        match self.offset {
            Some(o) => format!("{} + {}·{}", o.pretty(), self.amp.pretty(), body),
            None => format!("{}·{}", self.amp.pretty(), body),
        }
    }
}

/// Profile coefficients of a family member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "G")]
    pub g: f64,
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    pub x0: f64,
    pub m: EllipticParameter,
}

impl Coefficients {
    pub fn get(&self, v: Var) -> Option<f64> {
        Some(match v {
            Var::A => self.a,
            Var::B => self.b,
            Var::D => self.d,
            Var::F => self.f,
            Var::G => self.g,
            Var::H => self.h.unwrap_or(0.0),
            Var::X0 => self.x0,
            Var::M => self.m.value(),
            _ => return None,
        })
    }

    pub fn write_into(&self, a: &mut Assignment) {
        for v in Var::COEFFICIENTS {
            a.set(v, self.get(v).unwrap_or(0.0));
        }
    }

    /// Reads the coefficient slots of an assignment; `H` is kept only for
    /// families that use it.
    pub fn from_assignment(family: FamilyId, a: &Assignment) -> Result<Self> {
        let uses_h = descriptor(family).unknowns.contains(&Var::H);
        Ok(Coefficients {
            a: a.get(Var::A),
            b: a.get(Var::B),
            d: a.get(Var::D),
            f: a.get(Var::F),
            g: a.get(Var::G),
            h: uses_h.then(|| a.get(Var::H)),
            x0: a.get(Var::X0),
            m: EllipticParameter::new(a.get(Var::M))?,
        })
    }

    fn validate(&self, desc: &FamilyDescriptor) -> Result<()> {
        if !(self.d > 0.0) || !self.d.is_finite() {
            return Err(Error::domain(format!("D must be positive, got {}", self.d)));
        }
        if desc.shape_phi.kind == ShapeKind::SechRational {
            if !self.m.is_hyperbolic() {
                return Err(Error::domain(format!(
                    "{} is defined only at m = 1, got m = {}",
                    desc.id,
                    self.m.value()
                )));
            }
            let h = self.h.unwrap_or(0.0);
            if !(h > -1.0) {
                return Err(Error::domain(format!("H must exceed -1, got {h}")));
            }
        }
        Ok(())
    }
}

/// A machine-checkable existence condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Condition {
    Zero(Var),
    NonZero(Var),
    Equals(Var, f64),
    Greater(Var, f64),
    /// If the first quantity vanishes, the second must too.
    ZeroImpliesZero(Var, Var),
}

/// Absolute tolerance for "is zero" checks on single quantities.
pub const ZERO_TOL: f64 = 1e-9;

impl Condition {
    /// `(holds, slack)`; slack is positive when the condition holds.
    pub fn evaluate(&self, a: &Assignment) -> (bool, f64) {
        match *self {
            Condition::Zero(v) => {
                let slack = ZERO_TOL - a.get(v).abs();
                (slack >= 0.0, slack)
            }
            Condition::NonZero(v) => {
                let slack = a.get(v).abs() - ZERO_TOL;
                (slack > 0.0, slack)
            }
            Condition::Equals(v, x) => {
                let slack = ZERO_TOL * x.abs().max(1.0) - (a.get(v) - x).abs();
                (slack >= 0.0, slack)
            }
            Condition::Greater(v, x) => {
                let slack = a.get(v) - x;
                (slack > 1e-12, slack)
            }
            Condition::ZeroImpliesZero(p, q) => {
                if a.get(p).abs() > ZERO_TOL {
                    (true, a.get(p).abs())
                } else {
                    let slack = ZERO_TOL - a.get(q).abs();
                    (slack >= 0.0, slack)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Applicability {
    pub name: String,
    pub condition: Condition,
}

fn rule(name: &str, condition: Condition) -> Applicability {
    Applicability {
        name: name.to_string(),
        condition,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyDescriptor {
    pub id: FamilyId,
    pub model: ModelId,
    pub shape_phi: ShapeSpec,
    pub shape_psi: ShapeSpec,
    /// Profile coefficients the family determines, in canonical order.
    pub unknowns: Vec<Var>,
    pub equation_count: usize,
    pub applicability: Vec<Applicability>,
    /// Local labels of the residual components, e.g. `S-I.4`.
    pub equation_labels: Vec<String>,
    pub summary: String,
}

fn build(id: FamilyId) -> FamilyDescriptor {
    use FamilyId::*;
    use ShapeKind::*;
    let phi2 = ShapeSpec::new(ConstPlusSn2, Var::A, Some(Var::F));
    let psi2 = ShapeSpec::new(ConstPlusSn2, Var::B, Some(Var::G));
    let psi_sn2 = ShapeSpec::new(ConstPlusSn2, Var::A, Some(Var::F));
    let b = |k| ShapeSpec::new(k, Var::B, None);
    let fa = |k| ShapeSpec::new(k, Var::A, Some(Var::F));
    let gb = |k| ShapeSpec::new(k, Var::B, Some(Var::G));

    let (shape_phi, shape_psi, equation_count, summary) = match id {
        SymI => (phi2, psi2, 8, "pulse lattice in both fields"),
        SymII => (phi2, b(SnCn), 7, "sn² lattice with sn·cn partner"),
        SymIII => (b(SnCn), psi_sn2, 12, "swapped sn·cn / sn² pair, zero field only"),
        SymIV => (phi2, b(SnDn), 7, "sn² lattice with sn·dn partner"),
        SymV => (b(SnDn), psi_sn2, 12, "swapped sn·dn / sn² pair, zero field only"),
        SymVI => (phi2, b(CnDn), 7, "sn² lattice with cn·dn partner"),
        AsymI => (phi2, psi2, 8, "pulse lattice in both fields"),
        Mix1I => (fa(ConstPlusSn), gb(ConstPlusSn), 8, "kink-kink lattice"),
        Mix1II => (fa(ConstPlusCn), gb(ConstPlusCn), 8, "cn pulse lattice"),
        Mix1III => (fa(ConstPlusDn), gb(ConstPlusDn), 8, "dn pulse lattice"),
        Mix1IV => (fa(ConstPlusSn), gb(ConstPlusCn), 12, "kink-pulse lattice (sn, cn)"),
        Mix1V => (fa(ConstPlusSn), gb(ConstPlusDn), 12, "kink-pulse lattice (sn, dn)"),
        Mix1VI => (fa(ConstPlusCn), gb(ConstPlusSn), 12, "pulse-kink lattice (cn, sn)"),
        Mix1VII => (fa(ConstPlusDn), gb(ConstPlusSn), 12, "pulse-kink lattice (dn, sn)"),
        Mix1VIII => (fa(ConstPlusCn), gb(ConstPlusDn), 12, "mixed pulse lattice (cn, dn)"),
        Mix1IX => (fa(ConstPlusDn), gb(ConstPlusCn), 12, "mixed pulse lattice (dn, cn)"),
        Mix1X => (
            ShapeSpec::new(SechRational, Var::A, None),
            ShapeSpec::new(SechRational, Var::B, None),
            6,
            "rational sech pulse pair, m = 1 only",
        ),
        Mix2I => (phi2, psi2, 8, "pulse lattice in both fields"),
        Mix2II => (phi2, b(SnCn), 7, "sn² lattice with sn·cn partner"),
        Mix2III => (phi2, b(SnDn), 7, "sn² lattice with sn·dn partner"),
        Mix2IV => (phi2, b(CnDn), 7, "sn² lattice with cn·dn partner"),
    };

    let applicability = match id {
        SymIII | SymV => vec![rule("H_z = 0", Condition::Zero(Var::Hz))],
        Mix1X => vec![
            rule("m = 1", Condition::Equals(Var::M, 1.0)),
            rule("H > -1", Condition::Greater(Var::H, -1.0)),
        ],
        SymI | AsymI | Mix2I => vec![rule("G ≠ 0", Condition::NonZero(Var::G))],
        Mix2II | Mix1I => vec![rule("F ≠ 0", Condition::NonZero(Var::F))],
        Mix1IV | Mix1V | Mix1VI | Mix1VII | Mix1VIII | Mix1IX => {
            vec![rule("G = 0", Condition::Zero(Var::G))]
        }
        Mix1II | Mix1III => vec![rule(
            "F = 0 ⇒ η = 0",
            Condition::ZeroImpliesZero(Var::F, Var::Eta),
        )],
        _ => Vec::new(),
    };

    let mut unknowns = vec![Var::A, Var::B, Var::D];
    for spec in [shape_phi, shape_psi] {
        if let Some(o) = spec.offset {
            debug_assert!(spec.kind.has_offset());
            unknowns.push(o);
        }
    }
    if shape_phi.kind == SechRational {
        unknowns.push(Var::H);
    }
    unknowns.sort();

    FamilyDescriptor {
        id,
        model: id.model(),
        shape_phi,
        shape_psi,
        unknowns,
        equation_count,
        applicability,
        equation_labels: (1..=equation_count).map(|k| format!("{id}.{k}")).collect(),
        summary: summary.to_string(),
    }
}

pub fn catalog() -> &'static [FamilyDescriptor] {
    static CATALOG: OnceLock<Vec<FamilyDescriptor>> = OnceLock::new();
    CATALOG.get_or_init(|| FamilyId::ALL.iter().map(|&f| build(f)).collect())
}

pub fn descriptor(id: FamilyId) -> &'static FamilyDescriptor {
    &catalog()[FamilyId::ALL.iter().position(|&f| f == id).expect("catalog covers every id")]
}

/// Values and x-second-derivatives `[(φ, φ''), (ψ, ψ'')]` at argument `u = D(x + x₀)`.
pub(crate) fn profile_at_u(family: FamilyId, c: &Coefficients, u: f64) -> Result<[(f64, f64); 2]> {
    let desc = descriptor(family);
    c.validate(desc)?;
    let m = c.m.value();
    let h = c.h.unwrap_or(0.0);
    let (t, g) = if desc.shape_phi.kind == ShapeKind::SechRational {
        (
            JacobiTriple {
                sn: 0.0,
                cn: 0.0,
                dn: 0.0,
            },
            1.0 / (u.cosh() + h),
        )
    } else {
        (jacobi_triple(u, m)?, 0.0)
    };
    let d2 = c.d * c.d;
    let one = |spec: &ShapeSpec| {
        let (v, v2) = spec.kind.at(&t, m, g, h);
        let amp = c.get(spec.amp).unwrap_or(0.0);
        let off = spec.offset.and_then(|o| c.get(o)).unwrap_or(0.0);
        (off + amp * v, amp * d2 * v2)
    };
    Ok([one(&desc.shape_phi), one(&desc.shape_psi)])
}

/// `(φ(x), ψ(x))`.
pub fn evaluate_profile(family: FamilyId, coeffs: &Coefficients, x: f64) -> Result<(f64, f64)> {
    let [(p, _), (q, _)] = profile_at_u(family, coeffs, coeffs.d * (x + coeffs.x0))?;
    Ok((p, q))
}

/// `(φ''(x), ψ''(x))` from the closed-form derivatives of each shape.
pub fn analytic_second_derivative(
    family: FamilyId,
    coeffs: &Coefficients,
    x: f64,
) -> Result<(f64, f64)> {
    let [(_, p), (_, q)] = profile_at_u(family, coeffs, coeffs.d * (x + coeffs.x0))?;
    Ok((p, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::complete_elliptic_k;
    use crate::symalg::{EllipticExpr, MultiPoly, SechExpr};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn coeffs(m: f64) -> Coefficients {
        Coefficients {
            a: 0.8,
            b: -1.3,
            d: 1.1,
            f: 0.4,
            g: -0.25,
            h: None,
            x0: 0.3,
            m: EllipticParameter::new(m).unwrap(),
        }
    }

    fn for_family(f: FamilyId, m: f64) -> Coefficients {
        let mut c = coeffs(m);
        if f == FamilyId::Mix1X {
            c.m = EllipticParameter::new(1.0).unwrap();
            c.h = Some(0.6);
        }
        c
    }

    #[test]
    fn catalog_counts() {
        let count = |m| catalog().iter().filter(|d| d.model == m).count();
        assert_eq!(count(ModelId::Sym), 6);
        assert_eq!(count(ModelId::Asym), 1);
        assert_eq!(count(ModelId::Mix), 14);
        let order1 = catalog()
            .iter()
            .filter(|d| d.model == ModelId::Mix && !d.id.is_order_two())
            .count();
        assert_eq!(order1, 10);
        for d in catalog() {
            assert!(d.unknowns.len() <= d.equation_count, "{}", d.id);
            assert_eq!(d.equation_labels.len(), d.equation_count);
        }
    }

    #[test]
    fn descriptor_examples() {
        assert_eq!(descriptor(FamilyId::SymII).shape_psi.kind, ShapeKind::SnCn);
        let x = descriptor(FamilyId::Mix1X);
        assert!(x.applicability.iter().any(|r| r.condition == Condition::Equals(Var::M, 1.0)));
        assert!(descriptor(FamilyId::SymIII)
            .applicability
            .iter()
            .any(|r| r.name == "H_z = 0"));
        assert_eq!(x.unknowns, vec![Var::A, Var::B, Var::D, Var::H]);
        assert_eq!(
            descriptor(FamilyId::SymI).unknowns,
            vec![Var::A, Var::B, Var::D, Var::F, Var::G]
        );
    }

    #[test]
    fn labels_parse() {
        for f in FamilyId::ALL {
            assert_eq!(f.label().parse::<FamilyId>().unwrap(), f);
            assert_eq!(f.label().to_lowercase().parse::<FamilyId>().unwrap(), f);
            let json = serde_json::to_string(&f).unwrap();
            assert_eq!(json, format!("\"{}\"", f.label()));
        }
        assert!(matches!("S-VII".parse::<FamilyId>(), Err(Error::UnknownFamily(_))));
    }

    #[test]
    fn profile_examples() {
        let c = coeffs(0.5);
        let (p, q) = evaluate_profile(FamilyId::SymI, &c, -c.x0).unwrap();
        assert_eq!((p, q), (c.f, c.g));
        let mut h = coeffs(1.0);
        h.f = 0.0;
        for &x in &[-2.0, 0.1, 1.7] {
            let (p, _) = evaluate_profile(FamilyId::SymI, &h, x).unwrap();
            let t = (h.d * (x + h.x0)).tanh();
            assert!((p - h.a * t * t).abs() < 1e-15);
        }
        let x = for_family(FamilyId::Mix1X, 1.0);
        let (p, q) = evaluate_profile(FamilyId::Mix1X, &x, -x.x0).unwrap();
        assert!((p - x.a / 1.6).abs() < 1e-15 && (q - x.b / 1.6).abs() < 1e-15);
        let (p2, _) = analytic_second_derivative(FamilyId::SymI, &c, -c.x0).unwrap();
        assert!((p2 - 2.0 * c.a * c.d * c.d).abs() < 1e-14);
    }

    #[test]
    fn sech_family_needs_m_one() {
        let mut c = for_family(FamilyId::Mix1X, 1.0);
        c.m = EllipticParameter::new(0.9).unwrap();
        assert!(matches!(evaluate_profile(FamilyId::Mix1X, &c, 0.0), Err(Error::Domain(_))));
        let mut c = for_family(FamilyId::Mix1X, 1.0);
        c.h = Some(-1.0);
        assert!(evaluate_profile(FamilyId::Mix1X, &c, 0.0).is_err());
    }

    #[test]
    fn second_derivative_matches_stencil() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for f in FamilyId::ALL {
            for &m in &[0.0, 0.3, 0.8, 1.0] {
                let c = for_family(f, m);
                let h = 1e-3;
                for _ in 0..64 {
                    let x: f64 = rng.random_range(-4.0..4.0);
                    let v = |x| evaluate_profile(f, &c, x).unwrap();
                    let fd = |k: usize| {
                        let g = |x| if k == 0 { v(x).0 } else { v(x).1 };
                        (-g(x + 2.0 * h) + 16.0 * g(x + h) - 30.0 * g(x) + 16.0 * g(x - h)
                            - g(x - 2.0 * h))
                            / (12.0 * h * h)
                    };
                    let (p2, q2) = analytic_second_derivative(f, &c, x).unwrap();
                    for (exact, approx) in [(p2, fd(0)), (q2, fd(1))] {
                        assert!(
                            (exact - approx).abs() <= 1e-6 * exact.abs().max(1.0),
                            "{f} m={m} x={x}: {exact} vs {approx}"
                        );
                    }
                }
            }
        }
    }

    /// The hard-coded shape derivatives agree with the symbolic ring.
    #[test]
    fn closed_forms_match_symbolic_differentiation() {
        use ShapeKind::*;
        let s = EllipticExpr::s();
        let c = EllipticExpr::c();
        let d = EllipticExpr::d();
        let cases = [
            (ConstPlusSn2, &s * &s),
            (SnCn, &s * &c),
            (SnDn, &s * &d),
            (CnDn, &c * &d),
            (ConstPlusSn, s.clone()),
            (ConstPlusCn, c.clone()),
            (ConstPlusDn, d.clone()),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for (kind, expr) in cases {
            let second = expr.differentiate(Var::D).differentiate(Var::D);
            for _ in 0..20 {
                let m: f64 = rng.random_range(0.0..1.0);
                let u: f64 = rng.random_range(-3.0..3.0);
                let t = jacobi_triple(u, m).unwrap();
                let a = Assignment::new().with(Var::M, m).with(Var::D, 1.0);
                let (v, v2) = kind.at(&t, m, 0.0, 0.0);
                assert!((expr.eval(&a, &t) - v).abs() < 1e-14);
                assert!((second.eval(&a, &t) - v2).abs() < 1e-13, "{kind:?}");
            }
        }
        let g = SechExpr::linear(Var::A).second_derivative(Var::D);
        let coeff = g.extract_coefficients();
        assert_eq!(coeff.len(), 3);
        let h = 0.4;
        let a = Assignment::new().with(Var::A, 1.0).with(Var::D, 1.0).with(Var::H, h);
        let gv = 1.0 / (0.7f64.cosh() + h);
        let expect = ShapeKind::SechRational.at(&jacobi_triple(0.0, 1.0).unwrap(), 1.0, gv, h).1;
        let got: f64 = coeff
            .iter()
            .map(|(k, p)| p.eval(&a) * gv.powi(k.power as i32))
            .sum();
        assert!((expect - got).abs() < 1e-14);
        let _ = MultiPoly::zero();
    }

    #[test]
    fn translation_invariance_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for f in FamilyId::ALL {
            let base = for_family(f, 0.6);
            for _ in 0..20 {
                let a: f64 = rng.random_range(-3.0..3.0);
                let x: f64 = rng.random_range(-3.0..3.0);
                let shifted = Coefficients { x0: a, ..base };
                let origin = Coefficients { x0: 0.0, ..base };
                assert_eq!(
                    evaluate_profile(f, &shifted, x).unwrap(),
                    evaluate_profile(f, &origin, x + a).unwrap()
                );
            }
        }
    }

    #[test]
    fn periodicity() {
        for f in FamilyId::ALL.into_iter().filter(|&f| f != FamilyId::Mix1X) {
            for &m in &[0.1, 0.5, 0.9] {
                let c = for_family(f, m);
                let period = 4.0 * complete_elliptic_k(m).unwrap() / c.d;
                for i in 0..30 {
                    let x = -3.0 + 0.2 * i as f64;
                    let (p, q) = evaluate_profile(f, &c, x).unwrap();
                    let (p2, q2) = evaluate_profile(f, &c, x + period).unwrap();
                    assert!((p - p2).abs() < 1e-9 && (q - q2).abs() < 1e-9, "{f} m={m}");
                }
            }
        }
    }

    #[test]
    fn hyperbolic_continuity() {
        for f in FamilyId::ALL.into_iter().filter(|&f| f != FamilyId::Mix1X) {
            let near = for_family(f, 1.0 - 1e-6);
            let at = for_family(f, 1.0);
            let mut sup = 0.0f64;
            for i in 0..=200 {
                let x = (-5.0 + 0.05 * i as f64) / at.d;
                let (p, q) = evaluate_profile(f, &near, x).unwrap();
                let (p1, q1) = evaluate_profile(f, &at, x).unwrap();
                sup = sup.max((p - p1).abs()).max((q - q1).abs());
            }
            assert!(sup < 1e-3, "{f}: {sup}");
        }
    }

    #[test]
    fn applicability_conditions() {
        let a = Assignment::new().with(Var::F, 0.0).with(Var::Eta, 0.5);
        assert!(!Condition::ZeroImpliesZero(Var::F, Var::Eta).evaluate(&a).0);
        let a = a.with(Var::F, 0.2);
        assert!(Condition::ZeroImpliesZero(Var::F, Var::Eta).evaluate(&a).0);
        assert!(Condition::Greater(Var::H, -1.0).evaluate(&a).0);
        assert!(!Condition::NonZero(Var::G).evaluate(&a).0);
    }
}
