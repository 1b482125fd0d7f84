//! The three coupled φ⁴ potentials and their static field equations.
//!
//! Each right-hand side is stored as a term table written out exactly as the
//! equations of motion read. The same table feeds numeric evaluation here and
//! symbolic reduction in [`crate::symalg`], so the two can never drift apart.
//! The potentials have their own tables; the gradient tests tie the two
//! together.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vars::{Assignment, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelId {
    #[serde(rename = "SYM")]
    Sym,
    #[serde(rename = "ASYM")]
    Asym,
    #[serde(rename = "MIX")]
    Mix,
}

impl ModelId {
    pub const ALL: [ModelId; 3] = [ModelId::Sym, ModelId::Asym, ModelId::Mix];

    pub fn label(self) -> &'static str {
        match self {
            ModelId::Sym => "SYM",
            ModelId::Asym => "ASYM",
            ModelId::Mix => "MIX",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ModelId::Sym => "symmetric coupled phi^4 in an external field",
            ModelId::Asym => "asymmetric coupled phi^4",
            ModelId::Mix => "asymmetric-symmetric coupled phi^4",
        }
    }

    /// Material constants of this model, in declaration order.
    pub fn parameters(self) -> &'static [Var] {
        use Var::*;
        match self {
            ModelId::Sym => &[Alpha1, Alpha2, Beta1, Beta2, Gamma, Hz, Rho1, Rho2, Rho3],
            ModelId::Asym => &[Alpha1, Alpha2, Delta1, Delta2, Beta1, Beta2, Gamma, Eta],
            ModelId::Mix => &[Alpha1, Alpha2, Delta1, Beta1, Beta2, Gamma, Eta],
        }
    }

    /// Constants that couple φ to ψ; zeroing them decouples the fields.
    pub fn couplings(self) -> &'static [Var] {
        match self {
            ModelId::Sym => &[Var::Gamma, Var::Rho3],
            ModelId::Asym | ModelId::Mix => &[Var::Gamma, Var::Eta],
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "SYM" => Ok(ModelId::Sym),
            "ASYM" => Ok(ModelId::Asym),
            "MIX" => Ok(ModelId::Mix),
            _ => Err(Error::invalid(format!("unknown model `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    Phi,
    Psi,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::Phi => "φ",
            Field::Psi => "ψ",
        })
    }
}

/// `coef · Π params · φ^phi · ψ^psi`
#[derive(Debug, Clone, Copy)]
pub struct Term {
    pub coef: i64,
    pub params: &'static [Var],
    pub phi: u32,
    pub psi: u32,
}

const fn t(coef: i64, params: &'static [Var], phi: u32, psi: u32) -> Term {
    Term {
        coef,
        params,
        phi,
        psi,
    }
}

use Var::{Alpha1 as A1, Alpha2 as A2, Beta1 as B1, Beta2 as B2, Delta1 as D1, Delta2 as D2, Eta, Gamma as GM, Hz, Rho1 as R1, Rho2 as R2, Rho3 as R3};

const SYM_V: &[Term] = &[
    t(1, &[A1], 2, 0),
    t(1, &[B1], 4, 0),
    t(1, &[A2], 0, 2),
    t(1, &[B2], 0, 4),
    t(1, &[GM], 2, 2),
    t(-1, &[Hz, R1], 1, 0),
    t(-1, &[Hz, R2], 3, 0),
    t(-1, &[Hz, R3], 1, 2),
];

const SYM_PHI: &[Term] = &[
    t(2, &[A1], 1, 0),
    t(4, &[B1], 3, 0),
    t(2, &[GM], 1, 2),
    t(-1, &[Hz, R1], 0, 0),
    t(-3, &[Hz, R2], 2, 0),
    t(-1, &[Hz, R3], 0, 2),
];

const SYM_PSI: &[Term] = &[
    t(2, &[A2], 0, 1),
    t(4, &[B2], 0, 3),
    t(2, &[GM], 2, 1),
    t(-2, &[Hz, R3], 1, 1),
];

const ASYM_V: &[Term] = &[
    t(1, &[A1], 2, 0),
    t(1, &[D1], 3, 0),
    t(1, &[B1], 4, 0),
    t(1, &[A2], 0, 2),
    t(1, &[D2], 0, 3),
    t(1, &[B2], 0, 4),
    t(1, &[GM], 2, 2),
    t(1, &[Eta], 1, 2),
];

const ASYM_PHI: &[Term] = &[
    t(2, &[A1], 1, 0),
    t(3, &[D1], 2, 0),
    t(4, &[B1], 3, 0),
    t(2, &[GM], 1, 2),
    t(1, &[Eta], 0, 2),
];

const ASYM_PSI: &[Term] = &[
    t(2, &[A2], 0, 1),
    t(3, &[D2], 0, 2),
    t(4, &[B2], 0, 3),
    t(2, &[GM], 2, 1),
    t(2, &[Eta], 1, 1),
];

const MIX_V: &[Term] = &[
    t(1, &[A1], 2, 0),
    t(-1, &[D1], 3, 0),
    t(1, &[B1], 4, 0),
    t(1, &[Eta], 1, 2),
    t(1, &[GM], 2, 2),
    t(1, &[A2], 0, 2),
    t(1, &[B2], 0, 4),
];

const MIX_PHI: &[Term] = &[
    t(2, &[A1], 1, 0),
    t(-3, &[D1], 2, 0),
    t(4, &[B1], 3, 0),
    t(1, &[Eta], 0, 2),
    t(2, &[GM], 1, 2),
];

const MIX_PSI: &[Term] = &[
    t(2, &[A2], 0, 1),
    t(4, &[B2], 0, 3),
    t(2, &[Eta], 1, 1),
    t(2, &[GM], 2, 1),
];

pub fn potential_terms(model: ModelId) -> &'static [Term] {
    match model {
        ModelId::Sym => SYM_V,
        ModelId::Asym => ASYM_V,
        ModelId::Mix => MIX_V,
    }
}

/// Right-hand side of `φ'' = …` or `ψ'' = …`.
pub fn rhs_terms(model: ModelId, field: Field) -> &'static [Term] {
    match (model, field) {
        (ModelId::Sym, Field::Phi) => SYM_PHI,
        (ModelId::Sym, Field::Psi) => SYM_PSI,
        (ModelId::Asym, Field::Phi) => ASYM_PHI,
        (ModelId::Asym, Field::Psi) => ASYM_PSI,
        (ModelId::Mix, Field::Phi) => MIX_PHI,
        (ModelId::Mix, Field::Psi) => MIX_PSI,
    }
}

pub(crate) fn eval_terms(terms: &[Term], a: &Assignment, phi: f64, psi: f64) -> f64 {
    terms
        .iter()
        .map(|term| {
            let p: f64 = term.params.iter().map(|&v| a.get(v)).product();
            term.coef as f64 * p * phi.powi(term.phi as i32) * psi.powi(term.psi as i32)
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SymParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub gamma: f64,
    #[serde(rename = "Hz")]
    pub hz: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub rho3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AsymParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub gamma: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MixParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub delta1: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub gamma: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model")]
pub enum ModelParams {
    #[serde(rename = "SYM")]
    Sym(SymParams),
    #[serde(rename = "ASYM")]
    Asym(AsymParams),
    #[serde(rename = "MIX")]
    Mix(MixParams),
}

impl ModelParams {
    pub fn zeros(model: ModelId) -> Self {
        match model {
            ModelId::Sym => ModelParams::Sym(SymParams::default()),
            ModelId::Asym => ModelParams::Asym(AsymParams::default()),
            ModelId::Mix => ModelParams::Mix(MixParams::default()),
        }
    }

    pub fn model(&self) -> ModelId {
        match self {
            ModelParams::Sym(_) => ModelId::Sym,
            ModelParams::Asym(_) => ModelId::Asym,
            ModelParams::Mix(_) => ModelId::Mix,
        }
    }

    fn slot_mut(&mut self, v: Var) -> Option<&mut f64> {
        match self {
            ModelParams::Sym(p) => match v {
                Var::Alpha1 => Some(&mut p.alpha1),
                Var::Alpha2 => Some(&mut p.alpha2),
                Var::Beta1 => Some(&mut p.beta1),
                Var::Beta2 => Some(&mut p.beta2),
                Var::Gamma => Some(&mut p.gamma),
                Var::Hz => Some(&mut p.hz),
                Var::Rho1 => Some(&mut p.rho1),
                Var::Rho2 => Some(&mut p.rho2),
                Var::Rho3 => Some(&mut p.rho3),
                _ => None,
            },
            ModelParams::Asym(p) => match v {
                Var::Alpha1 => Some(&mut p.alpha1),
                Var::Alpha2 => Some(&mut p.alpha2),
                Var::Delta1 => Some(&mut p.delta1),
                Var::Delta2 => Some(&mut p.delta2),
                Var::Beta1 => Some(&mut p.beta1),
                Var::Beta2 => Some(&mut p.beta2),
                Var::Gamma => Some(&mut p.gamma),
                Var::Eta => Some(&mut p.eta),
                _ => None,
            },
            ModelParams::Mix(p) => match v {
                Var::Alpha1 => Some(&mut p.alpha1),
                Var::Alpha2 => Some(&mut p.alpha2),
                Var::Delta1 => Some(&mut p.delta1),
                Var::Beta1 => Some(&mut p.beta1),
                Var::Beta2 => Some(&mut p.beta2),
                Var::Gamma => Some(&mut p.gamma),
                Var::Eta => Some(&mut p.eta),
                _ => None,
            },
        }
    }

    pub fn get(&self, v: Var) -> Option<f64> {
        let mut copy = *self;
        copy.slot_mut(v).map(|x| *x)
    }

    pub fn set(&mut self, v: Var, value: f64) -> Result<()> {
        let model = self.model();
        match self.slot_mut(v) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(Error::invalid(format!("{model} has no parameter {v}"))),
        }
    }

    pub fn with(mut self, v: Var, value: f64) -> Result<Self> {
        self.set(v, value)?;
        Ok(self)
    }

    /// Parameters present in the model, others left at zero.
    pub fn write_into(&self, a: &mut Assignment) {
        for &v in self.model().parameters() {
            a.set(v, self.get(v).unwrap_or(0.0));
        }
    }

    pub fn from_assignment(model: ModelId, a: &Assignment) -> Self {
        let mut p = Self::zeros(model);
        for &v in model.parameters() {
            let _ = p.set(v, a.get(v));
        }
        p
    }

    pub fn to_assignment(&self) -> Assignment {
        let mut a = Assignment::new();
        self.write_into(&mut a);
        a
    }

    fn expect(&self, model: ModelId) -> Result<()> {
        if self.model() == model {
            Ok(())
        } else {
            Err(Error::ParamModelMismatch {
                expected: model,
                found: self.model(),
            })
        }
    }
}

pub fn potential_value(model: ModelId, params: &ModelParams, phi: f64, psi: f64) -> Result<f64> {
    params.expect(model)?;
    Ok(eval_terms(
        potential_terms(model),
        &params.to_assignment(),
        phi,
        psi,
    ))
}

/// `(∂V/∂φ, ∂V/∂ψ)` from the equations of motion.
pub fn field_rhs(model: ModelId, params: &ModelParams, phi: f64, psi: f64) -> Result<(f64, f64)> {
    params.expect(model)?;
    let a = params.to_assignment();
    Ok(rhs_at(model, &a, phi, psi))
}

pub(crate) fn rhs_at(model: ModelId, a: &Assignment, phi: f64, psi: f64) -> (f64, f64) {
    (
        eval_terms(rhs_terms(model, Field::Phi), a, phi, psi),
        eval_terms(rhs_terms(model, Field::Psi), a, phi, psi),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseRegime {
    SingleMinimum,
    #[serde(rename = "ZeroGlobal_LocalAtPhiC")]
    ZeroGlobalLocalAtPhiC,
    Degenerate,
    PhiCGlobal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePortrait {
    pub regime: PhaseRegime,
    pub phi_c: Option<f64>,
}

/// Relative tolerance of the δ₁² = 4α₁β₁ degeneracy test.
pub const DEGENERACY_RTOL: f64 = 1e-12;

/// Minimum structure of the uncoupled φ potential `α₁φ² − δ₁φ³ + β₁φ⁴`.
pub fn classify_uncoupled_phi_phase(params: &MixParams) -> Result<PhasePortrait> {
    let (a1, d1, b1) = (params.alpha1, params.delta1, params.beta1);
    if !(a1 > 0.0) || !(b1 > 0.0) {
        return Err(Error::domain(format!(
            "classification needs alpha1 > 0 and beta1 > 0, got {a1}, {b1}"
        )));
    }
    let d2 = d1 * d1;
    let spinodal = 32.0 / 9.0 * a1 * b1;
    let coexist = 4.0 * a1 * b1;
    let regime = if (d2 - coexist).abs() <= DEGENERACY_RTOL * coexist {
        PhaseRegime::Degenerate
    } else if d2 <= spinodal {
        PhaseRegime::SingleMinimum
    } else if d2 < coexist {
        PhaseRegime::ZeroGlobalLocalAtPhiC
    } else {
        PhaseRegime::PhiCGlobal
    };
    // Larger root of V'(φ)/φ = 4β₁φ² − 3δ₁φ + 2α₁.
    let disc = 9.0 * d2 - 32.0 * a1 * b1;
    let phi_c = if disc >= 0.0 {
        let r = (3.0 * d1 + disc.sqrt()) / (8.0 * b1);
        (r > 0.0).then_some(r)
    } else {
        None
    };
    Ok(PhasePortrait { regime, phi_c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_params(model: ModelId, rng: &mut ChaCha8Rng) -> ModelParams {
        let mut p = ModelParams::zeros(model);
        for &v in model.parameters() {
            p.set(v, rng.random_range(-2.0..2.0)).unwrap();
        }
        p
    }

    #[test]
    fn origin_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for model in ModelId::ALL {
            let p = random_params(model, &mut rng);
            assert_eq!(potential_value(model, &p, 0.0, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn sym_parity_without_field() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut p = random_params(ModelId::Sym, &mut rng);
        p.set(Var::Hz, 0.0).unwrap();
        for _ in 0..50 {
            let (x, y) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let v = potential_value(ModelId::Sym, &p, x, y).unwrap();
            assert_eq!(v, potential_value(ModelId::Sym, &p, -x, y).unwrap());
            assert_eq!(v, potential_value(ModelId::Sym, &p, x, -y).unwrap());
        }
    }

    #[test]
    fn mix_potential_example() {
        let p = ModelParams::Mix(MixParams {
            alpha1: 1.0,
            delta1: 2.0,
            beta1: 1.0,
            ..Default::default()
        });
        assert_eq!(potential_value(ModelId::Mix, &p, 1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn sym_rhs_at_origin() {
        let p = ModelParams::Sym(SymParams {
            hz: 0.7,
            rho1: 1.3,
            rho2: 5.0,
            rho3: -2.0,
            ..Default::default()
        });
        let (f, g) = field_rhs(ModelId::Sym, &p, 0.0, 0.0).unwrap();
        assert_eq!(f, -0.7 * 1.3);
        assert_eq!(g, 0.0);
    }

    #[test]
    fn asym_psi_has_eta_phi_psi() {
        let p = ModelParams::Asym(AsymParams {
            eta: 1.5,
            ..Default::default()
        });
        let (_, g) = field_rhs(ModelId::Asym, &p, 2.0, 3.0).unwrap();
        assert_eq!(g, 2.0 * 1.5 * 2.0 * 3.0);
    }

    #[test]
    fn rhs_is_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for model in ModelId::ALL {
            for _ in 0..100 {
                let p = random_params(model, &mut rng);
                let (x, y) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
                let h = 1e-5;
                let v = |a: f64, b: f64| potential_value(model, &p, a, b).unwrap();
                let fx = (v(x + h, y) - v(x - h, y)) / (2.0 * h);
                let fy = (v(x, y + h) - v(x, y - h)) / (2.0 * h);
                let (gx, gy) = field_rhs(model, &p, x, y).unwrap();
                let scale = |g: f64| g.abs().max(1.0);
                assert!((fx - gx).abs() < 1e-7 * scale(gx), "{model} {fx} {gx}");
                assert!((fy - gy).abs() < 1e-7 * scale(gy), "{model} {fy} {gy}");
            }
        }
    }

    #[test]
    fn psi_rhs_odd_when_decoupled_linear_terms_vanish() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for model in ModelId::ALL {
            let mut p = random_params(model, &mut rng);
            match model {
                ModelId::Sym => p.set(Var::Hz, 0.0).unwrap(),
                ModelId::Asym => {
                    p.set(Var::Eta, 0.0).unwrap();
                    p.set(Var::Delta2, 0.0).unwrap();
                }
                ModelId::Mix => p.set(Var::Eta, 0.0).unwrap(),
            }
            for _ in 0..20 {
                let (x, y) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
                let (_, a) = field_rhs(model, &p, x, y).unwrap();
                let (_, b) = field_rhs(model, &p, x, -y).unwrap();
                assert!((a + b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mismatch_is_reported() {
        let p = ModelParams::zeros(ModelId::Sym);
        assert!(matches!(
            field_rhs(ModelId::Mix, &p, 0.0, 0.0),
            Err(Error::ParamModelMismatch { .. })
        ));
        assert!(p.clone().with(Var::Eta, 1.0).is_err());
    }

    #[test]
    fn phase_examples() {
        let mk = |d1| MixParams {
            alpha1: 1.0,
            beta1: 1.0,
            delta1: d1,
            ..Default::default()
        };
        let deg = classify_uncoupled_phi_phase(&mk(2.0)).unwrap();
        assert_eq!(deg.regime, PhaseRegime::Degenerate);
        assert!((deg.phi_c.unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(
            classify_uncoupled_phi_phase(&mk(1.0)).unwrap(),
            PhasePortrait {
                regime: PhaseRegime::SingleMinimum,
                phi_c: None
            }
        );
        let mid = classify_uncoupled_phi_phase(&mk(1.9)).unwrap();
        assert_eq!(mid.regime, PhaseRegime::ZeroGlobalLocalAtPhiC);
        let v = |x: f64| x * x - 1.9 * x.powi(3) + x.powi(4);
        assert!(v(mid.phi_c.unwrap()) > 0.0);
        let low = classify_uncoupled_phi_phase(&mk(2.5)).unwrap();
        assert_eq!(low.regime, PhaseRegime::PhiCGlobal);
        let v = |x: f64| x * x - 2.5 * x.powi(3) + x.powi(4);
        assert!(v(low.phi_c.unwrap()) < 0.0);
        assert!(classify_uncoupled_phi_phase(&MixParams::default()).is_err());
    }

    #[test]
    fn degenerate_minima_are_level() {
        for &(a1, b1) in &[(1.0, 1.0), (0.3, 2.0), (5.0, 0.1)] {
            let d1 = (4.0f64 * a1 * b1).sqrt();
            let p = MixParams {
                alpha1: a1,
                beta1: b1,
                delta1: d1,
                ..Default::default()
            };
            let portrait = classify_uncoupled_phi_phase(&p).unwrap();
            assert_eq!(portrait.regime, PhaseRegime::Degenerate);
            let x = portrait.phi_c.unwrap();
            let v = potential_value(ModelId::Mix, &ModelParams::Mix(p), x, 0.0).unwrap();
            assert!(v.abs() < 1e-10);
        }
    }

    #[test]
    fn params_serde_round_trip() {
        let p = ModelParams::Sym(SymParams {
            alpha1: -1.0,
            hz: 0.25,
            ..Default::default()
        });
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"model\":\"SYM\""));
        assert_eq!(serde_json::from_str::<ModelParams>(&s).unwrap(), p);
    }
}
