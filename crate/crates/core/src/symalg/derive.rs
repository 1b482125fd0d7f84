//! Mechanical derivation of a family's constraint system: substitute the
//! ansatz into `φ'' − ∂V/∂φ` and `ψ'' − ∂V/∂ψ`, reduce, and read off one
//! equation per surviving basis monomial.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;

use super::expr::{EllipticExpr, Monomial, SechExpr};
use super::poly::{CompiledPoly, MultiPoly};
use crate::error::{Error, Result};
use crate::families::{descriptor, FamilyId, ShapeKind, ShapeSpec};
use crate::models::{rhs_terms, Field, ModelId, Term};
use crate::vars::{Assignment, Var};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivedEquation {
    pub field: Field,
    pub monomial: Monomial,
    pub tag: String,
    #[serde(serialize_with = "display_string")]
    pub poly: MultiPoly,
}

fn display_string<S: serde::Serializer>(p: &MultiPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintSystemDerived {
    pub family: FamilyId,
    pub model: ModelId,
    pub equations: Vec<DerivedEquation>,
}

impl ConstraintSystemDerived {
    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn basis_tags(&self) -> Vec<String> {
        self.equations.iter().map(|e| e.tag.clone()).collect()
    }

    pub fn polys(&self) -> impl Iterator<Item = &MultiPoly> {
        self.equations.iter().map(|e| &e.poly)
    }

    /// Symbols referenced by any equation.
    pub fn symbols(&self) -> Vec<Var> {
        let mut out: Vec<Var> = self.polys().flat_map(|p| p.symbols()).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn eval(&self, a: &Assignment) -> Vec<f64> {
        self.polys().map(|p| p.eval(a)).collect()
    }
}

impl fmt::Display for ConstraintSystemDerived {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} ({}): {} equations", self.family, self.model, self.len())?;
        for (k, e) in self.equations.iter().enumerate() {
            writeln!(f, "  [{:>2}] {} {:<8} {} = 0", k + 1, e.field, e.tag, e.poly)?;
        }
        Ok(())
    }
}

fn shape_expr(spec: &ShapeSpec) -> EllipticExpr {
    let s = EllipticExpr::s();
    let c = EllipticExpr::c();
    let d = EllipticExpr::d();
    let body = match spec.kind {
        ShapeKind::ConstPlusSn2 => &s * &s,
        ShapeKind::SnCn => &s * &c,
        ShapeKind::SnDn => &s * &d,
        ShapeKind::CnDn => &c * &d,
        ShapeKind::ConstPlusSn => s,
        ShapeKind::ConstPlusCn => c,
        ShapeKind::ConstPlusDn => d,
        ShapeKind::SechRational => unreachable!("sech shapes use the g ring"),
    };
    let amp = body.scale(&MultiPoly::var(spec.amp));
    match spec.offset {
        Some(o) => &amp + &EllipticExpr::symbol(o),
        None => amp,
    }
}

/// The ring operations the derivation needs, shared by both profile rings.
trait Ring: Sized + Clone {
    fn one() -> Self;
    fn zero() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, p: &MultiPoly) -> Self;
    fn coefficients(&self) -> BTreeMap<Monomial, MultiPoly>;
}

impl Ring for EllipticExpr {
    fn one() -> Self {
        EllipticExpr::one()
    }
    fn zero() -> Self {
        EllipticExpr::zero()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, p: &MultiPoly) -> Self {
        EllipticExpr::scale(self, p)
    }
    fn coefficients(&self) -> BTreeMap<Monomial, MultiPoly> {
        self.extract_coefficients()
    }
}

impl Ring for SechExpr {
    fn one() -> Self {
        SechExpr::one()
    }
    fn zero() -> Self {
        SechExpr::default()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, p: &MultiPoly) -> Self {
        SechExpr::scale(self, p)
    }
    fn coefficients(&self) -> BTreeMap<Monomial, MultiPoly> {
        self.extract_coefficients()
    }
}

fn power<R: Ring>(x: &R, n: u32) -> R {
    (0..n).fold(R::one(), |acc, _| acc.mul(x))
}

fn apply_terms<R: Ring>(terms: &[Term], phi: &R, psi: &R) -> R {
    terms.iter().fold(R::zero(), |acc, t| {
        let coef = MultiPoly::product(t.coef, t.params);
        acc.add(&power(phi, t.phi).mul(&power(psi, t.psi)).scale(&coef))
    })
}

fn collect<R: Ring>(model: ModelId, phi: &R, psi: &R, phi2: &R, psi2: &R) -> Vec<DerivedEquation> {
    let mut out = Vec::new();
    for (field, second) in [(Field::Phi, phi2), (Field::Psi, psi2)] {
        let residual = second.sub(&apply_terms(rhs_terms(model, field), phi, psi));
        for (monomial, poly) in residual.coefficients() {
            out.push(DerivedEquation {
                field,
                monomial,
                tag: monomial.to_string(),
                poly,
            });
        }
    }
    out
}

/// Reduces the field equations for `family` to its polynomial constraint
/// system. Ordering: φ before ψ; within a field pure, c, d, c·d blocks,
/// each by ascending power of s.
pub fn derive_constraint_system(model: ModelId, family: FamilyId) -> Result<ConstraintSystemDerived> {
    let desc = descriptor(family);
    if desc.model != model {
        return Err(Error::ParamModelMismatch {
            expected: desc.model,
            found: model,
        });
    }
    let equations = if desc.shape_phi.kind == ShapeKind::SechRational {
        let phi = SechExpr::linear(desc.shape_phi.amp);
        let psi = SechExpr::linear(desc.shape_psi.amp);
        let phi2 = phi.second_derivative(Var::D);
        let psi2 = psi.second_derivative(Var::D);
        collect(model, &phi, &psi, &phi2, &psi2)
    } else {
        let phi = shape_expr(&desc.shape_phi);
        let psi = shape_expr(&desc.shape_psi);
        let phi2 = phi.differentiate(Var::D).differentiate(Var::D);
        let psi2 = psi.differentiate(Var::D).differentiate(Var::D);
        collect(model, &phi, &psi, &phi2, &psi2)
    };
    Ok(ConstraintSystemDerived {
        family,
        model,
        equations,
    })
}

struct Cached {
    system: ConstraintSystemDerived,
    compiled: Vec<CompiledPoly>,
}

fn cache() -> &'static [Cached] {
    static CACHE: OnceLock<Vec<Cached>> = OnceLock::new();
    CACHE.get_or_init(|| {
        FamilyId::ALL
            .iter()
            .map(|&f| {
                let system = derive_constraint_system(f.model(), f).expect("catalog families derive");
                let compiled = system.polys().map(|p| p.compile()).collect();
                Cached { system, compiled }
            })
            .collect()
    })
}

fn cached(family: FamilyId) -> &'static Cached {
    &cache()[FamilyId::ALL.iter().position(|&f| f == family).expect("known family")]
}

/// The derived system of a catalog family, computed once per process.
pub fn derived_system(family: FamilyId) -> &'static ConstraintSystemDerived {
    &cached(family).system
}

/// Floating-point evaluation of the derived system.
pub fn eval_derived(family: FamilyId, a: &Assignment) -> Vec<f64> {
    cached(family).compiled.iter().map(|p| p.eval(a)).collect()
}
