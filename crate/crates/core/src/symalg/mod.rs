//! Exact symbolic algebra over the Jacobi ring `ℚ[symbols][s, c, d]` modulo
//! `c² = 1 − s²`, `d² = 1 − m·s²`.

pub mod derive;
pub mod expr;
pub mod poly;

pub use derive::{
    derive_constraint_system, derived_system, eval_derived, ConstraintSystemDerived,
    DerivedEquation,
};
pub use expr::{differentiate, extract_coefficients, normalize, Block, EllipticExpr, Expr, Monomial, SechExpr};
pub use poly::{CompiledPoly, MultiPoly};
