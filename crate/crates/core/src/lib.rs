//! Lamé-polynomial solutions of coupled φ⁴ models.
//!
//! The crate catalogs the periodic solution families of three coupled
//! two-field φ⁴ potentials, solves their algebraic constraint systems,
//! re-derives those systems symbolically, and checks every candidate
//! against the field equations by collocation.

pub mod atlas;
pub mod constraints;
pub mod elliptic;
pub mod error;
pub mod families;
pub mod models;
pub mod solver;
pub mod symalg;
pub mod vars;
pub mod verify;

pub use error::{Error, Result};
pub use families::{Coefficients, FamilyId};
pub use models::{ModelId, ModelParams};
pub use vars::{Assignment, Var};
