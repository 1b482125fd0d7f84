//! Named quantities shared by the symbolic layer, the solver and the CLI.
//!
//! Every model parameter and profile coefficient has a [`Var`]. Numeric
//! assignments over all of them are carried in an [`Assignment`], which is
//! what the solver perturbs and what the crosscheck samples.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    A,
    B,
    D,
    F,
    G,
    H,
    X0,
    M,
    Alpha1,
    Alpha2,
    Beta1,
    Beta2,
    Gamma,
    Delta1,
    Delta2,
    Eta,
    Hz,
    Rho1,
    Rho2,
    Rho3,
}

impl Var {
    pub const COUNT: usize = 20;

    pub const ALL: [Var; Var::COUNT] = [
        Var::A,
        Var::B,
        Var::D,
        Var::F,
        Var::G,
        Var::H,
        Var::X0,
        Var::M,
        Var::Alpha1,
        Var::Alpha2,
        Var::Beta1,
        Var::Beta2,
        Var::Gamma,
        Var::Delta1,
        Var::Delta2,
        Var::Eta,
        Var::Hz,
        Var::Rho1,
        Var::Rho2,
        Var::Rho3,
    ];

    /// Profile coefficients, in the canonical unknown order.
    pub const COEFFICIENTS: [Var; 8] = [
        Var::A,
        Var::B,
        Var::D,
        Var::F,
        Var::G,
        Var::H,
        Var::X0,
        Var::M,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_coefficient(self) -> bool {
        self.index() < 8
    }

    /// ASCII name used on the command line and in data files.
    pub fn name(self) -> &'static str {
        match self {
            Var::A => "A",
            Var::B => "B",
            Var::D => "D",
            Var::F => "F",
            Var::G => "G",
            Var::H => "H",
            Var::X0 => "x0",
            Var::M => "m",
            Var::Alpha1 => "alpha1",
            Var::Alpha2 => "alpha2",
            Var::Beta1 => "beta1",
            Var::Beta2 => "beta2",
            Var::Gamma => "gamma",
            Var::Delta1 => "delta1",
            Var::Delta2 => "delta2",
            Var::Eta => "eta",
            Var::Hz => "Hz",
            Var::Rho1 => "rho1",
            Var::Rho2 => "rho2",
            Var::Rho3 => "rho3",
        }
    }

    /// Typeset name for human-readable output.
    pub fn pretty(self) -> &'static str {
        match self {
            Var::X0 => "x₀",
            Var::Alpha1 => "α₁",
            Var::Alpha2 => "α₂",
            Var::Beta1 => "β₁",
            Var::Beta2 => "β₂",
            Var::Gamma => "γ",
            Var::Delta1 => "δ₁",
            Var::Delta2 => "δ₂",
            Var::Eta => "η",
            Var::Hz => "H_z",
            Var::Rho1 => "ρ₁",
            Var::Rho2 => "ρ₂",
            Var::Rho3 => "ρ₃",
            other => other.name(),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.pretty())
    }
}

impl FromStr for Var {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        Var::ALL
            .iter()
            .copied()
            .find(|v| v.name() == s || v.pretty() == s)
            .or(match s {
                "a1" => Some(Var::Alpha1),
                "a2" => Some(Var::Alpha2),
                "b1" => Some(Var::Beta1),
                "b2" => Some(Var::Beta2),
                "d1" => Some(Var::Delta1),
                "d2" => Some(Var::Delta2),
                "H_z" | "hz" => Some(Var::Hz),
                _ => None,
            })
            .ok_or_else(|| Error::invalid(format!("unknown quantity `{s}`")))
    }
}

/// A numeric value for every [`Var`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Assignment([f64; Var::COUNT]);

impl Default for Assignment {
    fn default() -> Self {
        Assignment([0.0; Var::COUNT])
    }
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn get(&self, v: Var) -> f64 {
        self.0[v.index()]
    }

    #[inline]
    pub fn set(&mut self, v: Var, value: f64) {
        self.0[v.index()] = value;
    }

    pub fn with(mut self, v: Var, value: f64) -> Self {
        self.set(v, value);
        self
    }

    pub fn values(&self) -> &[f64; Var::COUNT] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, f64)> + '_ {
        Var::ALL.iter().map(move |&v| (v, self.get(v)))
    }
}

impl std::ops::Index<Var> for Assignment {
    type Output = f64;

    fn index(&self, v: Var) -> &f64 {
        &self.0[v.index()]
    }
}

/// Parses `name=value` pairs separated by commas.
pub fn parse_assignments(text: &str) -> Result<Vec<(Var, f64)>, Error> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let (name, value) = pair
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("expected name=value, got `{pair}`")))?;
            let var: Var = name.parse()?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("bad number in `{pair}`")))?;
            Ok((var, value))
        })
        .collect()
}
