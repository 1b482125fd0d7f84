use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::vars::{Assignment, Var};

pub type Exponents = [u8; Var::COUNT];

/// Sparse polynomial over the named symbols with exact rational coefficients.
///
/// Zero coefficients are never stored, so structural equality is
/// mathematical equality.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash, PartialOrd, Ord)]
pub struct MultiPoly {
    terms: BTreeMap<Exponents, Rational64>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational64::one())
    }

    pub fn constant(c: Rational64) -> Self {
        let mut p = Self::zero();
        p.add_term([0; Var::COUNT], c);
        p
    }

    pub fn integer(c: i64) -> Self {
        Self::constant(Rational64::from_integer(c))
    }

    pub fn var(v: Var) -> Self {
        Self::monomial(v, 1)
    }

    pub fn monomial(v: Var, power: u8) -> Self {
        let mut e = [0; Var::COUNT];
        e[v.index()] = power;
        let mut p = Self::zero();
        p.add_term(e, Rational64::one());
        p
    }

    /// `coef · Π vars`.
    pub fn product(coef: i64, vars: &[Var]) -> Self {
        let mut e = [0u8; Var::COUNT];
        for v in vars {
            e[v.index()] += 1;
        }
        let mut p = Self::zero();
        p.add_term(e, Rational64::from_integer(coef));
        p
    }

    fn add_term(&mut self, e: Exponents, c: Rational64) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Rational64::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational64)> {
        self.terms.iter()
    }

    pub fn scale(&self, c: Rational64) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        MultiPoly {
            terms: self.terms.iter().map(|(e, v)| (*e, *v * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Symbols with a nonzero exponent somewhere.
    pub fn symbols(&self) -> Vec<Var> {
        Var::ALL
            .iter()
            .copied()
            .filter(|v| self.terms.keys().any(|e| e[v.index()] > 0))
            .collect()
    }

    pub fn degree_in(&self, v: Var) -> u8 {
        self.terms.keys().map(|e| e[v.index()]).max().unwrap_or(0)
    }

    pub fn eval(&self, a: &Assignment) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = c.to_f64().unwrap_or(f64::NAN);
                for (i, &p) in e.iter().enumerate() {
                    if p > 0 {
                        t *= a.values()[i].powi(p as i32);
                    }
                }
                t
            })
            .sum()
    }

    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let powers = e
                        .iter()
                        .enumerate()
                        .filter(|(_, &p)| p > 0)
                        .map(|(i, &p)| (i, p as i32))
                        .collect();
                    (c.to_f64().unwrap_or(f64::NAN), powers)
                })
                .collect(),
        }
    }
}

/// A polynomial flattened for repeated floating-point evaluation.
#[derive(Debug, Clone)]
pub struct CompiledPoly {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl CompiledPoly {
    pub fn eval(&self, a: &Assignment) -> f64 {
        let v = a.values();
        self.terms
            .iter()
            .map(|(c, powers)| powers.iter().fold(*c, |t, &(i, p)| t * v[i].powi(p)))
            .sum()
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;

    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, *c);
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;

    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -*c);
        }
        out
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;

    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let mut e = *ea;
                for (x, y) in e.iter_mut().zip(eb) {
                    *x += y;
                }
                out.add_term(e, *ca * *cb);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;

    fn neg(self) -> MultiPoly {
        self.scale(-Rational64::one())
    }
}

macro_rules! forward_owned {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for MultiPoly {
            type Output = MultiPoly;
            fn $f(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$f(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

const SUPERSCRIPTS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];

pub(crate) fn superscript(n: u32) -> String {
    n.to_string()
        .chars()
        .map(|d| SUPERSCRIPTS[d.to_digit(10).unwrap_or(0) as usize])
        .collect()
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // Highest total degree first reads closer to hand-written systems.
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| {
            let da: u32 = a.0.iter().map(|&x| x as u32).sum();
            let db: u32 = b.0.iter().map(|&x| x as u32).sum();
            db.cmp(&da).then(b.0.cmp(a.0))
        });
        for (k, (e, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = c.abs();
            let mut factors = Vec::new();
            if !mag.is_one() || e.iter().all(|&p| p == 0) {
                factors.push(mag.to_string());
            }
            for v in Var::ALL {
                let p = e[v.index()];
                if p == 1 {
                    factors.push(v.pretty().to_string());
                } else if p > 1 {
                    factors.push(format!("{}{}", v.pretty(), superscript(p as u32)));
                }
            }
            f.write_str(&factors.join("·"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    #[test]
    fn canonical_zero() {
        let a = MultiPoly::var(Var::A);
        assert!((&a - &a).is_zero());
        assert_eq!((&a - &a), MultiPoly::zero());
        assert!(MultiPoly::integer(0).is_zero());
        assert!(a.scale(r(0)).is_zero());
    }

    #[test]
    fn arithmetic_is_exact() {
        let a = MultiPoly::var(Var::A);
        let b = MultiPoly::var(Var::B);
        let sq = (&a + &b).pow(2);
        let expanded = &(&a.pow(2) + &(&a * &b).scale(r(2))) + &b.pow(2);
        assert_eq!(sq, expanded);
        let third = MultiPoly::constant(Rational64::new(1, 3));
        assert_eq!((&third + &third) + third.clone(), MultiPoly::one());
    }

    #[test]
    fn evaluation_and_compile_agree() {
        let p = &MultiPoly::product(3, &[Var::A, Var::A, Var::D]) - &MultiPoly::product(2, &[Var::M]);
        let a = Assignment::new()
            .with(Var::A, 1.5)
            .with(Var::D, -2.0)
            .with(Var::M, 0.25);
        let expect = 3.0 * 2.25 * -2.0 - 0.5;
        assert!((p.eval(&a) - expect).abs() < 1e-15);
        assert!((p.compile().eval(&a) - expect).abs() < 1e-15);
        assert_eq!(p.symbols(), vec![Var::A, Var::D, Var::M]);
        assert_eq!(p.degree_in(Var::A), 2);
    }

    #[test]
    fn display() {
        let p = &MultiPoly::product(2, &[Var::Beta1, Var::A, Var::A]) + &MultiPoly::product(1, &[Var::Gamma, Var::B, Var::B]);
        assert_eq!(p.to_string(), "2·A²·β₁ + B²·γ");
        assert_eq!(MultiPoly::zero().to_string(), "0");
        assert_eq!(MultiPoly::integer(-4).to_string(), "-4");
    }
}
