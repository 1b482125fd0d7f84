use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::poly::{superscript, MultiPoly};
use crate::elliptic::JacobiTriple;
use crate::vars::{Assignment, Var};

/// Raw expression tree over `s = sn`, `c = cn`, `d = dn` and the symbols.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Rational64),
    Sym(Var),
    Sn,
    Cn,
    Dn,
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, u32),
    Neg(Box<Expr>),
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Num(Rational64::from_integer(n))
    }

    pub fn sym(v: Var) -> Expr {
        Expr::Sym(v)
    }

    pub fn pow(self, n: u32) -> Expr {
        Expr::Pow(Box::new(self), n)
    }

    pub fn eval(&self, a: &Assignment, t: &JacobiTriple) -> f64 {
        match self {
            Expr::Num(q) => *q.numer() as f64 / *q.denom() as f64,
            Expr::Sym(v) => a.get(*v),
            Expr::Sn => t.sn,
            Expr::Cn => t.cn,
            Expr::Dn => t.dn,
            Expr::Add(xs) => xs.iter().map(|x| x.eval(a, t)).sum(),
            Expr::Mul(xs) => xs.iter().map(|x| x.eval(a, t)).product(),
            Expr::Pow(x, n) => x.eval(a, t).powi(*n as i32),
            Expr::Neg(x) => -x.eval(a, t),
        }
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Add(vec![self, rhs])
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Add(vec![self, Expr::Neg(Box::new(rhs))])
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(vec![self, rhs])
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

/// Which of `1, c, d, c·d` multiplies a power of `s`; `G` marks powers of
/// the rational sech variable used by the m = 1 family outside the ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Block {
    Pure,
    C,
    D,
    CD,
    G,
}

/// Basis element `sⁿ`, `sⁿ·c`, `sⁿ·d`, `sⁿ·c·d` (or `gⁿ`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial {
    pub block: Block,
    pub power: u32,
}

impl Monomial {
    pub fn new(block: Block, power: u32) -> Self {
        Monomial { block, power }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.block == Block::G {
            return write!(f, "g{}", superscript(self.power));
        }
        write!(f, "s{}", superscript(self.power))?;
        match self.block {
            Block::C => f.write_str("·c"),
            Block::D => f.write_str("·d"),
            Block::CD => f.write_str("·c·d"),
            _ => Ok(()),
        }
    }
}

/// Polynomial in `s` with symbolic coefficients.
pub type SPoly = BTreeMap<u32, MultiPoly>;

fn spoly_add_term(p: &mut SPoly, k: u32, c: MultiPoly) {
    if c.is_zero() {
        return;
    }
    let sum = match p.remove(&k) {
        Some(old) => &old + &c,
        None => c,
    };
    if !sum.is_zero() {
        p.insert(k, sum);
    }
}

fn spoly_mul(a: &SPoly, b: &SPoly) -> SPoly {
    let mut out = SPoly::new();
    for (ka, ca) in a {
        for (kb, cb) in b {
            spoly_add_term(&mut out, ka + kb, ca * cb);
        }
    }
    out
}

fn spoly_add(a: &SPoly, b: &SPoly) -> SPoly {
    let mut out = a.clone();
    for (k, c) in b {
        spoly_add_term(&mut out, *k, c.clone());
    }
    out
}

/// `1 - s²`
fn c_squared() -> SPoly {
    let mut p = SPoly::new();
    p.insert(0, MultiPoly::one());
    p.insert(2, MultiPoly::integer(-1));
    p
}

/// `1 - m·s²`
fn d_squared() -> SPoly {
    let mut p = SPoly::new();
    p.insert(0, MultiPoly::one());
    p.insert(2, -&MultiPoly::var(Var::M));
    p
}

/// Normal form `p00 + p10·c + p01·d + p11·c·d`, each `pXY` a polynomial in
/// `s`. No power of `c` or `d` above one survives.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EllipticExpr {
    parts: [SPoly; 4],
}

fn slot(c: bool, d: bool) -> usize {
    (c as usize) | ((d as usize) << 1)
}

impl EllipticExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(p: MultiPoly) -> Self {
        let mut e = Self::zero();
        e.add_term(0, false, false, p);
        e
    }

    pub fn one() -> Self {
        Self::constant(MultiPoly::one())
    }

    pub fn s() -> Self {
        let mut e = Self::zero();
        e.add_term(1, false, false, MultiPoly::one());
        e
    }

    pub fn c() -> Self {
        let mut e = Self::zero();
        e.add_term(0, true, false, MultiPoly::one());
        e
    }

    pub fn d() -> Self {
        let mut e = Self::zero();
        e.add_term(0, false, true, MultiPoly::one());
        e
    }

    pub fn symbol(v: Var) -> Self {
        Self::constant(MultiPoly::var(v))
    }

    pub fn p00(&self) -> &SPoly {
        &self.parts[0]
    }

    pub fn p10(&self) -> &SPoly {
        &self.parts[1]
    }

    pub fn p01(&self) -> &SPoly {
        &self.parts[2]
    }

    pub fn p11(&self) -> &SPoly {
        &self.parts[3]
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(|p| p.is_empty())
    }

    fn add_term(&mut self, k: u32, c: bool, d: bool, coef: MultiPoly) {
        spoly_add_term(&mut self.parts[slot(c, d)], k, coef);
    }

    pub fn scale(&self, p: &MultiPoly) -> Self {
        let mut out = Self::zero();
        for (i, part) in self.parts.iter().enumerate() {
            for (k, coef) in part {
                spoly_add_term(&mut out.parts[i], *k, coef * p);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }

    /// d/du with every generator derivative multiplied by `scale`, the
    /// chain factor for an argument `scale·(x + x₀)`.
    pub fn differentiate(&self, scale: Var) -> Self {
        let s = Self::s();
        let c = Self::c();
        let d = Self::d();
        let m = Self::symbol(Var::M);
        let ds = &c * &d;
        let dc = -&(&s * &d);
        let dd = -&(&(&m * &s) * &c);
        let mut out = Self::zero();
        for (i, part) in self.parts.iter().enumerate() {
            let has_c = i & 1 == 1;
            let has_d = i & 2 == 2;
            for (&k, coef) in part {
                let base = |kk: u32, cc: bool, dd_: bool| {
                    let mut e = Self::zero();
                    e.add_term(kk, cc, dd_, coef.clone());
                    e
                };
                if k > 0 {
                    let t = base(k - 1, has_c, has_d).scale(&MultiPoly::integer(k as i64));
                    out = &out + &(&t * &ds);
                }
                if has_c {
                    out = &out + &(&base(k, false, has_d) * &dc);
                }
                if has_d {
                    out = &out + &(&base(k, has_c, false) * &dd);
                }
            }
        }
        out.scale(&MultiPoly::var(scale))
    }

    /// One coefficient per basis monomial present; the basis is linearly
    /// independent as functions of `u`, so the expression vanishes
    /// identically exactly when every returned coefficient is zero.
    pub fn extract_coefficients(&self) -> BTreeMap<Monomial, MultiPoly> {
        let blocks = [Block::Pure, Block::C, Block::D, Block::CD];
        let mut out = BTreeMap::new();
        for (i, part) in self.parts.iter().enumerate() {
            for (k, coef) in part {
                out.insert(Monomial::new(blocks[i], *k), coef.clone());
            }
        }
        out
    }

    pub fn eval(&self, a: &Assignment, t: &JacobiTriple) -> f64 {
        let factors = [1.0, t.cn, t.dn, t.cn * t.dn];
        self.parts
            .iter()
            .zip(factors)
            .map(|(part, f)| {
                f * part
                    .iter()
                    .map(|(k, coef)| coef.eval(a) * t.sn.powi(*k as i32))
                    .sum::<f64>()
            })
            .sum()
    }
}

impl Add for &EllipticExpr {
    type Output = EllipticExpr;
    fn add(self, rhs: &EllipticExpr) -> EllipticExpr {
        let mut out = self.clone();
        for i in 0..4 {
            out.parts[i] = spoly_add(&out.parts[i], &rhs.parts[i]);
        }
        out
    }
}

impl Sub for &EllipticExpr {
    type Output = EllipticExpr;
    fn sub(self, rhs: &EllipticExpr) -> EllipticExpr {
        self + &(-rhs)
    }
}

impl Neg for &EllipticExpr {
    type Output = EllipticExpr;
    fn neg(self) -> EllipticExpr {
        self.scale(&MultiPoly::integer(-1))
    }
}

impl Mul for &EllipticExpr {
    type Output = EllipticExpr;
    fn mul(self, rhs: &EllipticExpr) -> EllipticExpr {
        let mut out = EllipticExpr::zero();
        for i in 0..4 {
            for j in 0..4 {
                if self.parts[i].is_empty() || rhs.parts[j].is_empty() {
                    continue;
                }
                let mut prod = spoly_mul(&self.parts[i], &rhs.parts[j]);
                let cc = (i & 1) + (j & 1);
                let dd = ((i >> 1) & 1) + ((j >> 1) & 1);
                // c² is eliminated before d².
                if cc == 2 {
                    prod = spoly_mul(&prod, &c_squared());
                }
                if dd == 2 {
                    prod = spoly_mul(&prod, &d_squared());
                }
                let k = slot(cc == 1, dd == 1);
                out.parts[k] = spoly_add(&out.parts[k], &prod);
            }
        }
        out
    }
}

/// Reduce a raw tree to normal form.
pub fn normalize(e: &Expr) -> EllipticExpr {
    match e {
        Expr::Num(q) => EllipticExpr::constant(MultiPoly::constant(*q)),
        Expr::Sym(v) => EllipticExpr::symbol(*v),
        Expr::Sn => EllipticExpr::s(),
        Expr::Cn => EllipticExpr::c(),
        Expr::Dn => EllipticExpr::d(),
        Expr::Add(xs) => xs
            .iter()
            .fold(EllipticExpr::zero(), |acc, x| &acc + &normalize(x)),
        Expr::Mul(xs) => xs
            .iter()
            .fold(EllipticExpr::one(), |acc, x| &acc * &normalize(x)),
        Expr::Pow(x, n) => normalize(x).pow(*n),
        Expr::Neg(x) => -&normalize(x),
    }
}

pub fn differentiate(e: &EllipticExpr, scale: Var) -> EllipticExpr {
    e.differentiate(scale)
}

pub fn extract_coefficients(e: &EllipticExpr) -> BTreeMap<Monomial, MultiPoly> {
    e.extract_coefficients()
}

/// Polynomial in `g = 1/(cosh u + H)`, the rational sech ring.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SechExpr {
    pub(crate) terms: SPoly,
}

impl SechExpr {
    pub fn constant(p: MultiPoly) -> Self {
        let mut terms = SPoly::new();
        spoly_add_term(&mut terms, 0, p);
        SechExpr { terms }
    }

    /// `amp · g`
    pub fn linear(amp: Var) -> Self {
        let mut terms = SPoly::new();
        terms.insert(1, MultiPoly::var(amp));
        SechExpr { terms }
    }

    /// Second u-derivative of `g` times `scale²`:
    /// `g'' = g − 3H g² + 2(H² − 1) g³`.
    pub fn second_derivative(&self, scale: Var) -> Self {
        let h = MultiPoly::var(Var::H);
        let mut g2 = SPoly::new();
        g2.insert(1, MultiPoly::one());
        g2.insert(2, h.scale(Rational64::from_integer(-3)));
        g2.insert(
            3,
            (&h.pow(2) - &MultiPoly::one()).scale(Rational64::from_integer(2)),
        );
        assert!(
            self.terms.keys().all(|&k| k <= 1),
            "closed form covers linear profiles only"
        );
        let amp = self.terms.get(&1).cloned().unwrap_or_default();
        let d2 = MultiPoly::monomial(scale, 2);
        let mut terms = SPoly::new();
        for (k, c) in g2 {
            spoly_add_term(&mut terms, k, &(&c * &amp) * &d2);
        }
        SechExpr { terms }
    }

    pub fn extract_coefficients(&self) -> BTreeMap<Monomial, MultiPoly> {
        self.terms
            .iter()
            .map(|(k, c)| (Monomial::new(Block::G, *k), c.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl Add for &SechExpr {
    type Output = SechExpr;
    fn add(self, rhs: &SechExpr) -> SechExpr {
        SechExpr {
            terms: spoly_add(&self.terms, &rhs.terms),
        }
    }
}

impl Sub for &SechExpr {
    type Output = SechExpr;
    fn sub(self, rhs: &SechExpr) -> SechExpr {
        let neg: SPoly = rhs.terms.iter().map(|(k, c)| (*k, -c)).collect();
        SechExpr {
            terms: spoly_add(&self.terms, &neg),
        }
    }
}

impl Mul for &SechExpr {
    type Output = SechExpr;
    fn mul(self, rhs: &SechExpr) -> SechExpr {
        SechExpr {
            terms: spoly_mul(&self.terms, &rhs.terms),
        }
    }
}

impl SechExpr {
    pub fn one() -> Self {
        Self::constant(MultiPoly::one())
    }

    pub fn scale(&self, p: &MultiPoly) -> Self {
        let mut terms = SPoly::new();
        for (k, c) in &self.terms {
            spoly_add_term(&mut terms, *k, c * p);
        }
        SechExpr { terms }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::jacobi_triple;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn coeffs_of(e: &EllipticExpr) -> Vec<(String, String)> {
        e.extract_coefficients()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn relations_applied() {
        let c2 = normalize(&Expr::Cn.pow(2));
        assert_eq!(
            coeffs_of(&c2),
            vec![("s⁰".into(), "1".into()), ("s²".into(), "-1".into())]
        );
        let scd2 = normalize(&(Expr::Sn * Expr::Cn * Expr::Dn).pow(2));
        let expect = normalize(
            &(Expr::Sn.pow(2)
                * (Expr::int(1) - Expr::Sn.pow(2))
                * (Expr::int(1) - Expr::sym(Var::M) * Expr::Sn.pow(2))),
        );
        assert_eq!(scd2, expect);
        let d2c2 = normalize(&(Expr::Dn.pow(2) * Expr::Cn.pow(2)));
        assert_eq!(
            coeffs_of(&d2c2),
            vec![
                ("s⁰".into(), "1".into()),
                ("s²".into(), "-m - 1".into()),
                ("s⁴".into(), "m".into())
            ]
        );
        for part in [d2c2.p10(), d2c2.p01(), d2c2.p11()] {
            assert!(part.is_empty());
        }
        assert!(d2c2.p00().len() == 3);
    }

    #[test]
    fn base_derivatives() {
        let ds = EllipticExpr::s().differentiate(Var::D);
        assert_eq!(coeffs_of(&ds), vec![("s⁰·c·d".into(), "D".into())]);
        let ds2 = normalize(&Expr::Sn.pow(2)).differentiate(Var::D);
        assert_eq!(coeffs_of(&ds2), vec![("s¹·c·d".into(), "2·D".into())]);
        let dc = EllipticExpr::c().differentiate(Var::D);
        assert_eq!(coeffs_of(&dc), vec![("s¹·d".into(), "-D".into())]);
        let dd = EllipticExpr::d().differentiate(Var::D);
        assert_eq!(coeffs_of(&dd), vec![("s¹·c".into(), "-D·m".into())]);
    }

    #[test]
    fn second_derivative_of_sn_squared() {
        let e = normalize(&Expr::Sn.pow(2));
        let dd = e.differentiate(Var::D).differentiate(Var::D);
        let got = dd.extract_coefficients();
        let d2 = MultiPoly::monomial(Var::D, 2);
        let m = MultiPoly::var(Var::M);
        assert_eq!(got[&Monomial::new(Block::Pure, 0)], d2.scale(2.into()));
        assert_eq!(
            got[&Monomial::new(Block::Pure, 2)],
            (&d2 * &(&MultiPoly::one() + &m)).scale((-4).into())
        );
        assert_eq!(got[&Monomial::new(Block::Pure, 4)], (&d2 * &m).scale(6.into()));
        assert_eq!(got.len(), 3);
    }

    #[test]
    fn extraction_examples() {
        assert!(EllipticExpr::zero().extract_coefficients().is_empty());
        let scd = normalize(&(Expr::Sn * Expr::Cn * Expr::Dn));
        let e = &scd.scale(&MultiPoly::monomial(Var::D, 2)) - &scd;
        assert_eq!(coeffs_of(&e), vec![("s¹·c·d".into(), "D² - 1".into())]);
    }

    fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
        let leaf = |rng: &mut ChaCha8Rng| match rng.random_range(0..6) {
            0 => Expr::Sn,
            1 => Expr::Cn,
            2 => Expr::Dn,
            3 => Expr::Num(Rational64::new(rng.random_range(-5..6), rng.random_range(1..4))),
            4 => Expr::sym(Var::A),
            _ => Expr::sym(Var::M),
        };
        if depth == 0 {
            return leaf(rng);
        }
        match rng.random_range(0..5) {
            0 => random_expr(rng, depth - 1) + random_expr(rng, depth - 1),
            1 => random_expr(rng, depth - 1) * random_expr(rng, depth - 1),
            2 => random_expr(rng, depth - 1).pow(rng.random_range(0..4)),
            3 => -random_expr(rng, depth - 1),
            _ => leaf(rng),
        }
    }

    #[test]
    fn evaluation_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let raw = random_expr(&mut rng, 4);
            let nf = normalize(&raw);
            let m: f64 = rng.random_range(0.0..1.0);
            let u: f64 = rng.random_range(-3.0..3.0);
            let dscale: f64 = rng.random_range(0.5..2.0);
            let a = Assignment::new()
                .with(Var::M, m)
                .with(Var::A, rng.random_range(-2.0..2.0))
                .with(Var::D, dscale);
            let t = jacobi_triple(u, m).unwrap();
            let x = raw.eval(&a, &t);
            let y = nf.eval(&a, &t);
            assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0), "{x} vs {y}");

            // Derivative with respect to x of f(D·x) against a centred difference.
            let h = 1e-5;
            let tp = jacobi_triple(u + dscale * h, m).unwrap();
            let tm = jacobi_triple(u - dscale * h, m).unwrap();
            let fd = (raw.eval(&a, &tp) - raw.eval(&a, &tm)) / (2.0 * h);
            let an = nf.differentiate(Var::D).eval(&a, &t);
            assert!((fd - an).abs() <= 1e-6 * an.abs().max(1.0), "{fd} vs {an}");

            let back: f64 = nf
                .extract_coefficients()
                .iter()
                .map(|(k, c)| {
                    let base = t.sn.powi(k.power as i32);
                    let f = match k.block {
                        Block::Pure => 1.0,
                        Block::C => t.cn,
                        Block::D => t.dn,
                        Block::CD => t.cn * t.dn,
                        Block::G => unreachable!(),
                    };
                    c.eval(&a) * base * f
                })
                .sum();
            assert!((back - y).abs() <= 1e-10 * y.abs().max(1.0));
        }
    }

    #[test]
    fn sech_second_derivative_matches_difference() {
        let a = Assignment::new()
            .with(Var::A, 0.7)
            .with(Var::H, 0.4)
            .with(Var::D, 1.3);
        let e = SechExpr::linear(Var::A).second_derivative(Var::D);
        let prof = |x: f64| 0.7 / ((1.3 * x).cosh() + 0.4);
        for i in 0..20 {
            let x = -3.0 + 0.3 * i as f64;
            let g = 1.0 / ((1.3 * x).cosh() + 0.4);
            let val: f64 = e
                .terms
                .iter()
                .map(|(k, c)| c.eval(&a) * g.powi(*k as i32))
                .sum();
            let h = 1e-4;
            let fd = (prof(x + h) - 2.0 * prof(x) + prof(x - h)) / (h * h);
            assert!((val - fd).abs() < 1e-6);
        }
    }
}
