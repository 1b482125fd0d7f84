//! Jacobi elliptic functions and the complete elliptic integral of the first
//! kind, parameter convention `sn(u, m)` with `m = k²`.
//!
//! Both are computed from the arithmetic-geometric mean. The amplitude is
//! recovered by the descending Landen recursion (A&S 16.4), which stays
//! accurate as `m → 1`; `m = 1` itself is handled by the hyperbolic closed
//! forms.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this parameter the first-order series for the amplitude is exact
/// to double precision.
const SERIES_CUTOFF: f64 = 1e-12;

const MAX_AGM_STEPS: usize = 64;

/// Elliptic parameter `m ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct EllipticParameter(f64);

impl EllipticParameter {
    pub fn new(m: f64) -> Result<Self> {
        if m.is_finite() && (0.0..=1.0).contains(&m) {
            Ok(EllipticParameter(m))
        } else {
            Err(Error::domain(format!("elliptic parameter {m} outside [0, 1]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_hyperbolic(self) -> bool {
        self.0 == 1.0
    }
}

impl TryFrom<f64> for EllipticParameter {
    type Error = Error;

    fn try_from(m: f64) -> Result<Self> {
        Self::new(m)
    }
}

impl From<EllipticParameter> for f64 {
    fn from(m: EllipticParameter) -> f64 {
        m.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..MAX_AGM_STEPS {
        if (a - b).abs() <= f64::EPSILON * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    0.5 * (a + b)
}

/// Quarter period `K(m) = π / (2·agm(1, √(1−m)))`.
pub fn complete_elliptic_k(m: f64) -> Result<f64> {
    if m == 1.0 {
        return Err(Error::DivergentPeriod);
    }
    if !m.is_finite() || !(0.0..1.0).contains(&m) {
        return Err(Error::domain(format!("K(m) requires 0 <= m < 1, got {m}")));
    }
    Ok(FRAC_PI_2 / agm(1.0, (1.0 - m).sqrt()))
}

/// Jacobi amplitude `am(u, m)` for `0 <= m < 1`.
fn amplitude(u: f64, m: f64) -> f64 {
    if m < SERIES_CUTOFF {
        return u - 0.25 * m * (u - u.sin() * u.cos());
    }
    let mut a = [0.0f64; MAX_AGM_STEPS + 1];
    let mut c = [0.0f64; MAX_AGM_STEPS + 1];
    a[0] = 1.0;
    let mut b = (1.0 - m).sqrt();
    c[0] = m.sqrt();
    let mut n = 0;
    while n < MAX_AGM_STEPS && c[n].abs() > f64::EPSILON * a[n] {
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = (a[n] * b).sqrt();
        n += 1;
    }
    let mut phi = 2f64.powi(n as i32) * a[n] * u;
    for j in (1..=n).rev() {
        let ratio = (c[j] / a[j] * phi.sin()).clamp(-1.0, 1.0);
        phi = 0.5 * (phi + ratio.asin());
    }
    phi
}

/// `(sn, cn, dn)` at argument `u`.
pub fn jacobi_triple(u: f64, m: f64) -> Result<JacobiTriple> {
    if !u.is_finite() {
        return Err(Error::domain(format!("non-finite argument {u}")));
    }
    let m = EllipticParameter::new(m)?.value();
    if m == 1.0 {
        let sech = 1.0 / u.cosh();
        return Ok(JacobiTriple {
            sn: u.tanh(),
            cn: sech,
            dn: sech,
        });
    }
    let (sn, cn) = amplitude(u, m).sin_cos();
    // (1 - m) + m cn² avoids the cancellation in 1 - m sn² near m = 1.
    let dn = ((1.0 - m) + m * cn * cn).sqrt();
    Ok(JacobiTriple { sn, cn, dn })
}
