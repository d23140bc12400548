//! Clebsch-Gordan coefficients from the Racah closed form, evaluated in exact
//! rational arithmetic.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Result};

/// An integer or half-integer, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn from_f64(value: f64) -> Result<Self> {
        let twice = 2.0 * value;
        if !twice.is_finite() || (twice - twice.round()).abs() > 1e-9 || twice.abs() > 1e6 {
            return invalid(format!("{value} is not an integer or half-integer"));
        }
        Ok(HalfInt(twice.round() as i32))
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }
}

impl std::ops::Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl std::ops::Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl std::ops::Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// `sign * sqrt(square)` with an exact rational square.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedSqrt {
    pub negative: bool,
    pub square: BigRational,
}

impl SignedSqrt {
    pub fn zero() -> Self {
        Self {
            negative: false,
            square: BigRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.square.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        let v = self.square.to_f64().unwrap_or(f64::NAN).sqrt();
        if self.negative {
            -v
        } else {
            v
        }
    }
}

fn factorial(n: i32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// Integer `(twice_a +- twice_b ...)/2`; callers guarantee evenness.
fn half(twice: i32) -> i32 {
    debug_assert!(twice % 2 == 0);
    twice / 2
}

/// `<j1 m1; j2 m2 | j m>` with Condon-Shortley phases.
///
/// Returns zero for any combination outside the physical range (projection
/// mismatch, triangle violation, `|m| > j`). Fails only for negative `j`.
pub fn clebsch_gordan_general(
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    j: HalfInt,
    m: HalfInt,
) -> Result<SignedSqrt> {
    if j1.twice() < 0 || j2.twice() < 0 || j.twice() < 0 {
        return invalid(format!(
            "angular momenta must be non-negative (got {j1}, {j2}, {j})"
        ));
    }
    let (tj1, tm1, tj2, tm2, tj, tm) = (
        j1.twice(),
        m1.twice(),
        j2.twice(),
        m2.twice(),
        j.twice(),
        m.twice(),
    );
    let parity_ok = (tj1 + tm1) % 2 == 0 && (tj2 + tm2) % 2 == 0 && (tj + tm) % 2 == 0;
    let triangle = tj <= tj1 + tj2 && tj >= (tj1 - tj2).abs() && (tj1 + tj2 + tj) % 2 == 0;
    if tm1 + tm2 != tm
        || !parity_ok
        || !triangle
        || tm1.abs() > tj1
        || tm2.abs() > tj2
        || tm.abs() > tj
    {
        return Ok(SignedSqrt::zero());
    }

    let a = half(tj1 + tj2 - tj);
    let b = half(tj1 - tm1);
    let cc = half(tj2 + tm2);
    let d = half(tj - tj2 + tm1);
    let e = half(tj - tj1 - tm2);

    let kmin = 0.max(-d).max(-e);
    let kmax = a.min(b).min(cc);
    let mut sum = BigRational::zero();
    for k in kmin..=kmax {
        let denom = factorial(k)
            * factorial(a - k)
            * factorial(b - k)
            * factorial(cc - k)
            * factorial(d + k)
            * factorial(e + k);
        let term = BigRational::new(BigInt::one(), denom);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }

    let num = BigInt::from(tj + 1)
        * factorial(half(tj + tj1 - tj2))
        * factorial(half(tj - tj1 + tj2))
        * factorial(a)
        * factorial(half(tj + tm))
        * factorial(half(tj - tm))
        * factorial(half(tj1 - tm1))
        * factorial(half(tj1 + tm1))
        * factorial(half(tj2 - tm2))
        * factorial(half(tj2 + tm2));
    let den = factorial(half(tj1 + tj2 + tj) + 1);
    let prefactor = BigRational::new(num, den);

    Ok(SignedSqrt {
        negative: sum.is_negative(),
        square: prefactor * &sum * &sum,
    })
}

/// Dipole coupling `<j_g, m_g; 1, q | j_e, m_g + q>` for a ground sublevel
/// `m_g` absorbing a photon of helicity `q`.
pub fn clebsch_gordan_exact(
    j_g: HalfInt,
    m_g: HalfInt,
    q: i32,
    j_e: HalfInt,
) -> Result<SignedSqrt> {
    if !(-1..=1).contains(&q) {
        return invalid(format!("photon helicity must be -1, 0 or +1 (got {q})"));
    }
    if j_g.twice() < 0 || j_e.twice() < 0 {
        return invalid(format!(
            "angular momenta must be non-negative (got {j_g}, {j_e})"
        ));
    }
    if (j_g.twice() + m_g.twice()) % 2 != 0 {
        return invalid(format!("m = {m_g} is not a projection of j = {j_g}"));
    }
    let q = HalfInt::from_twice(2 * q);
    clebsch_gordan_general(j_g, m_g, HalfInt::ONE, q, j_e, m_g + q)
}

pub fn clebsch_gordan(j_g: HalfInt, m_g: HalfInt, q: i32, j_e: HalfInt) -> Result<f64> {
    clebsch_gordan_exact(j_g, m_g, q, j_e).map(|s| s.to_f64())
}
