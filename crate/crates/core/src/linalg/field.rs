//! Coefficient fields.
//!
//! A [`Field`] value is a small context object (the prime for GF(p), nothing
//! for the rationals) that knows how to operate on its element type. All
//! matrices of one complex share a single context.

use std::fmt::{self, Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::LinalgError;

pub trait Field: Clone + Debug + Send + Sync {
    type Elem: Clone + PartialEq + Debug + Display + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, value: i64) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse. Panics on zero.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    /// Magnitude used by the legacy weighted-average grading.
    fn magnitude(&self, a: &Self::Elem) -> f64;
    /// Short name used in reports: `Q`, `GF2`, `GF(p)`.
    fn name(&self) -> String;
}

/// The rational numbers, with arbitrary-precision numerators and denominators.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn from_i64(&self, value: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(value))
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn inv(&self, a: &BigRational) -> BigRational {
        assert!(!a.is_zero(), "inverse of zero");
        a.recip()
    }

    fn magnitude(&self, a: &BigRational) -> f64 {
        a.abs().to_f64().unwrap_or(f64::INFINITY)
    }

    fn name(&self) -> String {
        "Q".to_string()
    }
}

/// Integers modulo a prime `p < 2^31`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self, LinalgError> {
        if p >= 1 << 31 || !is_prime(p) {
            return Err(LinalgError::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn gf2() -> Self {
        PrimeField { p: 2 }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    fn reduce(&self, v: u64) -> u32 {
        (v % self.p as u64) as u32
    }

    fn pow(&self, base: u32, mut exp: u32) -> u32 {
        let p = self.p as u64;
        let mut acc = 1u64;
        let mut b = base as u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            exp >>= 1;
        }
        acc as u32
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p as u64 {
        if p as u64 % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Field for PrimeField {
    type Elem = u32;

    fn zero(&self) -> u32 {
        0
    }

    fn one(&self) -> u32 {
        1 % self.p
    }

    fn from_i64(&self, value: i64) -> u32 {
        value.rem_euclid(self.p as i64) as u32
    }

    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }

    fn add(&self, a: &u32, b: &u32) -> u32 {
        self.reduce(*a as u64 + *b as u64)
    }

    fn sub(&self, a: &u32, b: &u32) -> u32 {
        self.reduce(*a as u64 + self.p as u64 - *b as u64)
    }

    fn mul(&self, a: &u32, b: &u32) -> u32 {
        self.reduce(*a as u64 * *b as u64)
    }

    fn neg(&self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }

    fn inv(&self, a: &u32) -> u32 {
        assert!(*a != 0, "inverse of zero");
        self.pow(*a, self.p - 2)
    }

    fn magnitude(&self, a: &u32) -> f64 {
        // symmetric representative in (-p/2, p/2]
        let a = *a as i64;
        let p = self.p as i64;
        let s = if a > p / 2 { a - p } else { a };
        s.unsigned_abs() as f64
    }

    fn name(&self) -> String {
        if self.p == 2 {
            "GF2".to_string()
        } else {
            format!("GF({})", self.p)
        }
    }
}

/// Field selected at run time, e.g. from a command-line flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldChoice {
    Rational,
    Prime(u32),
}

impl FromStr for FieldChoice {
    type Err = LinalgError;

    /// Accepts `q`, `gf2` and `gfp:<p>` (case-insensitive).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "q" => Ok(FieldChoice::Rational),
            "gf2" => Ok(FieldChoice::Prime(2)),
            _ => {
                let p = lower
                    .strip_prefix("gfp:")
                    .and_then(|rest| rest.parse::<u32>().ok())
                    .ok_or_else(|| LinalgError::UnknownField(s.to_string()))?;
                PrimeField::new(p)?;
                Ok(FieldChoice::Prime(p))
            }
        }
    }
}

impl Display for FieldChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldChoice::Rational => write!(f, "q"),
            FieldChoice::Prime(2) => write!(f, "gf2"),
            FieldChoice::Prime(p) => write!(f, "gfp:{p}"),
        }
    }
}
