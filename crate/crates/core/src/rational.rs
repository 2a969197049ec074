//! Exact rational arithmetic on 128-bit integers.
//!
//! The Euler-product constants for a modulus like 30 are products of a
//! handful of tiny local factors, so 128 bits is far more room than the
//! values ever need. Every operation still goes through checked arithmetic
//! and reduces by gcd, so an overflow surfaces as an error instead of a
//! silently wrong constant.

use crate::error::{Error, Result};

/// A reduced fraction `num/den` with `den > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i128,
    den: i128,
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    pub fn new(num: i128, den: i128) -> Result<Self> {
        if den == 0 {
            return Err(Error::Domain("rational with zero denominator".into()));
        }
        // i128::MIN has no absolute value; it can never survive reduction anyway.
        if num == i128::MIN || den == i128::MIN {
            return Err(Error::Overflow("rational construction"));
        }
        let sign = if (num < 0) != (den < 0) { -1 } else { 1 };
        let (n, d) = (num.unsigned_abs(), den.unsigned_abs());
        let g = gcd_u128(n, d);
        let (n, d) = (n / g, d / g);
        if n > i128::MAX as u128 || d > i128::MAX as u128 {
            return Err(Error::Overflow("rational construction"));
        }
        Ok(Rational {
            num: sign * n as i128,
            den: d as i128,
        })
    }

    pub fn from_integer(n: i128) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn numer(&self) -> i128 {
        self.num
    }

    pub fn denom(&self) -> i128 {
        self.den
    }

    pub fn is_positive(&self) -> bool {
        self.num > 0
    }

    pub fn add(&self, other: &Rational) -> Result<Rational> {
        // Reduce cross terms by gcd of denominators first to delay overflow.
        let g = gcd_u128(self.den.unsigned_abs(), other.den.unsigned_abs()) as i128;
        let lhs = self
            .num
            .checked_mul(other.den / g)
            .ok_or(Error::Overflow("rational add"))?;
        let rhs = other
            .num
            .checked_mul(self.den / g)
            .ok_or(Error::Overflow("rational add"))?;
        let num = lhs.checked_add(rhs).ok_or(Error::Overflow("rational add"))?;
        let den = (self.den / g)
            .checked_mul(other.den)
            .ok_or(Error::Overflow("rational add"))?;
        Rational::new(num, den)
    }

    pub fn sub(&self, other: &Rational) -> Result<Rational> {
        let neg = Rational {
            num: other
                .num
                .checked_neg()
                .ok_or(Error::Overflow("rational sub"))?,
            den: other.den,
        };
        self.add(&neg)
    }

    pub fn mul(&self, other: &Rational) -> Result<Rational> {
        // Cross-reduce before multiplying.
        let g1 = gcd_u128(self.num.unsigned_abs(), other.den.unsigned_abs()) as i128;
        let g2 = gcd_u128(other.num.unsigned_abs(), self.den.unsigned_abs()) as i128;
        let num = (self.num / g1)
            .checked_mul(other.num / g2)
            .ok_or(Error::Overflow("rational mul"))?;
        let den = (self.den / g2)
            .checked_mul(other.den / g1)
            .ok_or(Error::Overflow("rational mul"))?;
        Rational::new(num, den)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl std::fmt::Display for Rational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}
