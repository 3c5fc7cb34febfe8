//! Exact dyadic rationals n / 2^e with arbitrary-precision numerators.
//!
//! Composing piecewise-linear maps multiplies slopes and shifts
//! breakpoints, so denominators can grow by the current slope exponent at
//! every step; deep composition chains overflow machine integers, hence
//! the `BigInt` numerator.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

/// A dyadic rational `num / 2^exp`, kept normalized: `num` is odd or zero
/// (zero forces `exp == 0`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    exp: u32,
}

impl Dyadic {
    pub fn new(num: i64, exp: u32) -> Self {
        Self::from_parts(BigInt::from(num), exp)
    }

    pub fn from_parts(num: BigInt, exp: u32) -> Self {
        let mut d = Self { num, exp };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Self { num: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Self { num: BigInt::from(1), exp: 0 }
    }

    pub fn from_int(n: i64) -> Self {
        Self { num: BigInt::from(n), exp: 0 }
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        let trailing = self.num.trailing_zeros().unwrap_or(0).min(self.exp as u64) as u32;
        if trailing > 0 {
            self.num >>= trailing;
            self.exp -= trailing;
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    pub fn add(&self, other: &Self) -> Self {
        let exp = self.exp.max(other.exp);
        let a = &self.num << (exp - self.exp);
        let b = &other.num << (exp - other.exp);
        Self::from_parts(a + b, exp)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let exp = self.exp.max(other.exp);
        let a = &self.num << (exp - self.exp);
        let b = &other.num << (exp - other.exp);
        Self::from_parts(a - b, exp)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_parts(&self.num * &other.num, self.exp + other.exp)
    }

    /// Multiplies by 2^k (k may be negative).
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.num.is_zero() {
            return Self::zero();
        }
        let new_exp = self.exp as i64 - k;
        if new_exp >= 0 {
            Self::from_parts(self.num.clone(), u32::try_from(new_exp).expect("exponent overflow"))
        } else {
            Self::from_parts(&self.num << ((-new_exp) as u64), 0)
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.num.is_zero() {
            return 0.0;
        }
        // Round the numerator to 63 significant bits, then rescale; avoids
        // the Inf·0 trap for numerators wider than f64's exponent range.
        let bits = self.num.bits();
        if bits <= 63 {
            self.num.to_f64().unwrap() * f64::powi(2.0, -(self.exp as i32))
        } else {
            let shift = bits - 63;
            let head = (&self.num >> shift).to_f64().unwrap();
            head * f64::powi(2.0, (shift as i64 - self.exp as i64) as i32)
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let exp = self.exp.max(other.exp);
        let a = &self.num << (exp - self.exp);
        let b = &other.num << (exp - other.exp);
        a.cmp(&b)
    }
}

impl std::fmt::Display for Dyadic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}
