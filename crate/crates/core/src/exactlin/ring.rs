//! Integer arithmetic used by the elimination kernels: a fast `i128` path
//! that reports overflow, and an exact `BigInt` path to fall back on.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

pub(crate) trait Ring: Clone + PartialEq + std::fmt::Debug {
    fn nil() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_big(v: &BigInt) -> Option<Self>;
    fn is_nil(&self) -> bool;
    fn abs_lt(&self, other: &Self) -> bool;
    /// `self - q * other`
    fn sub_mul(&self, q: &Self, other: &Self) -> Option<Self>;
    fn mul(&self, other: &Self) -> Option<Self>;
    fn add(&self, other: &Self) -> Option<Self>;
    fn div_floor(&self, other: &Self) -> Self;
    /// Quotient when `other` divides `self`.
    fn div_exact(&self, other: &Self) -> Option<Self>;
    fn to_big(&self) -> BigInt;
}

impl Ring for i128 {
    fn nil() -> Self {
        0
    }
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i128()
    }
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.unsigned_abs() < other.unsigned_abs()
    }
    fn sub_mul(&self, q: &Self, other: &Self) -> Option<Self> {
        self.checked_sub(q.checked_mul(*other)?)
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        self.checked_mul(*other)
    }
    fn add(&self, other: &Self) -> Option<Self> {
        self.checked_add(*other)
    }
    fn div_floor(&self, other: &Self) -> Self {
        Integer::div_floor(self, other)
    }
    fn div_exact(&self, other: &Self) -> Option<Self> {
        if self % other == 0 {
            Some(self / other)
        } else {
            None
        }
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Ring for BigInt {
    fn nil() -> Self {
        Zero::zero()
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.abs() < other.abs()
    }
    fn sub_mul(&self, q: &Self, other: &Self) -> Option<Self> {
        Some(self - q * other)
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        Some(self * other)
    }
    fn add(&self, other: &Self) -> Option<Self> {
        Some(self + other)
    }
    fn div_floor(&self, other: &Self) -> Self {
        Integer::div_floor(self, other)
    }
    fn div_exact(&self, other: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(other);
        if Zero::is_zero(&r) {
            Some(q)
        } else {
            None
        }
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// Signals that the `i128` path overflowed.
#[derive(Debug)]
pub(crate) struct Overflow;

/// Coefficients `u` with `Σ u_i a_i = gcd(a)`, and the gcd (nonnegative).
pub(crate) fn ext_gcd_list(a: &[BigInt]) -> (BigInt, Vec<BigInt>) {
    let mut g = BigInt::zero();
    let mut u: Vec<BigInt> = vec![BigInt::zero(); a.len()];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        let e = g.extended_gcd(ai);
        // e.gcd = e.x * g + e.y * ai
        for uj in u.iter_mut().take(i) {
            *uj *= &e.x;
        }
        u[i] = e.y.clone();
        g = e.gcd;
    }
    if g.is_negative() {
        g = -g;
        for x in &mut u {
            *x = -x.clone();
        }
    }
    (g, u)
}
