//! Exact arithmetic over the dyadic rationals `Z[1/2]`.
//!
//! A [`Dyadic`] is `numerator / 2^exponent` with an arbitrary-precision
//! numerator. Values are kept normalized (`exponent == 0` or the numerator is
//! odd), so structural equality is numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Dyadic {
    num: BigInt,
    exp: u32,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic { num: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic::from(1)
    }

    /// `num / 2^exp`, normalized. Negative exponents multiply.
    pub fn new(num: impl Into<BigInt>, exp: i64) -> Self {
        Self::normalized(num.into(), exp)
    }

    /// `1 / 2^k` for `k >= 0`, or `2^-k` for `k < 0`.
    pub fn pow2(k: i64) -> Self {
        Self::normalized(BigInt::one(), -k)
    }

    pub fn half() -> Self {
        Dyadic { num: BigInt::one(), exp: 1 }
    }

    fn normalized(mut num: BigInt, exp: i64) -> Self {
        if num.is_zero() {
            return Dyadic::zero();
        }
        if exp <= 0 {
            let shift = usize::try_from(-exp).expect("exponent overflow");
            return Dyadic { num: num << shift, exp: 0 };
        }
        let tz = num.trailing_zeros().unwrap_or(0).min(exp as u64);
        if tz > 0 {
            num >>= tz as usize;
        }
        Dyadic {
            num,
            exp: u32::try_from(exp as u64 - tz).expect("exponent overflow"),
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

    pub fn is_positive(&self) -> bool {
        self.num.sign() == Sign::Plus
    }

    pub fn is_negative(&self) -> bool {
        self.num.sign() == Sign::Minus
    }

    pub fn is_integer(&self) -> bool {
        self.exp == 0
    }

    /// True for elements of `(1/2)Z`.
    pub fn is_half_integer_lattice(&self) -> bool {
        self.exp <= 1
    }

    pub fn abs(&self) -> Self {
        Dyadic { num: self.num.abs(), exp: self.exp }
    }

    /// Multiplication by `2^k`.
    pub fn mul_pow2(&self, k: i64) -> Self {
        Self::normalized(self.num.clone(), self.exp as i64 - k)
    }

    /// Greatest integer `<= self`.
    pub fn floor(&self) -> BigInt {
        if self.exp == 0 {
            return self.num.clone();
        }
        self.num.div_floor(&(BigInt::one() << self.exp as usize))
    }

    pub fn floor_i64(&self) -> i64 {
        self.floor().to_i64().expect("coordinate out of i64 range")
    }

    /// Least integer `>= self`.
    pub fn ceil_i64(&self) -> i64 {
        let f = self.floor_i64();
        if self.is_integer() {
            f
        } else {
            f + 1
        }
    }

    /// `Some(k)` when `self == 2^k`.
    pub fn log2_exact(&self) -> Result<Option<i64>> {
        if !self.is_positive() {
            return Err(Error::Domain(format!("log2 of non-positive value {self}")));
        }
        let bits = self.num.bits();
        let tz = self.num.trailing_zeros().unwrap_or(0);
        if tz + 1 != bits {
            return Ok(None);
        }
        Ok(Some(tz as i64 - self.exp as i64))
    }

    /// Exact quotient, `None` when it is not dyadic or `rhs == 0`.
    pub fn checked_div(&self, rhs: &Dyadic) -> Option<Dyadic> {
        if rhs.is_zero() {
            return None;
        }
        let tz = rhs.num.trailing_zeros().unwrap_or(0);
        let odd = &rhs.num >> tz as usize;
        let (q, r) = self.num.div_rem(&odd);
        if !r.is_zero() {
            return None;
        }
        // self/rhs = (q / 2^exp) / (2^tz / 2^rhs.exp)
        Some(Self::normalized(q, self.exp as i64 + tz as i64 - rhs.exp as i64))
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone(), BigInt::one() << self.exp as usize)
    }

    /// `Some` when the rational has a power-of-two denominator.
    pub fn from_rational(r: &BigRational) -> Option<Dyadic> {
        let d = r.denom();
        let tz = d.trailing_zeros().unwrap_or(0);
        if (d >> tz as usize) != BigInt::one() {
            return None;
        }
        Some(Self::normalized(r.numer().clone(), tz as i64))
    }

    pub fn to_f64(&self) -> f64 {
        let n = self.num.to_f64().unwrap_or(f64::NAN);
        n / 2f64.powi(self.exp as i32)
    }

    pub fn min<'a>(&'a self, other: &'a Dyadic) -> &'a Dyadic {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max<'a>(&'a self, other: &'a Dyadic) -> &'a Dyadic {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn midpoint(a: &Dyadic, b: &Dyadic) -> Dyadic {
        (a + b).mul_pow2(-1)
    }

    /// Exact decimal expansion (always finite for dyadics).
    pub fn to_decimal_string(&self) -> String {
        if self.exp == 0 {
            return self.num.to_string();
        }
        // num / 2^e = num * 5^e / 10^e
        let scaled = self.num.abs() * num_traits::pow(BigInt::from(5), self.exp as usize);
        let digits = scaled.to_string();
        let e = self.exp as usize;
        let padded = if digits.len() <= e {
            format!("{}{}", "0".repeat(e + 1 - digits.len()), digits)
        } else {
            digits
        };
        let (int_part, frac_part) = padded.split_at(padded.len() - e);
        let sign = if self.is_negative() { "-" } else { "" };
        format!("{sign}{int_part}.{frac_part}")
    }
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic { num: BigInt::from(v), exp: 0 }
    }
}

impl From<i32> for Dyadic {
    fn from(v: i32) -> Self {
        Dyadic::from(v as i64)
    }
}

impl From<BigInt> for Dyadic {
    fn from(v: BigInt) -> Self {
        Dyadic { num: v, exp: 0 }
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.num.sign(), other.num.sign());
        if sa != sb {
            return sa.cmp(&sb);
        }
        match self.exp.cmp(&other.exp) {
            Ordering::Equal => self.num.cmp(&other.num),
            Ordering::Greater => {
                let shifted = &other.num << (self.exp - other.exp) as usize;
                self.num.cmp(&shifted)
            }
            Ordering::Less => {
                let shifted = &self.num << (other.exp - self.exp) as usize;
                shifted.cmp(&other.num)
            }
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn add_ref(a: &Dyadic, b: &Dyadic, negate_b: bool) -> Dyadic {
    if b.is_zero() {
        return a.clone();
    }
    if a.is_zero() {
        return if negate_b { -b.clone() } else { b.clone() };
    }
    let (num, exp) = match a.exp.cmp(&b.exp) {
        Ordering::Equal => {
            let n = if negate_b { &a.num - &b.num } else { &a.num + &b.num };
            (n, a.exp)
        }
        Ordering::Greater => {
            let bs = &b.num << (a.exp - b.exp) as usize;
            (if negate_b { &a.num - bs } else { &a.num + bs }, a.exp)
        }
        Ordering::Less => {
            let as_ = &a.num << (b.exp - a.exp) as usize;
            (if negate_b { as_ - &b.num } else { as_ + &b.num }, b.exp)
        }
    };
    // unequal exponents: the sum of an odd and an even numerator stays odd
    if a.exp != b.exp {
        return Dyadic { num, exp };
    }
    Dyadic::normalized(num, exp as i64)
}

impl Add<&Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        add_ref(self, rhs, false)
    }
}

impl Sub<&Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        add_ref(self, rhs, true)
    }
}

impl Mul<&Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() || rhs.is_zero() {
            return Dyadic::zero();
        }
        Dyadic::normalized(&self.num * &rhs.num, self.exp as i64 + rhs.exp as i64)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: &Dyadic) -> Dyadic {
                (&self).$m(rhs)
            }
        }
        impl $tr<Dyadic> for &Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { num: -self.num, exp: self.exp }
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { num: -&self.num, exp: self.exp }
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_int(s: &str) -> Result<BigInt> {
    BigInt::from_str(s.trim()).map_err(|_| Error::Parse(format!("bad integer `{s}`")))
}

impl FromStr for Dyadic {
    type Err = Error;

    /// Accepts `p/2^e`, `p/q` with `q` a power of two, integers, and finite
    /// decimals whose value is dyadic (`0.3125`). Anything else is rejected.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty number".into()));
        }
        if let Some((p, q)) = s.split_once('/') {
            let num = parse_int(p)?;
            let q = q.trim();
            if let Some(e) = q.strip_prefix("2^") {
                let e: i64 = e
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent in `{s}`")))?;
                return Ok(Dyadic::new(num, e));
            }
            let den = parse_int(q)?;
            if !den.is_positive() {
                return Err(Error::Parse(format!("non-positive denominator in `{s}`")));
            }
            let r = BigRational::new(num, den);
            return Dyadic::from_rational(&r).ok_or_else(|| Error::NonDyadic(s.to_string()));
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            let negative = int_part.trim_start().starts_with('-');
            let int_digits = int_part.trim().trim_start_matches(['-', '+']);
            if !frac_part.chars().all(|c| c.is_ascii_digit())
                || !int_digits.chars().all(|c| c.is_ascii_digit())
            {
                return Err(Error::Parse(format!("bad decimal `{s}`")));
            }
            let digits = format!("{}{}", if int_digits.is_empty() { "0" } else { int_digits }, frac_part);
            let mut num = parse_int(&digits)?;
            if negative {
                num = -num;
            }
            let d = frac_part.len();
            let five_d = num_traits::pow(BigInt::from(5), d);
            let (q, r) = num.div_rem(&five_d);
            if !r.is_zero() {
                return Err(Error::NonDyadic(s.to_string()));
            }
            return Ok(Dyadic::new(q, d as i64));
        }
        Ok(Dyadic::from(parse_int(s)?))
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand used throughout the crate and its tests: `dy(3, 3)` is `3/8`.
pub fn dy(num: i64, exp: i64) -> Dyadic {
    Dyadic::new(num, exp)
}
