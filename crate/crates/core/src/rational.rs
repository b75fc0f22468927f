//! Exact signed rationals for every money and utility quantity.
//!
//! Values that fit are kept as a reduced `i128` fraction; anything that would
//! overflow is promoted to an arbitrary-precision [`BigRational`] and demoted
//! again once it fits. The representation is canonical, so equality and
//! hashing are structural.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Small {
    // denom > 0, gcd(|numer|, denom) == 1, numer != i128::MIN
    numer: i128,
    denom: i128,
}

#[derive(Clone)]
enum Repr {
    Small(Small),
    Big(BigRational),
}

/// An exact rational number in canonical reduced form.
#[derive(Clone)]
pub struct Rational(Repr);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRationalError(pub String);

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Small {
    fn new(numer: i128, denom: i128) -> Option<Small> {
        if denom == 0 || numer == i128::MIN || denom == i128::MIN {
            return None;
        }
        let g = gcd_u128(numer.unsigned_abs(), denom.unsigned_abs()) as i128;
        let (mut n, mut d) = (numer / g, denom / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        Some(Small { numer: n, denom: d })
    }

    fn add(self, o: Small) -> Option<Small> {
        let g = gcd_u128(self.denom as u128, o.denom as u128) as i128;
        let lcm = (self.denom / g).checked_mul(o.denom)?;
        let a = self.numer.checked_mul(lcm / self.denom)?;
        let b = o.numer.checked_mul(lcm / o.denom)?;
        Small::new(a.checked_add(b)?, lcm)
    }

    fn mul(self, o: Small) -> Option<Small> {
        let g1 = gcd_u128(self.numer.unsigned_abs(), o.denom as u128).max(1) as i128;
        let g2 = gcd_u128(o.numer.unsigned_abs(), self.denom as u128).max(1) as i128;
        let n = (self.numer / g1).checked_mul(o.numer / g2)?;
        let d = (self.denom / g2).checked_mul(o.denom / g1)?;
        Small::new(n, d)
    }

    fn to_big(self) -> BigRational {
        BigRational::new_raw(BigInt::from(self.numer), BigInt::from(self.denom))
    }
}

impl Rational {
    fn from_big(r: BigRational) -> Rational {
        match (r.numer().to_i128(), r.denom().to_i128()) {
            (Some(n), Some(d)) if n != i128::MIN => Rational(Repr::Small(Small { numer: n, denom: d })),
            _ => Rational(Repr::Big(r)),
        }
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(s) => s.to_big(),
            Repr::Big(b) => b.clone(),
        }
    }

    pub fn zero() -> Rational {
        Rational(Repr::Small(Small { numer: 0, denom: 1 }))
    }

    pub fn one() -> Rational {
        Rational::from_integer(1)
    }

    pub fn from_integer(n: i64) -> Rational {
        Rational(Repr::Small(Small { numer: n as i128, denom: 1 }))
    }

    /// `numer / denom`. Panics if `denom` is zero.
    pub fn new(numer: i64, denom: i64) -> Rational {
        assert!(denom != 0, "zero denominator");
        Rational(Repr::Small(Small::new(numer as i128, denom as i128).expect("i64 inputs fit")))
    }

    pub fn from_bigints(numer: BigInt, denom: BigInt) -> Option<Rational> {
        if denom.is_zero() {
            return None;
        }
        Some(Rational::from_big(BigRational::new(numer, denom)))
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(s) => BigInt::from(s.numer),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(s) => BigInt::from(s.denom),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.0, Repr::Small(s) if s.numer == 0)
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(s) => s.numer < 0,
            Repr::Big(b) => b.is_negative(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small(s) => s.numer > 0,
            Repr::Big(b) => b.is_positive(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(s) => s.denom == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    pub fn abs(&self) -> Rational {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn recip(&self) -> Option<Rational> {
        if self.is_zero() {
            return None;
        }
        Some(match &self.0 {
            Repr::Small(s) => Rational(Repr::Small(Small::new(s.denom, s.numer).expect("nonzero"))),
            Repr::Big(b) => Rational::from_big(b.recip()),
        })
    }

    /// Largest integer not above the value.
    pub fn floor(&self) -> BigInt {
        match &self.0 {
            Repr::Small(s) => BigInt::from(Integer::div_floor(&s.numer, &s.denom)),
            Repr::Big(b) => b.floor().to_integer(),
        }
    }

    /// Smallest integer not below the value.
    pub fn ceil(&self) -> BigInt {
        match &self.0 {
            Repr::Small(s) => BigInt::from(Integer::div_ceil(&s.numer, &s.denom)),
            Repr::Big(b) => b.ceil().to_integer(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(s) => s.numer as f64 / s.denom as f64,
            Repr::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// Nearest multiple of `1/denom` (ties away from zero).
    pub fn from_f64_quantized(x: f64, denom: i64) -> Rational {
        let n = (x * denom as f64).round() as i64;
        Rational::new(n, denom)
    }

    /// Canonical `"p/q"` text used by the instance format; integers keep `/1`.
    pub fn to_fraction_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    pub fn min_of(a: &Rational, b: &Rational) -> Rational {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    pub fn max_of(a: &Rational, b: &Rational) -> Rational {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_big(BigRational::from_integer(n))
    }
}

fn add_impl(a: &Rational, b: &Rational) -> Rational {
    if let (Repr::Small(x), Repr::Small(y)) = (&a.0, &b.0) {
        if let Some(r) = x.add(*y) {
            return Rational(Repr::Small(r));
        }
    }
    Rational::from_big(a.to_big() + b.to_big())
}

fn mul_impl(a: &Rational, b: &Rational) -> Rational {
    if let (Repr::Small(x), Repr::Small(y)) = (&a.0, &b.0) {
        if let Some(r) = x.mul(*y) {
            return Rational(Repr::Small(r));
        }
    }
    Rational::from_big(a.to_big() * b.to_big())
}

fn neg_impl(a: &Rational) -> Rational {
    match &a.0 {
        Repr::Small(s) => Rational(Repr::Small(Small { numer: -s.numer, denom: s.denom })),
        Repr::Big(b) => Rational::from_big(-b.clone()),
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                $body(self, rhs)
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $body(&self, &rhs)
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                $body(&self, rhs)
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $body(self, &rhs)
            }
        }
    };
}

binop!(Add, add, add_impl);
binop!(Sub, sub, |a: &Rational, b: &Rational| add_impl(a, &neg_impl(b)));
binop!(Mul, mul, mul_impl);
binop!(Div, div, |a: &Rational, b: &Rational| mul_impl(a, &b.recip().expect("division by zero rational")));

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        neg_impl(&self)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        neg_impl(self)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        *self = add_impl(self, rhs);
    }
}

impl AddAssign<Rational> for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        *self = add_impl(self, &rhs);
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        *self = add_impl(self, &neg_impl(rhs));
    }
}

impl SubAssign<Rational> for Rational {
    fn sub_assign(&mut self, rhs: Rational) {
        *self = add_impl(self, &neg_impl(&rhs));
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a == b,
            (Repr::Big(a), Repr::Big(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(s) => {
                0u8.hash(state);
                s.hash(state);
            }
            Repr::Big(b) => {
                1u8.hash(state);
                b.hash(state);
            }
        }
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &other.0) {
            if a.denom == b.denom {
                return a.numer.cmp(&b.numer);
            }
            if let (Some(l), Some(r)) = (a.numer.checked_mul(b.denom), b.numer.checked_mul(a.denom)) {
                return l.cmp(&r);
            }
        }
        self.to_big().cmp(&other.to_big())
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(s) if s.denom == 1 => write!(f, "{}", s.numer),
            Repr::Small(s) => write!(f, "{}/{}", s.numer, s.denom),
            Repr::Big(b) => write!(f, "{}", b),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `p/q`, integers, and plain decimals such as `-12.375`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let t = s.trim();
        if t.is_empty() {
            return Err(err());
        }
        if let Some((p, q)) = t.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| err())?;
            let q: BigInt = q.trim().parse().map_err(|_| err())?;
            return Rational::from_bigints(p, q).ok_or_else(err);
        }
        if let Some((int, frac)) = t.split_once('.') {
            let negative = int.starts_with('-');
            let digits = int.trim_start_matches(['-', '+']);
            if frac.is_empty() && digits.is_empty()
                || !frac.chars().all(|c| c.is_ascii_digit())
                || !digits.chars().all(|c| c.is_ascii_digit())
            {
                return Err(err());
            }
            let whole: BigInt =
                format!("{}{}", if digits.is_empty() { "0" } else { digits }, frac).parse().map_err(|_| err())?;
            let scale = num_traits::pow(BigInt::from(10), frac.len());
            let r = Rational::from_bigints(whole, scale).ok_or_else(err)?;
            return Ok(if negative { -r } else { r });
        }
        let n: BigInt = t.parse().map_err(|_| err())?;
        Ok(Rational::from(n))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_fraction_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand for `Rational::new`.
pub fn q(numer: i64, denom: i64) -> Rational {
    Rational::new(numer, denom)
}

/// Least common multiple of the denominators, as a `BigInt`.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, v| acc.lcm(&v.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_all_literal_forms() {
        assert_eq!("3/6".parse::<Rational>().unwrap(), q(1, 2));
        assert_eq!("-4".parse::<Rational>().unwrap(), q(-4, 1));
        assert_eq!("1.25".parse::<Rational>().unwrap(), q(5, 4));
        assert_eq!("-0.5".parse::<Rational>().unwrap(), q(-1, 2));
        assert_eq!(".5".parse::<Rational>().unwrap(), q(1, 2));
        assert_eq!("2/-4".parse::<Rational>().unwrap(), q(-1, 2));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("abc".parse::<Rational>().is_err());
        assert!("1.2.3".parse::<Rational>().is_err());
        assert!("".parse::<Rational>().is_err());
    }

    #[test]
    fn fraction_string_keeps_unit_denominator() {
        assert_eq!(q(5, 1).to_fraction_string(), "5/1");
        assert_eq!(q(-6, 4).to_fraction_string(), "-3/2");
        assert_eq!(q(5, 1).to_string(), "5");
    }

    #[test]
    fn promotes_and_demotes_across_i128() {
        let big = Rational::from_integer(i64::MAX);
        let mut acc = Rational::one();
        for _ in 0..4 {
            acc = &acc * &big;
        }
        assert!(matches!(acc.0, Repr::Big(_)));
        let mut back = acc.clone();
        for _ in 0..4 {
            back = &back / &big;
        }
        assert_eq!(back, Rational::one());
        assert!(matches!(back.0, Repr::Small(_)));
        assert!(acc > big);
        assert!(-&acc < -&big);
    }

    #[test]
    fn floor_and_ceil() {
        assert_eq!(q(7, 2).floor(), BigInt::from(3));
        assert_eq!(q(-7, 2).floor(), BigInt::from(-4));
        assert_eq!(q(7, 2).ceil(), BigInt::from(4));
        assert_eq!(q(-7, 2).ceil(), BigInt::from(-3));
        assert_eq!(q(4, 1).ceil(), BigInt::from(4));
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (any::<i64>(), 1i64..=i64::MAX).prop_map(|(n, d)| q(n, d))
    }

    proptest! {
        #[test]
        fn add_then_sub_is_identity(a in arb_rational(), b in arb_rational()) {
            let s = &a + &b;
            prop_assert_eq!(&s - &b, a);
        }

        #[test]
        fn mul_then_div_is_identity(a in arb_rational(), b in arb_rational()) {
            prop_assume!(!b.is_zero());
            prop_assert_eq!(&(&a * &b) / &b, a);
        }

        #[test]
        fn ordering_matches_bigrational(a in arb_rational(), b in arb_rational()) {
            prop_assert_eq!(a.cmp(&b), a.to_big().cmp(&b.to_big()));
        }

        #[test]
        fn text_round_trip(a in arb_rational()) {
            prop_assert_eq!(a.to_fraction_string().parse::<Rational>().unwrap(), a);
        }
    }
}
