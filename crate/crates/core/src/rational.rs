//! Exact rational numbers.
//!
//! A thin newtype over `Ratio<i128>`. Every operation is checked and panics
//! with "rational overflow" instead of wrapping. Values met at desk scale are
//! small (determinants of 0/1 matrices, denominators of switch rates).

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(Ratio<i128>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {0:?} as a rational (expected \"p/q\" or an integer)")]
pub struct ParseRationalError(pub String);

const OVERFLOW: &str = "rational overflow";

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));
    pub const ONE: Rational = Rational(Ratio::new_raw(1, 1));

    /// Panics if `den == 0`.
    pub fn new(num: i128, den: i128) -> Self {
        assert!(den != 0, "zero denominator");
        Rational(Ratio::new(num, den))
    }

    pub fn from_int(n: i128) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rational(self.0.recip())
    }

    /// Largest integer not above `self`.
    pub fn floor(&self) -> i128 {
        Integer::div_floor(&self.numer(), &self.denom())
    }

    pub fn ceil(&self) -> i128 {
        Integer::div_ceil(&self.numer(), &self.denom())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Closest rational with denominator at most `max_den`, found by a
    /// Stern-Brocot walk. Used to turn CLI floats such as `0.95` into exact
    /// values.
    pub fn approximate(x: f64, max_den: i128) -> Self {
        assert!(x.is_finite(), "cannot approximate a non-finite value");
        let neg = x < 0.0;
        let x = x.abs();
        let whole = x.floor();
        let frac = x - whole;
        let (mut a, mut b) = ((0i128, 1i128), (1i128, 1i128));
        let mut best = if frac < 0.5 { a } else { b };
        loop {
            let m = (a.0 + b.0, a.1 + b.1);
            if m.1 > max_den {
                break;
            }
            let mv = m.0 as f64 / m.1 as f64;
            if (mv - frac).abs() < (best.0 as f64 / best.1 as f64 - frac).abs() {
                best = m;
            }
            if mv == frac {
                break;
            }
            if mv < frac {
                a = m;
            } else {
                b = m;
            }
        }
        let r = Rational::new(best.0, best.1) + Rational::from_int(whole as i128);
        if neg {
            -r
        } else {
            r
        }
    }
}

/// Least common multiple of the denominators.
pub fn lcm_denominators<'a, I: IntoIterator<Item = &'a Rational>>(values: I) -> i128 {
    values.into_iter().fold(1i128, |acc, r| {
        let d = r.denom();
        let g = acc.gcd(&d);
        (acc / g).checked_mul(d).expect(OVERFLOW)
    })
}

impl From<i128> for Rational {
    fn from(n: i128) -> Self {
        Rational::from_int(n)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n as i128)
    }
}

impl From<usize> for Rational {
    fn from(n: usize) -> Self {
        Rational::from_int(n as i128)
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Self) -> Self {
        Rational(self.0.checked_add(&rhs.0).expect(OVERFLOW))
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Self) -> Self {
        Rational(self.0.checked_sub(&rhs.0).expect(OVERFLOW))
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Self) -> Self {
        Rational(self.0.checked_mul(&rhs.0).expect(OVERFLOW))
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Self) -> Self {
        assert!(!rhs.is_zero(), "division by zero");
        Rational(self.0.checked_div(&rhs.0).expect(OVERFLOW))
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Self {
        Rational(-self.0)
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for Rational {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Rational::ZERO, |a, b| a + b)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::ZERO, |a, b| a + *b)
    }
}

impl PartialEq<i128> for Rational {
    fn eq(&self, other: &i128) -> bool {
        self.0 == Ratio::from_integer(*other)
    }
}

impl PartialOrd<i128> for Rational {
    fn partial_cmp(&self, other: &i128) -> Option<Ordering> {
        self.0.partial_cmp(&Ratio::from_integer(*other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
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
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let t = s.trim();
        match t.split_once('/') {
            Some((p, q)) => {
                let p: i128 = p.trim().parse().map_err(|_| err())?;
                let q: i128 = q.trim().parse().map_err(|_| err())?;
                if q == 0 {
                    return Err(err());
                }
                Ok(Rational::new(p, q))
            }
            None => t.parse::<i128>().map(Rational::from_int).map_err(|_| err()),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational::ZERO
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational::ONE
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i128, q: i128) -> Rational {
        Rational::new(p, q)
    }

    #[test]
    fn arithmetic_normalizes() {
        assert_eq!(r(1, 2) + r(1, 3), r(5, 6));
        assert_eq!(r(2, 4), r(1, 2));
        assert_eq!(r(3, 4) * r(2, 3), r(1, 2));
        assert_eq!(r(1, 2) / r(1, 4), Rational::from_int(2));
        assert_eq!(r(-1, -2), r(1, 2));
    }

    #[test]
    fn display_and_parse_round_trip() {
        for s in ["5/4", "1", "0", "-7/3", "2/9"] {
            let v: Rational = s.parse().unwrap();
            assert_eq!(v.to_string(), s);
        }
        assert_eq!("4/8".parse::<Rational>().unwrap().to_string(), "1/2");
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
    }

    #[test]
    fn floor_and_ceil() {
        assert_eq!(r(7, 2).floor(), 3);
        assert_eq!(r(7, 2).ceil(), 4);
        assert_eq!(r(-7, 2).floor(), -4);
        assert_eq!(r(4, 2).ceil(), 2);
    }

    #[test]
    fn lcm_of_denominators() {
        assert_eq!(lcm_denominators(&[r(1, 4), r(1, 6), r(2, 1)]), 12);
        assert_eq!(lcm_denominators(&[]), 1);
    }

    #[test]
    fn approximate_recovers_short_fractions() {
        assert_eq!(Rational::approximate(0.95, 1000), r(19, 20));
        assert_eq!(Rational::approximate(0.005, 1000), r(1, 200));
        assert_eq!(Rational::approximate(1.1, 1000), r(11, 10));
        assert_eq!(Rational::approximate(-0.25, 100), r(-1, 4));
    }

    #[test]
    #[should_panic(expected = "rational overflow")]
    fn overflow_panics() {
        let big = Rational::from_int(i128::MAX / 2);
        let _ = big * big;
    }
}
