//! The base field: Gaussian rationals a + b·i with both parts kept in lowest
//! terms and positive denominators.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num::bigint::BigInt;
use num::complex::Complex;
use num::rational::BigRational;
use num::{One, Zero};
use rand::Rng;
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of ℚ(i). Arithmetic is exact; the rational parts are always
/// reduced with positive denominator (maintained by the backing type).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar(Complex<BigRational>);

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Scalar(Complex::new(re, im))
    }

    pub fn zero() -> Self {
        Scalar(Complex::new(BigRational::zero(), BigRational::zero()))
    }

    pub fn one() -> Self {
        Scalar(Complex::new(BigRational::one(), BigRational::zero()))
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Scalar(Complex::new(BigRational::zero(), BigRational::one()))
    }

    pub fn from_int(v: i64) -> Self {
        Scalar(Complex::new(
            BigRational::from_integer(BigInt::from(v)),
            BigRational::zero(),
        ))
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Scalar(Complex::new(BigRational::from_integer(v), BigRational::zero()))
    }

    /// The rational n/d. Panics if d = 0.
    pub fn ratio(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Scalar(Complex::new(
            BigRational::new(BigInt::from(n), BigInt::from(d)),
            BigRational::zero(),
        ))
    }

    /// re_n/re_d + (im_n/im_d)·i. Panics on zero denominators.
    pub fn gauss(re_n: i64, re_d: i64, im_n: i64, im_d: i64) -> Self {
        assert!(re_d != 0 && im_d != 0, "zero denominator");
        Scalar(Complex::new(
            BigRational::new(BigInt::from(re_n), BigInt::from(re_d)),
            BigRational::new(BigInt::from(im_n), BigInt::from(im_d)),
        ))
    }

    pub fn re(&self) -> &BigRational {
        &self.0.re
    }

    pub fn im(&self) -> &BigRational {
        &self.0.im
    }

    pub fn is_zero(&self) -> bool {
        self.0.re.is_zero() && self.0.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.re.is_one() && self.0.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.0.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Scalar(self.0.conj())
    }

    /// |z|² = re² + im², a nonnegative rational.
    pub fn norm_sqr(&self) -> BigRational {
        self.0.norm_sqr()
    }

    /// Multiplicative inverse. Panics on zero (callers guard).
    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero scalar");
        Scalar(Complex::new(BigRational::one(), BigRational::zero()) / self.0.clone())
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Scalar::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Square root in ℚ(i), if one exists. Of the two roots an arbitrary but
    /// deterministic one is returned.
    pub fn sqrt_exact(&self) -> Option<Scalar> {
        if self.is_zero() {
            return Some(Scalar::zero());
        }
        // (c + d·i)² = a + b·i means c² − d² = a and 2cd = b, so c² + d² must
        // be the rational square root of a² + b².
        let n2 = self.norm_sqr();
        let n = rational_sqrt(&n2)?;
        let two = BigRational::from_integer(BigInt::from(2));
        let c2 = (self.re() + &n) / &two;
        if let Some(c) = rational_sqrt(&c2) {
            if !c.is_zero() {
                let d = self.im() / (&c * &two);
                return Some(Scalar::new(c, d));
            }
        }
        // c = 0 forces a pure-imaginary root: −d² = a, b = 0.
        let d2 = (&n - self.re()) / &two;
        let d = rational_sqrt(&d2)?;
        let cand = Scalar::new(BigRational::zero(), d);
        if &(&cand * &cand) == self {
            Some(cand)
        } else {
            None
        }
    }

    /// Small random rational, for seeded free-value draws.
    pub fn random_small<R: Rng>(rng: &mut R) -> Self {
        let n = rng.gen_range(-9i64..=9);
        let d = rng.gen_range(1i64..=3);
        Scalar::ratio(n, d)
    }

    /// Small random Gaussian rational (imaginary part present one time in three).
    pub fn random_small_gauss<R: Rng>(rng: &mut R) -> Self {
        let re = Self::random_small(rng);
        if rng.gen_range(0u8..3) == 0 {
            let n = rng.gen_range(-9i64..=9);
            let d = rng.gen_range(1i64..=3);
            &re + &(&Scalar::ratio(n, d) * &Scalar::i())
        } else {
            re
        }
    }
}

/// Rational square root, if the argument is a perfect square.
fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    use num::Signed;
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// n choose k as a big integer (zero when k > n).
pub fn binom_big(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    num::integer::binomial(BigInt::from(n), BigInt::from(k))
}

/// Falling factorial n·(n−1)⋯(n−k+1) (zero when k > n).
pub fn falling_big(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for t in 0..k {
        acc *= BigInt::from(n - t);
    }
    acc
}

pub fn factorial_big(k: usize) -> BigInt {
    falling_big(k, k)
}

/// Renders a rational as "p" or "p/q".
pub fn rational_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses "p" or "p/q" (reduced on the way in).
pub fn parse_rational(s: &str) -> Result<BigRational> {
    BigRational::from_str(s.trim())
        .map_err(|e| Error::InvalidInput(format!("bad rational {s:?}: {e}")))
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use num::Signed;
        let re = self.re();
        let im = self.im();
        if im.is_zero() {
            return write!(f, "{}", rational_to_string(re));
        }
        let im_part = |r: &BigRational| -> String {
            if r.is_one() {
                "i".to_string()
            } else if (-r).is_one() {
                "-i".to_string()
            } else {
                format!("{}i", rational_to_string(r))
            }
        };
        if re.is_zero() {
            return write!(f, "{}", im_part(im));
        }
        if im.is_negative() {
            write!(f, "{}-{}", rational_to_string(re), im_part(&-im).trim_start_matches('-'))
        } else {
            write!(f, "{}+{}", rational_to_string(re), im_part(im))
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Parses a plain rational "p/q". Imaginary parts enter via the
    /// two-element JSON form.
    fn from_str(s: &str) -> Result<Self> {
        Ok(Scalar::new(parse_rational(s)?, BigRational::zero()))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                Scalar(self.0.clone().$method(rhs.0.clone()))
            }
        }
        impl<'a> $trait<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                Scalar(self.0.$method(rhs.0.clone()))
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar(self.0.clone().$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "division by zero scalar");
        Scalar(self.0 / rhs.0)
    }
}
impl<'a> Div<&'a Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &'a Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "division by zero scalar");
        Scalar(self.0.clone() / rhs.0.clone())
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}
impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0.clone())
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.0 = self.0.clone() + rhs.0.clone();
    }
}
impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.0 = self.0.clone() - rhs.0.clone();
    }
}
impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        self.0 = self.0.clone() * rhs.0.clone();
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

impl Serialize for Scalar {
    /// A real scalar serializes to "p/q"; a complex one to ["p/q", "r/s"].
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_real() {
            serializer.serialize_str(&rational_to_string(self.re()))
        } else {
            let mut seq = serializer.serialize_seq(Some(2))?;
            seq.serialize_element(&rational_to_string(self.re()))?;
            seq.serialize_element(&rational_to_string(self.im()))?;
            seq.end()
        }
    }
}

struct ScalarVisitor;

impl<'de> Visitor<'de> for ScalarVisitor {
    type Value = Scalar;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer, a rational string \"p/q\", or a two-element array [re, im]")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Scalar, E> {
        Ok(Scalar::from_int(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Scalar, E> {
        Ok(Scalar::from_bigint(BigInt::from(v)))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Scalar, E> {
        Scalar::from_str(v).map_err(E::custom)
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Scalar, A::Error> {
        let re: RationalRepr = seq
            .next_element()?
            .ok_or_else(|| de::Error::invalid_length(0, &self))?;
        let im: RationalRepr = seq
            .next_element()?
            .ok_or_else(|| de::Error::invalid_length(1, &self))?;
        if seq.next_element::<serde::de::IgnoredAny>()?.is_some() {
            return Err(de::Error::invalid_length(3, &self));
        }
        Ok(Scalar::new(re.0, im.0))
    }
}

/// One rational inside the array form: integer or "p/q" string.
struct RationalRepr(BigRational);

impl<'de> Deserialize<'de> for RationalRepr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = RationalRepr;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a rational string \"p/q\"")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<RationalRepr, E> {
                Ok(RationalRepr(BigRational::from_integer(BigInt::from(v))))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<RationalRepr, E> {
                Ok(RationalRepr(BigRational::from_integer(BigInt::from(v))))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<RationalRepr, E> {
                parse_rational(v).map(RationalRepr).map_err(E::custom)
            }
        }
        deserializer.deserialize_any(V)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        deserializer.deserialize_any(ScalarVisitor)
    }
}
