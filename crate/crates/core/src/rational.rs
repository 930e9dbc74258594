//! Exact complex rationals.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator/denominator individually overflow f64
        let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
        let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Largest `k / 2^bits` not exceeding `sqrt(r)`, for `r >= 0`.
pub fn sqrt_lower(r: &Rational, bits: u32) -> Rational {
    assert!(!r.is_negative(), "sqrt of negative rational");
    // sqrt(n/d) = sqrt(n*d)/d
    let nd = (r.numer() * r.denom()).to_biguint().unwrap_or_default();
    let scale = BigUint::one() << (2 * bits as usize);
    let root = (nd * scale).sqrt();
    BigRational::new(
        BigInt::from(root),
        r.denom().clone() << bits as usize,
    )
}

/// Smallest `k / 2^bits` not below `sqrt(r)`.
pub fn sqrt_upper(r: &Rational, bits: u32) -> Rational {
    let lo = sqrt_lower(r, bits);
    if &lo * &lo == *r {
        lo
    } else {
        lo + BigRational::new(BigInt::one(), r.denom().clone() << bits as usize)
    }
}

/// Renders a rational as `"a/b"` in lowest terms.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"a/b"`, `"a"` or a finite decimal such as `"0.25"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let d: BigInt = d.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let neg = whole.trim_start().starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let n: BigInt = digits.parse().map_err(|_| Error::Parse(format!("bad decimal {s:?}")))?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let r = BigRational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    Ok(BigRational::from_integer(n))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RationalComplex {
    pub re: Rational,
    pub im: Rational,
}

impl RationalComplex {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Self { re, im: Rational::zero() }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self::new(int(re), int(im))
    }

    pub fn i() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self::new(&self.re * r, &self.im * r)
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(to_f64(&self.re), to_f64(&self.im))
    }
}

impl Zero for RationalComplex {
    fn zero() -> Self {
        Self::new(Rational::zero(), Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for RationalComplex {
    fn one() -> Self {
        Self::real(Rational::one())
    }
}

impl From<Rational> for RationalComplex {
    fn from(r: Rational) -> Self {
        Self::real(r)
    }
}

impl From<i64> for RationalComplex {
    fn from(v: i64) -> Self {
        Self::from_ints(v, 0)
    }
}

impl<'a> Add<&'a RationalComplex> for &'a RationalComplex {
    type Output = RationalComplex;
    fn add(self, o: &RationalComplex) -> RationalComplex {
        RationalComplex::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Add for RationalComplex {
    type Output = RationalComplex;
    fn add(self, o: RationalComplex) -> RationalComplex {
        RationalComplex::new(self.re + o.re, self.im + o.im)
    }
}

impl AddAssign<&RationalComplex> for RationalComplex {
    fn add_assign(&mut self, o: &RationalComplex) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&RationalComplex> for RationalComplex {
    fn sub_assign(&mut self, o: &RationalComplex) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl<'a> Sub<&'a RationalComplex> for &'a RationalComplex {
    type Output = RationalComplex;
    fn sub(self, o: &RationalComplex) -> RationalComplex {
        RationalComplex::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl Sub for RationalComplex {
    type Output = RationalComplex;
    fn sub(self, o: RationalComplex) -> RationalComplex {
        RationalComplex::new(self.re - o.re, self.im - o.im)
    }
}

impl<'a> Mul<&'a RationalComplex> for &'a RationalComplex {
    type Output = RationalComplex;
    fn mul(self, o: &RationalComplex) -> RationalComplex {
        RationalComplex::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Mul for RationalComplex {
    type Output = RationalComplex;
    fn mul(self, o: RationalComplex) -> RationalComplex {
        &self * &o
    }
}

impl Neg for RationalComplex {
    type Output = RationalComplex;
    fn neg(self) -> RationalComplex {
        RationalComplex::new(-self.re, -self.im)
    }
}

impl fmt::Display for RationalComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else {
            write!(f, "({} + {}i)", self.re, self.im)
        }
    }
}

/// Serialized form `{"re": "a/b", "im": "c/d"}`; `im` may be omitted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexDoc {
    pub re: String,
    #[serde(default = "zero_string")]
    pub im: String,
}

fn zero_string() -> String {
    "0/1".to_string()
}

impl From<&RationalComplex> for ComplexDoc {
    fn from(c: &RationalComplex) -> Self {
        Self {
            re: format_rational(&c.re),
            im: format_rational(&c.im),
        }
    }
}

impl TryFrom<&ComplexDoc> for RationalComplex {
    type Error = Error;
    fn try_from(d: &ComplexDoc) -> Result<Self> {
        Ok(RationalComplex::new(parse_rational(&d.re)?, parse_rational(&d.im)?))
    }
}

impl FromStr for RationalComplex {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(RationalComplex::real(parse_rational(s)?))
    }
}
