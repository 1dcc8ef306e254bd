//! Numbers used by the exact and floating-point backends.
//!
//! `Surd` is an element of a multi-quadratic field: a finite sum of rational
//! multiples of square roots of distinct squarefree integers. Such sums are
//! linearly independent over the rationals, so the representation is canonical
//! and equality (in particular, equality with zero) is exact.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A parameter value. Values parsed from text ("1/3", "0.25", "2") are kept as
/// exact rationals alongside their floating-point value.
#[derive(Clone, Debug, PartialEq)]
pub struct Number {
    value: f64,
    exact: Option<BigRational>,
}

impl Number {
    pub fn float(value: f64) -> Self {
        Number { value, exact: None }
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Number::from_rational(BigRational::new(num.into(), den.into()))
    }

    pub fn int(v: i64) -> Self {
        Number::ratio(v, 1)
    }

    pub fn from_rational(r: BigRational) -> Self {
        Number {
            value: rational_to_f64(&r),
            exact: Some(r),
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact(&self) -> Option<&BigRational> {
        self.exact.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.parse()
    }

    fn combine(
        &self,
        other: &Number,
        f: impl Fn(f64, f64) -> f64,
        g: impl Fn(&BigRational, &BigRational) -> BigRational,
    ) -> Number {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Number::from_rational(g(a, b)),
            _ => Number::float(f(self.value, other.value)),
        }
    }

    pub fn add(&self, other: &Number) -> Number {
        self.combine(other, |a, b| a + b, |a, b| a + b)
    }

    pub fn sub(&self, other: &Number) -> Number {
        self.combine(other, |a, b| a - b, |a, b| a - b)
    }

    pub fn mul(&self, other: &Number) -> Number {
        self.combine(other, |a, b| a * b, |a, b| a * b)
    }

    pub fn div(&self, other: &Number) -> Number {
        self.combine(other, |a, b| a / b, |a, b| a / b)
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            Some(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            None => write!(f, "{}", self.value),
        }
    }
}

impl FromStr for Number {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a number: {s:?}"));
        if let Some((a, b)) = s.split_once('/') {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            return Ok(Number::from_rational(BigRational::new(a, b)));
        }
        if let Ok(i) = s.parse::<BigInt>() {
            return Ok(Number::from_rational(BigRational::from_integer(i)));
        }
        if let Some(r) = parse_decimal(s) {
            return Ok(Number::from_rational(r));
        }
        let v: f64 = s.parse().map_err(|_| bad())?;
        if !v.is_finite() {
            return Err(bad());
        }
        Ok(Number::float(v))
    }
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int_part, frac_part) = body.split_once('.')?;
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = BigRational::new(num, den);
    Some(if neg { -r } else { r })
}

impl From<f64> for Number {
    fn from(v: f64) -> Self {
        Number::float(v)
    }
}

impl Serialize for Number {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match &self.exact {
            Some(_) => serializer.serialize_str(&self.to_string()),
            None => serializer.serialize_f64(self.value),
        }
    }
}

impl<'de> Deserialize<'de> for Number {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(i) => Ok(Number::int(i)),
            Raw::Float(v) => Ok(Number::float(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    ToPrimitive::to_f64(r).unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Writes `x = m^2 * s` with `s` squarefree.
pub fn squarefree_split(mut x: u64) -> (u64, u64) {
    let mut m = 1u64;
    let mut s = 1u64;
    let mut p = 2u64;
    while p.saturating_mul(p) <= x && p < 2_000_000 {
        let mut e = 0;
        while x % p == 0 {
            x /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            m *= p;
        }
        if e % 2 == 1 {
            s *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if x > 1 {
        let r = x.sqrt();
        if r * r == x {
            m *= r;
        } else {
            s *= x;
        }
    }
    (m, s)
}

fn prime_factors(mut x: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= x {
        if x % p == 0 {
            out.push(p);
            while x % p == 0 {
                x /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if x > 1 {
        out.push(x);
    }
    out
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Surd {
    terms: BTreeMap<u64, BigRational>,
}

impl Surd {
    pub fn rational(r: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(1, r);
        }
        Surd { terms }
    }

    pub fn integer(v: i64) -> Self {
        Surd::rational(BigRational::from_integer(v.into()))
    }

    /// Square root of a non-negative rational.
    pub fn sqrt_rational(r: &BigRational) -> Result<Self> {
        if r.is_negative() {
            return Err(Error::Inexact(format!("square root of negative {r}")));
        }
        if r.is_zero() {
            return Ok(Surd::default());
        }
        let prod = r.numer() * r.denom();
        let Some(prod) = prod.to_u64() else {
            return Err(Error::Inexact(format!("radicand of sqrt({r}) exceeds 64 bits")));
        };
        let (m, s) = squarefree_split(prod);
        let coef = BigRational::new(BigInt::from(m), r.denom().clone());
        let mut terms = BTreeMap::new();
        terms.insert(s, coef);
        Ok(Surd { terms })
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(<BigRational as Zero>::zero()),
            1 => self.terms.get(&1).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &BigRational)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(rad, c)| rational_to_f64(c) * (*rad as f64).sqrt())
            .sum()
    }

    fn add_term(&mut self, rad: u64, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(rad).or_insert_with(<BigRational as Zero>::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&rad);
        }
    }

    fn checked_mul(&self, other: &Surd) -> Result<Surd> {
        let mut out = Surd::default();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let g = a.gcd(b);
                let rad = (*a as u128 / g as u128) * (*b as u128 / g as u128);
                let rad = u64::try_from(rad).map_err(|_| Error::Inexact("radicand product exceeds 64 bits".into()))?;
                out.add_term(rad, ca * cb * BigRational::from_integer(g.into()));
            }
        }
        Ok(out)
    }

    fn primes(&self) -> BTreeSet<u64> {
        self.terms.keys().flat_map(|r| prime_factors(*r)).collect()
    }

    fn conjugate(&self, p: u64) -> Surd {
        let terms = self
            .terms
            .iter()
            .map(|(r, c)| (*r, if r % p == 0 { -c.clone() } else { c.clone() }))
            .collect();
        Surd { terms }
    }

    pub fn checked_inverse(&self) -> Result<Surd> {
        if self.is_zero() {
            return Err(Error::Invalid("division by zero".into()));
        }
        let mut num = Surd::integer(1);
        let mut cur = self.clone();
        for p in self.primes() {
            let c = cur.conjugate(p);
            num = num.checked_mul(&c)?;
            cur = cur.checked_mul(&c)?;
        }
        let norm = cur.as_rational().expect("product over all conjugates is rational");
        Ok(num.scale(&norm.recip()))
    }

    pub fn scale(&self, r: &BigRational) -> Surd {
        if r.is_zero() {
            return Surd::default();
        }
        let terms = self.terms.iter().map(|(k, v)| (*k, v * r)).collect();
        Surd { terms }
    }
}

impl fmt::Debug for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (rad, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if *rad == 1 {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c})*sqrt({rad})")?;
            }
        }
        Ok(())
    }
}

impl Add for Surd {
    type Output = Surd;
    fn add(mut self, rhs: Surd) -> Surd {
        for (r, c) in rhs.terms {
            self.add_term(r, c);
        }
        self
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, rhs: Surd) -> Surd {
        self + (-rhs)
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        let terms = self.terms.into_iter().map(|(k, v)| (k, -v)).collect();
        Surd { terms }
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, rhs: Surd) -> Surd {
        self.checked_mul(&rhs).expect("surd radicand overflow")
    }
}

impl Div for Surd {
    type Output = Surd;
    fn div(self, rhs: Surd) -> Surd {
        let inv = rhs.checked_inverse().expect("surd division");
        self * inv
    }
}

impl Sum for Surd {
    fn sum<I: Iterator<Item = Surd>>(iter: I) -> Surd {
        iter.fold(Surd::default(), |a, b| a + b)
    }
}

/// Arithmetic shared by the exact (`Surd`) and floating-point (`f64`) backends.
pub trait Scalar:
    Clone
    + fmt::Debug
    + Send
    + Sync
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_number(x: &Number) -> Result<Self>;
    fn sqrt(&self) -> Result<Self>;
    fn to_f64(&self) -> f64;
    /// Exact zero test for the exact backend, `|x| <= tol` otherwise.
    fn near_zero(&self, tol: f64) -> bool;

    fn powi(&self, e: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..e {
            out = out * self.clone();
        }
        out
    }

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_number(x: &Number) -> Result<Self> {
        Ok(x.value())
    }
    fn sqrt(&self) -> Result<Self> {
        if *self < 0.0 {
            return Err(Error::Invalid(format!("square root of negative {self}")));
        }
        Ok(f64::sqrt(*self))
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn near_zero(&self, tol: f64) -> bool {
        self.abs() <= tol
    }
}

impl Scalar for Surd {
    const EXACT: bool = true;

    fn zero() -> Self {
        Surd::default()
    }
    fn one() -> Self {
        Surd::integer(1)
    }
    fn from_i64(v: i64) -> Self {
        Surd::integer(v)
    }
    fn from_number(x: &Number) -> Result<Self> {
        x.exact()
            .map(|r| Surd::rational(r.clone()))
            .ok_or_else(|| Error::Inexact(format!("parameter {} is not an exact rational", x.value())))
    }
    fn sqrt(&self) -> Result<Self> {
        match self.as_rational() {
            Some(r) => Surd::sqrt_rational(&r),
            None => Err(Error::Inexact(format!("square root of irrational {self}"))),
        }
    }
    fn to_f64(&self) -> f64 {
        Surd::to_f64(self)
    }
    fn near_zero(&self, _tol: f64) -> bool {
        self.is_zero()
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(v.into())
    }
    fn from_number(x: &Number) -> Result<Self> {
        x.exact()
            .cloned()
            .ok_or_else(|| Error::Inexact(format!("parameter {} is not an exact rational", x.value())))
    }
    fn sqrt(&self) -> Result<Self> {
        let s = Surd::sqrt_rational(self)?;
        s.as_rational()
            .ok_or_else(|| Error::Inexact(format!("sqrt({self}) is irrational")))
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn near_zero(&self, _tol: f64) -> bool {
        self.is_zero()
    }
}
