//! Exact arithmetic and ordering in real quadratic fields `Q(√D)`.
//!
//! Every coordinate, length, twist and modulus handled by this crate is a
//! [`QuadElem`]: a value `a + b·√D` with arbitrary-precision rational `a`, `b`
//! and a square-free `D ≥ 2`. Elements of different fields never mix; the
//! checked operations report [`QFieldError::FieldMismatch`] and the operator
//! impls panic, since surfaces validate that all their coordinates share one
//! field before any arithmetic happens.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeTuple;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QFieldError {
    #[error("invalid field parameter D = {0}: expected a square-free integer >= 2")]
    InvalidField(String),
    #[error("field mismatch: Q(sqrt {left}) combined with Q(sqrt {right})")]
    FieldMismatch { left: u64, right: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("malformed field element: {0}")]
    Malformed(String),
}

/// `true` iff `d` is square-free and in `2..2^31`.
pub fn is_valid_field(d: i64) -> bool {
    if !(2..=i32::MAX as i64).contains(&d) {
        return false;
    }
    let mut n = d;
    let mut p = 2i64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// An element `a + b·√D` of the real quadratic field `Q(√D)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QuadElem {
    a: Rational,
    b: Rational,
    d: u64,
}

impl QuadElem {
    pub fn new(a: Rational, b: Rational, d: i64) -> Result<Self, QFieldError> {
        if !is_valid_field(d) {
            return Err(QFieldError::InvalidField(d.to_string()));
        }
        Ok(Self::raw(a, b, d as u64))
    }

    /// Builds an element without re-checking `d`. Callers guarantee `d` is a
    /// valid field parameter (it came from an existing element).
    fn raw(a: Rational, b: Rational, d: u64) -> Self {
        QuadElem { a, b, d }
    }

    pub fn zero(d: u64) -> Self {
        Self::raw(Rational::zero(), Rational::zero(), d)
    }

    pub fn one(d: u64) -> Self {
        Self::raw(Rational::one(), Rational::zero(), d)
    }

    /// The rational number `r` seen as an element of `Q(√d)`.
    pub fn rational(r: Rational, d: u64) -> Self {
        Self::raw(r, Rational::zero(), d)
    }

    pub fn int(n: i64, d: u64) -> Self {
        Self::rational(Rational::from_integer(BigInt::from(n)), d)
    }

    pub fn frac(num: i64, den: i64, d: u64) -> Self {
        Self::rational(rat(num, den), d)
    }

    /// `√d` itself.
    pub fn sqrt_d(d: u64) -> Self {
        Self::raw(Rational::zero(), Rational::one(), d)
    }

    /// Shorthand for `(a_num/a_den) + (b_num/b_den)·√d` with small integers.
    pub fn from_parts(a_num: i64, a_den: i64, b_num: i64, b_den: i64, d: u64) -> Self {
        Self::raw(rat(a_num, a_den), rat(b_num, b_den), d)
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn field(&self) -> u64 {
        self.d
    }

    /// Same value, reinterpreted in another field. Only valid for rationals.
    pub fn with_field(&self, d: u64) -> Option<Self> {
        if self.is_rational() {
            Some(Self::rational(self.a.clone(), d))
        } else if self.d == d {
            Some(self.clone())
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Galois conjugate `a − b·√D`.
    pub fn conjugate(&self) -> Self {
        Self::raw(self.a.clone(), -&self.b, self.d)
    }

    /// Field norm `a² − D·b²`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - self.d_rat() * &self.b * &self.b
    }

    fn d_rat(&self) -> Rational {
        Rational::from_integer(BigInt::from(self.d))
    }

    fn check(&self, other: &Self) -> Result<(), QFieldError> {
        if self.d == other.d {
            Ok(())
        } else {
            Err(QFieldError::FieldMismatch {
                left: self.d,
                right: other.d,
            })
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, QFieldError> {
        self.check(other)?;
        Ok(Self::raw(&self.a + &other.a, &self.b + &other.b, self.d))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, QFieldError> {
        self.check(other)?;
        Ok(Self::raw(&self.a - &other.a, &self.b - &other.b, self.d))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, QFieldError> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        if self.b.is_zero() {
            return Self::raw(&self.a * &other.a, &self.a * &other.b, self.d);
        }
        if other.b.is_zero() {
            return Self::raw(&self.a * &other.a, &self.b * &other.a, self.d);
        }
        let a = &self.a * &other.a + self.d_rat() * &self.b * &other.b;
        let b = &self.a * &other.b + &self.b * &other.a;
        Self::raw(a, b, self.d)
    }

    /// Multiplicative inverse via `(a + b√D)⁻¹ = (a − b√D)/(a² − D b²)`.
    pub fn inv(&self) -> Result<Self, QFieldError> {
        if self.is_zero() {
            return Err(QFieldError::DivisionByZero);
        }
        if self.b.is_zero() {
            return Ok(Self::rational(self.a.recip(), self.d));
        }
        let n = self.norm();
        Ok(Self::raw(&self.a / &n, -&self.b / &n, self.d))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, QFieldError> {
        self.check(other)?;
        if other.b.is_zero() {
            if other.a.is_zero() {
                return Err(QFieldError::DivisionByZero);
            }
            return Ok(Self::raw(&self.a / &other.a, &self.b / &other.a, self.d));
        }
        Ok(self.mul_unchecked(&other.inv()?))
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self::raw(&self.a * r, &self.b * r, self.d)
    }

    /// Sign of the real number `a + b√D`, decided with rational arithmetic
    /// only: when `a` and `b` disagree in sign, compare `a²` against `D·b²`.
    pub fn signum(&self) -> i8 {
        let sa = rsign(&self.a);
        let sb = rsign(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let db2 = self.d_rat() * &self.b * &self.b;
        match a2.cmp(&db2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn try_cmp(&self, other: &Self) -> Result<Ordering, QFieldError> {
        self.check(other)?;
        if self.b == other.b {
            return Ok(self.a.cmp(&other.a));
        }
        Ok(match (self - other).signum() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        })
    }

    /// Ordering of real values. Panics on mismatched fields.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        self.try_cmp(other)
            .expect("compared elements of different fields")
    }

    pub fn max_value<'a>(&'a self, other: &'a Self) -> &'a Self {
        if self.cmp_value(other) == Ordering::Less {
            other
        } else {
            self
        }
    }

    pub fn min_value<'a>(&'a self, other: &'a Self) -> &'a Self {
        if self.cmp_value(other) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    /// Exact `⌊self⌋`.
    pub fn floor(&self) -> BigInt {
        let base = self.a.floor().to_integer();
        let irr = if self.b.is_zero() {
            BigInt::zero()
        } else {
            // ⌊√r⌋ = ⌊√⌊r⌋⌋ for rational r ≥ 0
            let r = &self.b * &self.b * self.d_rat();
            let root = r.floor().to_integer().sqrt();
            if self.b.is_positive() {
                root
            } else {
                -root - BigInt::one()
            }
        };
        // the two floors are each within one of the truth; settle exactly
        let mut n = base + irr;
        loop {
            let diff = self - &QuadElem::rational(Rational::from_integer(n.clone()), self.d);
            if diff.is_negative() {
                n -= 1;
            } else if (diff - QuadElem::one(self.d)).signum() >= 0 {
                n += 1;
            } else {
                return n;
            }
        }
    }

    /// Floating approximation, obtained from an exact floor at scale 2⁶⁴ so
    /// that cancellation between `a` and `b√D` cannot lose precision.
    pub fn to_f64(&self) -> f64 {
        let scale = Rational::from_integer(BigInt::one() << 64u32);
        let scaled = self.scale(&scale).floor();
        let f = scaled.to_f64().unwrap_or(f64::NAN);
        f / 18446744073709551616.0
    }

    /// Encoding `[a_num, a_den, b_num, b_den, D]`.
    pub fn to_parts(&self) -> [BigInt; 5] {
        [
            self.a.numer().clone(),
            self.a.denom().clone(),
            self.b.numer().clone(),
            self.b.denom().clone(),
            BigInt::from(self.d),
        ]
    }

    pub fn from_big_parts(parts: &[BigInt; 5]) -> Result<Self, QFieldError> {
        if parts[1].is_zero() || parts[3].is_zero() {
            return Err(QFieldError::Malformed("zero denominator".into()));
        }
        let d = parts[4]
            .to_i64()
            .ok_or_else(|| QFieldError::InvalidField(parts[4].to_string()))?;
        QuadElem::new(
            Rational::new(parts[0].clone(), parts[1].clone()),
            Rational::new(parts[2].clone(), parts[3].clone()),
            d,
        )
    }
}

fn rsign(r: &Rational) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

impl PartialOrd for QuadElem {
    /// `None` across fields, so mixed-field comparisons are never ordered.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.try_cmp(other).ok()
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<'a> $trait<&'a QuadElem> for &'a QuadElem {
            type Output = QuadElem;
            fn $method(self, rhs: &'a QuadElem) -> QuadElem {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $trait<QuadElem> for QuadElem {
            type Output = QuadElem;
            fn $method(self, rhs: QuadElem) -> QuadElem {
                (&self).$checked(&rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl<'a> $trait<&'a QuadElem> for QuadElem {
            type Output = QuadElem;
            fn $method(self, rhs: &'a QuadElem) -> QuadElem {
                (&self).$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl<'a> $trait<QuadElem> for &'a QuadElem {
            type Output = QuadElem;
            fn $method(self, rhs: QuadElem) -> QuadElem {
                self.$checked(&rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);
forward_binop!(Div, div, try_div);

impl Neg for QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        QuadElem::raw(-self.a, -self.b, self.d)
    }
}

impl Neg for &QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        QuadElem::raw(-&self.a, -&self.b, self.d)
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let surd = if self.b.is_one() {
            format!("sqrt({})", self.d)
        } else if (-&self.b).is_one() {
            format!("-sqrt({})", self.d)
        } else {
            format!("{}*sqrt({})", self.b, self.d)
        };
        if self.a.is_zero() {
            write!(f, "{surd}")
        } else if let Some(rest) = surd.strip_prefix('-') {
            write!(f, "{} - {}", self.a, rest)
        } else {
            write!(f, "{} + {}", self.a, surd)
        }
    }
}

/// Parses the human-readable forms printed by `Display`: `p/q`,
/// `p/q*sqrt(D)`, `sqrt(D)`, `p/q + r/s*sqrt(D)` and `p/q - sqrt(D)`.
/// Purely rational input needs a field, supplied as `default_field`.
pub fn parse_quad(s: &str, default_field: Option<u64>) -> Result<QuadElem, QFieldError> {
    let bad = || QFieldError::Malformed(format!("cannot parse {s:?}"));
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(bad());
    }
    // split into signed terms
    let mut terms: Vec<String> = Vec::new();
    let mut cur = String::new();
    for (i, c) in compact.chars().enumerate() {
        if (c == '+' || c == '-') && i > 0 && !cur.ends_with('(') && !cur.is_empty() {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(c);
    }
    terms.push(cur);
    if terms.len() > 2 {
        return Err(bad());
    }
    let mut a = Rational::zero();
    let mut b = Rational::zero();
    let mut field: Option<u64> = None;
    let mut seen_rational = false;
    for term in terms {
        if let Some(pos) = term.find("sqrt(") {
            if field.is_some() || !term.ends_with(')') {
                return Err(bad());
            }
            let inner = &term[pos + 5..term.len() - 1];
            let d: i64 = inner.parse().map_err(|_| bad())?;
            if !is_valid_field(d) {
                return Err(QFieldError::InvalidField(inner.to_string()));
            }
            field = Some(d as u64);
            let coeff = &term[..pos];
            b = match coeff {
                "" | "+" => Rational::one(),
                "-" => -Rational::one(),
                c => parse_rational(c.strip_suffix('*').ok_or_else(bad)?).ok_or_else(bad)?,
            };
        } else {
            if seen_rational {
                return Err(bad());
            }
            seen_rational = true;
            a = parse_rational(&term).ok_or_else(bad)?;
        }
    }
    let d = match (field, default_field) {
        (Some(f), Some(g)) if f != g => return Err(QFieldError::FieldMismatch { left: f, right: g }),
        (Some(f), _) => f,
        (None, Some(g)) => g,
        (None, None) => return Err(bad()),
    };
    Ok(QuadElem::raw(a, b, d))
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.strip_prefix('+').unwrap_or(s);
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n).ok()?;
    let d = BigInt::from_str(d).ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

// --- serde: the five-integer array encoding -------------------------------

pub(crate) fn serialize_bigint_element<S: SerializeTuple>(seq: &mut S, v: &BigInt) -> Result<(), S::Error> {
    match v.to_i64() {
        Some(x) => seq.serialize_element(&x),
        None => {
            let n: serde_json::Number = v
                .to_string()
                .parse()
                .map_err(|_| serde::ser::Error::custom("unrepresentable integer"))?;
            seq.serialize_element(&n)
        }
    }
}

pub(crate) fn number_to_bigint(n: &serde_json::Number) -> Option<BigInt> {
    let s = n.to_string();
    if s.contains(['.', 'e', 'E']) {
        return None;
    }
    BigInt::from_str(&s).ok()
}

impl Serialize for QuadElem {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_tuple(5)?;
        for part in self.to_parts().iter() {
            serialize_bigint_element(&mut seq, part)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for QuadElem {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct QeVisitor;
        impl<'de> Visitor<'de> for QeVisitor {
            type Value = QuadElem;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an array [a_num, a_den, b_num, b_den, D] of integers")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<QuadElem, A::Error> {
                let mut parts: Vec<BigInt> = Vec::with_capacity(5);
                while let Some(n) = seq.next_element::<serde_json::Number>()? {
                    if parts.len() == 5 {
                        return Err(de::Error::invalid_length(6, &self));
                    }
                    parts.push(
                        number_to_bigint(&n).ok_or_else(|| de::Error::custom(format!("non-integer {n}")))?,
                    );
                }
                let parts: [BigInt; 5] = parts
                    .try_into()
                    .map_err(|v: Vec<BigInt>| de::Error::invalid_length(v.len(), &self))?;
                QuadElem::from_big_parts(&parts).map_err(de::Error::custom)
            }
        }
        deserializer.deserialize_seq(QeVisitor)
    }
}
