//! Integer coordinates `(A + B√D) / N` with one denominator `N` for a whole
//! surface. Horizontal tracing only adds and compares heights, so it can run
//! on machine integers and fall back to big integers on overflow.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Signed, ToPrimitive, Zero};

use crate::qfield::{QuadElem, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Overflow;

pub(crate) trait Int:
    Clone + Debug + Eq + Hash + Ord + Zero + Signed + CheckedAdd + CheckedSub + CheckedMul
{
    fn from_big(x: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
}

impl Int for i128 {
    fn from_big(x: &BigInt) -> Option<Self> {
        x.to_i128()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Int for BigInt {
    fn from_big(x: &BigInt) -> Option<Self> {
        Some(x.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Z2<I> {
    pub a: I,
    pub b: I,
}

impl<I: Int> Z2<I> {
    pub fn checked_add(&self, o: &Self) -> Result<Self, Overflow> {
        Ok(Z2 {
            a: self.a.checked_add(&o.a).ok_or(Overflow)?,
            b: self.b.checked_add(&o.b).ok_or(Overflow)?,
        })
    }

    fn sign(&self, d: &I) -> Result<i8, Overflow> {
        let sg = |x: &I| -> i8 {
            if x.is_positive() {
                1
            } else if x.is_negative() {
                -1
            } else {
                0
            }
        };
        let (sa, sb) = (sg(&self.a), sg(&self.b));
        if sb == 0 {
            return Ok(sa);
        }
        if sa == 0 || sa == sb {
            return Ok(sb);
        }
        let a2 = self.a.checked_mul(&self.a).ok_or(Overflow)?;
        let db2 = d
            .checked_mul(&self.b)
            .and_then(|x| x.checked_mul(&self.b))
            .ok_or(Overflow)?;
        Ok(match a2.cmp(&db2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        })
    }

    pub fn cmp(&self, o: &Self, d: &I) -> Result<Ordering, Overflow> {
        if self == o {
            return Ok(Ordering::Equal);
        }
        let diff = Z2 {
            a: self.a.checked_sub(&o.a).ok_or(Overflow)?,
            b: self.b.checked_sub(&o.b).ok_or(Overflow)?,
        };
        Ok(diff.sign(d)?.cmp(&0))
    }
}

/// Scale factor turning every given element into an element of `Z[√D]`.
pub(crate) fn common_denominator<'a>(values: impl Iterator<Item = &'a QuadElem>) -> BigInt {
    use num_integer::Integer;
    values.fold(BigInt::from(1), |acc, q| {
        acc.lcm(q.a().denom()).lcm(q.b().denom())
    })
}

pub(crate) fn encode<I: Int>(q: &QuadElem, n: &BigInt) -> Option<Z2<I>> {
    let a = q.a() * Rational::from_integer(n.clone());
    let b = q.b() * Rational::from_integer(n.clone());
    debug_assert!(a.is_integer() && b.is_integer());
    Some(Z2 {
        a: I::from_big(a.numer())?,
        b: I::from_big(b.numer())?,
    })
}

pub(crate) fn decode<I: Int>(z: &Z2<I>, n: &BigInt, d: u64) -> QuadElem {
    QuadElem::new(
        Rational::new(z.a.to_big(), n.clone()),
        Rational::new(z.b.to_big(), n.clone()),
        d as i64,
    )
    .expect("field already validated")
}
