//! Planar vectors and 2×2 matrices over `Q(√D)`, with the exact angular
//! predicates used by polygon validation, ray tracing and wedge narrowing.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::qfield::{QFieldError, QuadElem};

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(from = "[QuadElem; 2]", into = "[QuadElem; 2]")]
pub struct Vec2 {
    pub x: QuadElem,
    pub y: QuadElem,
}

impl From<[QuadElem; 2]> for Vec2 {
    fn from([x, y]: [QuadElem; 2]) -> Self {
        Vec2 { x, y }
    }
}

impl From<Vec2> for [QuadElem; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Vec2 {
    pub fn new(x: QuadElem, y: QuadElem) -> Self {
        Vec2 { x, y }
    }

    pub fn ints(x: i64, y: i64, d: u64) -> Self {
        Vec2::new(QuadElem::int(x, d), QuadElem::int(y, d))
    }

    pub fn zero(d: u64) -> Self {
        Vec2::new(QuadElem::zero(d), QuadElem::zero(d))
    }

    pub fn field(&self) -> u64 {
        self.x.field()
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn add(&self, o: &Vec2) -> Vec2 {
        Vec2::new(&self.x + &o.x, &self.y + &o.y)
    }

    pub fn sub(&self, o: &Vec2) -> Vec2 {
        Vec2::new(&self.x - &o.x, &self.y - &o.y)
    }

    pub fn neg(&self) -> Vec2 {
        Vec2::new(-&self.x, -&self.y)
    }

    pub fn scale(&self, s: &QuadElem) -> Vec2 {
        Vec2::new(&self.x * s, &self.y * s)
    }

    pub fn dot(&self, o: &Vec2) -> QuadElem {
        &self.x * &o.x + &self.y * &o.y
    }

    /// z-component of the cross product; positive when `o` is counterclockwise
    /// of `self`.
    pub fn cross(&self, o: &Vec2) -> QuadElem {
        &self.x * &o.y - &self.y * &o.x
    }

    pub fn norm2(&self) -> QuadElem {
        self.dot(self)
    }

    pub fn is_parallel(&self, o: &Vec2) -> bool {
        self.cross(o).is_zero()
    }

    /// Same direction (positive multiple).
    pub fn same_direction(&self, o: &Vec2) -> bool {
        self.is_parallel(o) && self.dot(o).is_positive()
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Which half of the circle a nonzero direction lies in, measured from the
/// reference direction `r`: 0 for angles in `[0, π)`, 1 for `[π, 2π)`.
fn half_from(r: &Vec2, v: &Vec2) -> u8 {
    let c = r.cross(v).signum();
    if c > 0 || (c == 0 && r.dot(v).is_positive()) {
        0
    } else {
        1
    }
}

/// Compares the counterclockwise angles of `u` and `v` measured from `r`,
/// each taken in `[0, 2π)`.
pub fn cmp_angle_from(r: &Vec2, u: &Vec2, v: &Vec2) -> Ordering {
    let hu = half_from(r, u);
    let hv = half_from(r, v);
    if hu != hv {
        return hu.cmp(&hv);
    }
    match u.cross(v).signum() {
        1 => Ordering::Less,
        -1 => Ordering::Greater,
        _ => Ordering::Equal,
    }
}

/// `true` iff `v` lies in the half-open counterclockwise arc `[from, to)`.
/// The arc is taken to be nonempty: `from == to` means the full turn.
pub fn in_arc_half_open(from: &Vec2, to: &Vec2, v: &Vec2) -> bool {
    if from.same_direction(to) {
        return true;
    }
    cmp_angle_from(from, v, to) == Ordering::Less
}

/// `true` iff `v` is strictly inside the wedge swept counterclockwise from
/// `right` to `left` (an angle in `(0, π]`).
pub fn strictly_inside_wedge(right: &Vec2, left: &Vec2, v: &Vec2) -> bool {
    right.cross(v).is_positive() && v.cross(left).is_positive()
}

/// Number of times the counterclockwise sweep from `a` to `b` (an angle in
/// `(0, 2π)`) passes the positive x-axis, counted on the half-open arc
/// `(a, b]`. Summed around a cone point this yields its angle in units of 2π.
pub fn east_crossings(a: &Vec2, b: &Vec2) -> u32 {
    let d = a.field();
    let east = Vec2::new(QuadElem::one(d), QuadElem::zero(d));
    // with θ the angle from east in [0, 2π): the sweep wraps iff θ(b) ≤ θ(a)
    if cmp_angle_from(&east, b, a) != Ordering::Greater {
        1
    } else {
        0
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Mat2 {
    pub rows: [[QuadElem; 2]; 2],
}

impl Mat2 {
    pub fn new(a: QuadElem, b: QuadElem, c: QuadElem, d: QuadElem) -> Self {
        Mat2 {
            rows: [[a, b], [c, d]],
        }
    }

    pub fn ints(a: i64, b: i64, c: i64, d: i64, field: u64) -> Self {
        Mat2::new(
            QuadElem::int(a, field),
            QuadElem::int(b, field),
            QuadElem::int(c, field),
            QuadElem::int(d, field),
        )
    }

    pub fn identity(field: u64) -> Self {
        Mat2::ints(1, 0, 0, 1, field)
    }

    /// The rotation–scaling `[[a, b], [−b, a]]` sending `(a, b)` to
    /// `(a² + b², 0)`.
    pub fn conformal_to_horizontal(dir: &Vec2) -> Self {
        Mat2::new(dir.x.clone(), dir.y.clone(), -&dir.y, dir.x.clone())
    }

    pub fn diagonal(s: &QuadElem, t: &QuadElem) -> Self {
        let z = QuadElem::zero(s.field());
        Mat2::new(s.clone(), z.clone(), z, t.clone())
    }

    pub fn field(&self) -> u64 {
        self.rows[0][0].field()
    }

    pub fn det(&self) -> QuadElem {
        &self.rows[0][0] * &self.rows[1][1] - &self.rows[0][1] * &self.rows[1][0]
    }

    pub fn inverse(&self) -> Result<Mat2, QFieldError> {
        let inv = self.det().inv()?;
        let [[a, b], [c, d]] = &self.rows;
        Ok(Mat2::new(d * &inv, -(b * &inv), -(c * &inv), a * &inv))
    }

    pub fn apply(&self, v: &Vec2) -> Vec2 {
        let [[a, b], [c, d]] = &self.rows;
        Vec2::new(a * &v.x + b * &v.y, c * &v.x + d * &v.y)
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let [[a, b], [c, d]] = &self.rows;
        let [[e, f], [g, h]] = &o.rows;
        Mat2::new(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
    }
}
