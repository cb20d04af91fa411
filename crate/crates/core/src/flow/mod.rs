//! Straight-line flow on translation surfaces: exact ray tracing,
//! saddle-connection enumeration and cylinder decompositions.
//!
//! All computations work on the convex presentation of a surface (non-convex
//! polygons are triangulated first), so polygon and edge indices reported in
//! crossing sequences refer to [`TranslationSurface::convexified`].

mod decompose;
mod intersect;
mod level;
mod saddle;
mod trace;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Vec2;
use crate::qfield::{QuadElem, Rational};
use crate::surface::{Corner, EdgeRef, SurfaceError};

pub use decompose::{
    cylinder_modulus, decompose, AreaCheck, Cylinder, CylinderPiece, Decomposition, DecompositionStatus,
    Periodic,
};
pub use intersect::crossing_counts;
pub use saddle::saddle_connections;
pub use trace::{trace_ray, RayStart, TraceOutcome};

/// Separatrices crossing more polygon edges than this are given up on.
pub const DEFAULT_STEP_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowError {
    #[error("direction must be nonzero")]
    ZeroDirection,
    #[error("start point is a vertex; give a singularity sector instead")]
    StartsOnVertexAmbiguous,
    #[error("start point lies outside polygon {0}")]
    PointOutside(usize),
    #[error("ray tracing needs a presentation by convex polygons")]
    NonConvex,
    #[error("step cap must be at least 1")]
    BadStepCap,
    #[error("length bound must be positive")]
    BadLengthBound,
    #[error("decomposition is not periodic")]
    NotPeriodic,
    #[error("directions are parallel")]
    NotTransverse,
    #[error("decompositions come from different surfaces")]
    SurfaceMismatch,
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaddleConnection {
    /// Corner whose sector contains the outgoing direction.
    pub start: Corner,
    pub start_class: usize,
    pub end: Corner,
    pub end_class: usize,
    pub holonomy: Vec2,
    /// Edges crossed in order, excluding the endpoints.
    pub crossings: Vec<EdgeRef>,
}

fn clear_denominators(parts: [&Rational; 4]) -> [BigInt; 4] {
    let l = parts.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let ints = parts.map(|r| r.numer() * (&l / r.denom()));
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.map(|x| x / &g)
}

fn quad_from_ints(a: BigInt, b: BigInt, d: u64) -> QuadElem {
    QuadElem::new(Rational::from_integer(a), Rational::from_integer(b), d as i64)
        .expect("field already validated")
}

/// Positive rescaling of `v` whose four rational components are coprime
/// integers, so equal rays compare equal.
pub fn canonical_direction(v: &Vec2) -> Result<Vec2, FlowError> {
    if v.is_zero() {
        return Err(FlowError::ZeroDirection);
    }
    let d = v.field();
    let [xa, xb, ya, yb] = clear_denominators([v.x.a(), v.x.b(), v.y.a(), v.y.b()]);
    Ok(Vec2::new(quad_from_ints(xa, xb, d), quad_from_ints(ya, yb, d)))
}

/// Canonical representative of the unoriented line through `v`: the
/// canonical direction flipped so that `x > 0`, or `x = 0` and `y > 0`.
pub fn projective_direction(v: &Vec2) -> Result<Vec2, FlowError> {
    let c = canonical_direction(v)?;
    let s = c.x.signum();
    if s < 0 || (s == 0 && c.y.is_negative()) {
        Ok(c.neg())
    } else {
        Ok(c)
    }
}

/// Total order on directions used for deterministic scans: lexicographic on
/// the integer components of the canonical form.
pub fn direction_sort_key(v: &Vec2) -> [BigInt; 4] {
    let parts = |q: &QuadElem| (q.a().numer().clone(), q.b().numer().clone());
    let (xa, xb) = parts(&v.x);
    let (ya, yb) = parts(&v.y);
    [xa, xb, ya, yb]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_forms() {
        let v = Vec2::new(QuadElem::frac(2, 3, 2), QuadElem::frac(4, 3, 2));
        assert_eq!(canonical_direction(&v).unwrap(), Vec2::ints(1, 2, 2));
        let w = Vec2::new(
            QuadElem::from_parts(0, 1, 1, 2, 2),
            QuadElem::from_parts(1, 1, 0, 1, 2),
        );
        let c = canonical_direction(&w).unwrap();
        assert_eq!(c, Vec2::new(QuadElem::sqrt_d(2), QuadElem::int(2, 2)));
        assert_eq!(
            projective_direction(&Vec2::ints(-3, -6, 2)).unwrap(),
            Vec2::ints(1, 2, 2)
        );
        assert_eq!(
            projective_direction(&Vec2::ints(0, -6, 2)).unwrap(),
            Vec2::ints(0, 1, 2)
        );
        assert_eq!(canonical_direction(&Vec2::zero(2)), Err(FlowError::ZeroDirection));
    }
}
