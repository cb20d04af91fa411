//! Saddle connections by wedge-narrowing unfolding.
//!
//! From every corner the search unfolds polygons across edges while keeping
//! the open wedge of directions that still reach the current polygon through
//! every edge crossed so far. A vertex strictly inside the wedge is visible in
//! a straight line from the start, so the segment to it is a saddle
//! connection. Boundary rays of a wedge point at vertices handled earlier.

use super::trace::corner_sector;
use super::{FlowError, SaddleConnection};
use crate::geom::{strictly_inside_wedge, Vec2};
use crate::qfield::QuadElem;
use crate::surface::{Corner, EdgeRef, TranslationSurface};

struct Search<'a> {
    s: &'a TranslationSurface,
    bound2: QuadElem,
    origin: Vec2,
    start: Corner,
    out: Vec<SaddleConnection>,
}

/// `x` in the closed counterclockwise arc from `r` to `l` (arc at most π).
fn in_closed_arc(r: &Vec2, l: &Vec2, x: &Vec2) -> bool {
    !r.cross(x).is_negative() && !x.cross(l).is_negative()
}

/// Intersection of two arcs each at most π, if it has nonempty interior.
fn intersect_arcs(r: &Vec2, l: &Vec2, a: &Vec2, b: &Vec2) -> Option<(Vec2, Vec2)> {
    let right = if in_closed_arc(r, l, a) {
        a.clone()
    } else if in_closed_arc(a, b, r) {
        r.clone()
    } else {
        return None;
    };
    let left = if in_closed_arc(r, l, b) {
        b.clone()
    } else if in_closed_arc(a, b, l) {
        l.clone()
    } else {
        return None;
    };
    right.cross(&left).is_positive().then_some((right, left))
}

/// Squared distance from `o` to the closed segment `[a, b]`.
fn segment_dist2(o: &Vec2, a: &Vec2, b: &Vec2) -> QuadElem {
    let e = b.sub(a);
    let t = o.sub(a).dot(&e);
    if !t.is_positive() {
        return o.sub(a).norm2();
    }
    let len2 = e.norm2();
    if t >= len2 {
        return o.sub(b).norm2();
    }
    let c = e.cross(&o.sub(a));
    &c * &c / len2
}

impl Search<'_> {
    fn record(&mut self, end: Corner, holonomy: Vec2, crossings: &[EdgeRef]) {
        self.out.push(SaddleConnection {
            start: self.start,
            start_class: self.s.vertex_class(self.start),
            end,
            end_class: self.s.vertex_class(end),
            holonomy,
            crossings: crossings.to_vec(),
        });
    }

    /// Visits polygon `q` unfolded by `offset`, entered through `entry`.
    fn explore(
        &mut self,
        q: usize,
        offset: &Vec2,
        entry: Option<usize>,
        right: &Vec2,
        left: &Vec2,
        crossings: &mut Vec<EdgeRef>,
    ) {
        let s = self.s;
        let poly = s.polygon(q);
        let n = poly.len();
        for m in 0..n {
            let u = poly.vertex(m).add(offset).sub(&self.origin);
            if strictly_inside_wedge(right, left, &u) && u.norm2() <= self.bound2 {
                self.record(
                    Corner {
                        polygon: q,
                        vertex: m,
                    },
                    u,
                    crossings,
                );
            }
        }
        for k in 0..n {
            if Some(k) == entry {
                continue;
            }
            if entry.is_none() && (k == self.start.vertex || (k + 1) % n == self.start.vertex) {
                continue;
            }
            let a = poly.vertex(k).add(offset);
            let b = poly.vertex(k + 1).add(offset);
            if !b.sub(&a).cross(&self.origin.sub(&a)).is_positive() {
                continue;
            }
            let Some((r2, l2)) = intersect_arcs(right, left, &a.sub(&self.origin), &b.sub(&self.origin))
            else {
                continue;
            };
            if segment_dist2(&self.origin, &a, &b) > self.bound2 {
                continue;
            }
            let edge = EdgeRef::new(q, k);
            let next = s.glued(edge);
            let shifted = offset.sub(&s.edge_translation(edge));
            crossings.push(edge);
            self.explore(next.polygon, &shifted, Some(next.edge), &r2, &l2, crossings);
            crossings.pop();
        }
    }
}

/// Every saddle connection with `|holonomy| ≤ bound`, once per orientation,
/// grouped by starting corner and found in depth-first angular order.
pub fn saddle_connections(
    s: &TranslationSurface,
    bound: &QuadElem,
) -> Result<Vec<SaddleConnection>, FlowError> {
    if !bound.is_positive() {
        return Err(FlowError::BadLengthBound);
    }
    let work = s.convexified()?;
    let zero = Vec2::zero(work.field());
    let mut out = Vec::new();
    for (p, poly) in work.polygons().iter().enumerate() {
        for i in 0..poly.len() {
            let start = Corner {
                polygon: p,
                vertex: i,
            };
            let (right, left) = corner_sector(&work, start);
            let mut search = Search {
                s: &work,
                bound2: bound * bound,
                origin: poly.vertex(i).clone(),
                start,
                out: Vec::new(),
            };
            if right.norm2() <= search.bound2 {
                let end = Corner {
                    polygon: p,
                    vertex: (i + 1) % poly.len(),
                };
                search.record(end, right.clone(), &[]);
            }
            search.explore(p, &zero, None, &right, &left, &mut Vec::new());
            out.append(&mut search.out);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::surface::fixtures::{octagon, torus};

    fn int_holonomies(list: &[SaddleConnection]) -> BTreeSet<(i64, i64)> {
        let as_int = |q: &QuadElem| {
            assert!(q.is_rational());
            i64::try_from(q.floor()).unwrap()
        };
        list.iter()
            .map(|c| (as_int(&c.holonomy.x), as_int(&c.holonomy.y)))
            .collect()
    }

    #[test]
    fn torus_bound_two() {
        let list = saddle_connections(&torus(2), &QuadElem::int(2, 2)).unwrap();
        assert_eq!(list.len(), 8);
        let expected: BTreeSet<_> = [
            (1, 0),
            (-1, 0),
            (0, 1),
            (0, -1),
            (1, 1),
            (1, -1),
            (-1, 1),
            (-1, -1),
        ]
        .into_iter()
        .collect();
        assert_eq!(int_holonomies(&list), expected);
    }

    #[test]
    fn torus_small_bound_is_empty() {
        assert!(saddle_connections(&torus(2), &QuadElem::frac(1, 2, 2))
            .unwrap()
            .is_empty());
        assert_eq!(
            saddle_connections(&torus(2), &QuadElem::zero(2)),
            Err(FlowError::BadLengthBound)
        );
    }

    #[test]
    fn octagon_sides_are_saddle_connections() {
        let o = octagon();
        let list = saddle_connections(&o, &QuadElem::one(2)).unwrap();
        // the eight unit sides, one per direction, each found from both ends
        assert_eq!(list.len(), 8);
        let poly = o.polygon(0);
        for k in 0..8 {
            let e = poly.edge_vector(k);
            assert_eq!(list.iter().filter(|c| c.holonomy == e).count(), 1);
        }
    }
}
