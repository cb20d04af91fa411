//! Ear-clipping triangulation of polygons, used to hand convex pieces to the
//! flow code and to check that the stratum does not depend on presentation.

use std::collections::HashMap;

use super::{EdgeRef, PlanarPolygon, SurfaceError, TranslationSurface};
use crate::geom::Vec2;

fn in_closed_triangle(a: &Vec2, b: &Vec2, c: &Vec2, p: &Vec2) -> bool {
    let s1 = b.sub(a).cross(&p.sub(a)).signum();
    let s2 = c.sub(b).cross(&p.sub(b)).signum();
    let s3 = a.sub(c).cross(&p.sub(c)).signum();
    s1 >= 0 && s2 >= 0 && s3 >= 0
}

/// Triangles of a simple ccw polygon as ccw index triples.
pub(crate) fn ear_clip(poly: &PlanarPolygon) -> Option<Vec<[usize; 3]>> {
    let verts = poly.vertices();
    let mut idx: Vec<usize> = (0..verts.len()).collect();
    let mut out = Vec::new();
    while idx.len() > 3 {
        let m = idx.len();
        let mut clipped = false;
        for k in 0..m {
            let (ia, ib, ic) = (idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]);
            let (a, b, c) = (&verts[ia], &verts[ib], &verts[ic]);
            if !b.sub(a).cross(&c.sub(b)).is_positive() {
                continue;
            }
            let blocked = idx
                .iter()
                .filter(|&&j| j != ia && j != ib && j != ic)
                .any(|&j| in_closed_triangle(a, b, c, &verts[j]));
            if blocked {
                continue;
            }
            out.push([ia, ib, ic]);
            idx.remove(k);
            clipped = true;
            break;
        }
        if !clipped {
            return None;
        }
    }
    let (a, b, c) = (&verts[idx[0]], &verts[idx[1]], &verts[idx[2]]);
    if !b.sub(a).cross(&c.sub(b)).is_positive() {
        return None;
    }
    out.push([idx[0], idx[1], idx[2]]);
    Some(out)
}

pub(crate) fn split(
    s: &TranslationSurface,
    pick: impl Fn(&PlanarPolygon) -> bool,
) -> Result<TranslationSurface, SurfaceError> {
    let mut polygons = Vec::new();
    // original edge -> new edge
    let mut relocated: HashMap<EdgeRef, EdgeRef> = HashMap::new();
    let mut pairs = Vec::new();
    for (p, poly) in s.polygons().iter().enumerate() {
        let n = poly.len();
        if !pick(poly) {
            let id = polygons.len();
            polygons.push(poly.clone());
            for e in 0..n {
                relocated.insert(EdgeRef::new(p, e), EdgeRef::new(id, e));
            }
            continue;
        }
        let tris = ear_clip(poly).ok_or_else(|| SurfaceError::BadPolygon {
            polygon: p,
            reason: "triangulation failed".into(),
        })?;
        let mut diagonals: HashMap<(usize, usize), EdgeRef> = HashMap::new();
        for tri in tris {
            let id = polygons.len();
            let verts = tri.iter().map(|&i| poly.vertices()[i].clone()).collect();
            polygons.push(
                PlanarPolygon::new(verts)
                    .map_err(|reason| SurfaceError::BadPolygon { polygon: p, reason })?,
            );
            for k in 0..3 {
                let (u, v) = (tri[k], tri[(k + 1) % 3]);
                let here = EdgeRef::new(id, k);
                if v == (u + 1) % n {
                    relocated.insert(EdgeRef::new(p, u), here);
                } else {
                    let key = (u.min(v), u.max(v));
                    match diagonals.remove(&key) {
                        Some(other) => pairs.push((other, here)),
                        None => {
                            diagonals.insert(key, here);
                        }
                    }
                }
            }
        }
    }
    for (a, b) in s.gluing_pairs() {
        pairs.push((relocated[&a], relocated[&b]));
    }
    TranslationSurface::build(polygons, &pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l_shape_with_straight_corner() {
        let d = 2;
        let poly = PlanarPolygon::new(vec![
            Vec2::ints(0, 0, d),
            Vec2::ints(1, 0, d),
            Vec2::ints(2, 0, d),
            Vec2::ints(2, 1, d),
            Vec2::ints(1, 1, d),
            Vec2::ints(1, 2, d),
            Vec2::ints(0, 2, d),
        ])
        .unwrap();
        let tris = ear_clip(&poly).unwrap();
        assert_eq!(tris.len(), 5);
        let mut area = crate::qfield::QuadElem::zero(d);
        for t in tris {
            let tri = PlanarPolygon::new(t.iter().map(|&i| poly.vertices()[i].clone()).collect()).unwrap();
            area = area + tri.area();
        }
        assert_eq!(area, poly.area());
    }
}
