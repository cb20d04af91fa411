//! Translation surfaces presented as planar polygons with edge gluings by
//! translations.
//!
//! A [`TranslationSurface`] is immutable once built; every constructor runs
//! the full validation (simple positively oriented polygons, a fixed-point
//! free gluing involution, opposite holonomy on paired edges, connectivity)
//! and precomputes the vertex classes with their cone angles.

mod json;
mod triangulate;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{east_crossings, Mat2, Vec2};
use crate::qfield::{QFieldError, QuadElem};

pub use json::SurfaceDoc;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("polygon {polygon}: {reason}")]
    BadPolygon { polygon: usize, reason: String },
    #[error("gluing is not a fixed-point-free involution on edges: {0}")]
    NonInvolutiveGluing(String),
    #[error("edges {a:?} and {b:?} are glued but their holonomies are not opposite")]
    HolonomyMismatch { a: EdgeRef, b: EdgeRef },
    #[error("vertex class {class} has a cone angle that is not a positive multiple of 2π")]
    BadConeAngle { class: usize },
    #[error("surface is not connected")]
    Disconnected,
    #[error("surface has no polygons")]
    Empty,
    #[error("linear map is singular")]
    SingularMatrix,
    #[error("malformed polygon map: {0}")]
    MalformedMap(String),
    #[error(transparent)]
    Field(#[from] QFieldError),
    #[error("parse error: {0}")]
    Parse(String),
}

/// A directed polygon edge: edge `edge` of polygon `polygon` runs from vertex
/// `edge` to vertex `edge + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeRef {
    pub polygon: usize,
    pub edge: usize,
}

impl EdgeRef {
    pub fn new(polygon: usize, edge: usize) -> Self {
        EdgeRef { polygon, edge }
    }
}

/// A polygon corner, i.e. vertex `vertex` of polygon `polygon` together with
/// the angular sector of the surface it spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Corner {
    pub polygon: usize,
    pub vertex: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanarPolygon {
    vertices: Vec<Vec2>,
}

impl PlanarPolygon {
    /// Validates simplicity and counterclockwise orientation. Collinear
    /// consecutive vertices are allowed; convexity is not required.
    pub fn new(vertices: Vec<Vec2>) -> Result<Self, String> {
        let n = vertices.len();
        if n < 3 {
            return Err(format!("needs at least 3 vertices, got {n}"));
        }
        let d = vertices[0].field();
        if vertices.iter().any(|v| v.x.field() != d || v.y.field() != d) {
            return Err("coordinates from different fields".into());
        }
        let poly = PlanarPolygon { vertices };
        for i in 0..n {
            if poly.edge_vector(i).is_zero() {
                return Err(format!("edge {i} has zero length"));
            }
        }
        for i in 0..n {
            let j = (i + 1) % n;
            // consecutive edges may not fold back onto each other
            let (a, b) = (poly.edge_vector(i), poly.edge_vector(j));
            if a.is_parallel(&b) && a.dot(&b).is_negative() {
                return Err(format!("edges {i} and {j} overlap"));
            }
            for k in 0..n {
                if k == i || k == j || (k + 1) % n == i {
                    continue;
                }
                if k < i {
                    continue;
                }
                let (p1, p2) = poly.edge_points(i);
                let (q1, q2) = poly.edge_points(k);
                if segments_meet(p1, p2, q1, q2) {
                    return Err(format!("edges {i} and {k} intersect"));
                }
            }
        }
        if !poly.twice_area().is_positive() {
            return Err("vertices are not in counterclockwise order".into());
        }
        Ok(poly)
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, i: usize) -> &Vec2 {
        &self.vertices[i % self.vertices.len()]
    }

    pub fn edge_points(&self, i: usize) -> (&Vec2, &Vec2) {
        (self.vertex(i), self.vertex(i + 1))
    }

    pub fn edge_vector(&self, i: usize) -> Vec2 {
        let (a, b) = self.edge_points(i);
        b.sub(a)
    }

    pub fn field(&self) -> u64 {
        self.vertices[0].field()
    }

    pub fn twice_area(&self) -> QuadElem {
        let n = self.vertices.len();
        let mut acc = QuadElem::zero(self.field());
        for i in 0..n {
            acc = acc + self.vertices[i].cross(&self.vertices[(i + 1) % n]);
        }
        acc
    }

    pub fn area(&self) -> QuadElem {
        self.twice_area().scale(&crate::qfield::rat(1, 2))
    }

    /// No reflex corners (straight corners allowed).
    pub fn is_convex(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| !self.edge_vector(i).cross(&self.edge_vector(i + 1)).is_negative())
    }

    pub fn translated(&self, t: &Vec2) -> PlanarPolygon {
        PlanarPolygon {
            vertices: self.vertices.iter().map(|v| v.add(t)).collect(),
        }
    }
}

fn orient(a: &Vec2, b: &Vec2, c: &Vec2) -> i8 {
    b.sub(a).cross(&c.sub(a)).signum()
}

fn on_segment(a: &Vec2, b: &Vec2, p: &Vec2) -> bool {
    // p collinear with a, b assumed
    let ap = p.sub(a);
    let ab = b.sub(a);
    let t = ap.dot(&ab);
    !t.is_negative() && t.cmp_value(&ab.norm2()) != std::cmp::Ordering::Greater
}

/// Closed-segment intersection test.
pub(crate) fn segments_meet(p1: &Vec2, p2: &Vec2, q1: &Vec2, q2: &Vec2) -> bool {
    let o1 = orient(p1, p2, q1);
    let o2 = orient(p1, p2, q2);
    let o3 = orient(q1, q2, p1);
    let o4 = orient(q1, q2, p2);
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && on_segment(p1, p2, q1))
        || (o2 == 0 && on_segment(p1, p2, q2))
        || (o3 == 0 && on_segment(q1, q2, p1))
        || (o4 == 0 && on_segment(q1, q2, p2))
}

/// An identified vertex of the surface: its corners in counterclockwise order
/// and its total cone angle in units of 2π.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexClass {
    pub corners: Vec<Corner>,
    pub angle: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumInfo {
    /// Cone angle of each vertex class, in units of 2π, in class order.
    pub cone_angles: Vec<u32>,
    pub genus: u32,
    /// Zero orders `angle − 1`, sorted ascending. Marked points show up as 0.
    pub orders: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationSurface {
    field: u64,
    polygons: Vec<PlanarPolygon>,
    gluing: Vec<Vec<EdgeRef>>,
    corner_class: Vec<Vec<usize>>,
    classes: Vec<VertexClass>,
    genus: u32,
}

/// Image of one polygon under a polygon-level map: polygon `polygon`, with
/// edge `i` sent to edge `i + shift`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolygonImage {
    pub polygon: usize,
    pub shift: usize,
}

impl TranslationSurface {
    /// Builds and validates a surface from polygons and a list of glued edge
    /// pairs.
    pub fn build(polygons: Vec<PlanarPolygon>, pairs: &[(EdgeRef, EdgeRef)]) -> Result<Self, SurfaceError> {
        if polygons.is_empty() {
            return Err(SurfaceError::Empty);
        }
        let field = polygons[0].field();
        if let Some(p) = polygons.iter().find(|p| p.field() != field) {
            return Err(SurfaceError::Field(QFieldError::FieldMismatch {
                left: field,
                right: p.field(),
            }));
        }
        let mut gluing: Vec<Vec<Option<EdgeRef>>> = polygons.iter().map(|p| vec![None; p.len()]).collect();
        let valid = |e: &EdgeRef| e.polygon < polygons.len() && e.edge < polygons[e.polygon].len();
        for (a, b) in pairs {
            for e in [a, b] {
                if !valid(e) {
                    return Err(SurfaceError::NonInvolutiveGluing(format!(
                        "edge {e:?} does not exist"
                    )));
                }
            }
            if a == b {
                return Err(SurfaceError::NonInvolutiveGluing(format!(
                    "edge {a:?} glued to itself"
                )));
            }
            for (x, y) in [(a, b), (b, a)] {
                let slot = &mut gluing[x.polygon][x.edge];
                if slot.is_some() {
                    return Err(SurfaceError::NonInvolutiveGluing(format!(
                        "edge {x:?} glued more than once"
                    )));
                }
                *slot = Some(*y);
            }
        }
        let mut glue = Vec::with_capacity(polygons.len());
        for (p, row) in gluing.into_iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (e, g) in row.into_iter().enumerate() {
                out.push(g.ok_or_else(|| {
                    SurfaceError::NonInvolutiveGluing(format!("edge {:?} is not glued", EdgeRef::new(p, e)))
                })?);
            }
            glue.push(out);
        }
        Self::from_parts(polygons, glue)
    }

    fn from_parts(polygons: Vec<PlanarPolygon>, gluing: Vec<Vec<EdgeRef>>) -> Result<Self, SurfaceError> {
        let field = polygons[0].field();
        for (p, row) in gluing.iter().enumerate() {
            for (e, other) in row.iter().enumerate() {
                let here = polygons[p].edge_vector(e);
                let there = polygons[other.polygon].edge_vector(other.edge);
                if !here.add(&there).is_zero() {
                    return Err(SurfaceError::HolonomyMismatch {
                        a: EdgeRef::new(p, e),
                        b: *other,
                    });
                }
            }
        }
        // connectivity
        let mut comp: Vec<usize> = (0..polygons.len()).collect();
        fn find(c: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while c[r] != r {
                r = c[r];
            }
            let mut y = x;
            while c[y] != r {
                let next = c[y];
                c[y] = r;
                y = next;
            }
            r
        }
        for (p, row) in gluing.iter().enumerate() {
            for other in row {
                let (a, b) = (find(&mut comp, p), find(&mut comp, other.polygon));
                comp[a] = b;
            }
        }
        let root = find(&mut comp, 0);
        if (0..polygons.len()).any(|p| find(&mut comp, p) != root) {
            return Err(SurfaceError::Disconnected);
        }

        // vertex classes: the ccw successor of corner (p, i) is the start of
        // the edge glued to p's incoming edge i - 1
        let mut corner_class: Vec<Vec<usize>> = polygons.iter().map(|p| vec![usize::MAX; p.len()]).collect();
        let mut classes = Vec::new();
        for p in 0..polygons.len() {
            for i in 0..polygons[p].len() {
                if corner_class[p][i] != usize::MAX {
                    continue;
                }
                let id = classes.len();
                let mut corners = Vec::new();
                let mut angle = 0u32;
                let (mut cp, mut ci) = (p, i);
                loop {
                    corner_class[cp][ci] = id;
                    corners.push(Corner {
                        polygon: cp,
                        vertex: ci,
                    });
                    let poly = &polygons[cp];
                    let out = poly.edge_vector(ci);
                    let n = poly.len();
                    let incoming = (ci + n - 1) % n;
                    let back = poly.edge_vector(incoming).neg();
                    angle += east_crossings(&out, &back);
                    let next = gluing[cp][incoming];
                    cp = next.polygon;
                    ci = next.edge;
                    if (cp, ci) == (p, i) {
                        break;
                    }
                    if corner_class[cp][ci] != usize::MAX {
                        return Err(SurfaceError::NonInvolutiveGluing(
                            "corner cycle does not close".into(),
                        ));
                    }
                }
                if angle == 0 {
                    return Err(SurfaceError::BadConeAngle { class: id });
                }
                classes.push(VertexClass { corners, angle });
            }
        }
        let v = classes.len() as i64;
        let e: i64 = polygons.iter().map(|p| p.len() as i64).sum::<i64>() / 2;
        let f = polygons.len() as i64;
        let chi = v - e + f;
        if chi > 2 || (2 - chi) % 2 != 0 {
            return Err(SurfaceError::BadConeAngle { class: 0 });
        }
        let genus = ((2 - chi) / 2) as u32;
        // Gauss–Bonnet
        let excess: i64 = classes.iter().map(|c| c.angle as i64 - 1).sum();
        if excess != 2 * genus as i64 - 2 {
            return Err(SurfaceError::BadConeAngle { class: 0 });
        }
        let _ = field;
        Ok(TranslationSurface {
            field,
            polygons,
            gluing,
            corner_class,
            classes,
            genus,
        })
    }

    pub fn field(&self) -> u64 {
        self.field
    }

    pub fn polygons(&self) -> &[PlanarPolygon] {
        &self.polygons
    }

    pub fn polygon(&self, p: usize) -> &PlanarPolygon {
        &self.polygons[p]
    }

    pub fn glued(&self, e: EdgeRef) -> EdgeRef {
        self.gluing[e.polygon][e.edge]
    }

    /// Canonical pair list: each glued pair once, smaller edge first.
    pub fn gluing_pairs(&self) -> Vec<(EdgeRef, EdgeRef)> {
        let mut out = Vec::new();
        for (p, row) in self.gluing.iter().enumerate() {
            for (e, other) in row.iter().enumerate() {
                let here = EdgeRef::new(p, e);
                if here < *other {
                    out.push((here, *other));
                }
            }
        }
        out
    }

    /// Translation carrying edge `e` onto its glued partner: a point `X` on
    /// `e` corresponds to `X + t` on the partner.
    pub fn edge_translation(&self, e: EdgeRef) -> Vec2 {
        let other = self.glued(e);
        let (a, _) = self.polygons[e.polygon].edge_points(e.edge);
        let (_, b2) = self.polygons[other.polygon].edge_points(other.edge);
        b2.sub(a)
    }

    pub fn vertex_class(&self, c: Corner) -> usize {
        self.corner_class[c.polygon][c.vertex]
    }

    pub fn vertex_classes(&self) -> &[VertexClass] {
        &self.classes
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn area(&self) -> QuadElem {
        let mut acc = QuadElem::zero(self.field);
        for p in &self.polygons {
            acc = acc + p.area();
        }
        acc
    }

    pub fn stratum(&self) -> StratumInfo {
        let cone_angles: Vec<u32> = self.classes.iter().map(|c| c.angle).collect();
        let mut orders: Vec<u32> = cone_angles.iter().map(|a| a - 1).collect();
        orders.sort_unstable();
        StratumInfo {
            cone_angles,
            genus: self.genus,
            orders,
        }
    }

    pub fn is_convex(&self) -> bool {
        self.polygons.iter().all(|p| p.is_convex())
    }

    /// Applies `m` to every vertex, keeping the gluing combinatorics.
    /// Orientation-reversing maps reverse each polygon's vertex order.
    pub fn apply_linear(&self, m: &Mat2) -> Result<TranslationSurface, SurfaceError> {
        if m.field() != self.field {
            return Err(SurfaceError::Field(QFieldError::FieldMismatch {
                left: self.field,
                right: m.field(),
            }));
        }
        let det = m.det();
        if det.is_zero() {
            return Err(SurfaceError::SingularMatrix);
        }
        if det.is_positive() {
            let polygons = self
                .polygons
                .iter()
                .map(|p| PlanarPolygon {
                    vertices: p.vertices.iter().map(|v| m.apply(v)).collect(),
                })
                .collect();
            return Self::from_parts(polygons, self.gluing.clone());
        }
        // reversed order: new edge k is old edge n - 1 - k traversed backwards
        let flip = |p: usize, e: usize| {
            let n = self.polygons[p].len();
            EdgeRef::new(p, n - 1 - e)
        };
        let polygons: Vec<PlanarPolygon> = self
            .polygons
            .iter()
            .map(|p| {
                let n = p.len();
                PlanarPolygon {
                    vertices: (0..n).map(|k| m.apply(&p.vertices[(n - k) % n])).collect(),
                }
            })
            .collect();
        let gluing = self
            .gluing
            .iter()
            .enumerate()
            .map(|(p, row)| {
                let n = row.len();
                (0..n)
                    .map(|k| {
                        let old = flip(p, k);
                        let target = self.gluing[old.polygon][old.edge];
                        flip(target.polygon, target.edge)
                    })
                    .collect()
            })
            .collect();
        Self::from_parts(polygons, gluing)
    }

    /// Same surface with polygon `p` translated by `t`.
    pub fn translate_polygon(&self, p: usize, t: &Vec2) -> TranslationSurface {
        let mut out = self.clone();
        out.polygons[p] = out.polygons[p].translated(t);
        out
    }

    /// `true` iff `map` is an isometric involution of the polygon complex
    /// acting as `−id` on holonomy: every edge vector goes to its negative,
    /// gluings are respected and applying the map twice is the identity.
    pub fn check_involution(&self, map: &[PolygonImage]) -> Result<bool, SurfaceError> {
        if map.len() != self.polygons.len() {
            return Err(SurfaceError::MalformedMap(format!(
                "{} images for {} polygons",
                map.len(),
                self.polygons.len()
            )));
        }
        if let Some(bad) = map.iter().find(|im| im.polygon >= self.polygons.len()) {
            return Err(SurfaceError::MalformedMap(format!(
                "polygon {} does not exist",
                bad.polygon
            )));
        }
        let image = |e: EdgeRef| -> EdgeRef {
            let im = map[e.polygon];
            let n = self.polygons[im.polygon].len();
            EdgeRef::new(im.polygon, (e.edge + im.shift) % n)
        };
        for (p, im) in map.iter().enumerate() {
            if self.polygons[im.polygon].len() != self.polygons[p].len() {
                return Ok(false);
            }
        }
        for (p, poly) in self.polygons.iter().enumerate() {
            for e in 0..poly.len() {
                let here = EdgeRef::new(p, e);
                let there = image(here);
                let v = poly.edge_vector(e);
                let w = self.polygons[there.polygon].edge_vector(there.edge);
                if !v.add(&w).is_zero() {
                    return Ok(false);
                }
                if image(self.glued(here)) != self.glued(there) {
                    return Ok(false);
                }
                if image(there) != here {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Image of point `x` of polygon `p` under a polygon map acting as a
    /// half-turn.
    pub fn involution_point(&self, map: &[PolygonImage], p: usize, x: &Vec2) -> (usize, Vec2) {
        let im = map[p];
        let target = &self.polygons[im.polygon];
        let anchor = target.vertex(im.shift);
        (im.polygon, anchor.sub(&x.sub(self.polygons[p].vertex(0))))
    }

    /// Every polygon split into triangles.
    pub fn triangulated(&self) -> Result<TranslationSurface, SurfaceError> {
        triangulate::split(self, |_| true)
    }

    /// Non-convex polygons split into triangles; convex ones kept as they are.
    /// Returns a clone when nothing needs splitting.
    pub fn convexified(&self) -> Result<TranslationSurface, SurfaceError> {
        if self.is_convex() {
            return Ok(self.clone());
        }
        triangulate::split(self, |p| !p.is_convex())
    }

    /// Multiset of cone angles keyed by angle, for presentation-independent
    /// comparisons.
    pub fn angle_histogram(&self) -> BTreeMap<u32, usize> {
        let mut h = BTreeMap::new();
        for c in &self.classes {
            *h.entry(c.angle).or_insert(0) += 1;
        }
        h
    }
}

/// Small reference surfaces.
pub mod fixtures {
    use super::*;
    use crate::qfield::QuadElem;

    pub fn square(d: u64) -> PlanarPolygon {
        PlanarPolygon::new(vec![
            Vec2::ints(0, 0, d),
            Vec2::ints(1, 0, d),
            Vec2::ints(1, 1, d),
            Vec2::ints(0, 1, d),
        ])
        .unwrap()
    }

    pub fn torus(d: u64) -> TranslationSurface {
        TranslationSurface::build(
            vec![square(d)],
            &[
                (EdgeRef::new(0, 0), EdgeRef::new(0, 2)),
                (EdgeRef::new(0, 1), EdgeRef::new(0, 3)),
            ],
        )
        .unwrap()
    }

    /// Unit squares `0..n` where square `i` has square `r[i]` on its right
    /// and `u[i]` on top.
    pub fn square_tiled(r: &[usize], u: &[usize], d: u64) -> Result<TranslationSurface, SurfaceError> {
        let n = r.len();
        if u.len() != n || r.iter().chain(u).any(|&j| j >= n) {
            return Err(SurfaceError::MalformedMap("r and u must be maps of 0..n".into()));
        }
        let mut pairs = Vec::new();
        for i in 0..n {
            pairs.push((EdgeRef::new(i, 1), EdgeRef::new(r[i], 3)));
            pairs.push((EdgeRef::new(i, 2), EdgeRef::new(u[i], 0)));
        }
        TranslationSurface::build(vec![square(d); n], &pairs)
    }

    /// Regular octagon with unit sides, opposite sides identified.
    pub fn octagon() -> TranslationSurface {
        let s = QuadElem::from_parts(0, 1, 1, 2, 2);
        let one = QuadElem::one(2);
        let z = QuadElem::zero(2);
        let pts = vec![
            Vec2::new(z.clone(), z.clone()),
            Vec2::new(one.clone(), z.clone()),
            Vec2::new(&one + &s, s.clone()),
            Vec2::new(&one + &s, &one + &s),
            Vec2::new(one.clone(), &one + &(&s + &s)),
            Vec2::new(z.clone(), &one + &(&s + &s)),
            Vec2::new(-&s, &one + &s),
            Vec2::new(-&s, s.clone()),
        ];
        let poly = PlanarPolygon::new(pts).unwrap();
        let pairs: Vec<_> = (0..4)
            .map(|i| (EdgeRef::new(0, i), EdgeRef::new(0, i + 4)))
            .collect();
        TranslationSurface::build(vec![poly], &pairs).unwrap()
    }
}
