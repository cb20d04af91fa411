//! Cylinder decompositions.
//!
//! The surface is first mapped by the rotation–scaling `[[a, b], [−b, a]]`
//! that sends the direction `(a, b)` to the positive x-axis, so every
//! question becomes horizontal. Each horizontal separatrix is followed through
//! the polygons until it lands on a vertex; if all of them do, every polygon
//! is cut into horizontal slabs at the heights those separatrices pass
//! through, and slabs glued side by side close up into cylinders.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::level::{common_denominator, decode, encode, Int, Overflow, Z2};
use super::trace::corner_sector;
use super::{canonical_direction, FlowError, SaddleConnection};
use crate::geom::{in_arc_half_open, Mat2, Vec2};
use crate::qfield::{QuadElem, Rational};
use crate::surface::{Corner, EdgeRef, PlanarPolygon, TranslationSurface};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cylinder {
    /// Length of the core curve in the normalized (horizontal) frame.
    pub circumference: QuadElem,
    pub height: QuadElem,
    /// Horizontal offset from the leftmost bottom singularity to the leftmost
    /// top singularity of one unrolled fundamental domain, reduced into
    /// `[0, circumference)`. Depends on the presentation of the surface.
    pub twist: QuadElem,
    /// Indices into [`Periodic::saddle_connections`].
    pub bottom: Vec<usize>,
    pub top: Vec<usize>,
}

pub fn cylinder_modulus(c: &Cylinder) -> QuadElem {
    &c.height / &c.circumference
}

/// Areas in the normalized frame, where the surface area is the original
/// area times `a² + b²`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AreaCheck {
    pub surface_area: QuadElem,
    pub cylinder_area: QuadElem,
}

impl AreaCheck {
    pub fn holds(&self) -> bool {
        self.surface_area == self.cylinder_area
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Periodic {
    pub cylinders: Vec<Cylinder>,
    /// Horizontal saddle connections in the flow direction, with holonomy in
    /// the original coordinates.
    pub saddle_connections: Vec<SaddleConnection>,
    pub area_check: AreaCheck,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecompositionStatus {
    Periodic(Periodic),
    Undetermined { steps_exhausted: usize },
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    /// Canonical form of the requested direction.
    pub direction: Vec2,
    pub status: DecompositionStatus,
    pub(crate) layout: Option<Arc<Layout>>,
}

impl Decomposition {
    pub fn periodic(&self) -> Option<&Periodic> {
        match &self.status {
            DecompositionStatus::Periodic(p) => Some(p),
            DecompositionStatus::Undetermined { .. } => None,
        }
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic().is_some()
    }

    pub fn cylinders(&self) -> Option<&[Cylinder]> {
        self.periodic().map(|p| p.cylinders.as_slice())
    }

    pub fn moduli(&self) -> Option<Vec<QuadElem>> {
        self.cylinders()
            .map(|cs| cs.iter().map(cylinder_modulus).collect())
    }

    /// A point on the core curve of cylinder `cyl`, in original coordinates
    /// of the convex presentation.
    pub fn core_point(&self, cyl: usize) -> Option<(usize, Vec2)> {
        let layout = self.layout.as_ref()?;
        let &(p, j) = layout.cycles.get(cyl)?.first()?;
        let mid = layout.mid_level(p, j);
        let x = (layout.x_left(p, &mid) + layout.x_right(p, &mid)).scale(&Rational::new(1.into(), 2.into()));
        Some((p, layout.from_frame.apply(&Vec2::new(x, mid))))
    }

    /// The cylinder whose interior contains `point` (original coordinates of
    /// polygon `polygon` in the convex presentation); `None` on boundaries.
    pub fn cylinder_at(&self, polygon: usize, point: &Vec2) -> Option<usize> {
        let layout = self.layout.as_ref()?;
        let y = layout.to_frame.apply(point).y;
        let levels = layout.levels.get(polygon)?;
        let j = levels.partition_point(|l| *l < y);
        if j == 0 || j == levels.len() || levels[j] == y {
            return None;
        }
        Some(layout.slab_cylinder[polygon][j - 1])
    }
}

/// The part of one cylinder inside one polygon between two consecutive
/// levels, a triangle or quadrilateral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderPiece {
    pub polygon: usize,
    pub cylinder: usize,
    /// Counterclockwise, in the coordinates of [`Decomposition::presentation`].
    pub vertices: Vec<Vec2>,
}

impl Decomposition {
    /// The convex presentation the decomposition was computed on.
    pub fn presentation(&self) -> Option<&TranslationSurface> {
        Some(&self.layout.as_ref()?.base)
    }

    /// The cylinders cut along polygon edges and separatrix levels.
    pub fn cylinder_pieces(&self) -> Option<Vec<CylinderPiece>> {
        let layout = self.layout.as_ref()?;
        let mut out = Vec::new();
        for (p, levels) in layout.levels.iter().enumerate() {
            for j in 0..levels.len().saturating_sub(1) {
                let (lo, hi) = (&levels[j], &levels[j + 1]);
                let mut pts = vec![
                    Vec2::new(layout.x_left(p, lo), lo.clone()),
                    Vec2::new(layout.x_right(p, lo), lo.clone()),
                    Vec2::new(layout.x_right(p, hi), hi.clone()),
                    Vec2::new(layout.x_left(p, hi), hi.clone()),
                ];
                pts.dedup();
                if pts.len() > 1 && pts[0] == pts[pts.len() - 1] {
                    pts.pop();
                }
                out.push(CylinderPiece {
                    polygon: p,
                    cylinder: layout.slab_cylinder[p][j],
                    vertices: pts.iter().map(|v| layout.from_frame.apply(v)).collect(),
                });
            }
        }
        Some(out)
    }
}

/// Geometry of a periodic decomposition, kept for intersection counts.
#[derive(Debug)]
pub(crate) struct Layout {
    /// Convex presentation of the original surface.
    pub base: TranslationSurface,
    /// The same presentation mapped into the normalized frame.
    pub frame: TranslationSurface,
    pub to_frame: Mat2,
    pub from_frame: Mat2,
    pub levels: Vec<Vec<QuadElem>>,
    pub slab_cylinder: Vec<Vec<usize>>,
    pub cycles: Vec<Vec<(usize, usize)>>,
    right: Vec<Vec<usize>>,
    left: Vec<Vec<usize>>,
}

fn chain_x(poly: &PlanarPolygon, chain: &[usize], y: &QuadElem) -> QuadElem {
    for &k in chain {
        let (a, b) = poly.edge_points(k);
        let (lo, hi) = if a.y < b.y { (&a.y, &b.y) } else { (&b.y, &a.y) };
        if lo <= y && y <= hi {
            return &a.x + &((y - &a.y) * (&b.x - &a.x) / (&b.y - &a.y));
        }
    }
    panic!("level outside polygon");
}

impl Layout {
    pub fn x_left(&self, p: usize, y: &QuadElem) -> QuadElem {
        chain_x(self.frame.polygon(p), &self.left[p], y)
    }

    pub fn x_right(&self, p: usize, y: &QuadElem) -> QuadElem {
        chain_x(self.frame.polygon(p), &self.right[p], y)
    }

    pub fn mid_level(&self, p: usize, j: usize) -> QuadElem {
        (&self.levels[p][j] + &self.levels[p][j + 1]).scale(&Rational::new(1.into(), 2.into()))
    }
}

struct Chains {
    right: Vec<Vec<usize>>,
    left: Vec<Vec<usize>>,
}

fn chains(s: &TranslationSurface) -> Chains {
    let mut right = Vec::new();
    let mut left = Vec::new();
    for poly in s.polygons() {
        let n = poly.len();
        right.push((0..n).filter(|&k| poly.edge_vector(k).y.is_positive()).collect());
        left.push((0..n).filter(|&k| poly.edge_vector(k).y.is_negative()).collect());
    }
    Chains { right, left }
}

struct Sep {
    start: Corner,
    end: Corner,
    crossings: Vec<EdgeRef>,
}

enum Traced {
    Done {
        east: Vec<Sep>,
        west: Vec<Sep>,
        levels: Vec<Vec<QuadElem>>,
    },
    Capped(usize),
}

fn trace_all<I: Int>(
    s: &TranslationSurface,
    ch: &Chains,
    starts: [&[Corner]; 2],
    cap: usize,
) -> Result<Traced, Overflow> {
    let field = s.field();
    let n = common_denominator(
        s.polygons()
            .iter()
            .flat_map(|p| p.vertices().iter().map(|v| &v.y)),
    );
    let d = I::from_big(&BigInt::from(field)).ok_or(Overflow)?;
    let mut ys: Vec<Vec<Z2<I>>> = Vec::new();
    let mut tau: Vec<Vec<Z2<I>>> = Vec::new();
    for (p, poly) in s.polygons().iter().enumerate() {
        let mut row = Vec::new();
        for v in poly.vertices() {
            row.push(encode(&v.y, &n).ok_or(Overflow)?);
        }
        ys.push(row);
        let mut t = Vec::new();
        for k in 0..poly.len() {
            t.push(encode(&s.edge_translation(EdgeRef::new(p, k)).y, &n).ok_or(Overflow)?);
        }
        tau.push(t);
    }
    let mut seen: HashSet<(usize, Z2<I>)> = HashSet::new();
    let mut out: [Vec<Sep>; 2] = [Vec::new(), Vec::new()];
    for (dir, list) in starts.iter().enumerate() {
        let chain = if dir == 0 { &ch.right } else { &ch.left };
        for &start in list.iter() {
            let mut p = start.polygon;
            let mut y = ys[p][start.vertex].clone();
            let mut crossings = Vec::new();
            let end = loop {
                seen.insert((p, y.clone()));
                let row = &ys[p];
                let n_p = row.len();
                let mut found = None;
                for &k in &chain[p] {
                    let (u, w) = (&row[k], &row[(k + 1) % n_p]);
                    if y == *u {
                        found = Some(Err(k));
                        break;
                    }
                    if y == *w {
                        found = Some(Err((k + 1) % n_p));
                        break;
                    }
                    let (lo, hi) = if dir == 0 { (u, w) } else { (w, u) };
                    if y.cmp(lo, &d)?.is_gt() && y.cmp(hi, &d)?.is_lt() {
                        found = Some(Ok(k));
                        break;
                    }
                }
                match found.expect("horizontal line meets the polygon side") {
                    Err(vertex) => break Corner { polygon: p, vertex },
                    Ok(k) => {
                        if crossings.len() == cap {
                            return Ok(Traced::Capped(cap));
                        }
                        let edge = EdgeRef::new(p, k);
                        crossings.push(edge);
                        y = y.checked_add(&tau[p][k])?;
                        p = s.glued(edge).polygon;
                    }
                }
            };
            out[dir].push(Sep {
                start,
                end,
                crossings,
            });
        }
    }
    let mut levels: Vec<Vec<QuadElem>> = s
        .polygons()
        .iter()
        .map(|p| p.vertices().iter().map(|v| v.y.clone()).collect())
        .collect();
    for (p, z) in seen {
        levels[p].push(decode(&z, &n, field));
    }
    for row in levels.iter_mut() {
        row.sort_by(|a, b| a.cmp_value(b));
        row.dedup();
    }
    let [east, west] = out;
    Ok(Traced::Done { east, west, levels })
}

fn starts_in(s: &TranslationSurface, dir: &Vec2) -> Vec<Corner> {
    let mut out = Vec::new();
    for (p, poly) in s.polygons().iter().enumerate() {
        for i in 0..poly.len() {
            let c = Corner {
                polygon: p,
                vertex: i,
            };
            let (from, to) = corner_sector(s, c);
            if in_arc_half_open(&from, &to, dir) {
                out.push(c);
            }
        }
    }
    out
}

/// Decomposes the flow in direction `dir` into cylinders, or reports
/// `Undetermined` when some separatrix crosses more than `step_cap` edges.
pub fn decompose(s: &TranslationSurface, dir: &Vec2, step_cap: usize) -> Result<Decomposition, FlowError> {
    if step_cap == 0 {
        return Err(FlowError::BadStepCap);
    }
    let direction = canonical_direction(dir)?;
    let base = s.convexified()?;
    let to_frame = Mat2::conformal_to_horizontal(&direction);
    let from_frame = to_frame.inverse().expect("nonzero direction");
    let frame = base.apply_linear(&to_frame)?;
    let d = frame.field();
    let ch = chains(&frame);
    let east_dir = Vec2::ints(1, 0, d);
    let west_dir = Vec2::ints(-1, 0, d);
    let east_starts = starts_in(&frame, &east_dir);
    let west_starts = starts_in(&frame, &west_dir);
    let starts = [east_starts.as_slice(), west_starts.as_slice()];
    let traced = match trace_all::<i128>(&frame, &ch, starts, step_cap) {
        Ok(t) => t,
        Err(Overflow) => {
            trace_all::<BigInt>(&frame, &ch, starts, step_cap).expect("big integers do not overflow")
        }
    };
    let (east, west, levels) = match traced {
        Traced::Capped(steps) => {
            return Ok(Decomposition {
                direction,
                status: DecompositionStatus::Undetermined {
                    steps_exhausted: steps,
                },
                layout: None,
            })
        }
        Traced::Done { east, west, levels } => (east, west, levels),
    };
    debug_assert_eq!(east.len(), west.len());

    // horizontal saddle connections and the levels their segments occupy
    let mut saddle_connections = Vec::with_capacity(east.len());
    let mut on_level: HashMap<(usize, QuadElem), Vec<usize>> = HashMap::new();
    for (id, sep) in east.iter().enumerate() {
        let start_poly = frame.polygon(sep.start.polygon);
        let mut y = start_poly.vertex(sep.start.vertex).y.clone();
        let mut p = sep.start.polygon;
        let mut shift = QuadElem::zero(d);
        on_level.entry((p, y.clone())).or_default().push(id);
        for &e in &sep.crossings {
            let t = frame.edge_translation(e);
            shift = shift + t.x;
            y = y + t.y;
            p = frame.glued(e).polygon;
            on_level.entry((p, y.clone())).or_default().push(id);
        }
        if sep.crossings.is_empty() {
            let e = EdgeRef::new(sep.start.polygon, sep.start.vertex);
            if start_poly.edge_vector(sep.start.vertex).y.is_zero() {
                let t = frame.edge_translation(e);
                let q = frame.glued(e).polygon;
                on_level.entry((q, &y + &t.y)).or_default().push(id);
            }
        }
        let x0 = &start_poly.vertex(sep.start.vertex).x;
        let x1 = &frame.polygon(sep.end.polygon).vertex(sep.end.vertex).x;
        let hx = x1 - x0 - shift;
        debug_assert!(hx.is_positive());
        saddle_connections.push(SaddleConnection {
            start: sep.start,
            start_class: frame.vertex_class(sep.start),
            end: sep.end,
            end_class: frame.vertex_class(sep.end),
            holonomy: from_frame.apply(&Vec2::new(hx, QuadElem::zero(d))),
            crossings: sep.crossings.clone(),
        });
    }
    drop(west);

    // right neighbour of every slab
    let index: Vec<HashMap<QuadElem, usize>> = levels
        .iter()
        .map(|row| row.iter().cloned().enumerate().map(|(i, y)| (y, i)).collect())
        .collect();
    let mut next: Vec<Vec<(usize, usize, QuadElem)>> = Vec::new();
    for (p, row) in levels.iter().enumerate() {
        let poly = frame.polygon(p);
        let mut out = Vec::new();
        for j in 0..row.len() - 1 {
            let (lo, hi) = (&row[j], &row[j + 1]);
            let k = ch.right[p]
                .iter()
                .copied()
                .find(|&k| {
                    let (a, b) = poly.edge_points(k);
                    a.y <= *lo && *hi <= b.y
                })
                .expect("slab has a right side");
            let e = EdgeRef::new(p, k);
            let t = frame.edge_translation(e);
            let q = frame.glued(e).polygon;
            let m = *index[q]
                .get(&(lo + &t.y))
                .expect("slab levels agree across glued edges");
            assert_eq!(
                levels[q][m + 1],
                hi + &t.y,
                "slab levels agree across glued edges"
            );
            out.push((q, m, t.x));
        }
        next.push(out);
    }

    let mut slab_cylinder: Vec<Vec<usize>> = levels.iter().map(|r| vec![usize::MAX; r.len() - 1]).collect();
    let mut cycles: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut cylinders = Vec::new();
    let half = Rational::new(1.into(), 2.into());
    let layout_chains = (ch.right.clone(), ch.left.clone());
    let x_on = |chain: &Vec<Vec<usize>>, p: usize, y: &QuadElem| chain_x(frame.polygon(p), &chain[p], y);
    let mut cylinder_area = QuadElem::zero(d);
    for p in 0..levels.len() {
        for j in 0..levels[p].len() - 1 {
            if slab_cylinder[p][j] != usize::MAX {
                continue;
            }
            let id = cycles.len();
            let mut cycle = Vec::new();
            let (mut cp, mut cj) = (p, j);
            let height = &levels[p][j + 1] - &levels[p][j];
            let mut circumference = QuadElem::zero(d);
            let mut shift = QuadElem::zero(d);
            let mut bottom_min: Option<QuadElem> = None;
            let mut top_min: Option<QuadElem> = None;
            let mut bottom = Vec::new();
            let mut top = Vec::new();
            loop {
                slab_cylinder[cp][cj] = id;
                cycle.push((cp, cj));
                let (lo, hi) = (&levels[cp][cj], &levels[cp][cj + 1]);
                assert_eq!(&(hi - lo), &height, "slabs of one cylinder share a height");
                let w_lo = x_on(&ch.right, cp, lo) - x_on(&ch.left, cp, lo);
                let w_hi = x_on(&ch.right, cp, hi) - x_on(&ch.left, cp, hi);
                circumference = circumference + (w_lo + w_hi).scale(&half);
                for v in frame.polygon(cp).vertices() {
                    let u = &v.x + &shift;
                    let slot = if v.y == *lo {
                        &mut bottom_min
                    } else if v.y == *hi {
                        &mut top_min
                    } else {
                        continue;
                    };
                    if slot.as_ref().is_none_or(|m| u < *m) {
                        *slot = Some(u);
                    }
                }
                if let Some(ids) = on_level.get(&(cp, lo.clone())) {
                    bottom.extend_from_slice(ids);
                }
                if let Some(ids) = on_level.get(&(cp, hi.clone())) {
                    top.extend_from_slice(ids);
                }
                let (q, m, tx) = &next[cp][cj];
                shift = shift - tx;
                (cp, cj) = (*q, *m);
                if (cp, cj) == (p, j) {
                    break;
                }
            }
            bottom.sort_unstable();
            bottom.dedup();
            top.sort_unstable();
            top.dedup();
            let raw = top_min.expect("cylinder top has a singularity")
                - bottom_min.expect("cylinder bottom has a singularity");
            let wraps = QuadElem::rational(Rational::from_integer((&raw / &circumference).floor()), d);
            let twist = raw - wraps * circumference.clone();
            cylinder_area = cylinder_area + &circumference * &height;
            cylinders.push(Cylinder {
                circumference,
                height,
                twist,
                bottom,
                top,
            });
            cycles.push(cycle);
        }
    }
    let area_check = AreaCheck {
        surface_area: frame.area(),
        cylinder_area,
    };
    let layout = Layout {
        base,
        frame: frame.clone(),
        to_frame,
        from_frame,
        levels,
        slab_cylinder,
        cycles,
        right: layout_chains.0,
        left: layout_chains.1,
    };
    Ok(Decomposition {
        direction,
        status: DecompositionStatus::Periodic(Periodic {
            cylinders,
            saddle_connections,
            area_check,
        }),
        layout: Some(Arc::new(layout)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::fixtures::{octagon, torus};

    fn single(dec: &Decomposition) -> (QuadElem, QuadElem) {
        let cs = dec.cylinders().expect("periodic");
        assert_eq!(cs.len(), 1);
        (cs[0].circumference.clone(), cs[0].height.clone())
    }

    #[test]
    fn torus_horizontal() {
        let dec = decompose(&torus(2), &Vec2::ints(1, 0, 2), 100).unwrap();
        assert_eq!(single(&dec), (QuadElem::one(2), QuadElem::one(2)));
        let p = dec.periodic().unwrap();
        assert!(p.area_check.holds());
        assert_eq!(p.saddle_connections.len(), 1);
        assert_eq!(p.cylinders[0].bottom, vec![0]);
        assert_eq!(p.cylinders[0].top, vec![0]);
        assert_eq!(p.cylinders[0].twist, QuadElem::zero(2));
    }

    #[test]
    fn torus_two_one() {
        let dec = decompose(&torus(2), &Vec2::ints(2, 1, 2), 100).unwrap();
        assert_eq!(single(&dec), (QuadElem::int(5, 2), QuadElem::one(2)));
        assert_eq!(
            cylinder_modulus(&dec.cylinders().unwrap()[0]),
            QuadElem::frac(1, 5, 2)
        );
        let p = dec.periodic().unwrap();
        assert_eq!(p.saddle_connections[0].holonomy, Vec2::ints(2, 1, 2));
        assert!(p.area_check.holds());
    }

    #[test]
    fn torus_irrational_is_undetermined() {
        let dir = Vec2::new(QuadElem::one(2), QuadElem::sqrt_d(2));
        let dec = decompose(&torus(2), &dir, 1000).unwrap();
        assert_eq!(
            dec.status,
            DecompositionStatus::Undetermined {
                steps_exhausted: 1000
            }
        );
    }

    #[test]
    fn octagon_horizontal_has_two_cylinders_of_equal_modulus() {
        let dec = decompose(&octagon(), &Vec2::ints(1, 0, 2), 1000).unwrap();
        let moduli = dec.moduli().unwrap();
        assert_eq!(moduli.len(), 2);
        let ratio = &moduli[0] / &moduli[1];
        assert!(ratio.is_rational());
        assert!(dec.periodic().unwrap().area_check.holds());
    }

    #[test]
    fn pieces_tile_the_cylinders() {
        for (s, dir) in [
            (octagon(), Vec2::ints(1, 0, 2)),
            (octagon(), Vec2::ints(0, 1, 2)),
            (torus(2), Vec2::ints(2, 1, 2)),
        ] {
            let dec = decompose(&s, &dir, 1000).unwrap();
            let cyls = dec.cylinders().unwrap();
            let det = dec.layout.as_ref().unwrap().to_frame.det();
            let mut area = vec![QuadElem::zero(2); cyls.len()];
            for piece in dec.cylinder_pieces().unwrap() {
                let poly = PlanarPolygon::new(piece.vertices).unwrap();
                area[piece.cylinder] = &area[piece.cylinder] + &(poly.area() * &det);
            }
            for (a, c) in area.iter().zip(cyls) {
                assert_eq!(*a, &c.circumference * &c.height);
            }
        }
    }

    #[test]
    fn scaled_direction_gives_same_result() {
        let a = decompose(&torus(3), &Vec2::ints(1, 1, 3), 100).unwrap();
        let b = decompose(&torus(3), &Vec2::ints(3, 3, 3), 100).unwrap();
        assert_eq!(a.direction, b.direction);
        assert_eq!(a.status, b.status);
    }
}
