use serde::{Deserialize, Serialize};

use super::FlowError;
use crate::geom::{in_arc_half_open, Vec2};
use crate::qfield::QuadElem;
use crate::surface::{Corner, EdgeRef, TranslationSurface};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RayStart {
    /// Leave the singularity at this corner, using the first sector at or
    /// counterclockwise after the corner that contains the direction.
    Singularity(Corner),
    /// A point of the closed polygon that is not a vertex.
    Point { polygon: usize, point: Vec2 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceOutcome {
    HitSingularity {
        end: Corner,
        end_class: usize,
        holonomy: Vec2,
        crossings: Vec<EdgeRef>,
    },
    CapExceeded {
        steps: usize,
    },
}

/// Outgoing sector of corner `c`: directions in `[e_i, −e_{i−1})`.
pub(crate) fn corner_sector(s: &TranslationSurface, c: Corner) -> (Vec2, Vec2) {
    let poly = s.polygon(c.polygon);
    let n = poly.len();
    (
        poly.edge_vector(c.vertex),
        poly.edge_vector((c.vertex + n - 1) % n).neg(),
    )
}

/// The corner at or after `c` (counterclockwise around its vertex) whose
/// sector contains `dir`.
pub(crate) fn sector_for(s: &TranslationSurface, c: Corner, dir: &Vec2) -> Corner {
    let class = &s.vertex_classes()[s.vertex_class(c)];
    let pos = class
        .corners
        .iter()
        .position(|x| *x == c)
        .expect("corner in its class");
    let k = class.corners.len();
    for step in 0..k {
        let cand = class.corners[(pos + step) % k];
        let (from, to) = corner_sector(s, cand);
        if in_arc_half_open(&from, &to, dir) {
            return cand;
        }
    }
    unreachable!("sectors around a vertex cover every direction")
}

/// Follows the straight line from `start` in direction `dir` until it reaches
/// a vertex or has crossed `step_cap` edges.
pub fn trace_ray(
    s: &TranslationSurface,
    start: &RayStart,
    dir: &Vec2,
    step_cap: usize,
) -> Result<TraceOutcome, FlowError> {
    if dir.is_zero() {
        return Err(FlowError::ZeroDirection);
    }
    if step_cap == 0 {
        return Err(FlowError::BadStepCap);
    }
    if !s.is_convex() {
        return Err(FlowError::NonConvex);
    }
    let d = s.field();
    let (mut p, mut point) = match start {
        RayStart::Singularity(c) => {
            let c = sector_for(s, *c, dir);
            (c.polygon, s.polygon(c.polygon).vertex(c.vertex).clone())
        }
        RayStart::Point { polygon, point } => {
            if *polygon >= s.polygons().len() {
                return Err(FlowError::PointOutside(*polygon));
            }
            let poly = s.polygon(*polygon);
            if poly.vertices().iter().any(|v| v == point) {
                return Err(FlowError::StartsOnVertexAmbiguous);
            }
            let inside = (0..poly.len()).all(|k| {
                let (a, _) = poly.edge_points(k);
                !poly.edge_vector(k).cross(&point.sub(a)).is_negative()
            });
            if !inside {
                return Err(FlowError::PointOutside(*polygon));
            }
            (*polygon, point.clone())
        }
    };
    let v2 = dir.norm2();
    let mut total = QuadElem::zero(d);
    let mut crossings = Vec::new();
    loop {
        let poly = s.polygon(p);
        let n = poly.len();
        // exit parameter through the convex polygon
        let mut best: Option<(QuadElem, usize)> = None;
        for k in 0..n {
            let e = poly.edge_vector(k);
            let c = e.cross(dir);
            if !c.is_negative() {
                continue;
            }
            let (a, _) = poly.edge_points(k);
            let t = e.cross(&point.sub(a)) / (-c);
            if best.as_ref().is_none_or(|(bt, _)| t < *bt) {
                best = Some((t, k));
            }
        }
        let (t_exit, k_exit) = best.expect("a ray leaves every bounded convex polygon");
        // a vertex on (point, exit] stops the ray
        let reach = &t_exit * &v2;
        let mut hit: Option<(QuadElem, usize)> = None;
        for (m, w) in poly.vertices().iter().enumerate() {
            let u = w.sub(&point);
            if u.is_zero() || !dir.cross(&u).is_zero() {
                continue;
            }
            let along = u.dot(dir);
            if along.is_positive() && along <= reach && hit.as_ref().is_none_or(|(b, _)| along < *b) {
                hit = Some((along, m));
            }
        }
        if let Some((along, m)) = hit {
            total = total + along / v2.clone();
            let end = Corner {
                polygon: p,
                vertex: m,
            };
            return Ok(TraceOutcome::HitSingularity {
                end,
                end_class: s.vertex_class(end),
                holonomy: dir.scale(&total),
                crossings,
            });
        }
        if crossings.len() == step_cap {
            return Ok(TraceOutcome::CapExceeded { steps: step_cap });
        }
        let edge = EdgeRef::new(p, k_exit);
        let exit = point.add(&dir.scale(&t_exit));
        point = exit.add(&s.edge_translation(edge));
        p = s.glued(edge).polygon;
        total = total + t_exit;
        crossings.push(edge);
    }
}
