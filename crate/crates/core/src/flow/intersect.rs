use super::decompose::Decomposition;
use super::{projective_direction, FlowError};
use crate::qfield::QuadElem;

/// `counts[i][j]` is the number of points where the core curve of cylinder
/// `i` of `h` meets the core curve of cylinder `j` of `v`.
///
/// The core curve of each `v` cylinder is walked slab by slab; each pass
/// through a polygon is a straight segment, and every midline of an `h` slab
/// it crosses in that polygon is one intersection. Segment starts are
/// counted and ends are not, so points on polygon edges count once.
pub fn crossing_counts(h: &Decomposition, v: &Decomposition) -> Result<Vec<Vec<u64>>, FlowError> {
    let (Some(hl), Some(vl)) = (h.layout.as_ref(), v.layout.as_ref()) else {
        return Err(FlowError::NotPeriodic);
    };
    if hl.base != vl.base {
        return Err(FlowError::SurfaceMismatch);
    }
    if projective_direction(&h.direction)? == projective_direction(&v.direction)? {
        return Err(FlowError::NotTransverse);
    }
    let mut counts = vec![vec![0u64; vl.cycles.len()]; hl.cycles.len()];
    for (j, cycle) in vl.cycles.iter().enumerate() {
        for &(p, slab) in cycle {
            let ym = vl.mid_level(p, slab);
            let a = vl
                .from_frame
                .apply(&crate::geom::Vec2::new(vl.x_left(p, &ym), ym.clone()));
            let b = vl
                .from_frame
                .apply(&crate::geom::Vec2::new(vl.x_right(p, &ym), ym));
            let ya = hl.to_frame.apply(&a).y;
            let yb = hl.to_frame.apply(&b).y;
            let rising = ya < yb;
            for i in 0..hl.levels[p].len() - 1 {
                let mid: QuadElem = hl.mid_level(p, i);
                let hit = if rising {
                    ya <= mid && mid < yb
                } else {
                    yb < mid && mid <= ya
                };
                if hit {
                    counts[hl.slab_cylinder[p][i]][j] += 1;
                }
            }
        }
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::decompose;
    use crate::geom::Vec2;
    use crate::surface::fixtures::torus;

    #[test]
    fn torus_core_curves_meet_once() {
        let t = torus(2);
        let h = decompose(&t, &Vec2::ints(1, 0, 2), 10).unwrap();
        let v = decompose(&t, &Vec2::ints(0, 1, 2), 10).unwrap();
        assert_eq!(crossing_counts(&h, &v).unwrap(), vec![vec![1]]);
        assert_eq!(crossing_counts(&h, &h), Err(FlowError::NotTransverse));
        let d = decompose(&t, &Vec2::ints(1, 1, 2), 10).unwrap();
        assert_eq!(crossing_counts(&h, &d).unwrap(), vec![vec![1]]);
        let e = decompose(&t, &Vec2::ints(1, 2, 2), 10).unwrap();
        // (1,0) and (1,2) have determinant 2
        assert_eq!(crossing_counts(&h, &e).unwrap(), vec![vec![2]]);
    }
}
