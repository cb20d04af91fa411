use super::ModelError;
use crate::flow::{crossing_counts, Decomposition, FlowError};
use crate::surface::{PolygonImage, SurfaceError};

/// Groups the cylinders of a periodic decomposition into orbits of the
/// half-turn: swapped pairs first, then fixed cylinders, each ordered by
/// smallest index.
pub fn cylinder_orbits(
    dec: &Decomposition,
    involution: &[PolygonImage],
) -> Result<Vec<Vec<usize>>, ModelError> {
    let layout = dec.layout.as_ref().ok_or(FlowError::NotPeriodic)?;
    if involution.len() != layout.base.polygons().len() {
        return Err(SurfaceError::MalformedMap(
            "involution does not match the decomposed presentation".into(),
        )
        .into());
    }
    let count = layout.cycles.len();
    let mut image = Vec::with_capacity(count);
    for c in 0..count {
        let (p, x) = dec.core_point(c).expect("periodic");
        let (q, y) = layout.base.involution_point(involution, p, &x);
        let img = dec.cylinder_at(q, &y).ok_or(ModelError::InvolutionFailure)?;
        image.push(img);
    }
    let mut pairs = Vec::new();
    let mut fixed = Vec::new();
    for c in 0..count {
        let i = image[c];
        if image[i] != c {
            return Err(ModelError::InvolutionFailure);
        }
        if i == c {
            fixed.push(vec![c]);
        } else if c < i {
            pairs.push(vec![c, i]);
        }
    }
    pairs.extend(fixed);
    Ok(pairs)
}

/// Intersection numbers between the core curves of `h` and `v` cylinders.
///
/// Without an involution this is the raw matrix of [`crossing_counts`].
/// With one, rows and columns are merged over half-turn orbits (see
/// [`cylinder_orbits`]) by summing the entries of each block, which for the
/// three-cylinder Prym models yields a 2×2 matrix indexed by
/// (`{C1, C3}`, `C2`).
pub fn intersection_matrix(
    h: &Decomposition,
    v: &Decomposition,
    involution: Option<&[PolygonImage]>,
) -> Result<Vec<Vec<u64>>, ModelError> {
    let counts = crossing_counts(h, v)?;
    let Some(map) = involution else {
        return Ok(counts);
    };
    let rows = cylinder_orbits(h, map)?;
    let cols = cylinder_orbits(v, map)?;
    Ok(rows
        .iter()
        .map(|r| {
            cols.iter()
                .map(|c| {
                    r.iter()
                        .flat_map(|&i| c.iter().map(move |&j| (i, j)))
                        .map(|(i, j)| counts[i][j])
                        .sum()
                })
                .collect()
        })
        .collect())
}
