//! Integer prefilter for the candidate grid search.
//!
//! With rational twists and slit, every horizontal position on a candidate
//! is `(a0 + a1·w2) / L` for integers `a0, a1` and one common denominator
//! `L`, and `w2 = (α + β√D) / 2` with integer `α, β`. The vertical flow then
//! reduces to an interval exchange on the concatenated cylinder bottoms that
//! can be run on machine integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::diagram::{CylinderDiagram, TwistParam};
use super::enumerate::rational_lengths;
use super::expr::Param;
use crate::qfield::{QuadElem, Rational};

/// `(a0 + a1·w2) / L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Val(i128, i128);

impl Val {
    fn add(self, o: Val) -> Val {
        Val(self.0 + o.0, self.1 + o.1)
    }
    fn sub(self, o: Val) -> Val {
        Val(self.0 - o.0, self.1 - o.1)
    }
}

/// Diagram data that does not depend on the grid point.
#[derive(Debug, Clone)]
pub(crate) struct FastDiagram {
    d: i128,
    alpha: i128,
    beta: i128,
    /// Common denominator of the grid values.
    grid_den: i128,
    /// Common denominator of the diagram coefficients.
    coeff_den: i128,
    /// Length coefficients of `1`, `w2`, `s`, times `coeff_den`.
    lengths: Vec<[i128; 3]>,
    /// Width coefficients of `1`, `w2`, times `coeff_den`.
    widths: Vec<[i128; 2]>,
    twists: Vec<TwistParam>,
    bottoms: Vec<Vec<usize>>,
    tops: Vec<Vec<usize>>,
    /// Cylinder and position of each label on the bottoms.
    bottom_of: Vec<(usize, usize)>,
}

/// Integer data of one grid point.
#[derive(Debug, Clone)]
pub(crate) struct FastPoint<'a> {
    diagram: &'a FastDiagram,
    widths: Vec<Val>,
    twists: Vec<Val>,
    lengths: Vec<Val>,
    bottom_pos: Vec<Val>,
    top_pos: Vec<Vec<Val>>,
    offsets: Vec<Val>,
}

impl FastDiagram {
    /// Prefilter for grid values with denominators dividing `grid_den`.
    /// `None` unless lengths and widths are rational affine in `w2` and `s`,
    /// `2·w2` has integer coordinates, and all values stay well inside `i128`.
    pub fn new(diagram: &CylinderDiagram, w2: &QuadElem, grid_den: u64) -> Option<Self> {
        let two = Rational::from_integer(2.into());
        let (a, b) = (w2.a() * &two, w2.b() * &two);
        if !a.is_integer() || !b.is_integer() || b.is_zero() {
            return None;
        }
        let mut widths = Vec::new();
        for cyl in &diagram.cylinders {
            if cyl.width.uses(Param::S) || cyl.width.uses(Param::H2) {
                return None;
            }
            widths.push([
                cyl.width.rational_coeff(Param::One)?,
                cyl.width.rational_coeff(Param::W2)?,
            ]);
        }
        let lengths = rational_lengths(diagram)?;
        let mut coeff_den = BigInt::from(1);
        for c in lengths.iter().flatten().chain(widths.iter().flatten()) {
            coeff_den = coeff_den.lcm(c.denom());
        }
        let scale = Rational::from_integer(coeff_den.clone());
        let int = |r: &Rational| (r * &scale).to_integer().to_i128();
        let coeff_den = coeff_den.to_i128()?;
        let grid_den = grid_den as i128;
        if grid_den.checked_mul(coeff_den)? > 1_000_000_000_000 {
            return None;
        }
        let lengths = lengths
            .iter()
            .map(|[a, b, c]| Some([int(a)?, int(b)?, int(c)?]))
            .collect::<Option<Vec<_>>>()?;
        let widths = widths
            .iter()
            .map(|[a, b]| Some([int(a)?, int(b)?]))
            .collect::<Option<Vec<_>>>()?;
        if lengths
            .iter()
            .flatten()
            .chain(widths.iter().flatten())
            .any(|c| c.abs() > 1_000_000)
        {
            return None;
        }
        let mut bottom_of = vec![(0, 0); diagram.label_count()];
        for (c, cyl) in diagram.cylinders.iter().enumerate() {
            for (i, &l) in cyl.bottom.iter().enumerate() {
                bottom_of[l] = (c, i);
            }
        }
        Some(FastDiagram {
            d: w2.field() as i128,
            alpha: a.to_integer().to_i128()?,
            beta: b.to_integer().to_i128()?,
            grid_den,
            coeff_den,
            lengths,
            widths,
            twists: diagram.cylinders.iter().map(|c| c.twist).collect(),
            bottoms: diagram.cylinders.iter().map(|c| c.bottom.clone()).collect(),
            tops: diagram.cylinders.iter().map(|c| c.top.clone()).collect(),
            bottom_of,
        })
    }

    /// Sign of `(a0 + a1·w2)` as an integer comparison.
    fn sign(&self, v: Val) -> i8 {
        // 2·(a0 + a1·w2) = (2·a0 + a1·α) + a1·β·√D
        let x = 2 * v.0 + v.1 * self.alpha;
        let y = v.1 * self.beta;
        let sx = x.signum() as i8;
        let sy = y.signum() as i8;
        if sy == 0 {
            return sx;
        }
        if sx == 0 || sx == sy {
            return sy;
        }
        match (x * x).cmp(&(self.d * y * y)) {
            std::cmp::Ordering::Greater => sx,
            std::cmp::Ordering::Less => sy,
            std::cmp::Ordering::Equal => 0,
        }
    }

    /// Numerator of `r` over the grid denominator.
    pub fn numerator(&self, r: &Rational) -> Option<i128> {
        (r * Rational::from_integer(self.grid_den.into()))
            .to_integer()
            .to_i128()
            .filter(|n| n.abs() < 1_000_000_000_000)
    }

    /// Integer data at `(t1, t2, s)`, given as numerators over the grid
    /// denominator, or `None` if some length is not positive, a twist leaves
    /// `[0, W)`, or a boundary does not add up.
    pub fn point(&self, t1: i128, t2: i128, s: i128) -> Option<FastPoint<'_>> {
        let g = self.grid_den;
        let mut lengths = Vec::with_capacity(self.lengths.len());
        for [c0, cw, cs] in &self.lengths {
            let v = Val(c0 * g + cs * s, cw * g);
            if self.sign(v) <= 0 {
                return None;
            }
            lengths.push(v);
        }
        let widths: Vec<Val> = self.widths.iter().map(|[c0, cw]| Val(c0 * g, cw * g)).collect();
        let mut twists = Vec::with_capacity(widths.len());
        for (c, tw) in self.twists.iter().enumerate() {
            let t = match tw {
                TwistParam::T1 => Val(t1 * self.coeff_den, 0),
                TwistParam::T2 => Val(t2 * self.coeff_den, 0),
                TwistParam::Zero => Val(0, 0),
            };
            if self.sign(t) < 0 || self.sign(widths[c].sub(t)) <= 0 {
                return None;
            }
            twists.push(t);
        }
        let mut bottom_pos = vec![Val(0, 0); lengths.len()];
        let mut top_pos = Vec::new();
        let mut offsets = Vec::new();
        let mut acc = Val(0, 0);
        for c in 0..self.bottoms.len() {
            offsets.push(acc);
            acc = acc.add(widths[c]);
            let mut x = Val(0, 0);
            for &lab in &self.bottoms[c] {
                bottom_pos[lab] = x;
                x = x.add(lengths[lab]);
            }
            if x != widths[c] {
                return None;
            }
            let mut x = Val(0, 0);
            let mut row = Vec::new();
            for &lab in &self.tops[c] {
                row.push(x);
                x = x.add(lengths[lab]);
            }
            if x != widths[c] {
                return None;
            }
            top_pos.push(row);
        }
        Some(FastPoint {
            diagram: self,
            widths,
            twists,
            lengths,
            bottom_pos,
            top_pos,
            offsets,
        })
    }
}

impl FastPoint<'_> {
    /// `Σ λ ∧ δ` over the pieces of the vertical first-return map, as the
    /// coefficient of `1 ∧ w2`; zero iff the SAF invariant vanishes.
    pub fn saf(&self) -> i128 {
        let fd = self.diagram;
        let wedge = |x: Val, y: Val| x.0 * y.1 - x.1 * y.0;
        let mut total = 0i128;
        for c in 0..fd.tops.len() {
            let (w, t) = (self.widths[c], self.twists[c]);
            for (j, &lab) in fd.tops[c].iter().enumerate() {
                let start = self.top_pos[c][j];
                let len = self.lengths[lab];
                let (c2, _) = fd.bottom_of[lab];
                let mut u0 = start.add(t);
                let mut base = self.offsets[c2]
                    .add(self.bottom_pos[lab])
                    .sub(start)
                    .sub(self.offsets[c])
                    .sub(t);
                if fd.sign(u0.sub(w)) >= 0 {
                    u0 = u0.sub(w);
                    base = base.add(w);
                }
                let over = u0.add(len).sub(w);
                if fd.sign(over) > 0 {
                    total += wedge(len.sub(over), base) + wedge(over, base.add(w));
                } else {
                    total += wedge(len, base);
                }
            }
        }
        total
    }

    /// Top segment hit by the vertical through bottom position `u` of
    /// cylinder `c` as `(label, offset)`, or `None` when it ends at a top
    /// break point. With `right_limit` a break point counts as the start
    /// of the following segment.
    fn step(&self, c: usize, u: Val, right_limit: bool) -> Option<(usize, Val)> {
        let fd = self.diagram;
        let mut v = u.sub(self.twists[c]);
        if fd.sign(v) < 0 {
            v = v.add(self.widths[c]);
        }
        let row = &self.top_pos[c];
        let mut j = 0;
        for (k, &p) in row.iter().enumerate() {
            match fd.sign(v.sub(p)) {
                0 if !right_limit => return None,
                0 | 1 => j = k,
                _ => break,
            }
        }
        Some((fd.tops[c][j], v.sub(row[j])))
    }

    /// Bottom positions visited by the upward vertical separatrices, per
    /// cylinder, or `None` if one of them makes more than `cap` cylinder
    /// traversals without reaching a singularity.
    fn separatrix_points(&self, cap: usize) -> Option<Vec<Vec<Val>>> {
        let fd = self.diagram;
        let mut points: Vec<Vec<Val>> = vec![Vec::new(); fd.bottoms.len()];
        for c0 in 0..fd.bottoms.len() {
            for &lab0 in &fd.bottoms[c0] {
                let (mut c, mut u) = (c0, self.bottom_pos[lab0]);
                let mut steps = 0;
                loop {
                    points[c].push(u);
                    if steps == cap {
                        return None;
                    }
                    steps += 1;
                    match self.step(c, u, false) {
                        None => break,
                        Some((lab, off)) => {
                            c = fd.bottom_of[lab].0;
                            u = self.bottom_pos[lab].add(off);
                        }
                    }
                }
            }
        }
        for list in &mut points {
            list.sort_by(|a, b| fd.sign(a.sub(*b)).cmp(&0));
            list.dedup();
        }
        Some(points)
    }

    /// For each vertical cylinder, the number of times its core curve
    /// crosses each horizontal cylinder, summed by `group[c]`. `None` under
    /// if some upward vertical separatrix
    /// makes more than `cap` cylinder traversals without reaching a
    /// singularity.
    pub fn vertical_columns(&self, cap: usize, group: &[usize], groups: usize) -> Option<Vec<Vec<u64>>> {
        let fd = self.diagram;
        let points = self.separatrix_points(cap)?;
        // Between consecutive separatrix points the first-return map is a
        // translation, so every such interval lies in one vertical cylinder
        // and is carried onto another such interval.
        let mut index = std::collections::HashMap::new();
        for (c, list) in points.iter().enumerate() {
            for (k, &u) in list.iter().enumerate() {
                index.insert((c, u), (c, k));
            }
        }
        let mut seen: Vec<Vec<bool>> = points.iter().map(|l| vec![false; l.len()]).collect();
        let mut columns = Vec::new();
        for c0 in 0..points.len() {
            for k0 in 0..points[c0].len() {
                if seen[c0][k0] {
                    continue;
                }
                let mut col = vec![0u64; groups];
                let (mut c, mut k) = (c0, k0);
                while !seen[c][k] {
                    seen[c][k] = true;
                    col[group[c]] += 1;
                    let (lab, off) = self.step(c, points[c][k], true)?;
                    let c2 = fd.bottom_of[lab].0;
                    let u = self.bottom_pos[lab].add(off);
                    (c, k) = *index.get(&(c2, u))?;
                }
                if (c, k) != (c0, k0) {
                    return None;
                }
                columns.push(col);
            }
        }
        Some(columns)
    }
}

/// Row group of each horizontal cylinder of a Prym model: `0` for the
/// swapped pair and `1` for the fixed cylinder.
pub(crate) fn prym_groups(diagram: &CylinderDiagram) -> Option<Vec<usize>> {
    let cmap = diagram.cylinder_involution()?;
    let group: Vec<usize> = cmap
        .iter()
        .enumerate()
        .map(|(c, &i)| usize::from(i == c))
        .collect();
    (group.iter().filter(|&&g| g == 0).count() == 2 && group.len() == 3).then_some(group)
}

/// Whether the per-cylinder columns can be merged over a half-turn into the
/// columns of `target`: each merged column is either a single column or the
/// sum of two equal ones.
pub(crate) fn columns_compatible(columns: &[Vec<u64>], target: &[Vec<u64>]) -> bool {
    fn go(rest: &mut Vec<Vec<u64>>, target: &mut Vec<Vec<u64>>) -> bool {
        let Some(first) = rest.pop() else {
            return target.is_empty();
        };
        let mut ok = false;
        if let Some(pos) = target.iter().position(|t| *t == first) {
            let t = target.remove(pos);
            ok = go(rest, target);
            target.insert(pos, t);
        }
        if !ok {
            if let Some(mate) = rest.iter().position(|c| *c == first) {
                let doubled: Vec<u64> = first.iter().map(|x| 2 * x).collect();
                if let Some(pos) = target.iter().position(|t| *t == doubled) {
                    let m = rest.remove(mate);
                    let t = target.remove(pos);
                    ok = go(rest, target);
                    target.insert(pos, t);
                    rest.insert(mate, m);
                }
            }
        }
        rest.push(first);
        ok
    }
    go(&mut columns.to_vec(), &mut target.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{crossing_counts, decompose};
    use crate::geom::Vec2;
    use crate::models::diagram::ModelParams;
    use crate::models::search::{grid, slit_interval, vertical_saf};
    use crate::models::{intersection_matrix, table1_rows, Catalog};

    #[test]
    fn agrees_with_exact_computation() {
        let cat = Catalog::builtin();
        let mut checked = 0;
        let mut periodic_seen = 0;
        for row in table1_rows() {
            let d = row.d;
            let zero = QuadElem::zero(d);
            for diagram in &cat.models {
                let Some((lo, hi)) = slit_interval(diagram, &row.w2) else {
                    continue;
                };
                let fd = FastDiagram::new(diagram, &row.w2, 12).unwrap();
                let t1s = grid(&zero, &QuadElem::one(d), 3, false);
                let t2s = grid(&zero, &row.w2, 3, false);
                let ss = grid(&lo, &hi, 4, true);
                for t1 in &t1s {
                    for t2 in &t2s {
                        for s in &ss {
                            let params = ModelParams {
                                d,
                                w2: row.w2.clone(),
                                h2: row.h2.clone(),
                                t1: QuadElem::rational(t1.clone(), d),
                                t2: QuadElem::rational(t2.clone(), d),
                                s: QuadElem::rational(s.clone(), d),
                            };
                            let ev = diagram.evaluate(&params).unwrap();
                            let ok = diagram.check_parameters(&ev).is_ok();
                            let num = |r: &Rational| fd.numerator(r).unwrap();
                            let pt = fd.point(num(t1), num(t2), num(s));
                            assert_eq!(pt.is_some(), ok);
                            let Some(pt) = pt else { continue };
                            checked += 1;
                            let saf_zero = vertical_saf(diagram, &ev).is_zero();
                            assert_eq!(pt.saf() == 0, saf_zero);
                            if !saf_zero {
                                continue;
                            }
                            let cand = diagram.build(&params).unwrap();
                            let v = decompose(&cand.surface, &Vec2::ints(0, 1, d), 200_000).unwrap();
                            assert_eq!(pt.separatrix_points(1_000_000).is_some(), v.is_periodic());
                            if !v.is_periodic() {
                                continue;
                            }
                            periodic_seen += 1;
                            let h = decompose(&cand.surface, &Vec2::ints(1, 0, d), 1000).unwrap();
                            let raw = crossing_counts(&h, &v).unwrap();
                            let mut want: Vec<u64> = (0..raw[0].len())
                                .map(|j| raw.iter().map(|r| r[j]).sum())
                                .collect();
                            let mut got: Vec<u64> = pt
                                .vertical_columns(1_000_000, &[0; 3], 1)
                                .unwrap()
                                .into_iter()
                                .map(|c| c[0])
                                .collect();
                            want.sort();
                            got.sort();
                            assert_eq!(got, want);
                            let group = prym_groups(diagram).unwrap();
                            let grouped = intersection_matrix(&h, &v, cand.involution.as_deref()).unwrap();
                            let target: Vec<Vec<u64>> = (0..grouped[0].len())
                                .map(|j| grouped.iter().map(|r| r[j]).collect())
                                .collect();
                            let cols = pt.vertical_columns(1_000_000, &group, 2).unwrap();
                            assert!(columns_compatible(&cols, &target), "{cols:?} {target:?}");
                        }
                    }
                }
            }
        }
        assert!(checked > 100, "{checked}");
        assert!(periodic_seen > 5, "{periodic_seen}");
    }

    #[test]
    fn column_merging() {
        let cols = vec![vec![2, 1], vec![2, 1], vec![3, 0]];
        assert!(columns_compatible(&cols, &[vec![4, 2], vec![3, 0]]));
        assert!(columns_compatible(&cols, &[vec![2, 1], vec![2, 1], vec![3, 0]]));
        assert!(!columns_compatible(&cols, &[vec![4, 2], vec![6, 0]]));
        assert!(!columns_compatible(&cols, &[vec![7, 3]]));
    }
}
