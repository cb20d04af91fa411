//! Grid search for candidates whose vertical direction is periodic with the
//! prescribed reduced intersection matrix.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::catalog::ModelRef;
use super::diagram::{CylinderDiagram, EvaluatedDiagram, ModelParams};
use super::enumerate::rational_lengths;
use super::fast::{columns_compatible, prym_groups, FastDiagram};
use super::manifest::CandidateSpec;
use super::matrix::intersection_matrix;
use super::table1::Table1Row;
use super::ModelError;
use crate::flow::{decompose, DEFAULT_STEP_CAP};
use crate::geom::Vec2;
use crate::qfield::{QuadElem, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBounds {
    /// Largest denominator of the twists `t1`, `t2`.
    pub twist_denominator: u32,
    /// Largest denominator of the slit `s`.
    pub slit_denominator: u32,
    /// Step cap for the vertical decomposition of each surviving grid point.
    pub step_cap: usize,
}

impl SearchBounds {
    pub fn new(twist_denominator: u32, slit_denominator: u32) -> Self {
        SearchBounds {
            twist_denominator,
            slit_denominator,
            step_cap: DEFAULT_STEP_CAP,
        }
    }
}

/// Open interval of slit values making every label length positive when
/// the middle width is `w2`.
pub fn slit_interval(diagram: &CylinderDiagram, w2: &QuadElem) -> Option<(QuadElem, QuadElem)> {
    let d = w2.field();
    let coeffs = rational_lengths(diagram)?;
    let mut lo: Option<QuadElem> = None;
    let mut hi: Option<QuadElem> = None;
    for [a, b, c] in coeffs {
        let alpha = QuadElem::rational(a, d) + w2.scale(&b);
        if c.is_zero() {
            if !alpha.is_positive() {
                return None;
            }
            continue;
        }
        let root = (-alpha).scale(&c.recip());
        if c.is_positive() {
            if lo.as_ref().is_none_or(|l| root > *l) {
                lo = Some(root);
            }
        } else if hi.as_ref().is_none_or(|h| root < *h) {
            hi = Some(root);
        }
    }
    let (lo, hi) = (lo?, hi?);
    (lo < hi).then_some((lo, hi))
}

fn wedge(x: &QuadElem, y: &QuadElem) -> Rational {
    x.a() * y.b() - x.b() * y.a()
}

/// Sah–Arnoux–Fathi invariant of the upward vertical flow, as the
/// coefficient of `1 ∧ √D` in `Σ λ_i ∧ δ_i` over the interval exchange
/// induced on the concatenated cylinder bottoms. It vanishes whenever the
/// vertical direction is completely periodic.
pub fn vertical_saf(diagram: &CylinderDiagram, ev: &EvaluatedDiagram) -> Rational {
    let d = ev.widths[0].field();
    let zero = QuadElem::zero(d);
    let mut offsets = Vec::new();
    let mut acc = zero.clone();
    for w in &ev.widths {
        offsets.push(acc.clone());
        acc = acc + w;
    }
    let mut bottom_pos = vec![zero.clone(); ev.lengths.len()];
    for cyl in &diagram.cylinders {
        let mut x = zero.clone();
        for &l in &cyl.bottom {
            bottom_pos[l] = x.clone();
            x = x + &ev.lengths[l];
        }
    }
    let mut saf = Rational::zero();
    for (c, cyl) in diagram.cylinders.iter().enumerate() {
        let (w, t) = (&ev.widths[c], &ev.twists[c]);
        let mut top_start = zero.clone();
        for &l in &cyl.top {
            let len = &ev.lengths[l];
            let (c2, _) = diagram.locate(l, false).expect("validated");
            let mut u0 = &top_start + t;
            let mut base = &offsets[c2] + &bottom_pos[l] - &top_start - &offsets[c] - t;
            if u0 >= *w {
                u0 = u0 - w;
                base = base + w;
            }
            let end = &u0 + len;
            if end > *w {
                let first = w - &u0;
                saf += wedge(&first, &base);
                saf += wedge(&(len - &first), &(&base + w));
            } else {
                saf += wedge(len, &base);
            }
            top_start = top_start + len;
        }
    }
    saf
}

/// Rationals with denominator at most `den` in `[lo, hi)` (or `(lo, hi)`
/// when `open_low`), increasing.
pub(crate) fn grid(lo: &QuadElem, hi: &QuadElem, den: u32, open_low: bool) -> Vec<Rational> {
    let d = lo.field();
    let mut out: BTreeSet<Rational> = BTreeSet::new();
    for q in 1..=den.max(1) {
        let qq = BigInt::from(q);
        let scaled = lo.scale(&Rational::from_integer(qq.clone()));
        let mut p = scaled.floor();
        loop {
            let r = Rational::new(p.clone(), qq.clone());
            let x = QuadElem::rational(r.clone(), d);
            if x >= *hi {
                break;
            }
            if x > *lo || (!open_low && x == *lo) {
                out.insert(r);
            }
            p += 1;
        }
    }
    out.into_iter().collect()
}

/// Grid candidates for one Prym model and parameter row whose vertical
/// direction decomposes into cylinders with reduced intersection matrix
/// equal to the row's, in increasing `(t1, t2, s)` order.
///
/// Twists range over rationals in `[0, W)` and the slit over rationals
/// inside the interval allowed by the diagram. Before any surface is built,
/// a grid point must pass three necessary conditions on its vertical flow,
/// checked in integer arithmetic:
///
/// - the SAF invariant vanishes;
/// - every upward vertical separatrix closes up within `N` cylinder
///   traversals, `N` being the sum of the matrix entries. A vertical saddle
///   connection lies on the boundary of a vertical cylinder, so it crosses
///   the horizontal cylinders no more often than that cylinder's core curve;
/// - the crossing counts of the vertical cylinders can be merged over the
///   half-turn into the matrix columns.
///
/// Diagrams that are not Prym(2,2) models yield nothing.
pub fn enumerate_candidates(
    model: &ModelRef,
    diagram: &CylinderDiagram,
    row: &Table1Row,
    bounds: SearchBounds,
) -> Result<Vec<CandidateSpec>, ModelError> {
    if diagram.orders.as_deref() != Some(&[2, 2]) || diagram.involution.is_none() {
        return Ok(Vec::new());
    }
    let d = row.d;
    let Some((s_lo, s_hi)) = slit_interval(diagram, &row.w2) else {
        return Ok(Vec::new());
    };
    let zero = QuadElem::zero(d);
    let t1s = grid(&zero, &QuadElem::one(d), bounds.twist_denominator, false);
    let t2s = grid(&zero, &row.w2, bounds.twist_denominator, false);
    let ss = grid(&s_lo, &s_hi, bounds.slit_denominator, true);
    let traversal_cap: usize = row.matrix.iter().flatten().sum::<u64>() as usize;
    let grid_den = (1..=bounds.twist_denominator.max(bounds.slit_denominator).max(1) as u64)
        .fold(1u64, |l, q| l.lcm(&q));
    let fast = FastDiagram::new(diagram, &row.w2, grid_den)
        .zip(prym_groups(diagram))
        .and_then(|(fd, group)| {
            let nums = |v: &[Rational]| v.iter().map(|r| fd.numerator(r)).collect::<Option<Vec<_>>>();
            let numerators = (nums(&t1s)?, nums(&t2s)?, nums(&ss)?);
            Some((fd, group, numerators))
        });
    let want: Vec<Vec<u64>> = row.matrix.iter().map(|r| r.to_vec()).collect();
    let want_cols: Vec<Vec<u64>> = (0..2).map(|j| vec![row.matrix[0][j], row.matrix[1][j]]).collect();
    let params_at = |t1: &Rational, t2: &Rational, s: &Rational| ModelParams {
        d,
        w2: row.w2.clone(),
        h2: row.h2.clone(),
        t1: QuadElem::rational(t1.clone(), d),
        t2: QuadElem::rational(t2.clone(), d),
        s: QuadElem::rational(s.clone(), d),
    };
    let found: Vec<Vec<CandidateSpec>> = (0..t1s.len())
        .into_par_iter()
        .map(|i1| -> Result<Vec<CandidateSpec>, ModelError> {
            let t1 = &t1s[i1];
            let mut out = Vec::new();
            for (i2, t2) in t2s.iter().enumerate() {
                for (i3, s) in ss.iter().enumerate() {
                    match &fast {
                        Some((fd, group, (n1, n2, n3))) => match fd.point(n1[i1], n2[i2], n3[i3]) {
                            Some(pt) if pt.saf() == 0 => match pt.vertical_columns(traversal_cap, group, 2) {
                                Some(cols) if columns_compatible(&cols, &want_cols) => {}
                                _ => continue,
                            },
                            _ => continue,
                        },
                        None => {
                            let params = params_at(t1, t2, s);
                            let ev = diagram.evaluate(&params)?;
                            if diagram.check_parameters(&ev).is_err() || !vertical_saf(diagram, &ev).is_zero()
                            {
                                continue;
                            }
                        }
                    }
                    let params = params_at(t1, t2, s);
                    let cand = diagram.build(&params)?;
                    let v = decompose(&cand.surface, &Vec2::ints(0, 1, d), bounds.step_cap)?;
                    if !v.is_periodic() {
                        continue;
                    }
                    let h = decompose(&cand.surface, &Vec2::ints(1, 0, d), bounds.step_cap)?;
                    let m = intersection_matrix(&h, &v, cand.involution.as_deref())?;
                    if m == want {
                        out.push(CandidateSpec {
                            model: model.clone(),
                            d,
                            w2: params.w2,
                            h2: params.h2,
                            t1: params.t1,
                            t2: params.t2,
                            s: params.s,
                            matrix: Some(row.matrix),
                        });
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_, _>>()?;
    Ok(found.into_iter().flatten().collect())
}
