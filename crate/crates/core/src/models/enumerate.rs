//! Enumeration of three-cylinder diagrams in Prym(2,2).
//!
//! Six saddle connections bound three horizontal cylinders `C1, C2, C3`; the
//! half-turn swaps `C1` and `C3`, fixes `C2` and swaps the two zeros. Each
//! diagram is generated from its bottoms and a label involution `τ`, the
//! tops being forced by `top(τC) = reverse(τ(bottom C))`. Survivors must have
//! two vertex classes of cone angle `6π`, be connected, have exactly two
//! `τ`-fixed labels (four fixed points in total with the two on the core of
//! `C2`) and admit positive lengths. Diagrams are identified up to
//! relabeling, swapping `C1` with `C3`, and the reflection `x ↦ −x`.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::diagram::{CylinderDiagram, DiagramCylinder, TwistParam};
use super::expr::{Affine, Param};
use crate::qfield::Rational;

const LABELS: usize = 6;

type Bottoms = [Vec<usize>; 3];

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Key {
    bottoms: Bottoms,
    tau: [usize; LABELS],
}

fn rotate_min(seq: &[usize]) -> Vec<usize> {
    let i = (0..seq.len()).min_by_key(|&i| seq[i]).unwrap_or(0);
    seq[i..].iter().chain(&seq[..i]).copied().collect()
}

fn tops_of(bottoms: &Bottoms, tau: &[usize; LABELS]) -> Bottoms {
    let img = |c: usize| -> Vec<usize> { bottoms[c].iter().rev().map(|&l| tau[l]).collect() };
    [img(2), img(1), img(0)]
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Vertex class of each segment endpoint: node `l` is the right end of
/// label `l`, node `6 + l` its left end.
fn endpoint_classes(bottoms: &Bottoms, tops: &Bottoms) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..2 * LABELS).collect();
    for seq in bottoms.iter().chain(tops.iter()) {
        for i in 0..seq.len() {
            let (a, b) = (seq[i], seq[(i + 1) % seq.len()]);
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, LABELS + b));
            parent[ra] = rb;
        }
    }
    (0..2 * LABELS).map(|x| find(&mut parent, x)).collect()
}

fn connected(bottoms: &Bottoms, tops: &Bottoms) -> bool {
    let cyl_of = |seqs: &Bottoms, l: usize| seqs.iter().position(|s| s.contains(&l)).unwrap();
    let mut parent: Vec<usize> = (0..3).collect();
    for l in 0..LABELS {
        let (a, b) = (cyl_of(bottoms, l), cyl_of(tops, l));
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    (0..3).all(|c| find(&mut parent, c) == find(&mut parent, 0))
}

fn admissible(bottoms: &Bottoms, tau: &[usize; LABELS]) -> bool {
    if (0..LABELS).filter(|&l| tau[l] == l).count() != 2 {
        return false;
    }
    let tops = tops_of(bottoms, tau);
    let classes = endpoint_classes(bottoms, &tops);
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for &c in &classes {
        *sizes.entry(c).or_default() += 1;
    }
    if sizes.len() != 2 || sizes.values().any(|&s| s != LABELS) {
        return false;
    }
    // the half-turn sends the right end of `a` to the left end of `τ(a)`
    if classes[0] == classes[LABELS + tau[0]] {
        return false;
    }
    connected(bottoms, &tops)
}

fn all_bottoms() -> Vec<Bottoms> {
    fn cyclic_orders(labels: &[usize]) -> Vec<Vec<usize>> {
        let Some((&first, rest)) = labels.split_first() else {
            return Vec::new();
        };
        let mut out = Vec::new();
        permute(rest.to_vec(), 0, &mut |p| {
            let mut v = vec![first];
            v.extend_from_slice(p);
            out.push(v);
        });
        out
    }
    let mut out = Vec::new();
    for code in 0..3usize.pow(LABELS as u32) {
        let mut groups: [Vec<usize>; 3] = Default::default();
        let mut x = code;
        for l in 0..LABELS {
            groups[x % 3].push(l);
            x /= 3;
        }
        if groups.iter().any(|g| g.is_empty()) {
            continue;
        }
        for a in cyclic_orders(&groups[0]) {
            for b in cyclic_orders(&groups[1]) {
                for c in cyclic_orders(&groups[2]) {
                    out.push([a.clone(), b.clone(), c.clone()]);
                }
            }
        }
    }
    out
}

fn permute(mut items: Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        f(&items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items.clone(), k + 1, f);
    }
}

fn involutions() -> Vec<[usize; LABELS]> {
    fn rec(tau: &mut [usize; LABELS], used: &mut [bool; LABELS], out: &mut Vec<[usize; LABELS]>) {
        let Some(i) = (0..LABELS).find(|&i| !used[i]) else {
            out.push(*tau);
            return;
        };
        used[i] = true;
        tau[i] = i;
        rec(tau, used, out);
        for j in i + 1..LABELS {
            if !used[j] {
                used[j] = true;
                tau[i] = j;
                tau[j] = i;
                rec(tau, used, out);
                used[j] = false;
            }
        }
        used[i] = false;
    }
    let mut out = Vec::new();
    rec(&mut [0; LABELS], &mut [false; LABELS], &mut out);
    out
}

fn relabel(bottoms: &Bottoms, tau: &[usize; LABELS], sigma: &[usize], swap: bool) -> Key {
    let mut b: Bottoms = Default::default();
    for c in 0..3 {
        let src = if swap { 2 - c } else { c };
        b[c] = rotate_min(&bottoms[src].iter().map(|&l| sigma[l]).collect::<Vec<_>>());
    }
    let mut t = [0; LABELS];
    for l in 0..LABELS {
        t[sigma[l]] = sigma[tau[l]];
    }
    Key { bottoms: b, tau: t }
}

fn canonical(bottoms: &Bottoms, tau: &[usize; LABELS]) -> Key {
    let mut best: Option<Key> = None;
    permute((0..LABELS).collect(), 0, &mut |sigma| {
        for swap in [false, true] {
            let k = relabel(bottoms, tau, sigma, swap);
            if best.as_ref().is_none_or(|b| k < *b) {
                best = Some(k);
            }
        }
    });
    best.expect("nonempty group")
}

fn reflected(key: &Key) -> Key {
    let b = key.bottoms.clone().map(|s| s.into_iter().rev().collect());
    canonical(&b, &key.tau)
}

/// Affine solution `c0 + cw·w2 + cs·s` for each label, given the slit.
fn solve_lengths(key: &Key, slit: usize) -> Option<Vec<[Rational; 3]>> {
    let tops = tops_of(&key.bottoms, &key.tau);
    let mut orbit = [usize::MAX; LABELS];
    let mut reps = Vec::new();
    for l in 0..LABELS {
        if orbit[l] == usize::MAX {
            orbit[l] = reps.len();
            orbit[key.tau[l]] = reps.len();
            reps.push(l);
        }
    }
    let n = reps.len();
    let r = |x: i64| Rational::from_integer(x.into());
    let widths = [[r(1), r(0), r(0)], [r(0), r(1), r(0)], [r(1), r(0), r(0)]];
    // rows: n coefficients followed by the right-hand side in (1, w2, s)
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for c in 0..3 {
        for seq in [&key.bottoms[c], &tops[c]] {
            let mut row = vec![r(0); n + 3];
            for &l in seq {
                row[orbit[l]] += r(1);
            }
            row[n..].clone_from_slice(&widths[c]);
            rows.push(row);
        }
    }
    let mut row = vec![r(0); n + 3];
    row[orbit[slit]] = r(1);
    row[n + 2] = r(1);
    rows.push(row);
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..n {
        let Some(p) = (pivot_row..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            return None;
        };
        rows.swap(pivot_row, p);
        let inv = rows[pivot_row][col].recip();
        for x in rows[pivot_row].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows.len() {
            if i != pivot_row && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for j in 0..n + 3 {
                    let v = &rows[pivot_row][j] * &f;
                    rows[i][j] -= v;
                }
            }
        }
        pivots.push(pivot_row);
        pivot_row += 1;
    }
    if rows[pivot_row..]
        .iter()
        .any(|row| row[n..].iter().any(|x| !x.is_zero()))
    {
        return None;
    }
    Some(
        (0..LABELS)
            .map(|l| {
                let row = &rows[pivots[orbit[l]]];
                [row[n].clone(), row[n + 1].clone(), row[n + 2].clone()]
            })
            .collect(),
    )
}

/// Bounds `lo < x < hi` (`hi = None` for no upper bound) satisfying every
/// `a + b·x > 0`, if the interval is nonempty.
pub(crate) fn open_interval(
    constraints: &[(Rational, Rational)],
) -> Option<(Option<Rational>, Option<Rational>)> {
    let mut lo: Option<Rational> = None;
    let mut hi: Option<Rational> = None;
    for (a, b) in constraints {
        if b.is_zero() {
            if !a.is_positive() {
                return None;
            }
            continue;
        }
        let root = -a / b;
        if b.is_positive() {
            if lo.as_ref().is_none_or(|l| root > *l) {
                lo = Some(root);
            }
        } else if hi.as_ref().is_none_or(|h| root < *h) {
            hi = Some(root);
        }
    }
    match (&lo, &hi) {
        (Some(l), Some(h)) if l >= h => None,
        _ => Some((lo, hi)),
    }
}

/// Open interval of `w2 > 0` for which some slit value makes every length
/// positive. Lengths are rational affine in `(w2, s)`.
pub(crate) fn feasible_w2(lengths: &[[Rational; 3]]) -> Option<(Rational, Option<Rational>)> {
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut direct = vec![(Rational::zero(), Rational::one())];
    for [a, b, c] in lengths {
        if c.is_zero() {
            direct.push((a.clone(), b.clone()));
        } else if c.is_positive() {
            lower.push((-a / c, -b / c));
        } else {
            upper.push((-a / c, -b / c));
        }
    }
    // lower(w) < upper(w) for all pairs: (u0 - l0) + (u1 - l1) w > 0
    for (l0, l1) in &lower {
        for (u0, u1) in &upper {
            direct.push((u0 - l0, u1 - l1));
        }
    }
    let (lo, hi) = open_interval(&direct)?;
    Some((lo.unwrap_or_else(Rational::zero), hi))
}

fn to_diagram(index: usize, key: &Key, slit: usize, lengths: &[[Rational; 3]]) -> CylinderDiagram {
    let tops = tops_of(&key.bottoms, &key.tau);
    let unit = Affine::constant(Rational::one());
    let w2 = Affine::parse("w2").expect("literal");
    let h2 = Affine::parse("h2").expect("literal");
    let cyl = |c: usize, width: &Affine, height: &Affine, twist| DiagramCylinder {
        bottom: key.bottoms[c].clone(),
        top: tops[c].clone(),
        width: width.clone(),
        height: height.clone(),
        twist,
    };
    CylinderDiagram {
        name: format!("model-{}", index + 1),
        orders: Some(vec![2, 2]),
        cylinders: vec![
            cyl(0, &unit, &unit, TwistParam::T1),
            cyl(1, &w2, &h2, TwistParam::T2),
            cyl(2, &unit, &unit, TwistParam::T1),
        ],
        lengths: lengths
            .iter()
            .map(|[a, b, c]| Affine::rational(a.clone(), b.clone(), c.clone()))
            .collect(),
        involution: Some(key.tau.to_vec()),
        slit: Some(slit),
    }
}

/// All three-cylinder Prym(2,2) diagrams up to relabeling and reflection,
/// in canonical order, with lengths solved in terms of `w2` and the slit.
pub fn prym_three_cylinder_diagrams() -> Vec<CylinderDiagram> {
    let taus = involutions();
    let mut classes: BTreeMap<Key, ()> = BTreeMap::new();
    let mut seen: BTreeMap<Key, ()> = BTreeMap::new();
    for bottoms in all_bottoms() {
        for tau in &taus {
            if !admissible(&bottoms, tau) {
                continue;
            }
            let k = canonical(&bottoms, tau);
            if seen.insert(k.clone(), ()).is_some() {
                continue;
            }
            let r = reflected(&k);
            seen.insert(r.clone(), ());
            classes.insert(k.min(r), ());
        }
    }
    let mut out = Vec::new();
    for key in classes.keys() {
        let solved = (0..LABELS)
            .filter(|&l| key.tau[l] == l)
            .find_map(|slit| solve_lengths(key, slit).map(|ls| (slit, ls)));
        let Some((slit, lengths)) = solved else {
            continue;
        };
        if feasible_w2(&lengths).is_none() {
            continue;
        }
        out.push(to_diagram(out.len(), key, slit, &lengths));
    }
    out
}

/// Rational coefficients `(c0, cw, cs)` of each label length of a diagram
/// whose lengths are rational affine in `w2` and `s`.
pub(crate) fn rational_lengths(d: &CylinderDiagram) -> Option<Vec<[Rational; 3]>> {
    d.lengths
        .iter()
        .map(|e| {
            if e.uses(Param::H2) {
                return None;
            }
            Some([
                e.rational_coeff(Param::One)?,
                e.rational_coeff(Param::W2)?,
                e.rational_coeff(Param::S)?,
            ])
        })
        .collect()
}
