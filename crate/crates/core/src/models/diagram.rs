//! Horizontal cylinder diagrams and the surfaces built from them.
//!
//! A diagram lists, for each horizontal cylinder, the labels of the saddle
//! connections on its bottom and top boundaries, both read left to right.
//! Every label occurs once on some bottom and once on some top. Lengths,
//! widths and heights are affine expressions in the parameters `w2`, `h2`,
//! `s`; the twist of a cylinder is taken from `t1`, `t2` or fixed to zero.
//!
//! Each cylinder becomes one parallelogram with vertices `(0,0)`, the bottom
//! break points, `(W,0)`, `(W+t,h)`, the top break points right to left, and
//! `(t,h)`. Its edges are the bottom segments, the right side, the top
//! segments right to left and the left side; the two sides are glued to each
//! other and every bottom segment to the top segment with the same label.

use serde::{Deserialize, Serialize};

use super::expr::{Affine, ParamValues};
use super::ModelError;
use crate::geom::Vec2;
use crate::qfield::QuadElem;
use crate::surface::{EdgeRef, PlanarPolygon, PolygonImage, TranslationSurface};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwistParam {
    #[serde(rename = "t1")]
    T1,
    #[serde(rename = "t2")]
    T2,
    #[serde(rename = "0")]
    Zero,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramCylinder {
    pub bottom: Vec<usize>,
    pub top: Vec<usize>,
    pub width: Affine,
    pub height: Affine,
    pub twist: TwistParam,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CylinderDiagram {
    pub name: String,
    /// Zero orders the built surface must have, sorted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orders: Option<Vec<u32>>,
    pub cylinders: Vec<DiagramCylinder>,
    /// Length of each label.
    pub lengths: Vec<Affine>,
    /// Label permutation induced by the half-turn, if the diagram has one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub involution: Option<Vec<usize>>,
    /// Label whose length is the slit parameter `s`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slit: Option<usize>,
}

/// Parameter values for one concrete surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelParams {
    pub d: u64,
    pub w2: QuadElem,
    pub h2: QuadElem,
    pub t1: QuadElem,
    pub t2: QuadElem,
    pub s: QuadElem,
}

/// Numeric data of a diagram at given parameters.
#[derive(Debug, Clone)]
pub struct EvaluatedDiagram {
    pub widths: Vec<QuadElem>,
    pub heights: Vec<QuadElem>,
    pub twists: Vec<QuadElem>,
    pub lengths: Vec<QuadElem>,
}

/// A built surface together with its polygon-level half-turn.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub surface: TranslationSurface,
    pub involution: Option<Vec<PolygonImage>>,
}

fn invalid(msg: impl Into<String>) -> ModelError {
    ModelError::InvalidDiagram(msg.into())
}

impl CylinderDiagram {
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let d: CylinderDiagram = serde_json::from_str(text).map_err(|e| ModelError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        d.validate()?;
        Ok(d)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("diagram serializes");
        s.push('\n');
        s
    }

    pub fn label_count(&self) -> usize {
        self.lengths.len()
    }

    /// Cylinder and position of `label` on bottoms (`top == false`) or tops.
    pub fn locate(&self, label: usize, top: bool) -> Option<(usize, usize)> {
        self.cylinders.iter().enumerate().find_map(|(c, cyl)| {
            let seq = if top { &cyl.top } else { &cyl.bottom };
            seq.iter().position(|&l| l == label).map(|i| (c, i))
        })
    }

    /// Cylinder images under the involution: `τ(C)` is the cylinder whose
    /// top reads `τ(bottom C)` backwards.
    pub fn cylinder_involution(&self) -> Option<Vec<usize>> {
        let tau = self.involution.as_ref()?;
        self.cylinders
            .iter()
            .map(|cyl| {
                let want: Vec<usize> = cyl.bottom.iter().rev().map(|&l| tau[l]).collect();
                self.cylinders.iter().position(|c| c.top == want)
            })
            .collect()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.label_count();
        if self.cylinders.is_empty() {
            return Err(invalid("no cylinders"));
        }
        let mut seen_bottom = vec![false; n];
        let mut seen_top = vec![false; n];
        for (c, cyl) in self.cylinders.iter().enumerate() {
            if cyl.bottom.is_empty() || cyl.top.is_empty() {
                return Err(invalid(format!("cylinder {c} has an empty boundary")));
            }
            for (seq, seen) in [(&cyl.bottom, &mut seen_bottom), (&cyl.top, &mut seen_top)] {
                for &l in seq {
                    if l >= n || seen[l] {
                        return Err(invalid(format!("label {l} misplaced in cylinder {c}")));
                    }
                    seen[l] = true;
                }
            }
        }
        if seen_bottom.iter().chain(&seen_top).any(|s| !s) {
            return Err(invalid("every label must occur on one bottom and one top"));
        }
        if let Some(tau) = &self.involution {
            if tau.len() != n || (0..n).any(|l| tau[l] >= n || tau[tau[l]] != l) {
                return Err(invalid("involution is not an involution of the labels"));
            }
            let cmap = self
                .cylinder_involution()
                .ok_or_else(|| invalid("involution does not map bottoms onto reversed tops"))?;
            for (c, &img) in cmap.iter().enumerate() {
                let (a, b) = (&self.cylinders[c], &self.cylinders[img]);
                if a.width != b.width || a.height != b.height || a.twist != b.twist {
                    return Err(invalid(format!("cylinders {c} and {img} differ in shape")));
                }
            }
            if (0..n).any(|l| self.lengths[l] != self.lengths[tau[l]]) {
                return Err(invalid("involution does not preserve lengths"));
            }
        }
        if let Some(slit) = self.slit {
            if slit >= n {
                return Err(invalid("slit label out of range"));
            }
            if let Some(tau) = &self.involution {
                if tau[slit] != slit {
                    return Err(invalid("slit label is not fixed by the involution"));
                }
            }
        }
        Ok(())
    }

    pub fn evaluate(&self, p: &ModelParams) -> Result<EvaluatedDiagram, ModelError> {
        let values = ParamValues {
            w2: p.w2.clone(),
            h2: p.h2.clone(),
            s: p.s.clone(),
        };
        let ev = |e: &Affine| e.eval(p.d, &values).map_err(invalid);
        let lengths = self.lengths.iter().map(ev).collect::<Result<Vec<_>, _>>()?;
        let mut widths = Vec::new();
        let mut heights = Vec::new();
        let mut twists = Vec::new();
        for cyl in &self.cylinders {
            widths.push(ev(&cyl.width)?);
            heights.push(ev(&cyl.height)?);
            twists.push(match cyl.twist {
                TwistParam::T1 => p.t1.clone(),
                TwistParam::T2 => p.t2.clone(),
                TwistParam::Zero => QuadElem::zero(p.d),
            });
        }
        Ok(EvaluatedDiagram {
            widths,
            heights,
            twists,
            lengths,
        })
    }

    /// Checks that all segment lengths are positive, that boundaries add up
    /// to the cylinder widths and that each twist lies in `[0, W)`.
    pub fn check_parameters(&self, ev: &EvaluatedDiagram) -> Result<(), ModelError> {
        if let Some(l) = ev.lengths.iter().position(|x| !x.is_positive()) {
            return Err(ModelError::SegmentOverflow(format!(
                "label {l} has length {}",
                ev.lengths[l]
            )));
        }
        for (c, cyl) in self.cylinders.iter().enumerate() {
            let w = &ev.widths[c];
            if !ev.heights[c].is_positive() || !w.is_positive() {
                return Err(ModelError::SegmentOverflow(format!("cylinder {c} is degenerate")));
            }
            for seq in [&cyl.bottom, &cyl.top] {
                let total = seq
                    .iter()
                    .fold(QuadElem::zero(w.field()), |acc, &l| acc + &ev.lengths[l]);
                if &total != w {
                    return Err(ModelError::SegmentOverflow(format!(
                        "boundary of cylinder {c} has length {total}, width is {w}"
                    )));
                }
            }
            let t = &ev.twists[c];
            if t.is_negative() || t >= w {
                return Err(ModelError::SegmentOverflow(format!(
                    "twist {t} of cylinder {c} outside [0, {w})"
                )));
            }
        }
        Ok(())
    }

    /// Builds the surface, checks the expected zero orders and, when the
    /// diagram has an involution, checks that the half-turn is an isometry.
    pub fn build(&self, p: &ModelParams) -> Result<Candidate, ModelError> {
        let ev = self.evaluate(p)?;
        self.check_parameters(&ev)?;
        let d = p.d;
        let mut polygons = Vec::new();
        for (c, cyl) in self.cylinders.iter().enumerate() {
            let (w, h, t) = (&ev.widths[c], &ev.heights[c], &ev.twists[c]);
            let mut pts = Vec::new();
            let mut x = QuadElem::zero(d);
            for &l in &cyl.bottom {
                pts.push(Vec2::new(x.clone(), QuadElem::zero(d)));
                x = x + &ev.lengths[l];
            }
            pts.push(Vec2::new(x, QuadElem::zero(d)));
            let mut x = w + t;
            for &l in cyl.top.iter().rev() {
                pts.push(Vec2::new(x.clone(), h.clone()));
                x = x - &ev.lengths[l];
            }
            pts.push(Vec2::new(x, h.clone()));
            let poly = PlanarPolygon::new(pts).map_err(|reason| {
                ModelError::Surface(crate::surface::SurfaceError::BadPolygon { polygon: c, reason })
            })?;
            polygons.push(poly);
        }
        let mut pairs = Vec::new();
        for (c, cyl) in self.cylinders.iter().enumerate() {
            let m = cyl.bottom.len();
            let k = cyl.top.len();
            pairs.push((EdgeRef::new(c, m), EdgeRef::new(c, m + k + 1)));
            for (i, &l) in cyl.bottom.iter().enumerate() {
                let (c2, j) = self.locate(l, true).expect("validated");
                let other = &self.cylinders[c2];
                let edge = other.bottom.len() + other.top.len() - j;
                pairs.push((EdgeRef::new(c, i), EdgeRef::new(c2, edge)));
            }
        }
        let surface = TranslationSurface::build(polygons, &pairs)?;
        if let Some(expected) = &self.orders {
            let found = surface.stratum().orders;
            if &found != expected {
                return Err(ModelError::WrongStratum {
                    expected: expected.clone(),
                    found,
                });
            }
        }
        let involution = match self.cylinder_involution() {
            None => None,
            Some(cmap) => {
                let map: Vec<PolygonImage> = cmap
                    .iter()
                    .map(|&img| PolygonImage {
                        polygon: img,
                        shift: self.cylinders[img].bottom.len() + 1,
                    })
                    .collect();
                if !surface.check_involution(&map)? {
                    return Err(ModelError::InvolutionFailure);
                }
                Some(map)
            }
        };
        Ok(Candidate { surface, involution })
    }
}
