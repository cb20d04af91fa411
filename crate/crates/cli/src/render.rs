//! SVG drawings of surfaces and audit reports.

use std::fmt::Write;

use prym_core::flow::{decompose, CylinderPiece};
use prym_core::models::Catalog;
use prym_core::veech::AuditReport;
use prym_core::{EdgeRef, TranslationSurface};

const SCALE: f64 = 100.0;
const GAP: f64 = 0.4;
const MARGIN: f64 = 20.0;

fn hue(i: usize) -> u32 {
    // golden-angle steps keep neighbouring indices apart
    ((i as f64 * 137.508) % 360.0) as u32
}

/// Draws every polygon side by side. Glued edges share a color and a number;
/// cylinder pieces, when given, are shaded by cylinder.
pub fn surface(s: &TranslationSurface, pieces: Option<&[CylinderPiece]>) -> String {
    let polys: Vec<Vec<(f64, f64)>> = s
        .polygons()
        .iter()
        .map(|p| {
            p.vertices()
                .iter()
                .map(|v| (v.x.to_f64(), v.y.to_f64()))
                .collect()
        })
        .collect();
    // horizontal offset of each polygon and the overall box
    let mut offsets = Vec::new();
    let mut x = 0.0;
    let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
    for pts in &polys {
        let lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        for p in pts {
            ymin = ymin.min(p.1);
            ymax = ymax.max(p.1);
        }
        offsets.push(x - lo);
        x += hi - lo + GAP;
    }
    let width = (x - GAP).max(0.0) * SCALE + 2.0 * MARGIN;
    let height = (ymax - ymin).max(0.0) * SCALE + 2.0 * MARGIN;
    let map =
        |p: usize, (px, py): (f64, f64)| (MARGIN + (px + offsets[p]) * SCALE, MARGIN + (ymax - py) * SCALE);

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.1}\" height=\"{height:.1}\" viewBox=\"0 0 {width:.1} {height:.1}\">"
    );
    let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    for (p, pts) in polys.iter().enumerate() {
        let _ = writeln!(
            out,
            "<polygon points=\"{}\" fill=\"#f4f4f4\" stroke=\"none\"/>",
            points(pts.iter().map(|&q| map(p, q)))
        );
    }
    if let Some(pieces) = pieces {
        for piece in pieces {
            let pts = piece
                .vertices
                .iter()
                .map(|v| map(piece.polygon, (v.x.to_f64(), v.y.to_f64())));
            let _ = writeln!(
                out,
                "<polygon class=\"cylinder-{}\" points=\"{}\" fill=\"hsl({}, 70%, 75%)\" fill-opacity=\"0.6\" stroke=\"none\"/>",
                piece.cylinder,
                points(pts),
                hue(piece.cylinder)
            );
        }
    }
    let mut pair_of = std::collections::BTreeMap::new();
    for (i, (a, b)) in s.gluing_pairs().into_iter().enumerate() {
        pair_of.insert(a, i);
        pair_of.insert(b, i);
    }
    for (p, pts) in polys.iter().enumerate() {
        for e in 0..pts.len() {
            let a = map(p, pts[e]);
            let b = map(p, pts[(e + 1) % pts.len()]);
            let pair = pair_of.get(&EdgeRef::new(p, e)).copied().unwrap_or(0);
            let _ = writeln!(
                out,
                "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"hsl({}, 80%, 40%)\" stroke-width=\"2\"/>",
                a.0,
                a.1,
                b.0,
                b.1,
                hue(pair)
            );
            let _ = writeln!(
                out,
                "<text x=\"{:.3}\" y=\"{:.3}\" font-size=\"10\" text-anchor=\"middle\" fill=\"hsl({}, 80%, 30%)\">{pair}</text>",
                (a.0 + b.0) / 2.0,
                (a.1 + b.1) / 2.0,
                hue(pair)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

fn points(pts: impl Iterator<Item = (f64, f64)>) -> String {
    pts.map(|(x, y)| format!("{x:.3},{y:.3}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Draws the candidate of a report, shading the cylinders of its
/// certificate direction when there is one.
pub fn report(r: &AuditReport, catalog: &Catalog) -> Result<String, String> {
    let cand = r.candidate.build(catalog).map_err(|e| e.to_string())?;
    let Some(cert) = &r.certificate else {
        return Ok(surface(&cand.surface, None));
    };
    let dec = decompose(&cand.surface, &cert.direction, cert.step_cap).map_err(|e| e.to_string())?;
    match (dec.presentation(), dec.cylinder_pieces()) {
        (Some(base), Some(pieces)) => Ok(surface(base, Some(&pieces))),
        _ => Err(format!(
            "certificate direction ({}, {}) is not periodic",
            cert.direction.x, cert.direction.y
        )),
    }
}
