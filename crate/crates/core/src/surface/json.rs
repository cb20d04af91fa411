//! JSON interchange: `{"D": int, "polygons": [[[x, y], ...], ...],
//! "gluing": [[[p, e], [p', e']], ...]}` with coordinates in the five-integer
//! field encoding.

use serde::{Deserialize, Serialize};

use super::{EdgeRef, PlanarPolygon, SurfaceError, TranslationSurface};
use crate::geom::Vec2;
use crate::qfield::{is_valid_field, QFieldError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceDoc {
    #[serde(rename = "D")]
    pub d: u64,
    pub polygons: Vec<Vec<Vec2>>,
    pub gluing: Vec<[[usize; 2]; 2]>,
}

impl SurfaceDoc {
    pub fn into_surface(self) -> Result<TranslationSurface, SurfaceError> {
        if !is_valid_field(self.d as i64) {
            return Err(SurfaceError::Field(QFieldError::InvalidField(self.d.to_string())));
        }
        let mut polygons = Vec::with_capacity(self.polygons.len());
        for (i, verts) in self.polygons.into_iter().enumerate() {
            if let Some(v) = verts
                .iter()
                .find(|v| v.x.field() != self.d || v.y.field() != self.d)
            {
                let right = if v.x.field() != self.d {
                    v.x.field()
                } else {
                    v.y.field()
                };
                return Err(SurfaceError::Field(QFieldError::FieldMismatch {
                    left: self.d,
                    right,
                }));
            }
            let poly = PlanarPolygon::new(verts)
                .map_err(|reason| SurfaceError::BadPolygon { polygon: i, reason })?;
            polygons.push(poly);
        }
        let pairs: Vec<(EdgeRef, EdgeRef)> = self
            .gluing
            .iter()
            .map(|[[p, e], [q, f]]| (EdgeRef::new(*p, *e), EdgeRef::new(*q, *f)))
            .collect();
        TranslationSurface::build(polygons, &pairs)
    }
}

impl TranslationSurface {
    pub fn to_doc(&self) -> SurfaceDoc {
        SurfaceDoc {
            d: self.field,
            polygons: self.polygons.iter().map(|p| p.vertices.clone()).collect(),
            gluing: self
                .gluing_pairs()
                .into_iter()
                .map(|(a, b)| [[a.polygon, a.edge], [b.polygon, b.edge]])
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("surface documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<TranslationSurface, SurfaceError> {
        let doc: SurfaceDoc = serde_json::from_str(text).map_err(|e| SurfaceError::Parse(e.to_string()))?;
        doc.into_surface()
    }
}
