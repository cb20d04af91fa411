//! Three-cylinder Prym(2,2) candidate surfaces: the parameter table, the
//! cylinder diagrams they are built from, candidate manifests and the grid
//! search for candidates with a periodic vertical direction.

mod catalog;
mod diagram;
mod enumerate;
mod expr;
mod fast;
mod manifest;
mod matrix;
mod search;
mod table1;

use thiserror::Error;

use crate::flow::FlowError;
use crate::surface::SurfaceError;

pub use catalog::{Catalog, ModelRef};
pub use diagram::{Candidate, CylinderDiagram, DiagramCylinder, EvaluatedDiagram, ModelParams, TwistParam};
pub use enumerate::prym_three_cylinder_diagrams;
pub use expr::{Affine, Param, ParamValues};
pub use manifest::{load_manifest, manifest_to_json, CandidateSpec};
pub use matrix::{cylinder_orbits, intersection_matrix};
pub use search::{enumerate_candidates, slit_interval, vertical_saf, SearchBounds};
pub use table1::{table1_rows, Table1Row};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid cylinder diagram: {0}")]
    InvalidDiagram(String),
    #[error("parameters do not fit the diagram: {0}")]
    SegmentOverflow(String),
    #[error("surface has zero orders {found:?}, expected {expected:?}")]
    WrongStratum { expected: Vec<u32>, found: Vec<u32> },
    #[error("half-turn is not an involution of the built surface")]
    InvolutionFailure,
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("entry {entry}: unknown model {model}")]
    UnknownModel { entry: usize, model: String },
    #[error("entry {entry}: (D, w2, h2) is not a parameter row of the table")]
    NonTable1Parameters { entry: usize },
    #[error("entry {entry}: {message}")]
    InvalidEntry { entry: usize, message: String },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Flow(#[from] FlowError),
}
