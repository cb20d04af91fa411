//! Exact flat geometry for translation surfaces over real quadratic fields.
//!
//! The crate builds three-cylinder Prym(2,2) candidate surfaces from their
//! horizontal cylinder diagrams, decomposes straight-line flow directions into
//! cylinders with exact arithmetic, and certifies failures of the Veech
//! dichotomy by exhibiting a completely periodic direction whose cylinder
//! moduli are incommensurable.

pub mod flow;
pub mod geom;
pub mod models;
pub mod qfield;
pub mod surface;
pub mod veech;

pub use geom::{Mat2, Vec2};
pub use qfield::{QFieldError, QuadElem, Rational};
pub use surface::{EdgeRef, PlanarPolygon, StratumInfo, SurfaceError, TranslationSurface};
