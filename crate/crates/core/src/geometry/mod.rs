//! Interface representation: the moving boundary in tangent-angle variables,
//! the fixed necrotic boundary, spectral calculus, filters and diagnostics.

mod curve;
mod diagnostics;
pub mod snapshot;
pub mod spectral;
mod state;

use thiserror::Error;

pub use curve::{FixedBoundary, PlanarCurveSamples, RadialShape};
pub use diagnostics::{
    area, centroid, min_distance, min_self_distance, shape_diagnostics, ShapeDiagnostics,
};
pub use snapshot::Snapshot;
pub use spectral::{fourier_filter, krasny_filter, spectral_derivative};
pub use state::{
    curvature, equal_arclength_reparam, equal_arclength_reparam_to, reconstruct, InterfaceState,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("grid size {0} is not a power of two >= 4")]
    GridSize(usize),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("degenerate curve (zero or non-finite metric)")]
    Degenerate,
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("equal-arclength Newton solve did not converge at node {node}")]
    ReparamFailed { node: usize },
    #[error("curve is not star-shaped about its centroid")]
    NotStarShaped,
    #[error("snapshot: {0}")]
    Snapshot(String),
}
