//! Bézier-curve and zonotope algebra underlying planning, replanning and
//! monitoring.
//!
//! Spatial motion is described by a Bézier curve `r(s)` over a phase
//! variable `s ∈ [0,1]`, paired with a monotone temporal curve `h(s)` that
//! maps phase to physical time. Uncertain object states are carried as
//! zonotopes and their interval hulls.

mod bezier;
mod phased;
mod sets;

pub use bezier::BezierCurve;
pub use phased::{PhasedPath, SegmentLabel};
pub use sets::{HPolytope, IntervalBox, Zonotope};

use thiserror::Error;

/// Version tag embedded in every serialized geometry document.
pub const GEOMETRY_SCHEMA: &str = "impactplan/geometry/1";

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("curve needs at least one control point")]
    EmptyCurve,
    #[error("control points must share one dimension (found {0} and {1})")]
    MixedDimensions(usize, usize),
    #[error("phase parameter {0} outside [0,1]")]
    PhaseOutOfRange(f64),
    #[error("degree-0 curve has no derivative curve")]
    DegreeZeroDerivative,
    #[error("temporal curve must be one-dimensional (got dim {0})")]
    TemporalDimension(usize),
    #[error("temporal curve must be strictly increasing (derivative control point {0} is {1})")]
    NonMonotoneTemporal(usize, f64),
    #[error("phase rate {0} below tolerance; phased velocity undefined")]
    SingularPhase(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("box lower bound exceeds upper bound on axis {0}")]
    InvertedBox(usize),
    #[error("polytope needs at least one row")]
    EmptyPolytope,
    #[error("polytope row {0} is zero")]
    ZeroRow(usize),
    #[error("time {0} outside segment window [{1}, {2}]")]
    TimeOutOfWindow(f64, f64, f64),
}
