//! Signal temporal logic: formulas, parsing, and exact quantitative monitoring.
//!
//! Formulas are built from affine predicates over a named system's position,
//! boolean connectives, and time-bounded temporal operators. Signals are
//! piecewise-linear position traces, so every predicate trace is itself
//! piecewise linear and robustness can be computed exactly: inner min/max
//! reduce to breakpoint scans with crossing points inserted explicitly.
//!
//! The [`reference`] submodule carries a deliberately simple dense-sampling
//! monitor used to validate the exact one.

mod ast;
mod monitor;
mod parse;
mod pwl;
pub mod reference;
mod signal;

pub use ast::{Formula, Predicate, TimeInterval};
pub use monitor::{robustness, robustness_trace};
pub use parse::parse_formula;
pub use signal::{signal_from_paths, Signal, Trace};

use thiserror::Error;

/// Schema tag for serialized signals.
pub const STL_SCHEMA: &str = "impactplan/stl/1";

/// Errors raised by formula construction, parsing, and monitoring.
#[derive(Debug, Error)]
pub enum StlError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown system `{0}`")]
    UnknownSystem(String),
    #[error("unknown region `{0}`")]
    UnknownRegion(String),
    #[error("malformed interval [{t1}, {t2}]: bounds must satisfy 0 <= t1 <= t2")]
    BadInterval { t1: f64, t2: f64 },
    #[error("affine predicate needs a nonzero coefficient vector")]
    ZeroCoefficients,
    #[error("affine predicate mixes systems `{0}` and `{1}`")]
    MixedSystems(String, String),
    #[error("empty {0} has no robustness value")]
    EmptyConnective(&'static str),
    #[error("trace for `{system}` covers [{have_lo}, {have_hi}] s but the formula needs [{need_lo}, {need_hi}] s")]
    Coverage { system: String, need_lo: f64, need_hi: f64, have_lo: f64, have_hi: f64 },
    #[error("trace needs at least two breakpoints")]
    ShortTrace,
    #[error("trace times must be strictly increasing (t[{0}] >= t[{1}])")]
    NonIncreasingTimes(usize, usize),
    #[error("trace breakpoint count {times} does not match value count {values}")]
    LengthMismatch { times: usize, values: usize },
    #[error("position dimension {got} does not match trace dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("segments of `{system}` leave a gap of {gap} m at t = {t} s")]
    ContinuityGap { system: String, t: f64, gap: f64 },
    #[error("sampling step must be positive, got {0}")]
    BadSampleStep(f64),
    #[error("system `{system}` has no segments to sample")]
    NoSegments { system: String },
}
