//! Shared numeric tolerances and limits.
//!
//! Every module that compares floating-point quantities against a threshold
//! takes its tolerance from here so that tests and callers can tighten or
//! relax the whole stack coherently.

use serde::{Deserialize, Serialize};

/// Numeric tolerances shared across geometry, planning and simulation.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NumericConfig {
    /// Tolerance for pointwise evaluations (curve evaluation, interpolation,
    /// phase inversion).
    pub eval_tol: f64,
    /// Tolerance for set-containment checks (boxes, polytopes, tubes).
    pub containment_tol: f64,
    /// Strictly positive floor on the phase-rate control points of temporal
    /// curves; keeps time reparameterisations invertible.
    pub hdot_min: f64,
    /// Bisection tolerance, in seconds, for locating contact times in the
    /// simulator.
    pub contact_tol: f64,
    /// Feasibility tolerance used when re-checking solver assignments
    /// against every constraint.
    pub feas_tol: f64,
    /// Threshold under which a relaxation value counts as integral.
    pub integrality_tol: f64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        Self {
            eval_tol: 1e-9,
            containment_tol: 1e-7,
            hdot_min: 1e-3,
            contact_tol: 1e-6,
            feas_tol: 1e-6,
            integrality_tol: 1e-6,
        }
    }
}
