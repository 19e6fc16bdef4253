//! Phased paths: a spatial Bézier curve paired with a monotone temporal one.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{BezierCurve, GeometryError};

/// Role of a segment inside a plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentLabel {
    Free,
    PreImpact,
    PostImpact,
}

/// A spatial curve `r(s)` together with a strictly increasing temporal curve
/// `h(s)` mapping phase to time; the physical trajectory is `p(t) = r(h⁻¹(t))`
/// and the physical velocity is `ṙ(s)/ḣ(s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasedPath {
    spatial: BezierCurve,
    temporal: BezierCurve,
    label: SegmentLabel,
}

impl PhasedPath {
    /// Pairs a spatial and temporal curve. The temporal curve must be
    /// one-dimensional and strictly increasing, which is checked through its
    /// derivative control points (a sufficient condition by the convex-hull
    /// property).
    pub fn new(
        spatial: BezierCurve,
        temporal: BezierCurve,
        label: SegmentLabel,
    ) -> Result<Self, GeometryError> {
        if temporal.dim() != 1 {
            return Err(GeometryError::TemporalDimension(temporal.dim()));
        }
        if temporal.degree() == 0 {
            return Err(GeometryError::NonMonotoneTemporal(0, 0.0));
        }
        let rate = temporal.derivative()?;
        for (i, p) in rate.control_points().iter().enumerate() {
            if p[0] <= 0.0 {
                return Err(GeometryError::NonMonotoneTemporal(i, p[0]));
            }
        }
        Ok(Self {
            spatial,
            temporal,
            label,
        })
    }

    pub fn spatial(&self) -> &BezierCurve {
        &self.spatial
    }

    pub fn temporal(&self) -> &BezierCurve {
        &self.temporal
    }

    pub fn label(&self) -> SegmentLabel {
        self.label
    }

    pub fn set_label(&mut self, label: SegmentLabel) {
        self.label = label;
    }

    /// Segment start time `h(0)`.
    pub fn start_time(&self) -> f64 {
        self.temporal.first_point()[0]
    }

    /// Segment end time `h(1)`.
    pub fn end_time(&self) -> f64 {
        self.temporal.last_point()[0]
    }

    /// Physical velocity at phase `s`: `ṙ(s)/ḣ(s)`.
    pub fn velocity(&self, s: f64) -> Result<DVector<f64>, GeometryError> {
        let hdot = self.temporal.derivative()?.eval_scalar(s)?;
        if hdot <= 1e-12 {
            return Err(GeometryError::SingularPhase(hdot));
        }
        Ok(self.spatial.derivative()?.eval(s)? / hdot)
    }

    /// Inverts `h` at time `t` via bisection on the monotone temporal curve.
    pub fn phase_at_time(&self, t: f64) -> Result<f64, GeometryError> {
        let (t0, t1) = (self.start_time(), self.end_time());
        let slack = 1e-9 * (1.0 + t1.abs().max(t0.abs()));
        if t < t0 - slack || t > t1 + slack {
            return Err(GeometryError::TimeOutOfWindow(t, t0, t1));
        }
        let t = t.clamp(t0, t1);
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.temporal.eval_scalar(mid)? < t {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Position at physical time `t`.
    pub fn position_at_time(&self, t: f64) -> Result<DVector<f64>, GeometryError> {
        let s = self.phase_at_time(t)?;
        self.spatial.eval(s)
    }

    /// Physical velocity at physical time `t`.
    pub fn velocity_at_time(&self, t: f64) -> Result<DVector<f64>, GeometryError> {
        let s = self.phase_at_time(t)?;
        self.velocity(s)
    }
}
