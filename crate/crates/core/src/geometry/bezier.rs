//! Bézier curves in Bernstein form.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{GeometryError, IntervalBox, GEOMETRY_SCHEMA};

/// A Bézier curve of degree `d` with `d+1` control points in `R^dim`.
///
/// Evaluation uses the Bernstein basis,
/// `r(s) = Σ_b C(d,b) (1−s)^(d−b) s^b r^(b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BezierCurve {
    control_points: Vec<DVector<f64>>,
}

impl BezierCurve {
    /// Builds a curve from its control points. All points must share one
    /// dimension and at least one point is required.
    pub fn new(control_points: Vec<DVector<f64>>) -> Result<Self, GeometryError> {
        let first = control_points.first().ok_or(GeometryError::EmptyCurve)?;
        let dim = first.len();
        for p in &control_points {
            if p.len() != dim {
                return Err(GeometryError::MixedDimensions(dim, p.len()));
            }
        }
        Ok(Self { control_points })
    }

    /// Convenience constructor from plain coordinate rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, GeometryError> {
        Self::new(
            rows.iter()
                .map(|r| DVector::from_column_slice(r))
                .collect(),
        )
    }

    /// One-dimensional curve from scalar control points.
    pub fn scalar(values: &[f64]) -> Result<Self, GeometryError> {
        Self::new(values.iter().map(|v| DVector::from_element(1, *v)).collect())
    }

    pub fn dim(&self) -> usize {
        self.control_points[0].len()
    }

    pub fn degree(&self) -> usize {
        self.control_points.len() - 1
    }

    pub fn control_points(&self) -> &[DVector<f64>] {
        &self.control_points
    }

    pub fn first_point(&self) -> &DVector<f64> {
        &self.control_points[0]
    }

    pub fn last_point(&self) -> &DVector<f64> {
        self.control_points.last().unwrap()
    }

    /// Evaluates the curve at phase `s ∈ [0,1]` via the Bernstein sum.
    pub fn eval(&self, s: f64) -> Result<DVector<f64>, GeometryError> {
        if !(0.0..=1.0).contains(&s) {
            return Err(GeometryError::PhaseOutOfRange(s));
        }
        let d = self.degree();
        let mut out = DVector::zeros(self.dim());
        for (b, point) in self.control_points.iter().enumerate() {
            let w = binomial(d, b) * (1.0 - s).powi((d - b) as i32) * s.powi(b as i32);
            out += point * w;
        }
        Ok(out)
    }

    /// Scalar evaluation shortcut for one-dimensional curves.
    pub fn eval_scalar(&self, s: f64) -> Result<f64, GeometryError> {
        let v = self.eval(s)?;
        if v.len() != 1 {
            return Err(GeometryError::DimensionMismatch {
                expected: 1,
                got: v.len(),
            });
        }
        Ok(v[0])
    }

    /// Returns the hodograph: the degree `d−1` curve with control points
    /// `d·(r^(b+1) − r^(b))` whose value at `s` is dr/ds.
    pub fn derivative(&self) -> Result<BezierCurve, GeometryError> {
        let d = self.degree();
        if d == 0 {
            return Err(GeometryError::DegreeZeroDerivative);
        }
        let pts = self
            .control_points
            .windows(2)
            .map(|w| (&w[1] - &w[0]) * d as f64)
            .collect();
        BezierCurve::new(pts)
    }

    /// Componentwise min/max over control points. Contains the curve by the
    /// convex-hull property, conservatively.
    pub fn bounding_box(&self) -> IntervalBox {
        let dim = self.dim();
        let mut lower = self.control_points[0].clone();
        let mut upper = self.control_points[0].clone();
        for p in &self.control_points[1..] {
            for i in 0..dim {
                lower[i] = lower[i].min(p[i]);
                upper[i] = upper[i].max(p[i]);
            }
        }
        IntervalBox::new(lower, upper).expect("min/max ordering holds by construction")
    }

    /// Degree elevation: returns an equivalent curve of degree `d+1`.
    pub fn elevate_degree(&self) -> BezierCurve {
        let d = self.degree();
        let n = d + 1;
        let mut pts = Vec::with_capacity(n + 1);
        pts.push(self.control_points[0].clone());
        for b in 1..=d {
            let alpha = b as f64 / n as f64;
            pts.push(&self.control_points[b - 1] * alpha + &self.control_points[b] * (1.0 - alpha));
        }
        pts.push(self.control_points[d].clone());
        BezierCurve::new(pts).expect("elevated points share the source dimension")
    }

    /// Elevates the curve until it reaches `target` degree.
    pub fn elevate_to_degree(&self, target: usize) -> BezierCurve {
        let mut cur = self.clone();
        while cur.degree() < target {
            cur = cur.elevate_degree();
        }
        cur
    }
}

/// Binomial coefficient C(n, k) as f64; exact for the small degrees used here.
pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k.min(n));
    let mut num = 1.0;
    let mut den = 1.0;
    for i in 0..k {
        num *= (n - i) as f64;
        den *= (i + 1) as f64;
    }
    num / den
}

#[derive(Serialize, Deserialize)]
struct BezierDoc {
    schema: String,
    dim: usize,
    degree: usize,
    control_points: Vec<Vec<f64>>,
}

impl Serialize for BezierCurve {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        BezierDoc {
            schema: GEOMETRY_SCHEMA.to_string(),
            dim: self.dim(),
            degree: self.degree(),
            control_points: self
                .control_points
                .iter()
                .map(|p| p.iter().copied().collect())
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BezierCurve {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = BezierDoc::deserialize(deserializer)?;
        let curve = BezierCurve::from_rows(&doc.control_points).map_err(serde::de::Error::custom)?;
        if curve.degree() != doc.degree || curve.dim() != doc.dim {
            return Err(serde::de::Error::custom(
                "control point shape disagrees with declared dim/degree",
            ));
        }
        Ok(curve)
    }
}
