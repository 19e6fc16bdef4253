//! Axis-aligned boxes, zonotopes and halfspace polytopes.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{GeometryError, GEOMETRY_SCHEMA};

/// Axis-aligned box `[lower, upper]` in `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalBox {
    lower: DVector<f64>,
    upper: DVector<f64>,
}

impl IntervalBox {
    pub fn new(lower: DVector<f64>, upper: DVector<f64>) -> Result<Self, GeometryError> {
        if lower.len() != upper.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        for i in 0..lower.len() {
            if lower[i] > upper[i] {
                return Err(GeometryError::InvertedBox(i));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn from_slices(lower: &[f64], upper: &[f64]) -> Result<Self, GeometryError> {
        Self::new(
            DVector::from_column_slice(lower),
            DVector::from_column_slice(upper),
        )
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &DVector<f64> {
        &self.lower
    }

    pub fn upper(&self) -> &DVector<f64> {
        &self.upper
    }

    pub fn center(&self) -> DVector<f64> {
        (&self.lower + &self.upper) * 0.5
    }

    pub fn half_widths(&self) -> DVector<f64> {
        (&self.upper - &self.lower) * 0.5
    }

    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        (0..self.dim()).all(|i| x[i] >= self.lower[i] - tol && x[i] <= self.upper[i] + tol)
    }

    /// All `2^n` corner points, in lexicographic axis order (axis 0 varies
    /// fastest).
    pub fn vertices(&self) -> Vec<DVector<f64>> {
        let n = self.dim();
        let count = 1usize << n;
        let mut out = Vec::with_capacity(count);
        for mask in 0..count {
            let mut v = self.lower.clone();
            for i in 0..n {
                if mask & (1 << i) != 0 {
                    v[i] = self.upper[i];
                }
            }
            out.push(v);
        }
        out
    }

    /// Smallest box containing both operands.
    pub fn union(&self, other: &IntervalBox) -> Result<IntervalBox, GeometryError> {
        if self.dim() != other.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let lower = DVector::from_fn(self.dim(), |i, _| self.lower[i].min(other.lower[i]));
        let upper = DVector::from_fn(self.dim(), |i, _| self.upper[i].max(other.upper[i]));
        IntervalBox::new(lower, upper)
    }

    /// Box grown by `margin` on every face.
    pub fn inflate(&self, margin: f64) -> IntervalBox {
        IntervalBox {
            lower: self.lower.map(|v| v - margin),
            upper: self.upper.map(|v| v + margin),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct BoxDoc {
    schema: String,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Serialize for IntervalBox {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        BoxDoc {
            schema: GEOMETRY_SCHEMA.to_string(),
            lower: self.lower.iter().copied().collect(),
            upper: self.upper.iter().copied().collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntervalBox {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = BoxDoc::deserialize(deserializer)?;
        IntervalBox::from_slices(&doc.lower, &doc.upper).map_err(serde::de::Error::custom)
    }
}

/// Zonotope `{c + G·ξ : ξ ∈ [−1,1]^k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Zonotope {
    center: DVector<f64>,
    generators: DMatrix<f64>,
}

impl Zonotope {
    pub fn new(center: DVector<f64>, generators: DMatrix<f64>) -> Result<Self, GeometryError> {
        if generators.nrows() != center.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: center.len(),
                got: generators.nrows(),
            });
        }
        Ok(Self { center, generators })
    }

    /// Zonotope with no generators: a single point.
    pub fn point(center: DVector<f64>) -> Self {
        let n = center.len();
        Self {
            center,
            generators: DMatrix::zeros(n, 0),
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn generators(&self) -> &DMatrix<f64> {
        &self.generators
    }

    /// Tightest axis-aligned box containing the zonotope: per axis the
    /// half-width is the sum of generator magnitudes.
    pub fn interval_hull(&self) -> IntervalBox {
        let n = self.dim();
        let mut half = DVector::zeros(n);
        for i in 0..n {
            for j in 0..self.generators.ncols() {
                half[i] += self.generators[(i, j)].abs();
            }
        }
        IntervalBox::new(&self.center - &half, &self.center + &half)
            .expect("half-widths are non-negative")
    }

    /// Image under a linear map: `<Mc, MG>`.
    pub fn linear_map(&self, m: &DMatrix<f64>) -> Result<Zonotope, GeometryError> {
        if m.ncols() != self.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim(),
                got: m.ncols(),
            });
        }
        Ok(Zonotope {
            center: m * &self.center,
            generators: m * &self.generators,
        })
    }

    /// A point of the zonotope for a given coefficient vector `ξ ∈ [−1,1]^k`.
    pub fn point_at(&self, xi: &DVector<f64>) -> Result<DVector<f64>, GeometryError> {
        if xi.len() != self.generators.ncols() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.generators.ncols(),
                got: xi.len(),
            });
        }
        Ok(&self.center + &self.generators * xi)
    }
}

#[derive(Serialize, Deserialize)]
struct ZonotopeDoc {
    schema: String,
    center: Vec<f64>,
    /// Generator columns, outermost index is the column.
    generators: Vec<Vec<f64>>,
}

impl Serialize for Zonotope {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ZonotopeDoc {
            schema: GEOMETRY_SCHEMA.to_string(),
            center: self.center.iter().copied().collect(),
            generators: (0..self.generators.ncols())
                .map(|j| self.generators.column(j).iter().copied().collect())
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Zonotope {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = ZonotopeDoc::deserialize(deserializer)?;
        let n = doc.center.len();
        let k = doc.generators.len();
        let mut g = DMatrix::zeros(n, k);
        for (j, col) in doc.generators.iter().enumerate() {
            if col.len() != n {
                return Err(serde::de::Error::custom("generator column dimension mismatch"));
            }
            for i in 0..n {
                g[(i, j)] = col[i];
            }
        }
        Zonotope::new(DVector::from_vec(doc.center), g).map_err(serde::de::Error::custom)
    }
}

/// Halfspace polytope `{x : Hx ≤ b}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HPolytope {
    h: DMatrix<f64>,
    b: DVector<f64>,
}

impl HPolytope {
    pub fn new(h: DMatrix<f64>, b: DVector<f64>) -> Result<Self, GeometryError> {
        if h.nrows() == 0 {
            return Err(GeometryError::EmptyPolytope);
        }
        if h.nrows() != b.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: h.nrows(),
                got: b.len(),
            });
        }
        for i in 0..h.nrows() {
            if h.row(i).iter().all(|v| *v == 0.0) {
                return Err(GeometryError::ZeroRow(i));
            }
        }
        Ok(Self { h, b })
    }

    /// Box as a polytope with unit-norm rows, so face margins are metric
    /// distances.
    pub fn from_box(bx: &IntervalBox) -> Self {
        let n = bx.dim();
        let mut h = DMatrix::zeros(2 * n, n);
        let mut b = DVector::zeros(2 * n);
        for i in 0..n {
            h[(2 * i, i)] = 1.0;
            b[2 * i] = bx.upper()[i];
            h[(2 * i + 1, i)] = -1.0;
            b[2 * i + 1] = -bx.lower()[i];
        }
        Self { h, b }
    }

    pub fn dim(&self) -> usize {
        self.h.ncols()
    }

    pub fn faces(&self) -> usize {
        self.h.nrows()
    }

    pub fn h(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    /// Signed inside margin: `min_f (b_f − H_f·x)`, positive inside.
    pub fn margin(&self, x: &DVector<f64>) -> f64 {
        (0..self.faces())
            .map(|f| self.b[f] - self.h.row(f).transpose().dot(x))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        self.margin(x) >= -tol
    }
}
