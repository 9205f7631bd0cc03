use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Point;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    AxisSquare,
    SquareRing,
    AxisCube,
}

/// Axis-aligned square, square ring or cube with a constant contrast
/// `eta = n^2 - 1`. Membership uses half-open intervals `[c - s/2, c + s/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shape {
    kind: ShapeKind,
    center: Point,
    outer_side: f64,
    inner_side: f64,
    eta: Complex64,
}

impl Shape {
    pub fn square(center: Point, side: f64, eta: Complex64) -> Result<Self> {
        Self::build(ShapeKind::AxisSquare, center, side, 0.0, eta)
    }

    pub fn ring(center: Point, outer_side: f64, inner_side: f64, eta: Complex64) -> Result<Self> {
        Self::build(ShapeKind::SquareRing, center, outer_side, inner_side, eta)
    }

    pub fn cube(center: Point, side: f64, eta: Complex64) -> Result<Self> {
        Self::build(ShapeKind::AxisCube, center, side, 0.0, eta)
    }

    fn build(
        kind: ShapeKind,
        center: Point,
        outer_side: f64,
        inner_side: f64,
        eta: Complex64,
    ) -> Result<Self> {
        let want = if kind == ShapeKind::AxisCube { 3 } else { 2 };
        if center.dim() != want {
            return Err(Error::DimensionMismatch {
                expected: want,
                found: center.dim(),
            });
        }
        if !(outer_side > 0.0 && outer_side.is_finite()) {
            return Err(Error::Geometry(format!("side length must be positive, got {outer_side}")));
        }
        if kind == ShapeKind::SquareRing && !(inner_side >= 0.0 && inner_side < outer_side) {
            return Err(Error::Geometry(format!(
                "ring needs 0 <= inner side < outer side, got {inner_side} / {outer_side}"
            )));
        }
        if !(eta.re.is_finite() && eta.im.is_finite()) {
            return Err(Error::Geometry("contrast must be finite".into()));
        }
        Ok(Self {
            kind,
            center,
            outer_side,
            inner_side,
            eta,
        })
    }

    pub fn kind(&self) -> ShapeKind {
        self.kind
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn outer_side(&self) -> f64 {
        self.outer_side
    }

    pub fn inner_side(&self) -> f64 {
        self.inner_side
    }

    pub fn eta(&self) -> Complex64 {
        self.eta
    }

    fn in_box(&self, x: &Point, side: f64) -> bool {
        let half = 0.5 * side;
        x.coords()
            .iter()
            .zip(self.center.coords())
            .all(|(&xi, &ci)| xi >= ci - half && xi < ci + half)
    }

    pub fn contains(&self, x: &Point) -> bool {
        if x.dim() != self.center.dim() || !self.in_box(x, self.outer_side) {
            return false;
        }
        !(self.kind == ShapeKind::SquareRing && self.inner_side > 0.0 && self.in_box(x, self.inner_side))
    }

    pub fn bounds(&self) -> Aabb {
        let half = 0.5 * self.outer_side;
        let dim = self.center.dim();
        let mut min = [0.0; 3];
        let mut max = [0.0; 3];
        for i in 0..dim {
            min[i] = self.center.raw()[i] - half;
            max[i] = self.center.raw()[i] + half;
        }
        Aabb { min, max, dim }
    }
}

/// Axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: [f64; 3],
    pub max: [f64; 3],
    pub dim: usize,
}

impl Aabb {
    pub fn new(min: &[f64], max: &[f64]) -> Result<Self> {
        super::check_dim(min.len())?;
        if min.len() != max.len() {
            return Err(Error::DimensionMismatch {
                expected: min.len(),
                found: max.len(),
            });
        }
        let mut b = Aabb {
            min: [0.0; 3],
            max: [0.0; 3],
            dim: min.len(),
        };
        for i in 0..min.len() {
            if !(max[i] > min[i]) {
                return Err(Error::Geometry(format!("empty box along axis {i}")));
            }
            b.min[i] = min[i];
            b.max[i] = max[i];
        }
        Ok(b)
    }

    pub fn union(&self, other: &Aabb) -> Aabb {
        let mut out = *self;
        for i in 0..self.dim {
            out.min[i] = self.min[i].min(other.min[i]);
            out.max[i] = self.max[i].max(other.max[i]);
        }
        out
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.max[axis] - self.min[axis]
    }

    pub fn center(&self) -> Point {
        let mut c = [0.0; 3];
        for i in 0..self.dim {
            c[i] = 0.5 * (self.min[i] + self.max[i]);
        }
        Point::from_array(c, self.dim)
    }

    /// Closed containment test.
    pub fn contains(&self, x: &Point) -> bool {
        (0..self.dim).all(|i| x.raw()[i] >= self.min[i] && x.raw()[i] <= self.max[i])
    }

    /// Largest distance from the origin to a corner.
    pub fn bounding_radius(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.min[i].abs().max(self.max[i].abs()).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Piecewise-constant contrast `eta(x)`. Later shapes override earlier ones
/// where they overlap.
#[derive(Debug, Clone, PartialEq)]
pub struct ContrastField {
    shapes: Vec<Shape>,
    bounding_box: Option<Aabb>,
}

impl ContrastField {
    pub fn new(shapes: Vec<Shape>) -> Result<Self> {
        if let Some(first) = shapes.first() {
            let dim = first.center().dim();
            if let Some(bad) = shapes.iter().find(|s| s.center().dim() != dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: bad.center().dim(),
                });
            }
        }
        let bounding_box = shapes
            .iter()
            .map(Shape::bounds)
            .reduce(|a, b| a.union(&b));
        Ok(Self {
            shapes,
            bounding_box,
        })
    }

    pub fn shapes(&self) -> &[Shape] {
        &self.shapes
    }

    pub fn bounding_box(&self) -> Option<&Aabb> {
        self.bounding_box.as_ref()
    }

    pub fn dim(&self) -> Option<usize> {
        self.shapes.first().map(|s| s.center().dim())
    }

    pub fn eval(&self, x: &Point) -> Complex64 {
        self.shapes
            .iter()
            .rev()
            .find(|s| s.contains(x))
            .map_or(Complex64::new(0.0, 0.0), Shape::eta)
    }
}
