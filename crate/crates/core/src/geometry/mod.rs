//! Planar geometry kernel.
//!
//! Everything downstream of pixels works on [`Point2`] and [`Polygon`] in a
//! Cartesian, y-up frame measured in pixels. All functions are pure.

mod curvature;
mod decimate;
mod efd;
mod hull;
mod polygon;

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use curvature::{angle_between, curvature_stats, CurvatureStats};
pub use decimate::{decimate_by_area_budget, decimate_to_fraction};
pub use efd::{efd_analyze, efd_reconstruct, resample_closed, EfdCoefficients, Harmonic};
pub use hull::convex_hull;
pub use polygon::{polygon_area, polygon_centroid, polygon_perimeter, signed_area, Polygon};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("degenerate shape: {0}")]
    DegenerateShape(&'static str),
    #[error("insufficient points: need at least {needed}, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("non-finite coordinate")]
    NonFinite,
}

pub type Result<T> = std::result::Result<T, GeometryError>;

/// A point (or free vector) in the y-up pixel frame.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 2-D cross product.
    pub fn cross(self, other: Self) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Self) -> f64 {
        (self - other).norm()
    }

    /// Rotates counter-clockwise by `angle` radians about `center`.
    pub fn rotate_about(self, center: Self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let d = self - center;
        Point2::new(center.x + c * d.x - s * d.y, center.y + s * d.x + c * d.y)
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Self) -> Self {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Self) -> Self {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Self {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Self {
        Point2::new(-self.x, -self.y)
    }
}

/// Orientation of `c` relative to the directed line `a -> b`; positive when
/// `c` lies to the left.
pub(crate) fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    (b - a).cross(c - a)
}

/// Distance from `p` to the closed segment `a..b`.
pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

/// Axis-aligned bounding box as `(min, max)` corners. Empty input yields
/// `None`.
pub fn bounding_box(points: &[Point2]) -> Option<(Point2, Point2)> {
    let first = *points.first()?;
    Some(points.iter().fold((first, first), |(lo, hi), p| {
        (Point2::new(lo.x.min(p.x), lo.y.min(p.y)), Point2::new(hi.x.max(p.x), hi.y.max(p.y)))
    }))
}
