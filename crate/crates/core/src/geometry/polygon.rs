use serde::{Deserialize, Serialize};

use super::{GeometryError, Point2, Result};

/// A simple closed polygon stored counter-clockwise.
///
/// The closing edge from the last vertex back to the first is implicit.
/// Construction drops consecutive duplicate vertices and flips clockwise
/// input while keeping the first vertex in place, so callers can rely on
/// index 0 being preserved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point2>", into = "Vec<Point2>")]
pub struct Polygon {
    vertices: Vec<Point2>,
}

impl Polygon {
    pub fn new(mut vertices: Vec<Point2>) -> Result<Self> {
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        vertices.dedup();
        while vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(GeometryError::InsufficientPoints { needed: 3, got: vertices.len() });
        }
        if signed_area_of(&vertices) < 0.0 {
            vertices[1..].reverse();
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn into_vertices(self) -> Vec<Point2> {
        self.vertices
    }

    /// Edges as `(start, end)` pairs including the closing edge.
    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Applies `f` to every vertex and re-normalizes orientation.
    pub fn map(&self, f: impl Fn(Point2) -> Point2) -> Result<Self> {
        Self::new(self.vertices.iter().map(|&p| f(p)).collect())
    }
}

impl TryFrom<Vec<Point2>> for Polygon {
    type Error = GeometryError;
    fn try_from(v: Vec<Point2>) -> Result<Self> {
        Polygon::new(v)
    }
}

impl From<Polygon> for Vec<Point2> {
    fn from(p: Polygon) -> Self {
        p.vertices
    }
}

fn signed_area_of(v: &[Point2]) -> f64 {
    let n = v.len();
    let twice: f64 = (0..n).map(|i| v[i].cross(v[(i + 1) % n])).sum();
    twice / 2.0
}

/// Shoelace signed area; positive for counter-clockwise vertex order.
pub fn signed_area(vertices: &[Point2]) -> f64 {
    if vertices.len() < 3 {
        return 0.0;
    }
    signed_area_of(vertices)
}

pub fn polygon_area(p: &Polygon) -> f64 {
    signed_area_of(&p.vertices).abs()
}

pub fn polygon_perimeter(p: &Polygon) -> f64 {
    p.edges().map(|(a, b)| a.distance(b)).sum()
}

/// Area-weighted centroid of the enclosed region.
pub fn polygon_centroid(p: &Polygon) -> Result<Point2> {
    let v = &p.vertices;
    let n = v.len();
    // Shift to the first vertex to limit cancellation on large coordinates.
    let o = v[0];
    let (mut a2, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let p0 = v[i] - o;
        let p1 = v[(i + 1) % n] - o;
        let w = p0.cross(p1);
        a2 += w;
        cx += (p0.x + p1.x) * w;
        cy += (p0.y + p1.y) * w;
    }
    if a2.abs() <= f64::EPSILON * scale_sq(v) {
        return Err(GeometryError::DegenerateShape("polygon has zero area"));
    }
    Ok(Point2::new(o.x + cx / (3.0 * a2), o.y + cy / (3.0 * a2)))
}

fn scale_sq(v: &[Point2]) -> f64 {
    match super::bounding_box(v) {
        Some((lo, hi)) => {
            let d = hi - lo;
            d.dot(d)
        }
        None => 0.0,
    }
}
