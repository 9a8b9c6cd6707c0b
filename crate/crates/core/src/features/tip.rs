//! Apex and base angle and shape.
//!
//! Both ends of the leaf are analysed on a band covering a quarter of the
//! lamina length: the distal quarter for the apex, the proximal quarter for
//! the base. The band is the contiguous stretch of boundary around the tip
//! vertex that stays inside the band, closed where it crosses the band edge.

use crate::geometry::{
    angle_between, curvature_stats, efd_analyze, efd_reconstruct, CurvatureStats, GeometryError, Point2, Polygon,
    Result,
};
use crate::pipeline::LeafGeometry;

use super::lobation::{classify_lobation, LobationAnalysis};
use super::{AngleClass, ApexShape, BaseShape, Lobation};

const BAND: f64 = 0.25;
const HARMONICS: usize = 12;
const POINT_DIVISOR: usize = 5;
/// Share of the band height next to the band edge dropped from the
/// reconstructed margin before measuring curvature.
const EDGE_TRIM: f64 = 0.1;
/// Angle recorded for a reflex tip.
pub const REFLEX_ANGLE: f64 = 360.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    Apex,
    Base,
}

/// Boundary stretch around one end of the leaf.
#[derive(Debug, Clone, PartialEq)]
pub struct TipBand {
    pub end: End,
    /// Vertex the angle is measured at: the apex, or the insertion midpoint.
    pub vertex: Point2,
    /// Boundary points in order, starting and ending on the band edge.
    pub margin: Vec<Point2>,
    /// Position of the tip vertex in `margin`.
    pub tip: usize,
    pub edge_y: f64,
}

impl TipBand {
    pub fn new(g: &LeafGeometry, end: End) -> Result<Self> {
        let v = g.boundary.vertices();
        let n = v.len();
        let (y0, l) = (g.y_min(), g.lamina_length);
        let (edge_y, seed) = match end {
            End::Apex => (y0 + (1.0 - BAND) * l, 0),
            End::Base => {
                let edge_y = y0 + BAND * l;
                let base = g.base_point();
                let seed = (0..n)
                    .filter(|&i| v[i].y <= edge_y)
                    .min_by(|&i, &j| v[i].distance(base).total_cmp(&v[j].distance(base)))
                    .ok_or(GeometryError::DegenerateShape("empty base band"))?;
                (edge_y, seed)
            }
        };
        let inside = |p: Point2| match end {
            End::Apex => p.y >= edge_y,
            End::Base => p.y <= edge_y,
        };
        if !inside(v[seed]) {
            return Err(GeometryError::DegenerateShape("tip vertex outside its band"));
        }
        let at = |k: isize| v[(seed as isize + k).rem_euclid(n as isize) as usize];
        let mut fwd = 0isize;
        while fwd < n as isize && inside(at(fwd + 1)) {
            fwd += 1;
        }
        let mut back = 0isize;
        while back < n as isize && inside(at(-back - 1)) {
            back += 1;
        }
        if fwd + back + 1 >= n as isize {
            return Err(GeometryError::DegenerateShape("band covers the whole outline"));
        }
        if fwd + back + 1 < 3 {
            return Err(GeometryError::DegenerateShape("fewer than 3 points in band"));
        }
        let cross = |a: Point2, b: Point2| {
            let t = (edge_y - a.y) / (b.y - a.y);
            a + (b - a) * t
        };
        let mut margin = vec![cross(at(-back), at(-back - 1))];
        margin.extend((-back..=fwd).map(at));
        margin.push(cross(at(fwd), at(fwd + 1)));
        let vertex = match end {
            End::Apex => v[seed],
            End::Base => g.base_point(),
        };
        Ok(Self { end, vertex, tip: back as usize + 1, margin, edge_y })
    }

    /// Angle between the lines from the tip vertex to the two band-edge
    /// crossings.
    pub fn angle(&self) -> Result<f64> {
        let (a, b) = (self.margin[0], self.margin[self.margin.len() - 1]);
        angle_between(a - self.vertex, b - self.vertex)
    }

    /// Curvature census of the Fourier-smoothed margin on both sides of the
    /// tip. The margin is closed by its own reflection in the band edge, so
    /// the closed contour has no chord corners, and the truncated series is
    /// sigma-attenuated to keep ringing at the tip and the closure kinks from
    /// flipping the sign of the second difference.
    pub fn smoothed_curvature(&self) -> Result<CurvatureStats> {
        let m = &self.margin;
        let mut closed: Vec<Point2> = m[self.tip..].to_vec();
        let mirror = |p: &Point2| Point2::new(p.x, 2.0 * self.edge_y - p.y);
        closed.extend(m[1..m.len() - 1].iter().rev().map(mirror));
        closed.extend_from_slice(&m[..self.tip]);
        let band = Polygon::new(closed)?;
        let coeffs = efd_analyze(&band, HARMONICS)?.lanczos_sigma();
        let rec = efd_reconstruct(&coeffs, (band.len() / POINT_DIVISOR).max(3))?;
        let r = rec.vertices();

        let height = (m[self.tip].y - self.edge_y).abs();
        let keep = |p: &Point2| match self.end {
            End::Apex => p.y >= self.edge_y + EDGE_TRIM * height,
            End::Base => p.y <= self.edge_y - EDGE_TRIM * height,
        };
        let forward: Vec<Point2> = r.iter().copied().take_while(keep).collect();
        let backward: Vec<Point2> =
            std::iter::once(r[0]).chain(r[1..].iter().rev().copied()).take_while(keep).collect();
        if forward.len() + backward.len() >= r.len() + 2 {
            // Nothing was trimmed; fall back to the whole reconstruction.
            return Ok(curvature_stats(r));
        }
        Ok(curvature_stats(&forward).merge(curvature_stats(&backward)))
    }
}

fn angle_at(g: &LeafGeometry, end: End, reflex: bool) -> Result<(f64, AngleClass)> {
    if reflex {
        return Ok((REFLEX_ANGLE, AngleClass::Reflex));
    }
    let deg = TipBand::new(g, end)?.angle()?;
    Ok((deg, AngleClass::from_degrees(deg)))
}

pub fn apex_angle(g: &LeafGeometry) -> Result<(f64, AngleClass)> {
    angle_at(g, End::Apex, g.reflex_apex)
}

pub fn base_angle(g: &LeafGeometry) -> Result<(f64, AngleClass)> {
    angle_at(g, End::Base, g.reflex_base)
}

pub fn apex_shape(g: &LeafGeometry) -> Result<(Option<CurvatureStats>, ApexShape)> {
    if g.reflex_apex {
        return Ok((None, ApexShape::Extended));
    }
    let stats = TipBand::new(g, End::Apex)?.smoothed_curvature()?;
    let class = if stats.psd >= 0.5 {
        ApexShape::Acuminate
    } else if stats.psd >= 0.3 {
        ApexShape::Straight
    } else {
        ApexShape::Convex
    };
    Ok((Some(stats), class))
}

/// For an extended base, Lobate when the leaf is lobed and some lobe apex
/// falls in the basal band; Cordate otherwise.
pub fn base_shape(g: &LeafGeometry, lob: &LobationAnalysis) -> Result<(Option<CurvatureStats>, BaseShape)> {
    if g.reflex_base {
        let edge_y = g.y_min() + BAND * g.lamina_length;
        let lobed = classify_lobation(lob, g).0 == Lobation::Lobed;
        let basal_lobe = lob.lobe_apexes.iter().any(|p| p.y <= edge_y);
        let class = if lobed && basal_lobe { BaseShape::Lobate } else { BaseShape::Cordate };
        return Ok((None, class));
    }
    let stats = TipBand::new(g, End::Base)?.smoothed_curvature()?;
    let class = if stats.nsd >= 0.2 {
        BaseShape::Concave
    } else if stats.nsd >= 0.1 {
        BaseShape::Straight
    } else {
        BaseShape::Convex
    };
    Ok((Some(stats), class))
}
