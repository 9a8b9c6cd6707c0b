//! Lobation from a heavily decimated outline and its convex hull.
//!
//! The outline is reduced to 1% of its vertices. Where the reduced polygon
//! leaves its hull it dips into incisions; where it touches the hull it
//! carries lobe apexes. One representative is taken from each run: the
//! vertex nearest the centroid for incisions, the furthest for apexes.

use serde::{Deserialize, Serialize};

use crate::geometry::{convex_hull, decimate_to_fraction, point_segment_distance, polygon_area, Point2, Polygon};
use crate::pipeline::LeafGeometry;

use super::laminar::extent;
use super::{Lobation, LobeCount};

const RETAIN: f64 = 0.01;
const UNLOBED_AREA: f64 = 0.05;
const MIN_INCISION_DEPTH: f64 = 0.25;
/// Incisions this close to the petiole insertion (fraction of L) are the
/// basal sinus of an extended base, not a lobe boundary.
const INSERTION_RADIUS: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LobationAnalysis {
    pub decimated: Polygon,
    pub hull: Polygon,
    pub area_diff: f64,
    pub contact_runs: usize,
    pub incision_points: Vec<Point2>,
    pub lobe_apexes: Vec<Point2>,
}

/// Relative area between a polygon and its hull.
pub fn hull_area_difference(p: &Polygon, hull: &Polygon) -> f64 {
    let h = polygon_area(hull);
    if h <= 0.0 {
        return 0.0;
    }
    ((h - polygon_area(p)) / h).clamp(0.0, 1.0)
}

pub fn analyze_lobation(g: &LeafGeometry) -> LobationAnalysis {
    let decimated = decimate_to_fraction(&g.boundary, RETAIN);
    let hull = convex_hull(decimated.vertices()).unwrap_or_else(|_| decimated.clone());
    let area_diff = hull_area_difference(&decimated, &hull);

    let v = decimated.vertices();
    let diag = crate::geometry::bounding_box(v).map_or(0.0, |(lo, hi)| lo.distance(hi));
    let tol = 1e-6 * diag;
    let on_hull: Vec<bool> =
        v.iter().map(|&p| hull.edges().any(|(a, b)| point_segment_distance(p, a, b) <= tol)).collect();

    let mut incision_points = Vec::new();
    let mut lobe_apexes = Vec::new();
    let runs = cyclic_runs(&on_hull);
    for (start, len, touching) in &runs {
        let members = (0..*len).map(|k| v[(start + k) % v.len()]);
        let d = |p: &Point2| p.distance(g.centroid);
        if *touching {
            lobe_apexes.extend(members.max_by(|a, b| d(a).total_cmp(&d(b))));
        } else {
            incision_points.extend(members.min_by(|a, b| d(a).total_cmp(&d(b))));
        }
    }
    LobationAnalysis { contact_runs: incision_points.len(), decimated, hull, area_diff, incision_points, lobe_apexes }
}

/// Maximal runs of equal flags around a cycle as `(start, len, flag)`,
/// starting at the first change of value.
fn cyclic_runs(flags: &[bool]) -> Vec<(usize, usize, bool)> {
    let n = flags.len();
    let Some(first_change) = (0..n).find(|&i| flags[i] != flags[(i + n - 1) % n]) else {
        return if n == 0 { vec![] } else { vec![(0, n, flags[0])] };
    };
    let mut runs = Vec::new();
    let mut start = first_change;
    let mut len = 0;
    for k in 0..n {
        let i = (first_change + k) % n;
        if k > 0 && flags[i] != flags[start] {
            runs.push((start, len, flags[start]));
            start = i;
            len = 0;
        }
        len += 1;
    }
    runs.push((start, len, flags[start]));
    runs
}

/// Relative horizontal depth of an incision: how far it sits inside the
/// hull, measured toward the midvein from the hull boundary at the same
/// height and side.
pub fn incision_depth(a: &LobationAnalysis, p: Point2) -> f64 {
    let Some((lo, hi)) = extent(&a.hull, p.y) else { return 0.0 };
    let outer = if p.x < 0.0 { -lo } else { hi };
    if outer <= 0.0 {
        return 0.0;
    }
    ((outer - p.x.abs()) / outer).clamp(0.0, 1.0)
}

/// Incisions that pass the depth filter (and are not the basal sinus of an
/// extended base).
pub fn surviving_incisions(a: &LobationAnalysis, g: &LeafGeometry) -> Vec<Point2> {
    let base = g.base_point();
    a.incision_points
        .iter()
        .copied()
        .filter(|&p| incision_depth(a, p) > MIN_INCISION_DEPTH)
        .filter(|&p| !(g.reflex_base && p.distance(base) <= INSERTION_RADIUS * g.lamina_length))
        .collect()
}

/// First-stage verdict from the hull area difference alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AreaVerdict {
    DefinitelyUnlobed,
    ProbablyLobed,
}

pub fn area_verdict(area_diff: f64) -> AreaVerdict {
    if area_diff < UNLOBED_AREA {
        AreaVerdict::DefinitelyUnlobed
    } else {
        AreaVerdict::ProbablyLobed
    }
}

pub fn classify_lobation(a: &LobationAnalysis, g: &LeafGeometry) -> (Lobation, LobeCount) {
    if area_verdict(a.area_diff) == AreaVerdict::DefinitelyUnlobed {
        return (Lobation::Unlobed, LobeCount::Zero);
    }
    match surviving_incisions(a, g).len() {
        0 => (Lobation::Unlobed, LobeCount::Zero),
        n => (Lobation::Lobed, LobeCount::from_count(n + 1)),
    }
}
