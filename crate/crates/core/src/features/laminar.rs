//! Length/width, laminar shape and medial symmetry.

use crate::geometry::{GeometryError, Polygon, Result};
use crate::pipeline::LeafGeometry;

use super::{LaminarShape, MedialSymmetry};

/// x coordinates where the horizontal line at `y` crosses the boundary.
pub(crate) fn crossings(p: &Polygon, y: f64) -> Vec<f64> {
    let mut xs = Vec::new();
    for (a, b) in p.edges() {
        // Half-open rule so a vertex on the line is counted once.
        if (a.y <= y) != (b.y <= y) {
            let t = (y - a.y) / (b.y - a.y);
            xs.push(a.x + t * (b.x - a.x));
        }
    }
    xs
}

/// Outermost boundary x on each side of the line at `y`.
pub(crate) fn extent(p: &Polygon, y: f64) -> Option<(f64, f64)> {
    let xs = crossings(p, y);
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo < hi).then_some((lo, hi))
}

fn x_range(p: &Polygon) -> (f64, f64) {
    p.vertices().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v.x), hi.max(v.x)))
}

/// Lamina length over the maximum width perpendicular to the midvein.
pub fn lw_ratio(g: &LeafGeometry) -> Result<f64> {
    let (lo, hi) = x_range(&g.boundary);
    let width = hi - lo;
    if width <= 0.0 || g.lamina_length <= 0.0 {
        return Err(GeometryError::DegenerateShape("zero lamina width"));
    }
    Ok(g.lamina_length / width)
}

const SCANLINES: usize = 200;
const OBLONG_TOLERANCE: f64 = 0.025;

/// Width profile at `SCANLINES` evenly spaced heights (cell centres).
fn width_profile(g: &LeafGeometry) -> Vec<(f64, f64)> {
    let (y0, l) = (g.y_min(), g.lamina_length);
    (0..SCANLINES)
        .map(|i| {
            let f = (i as f64 + 0.5) / SCANLINES as f64;
            let w = extent(&g.boundary, y0 + f * l).map_or(0.0, |(a, b)| b - a);
            (f, w)
        })
        .collect()
}

/// Height of the widest scanline as a fraction of the lamina length.
pub fn widest_position(g: &LeafGeometry) -> f64 {
    let profile = width_profile(g);
    let mut best = profile[0];
    for &p in &profile[1..] {
        if p.1 > best.1 {
            best = p;
        }
    }
    best.0
}

/// Whether the margins run parallel, i.e. the lamina width stays within the
/// tolerance over some window of at least a third of the length inside the
/// middle 60%.
pub fn is_oblong(g: &LeafGeometry) -> bool {
    let tol = OBLONG_TOLERANCE * g.image_width;
    let inner: Vec<f64> =
        width_profile(g).into_iter().filter(|&(f, _)| (0.2..=0.8).contains(&f)).map(|(_, w)| w).collect();
    let span = (SCANLINES as f64 / 3.0).ceil() as usize + 1;
    if inner.len() < span {
        return false;
    }
    inner.windows(span).any(|win| {
        let lo = win.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = win.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo < tol
    })
}

pub fn classify_laminar_shape(g: &LeafGeometry) -> Result<LaminarShape> {
    if lw_ratio(g)? >= 10.0 {
        return Ok(LaminarShape::Linear);
    }
    if is_oblong(g) {
        return Ok(LaminarShape::Oblong);
    }
    let f = widest_position(g);
    Ok(if f < 0.4 {
        LaminarShape::Ovate
    } else if f <= 0.6 {
        LaminarShape::Elliptic
    } else {
        LaminarShape::Obovate
    })
}

const SYMMETRY_SAMPLES: usize = 64;

/// Mean ratio of the narrower to the wider half-width over the middle half
/// of the lamina.
pub fn medial_symmetry(g: &LeafGeometry) -> Result<(f64, MedialSymmetry)> {
    let (y0, l) = (g.y_min(), g.lamina_length);
    let mut sum = 0.0;
    let mut n = 0;
    for i in 0..SYMMETRY_SAMPLES {
        let f = 0.25 + 0.5 * i as f64 / (SYMMETRY_SAMPLES - 1) as f64;
        let Some((lo, hi)) = extent(&g.boundary, y0 + f * l) else { continue };
        let (left, right) = ((-lo).max(0.0), hi.max(0.0));
        if left <= 0.0 || right <= 0.0 {
            continue;
        }
        sum += left.min(right) / left.max(right);
        n += 1;
    }
    if n == 0 {
        return Err(GeometryError::DegenerateShape("no scanline spans the midvein"));
    }
    let ratio = sum / n as f64;
    // The boundary value belongs to Symmetrical; allow for rounding in the mean.
    let class = if ratio >= 0.9 - 1e-12 { MedialSymmetry::Symmetrical } else { MedialSymmetry::Asymmetrical };
    Ok((ratio, class))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;
    use std::f64::consts::TAU;

    fn profile_leaf(half_width: impl Fn(f64) -> f64, length: f64, image_width: f64) -> LeafGeometry {
        // Right side bottom to top, then left side top to bottom.
        let n = 400;
        let mut pts = Vec::new();
        for i in 0..=n {
            let t = i as f64 / n as f64;
            pts.push(Point2::new(half_width(t), t * length));
        }
        for i in (1..n).rev() {
            let t = i as f64 / n as f64;
            pts.push(Point2::new(-half_width(t), t * length));
        }
        LeafGeometry::from_outline(pts, image_width).unwrap()
    }

    fn ellipse(a: f64, b: f64) -> LeafGeometry {
        let pts = (0..512)
            .map(|i| {
                let t = TAU * i as f64 / 512.0;
                Point2::new(a * t.sin(), b + b * t.cos())
            })
            .collect();
        LeafGeometry::from_outline(pts, 4.0 * a.max(b)).unwrap()
    }

    #[test]
    fn lw_of_ellipses() {
        assert!((lw_ratio(&ellipse(50.0, 100.0)).unwrap() - 2.0).abs() < 0.02);
        assert!((lw_ratio(&ellipse(60.0, 60.0)).unwrap() - 1.0).abs() < 0.01);
        for r in [0.2, 1.0, 5.0, 20.0] {
            let got = lw_ratio(&ellipse(10.0, 10.0 * r)).unwrap();
            assert!((got - r).abs() / r < 0.01, "{r}: {got}");
        }
    }

    #[test]
    fn laminar_classes() {
        // Wide ellipse relative to the image: curved margins are not parallel.
        let mut e = ellipse(100.0, 200.0);
        e.image_width = 300.0;
        assert_eq!(classify_laminar_shape(&e).unwrap(), LaminarShape::Elliptic);
        assert_eq!(classify_laminar_shape(&ellipse(5.0, 150.0)).unwrap(), LaminarShape::Linear);
        // Egg shape widest at 0.3 L.
        let egg = |t: f64| {
            let s = if t < 0.3 { t / 0.3 } else { (1.0 - t) / 0.7 };
            80.0 * (s * (2.0 - s)).max(0.0).sqrt()
        };
        assert_eq!(classify_laminar_shape(&profile_leaf(egg, 300.0, 250.0)).unwrap(), LaminarShape::Ovate);
        assert_eq!(
            classify_laminar_shape(&profile_leaf(|t| egg(1.0 - t), 300.0, 250.0)).unwrap(),
            LaminarShape::Obovate
        );
        // Parallel sides over the middle.
        let strap = |t: f64| 60.0 * (t / 0.15).min((1.0 - t) / 0.15).min(1.0).sqrt();
        assert_eq!(classify_laminar_shape(&profile_leaf(strap, 300.0, 400.0)).unwrap(), LaminarShape::Oblong);
    }

    #[test]
    fn symmetry() {
        let (r, c) = medial_symmetry(&ellipse(40.0, 90.0)).unwrap();
        assert!((r - 1.0).abs() < 1e-9 && c == MedialSymmetry::Symmetrical);
        let skew =
            ellipse(40.0, 90.0).boundary.map(|p| Point2::new(if p.x < 0.0 { p.x * 0.5 } else { p.x }, p.y)).unwrap();
        let g = LeafGeometry::from_outline(skew.into_vertices(), 400.0).unwrap();
        let (r, c) = medial_symmetry(&g).unwrap();
        assert!((r - 0.5).abs() < 1e-9 && c == MedialSymmetry::Asymmetrical);
        let tie =
            ellipse(40.0, 90.0).boundary.map(|p| Point2::new(if p.x < 0.0 { p.x * 0.9 } else { p.x }, p.y)).unwrap();
        let (r, c) = medial_symmetry(&LeafGeometry::from_outline(tie.into_vertices(), 400.0).unwrap()).unwrap();
        assert!((r - 0.9).abs() < 1e-9 && c == MedialSymmetry::Symmetrical, "{r}");
    }
}
