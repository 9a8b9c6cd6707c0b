//! QuickHull for planar point sets.

use super::{orient, GeometryError, Point2, Polygon, Result};

/// Strictly convex hull of `points`, counter-clockwise.
///
/// Points lying on a hull edge are not reported as vertices. The output
/// starts at the lexicographically smallest point (min x, then min y).
pub fn convex_hull(points: &[Point2]) -> Result<Polygon> {
    if points.len() < 3 {
        return Err(GeometryError::InsufficientPoints { needed: 3, got: points.len() });
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(GeometryError::NonFinite);
    }
    let lex = |a: &&Point2, b: &&Point2| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y));
    let lo = *points.iter().min_by(lex).expect("non-empty");
    let hi = *points.iter().max_by(lex).expect("non-empty");

    let mut below = Vec::new();
    let mut above = Vec::new();
    for &p in points {
        let o = orient(lo, hi, p);
        if o < 0.0 {
            below.push(p);
        } else if o > 0.0 {
            above.push(p);
        }
    }
    if below.is_empty() && above.is_empty() {
        return Err(GeometryError::DegenerateShape("all points are collinear"));
    }

    let mut out = Vec::with_capacity(32);
    out.push(lo);
    chain(lo, hi, &below, &mut out);
    out.push(hi);
    chain(hi, lo, &above, &mut out);
    Polygon::new(out)
}

/// Emits, in order from `a` to `b`, the hull vertices strictly between them.
/// `set` holds the candidates strictly to the right of `a -> b`.
fn chain(a: Point2, b: Point2, set: &[Point2], out: &mut Vec<Point2>) {
    let Some(&far) = set.iter().max_by(|p, q| {
        let dp = -orient(a, b, **p);
        let dq = -orient(a, b, **q);
        // Equal distances: prefer the lexicographically smaller point.
        dp.total_cmp(&dq).then_with(|| q.x.total_cmp(&p.x)).then_with(|| q.y.total_cmp(&p.y))
    }) else {
        return;
    };
    let s1: Vec<Point2> = set.iter().copied().filter(|&p| orient(a, far, p) < 0.0).collect();
    let s2: Vec<Point2> = set.iter().copied().filter(|&p| orient(far, b, p) < 0.0).collect();
    chain(a, far, &s1, out);
    out.push(far);
    chain(far, b, &s2, out);
}
