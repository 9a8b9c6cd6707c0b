//! Greedy polygon decimation.
//!
//! Each live vertex carries a score: the area of the triangle it forms with
//! its current neighbours plus the accumulated scores of previously removed
//! vertices that were adjacent to it. The lowest score (lowest original index
//! on ties) is removed first and its two neighbours are re-scored.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{polygon_area, Point2, Polygon};

/// Keeps `max(3, ceil(retain * n))` vertices of `p`.
///
/// `retain` is clamped into `(0, 1]`; `retain == 1` returns `p` unchanged.
pub fn decimate_to_fraction(p: &Polygon, retain: f64) -> Polygon {
    let n = p.len();
    let retain = if retain.is_nan() { 1.0 } else { retain.clamp(f64::MIN_POSITIVE, 1.0) };
    let wanted = ((retain * n as f64) - 1e-9).ceil().max(3.0) as usize;
    let mut d = Decimator::new(p.vertices());
    while d.live > wanted {
        if d.remove_next().is_none() {
            break;
        }
    }
    d.finish()
}

/// Removes vertices in greedy order while the enclosed area stays within
/// `max_area_delta` (relative) of the original, returning the most reduced
/// polygon found.
///
/// A candidate whose removal would break the budget is passed over; it is
/// reconsidered if one of its neighbours is removed later.
pub fn decimate_by_area_budget(p: &Polygon, max_area_delta: f64) -> Polygon {
    let original = polygon_area(p);
    if original <= 0.0 {
        return p.clone();
    }
    let mut d = Decimator::new(p.vertices());
    let mut area2 = 2.0 * super::signed_area(p.vertices());
    while d.live > 3 {
        let Some(removal) = d.peek_removal() else { break };
        // Removing v changes twice the signed area by -cross(prev, v, next).
        let next_area2 = area2 - removal.signed_twice_area;
        if ((next_area2 / 2.0).abs() - original).abs() / original > max_area_delta {
            d.skip_next();
            continue;
        }
        d.remove_next();
        area2 = next_area2;
    }
    d.finish()
}

#[derive(Clone, Copy)]
struct Entry {
    score: f64,
    index: usize,
    version: u32,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    // Reversed so the max-heap pops the smallest score, then smallest index.
    fn cmp(&self, other: &Self) -> Ordering {
        other.score.total_cmp(&self.score).then_with(|| other.index.cmp(&self.index))
    }
}

struct Removal {
    signed_twice_area: f64,
}

struct Decimator<'a> {
    pts: &'a [Point2],
    prev: Vec<usize>,
    next: Vec<usize>,
    alive: Vec<bool>,
    accumulated: Vec<f64>,
    version: Vec<u32>,
    heap: BinaryHeap<Entry>,
    live: usize,
}

impl<'a> Decimator<'a> {
    fn new(pts: &'a [Point2]) -> Self {
        let n = pts.len();
        let mut d = Self {
            pts,
            prev: (0..n).map(|i| (i + n - 1) % n).collect(),
            next: (0..n).map(|i| (i + 1) % n).collect(),
            alive: vec![true; n],
            accumulated: vec![0.0; n],
            version: vec![0; n],
            heap: BinaryHeap::with_capacity(n * 2),
            live: n,
        };
        for i in 0..n {
            let score = d.score(i);
            d.heap.push(Entry { score, index: i, version: 0 });
        }
        d
    }

    fn twice_area(&self, i: usize) -> f64 {
        let (a, b, c) = (self.pts[self.prev[i]], self.pts[i], self.pts[self.next[i]]);
        (b - a).cross(c - a)
    }

    fn score(&self, i: usize) -> f64 {
        self.twice_area(i).abs() / 2.0 + self.accumulated[i]
    }

    fn discard_stale(&mut self) {
        while let Some(top) = self.heap.peek() {
            if self.alive[top.index] && self.version[top.index] == top.version {
                return;
            }
            self.heap.pop();
        }
    }

    fn peek_removal(&mut self) -> Option<Removal> {
        if self.live <= 3 {
            return None;
        }
        self.discard_stale();
        let top = *self.heap.peek()?;
        Some(Removal { signed_twice_area: self.twice_area(top.index) })
    }

    /// Drops the current best candidate without removing its vertex.
    fn skip_next(&mut self) {
        self.discard_stale();
        self.heap.pop();
    }

    fn remove_next(&mut self) -> Option<usize> {
        if self.live <= 3 {
            return None;
        }
        self.discard_stale();
        let top = self.heap.pop()?;
        let i = top.index;
        let (p, n) = (self.prev[i], self.next[i]);
        self.alive[i] = false;
        self.next[p] = n;
        self.prev[n] = p;
        self.live -= 1;
        for j in [p, n] {
            self.accumulated[j] += top.score;
            self.version[j] += 1;
            let score = self.score(j);
            self.heap.push(Entry { score, index: j, version: self.version[j] });
        }
        Some(i)
    }

    fn finish(self) -> Polygon {
        let kept: Vec<Point2> = self.pts.iter().zip(&self.alive).filter_map(|(&p, &a)| a.then_some(p)).collect();
        // Non-adjacent duplicate inputs can collapse into adjacent ones.
        Polygon::new(kept).unwrap_or_else(|_| Polygon::new(self.pts.to_vec()).expect("input was a valid polygon"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::polygon_perimeter;

    fn poly(pts: &[(f64, f64)]) -> Polygon {
        Polygon::new(pts.iter().map(|&(x, y)| Point2::new(x, y)).collect()).unwrap()
    }

    fn is_ordered_subset(sub: &Polygon, sup: &Polygon) -> bool {
        let mut it = sup.vertices().iter();
        sub.vertices().iter().all(|v| it.any(|w| w == v))
    }

    #[test]
    fn collinear_midpoint_goes_first() {
        let p = poly(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0)]);
        let q = decimate_to_fraction(&p, 0.8);
        assert_eq!(q.len(), 4);
        assert!(!q.vertices().contains(&Point2::new(1.0, 0.0)));
    }

    #[test]
    fn full_retain_is_identity() {
        let p = poly(&[(0.0, 0.0), (3.0, 0.0), (4.0, 2.0), (2.0, 4.0), (-1.0, 2.0)]);
        assert_eq!(decimate_to_fraction(&p, 1.0), p);
    }

    #[test]
    fn star_retains_subset_and_area() {
        // Straight-edged star: 5 tips, 5 notches, 10 samples per edge.
        let corner = |k: usize| {
            let t = std::f64::consts::TAU * k as f64 / 10.0;
            let r = if k % 2 == 0 { 1.0 } else { 0.55 };
            Point2::new(r * t.cos(), r * t.sin())
        };
        let mut pts = Vec::new();
        for k in 0..10 {
            let (a, b) = (corner(k), corner((k + 1) % 10));
            pts.extend((0..10).map(|j| a + (b - a) * (j as f64 / 10.0)));
        }
        let p = Polygon::new(pts).unwrap();
        assert_eq!(p.len(), 100);
        let q = decimate_to_fraction(&p, 0.1);
        assert_eq!(q.len(), 10);
        assert!(is_ordered_subset(&q, &p));
        let (a0, a1) = (polygon_area(&p), polygon_area(&q));
        assert!((a0 - a1).abs() / a0 < 0.10, "area change {}", (a0 - a1).abs() / a0);
    }

    #[test]
    fn square_survives_one_percent_budget() {
        let p = poly(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        assert_eq!(decimate_by_area_budget(&p, 0.01), p);
    }

    #[test]
    fn triangle_is_already_minimal() {
        let p = poly(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]);
        assert_eq!(decimate_by_area_budget(&p, 0.01), p);
        assert_eq!(decimate_to_fraction(&p, 0.01), p);
    }

    #[test]
    fn smooth_polygon_reduced_within_budget() {
        let n = 200;
        let pts: Vec<Point2> = (0..n)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / n as f64;
                Point2::new(2.0 * t.cos(), t.sin())
            })
            .collect();
        let p = Polygon::new(pts).unwrap();
        let q = decimate_by_area_budget(&p, 0.01);
        assert!(q.len() < 200);
        assert!((polygon_area(&p) - polygon_area(&q)).abs() / polygon_area(&p) <= 0.01);
        assert!(is_ordered_subset(&q, &p));
    }

    #[test]
    fn comb_loses_perimeter_but_not_area() {
        // A 100 x 20 bar whose top edge carries 50 thin spikes of height 10:
        // spikes add lots of perimeter and almost no area.
        let mut pts = vec![(0.0, 0.0), (100.0, 0.0), (100.0, 20.0)];
        for k in (0..50).rev() {
            let x = k as f64 * 2.0;
            pts.push((x + 1.05, 20.0));
            pts.push((x + 1.0, 30.0));
            pts.push((x + 0.95, 20.0));
        }
        pts.push((0.0, 20.0));
        let p = poly(&pts);
        let q = decimate_by_area_budget(&p, 0.01);
        let shrink = (polygon_perimeter(&p) - polygon_perimeter(&q)) / polygon_perimeter(&p);
        assert!(shrink > 0.10, "perimeter shrink {shrink}");
        assert!((polygon_area(&p) - polygon_area(&q)).abs() / polygon_area(&p) <= 0.01);
    }
}
