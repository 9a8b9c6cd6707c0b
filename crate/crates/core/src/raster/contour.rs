//! Moore-neighbour boundary tracing with Jacob's stopping criterion.

use super::{largest_component, BinaryImage, Pixel, RasterError, Result};

/// Neighbour directions in clockwise screen order (y down), starting west.
const DIRS: [(i32, i32); 8] = [(-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1)];

/// Closed outer boundary as 8-connected pixel steps, clockwise on screen.
/// The first point is not repeated at the end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelContour {
    pub points: Vec<Pixel>,
}

impl PixelContour {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn dir_index(from: Pixel, to: Pixel) -> usize {
    let d = (to.0 - from.0, to.1 - from.1);
    DIRS.iter().position(|&x| x == d).expect("backtrack is a neighbour")
}

/// Traces the outer boundary of the largest 8-connected component.
pub fn trace_boundary(img: &BinaryImage) -> Result<PixelContour> {
    let comp = largest_component(img);
    let points = trace_component(&comp);
    if points.len() < 3 {
        return Err(RasterError::EmptyImage);
    }
    Ok(PixelContour { points })
}

/// Moore trace of the component containing the first foreground pixel in
/// scan order.
pub(crate) fn trace_component(img: &BinaryImage) -> Vec<Pixel> {
    let Some(start) = img.foreground().next() else {
        return Vec::new();
    };
    // The scan-order first pixel always has a background western neighbour.
    let start_back = (start.0 - 1, start.1);
    let mut points = vec![start];
    let (mut cur, mut back) = (start, start_back);
    let limit = 4 * img.count() + 8;
    for _ in 0..limit {
        let k = dir_index(cur, back);
        let mut moved = false;
        for i in 1..=8 {
            let d = DIRS[(k + i) % 8];
            let cand = (cur.0 + d.0, cur.1 + d.1);
            if img.at(cand.0, cand.1) {
                let b = DIRS[(k + i - 1) % 8];
                back = (cur.0 + b.0, cur.1 + b.1);
                cur = cand;
                moved = true;
                break;
            }
        }
        if !moved {
            // Isolated pixel.
            return points;
        }
        if cur == start && back == start_back {
            return points;
        }
        points.push(cur);
    }
    points
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_by_three_ring() {
        let img = BinaryImage::from_fn(7, 7, |x, y| (2..5).contains(&x) && (2..5).contains(&y));
        let c = trace_boundary(&img).unwrap();
        assert_eq!(c.points, vec![(2, 2), (3, 2), (4, 2), (4, 3), (4, 4), (3, 4), (2, 4), (2, 3)]);
    }

    #[test]
    fn single_pixel_is_untraceable() {
        let img = BinaryImage::from_fn(5, 5, |x, y| x == 2 && y == 2);
        assert!(matches!(trace_boundary(&img), Err(RasterError::EmptyImage)));
        assert!(matches!(trace_boundary(&BinaryImage::empty(4, 4)), Err(RasterError::EmptyImage)));
    }

    #[test]
    fn spur_is_walked_out_and_back() {
        // Square with a one-pixel-wide tail to the right.
        let img = BinaryImage::from_fn(10, 6, |x, y| {
            ((1..4).contains(&x) && (1..4).contains(&y)) || (y == 2 && (4..7).contains(&x))
        });
        let c = trace_boundary(&img).unwrap();
        assert!(c.points.contains(&(6, 2)));
        for w in c.points.windows(2) {
            assert!((w[0].0 - w[1].0).abs() <= 1 && (w[0].1 - w[1].1).abs() <= 1);
        }
    }

    #[test]
    fn traces_largest_component_only() {
        let img = BinaryImage::from_fn(20, 8, |x, y| {
            ((1..3).contains(&x) && (1..3).contains(&y)) || ((8..14).contains(&x) && (1..6).contains(&y))
        });
        let c = trace_boundary(&img).unwrap();
        assert!(c.points.iter().all(|&(x, _)| x >= 8));
        assert_eq!(c.len(), 2 * 6 + 2 * 5 - 4);
    }
}
