use crate::geometry::{decimate_by_area_budget, polygon_perimeter, Polygon};

use super::Margin;

const AREA_BUDGET: f64 = 0.01;
const TOOTHED_REDUCTION: f64 = 0.10;

/// Relative perimeter lost when decimating at a 1% area budget.
pub fn perimeter_reduction(boundary: &Polygon) -> f64 {
    let before = polygon_perimeter(boundary);
    if before <= 0.0 {
        return 0.0;
    }
    let after = polygon_perimeter(&decimate_by_area_budget(boundary, AREA_BUDGET));
    ((before - after) / before).max(0.0)
}

/// Teeth carry much perimeter and little area, so a toothed margin sheds a
/// large share of its perimeter before the area budget is exhausted.
pub fn classify_margin(boundary: &Polygon) -> (f64, Margin) {
    let r = perimeter_reduction(boundary);
    let class = if r >= TOOTHED_REDUCTION { Margin::Toothed } else { Margin::Untoothed };
    (r, class)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;
    use std::f64::consts::TAU;

    fn ellipse(teeth: usize, amplitude: f64) -> Polygon {
        let n = 2048;
        Polygon::new(
            (0..n)
                .map(|i| {
                    let t = TAU * i as f64 / n as f64;
                    let saw = if teeth == 0 { 0.0 } else { (teeth as f64 * t / TAU).fract() };
                    let r = 1.0 + amplitude * saw;
                    Point2::new(50.0 * r * t.cos(), 100.0 * r * t.sin())
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn smooth_ellipse_untoothed() {
        let (r, m) = classify_margin(&ellipse(0, 0.0));
        assert_eq!(m, Margin::Untoothed, "r = {r}");
        assert!(r < 0.02);
    }

    #[test]
    fn sawtooth_ellipse_toothed() {
        let (r, m) = classify_margin(&ellipse(60, 0.02));
        assert_eq!(m, Margin::Toothed, "r = {r}");
    }

    #[test]
    fn triangle_untoothed() {
        let tri = Polygon::new(vec![Point2::new(0.0, 0.0), Point2::new(4.0, 0.0), Point2::new(0.0, 3.0)]).unwrap();
        assert_eq!(classify_margin(&tri), (0.0, Margin::Untoothed));
    }
}
