use std::f64::consts::FRAC_PI_2;

use super::{LeafGeometry, PetioleInfo, PipelineConfig, Result};
use crate::geometry::{polygon_centroid, resample_closed, Point2, Polygon};
use crate::raster::{trace_boundary, BinaryImage, Pixel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReflexFlags {
    pub apex: bool,
    pub base: bool,
}

/// Traces the lamina and moves it into the canonical frame.
///
/// The traced contour is lightly smoothed (circular moving average),
/// resampled evenly in arc length starting at the apex, flipped to y-up and
/// rotated about the insertion midpoint so the apex lies straight above it.
pub fn build_geometry(
    lamina: &BinaryImage,
    apex: Pixel,
    info: &PetioleInfo,
    flags: ReflexFlags,
    cfg: &PipelineConfig,
) -> Result<LeafGeometry> {
    let contour = trace_boundary(lamina)?.points;
    let start = contour
        .iter()
        .enumerate()
        .min_by_key(|(_, p)| {
            let (dx, dy) = ((p.0 - apex.0) as i64, (p.1 - apex.1) as i64);
            dx * dx + dy * dy
        })
        .map(|(i, _)| i)
        .unwrap_or(0);
    let cart: Vec<Point2> =
        contour[start..].iter().chain(&contour[..start]).map(|&(x, y)| Point2::new(x as f64, -(y as f64))).collect();
    let smooth = moving_average(&cart, cfg.smoothing_window);
    let samples = resample_closed(&smooth, cfg.resample_points.max(3));

    let to_cart = |p: Point2| Point2::new(p.x, -p.y);
    let mid = to_cart(info.insertion_midpoint());
    let axis = samples[0] - mid;
    let turn = if axis.norm() > 0.0 { FRAC_PI_2 - axis.y.atan2(axis.x) } else { 0.0 };
    let place = |p: Point2| (p - mid).rotate_about(Point2::new(0.0, 0.0), turn);

    let boundary = Polygon::new(samples.into_iter().map(place).collect())?;
    let (a, b) = info.insertion_points;
    let ys = boundary.vertices().iter().map(|p| p.y);
    let (lo, hi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| (lo.min(y), hi.max(y)));
    Ok(LeafGeometry {
        apex: boundary.vertices()[0],
        centroid: polygon_centroid(&boundary)?,
        boundary,
        insertion_points: (place(to_cart(a)), place(to_cart(b))),
        reflex_apex: flags.apex,
        reflex_base: flags.base,
        lamina_length: hi - lo,
        image_width: lamina.width() as f64,
    })
}

/// Circular moving average over `window` points (odd; smaller is a no-op).
fn moving_average(pts: &[Point2], window: usize) -> Vec<Point2> {
    let n = pts.len();
    let half = window / 2;
    if half == 0 || n < 2 * window {
        return pts.to_vec();
    }
    let k = (2 * half + 1) as f64;
    (0..n)
        .map(|i| {
            let s = (0..=2 * half).fold(Point2::new(0.0, 0.0), |acc, j| acc + pts[(i + n + j - half) % n]);
            s * (1.0 / k)
        })
        .collect()
}
