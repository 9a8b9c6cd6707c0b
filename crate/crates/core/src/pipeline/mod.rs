//! Image to canonical leaf geometry.
//!
//! The stages are: segmentation, petiole removal (which also yields the
//! petiole insertion points), apex detection, then boundary extraction and
//! rotation into a frame where the estimated midvein is the positive y axis.

mod apex;
mod build;
mod petiole;
mod segment;
pub mod svg;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{bounding_box, polygon_centroid, GeometryError, Point2, Polygon};
use crate::raster::{BinaryImage, GrayImage, Pixel, RasterError};

pub use apex::detect_apex;
pub use build::{build_geometry, ReflexFlags};
pub use petiole::{detect_basal_extension, petiole_diameter, remove_petiole, PetioleInfo};
pub use segment::segment;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("segmentation failed: {0}")]
    SegmentationFailed(&'static str),
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

pub type Result<T> = std::result::Result<T, PipelineError>;

/// Tunables of the preprocessing chain. Defaults follow the documented
/// thresholds; they are exposed so experiments can vary them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Leaf darker than background (scans on a light bed).
    pub leaf_is_dark: bool,
    /// Opening disk diameter as a fraction of image width.
    pub petiole_fraction: f64,
    /// Boundary vertices after arc-length resampling.
    pub resample_points: usize,
    /// Contour smoothing window (pixels, odd) applied before resampling.
    pub smoothing_window: usize,
    /// Basal extension: insertion above the lowest lamina point by more
    /// than this fraction of the lamina length.
    pub basal_tolerance: f64,
    /// Apical notch: minimum depth, as a fraction of lamina height, for a
    /// dip in the upper envelope to count as an apical extension.
    pub apical_tolerance: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            leaf_is_dark: true,
            petiole_fraction: 0.05,
            resample_points: 2048,
            smoothing_window: 5,
            basal_tolerance: 0.02,
            apical_tolerance: 0.04,
        }
    }
}

/// Boundary of one leaf in the canonical frame.
///
/// The frame is Cartesian (y up) with the midpoint of the petiole insertion
/// points at the origin and the apex on the positive y axis, so the
/// estimated midvein is the line `x = 0`. Vertex 0 of `boundary` is the apex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafGeometry {
    pub boundary: Polygon,
    pub apex: Point2,
    pub insertion_points: (Point2, Point2),
    pub reflex_apex: bool,
    pub reflex_base: bool,
    pub lamina_length: f64,
    pub centroid: Point2,
    pub image_width: f64,
}

impl LeafGeometry {
    /// Geometry for an outline already in the canonical frame (midvein on
    /// `x = 0`, apex up). The apex is the highest vertex, nearest the
    /// midvein on ties; both insertion points sit on the midvein at the
    /// lowest boundary height and neither extension flag is set.
    pub fn from_outline(vertices: Vec<Point2>, image_width: f64) -> std::result::Result<Self, GeometryError> {
        let p = Polygon::new(vertices)?;
        let v = p.vertices();
        let top = (0..v.len())
            .max_by(|&i, &j| v[i].y.total_cmp(&v[j].y).then(v[j].x.abs().total_cmp(&v[i].x.abs())))
            .unwrap_or(0);
        let mut ordered = v[top..].to_vec();
        ordered.extend_from_slice(&v[..top]);
        let boundary = Polygon::new(ordered)?;
        let (lo, hi) = bounding_box(boundary.vertices()).expect("polygon has vertices");
        let base = Point2::new(0.0, lo.y);
        Ok(Self {
            apex: boundary.vertices()[0],
            centroid: polygon_centroid(&boundary)?,
            boundary,
            insertion_points: (base, base),
            reflex_apex: false,
            reflex_base: false,
            lamina_length: hi.y - lo.y,
            image_width,
        })
    }

    /// Midpoint of the insertion points: the base end of the midvein.
    pub fn base_point(&self) -> Point2 {
        let (a, b) = self.insertion_points;
        (a + b) * 0.5
    }

    pub fn y_min(&self) -> f64 {
        self.boundary.vertices().iter().map(|p| p.y).fold(f64::INFINITY, f64::min)
    }

    pub fn y_max(&self) -> f64 {
        self.boundary.vertices().iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Uniform scaling about the origin, including `image_width`.
    pub fn scaled(&self, s: f64) -> Self {
        self.transformed(|p| p * s, s)
    }

    /// Reflection about the midvein (`x -> -x`). Vertex 0 stays the apex.
    pub fn mirrored(&self) -> Self {
        self.transformed(|p| Point2::new(-p.x, p.y), 1.0)
    }

    fn transformed(&self, f: impl Fn(Point2) -> Point2, width_scale: f64) -> Self {
        let boundary = self.boundary.map(&f).expect("similarity keeps a valid polygon");
        let (a, b) = self.insertion_points;
        Self {
            apex: boundary.vertices()[0],
            boundary,
            insertion_points: (f(a), f(b)),
            reflex_apex: self.reflex_apex,
            reflex_base: self.reflex_base,
            lamina_length: self.lamina_length * width_scale.abs(),
            centroid: f(self.centroid),
            image_width: self.image_width * width_scale.abs(),
        }
    }
}

/// Every intermediate product of one pipeline run.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub segmented: BinaryImage,
    pub lamina: BinaryImage,
    pub petiole: PetioleInfo,
    pub apex_pixel: Pixel,
    pub geometry: LeafGeometry,
}

/// Runs all stages after segmentation.
pub fn analyze_segmented(segmented: BinaryImage, cfg: &PipelineConfig) -> Result<PipelineOutput> {
    let width = segmented.width();
    let (lamina, petiole) = remove_petiole(&segmented, width, cfg.petiole_fraction);
    if lamina.is_empty() {
        return Err(PipelineError::SegmentationFailed("no lamina left after petiole removal"));
    }
    let (apex_pixel, reflex_apex) = detect_apex(&lamina, cfg.apical_tolerance);
    let reflex_base = detect_basal_extension(&lamina, &petiole, apex_pixel, cfg.basal_tolerance);
    let geometry =
        build_geometry(&lamina, apex_pixel, &petiole, ReflexFlags { apex: reflex_apex, base: reflex_base }, cfg)?;
    Ok(PipelineOutput { segmented, lamina, petiole, apex_pixel, geometry })
}

/// Full chain from a grayscale image.
pub fn run(img: &GrayImage, cfg: &PipelineConfig) -> Result<PipelineOutput> {
    analyze_segmented(segment(img, cfg.leaf_is_dark)?, cfg)
}
