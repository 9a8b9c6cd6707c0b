//! Debug renderings of the pipeline stages as standalone SVG documents.
//!
//! Masks are drawn as the traced outlines of their components, so files stay
//! small. Coordinates are pixels; the canonical geometry is drawn y-down
//! around its own bounding box.

use std::fmt::Write;

use super::{petiole_diameter, LeafGeometry, PipelineConfig, PipelineOutput};
use crate::geometry::Point2;
use crate::raster::{connected_components, opening, BinaryImage};

fn document(w: f64, h: f64, body: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {w:.1} {h:.1}\" width=\"{w:.0}\" height=\"{h:.0}\">\n{body}</svg>\n"
    )
}

fn polygon(pts: impl Iterator<Item = Point2>, style: &str) -> String {
    let mut s = String::from("<polygon points=\"");
    for p in pts {
        let _ = write!(s, "{:.2},{:.2} ", p.x, p.y);
    }
    s.push_str("\" ");
    s.push_str(style);
    s.push_str("/>\n");
    s
}

fn circle(p: Point2, r: f64, fill: &str) -> String {
    format!("<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{r}\" fill=\"{fill}\"/>\n", p.x, p.y)
}

/// Outlines of every component of a mask.
pub fn mask_svg(img: &BinaryImage, stroke: &str) -> String {
    let mut body = String::new();
    for c in connected_components(img) {
        let outline = crate::raster::trace_boundary(&c.to_image(img.width(), img.height()));
        let pts: Vec<Point2> = match outline {
            Ok(o) => o.points.iter().map(|&(x, y)| Point2::new(x as f64 + 0.5, y as f64 + 0.5)).collect(),
            Err(_) => c.pixels.iter().map(|&(x, y)| Point2::new(x as f64 + 0.5, y as f64 + 0.5)).collect(),
        };
        body += &polygon(pts.into_iter(), &format!("fill=\"none\" stroke=\"{stroke}\" stroke-width=\"1\""));
    }
    document(img.width() as f64, img.height() as f64, &body)
}

/// Canonical boundary with apex, insertion points, centroid and midvein.
pub fn geometry_svg(g: &LeafGeometry) -> String {
    let v = g.boundary.vertices();
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in v {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
    }
    let (y0, y1) = (g.y_min(), g.y_max());
    let pad = 0.05 * (x1 - x0).max(y1 - y0);
    let flip = |p: Point2| Point2::new(p.x - x0 + pad, y1 - p.y + pad);
    let mut body = polygon(v.iter().map(|&p| flip(p)), "fill=\"#cfe8c8\" stroke=\"#2b6b22\" stroke-width=\"1\"");
    let (top, bottom) = (flip(Point2::new(0.0, y1)), flip(Point2::new(0.0, y0.min(0.0))));
    let _ = writeln!(
        body,
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>",
        top.x, top.y, bottom.x, bottom.y
    );
    body += &circle(flip(g.apex), 3.0, "#c0392b");
    body += &circle(flip(g.insertion_points.0), 3.0, "#2c5aa0");
    body += &circle(flip(g.insertion_points.1), 3.0, "#2c5aa0");
    body += &circle(flip(g.centroid), 3.0, "#444");
    document(x1 - x0 + 2.0 * pad, y1 - y0 + 2.0 * pad, &body)
}

/// One `(stage name, svg)` pair per stage: mask, opening, petiole,
/// boundary and rotated geometry.
pub fn stage_svgs(out: &PipelineOutput, cfg: &PipelineConfig) -> Vec<(&'static str, String)> {
    let d = petiole_diameter(out.segmented.width(), cfg.petiole_fraction);
    let opened = opening(&out.segmented, d);
    let mut boundary = mask_svg(&out.lamina, "#2b6b22");
    let apex = Point2::new(out.apex_pixel.0 as f64 + 0.5, out.apex_pixel.1 as f64 + 0.5);
    let marks = circle(apex, 3.0, "#c0392b")
        + &circle(out.petiole.insertion_points.0, 3.0, "#2c5aa0")
        + &circle(out.petiole.insertion_points.1, 3.0, "#2c5aa0");
    boundary.insert_str(boundary.len() - "</svg>\n".len(), &marks);
    vec![
        ("mask", mask_svg(&out.segmented, "#000")),
        ("opening", mask_svg(&opened, "#2c5aa0")),
        ("petiole", mask_svg(&out.petiole.petiole_mask, "#c0392b")),
        ("boundary", boundary),
        ("geometry", geometry_svg(&out.geometry)),
    ]
}
