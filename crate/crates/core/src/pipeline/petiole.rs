use crate::geometry::Point2;
use crate::raster::{
    connected_components, largest_component, odd_diameter, opening, subtract, BinaryImage, Component, Pixel,
};

#[derive(Debug, Clone, PartialEq)]
pub struct PetioleInfo {
    pub petiole_mask: BinaryImage,
    /// Image coordinates (x right, y down), left point first.
    pub insertion_points: (Point2, Point2),
    pub present: bool,
}

impl PetioleInfo {
    pub fn insertion_midpoint(&self) -> Point2 {
        let (a, b) = self.insertion_points;
        (a + b) * 0.5
    }
}

/// Opening diameter for an image of the given width.
pub fn petiole_diameter(image_width: usize, fraction: f64) -> usize {
    odd_diameter(fraction * image_width as f64)
}

/// Splits the leaf into lamina and petiole.
///
/// The petiole is the residue of a disk opening that reaches below the
/// opened lamina; only that component is removed from the leaf, so teeth
/// and lobe tips shaved off by the opening stay on the lamina. The opening
/// is then repeated with a disk just wider than the stalk found, so a
/// narrow lamina base is not taken along with it. The insertion points are
/// the two furthest apart petiole pixels touching the lamina.
pub fn remove_petiole(leaf: &BinaryImage, image_width: usize, fraction: f64) -> (BinaryImage, PetioleInfo) {
    let (w, h) = leaf.dims();
    let d = petiole_diameter(image_width, fraction);
    let Some(coarse) = stem_component(leaf, d) else {
        let lamina = leaf.clone();
        let insertion_points = lowest_pair(&lamina);
        let info = PetioleInfo { petiole_mask: BinaryImage::empty(w, h), insertion_points, present: false };
        return (lamina, info);
    };
    let fine = odd_diameter(FINE_SCALE * stem_thickness(&coarse) + FINE_MARGIN);
    let stem = (fine < d)
        .then(|| stem_component(leaf, fine))
        .flatten()
        .filter(|s| s.bbox.3 == coarse.bbox.3)
        .unwrap_or(coarse);

    let mask = stem.to_image(w, h);
    let lamina = largest_component(&subtract(leaf, &mask).expect("same dimensions"));
    let insertion_points = contact_extremes(&stem, &lamina).unwrap_or_else(|| {
        let top = stem.bbox.1;
        let row = stem.pixels.iter().filter(|p| p.1 == top);
        let (l, r) = row.fold((i32::MAX, i32::MIN), |(l, r), p| (l.min(p.0), r.max(p.0)));
        (pixel_point((l, top)), pixel_point((r, top)))
    });
    let info = PetioleInfo { petiole_mask: mask, insertion_points, present: true };
    (lamina, info)
}

const FINE_SCALE: f64 = 1.5;
const FINE_MARGIN: f64 = 2.0;

/// Residue component of an opening with diameter `d` that reaches lowest
/// below the opened leaf.
fn stem_component(leaf: &BinaryImage, d: usize) -> Option<Component> {
    let core = opening(leaf, d);
    let bottom = core.bounds()?.3;
    let residue = subtract(leaf, &core).expect("same dimensions");
    connected_components(&residue).into_iter().filter(|c| c.bbox.3 > bottom).max_by_key(|c| (c.bbox.3, c.area()))
}

/// Width of the lower half of a stalk: area over length along its
/// principal axis.
fn stem_thickness(stem: &Component) -> f64 {
    let mid = (stem.bbox.1 + stem.bbox.3) / 2;
    let pts: Vec<Point2> = stem.pixels.iter().filter(|p| p.1 >= mid).map(|&p| pixel_point(p)).collect();
    let n = pts.len() as f64;
    let c = pts.iter().fold(Point2::new(0.0, 0.0), |a, &p| a + p) * (1.0 / n);
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in &pts {
        let (dx, dy) = (p.x - c.x, p.y - c.y);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let angle = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let (sin, cos) = angle.sin_cos();
    let (lo, hi) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let t = (p.x - c.x) * cos + (p.y - c.y) * sin;
        (lo.min(t), hi.max(t))
    });
    n / (hi - lo + 1.0)
}

/// The two stalk pixels touching the lamina that lie furthest apart, left
/// first.
fn contact_extremes(stem: &Component, lamina: &BinaryImage) -> Option<(Point2, Point2)> {
    let contact: Vec<Pixel> = stem
        .pixels
        .iter()
        .copied()
        .filter(|&(x, y)| (-1..=1).any(|dy| (-1..=1).any(|dx| lamina.at(x + dx, y + dy))))
        .collect();
    let mut best = (*contact.first()?, *contact.first()?);
    let mut best_d = -1;
    for (i, &a) in contact.iter().enumerate() {
        for &b in &contact[i..] {
            let d = (a.0 - b.0).pow(2) + (a.1 - b.1).pow(2);
            if d > best_d {
                best_d = d;
                best = (a, b);
            }
        }
    }
    let (a, b) = if (best.1 .0, best.1 .1) < (best.0 .0, best.0 .1) { (best.1, best.0) } else { best };
    Some((pixel_point(a), pixel_point(b)))
}

fn pixel_point(p: Pixel) -> Point2 {
    Point2::new(p.0 as f64, p.1 as f64)
}

/// Extreme pixels of the lowest lamina row.
fn lowest_pair(lamina: &BinaryImage) -> (Point2, Point2) {
    let Some((_, _, _, bottom)) = lamina.bounds() else {
        return (Point2::new(0.0, 0.0), Point2::new(0.0, 0.0));
    };
    let row = (0..lamina.width() as i32).filter(|&x| lamina.at(x, bottom));
    let (l, r) = row.fold((i32::MAX, i32::MIN), |(l, r), x| (l.min(x), r.max(x)));
    (pixel_point((l, bottom)), pixel_point((r, bottom)))
}

/// Whether the petiole enters above the lowest part of the lamina.
///
/// Heights are measured along the axis from the insertion midpoint to the
/// apex, so a tilted leaf is judged in its own frame.
pub fn detect_basal_extension(lamina: &BinaryImage, info: &PetioleInfo, apex: Pixel, tolerance: f64) -> bool {
    let mid = info.insertion_midpoint();
    let axis = pixel_point(apex) - mid;
    let len = axis.norm();
    if len == 0.0 {
        return false;
    }
    let u = axis * (1.0 / len);
    let (lo, hi) = lamina
        .foreground()
        .map(|p| (pixel_point(p) - mid).dot(u))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return false;
    }
    -lo > tolerance * (hi - lo)
}
