use super::{PipelineError, Result};
use crate::raster::{
    binarize, fill_holes, histogram, largest_component, otsu_threshold_from_histogram, BinaryImage, GrayImage,
};

/// Minimum gap between the two Otsu class means, in gray levels, for the
/// image to count as containing an object at all.
const MIN_CONTRAST: f64 = 16.0;

/// Otsu segmentation, keeping the largest component with holes filled.
pub fn segment(img: &GrayImage, leaf_is_dark: bool) -> Result<BinaryImage> {
    let hist = histogram(img);
    let t = otsu_threshold_from_histogram(&hist);
    let (mut n0, mut s0, mut n1, mut s1) = (0u64, 0u64, 0u64, 0u64);
    for (v, &c) in hist.iter().enumerate() {
        if v <= t as usize {
            n0 += c;
            s0 += v as u64 * c;
        } else {
            n1 += c;
            s1 += v as u64 * c;
        }
    }
    if n0 == 0 || n1 == 0 {
        return Err(PipelineError::SegmentationFailed("image has a single gray level"));
    }
    let gap = s1 as f64 / n1 as f64 - s0 as f64 / n0 as f64;
    if gap < MIN_CONTRAST {
        return Err(PipelineError::SegmentationFailed("no contrast between leaf and background"));
    }
    let mask = fill_holes(&largest_component(&binarize(img, t, leaf_is_dark)));
    if mask.is_empty() {
        return Err(PipelineError::SegmentationFailed("empty foreground"));
    }
    if mask.count() == mask.width() * mask.height() {
        return Err(PipelineError::SegmentationFailed("foreground covers the whole image"));
    }
    Ok(mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::connected_components;

    fn ellipse_image(salt: bool) -> GrayImage {
        let (w, h) = (120, 100);
        let mut img = GrayImage::filled(w, h, 240).unwrap();
        for y in 0..h {
            for x in 0..w {
                let (dx, dy) = ((x as f64 - 60.0) / 40.0, (y as f64 - 50.0) / 25.0);
                if dx * dx + dy * dy <= 1.0 {
                    img.set(x, y, 40);
                }
                // Deterministic 1% salt.
                if salt && (x * 7919 + y * 104729) % 100 == 0 {
                    img.set(x, y, 255);
                }
            }
        }
        img
    }

    #[test]
    fn dark_ellipse_on_white() {
        let m = segment(&ellipse_image(false), true).unwrap();
        assert_eq!(connected_components(&m).len(), 1);
        let expected = (std::f64::consts::PI * 40.0 * 25.0) as usize;
        assert!((m.count() as f64 - expected as f64).abs() / (expected as f64) < 0.02);
    }

    #[test]
    fn salt_noise_is_absorbed() {
        let clean = segment(&ellipse_image(false), true).unwrap().count() as f64;
        let noisy = segment(&ellipse_image(true), true).unwrap().count() as f64;
        assert!((clean - noisy).abs() / clean < 0.02);
    }

    #[test]
    fn blank_scan_fails() {
        let blank = GrayImage::filled(50, 50, 255).unwrap();
        assert!(matches!(segment(&blank, true), Err(PipelineError::SegmentationFailed(_))));
        let mut faint = blank.clone();
        faint.set(3, 3, 250);
        faint.set(10, 20, 251);
        assert!(matches!(segment(&faint, true), Err(PipelineError::SegmentationFailed(_))));
    }
}
