//! Binary erosion and dilation with a rasterized disk.
//!
//! Offset `(i, j)` belongs to the disk of diameter `d` when
//! `i^2 + j^2 <= (d/2)^2`. Each disk row is a horizontal span, so both
//! operations reduce to span queries on per-row prefix counts and cost
//! `O(width * height * d)`. Pixels outside the image are ignored (neither
//! foreground nor background), which keeps erosion and dilation exact duals.

use super::BinaryImage;

/// Rows of the disk as `(dy, half_width)`.
pub fn disk_offsets(diameter: usize) -> Vec<(i32, i32)> {
    let r2 = (diameter as f64 / 2.0).powi(2);
    let reach = (diameter / 2) as i32;
    (-reach..=reach)
        .filter_map(|dy| {
            let rem = r2 - (dy * dy) as f64;
            (rem >= 0.0).then(|| (dy, rem.sqrt().floor() as i32))
        })
        .collect()
}

/// Nearest odd integer to `value`, at least 3.
pub fn odd_diameter(value: f64) -> usize {
    let k = ((value - 1.0) / 2.0).round().max(1.0);
    2 * k as usize + 1
}

struct RowCounts {
    width: usize,
    prefix: Vec<u32>,
}

impl RowCounts {
    fn new(img: &BinaryImage) -> Self {
        let w = img.width();
        let mut prefix = Vec::with_capacity((w + 1) * img.height());
        for row in img.pixels().chunks(w.max(1)) {
            let mut acc = 0u32;
            prefix.push(0);
            for &p in row {
                acc += p as u32;
                prefix.push(acc);
            }
        }
        Self { width: w, prefix }
    }

    /// Foreground count in row `y`, columns `x0..=x1`.
    fn span(&self, y: usize, x0: usize, x1: usize) -> u32 {
        let base = y * (self.width + 1);
        self.prefix[base + x1 + 1] - self.prefix[base + x0]
    }
}

fn apply(img: &BinaryImage, diameter: usize, erode: bool) -> BinaryImage {
    let (w, h) = img.dims();
    if diameter <= 1 || w == 0 || h == 0 {
        return img.clone();
    }
    let disk = disk_offsets(diameter);
    let rows = RowCounts::new(img);
    BinaryImage::from_fn(w, h, |x, y| {
        let hits = |&(dy, hw): &(i32, i32)| -> Option<bool> {
            let yy = y as i32 + dy;
            if yy < 0 || yy >= h as i32 {
                return None;
            }
            let x0 = (x as i32 - hw).max(0) as usize;
            let x1 = ((x as i32 + hw) as usize).min(w - 1);
            let n = rows.span(yy as usize, x0, x1);
            Some(if erode { n as usize == x1 - x0 + 1 } else { n > 0 })
        };
        if erode {
            disk.iter().filter_map(hits).all(|ok| ok)
        } else {
            disk.iter().filter_map(hits).any(|ok| ok)
        }
    })
}

pub fn erode(img: &BinaryImage, diameter: usize) -> BinaryImage {
    apply(img, diameter, true)
}

pub fn dilate(img: &BinaryImage, diameter: usize) -> BinaryImage {
    apply(img, diameter, false)
}

/// Erosion followed by dilation with the same disk.
pub fn opening(img: &BinaryImage, diameter: usize) -> BinaryImage {
    dilate(&erode(img, diameter), diameter)
}
