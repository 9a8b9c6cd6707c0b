use super::{BinaryImage, GrayImage};

pub fn histogram(img: &GrayImage) -> [u64; 256] {
    let mut h = [0u64; 256];
    for &p in img.pixels() {
        h[p as usize] += 1;
    }
    h
}

/// Otsu's threshold: the level `t` maximizing between-class variance of the
/// split `{<= t}` / `{> t}`. Ties resolve to the smallest `t`; a histogram
/// with a single occupied level returns that level.
pub fn otsu_threshold_from_histogram(hist: &[u64; 256]) -> u8 {
    let total: u64 = hist.iter().sum();
    if total == 0 {
        return 0;
    }
    let n = total as f64;
    let sum_all: f64 = hist.iter().enumerate().map(|(i, &c)| i as f64 * c as f64).sum();

    let mut best: Option<(u8, f64)> = None;
    let (mut w0, mut sum0) = (0u64, 0.0f64);
    for (t, &c) in hist.iter().enumerate() {
        w0 += c;
        sum0 += t as f64 * c as f64;
        if w0 == 0 || w0 == total {
            continue;
        }
        let w1 = (total - w0) as f64;
        let m0 = sum0 / w0 as f64;
        let m1 = (sum_all - sum0) / w1;
        let var = (w0 as f64 / n) * (w1 / n) * (m0 - m1) * (m0 - m1);
        if best.is_none_or(|(_, b)| var > b) {
            best = Some((t as u8, var));
        }
    }
    match best {
        Some((t, _)) => t,
        None => hist.iter().position(|&c| c > 0).unwrap_or(0) as u8,
    }
}

pub fn otsu_threshold(img: &GrayImage) -> u8 {
    otsu_threshold_from_histogram(&histogram(img))
}

/// Foreground is the `<= t` side when `leaf_is_dark`, otherwise `> t`.
pub fn binarize(img: &GrayImage, t: u8, leaf_is_dark: bool) -> BinaryImage {
    let pixels = img.pixels().iter().map(|&p| (p <= t) == leaf_is_dark).collect();
    BinaryImage::new(img.width(), img.height(), pixels).expect("same dimensions")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bimodal_split() {
        let px: Vec<u8> = (0..100).map(|i| if i % 2 == 0 { 50 } else { 200 }).collect();
        let img = GrayImage::new(10, 10, px).unwrap();
        let t = otsu_threshold(&img);
        assert!((50..200).contains(&t));
        let b = binarize(&img, t, true);
        assert_eq!(b.count(), 50);
        assert!(b.pixels().iter().zip(img.pixels()).all(|(&f, &v)| f == (v == 50)));
    }

    #[test]
    fn constant_image_returns_its_level() {
        assert_eq!(otsu_threshold(&GrayImage::filled(4, 4, 7).unwrap()), 7);
    }

    #[test]
    fn binarize_polarity() {
        let zeros = GrayImage::filled(3, 3, 0).unwrap();
        assert_eq!(binarize(&zeros, 7, true).count(), 9);

        let checker: Vec<u8> = (0..16).map(|i| if (i / 4 + i % 4) % 2 == 0 { 0 } else { 255 }).collect();
        let img = GrayImage::new(4, 4, checker).unwrap();
        let dark = binarize(&img, 128, true);
        assert!(dark.pixels().iter().zip(img.pixels()).all(|(&f, &v)| f == (v == 0)));
        assert_eq!(binarize(&img, 128, false), dark.complement());
    }
}
