use crate::raster::{BinaryImage, Pixel};

/// Locates the apex in the top quarter of the lamina.
///
/// The upper envelope (topmost lamina pixel per column) is scanned over the
/// columns the top band occupies. A dip whose depth below the lower of its
/// two flanking maxima exceeds `tolerance` of the lamina height marks an
/// apical notch; its bottom is the apex and the apex is reflex. Otherwise
/// the apex is the topmost pixel, the median column of the top row on ties.
pub fn detect_apex(lamina: &BinaryImage, tolerance: f64) -> (Pixel, bool) {
    let Some((_, y0, _, y1)) = lamina.bounds() else {
        return ((0, 0), false);
    };
    let w = lamina.width();
    let height = (y1 - y0) as f64;
    let band_bottom = y0 + (0.25 * height).floor() as i32;

    let mut top = vec![i32::MAX; w];
    for (x, y) in lamina.foreground() {
        let t = &mut top[x as usize];
        *t = (*t).min(y);
    }
    let top_row: Vec<i32> = (0..w as i32).filter(|&x| top[x as usize] == y0).collect();
    let topmost = (top_row.get((top_row.len().max(1) - 1) / 2).copied().unwrap_or(0), y0);

    let band_cols: Vec<i32> = (0..w as i32).filter(|&x| top[x as usize] <= band_bottom).collect();
    let (Some(&xl), Some(&xr)) = (band_cols.first(), band_cols.last()) else {
        return (topmost, false);
    };
    // Height of the envelope above the lamina bottom; empty columns read as -1.
    let env: Vec<i64> = (xl..=xr)
        .map(|x| match top[x as usize] {
            i32::MAX => -1,
            t => (y1 - t) as i64,
        })
        .collect();
    let n = env.len();
    let mut left_max = vec![i64::MIN; n];
    let mut right_max = vec![i64::MIN; n];
    for i in 1..n {
        left_max[i] = left_max[i - 1].max(env[i - 1]);
    }
    for i in (0..n - 1).rev() {
        right_max[i] = right_max[i + 1].max(env[i + 1]);
    }

    // Notches are searched in the central half of the band only, away from
    // margin teeth on the flanks.
    let (lo, hi) = (n / 4, n - n / 4);
    let mut best: Option<(i64, usize)> = None;
    for i in lo.max(1)..hi.min(n - 1) {
        let depth = left_max[i].min(right_max[i]) - env[i];
        if env[i] >= 0 && depth > 0 && best.map_or(true, |(d, _)| depth > d) {
            best = Some((depth, i));
        }
    }
    match best {
        Some((depth, i)) if depth as f64 > tolerance * height => {
            // Centre of the flat run at the notch bottom.
            let mut j = i;
            while j + 1 < n && env[j + 1] == env[i] {
                j += 1;
            }
            let x = xl + ((i + j) / 2) as i32;
            ((x, top[x as usize]), true)
        }
        _ => (topmost, false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ellipse_apex_is_topmost() {
        let img = BinaryImage::from_fn(100, 120, |x, y| {
            let (dx, dy) = ((x as f64 - 50.0) / 30.0, (y as f64 - 60.0) / 50.0);
            dx * dx + dy * dy <= 1.0
        });
        let (apex, reflex) = detect_apex(&img, 0.04);
        assert!(!reflex);
        assert_eq!(apex, (50, 10));
    }

    #[test]
    fn notch_bottom_is_reflex_apex() {
        // Two horns with a V notch of depth 20 at x = 50.
        let img = BinaryImage::from_fn(100, 120, |x, y| {
            let notch = 20 - ((x as i32 - 50).abs()).min(20);
            (20..80).contains(&x) && (y as i32) >= 10 + notch && y < 110
        });
        let (apex, reflex) = detect_apex(&img, 0.04);
        assert!(reflex);
        assert_eq!(apex, (50, 30));
    }

    #[test]
    fn flat_top_median_column() {
        let img = BinaryImage::from_fn(50, 50, |x, y| (10..41).contains(&x) && (5..45).contains(&y));
        assert_eq!(detect_apex(&img, 0.04), ((25, 5), false));
        let img = BinaryImage::from_fn(50, 50, |x, y| (10..40).contains(&x) && (5..45).contains(&y));
        assert_eq!(detect_apex(&img, 0.04), ((24, 5), false));
    }
}
