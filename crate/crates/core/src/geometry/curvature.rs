use serde::{Deserialize, Serialize};

use super::{bounding_box, GeometryError, Point2, Result};

/// Sign census of the discrete second difference of `y` along a chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureStats {
    pub n_total: usize,
    pub n_positive: usize,
    pub n_negative: usize,
    pub psd: f64,
    pub nsd: f64,
}

impl CurvatureStats {
    pub fn empty() -> Self {
        Self { n_total: 0, n_positive: 0, n_negative: 0, psd: 0.0, nsd: 0.0 }
    }

    /// Pools the vertex counts of two chains.
    pub fn merge(self, other: Self) -> Self {
        Self::from_counts(
            self.n_total + other.n_total,
            self.n_positive + other.n_positive,
            self.n_negative + other.n_negative,
        )
    }

    fn from_counts(n_total: usize, n_positive: usize, n_negative: usize) -> Self {
        let frac = |k: usize| if n_total == 0 { 0.0 } else { k as f64 / n_total as f64 };
        Self { n_total, n_positive, n_negative, psd: frac(n_positive), nsd: frac(n_negative) }
    }
}

/// Counts interior vertices whose second difference
/// `y[i-1] - 2 y[i] + y[i+1]` is positive or negative. Magnitudes within
/// `1e-9` of the chain's height count as neither.
pub fn curvature_stats(chain: &[Point2]) -> CurvatureStats {
    if chain.len() < 3 {
        return CurvatureStats::empty();
    }
    let height = bounding_box(chain).map_or(0.0, |(lo, hi)| hi.y - lo.y);
    let eps = 1e-9 * height;
    let (mut pos, mut neg) = (0, 0);
    for w in chain.windows(3) {
        let d2 = w[0].y - 2.0 * w[1].y + w[2].y;
        if d2 > eps {
            pos += 1;
        } else if d2 < -eps {
            neg += 1;
        }
    }
    CurvatureStats::from_counts(chain.len() - 2, pos, neg)
}

/// Angle in degrees, within `[0, 180]`, between two vectors leaving a common
/// vertex.
pub fn angle_between(v1: Point2, v2: Point2) -> Result<f64> {
    if v1.norm() == 0.0 || v2.norm() == 0.0 {
        return Err(GeometryError::DegenerateShape("zero-length direction"));
    }
    Ok(v1.cross(v2).abs().atan2(v1.dot(v2)).to_degrees())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(f: impl Fn(f64) -> f64) -> Vec<Point2> {
        (-10..=10).map(|i| i as f64 / 10.0).map(|x| Point2::new(x, f(x))).collect()
    }

    #[test]
    fn straight_line_has_no_sign() {
        let s = curvature_stats(&samples(|x| 0.5 * x + 1.0));
        assert_eq!((s.n_positive, s.n_negative, s.psd, s.nsd), (0, 0, 0.0, 0.0));
        assert_eq!(s.n_total, 19);
    }

    #[test]
    fn parabolas() {
        assert_eq!(curvature_stats(&samples(|x| x * x)).psd, 1.0);
        assert_eq!(curvature_stats(&samples(|x| -x * x)).nsd, 1.0);
    }

    #[test]
    fn angles() {
        let e = Point2::new(1.0, 0.0);
        assert!((angle_between(e, Point2::new(0.0, 1.0)).unwrap() - 90.0).abs() < 1e-12);
        assert!((angle_between(e, Point2::new(-1.0, 0.0)).unwrap() - 180.0).abs() < 1e-12);
        assert!((angle_between(e, Point2::new(1.0, 1.0)).unwrap() - 45.0).abs() < 1e-9);
        assert!(angle_between(e, Point2::default()).is_err());
    }
}
