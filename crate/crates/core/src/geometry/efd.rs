//! Elliptic Fourier descriptors of closed contours.
//!
//! The contour is parameterized by cumulative chord length and resampled at
//! `n` points evenly spaced along that length (`n` = vertex count, first
//! sample on vertex 0). The coefficients are the discrete Fourier series of
//! those samples in the elliptic form
//!
//! ```text
//! x(s) = A0 + sum_k a_k cos(2 pi k s) + b_k sin(2 pi k s)
//! y(s) = C0 + sum_k c_k cos(2 pi k s) + d_k sin(2 pi k s)
//! ```
//!
//! with `s` in `[0, 1)`. Because the samples are evenly spaced the harmonics
//! are orthogonal on the sample grid, so truncating the series can only
//! increase the residual one harmonic at a time.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::{GeometryError, Point2, Polygon, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfdCoefficients {
    pub harmonics: Vec<Harmonic>,
    /// `(A0, C0)`.
    pub dc: (f64, f64),
    pub n_source_points: usize,
}

impl EfdCoefficients {
    /// Scales harmonic `k` of `N` by `sinc(k / (N + 1))`, damping the
    /// ringing of the truncated series near corners.
    pub fn lanczos_sigma(mut self) -> Self {
        let m = self.harmonics.len() as f64 + 1.0;
        for (k, h) in self.harmonics.iter_mut().enumerate() {
            let x = PI * (k + 1) as f64 / m;
            let s = x.sin() / x;
            *h = Harmonic { a: h.a * s, b: h.b * s, c: h.c * s, d: h.d * s };
        }
        self
    }
}

pub fn efd_analyze(contour: &Polygon, n_harmonics: usize) -> Result<EfdCoefficients> {
    let n = contour.len();
    let needed = 2 * n_harmonics.max(1) + 1;
    if n < needed {
        return Err(GeometryError::InsufficientPoints { needed, got: n });
    }
    let samples = resample_closed(contour.vertices(), n);
    let inv = 1.0 / n as f64;
    let dc = samples.iter().fold((0.0, 0.0), |(sx, sy), p| (sx + p.x * inv, sy + p.y * inv));

    let harmonics = (1..=n_harmonics.max(1))
        .map(|k| {
            let (mut a, mut b, mut c, mut d) = (0.0, 0.0, 0.0, 0.0);
            for (j, p) in samples.iter().enumerate() {
                // Reduce the phase index modulo n to keep the angle small.
                let phase = TAU * ((k * j) % n) as f64 * inv;
                let (s, co) = phase.sin_cos();
                a += p.x * co;
                b += p.x * s;
                c += p.y * co;
                d += p.y * s;
            }
            // The Nyquist harmonic of an even grid has no sine part and a
            // single (not doubled) cosine weight.
            let w = if 2 * k == n { inv } else { 2.0 * inv };
            Harmonic { a: a * w, b: b * w, c: c * w, d: d * w }
        })
        .collect();

    Ok(EfdCoefficients { harmonics, dc, n_source_points: n })
}

/// Evaluates the series at `n_points` evenly spaced parameter values,
/// starting at `s = 0`.
pub fn efd_reconstruct(c: &EfdCoefficients, n_points: usize) -> Result<Polygon> {
    if n_points < 3 {
        return Err(GeometryError::InsufficientPoints { needed: 3, got: n_points });
    }
    let pts = (0..n_points).map(|j| evaluate(c, j as f64 / n_points as f64)).collect();
    Polygon::new(pts)
}

/// Point on the reconstructed curve at parameter `s` in `[0, 1)`.
pub(crate) fn evaluate(c: &EfdCoefficients, s: f64) -> Point2 {
    let (mut x, mut y) = c.dc;
    for (k, h) in c.harmonics.iter().enumerate() {
        let (sn, co) = (TAU * (k + 1) as f64 * s).sin_cos();
        x += h.a * co + h.b * sn;
        y += h.c * co + h.d * sn;
    }
    Point2::new(x, y)
}

/// Resamples the closed polyline through `v` at `n` points evenly spaced in
/// arc length, the first one on `v[0]`.
pub fn resample_closed(v: &[Point2], n: usize) -> Vec<Point2> {
    let m = v.len();
    let mut cum = Vec::with_capacity(m + 1);
    cum.push(0.0);
    for i in 0..m {
        let l = v[i].distance(v[(i + 1) % m]);
        cum.push(cum[i] + l);
    }
    let total = cum[m];
    let mut out = Vec::with_capacity(n);
    let mut seg = 0;
    for j in 0..n {
        let target = total * j as f64 / n as f64;
        while seg + 1 < m && cum[seg + 1] <= target {
            seg += 1;
        }
        let len = cum[seg + 1] - cum[seg];
        let t = if len > 0.0 { (target - cum[seg]) / len } else { 0.0 };
        let (a, b) = (v[seg], v[(seg + 1) % m]);
        out.push(a + (b - a) * t);
    }
    out
}
