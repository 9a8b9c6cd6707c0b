//! Raster primitives: images, thresholding, disk morphology, connected
//! components and outer boundary tracing.
//!
//! Images are row-major with the origin at the top-left corner and `y`
//! growing downwards. Foreground connectivity is 8-neighbour throughout.

mod components;
mod contour;
mod io;
mod morphology;
mod otsu;

use thiserror::Error;

pub use components::{connected_components, fill_holes, largest_component, Component};
pub use contour::{trace_boundary, PixelContour};
pub use io::{decode_image, load_image, to_gray, RgbImage};
pub use morphology::{dilate, disk_offsets, erode, odd_diameter, opening};
pub use otsu::{binarize, histogram, otsu_threshold, otsu_threshold_from_histogram};

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("image is empty")]
    EmptyImage,
    #[error("image dimensions differ: {0:?} vs {1:?}")]
    ShapeMismatch((usize, usize), (usize, usize)),
    #[error("pixel buffer of length {got} does not match {width}x{height}")]
    BadBuffer { width: usize, height: usize, got: usize },
    #[error("cannot decode image: {0}")]
    Decode(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, RasterError>;

/// Integer pixel coordinate `(x, y)` in image space.
pub type Pixel = (i32, i32);

/// 8-bit grayscale raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(RasterError::EmptyImage);
        }
        if pixels.len() != width * height {
            return Err(RasterError::BadBuffer { width, height, got: pixels.len() });
        }
        Ok(Self { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.pixels[y * self.width + x] = v;
    }
}

/// Boolean raster; `true` marks foreground (leaf).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    pixels: Vec<bool>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, pixels: Vec<bool>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(RasterError::BadBuffer { width, height, got: pixels.len() });
        }
        Ok(Self { width, height, pixels })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        Self { width, height, pixels: vec![false; width * height] }
    }

    /// Builds an image from a predicate over pixel coordinates.
    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self { width, height, pixels }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn pixels(&self) -> &[bool] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.pixels[y * self.width + x]
    }

    /// Bounds-checked lookup; outside pixels read as background.
    pub fn at(&self, x: i32, y: i32) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.pixels[y as usize * self.width + x as usize]
    }

    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.pixels[y * self.width + x] = v;
    }

    pub fn count(&self) -> usize {
        self.pixels.iter().filter(|&&p| p).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.pixels.iter().any(|&p| p)
    }

    pub fn complement(&self) -> Self {
        Self { width: self.width, height: self.height, pixels: self.pixels.iter().map(|&p| !p).collect() }
    }

    /// Foreground pixels as `(x, y)` in scan order.
    pub fn foreground(&self) -> impl Iterator<Item = Pixel> + '_ {
        self.pixels
            .iter()
            .enumerate()
            .filter_map(move |(i, &p)| p.then(|| ((i % self.width) as i32, (i / self.width) as i32)))
    }

    /// Bounding box `(min_x, min_y, max_x, max_y)` of the foreground.
    pub fn bounds(&self) -> Option<(i32, i32, i32, i32)> {
        self.foreground().fold(None, |acc, (x, y)| {
            Some(match acc {
                None => (x, y, x, y),
                Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
            })
        })
    }
}

/// `a AND NOT b`.
pub fn subtract(a: &BinaryImage, b: &BinaryImage) -> Result<BinaryImage> {
    if a.dims() != b.dims() {
        return Err(RasterError::ShapeMismatch(a.dims(), b.dims()));
    }
    Ok(BinaryImage {
        width: a.width,
        height: a.height,
        pixels: a.pixels.iter().zip(&b.pixels).map(|(&p, &q)| p && !q).collect(),
    })
}
