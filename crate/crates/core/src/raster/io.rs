use std::path::Path;

use image::{DynamicImage, ImageFormat};

use super::{GrayImage, RasterError, Result};

/// Interleaved 8-bit RGB raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<[u8; 3]>,
}

/// Luminance `0.299 R + 0.587 G + 0.114 B`, rounded to nearest.
pub fn to_gray(rgb: &RgbImage) -> Result<GrayImage> {
    if rgb.width == 0 || rgb.height == 0 || rgb.pixels.is_empty() {
        return Err(RasterError::EmptyImage);
    }
    let px = rgb
        .pixels
        .iter()
        .map(|&[r, g, b]| {
            // Integer weights (x1000) keep the rounding exact.
            let y = 299 * r as u32 + 587 * g as u32 + 114 * b as u32;
            ((y + 500) / 1000) as u8
        })
        .collect();
    GrayImage::new(rgb.width, rgb.height, px)
}

/// Decodes PNG or binary PGM/PPM bytes into grayscale.
pub fn decode_image(bytes: &[u8]) -> Result<GrayImage> {
    let format = image::guess_format(bytes).map_err(|e| RasterError::Decode(e.to_string()))?;
    if !matches!(format, ImageFormat::Png | ImageFormat::Pnm) {
        return Err(RasterError::Decode(format!("unsupported format {format:?}")));
    }
    let img = image::load_from_memory_with_format(bytes, format).map_err(|e| RasterError::Decode(e.to_string()))?;
    from_dynamic(img)
}

pub fn load_image(path: impl AsRef<Path>) -> Result<GrayImage> {
    decode_image(&std::fs::read(path)?)
}

fn from_dynamic(img: DynamicImage) -> Result<GrayImage> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    match img {
        DynamicImage::ImageLuma8(g) => GrayImage::new(w, h, g.into_raw()),
        other => {
            let rgb = other.to_rgb8();
            let pixels = rgb.pixels().map(|p| p.0).collect();
            to_gray(&RgbImage { width: w, height: h, pixels })
        }
    }
}

impl GrayImage {
    pub fn encode_png(&self) -> Result<Vec<u8>> {
        let buf = image::GrayImage::from_raw(self.width() as u32, self.height() as u32, self.pixels().to_vec())
            .expect("buffer matches dimensions");
        let mut out = std::io::Cursor::new(Vec::new());
        buf.write_to(&mut out, ImageFormat::Png).map_err(|e| RasterError::Decode(e.to_string()))?;
        Ok(out.into_inner())
    }
}
