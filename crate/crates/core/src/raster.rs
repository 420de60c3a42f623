//! Pixel containers shared by the renderer, morphology and metrics, plus PNG I/O.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("png decode: {0}")]
    Decode(#[from] png::DecodingError),
    #[error("png encode: {0}")]
    Encode(#[from] png::EncodingError),
    #[error("unsupported png layout: {0}")]
    Unsupported(String),
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
}

/// Row-major 8-bit RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl RasterImage {
    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Self {
        let mut pixels = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            pixels.extend_from_slice(&rgb);
        }
        Self { width, height, pixels }
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub fn set(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = (y * self.width + x) * 3;
        self.pixels[i..i + 3].copy_from_slice(&rgb);
    }

    pub fn save_png(&self, path: &Path) -> Result<(), ImageError> {
        write_png(path, self.width, self.height, png::ColorType::Rgb, &self.pixels)
    }

    pub fn load_png(path: &Path) -> Result<Self, ImageError> {
        let (width, height, color, data) = read_png(path)?;
        let pixels = match color {
            png::ColorType::Rgb => data,
            png::ColorType::Rgba => data.chunks_exact(4).flat_map(|c| [c[0], c[1], c[2]]).collect(),
            png::ColorType::Grayscale => data.iter().flat_map(|&g| [g, g, g]).collect(),
            other => return Err(ImageError::Unsupported(format!("{other:?}"))),
        };
        Ok(Self { width, height, pixels })
    }
}

/// Row-major binary mask, one byte per pixel holding 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    pub width: usize,
    pub height: usize,
    pub bits: Vec<u8>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height, bits: vec![0; width * height] }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::new(width, height);
        for y in 0..height {
            for x in 0..width {
                m.bits[y * width + x] = f(x, y) as u8;
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x] != 0
    }

    /// Out-of-frame reads return `false`.
    #[inline]
    pub fn get_signed(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height && self.get(x as usize, y as usize)
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.bits[y * self.width + x] = v as u8;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b != 0).count()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    pub fn same_dims(&self, other: &Self) -> Result<(), ImageError> {
        if self.width == other.width && self.height == other.height {
            Ok(())
        } else {
            Err(ImageError::DimensionMismatch(self.width, self.height, other.width, other.height))
        }
    }

    pub fn save_png(&self, path: &Path) -> Result<(), ImageError> {
        let data: Vec<u8> = self.bits.iter().map(|&b| if b != 0 { 255 } else { 0 }).collect();
        write_png(path, self.width, self.height, png::ColorType::Grayscale, &data)
    }

    /// Loads a mask; any non-zero luma (or red, for colour files) is foreground.
    pub fn load_png(path: &Path) -> Result<Self, ImageError> {
        let (width, height, color, data) = read_png(path)?;
        let stride = match color {
            png::ColorType::Grayscale => 1,
            png::ColorType::GrayscaleAlpha => 2,
            png::ColorType::Rgb => 3,
            png::ColorType::Rgba => 4,
            other => return Err(ImageError::Unsupported(format!("{other:?}"))),
        };
        let bits = data.chunks_exact(stride).map(|c| (c[0] >= 128) as u8).collect();
        Ok(Self { width, height, bits })
    }
}

fn write_png(path: &Path, width: usize, height: usize, color: png::ColorType, data: &[u8]) -> Result<(), ImageError> {
    let w = BufWriter::new(File::create(path)?);
    let mut enc = png::Encoder::new(w, width as u32, height as u32);
    enc.set_color(color);
    enc.set_depth(png::BitDepth::Eight);
    enc.set_compression(png::Compression::Fast);
    let mut writer = enc.write_header()?;
    writer.write_image_data(data)?;
    writer.finish()?;
    Ok(())
}

fn read_png(path: &Path) -> Result<(usize, usize, png::ColorType, Vec<u8>), ImageError> {
    let mut dec = png::Decoder::new(BufReader::new(File::open(path)?));
    dec.set_transformations(png::Transformations::EXPAND | png::Transformations::STRIP_16);
    let mut reader = dec.read_info()?;
    let mut buf = vec![0; reader.output_buffer_size().ok_or_else(|| ImageError::Unsupported("image too large".into()))?];
    let info = reader.next_frame(&mut buf)?;
    buf.truncate(info.buffer_size());
    Ok((info.width as usize, info.height as usize, info.color_type, buf))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_png_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let m = BinaryMask::from_fn(37, 41, |x, y| (x * 7 + y * 3) % 5 == 0);
        let p = dir.path().join("m.png");
        m.save_png(&p).unwrap();
        assert_eq!(BinaryMask::load_png(&p).unwrap(), m);
    }

    #[test]
    fn image_png_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut img = RasterImage::filled(33, 32, [255, 255, 255]);
        img.set(3, 4, [200, 80, 80]);
        let p = dir.path().join("i.png");
        img.save_png(&p).unwrap();
        assert_eq!(RasterImage::load_png(&p).unwrap(), img);
    }

    #[test]
    fn out_of_frame_is_background() {
        let m = BinaryMask::from_fn(2, 2, |_, _| true);
        assert!(m.get_signed(1, 1));
        assert!(!m.get_signed(-1, 0));
        assert!(!m.get_signed(0, 2));
    }
}
