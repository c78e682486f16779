//! Pixel rasters and file I/O: RGB images, binary masks, and 8-bit gray maps.
//!
//! Masks and gray maps are written as single-channel images; masks use only
//! the values {0, 255}. Loading accepts any raster format the `image` crate
//! can decode; lossless round-trips require a lossless format such as PNG.

use std::path::{Path, PathBuf};

use thiserror::Error;

/// Squared L2 span of the RGB cube, `3 * 255^2`.
const MAX_COLOR_DIST_SQ: f64 = 3.0 * 255.0 * 255.0;

/// Squared Euclidean distance between two RGB triples in raw 8-bit units.
///
/// Integer-exact; the tunnel color-budget test compares against this so the
/// threshold decision never depends on a square root.
pub fn color_distance_sq_raw(a: [u8; 3], b: [u8; 3]) -> u32 {
    let dr = i32::from(a[0]) - i32::from(b[0]);
    let dg = i32::from(a[1]) - i32::from(b[1]);
    let db = i32::from(a[2]) - i32::from(b[2]);
    (dr * dr + dg * dg + db * db) as u32
}

/// Euclidean RGB distance normalized to `[0, 1]`.
///
/// `1.0` is attained exactly between black and white; the value is `0` iff
/// the triples are equal. This is the edge weight accumulated by the
/// geodesic transforms.
pub fn color_distance(a: [u8; 3], b: [u8; 3]) -> f64 {
    (f64::from(color_distance_sq_raw(a, b)) / MAX_COLOR_DIST_SQ).sqrt()
}

/// 8-bit three-channel raster, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RgbImage {
    width: u32,
    height: u32,
    data: Vec<[u8; 3]>,
}

impl RgbImage {
    /// All-black image. Panics if either dimension is zero.
    pub fn new(width: u32, height: u32) -> Self {
        Self::filled(width, height, [0, 0, 0])
    }

    pub fn filled(width: u32, height: u32, color: [u8; 3]) -> Self {
        assert!(width >= 1 && height >= 1, "image dimensions must be >= 1");
        Self {
            width,
            height,
            data: vec![color; width as usize * height as usize],
        }
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> [u8; 3]) -> Self {
        let mut img = Self::new(width, height);
        for y in 0..height {
            for x in 0..width {
                img.set_pixel(x, y, f(x, y));
            }
        }
        img
    }

    /// Wraps a row-major pixel buffer. Panics if the length is not `width * height`.
    pub fn from_raw(width: u32, height: u32, data: Vec<[u8; 3]>) -> Self {
        assert!(width >= 1 && height >= 1, "image dimensions must be >= 1");
        assert_eq!(
            data.len(),
            width as usize * height as usize,
            "pixel buffer length must equal width * height"
        );
        Self { width, height, data }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        self.data[self.index(x, y)]
    }

    pub fn set_pixel(&mut self, x: u32, y: u32, color: [u8; 3]) {
        let i = self.index(x, y);
        self.data[i] = color;
    }

    /// Row-major pixel slice.
    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.data
    }

    /// Clockwise quarter turn; a `w x h` image becomes `h x w`.
    pub fn rotated90(&self) -> Self {
        let mut out = Self::new(self.height, self.width);
        for y in 0..self.height {
            for x in 0..self.width {
                out.set_pixel(self.height - 1 - y, x, self.pixel(x, y));
            }
        }
        out
    }

    fn index(&self, x: u32, y: u32) -> usize {
        debug_assert!(x < self.width && y < self.height);
        y as usize * self.width as usize + x as usize
    }
}

/// One boolean per pixel; `true` marks foreground.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: u32, height: u32) -> Self {
        assert!(width >= 1 && height >= 1, "mask dimensions must be >= 1");
        Self {
            width,
            height,
            bits: vec![false; width as usize * height as usize],
        }
    }

    pub fn filled(width: u32, height: u32, value: bool) -> Self {
        let mut mask = Self::new(width, height);
        mask.bits.fill(value);
        mask
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> bool) -> Self {
        let mut mask = Self::new(width, height);
        for y in 0..height {
            for x in 0..width {
                mask.set(x, y, f(x, y));
            }
        }
        mask
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        self.bits[y as usize * self.width as usize + x as usize] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_foreground(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }
}

/// One 8-bit value per pixel, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayMap {
    width: u32,
    height: u32,
    values: Vec<u8>,
}

impl GrayMap {
    pub fn new(width: u32, height: u32) -> Self {
        assert!(width >= 1 && height >= 1, "map dimensions must be >= 1");
        Self {
            width,
            height,
            values: vec![0; width as usize * height as usize],
        }
    }

    pub fn from_raw(width: u32, height: u32, values: Vec<u8>) -> Self {
        assert!(width >= 1 && height >= 1, "map dimensions must be >= 1");
        assert_eq!(
            values.len(),
            width as usize * height as usize,
            "value buffer length must equal width * height"
        );
        Self { width, height, values }
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> u8) -> Self {
        let mut map = Self::new(width, height);
        for y in 0..height {
            for x in 0..width {
                map.set(x, y, f(x, y));
            }
        }
        map
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.values[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, value: u8) {
        self.values[y as usize * self.width as usize + x as usize] = value;
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    /// Clockwise quarter turn, matching [`RgbImage::rotated90`].
    pub fn rotated90(&self) -> Self {
        let mut out = Self::new(self.height, self.width);
        for y in 0..self.height {
            for x in 0..self.width {
                out.set(self.height - 1 - y, x, self.get(x, y));
            }
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot decode {path}: {source}")]
    Decode {
        path: PathBuf,
        source: image::ImageError,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: image::ImageError,
    },
    #[error("mask is {mask_width}x{mask_height} but image is {image_width}x{image_height}")]
    DimensionMismatch {
        image_width: u32,
        image_height: u32,
        mask_width: u32,
        mask_height: u32,
    },
}

fn open(path: &Path) -> Result<image::DynamicImage, RasterError> {
    image::open(path).map_err(|err| match err {
        image::ImageError::IoError(source) => RasterError::Read {
            path: path.to_owned(),
            source,
        },
        source => RasterError::Decode {
            path: path.to_owned(),
            source,
        },
    })
}

/// Loads any supported raster as 8-bit RGB.
pub fn load_image(path: impl AsRef<Path>) -> Result<RgbImage, RasterError> {
    let path = path.as_ref();
    let rgb = open(path)?.to_rgb8();
    let (width, height) = rgb.dimensions();
    let data = rgb.pixels().map(|p| p.0).collect();
    Ok(RgbImage::from_raw(width, height, data))
}

/// Loads a mask image; any luma value above 127 counts as foreground.
pub fn load_mask(path: impl AsRef<Path>) -> Result<BinaryMask, RasterError> {
    let path = path.as_ref();
    let gray = open(path)?.to_luma8();
    let (width, height) = gray.dimensions();
    let mut mask = BinaryMask::new(width, height);
    for (i, p) in gray.pixels().enumerate() {
        mask.bits[i] = p.0[0] > 127;
    }
    Ok(mask)
}

/// Loads a single-channel map (color inputs are converted to luma).
pub fn load_gray(path: impl AsRef<Path>) -> Result<GrayMap, RasterError> {
    let path = path.as_ref();
    let gray = open(path)?.to_luma8();
    let (width, height) = gray.dimensions();
    Ok(GrayMap::from_raw(width, height, gray.into_raw()))
}

fn write_buffer<P, C>(buffer: &image::ImageBuffer<P, C>, path: &Path) -> Result<(), RasterError>
where
    P: image::Pixel + image::PixelWithColorType,
    C: std::ops::Deref<Target = [P::Subpixel]>,
    [P::Subpixel]: image::EncodableLayout,
{
    buffer.save(path).map_err(|source| RasterError::Write {
        path: path.to_owned(),
        source,
    })
}

pub fn save_image(img: &RgbImage, path: impl AsRef<Path>) -> Result<(), RasterError> {
    let mut buffer = image::RgbImage::new(img.width(), img.height());
    for (i, p) in buffer.pixels_mut().enumerate() {
        p.0 = img.pixels()[i];
    }
    write_buffer(&buffer, path.as_ref())
}

pub fn save_gray(map: &GrayMap, path: impl AsRef<Path>) -> Result<(), RasterError> {
    let buffer = image::GrayImage::from_raw(map.width(), map.height(), map.values().to_vec())
        .expect("buffer length matches dimensions");
    write_buffer(&buffer, path.as_ref())
}

/// Writes a mask as a single-channel image with values {0, 255}.
pub fn save_mask(mask: &BinaryMask, path: impl AsRef<Path>) -> Result<(), RasterError> {
    let values: Vec<u8> = mask.bits().iter().map(|&b| if b { 255 } else { 0 }).collect();
    let buffer = image::GrayImage::from_raw(mask.width(), mask.height(), values)
        .expect("buffer length matches dimensions");
    write_buffer(&buffer, path.as_ref())
}

/// Writes the image with alpha 255 inside the mask and 0 outside.
pub fn save_rgba(
    img: &RgbImage,
    mask: &BinaryMask,
    path: impl AsRef<Path>,
) -> Result<(), RasterError> {
    if img.width() != mask.width() || img.height() != mask.height() {
        return Err(RasterError::DimensionMismatch {
            image_width: img.width(),
            image_height: img.height(),
            mask_width: mask.width(),
            mask_height: mask.height(),
        });
    }
    let mut buffer = image::RgbaImage::new(img.width(), img.height());
    for (i, p) in buffer.pixels_mut().enumerate() {
        let [r, g, b] = img.pixels()[i];
        let a = if mask.bits()[i] { 255 } else { 0 };
        p.0 = [r, g, b, a];
    }
    write_buffer(&buffer, path.as_ref())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn color_distance_identity_is_zero() {
        assert_eq!(color_distance([0, 0, 0], [0, 0, 0]), 0.0);
        assert_eq!(color_distance([73, 12, 240], [73, 12, 240]), 0.0);
    }

    #[test]
    fn color_distance_black_white_is_exactly_one() {
        assert_eq!(color_distance([255, 255, 255], [0, 0, 0]), 1.0);
        assert_eq!(color_distance([0, 0, 0], [255, 255, 255]), 1.0);
    }

    #[test]
    fn color_distance_single_channel_step() {
        // 24 along one channel: 24 / (255 * sqrt(3)).
        let expected = 24.0 / (255.0 * 3f64.sqrt());
        let got = color_distance([100, 100, 100], [124, 100, 100]);
        assert!((got - expected).abs() < 1e-12, "got {got}, expected {expected}");
    }

    #[test]
    fn rotated90_maps_corners() {
        // 2x3 image: pixel (x, y) -> (h - 1 - y, x) in the 3x2 result.
        let img = RgbImage::from_fn(2, 3, |x, y| [x as u8, y as u8, 0]);
        let rot = img.rotated90();
        assert_eq!(rot.width(), 3);
        assert_eq!(rot.height(), 2);
        for y in 0..3 {
            for x in 0..2 {
                assert_eq!(rot.pixel(2 - y, x), img.pixel(x, y));
            }
        }
    }

    proptest! {
        #[test]
        fn color_distance_is_a_bounded_metric(
            a in prop::array::uniform3(any::<u8>()),
            b in prop::array::uniform3(any::<u8>()),
            c in prop::array::uniform3(any::<u8>()),
        ) {
            let dab = color_distance(a, b);
            let dba = color_distance(b, a);
            prop_assert_eq!(dab.to_bits(), dba.to_bits());
            prop_assert!(dab >= 0.0 && dab <= 1.0);
            prop_assert_eq!(dab == 0.0, a == b);
            // triangle inequality
            prop_assert!(dab <= color_distance(a, c) + color_distance(c, b) + 1e-12);
        }
    }
}
