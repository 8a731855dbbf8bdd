//! Image representation shared by every stage of the harness.

mod filter;
mod integral;
mod io;

pub use filter::{gaussian_kernel, reflect101, Plane};
pub use integral::IntegralImage;
pub use io::{load_image, luminance, save_image};

use crate::error::{Error, Result};

/// Row-major 8-bit luminance raster.
#[derive(Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Argument(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::Argument(format!(
                "expected {} samples for a {width}x{height} image, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    /// Applies `f` to every sample.
    pub fn map(&self, f: impl Fn(u8) -> u8) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Photometric negative, `v -> 255 - v`.
    pub fn inverted(&self) -> Self {
        self.map(|v| 255 - v)
    }

    /// Rotates by 90 degrees clockwise. Pixel `(x, y)` moves to `(height - 1 - y, x)`.
    pub fn rotated_cw(&self) -> Self {
        let (w, h) = (self.height, self.width);
        let mut data = vec![0u8; w * h];
        for y in 0..self.height {
            for x in 0..self.width {
                data[x * w + (self.height - 1 - y)] = self.get(x, y);
            }
        }
        Self {
            width: w,
            height: h,
            data,
        }
    }

    /// Luminance scaled to `[0, 1]` as a floating point plane.
    pub fn to_plane(&self) -> Plane {
        Plane::from_vec(
            self.width,
            self.height,
            self.data.iter().map(|&v| f64::from(v) / 255.0).collect(),
        )
    }
}

impl std::fmt::Debug for GrayImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GrayImage")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}
