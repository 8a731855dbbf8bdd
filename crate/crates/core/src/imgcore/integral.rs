use super::GrayImage;

/// Summed-area table with a zero first row and column.
///
/// Entry `(x, y)` holds the sum of all samples at `(u, v)` with `u < x` and `v < y`.
#[derive(Clone, Debug)]
pub struct IntegralImage {
    width: usize,
    height: usize,
    table: Vec<u64>,
}

impl IntegralImage {
    pub fn new(img: &GrayImage) -> Self {
        let (w, h) = (img.width(), img.height());
        let stride = w + 1;
        let mut table = vec![0u64; stride * (h + 1)];
        for y in 0..h {
            let mut row_sum = 0u64;
            for x in 0..w {
                row_sum += u64::from(img.get(x, y));
                table[(y + 1) * stride + x + 1] = table[y * stride + x + 1] + row_sum;
            }
        }
        Self {
            width: w,
            height: h,
            table,
        }
    }

    /// Width of the source image (the table is one wider).
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> u64 {
        self.table[y * (self.width + 1) + x]
    }

    /// Sum over the half-open box `[x0, x1) x [y0, y1)`. Empty boxes sum to zero.
    #[inline]
    pub fn box_sum(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> u64 {
        if x1 <= x0 || y1 <= y0 {
            return 0;
        }
        self.at(x1, y1) + self.at(x0, y0) - self.at(x1, y0) - self.at(x0, y1)
    }

    /// Box sum with signed corners clipped to the image. Used by box filters
    /// whose lobes may extend past the border.
    #[inline]
    pub fn box_sum_clipped(&self, x0: i64, y0: i64, x1: i64, y1: i64) -> u64 {
        let cx = |v: i64| v.clamp(0, self.width as i64) as usize;
        let cy = |v: i64| v.clamp(0, self.height as i64) as usize;
        self.box_sum(cx(x0), cy(y0), cx(x1), cy(y1))
    }
}
