//! Box-filter approximation of the Hessian determinant on the integral image.
//!
//! Filter sizes follow the usual octave layout: octave `o` (0-based) has
//! layers of size `3 (2^(o+1) (i+1) + 1)` for `i = 0..intervals`, sampled every
//! `2^o` pixels.

use serde::{Deserialize, Serialize};

use super::{parabolic_offset, InterestRegion};
use crate::imgcore::{GrayImage, IntegralImage};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FastHessianParams {
    pub octaves: usize,
    pub intervals: usize,
    /// Minimum response, with the image scaled to [0, 1].
    pub threshold: f64,
    pub subpixel: bool,
}

impl Default for FastHessianParams {
    fn default() -> Self {
        Self {
            octaves: 4,
            intervals: 4,
            threshold: 4e-4,
            subpixel: true,
        }
    }
}

/// Relative weight of the mixed derivative, compensating the box approximation.
const DXY_WEIGHT: f64 = 0.81;

pub fn filter_size(octave: usize, interval: usize) -> usize {
    3 * ((1 << (octave + 1)) * (interval + 1) + 1)
}

/// Integer lobe sums `(Dxx, Dyy, Dxy)` of the box filters of `size` centered
/// at `(x, y)`. Boxes are clipped to the image.
pub fn box_hessian(ii: &IntegralImage, x: i64, y: i64, size: usize) -> (i64, i64, i64) {
    let l = (size / 3) as i64;
    let b = ((size - 1) / 2) as i64;
    let w = size as i64;
    // box with top-left (x0, y0) and extent (cols, rows)
    let bx = |x0: i64, y0: i64, cols: i64, rows: i64| {
        ii.box_sum_clipped(x0, y0, x0 + cols, y0 + rows) as i64
    };

    let dxx = bx(x - b, y - l + 1, w, 2 * l - 1) - 3 * bx(x - l / 2, y - l + 1, l, 2 * l - 1);
    let dyy = bx(x - l + 1, y - b, 2 * l - 1, w) - 3 * bx(x - l + 1, y - l / 2, 2 * l - 1, l);
    let dxy = bx(x + 1, y - l, l, l) + bx(x - l, y + 1, l, l)
        - bx(x - l, y - l, l, l)
        - bx(x + 1, y + 1, l, l);
    (dxx, dyy, dxy)
}

/// Determinant response from integer lobe sums, normalized by filter area and
/// the 8-bit range.
pub fn hessian_response(lobes: (i64, i64, i64), size: usize) -> f64 {
    let norm = (size * size) as f64 * 255.0;
    let dxx = lobes.0 as f64 / norm;
    let dyy = lobes.1 as f64 / norm;
    let dxy = lobes.2 as f64 / norm;
    dxx * dyy - DXY_WEIGHT * dxy * dxy
}

/// One layer of responses on a subsampled grid.
#[derive(Clone, Debug)]
pub struct FastHessianLayer {
    pub size: usize,
    pub step: usize,
    pub width: usize,
    pub height: usize,
    pub responses: Vec<f64>,
}

impl FastHessianLayer {
    pub fn build(ii: &IntegralImage, size: usize, step: usize) -> Self {
        let width = ii.width().div_ceil(step);
        let height = ii.height().div_ceil(step);
        let mut responses = Vec::with_capacity(width * height);
        for gy in 0..height {
            for gx in 0..width {
                let lobes = box_hessian(ii, (gx * step) as i64, (gy * step) as i64, size);
                responses.push(hessian_response(lobes, size));
            }
        }
        Self {
            size,
            step,
            width,
            height,
            responses,
        }
    }

    #[inline]
    pub fn at(&self, gx: usize, gy: usize) -> f64 {
        self.responses[gy * self.width + gx]
    }
}

pub fn fast_hessian(img: &GrayImage, p: &FastHessianParams, kappa: f64) -> Vec<InterestRegion> {
    let ii = IntegralImage::new(img);
    let mut out = Vec::new();
    for octave in 0..p.octaves {
        let step = 1 << octave;
        let layers: Vec<FastHessianLayer> = (0..p.intervals)
            .map(|i| FastHessianLayer::build(&ii, filter_size(octave, i), step))
            .collect();
        for i in 1..p.intervals.saturating_sub(1) {
            scan_layer(
                &layers[i - 1],
                &layers[i],
                &layers[i + 1],
                p,
                kappa,
                &mut out,
            );
        }
    }
    out
}

fn scan_layer(
    below: &FastHessianLayer,
    mid: &FastHessianLayer,
    above: &FastHessianLayer,
    p: &FastHessianParams,
    kappa: f64,
    out: &mut Vec<InterestRegion>,
) {
    let border = (above.size + 1) / (2 * above.step);
    let (w, h) = (mid.width, mid.height);
    if w <= 2 * border + 1 || h <= 2 * border + 1 {
        return;
    }
    for gy in border + 1..h - border - 1 {
        for gx in border + 1..w - border - 1 {
            let v = mid.at(gx, gy);
            if v <= p.threshold {
                continue;
            }
            let mut is_max = true;
            'nbhd: for layer in [below, mid, above] {
                for dy in 0..3 {
                    for dx in 0..3 {
                        let same = std::ptr::eq(layer, mid) && (dx, dy) == (1, 1);
                        if !same && layer.at(gx + dx - 1, gy + dy - 1) >= v {
                            is_max = false;
                            break 'nbhd;
                        }
                    }
                }
            }
            if !is_max {
                continue;
            }
            let (mut fx, mut fy, mut size) = (gx as f64, gy as f64, mid.size as f64);
            if p.subpixel {
                fx += parabolic_offset(mid.at(gx - 1, gy), v, mid.at(gx + 1, gy));
                fy += parabolic_offset(mid.at(gx, gy - 1), v, mid.at(gx, gy + 1));
                let ds = parabolic_offset(below.at(gx, gy), v, above.at(gx, gy));
                size += ds * (above.size - mid.size) as f64;
            }
            let step = mid.step as f64;
            let sigma = 1.2 * size / 9.0;
            out.push(InterestRegion::circle(
                fx * step,
                fy * step,
                kappa * sigma,
                v,
            ));
        }
    }
}
