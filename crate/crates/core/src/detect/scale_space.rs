//! Harris-Laplace and Hessian-Laplace.
//!
//! Both detectors find spatial maxima of a scale-normalized response at every
//! level of a Gaussian scale space, then keep a point only where the
//! normalized Laplacian-of-Gaussian magnitude peaks across neighboring levels.

use serde::{Deserialize, Serialize};

use super::{parabolic_offset, InterestRegion};
use crate::imgcore::{GrayImage, Plane};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScaleSpaceParams {
    /// Scale of level 0.
    pub sigma0: f64,
    /// Ratio between consecutive levels.
    pub scale_factor: f64,
    pub levels: usize,
    /// Reported radius is `kappa * sigma`.
    pub kappa: f64,
    /// Derivation scale as a fraction of the integration scale (Harris only).
    pub derivation_ratio: f64,
    pub subpixel: bool,
}

impl Default for ScaleSpaceParams {
    fn default() -> Self {
        Self {
            sigma0: 1.6,
            scale_factor: 2f64.powf(1.0 / 3.0),
            levels: 13,
            kappa: 3.0,
            derivation_ratio: 0.7,
            subpixel: true,
        }
    }
}

impl ScaleSpaceParams {
    pub fn sigma(&self, level: usize) -> f64 {
        self.sigma0 * self.scale_factor.powi(level as i32)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HarrisLaplaceParams {
    pub k: f64,
    /// Minimum scale-normalized Harris response (image scaled to [0, 1]).
    pub threshold: f64,
    /// Minimum normalized Laplacian magnitude at the selected scale.
    pub laplacian_threshold: f64,
}

impl Default for HarrisLaplaceParams {
    fn default() -> Self {
        Self {
            k: 0.04,
            threshold: 1e-6,
            laplacian_threshold: 0.03,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HessianLaplaceParams {
    /// Minimum scale-normalized Hessian determinant (image scaled to [0, 1]).
    pub threshold: f64,
    pub laplacian_threshold: f64,
}

impl Default for HessianLaplaceParams {
    fn default() -> Self {
        Self {
            threshold: 1e-3,
            laplacian_threshold: 0.03,
        }
    }
}

/// Scale-normalized Harris cornerness `det(M) - k tr(M)^2` with the second
/// moment matrix `M` integrated at `sigma_i` over gradients taken at `sigma_d`.
pub fn harris_response(plane: &Plane, sigma_i: f64, sigma_d: f64, k: f64) -> Plane {
    let (gx, gy) = plane.blurred(sigma_d).gradients();
    let norm = sigma_d * sigma_d;
    let xx = gx.zip_map(&gx, |a, b| a * b * norm).blurred(sigma_i);
    let yy = gy.zip_map(&gy, |a, b| a * b * norm).blurred(sigma_i);
    let xy = gx.zip_map(&gy, |a, b| a * b * norm).blurred(sigma_i);
    let mut out = Plane::zeros(plane.width, plane.height);
    for i in 0..out.data.len() {
        let (a, b, c) = (xx.data[i], xy.data[i], yy.data[i]);
        let tr = a + c;
        out.data[i] = a * c - b * b - k * tr * tr;
    }
    out
}

struct Level {
    sigma: f64,
    response: Plane,
    laplacian: Plane,
}

fn normalized_laplacian(smoothed: &Plane, sigma: f64) -> Plane {
    let (lxx, lyy, _) = smoothed.hessian();
    let s2 = sigma * sigma;
    lxx.zip_map(&lyy, |a, b| (s2 * (a + b)).abs())
}

pub fn harris_laplace(
    img: &GrayImage,
    ss: &ScaleSpaceParams,
    p: &HarrisLaplaceParams,
) -> Vec<InterestRegion> {
    let plane = img.to_plane();
    let levels: Vec<Level> = (0..ss.levels)
        .map(|n| {
            let sigma = ss.sigma(n);
            Level {
                sigma,
                response: harris_response(&plane, sigma, ss.derivation_ratio * sigma, p.k),
                laplacian: normalized_laplacian(&plane.blurred(sigma), sigma),
            }
        })
        .collect();
    select(&levels, ss, p.threshold, p.laplacian_threshold)
}

pub fn hessian_laplace(
    img: &GrayImage,
    ss: &ScaleSpaceParams,
    p: &HessianLaplaceParams,
) -> Vec<InterestRegion> {
    let plane = img.to_plane();
    let levels: Vec<Level> = (0..ss.levels)
        .map(|n| {
            let sigma = ss.sigma(n);
            let smoothed = plane.blurred(sigma);
            let (lxx, lyy, lxy) = smoothed.hessian();
            let s2 = sigma * sigma;
            let mut det = Plane::zeros(plane.width, plane.height);
            let mut lap = Plane::zeros(plane.width, plane.height);
            for i in 0..det.data.len() {
                let (a, b, c) = (lxx.data[i] * s2, lxy.data[i] * s2, lyy.data[i] * s2);
                det.data[i] = a * c - b * b;
                lap.data[i] = (a + c).abs();
            }
            Level {
                sigma,
                response: det,
                laplacian: lap,
            }
        })
        .collect();
    select(&levels, ss, p.threshold, p.laplacian_threshold)
}

fn select(
    levels: &[Level],
    ss: &ScaleSpaceParams,
    threshold: f64,
    lap_threshold: f64,
) -> Vec<InterestRegion> {
    let mut out = Vec::new();
    let Some(first) = levels.first() else {
        return out;
    };
    let (w, h) = (first.response.width, first.response.height);
    if w < 3 || h < 3 {
        return out;
    }
    for (n, level) in levels.iter().enumerate() {
        let r = &level.response;
        for y in 1..h - 1 {
            for x in 1..w - 1 {
                let v = r.get(x, y);
                if v <= threshold || !is_spatial_max(r, x, y) {
                    continue;
                }
                let lap = level.laplacian.get(x, y);
                if lap < lap_threshold {
                    continue;
                }
                let below = n.checked_sub(1).map(|m| levels[m].laplacian.get(x, y));
                let above = levels.get(n + 1).map(|l| l.laplacian.get(x, y));
                if below.is_some_and(|b| b >= lap) || above.is_some_and(|a| a >= lap) {
                    continue;
                }

                let (mut cx, mut cy, mut sigma) = (x as f64, y as f64, level.sigma);
                if ss.subpixel {
                    cx += parabolic_offset(r.get(x - 1, y), v, r.get(x + 1, y));
                    cy += parabolic_offset(r.get(x, y - 1), v, r.get(x, y + 1));
                    if let (Some(b), Some(a)) = (below, above) {
                        let ds = parabolic_offset(b, lap, a);
                        sigma *= ss.scale_factor.powf(ds);
                    }
                }
                out.push(InterestRegion::circle(cx, cy, ss.kappa * sigma, v));
            }
        }
    }
    out
}

fn is_spatial_max(r: &Plane, x: usize, y: usize) -> bool {
    let v = r.get(x, y);
    for dy in 0..3 {
        for dx in 0..3 {
            if (dx, dy) != (1, 1) && r.get(x + dx - 1, y + dy - 1) >= v {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::canonical_order;

    fn square_image() -> GrayImage {
        // white square covering pixels 24..=55 on a 80x80 black frame
        GrayImage::from_fn(80, 80, |x, y| {
            if (24..56).contains(&x) && (24..56).contains(&y) {
                255
            } else {
                0
            }
        })
        .unwrap()
    }

    fn gaussian_blob(size: usize, sigma: f64) -> GrayImage {
        let c = (size as f64 - 1.0) / 2.0;
        GrayImage::from_fn(size, size, |x, y| {
            let d2 = (x as f64 - c).powi(2) + (y as f64 - c).powi(2);
            (20.0 + 220.0 * (-d2 / (2.0 * sigma * sigma)).exp()).round() as u8
        })
        .unwrap()
    }

    /// Local maxima of the finest-scale cornerness, strongest first.
    fn finest_scale_corners(img: &GrayImage, count: usize) -> Vec<(f64, f64)> {
        let ss = ScaleSpaceParams::default();
        let r = harris_response(
            &img.to_plane(),
            ss.sigma0,
            ss.derivation_ratio * ss.sigma0,
            0.04,
        );
        let mut peaks = Vec::new();
        for y in 1..img.height() - 1 {
            for x in 1..img.width() - 1 {
                if is_spatial_max(&r, x, y) {
                    peaks.push((r.get(x, y), x as f64, y as f64));
                }
            }
        }
        peaks.sort_by(|a, b| b.0.total_cmp(&a.0));
        peaks
            .into_iter()
            .take(count)
            .map(|(_, x, y)| (x, y))
            .collect()
    }

    fn nearest(regions: &[InterestRegion], x: f64, y: f64) -> f64 {
        regions
            .iter()
            .map(|r| ((r.x - x).powi(2) + (r.y - y).powi(2)).sqrt())
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn harris_laplace_fires_at_square_corners() {
        let img = square_image();
        let regions = harris_laplace(
            &img,
            &ScaleSpaceParams::default(),
            &HarrisLaplaceParams::default(),
        );
        // corner pixels of the square
        let corners = [(24.0, 24.0), (55.0, 24.0), (24.0, 55.0), (55.0, 55.0)];
        let oracle = finest_scale_corners(&img, 4);
        for &(cx, cy) in &corners {
            assert!(
                nearest(&regions, cx, cy) <= 1.5,
                "no region near corner ({cx}, {cy})"
            );
            assert!(
                oracle
                    .iter()
                    .any(|&(x, y)| ((x - cx).powi(2) + (y - cy).powi(2)).sqrt() <= 1.5),
                "oracle disagrees at ({cx}, {cy}): {oracle:?}"
            );
        }
    }

    #[test]
    fn hessian_laplace_selects_blob_scale() {
        let ss = ScaleSpaceParams::default();
        let img = gaussian_blob(64, 4.0);
        let mut regions = hessian_laplace(&img, &ss, &HessianLaplaceParams::default());
        regions.sort_by(canonical_order);
        let best = regions.first().expect("blob detected");
        assert!(
            (best.x - 31.5).abs() < 1.0 && (best.y - 31.5).abs() < 1.0,
            "{best:?}"
        );
        let sigma = best.equivalent_radius() / ss.kappa;
        let levels_away = (sigma / 4.0).ln().abs() / ss.scale_factor.ln();
        assert!(levels_away <= 1.0, "sigma {sigma}");

        // dense oracle: normalized Laplacian at the center over a fine scale grid
        let plane = img.to_plane();
        let (mut best_s, mut best_v) = (0.0, 0.0);
        for i in 0..200 {
            let s = 1.0 + 0.05 * i as f64;
            let lap = normalized_laplacian(&plane.blurred(s), s);
            let v = (lap.get(31, 31) + lap.get(32, 32)) / 2.0;
            if v > best_v {
                (best_s, best_v) = (s, v);
            }
        }
        assert!(
            (best_s / sigma).ln().abs() / ss.scale_factor.ln() <= 1.0,
            "oracle {best_s} vs {sigma}"
        );
    }

    #[test]
    fn characteristic_scale_doubles_with_upscaling() {
        let ss = ScaleSpaceParams::default();
        let p = HessianLaplaceParams::default();
        let small = gaussian_blob(48, 3.0);
        let big = GrayImage::from_fn(96, 96, |x, y| small.get(x / 2, y / 2)).unwrap();
        let mut a = hessian_laplace(&small, &ss, &p);
        let mut b = hessian_laplace(&big, &ss, &p);
        a.sort_by(canonical_order);
        b.sort_by(canonical_order);
        let ratio = b[0].equivalent_radius() / a[0].equivalent_radius();
        assert!(
            (ratio / 2.0).ln().abs() / ss.scale_factor.ln() <= 1.0,
            "ratio {ratio}"
        );
    }

    #[test]
    fn constant_image_yields_nothing() {
        let img = GrayImage::filled(40, 30, 128).unwrap();
        let ss = ScaleSpaceParams::default();
        assert!(harris_laplace(&img, &ss, &HarrisLaplaceParams::default()).is_empty());
        assert!(hessian_laplace(&img, &ss, &HessianLaplaceParams::default()).is_empty());
    }

    #[test]
    fn tiny_images_are_handled() {
        let img = GrayImage::new(2, 1, vec![0, 255]).unwrap();
        let ss = ScaleSpaceParams::default();
        assert!(harris_laplace(&img, &ss, &HarrisLaplaceParams::default()).is_empty());
    }
}
