//! Synthetic inputs for the benchmarks.

use detbias_core::repeat::Homography;
use detbias_core::xform::gaussian_blur;
use detbias_core::{GrayImage, InterestRegion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random discs and rectangles on a gradient, lightly blurred.
pub fn scene(width: usize, height: usize, seed: u64) -> GrayImage {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut data: Vec<u8> = (0..width * height)
        .map(|i| (40 + (i % width) * 120 / width) as u8)
        .collect();
    for _ in 0..(width * height / 400).max(8) {
        let (cx, cy) = (r.random_range(0..width), r.random_range(0..height));
        let rad = r.random_range(3..20usize);
        let v: u8 = r.random();
        let disc = r.random_bool(0.5);
        for y in cy.saturating_sub(rad)..(cy + rad).min(height) {
            for x in cx.saturating_sub(rad)..(cx + rad).min(width) {
                let (dx, dy) = (x.abs_diff(cx), y.abs_diff(cy));
                if !disc || dx * dx + dy * dy <= rad * rad {
                    data[y * width + x] = v;
                }
            }
        }
    }
    let img = GrayImage::new(width, height, data).expect("nonempty");
    gaussian_blur(&img, 0.8).expect("valid sigma")
}

/// `n` random elliptical regions inside a `side` x `side` frame.
pub fn regions(n: usize, side: f64, seed: u64) -> Vec<InterestRegion> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let (s1, s2) = (r.random_range(3.0..15.0), r.random_range(3.0..15.0));
            let t: f64 = r.random_range(0.0..std::f64::consts::PI);
            let (c, s) = (t.cos(), t.sin());
            let (l1, l2) = (1.0 / (s1 * s1), 1.0 / (s2 * s2));
            InterestRegion {
                x: r.random_range(0.0..side),
                y: r.random_range(0.0..side),
                a: l1 * c * c + l2 * s * s,
                b: (l1 - l2) * c * s,
                c: l1 * s * s + l2 * c * c,
                strength: 0.0,
            }
        })
        .collect()
}

/// Copies of `regions` moved by up to `jitter` pixels.
pub fn perturbed(regions: &[InterestRegion], jitter: f64, seed: u64) -> Vec<InterestRegion> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    regions
        .iter()
        .map(|g| InterestRegion {
            x: g.x + r.random_range(-jitter..jitter),
            y: g.y + r.random_range(-jitter..jitter),
            ..*g
        })
        .collect()
}

/// A mild projective warp.
pub fn warp() -> Homography {
    Homography::new([[1.02, 0.03, 1.5], [-0.02, 0.98, -2.0], [1e-5, -2e-5, 1.0]])
        .expect("invertible")
}
