use crate::error::{Error, Result};
use crate::imgcore::{gaussian_kernel, reflect101, GrayImage};

/// Light factors are quantized to this many steps per unit before scaling, so
/// that `round(s * v)` is evaluated in exact integer arithmetic.
pub const LIGHT_FACTOR_SCALE: u64 = 1_000_000;

/// Separable Gaussian blur in double precision with a single final
/// half-up rounding. `sigma = 0` returns the input unchanged.
pub fn gaussian_blur(img: &GrayImage, sigma: f64) -> Result<GrayImage> {
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::Argument(format!(
            "blur sigma must be >= 0, got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(img.clone());
    }
    let kernel = gaussian_kernel(sigma);
    let r = (kernel.len() / 2) as isize;
    let (w, h) = (img.width(), img.height());
    let src = img.data();

    let mut tmp = vec![0.0f64; w * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for x in 0..w {
            tmp[y * w + x] = kernel
                .iter()
                .enumerate()
                .map(|(i, k)| k * f64::from(row[reflect101(x as isize + i as isize - r, w)]))
                .sum();
        }
    }

    let mut acc = vec![0.0f64; w * h];
    for y in 0..h {
        let dst = &mut acc[y * w..(y + 1) * w];
        for (i, &k) in kernel.iter().enumerate() {
            let sy = reflect101(y as isize + i as isize - r, h);
            for (d, s) in dst.iter_mut().zip(&tmp[sy * w..(sy + 1) * w]) {
                *d += k * s;
            }
        }
    }

    let data = acc
        .into_iter()
        .map(|v| (v + 0.5).floor().clamp(0.0, 255.0) as u8)
        .collect();
    GrayImage::new(w, h, data)
}

/// Scales every sample by `s` in `(0, 1]`, rounding half-up.
pub fn reduce_light(img: &GrayImage, s: f64) -> Result<GrayImage> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::Argument(format!(
            "light factor must lie in (0, 1], got {s}"
        )));
    }
    let q = (s * LIGHT_FACTOR_SCALE as f64).round() as u64;
    let half = LIGHT_FACTOR_SCALE / 2;
    Ok(img.map(|v| ((q * u64::from(v) + half) / LIGHT_FACTOR_SCALE).min(255) as u8))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_image(w: usize, h: usize, seed: u64) -> GrayImage {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        GrayImage::from_fn(w, h, |_, _| rng.random()).unwrap()
    }

    /// Direct 2-D convolution with the outer-product kernel, no separability.
    fn dense_blur_oracle(img: &GrayImage, sigma: f64) -> GrayImage {
        let k = gaussian_kernel(sigma);
        let r = (k.len() / 2) as isize;
        let (w, h) = (img.width(), img.height());
        GrayImage::from_fn(w, h, |x, y| {
            let mut acc = 0.0;
            for dy in -r..=r {
                for dx in -r..=r {
                    let sx = reflect101(x as isize + dx, w);
                    let sy = reflect101(y as isize + dy, h);
                    acc += k[(dx + r) as usize] * k[(dy + r) as usize] * f64::from(img.get(sx, sy));
                }
            }
            (acc + 0.5).floor().clamp(0.0, 255.0) as u8
        })
        .unwrap()
    }

    #[test]
    fn zero_sigma_is_identity() {
        let img = random_image(13, 9, 1);
        assert_eq!(gaussian_blur(&img, 0.0).unwrap(), img);
    }

    #[test]
    fn negative_sigma_rejected() {
        let img = random_image(4, 4, 1);
        assert!(matches!(gaussian_blur(&img, -0.5), Err(Error::Argument(_))));
        assert!(matches!(
            gaussian_blur(&img, f64::NAN),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn constant_image_is_fixed_point() {
        let img = GrayImage::filled(17, 11, 77).unwrap();
        for s in [0.5, 1.0, 2.0, 4.5, 9.0] {
            assert_eq!(gaussian_blur(&img, s).unwrap(), img);
        }
    }

    #[test]
    fn separable_matches_dense_convolution() {
        let img = random_image(64, 64, 7);
        let fast = gaussian_blur(&img, 2.0).unwrap();
        let slow = dense_blur_oracle(&img, 2.0);
        for (a, b) in fast.data().iter().zip(slow.data()) {
            assert!((i16::from(*a) - i16::from(*b)).abs() <= 1);
        }
    }

    #[test]
    fn light_reduction_examples() {
        let img = GrayImage::new(3, 1, vec![200, 255, 1]).unwrap();
        assert_eq!(reduce_light(&img, 1.0).unwrap(), img);
        assert_eq!(reduce_light(&img, 0.5).unwrap().data(), &[100, 128, 1]);
        // 255 * 0.9 = 229.5 rounds up
        assert_eq!(reduce_light(&img, 0.9).unwrap().data()[1], 230);
    }

    #[test]
    fn light_factor_out_of_range() {
        let img = random_image(2, 2, 3);
        for s in [0.0, -0.1, 1.01, f64::NAN] {
            assert!(matches!(reduce_light(&img, s), Err(Error::Argument(_))));
        }
    }

    proptest! {
        #[test]
        fn blur_preserves_dimensions(w in 1usize..24, h in 1usize..24, sigma in 0.0f64..5.0, seed in any::<u64>()) {
            let img = random_image(w, h, seed);
            let out = gaussian_blur(&img, sigma).unwrap();
            prop_assert_eq!((out.width(), out.height()), (w, h));
        }

        #[test]
        fn light_reduction_is_monotone(s1 in 0.01f64..=1.0, s2 in 0.01f64..=1.0, seed in any::<u64>()) {
            let (lo, hi) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
            let img = random_image(16, 16, seed);
            let a = reduce_light(&img, lo).unwrap();
            let b = reduce_light(&img, hi).unwrap();
            for ((&o, &x), &y) in img.data().iter().zip(a.data()).zip(b.data()) {
                prop_assert!(x <= y);
                prop_assert!(y <= o);
            }
        }
    }
}
