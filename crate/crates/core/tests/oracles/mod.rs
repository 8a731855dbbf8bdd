//! Slow, direct reference implementations used to check the fast paths.
//! Shared by the core integration tests and the acceptance suite.

#![allow(dead_code)]

use std::collections::BTreeSet;

use detbias_core::detect::{MserParams, Polarity};
use detbias_core::repeat::Homography;
use detbias_core::{GrayImage, InterestRegion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_image(w: usize, h: usize, seed: u64) -> GrayImage {
    let mut r = rng(seed);
    GrayImage::from_fn(w, h, |_, _| r.random()).unwrap()
}

/// Piecewise-constant blobs over a noisy background, so that level sets have
/// a handful of sizeable components.
pub fn blob_image(w: usize, h: usize, seed: u64) -> GrayImage {
    let mut r = rng(seed);
    let blobs: Vec<(f64, f64, f64, f64, u8)> = (0..r.random_range(3..8))
        .map(|_| {
            (
                r.random_range(0.0..w as f64),
                r.random_range(0.0..h as f64),
                r.random_range(3.0..12.0),
                r.random_range(3.0..12.0),
                r.random(),
            )
        })
        .collect();
    let base: u8 = r.random_range(60..200);
    GrayImage::from_fn(w, h, |x, y| {
        let mut v = base;
        for &(cx, cy, rx, ry, level) in &blobs {
            let (dx, dy) = ((x as f64 - cx) / rx, (y as f64 - cy) / ry);
            if dx * dx + dy * dy <= 1.0 {
                v = level;
            }
        }
        v.saturating_add(r.random_range(0..4))
    })
    .unwrap()
}

// ---------------------------------------------------------------- blur

fn reflect(mut i: isize, n: usize) -> usize {
    let n = n as isize;
    if n == 1 {
        return 0;
    }
    loop {
        if i < 0 {
            i = -i;
        } else if i >= n {
            i = 2 * (n - 1) - i;
        } else {
            return i as usize;
        }
    }
}

/// Full 2-D convolution with the outer product of the sampled Gaussian.
pub fn dense_blur(img: &GrayImage, sigma: f64) -> GrayImage {
    if sigma == 0.0 {
        return img.clone();
    }
    let r = (3.0 * sigma).ceil() as isize;
    let g: Vec<f64> = (-r..=r)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let norm: f64 = g.iter().sum::<f64>().powi(2);
    let (w, h) = (img.width(), img.height());
    GrayImage::from_fn(w, h, |x, y| {
        let mut acc = 0.0;
        for dy in -r..=r {
            for dx in -r..=r {
                let sx = reflect(x as isize + dx, w);
                let sy = reflect(y as isize + dy, h);
                acc += g[(dx + r) as usize] * g[(dy + r) as usize] * f64::from(img.get(sx, sy));
            }
        }
        (acc / norm + 0.5).floor().clamp(0.0, 255.0) as u8
    })
    .unwrap()
}

// ---------------------------------------------------------------- overlap

fn inside(r: &InterestRegion, u: f64, v: f64) -> bool {
    let (dx, dy) = (u - r.x, v - r.y);
    r.a * dx * dx + 2.0 * r.b * dx * dy + r.c * dy * dy <= 1.0
}

fn half_extent(r: &InterestRegion) -> (f64, f64) {
    let det = r.a * r.c - r.b * r.b;
    ((r.c / det).sqrt(), (r.a / det).sqrt())
}

/// `1 - IoU` by uniform sampling of the union's bounding box. `h` must be
/// affine: the first region is pulled back through it point by point.
pub fn monte_carlo_overlap_error(
    r1: &InterestRegion,
    r2: &InterestRegion,
    h: &Homography,
    samples: usize,
    seed: u64,
) -> f64 {
    let inv = h.inverse();
    // bounding box of the mapped first ellipse from its boundary
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    let det = r1.a * r1.c - r1.b * r1.b;
    // boundary parametrization x = center + L^-T (cos, sin) with M = L L^T
    let l11 = r1.a.sqrt();
    let l21 = r1.b / l11;
    let l22 = (det / r1.a).sqrt();
    for i in 0..720 {
        let t = i as f64 * std::f64::consts::PI / 360.0;
        let (c, s) = (t.cos(), t.sin());
        // solve L^T p = (c, s)
        let py = s / l22;
        let px = (c - l21 * py) / l11;
        let (u, v) = h.apply(r1.x + px, r1.y + py);
        x0 = x0.min(u);
        x1 = x1.max(u);
        y0 = y0.min(v);
        y1 = y1.max(v);
    }
    let (gx, gy) = half_extent(r2);
    let pad = 1e-3 * (x1 - x0 + y1 - y0);
    let (x0, x1) = (x0.min(r2.x - gx) - pad, x1.max(r2.x + gx) + pad);
    let (y0, y1) = (y0.min(r2.y - gy) - pad, y1.max(r2.y + gy) + pad);

    let mut r = rng(seed);
    let (mut both, mut either) = (0usize, 0usize);
    for _ in 0..samples {
        let u = r.random_range(x0..x1);
        let v = r.random_range(y0..y1);
        let (pu, pv) = inv.apply(u, v);
        let a = inside(r1, pu, pv);
        let b = inside(r2, u, v);
        both += usize::from(a && b);
        either += usize::from(a || b);
    }
    1.0 - both as f64 / either as f64
}

// ---------------------------------------------------------------- matching

/// Maximum matching size by exhaustive search over assignments.
pub fn brute_force_matching(adj: &[Vec<usize>], n_right: usize) -> usize {
    fn go(i: usize, adj: &[Vec<usize>], used: &mut Vec<bool>, size: usize, best: &mut usize) {
        if size + (adj.len() - i) <= *best {
            return;
        }
        if i == adj.len() {
            *best = size;
            return;
        }
        for &j in &adj[i] {
            if !used[j] {
                used[j] = true;
                go(i + 1, adj, used, size + 1, best);
                used[j] = false;
            }
        }
        go(i + 1, adj, used, size, best);
    }
    let mut best = 0;
    go(0, adj, &mut vec![false; n_right], 0, &mut best);
    best
}

// ---------------------------------------------------------------- mser

/// 4-connected components of `{v <= t}`; `label[p] = component id` or
/// `usize::MAX` outside the set.
fn components(values: &[u8], w: usize, h: usize, t: u8) -> (Vec<usize>, Vec<Vec<u32>>) {
    let mut label = vec![usize::MAX; values.len()];
    let mut comps = Vec::new();
    for start in 0..values.len() {
        if values[start] > t || label[start] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut pixels = vec![start as u32];
        label[start] = id;
        let mut k = 0;
        while k < pixels.len() {
            let p = pixels[k] as usize;
            k += 1;
            let (x, y) = (p % w, p / w);
            let mut nb = Vec::with_capacity(4);
            if x > 0 {
                nb.push(p - 1);
            }
            if x + 1 < w {
                nb.push(p + 1);
            }
            if y > 0 {
                nb.push(p - w);
            }
            if y + 1 < h {
                nb.push(p + w);
            }
            for q in nb {
                if values[q] <= t && label[q] == usize::MAX {
                    label[q] = id;
                    pixels.push(q as u32);
                }
            }
        }
        pixels.sort_unstable();
        comps.push(pixels);
    }
    (label, comps)
}

/// MSER by labeling every threshold separately. Returns
/// `(polarity, level, sorted pixels)` in the same order as the detector.
pub fn mser_sweep(img: &GrayImage, params: &MserParams) -> Vec<(Polarity, u8, Vec<u32>)> {
    let (w, h) = (img.width(), img.height());
    let max_area = params.max_area(w, h);
    let mut out = Vec::new();
    for polarity in [Polarity::Dark, Polarity::Bright] {
        let values: Vec<u8> = match polarity {
            Polarity::Dark => img.data().to_vec(),
            Polarity::Bright => img.data().iter().map(|&v| 255 - v).collect(),
        };
        let levels: Vec<(Vec<usize>, Vec<Vec<u32>>)> =
            (0..=255u8).map(|t| components(&values, w, h, t)).collect();
        let size_at = |t: u8, p: u32| -> usize {
            let (label, comps) = &levels[t as usize];
            comps[label[p as usize]].len()
        };
        let variation = |t: u8, p: u32| -> f64 {
            let own = size_at(t, p) as f64;
            let grown = size_at(t.saturating_add(params.delta), p) as f64;
            (grown - own) / own
        };
        for t in 0..=255u8 {
            let (_, comps) = &levels[t as usize];
            for comp in comps {
                let p0 = comp[0];
                // only the threshold where this exact set first appears
                if t > 0 {
                    let (label, prev) = &levels[t as usize - 1];
                    if label[p0 as usize] != usize::MAX && prev[label[p0 as usize]] == *comp {
                        continue;
                    }
                }
                if comp.len() < params.min_area || comp.len() > max_area {
                    continue;
                }
                let var = variation(t, p0);
                let mut child_var = f64::INFINITY;
                if t > 0 {
                    let (label, prev) = &levels[t as usize - 1];
                    let ids: BTreeSet<usize> = comp
                        .iter()
                        .map(|&p| label[p as usize])
                        .filter(|&l| l != usize::MAX)
                        .collect();
                    let largest = ids
                        .iter()
                        .map(|&l| &prev[l])
                        .max_by(|a, b| a.len().cmp(&b.len()).then(b[0].cmp(&a[0])));
                    if let Some(c) = largest {
                        child_var = variation(t - 1, c[0]);
                    }
                }
                if var >= child_var {
                    continue;
                }
                if t < 255 && size_at(t + 1, p0) != comp.len() && var > variation(t + 1, p0) {
                    continue;
                }
                out.push((polarity, t, comp.clone()));
            }
        }
    }
    out.sort_by(|a, b| (a.0, a.1, a.2[0]).cmp(&(b.0, b.1, b.2[0])));
    out
}

// ---------------------------------------------------------------- ranking

/// Indices sorted by descending value, ties by ascending index, using a
/// plain comparison sort on the pairs.
pub fn full_order(values: &[(u32, f64)]) -> Vec<u32> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    v.into_iter().map(|e| e.0).collect()
}

/// A correspondence instance: random oriented ellipses, and test regions that
/// are mostly jittered copies of reference regions so candidate sets overlap.
pub fn matching_instance(
    r: &mut ChaCha8Rng,
    max_side: usize,
) -> (Vec<InterestRegion>, Vec<InterestRegion>) {
    let ellipse = |r: &mut ChaCha8Rng, x: f64, y: f64, s1: f64| {
        let s2 = s1 * r.random_range(0.7..1.0);
        let t: f64 = r.random_range(0.0..std::f64::consts::PI);
        let (c, s) = (t.cos(), t.sin());
        let (l1, l2) = (1.0 / (s1 * s1), 1.0 / (s2 * s2));
        InterestRegion {
            x,
            y,
            a: l1 * c * c + l2 * s * s,
            b: (l1 - l2) * c * s,
            c: l1 * s * s + l2 * c * c,
            strength: 0.0,
        }
    };
    let n1 = r.random_range(1..=max_side);
    let n2 = r.random_range(1..=max_side);
    let reference: Vec<InterestRegion> = (0..n1)
        .map(|_| {
            let (x, y, s) = (
                r.random_range(12.0..20.0),
                r.random_range(12.0..20.0),
                r.random_range(4.0..6.0),
            );
            ellipse(r, x, y, s)
        })
        .collect();
    let test = (0..n2)
        .map(|_| {
            if r.random_bool(0.8) {
                let base = reference[r.random_range(0..n1)];
                let s = base.equivalent_radius() * r.random_range(0.85..1.15);
                let (x, y) = (
                    base.x + r.random_range(-1.5..1.5),
                    base.y + r.random_range(-1.5..1.5),
                );
                ellipse(r, x, y, s)
            } else {
                let (x, y, s) = (
                    r.random_range(10.0..22.0),
                    r.random_range(10.0..22.0),
                    r.random_range(4.0..6.0),
                );
                ellipse(r, x, y, s)
            }
        })
        .collect();
    (reference, test)
}

/// Two ellipses whose centers are at most about one radius apart, so most
/// pairs partially overlap. Every other pair starts with a circle.
pub fn overlap_pair(r: &mut ChaCha8Rng, case: usize) -> (InterestRegion, InterestRegion) {
    let (reference, _) = matching_instance(r, 1);
    let mut a = reference[0];
    if case.is_multiple_of(2) {
        a = InterestRegion::circle(a.x, a.y, a.equivalent_radius(), 0.0);
    }
    let radius = a.equivalent_radius();
    let (_, others) = matching_instance(r, 1);
    let mut b = others[0];
    let s = radius * r.random_range(0.6..1.6) / b.equivalent_radius();
    b.a /= s * s;
    b.b /= s * s;
    b.c /= s * s;
    b.x = a.x + r.random_range(-1.2..1.2) * radius;
    b.y = a.y + r.random_range(-1.2..1.2) * radius;
    (a, b)
}
