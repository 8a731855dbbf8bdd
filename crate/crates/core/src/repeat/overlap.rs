//! Overlap error between elliptical regions.

use super::Homography;
use crate::detect::InterestRegion;

/// Ellipse `(p - center)' M (p - center) <= 1` with `M = [[a, b], [b, c]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ellipse {
    pub x: f64,
    pub y: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Number of vertical slices used to integrate general ellipse intersections.
const SLICES: usize = 2048;

impl Ellipse {
    pub fn from_region(r: &InterestRegion) -> Self {
        Self {
            x: r.x,
            y: r.y,
            a: r.a,
            b: r.b,
            c: r.c,
        }
    }

    /// Image of the region under `h`, linearized at the region center.
    pub fn mapped(r: &InterestRegion, h: &Homography) -> Self {
        if h.is_identity() {
            return Self::from_region(r);
        }
        let (x, y) = h.apply(r.x, r.y);
        let j = h.jacobian(r.x, r.y);
        // M' = J^-T M J^-1
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let inv = [
            [j[1][1] / det, -j[0][1] / det],
            [-j[1][0] / det, j[0][0] / det],
        ];
        let m = [[r.a, r.b], [r.b, r.c]];
        let mut mi = [[0.0; 2]; 2];
        for i in 0..2 {
            for k in 0..2 {
                mi[i][k] = m[i][0] * inv[0][k] + m[i][1] * inv[1][k];
            }
        }
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for k in 0..2 {
                out[i][k] = inv[0][i] * mi[0][k] + inv[1][i] * mi[1][k];
            }
        }
        Self {
            x,
            y,
            a: out[0][0],
            b: 0.5 * (out[0][1] + out[1][0]),
            c: out[1][1],
        }
    }

    fn det(&self) -> f64 {
        self.a * self.c - self.b * self.b
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI / self.det().sqrt()
    }

    /// Same center, all axes multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let s = 1.0 / (factor * factor);
        Self {
            a: self.a * s,
            b: self.b * s,
            c: self.c * s,
            ..*self
        }
    }

    /// Length of the major semi-axis.
    pub fn max_radius(&self) -> f64 {
        let tr = self.a + self.c;
        let lambda_min = 0.5 * (tr - ((self.a - self.c).powi(2) + 4.0 * self.b * self.b).sqrt());
        1.0 / lambda_min.max(f64::MIN_POSITIVE).sqrt()
    }

    fn is_circle(&self) -> bool {
        self.b == 0.0 && self.a == self.c
    }

    fn half_width(&self) -> f64 {
        (self.c / self.det()).sqrt()
    }

    /// Vertical chord `[lo, hi]` at abscissa `x`, if any.
    fn chord(&self, x: f64) -> Option<(f64, f64)> {
        let u = x - self.x;
        let disc = self.c - u * u * self.det();
        if disc < 0.0 {
            return None;
        }
        let s = disc.sqrt();
        let mid = self.y - self.b * u / self.c;
        Some((mid - s / self.c, mid + s / self.c))
    }
}

fn circle_intersection(r1: f64, r2: f64, d: f64) -> f64 {
    if d >= r1 + r2 {
        return 0.0;
    }
    if d <= (r1 - r2).abs() {
        let r = r1.min(r2);
        return std::f64::consts::PI * r * r;
    }
    let a1 = ((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1))
        .clamp(-1.0, 1.0)
        .acos();
    let a2 = ((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2))
        .clamp(-1.0, 1.0)
        .acos();
    let k = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
    r1 * r1 * a1 + r2 * r2 * a2 - 0.5 * k.max(0.0).sqrt()
}

/// Area of `e1 ∩ e2`. Closed form for two circles, otherwise midpoint
/// integration of the chord overlap over the shared x-extent.
pub fn intersection_area(e1: &Ellipse, e2: &Ellipse) -> f64 {
    if e1.is_circle() && e2.is_circle() {
        let d = ((e1.x - e2.x).powi(2) + (e1.y - e2.y).powi(2)).sqrt();
        return circle_intersection(1.0 / e1.a.sqrt(), 1.0 / e2.a.sqrt(), d);
    }
    let (w1, w2) = (e1.half_width(), e2.half_width());
    let lo = (e1.x - w1).max(e2.x - w2);
    let hi = (e1.x + w1).min(e2.x + w2);
    if hi <= lo {
        return 0.0;
    }
    let step = (hi - lo) / SLICES as f64;
    let mut sum = 0.0;
    for i in 0..SLICES {
        let x = lo + (i as f64 + 0.5) * step;
        if let (Some((b1, t1)), Some((b2, t2))) = (e1.chord(x), e2.chord(x)) {
            sum += (t1.min(t2) - b1.max(b2)).max(0.0);
        }
    }
    sum * step
}

/// `1 - |e1 ∩ e2| / |e1 ∪ e2|`.
pub fn ellipse_overlap_error(e1: &Ellipse, e2: &Ellipse) -> f64 {
    let inter = intersection_area(e1, e2);
    let union = e1.area() + e2.area() - inter;
    (1.0 - inter / union).clamp(0.0, 1.0)
}

/// Overlap error of `r1` mapped through `h` against `r2`.
pub fn overlap_error(r1: &InterestRegion, r2: &InterestRegion, h: &Homography) -> f64 {
    ellipse_overlap_error(&Ellipse::mapped(r1, h), &Ellipse::from_region(r2))
}
