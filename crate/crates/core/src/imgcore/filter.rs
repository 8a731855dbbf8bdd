//! Gaussian kernels and a floating point plane used by the scale-space code.

/// Maps an out-of-range index onto `[0, n)` by mirroring about the edge
/// samples without repeating them (`-1 -> 1`, `n -> n - 2`).
pub fn reflect101(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let mut m = i.rem_euclid(period);
    if m >= n as isize {
        m = period - m;
    }
    m as usize
}

/// Sampled Gaussian truncated at radius `ceil(3 sigma)` and renormalized to
/// sum to one. Index `r` of the result is the center tap.
///
/// `sigma` must be positive.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    debug_assert!(sigma > 0.0);
    let radius = (3.0 * sigma).ceil() as isize;
    let denom = 2.0 * sigma * sigma;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|i| (-((i * i) as f64) / denom).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

/// Row-major single precision image.
#[derive(Clone, Debug, PartialEq)]
pub struct Plane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl Plane {
    pub fn from_vec(width: usize, height: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), width * height);
        Self {
            width,
            height,
            data,
        }
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self::from_vec(width, height, vec![0.0; width * height])
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.data[y * self.width + x] = v;
    }

    /// Separable Gaussian smoothing with reflect-101 borders. `sigma <= 0`
    /// returns a copy.
    pub fn blurred(&self, sigma: f64) -> Plane {
        if sigma <= 0.0 {
            return self.clone();
        }
        let kernel: Vec<f64> = gaussian_kernel(sigma);
        let r = (kernel.len() / 2) as isize;
        let (w, h) = (self.width, self.height);

        let mut tmp = vec![0.0f64; w * h];
        let mut padded = vec![0.0f64; w + 2 * r as usize];
        for y in 0..h {
            let row = &self.data[y * w..(y + 1) * w];
            for (i, p) in padded.iter_mut().enumerate() {
                *p = row[reflect101(i as isize - r, w)];
            }
            let out = &mut tmp[y * w..(y + 1) * w];
            for (x, o) in out.iter_mut().enumerate() {
                *o = kernel
                    .iter()
                    .zip(&padded[x..x + kernel.len()])
                    .map(|(k, v)| k * v)
                    .sum();
            }
        }

        let mut out = vec![0.0f64; w * h];
        for y in 0..h {
            let dst = &mut out[y * w..(y + 1) * w];
            for (i, &k) in kernel.iter().enumerate() {
                let sy = reflect101(y as isize + i as isize - r, h);
                let src = &tmp[sy * w..(sy + 1) * w];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += k * s;
                }
            }
        }
        Plane::from_vec(w, h, out)
    }

    /// Central first differences with reflect-101 borders.
    pub fn gradients(&self) -> (Plane, Plane) {
        let (w, h) = (self.width, self.height);
        let mut gx = Plane::zeros(w, h);
        let mut gy = Plane::zeros(w, h);
        for y in 0..h {
            let ym = reflect101(y as isize - 1, h);
            let yp = reflect101(y as isize + 1, h);
            for x in 0..w {
                let xm = reflect101(x as isize - 1, w);
                let xp = reflect101(x as isize + 1, w);
                gx.set(x, y, 0.5 * (self.get(xp, y) - self.get(xm, y)));
                gy.set(x, y, 0.5 * (self.get(x, yp) - self.get(x, ym)));
            }
        }
        (gx, gy)
    }

    /// Second differences `(Lxx, Lyy, Lxy)` with reflect-101 borders.
    pub fn hessian(&self) -> (Plane, Plane, Plane) {
        let (w, h) = (self.width, self.height);
        let mut lxx = Plane::zeros(w, h);
        let mut lyy = Plane::zeros(w, h);
        let mut lxy = Plane::zeros(w, h);
        for y in 0..h {
            let ym = reflect101(y as isize - 1, h);
            let yp = reflect101(y as isize + 1, h);
            for x in 0..w {
                let xm = reflect101(x as isize - 1, w);
                let xp = reflect101(x as isize + 1, w);
                let c = self.get(x, y);
                lxx.set(x, y, self.get(xp, y) - 2.0 * c + self.get(xm, y));
                lyy.set(x, y, self.get(x, yp) - 2.0 * c + self.get(x, ym));
                lxy.set(
                    x,
                    y,
                    0.25 * (self.get(xp, yp) - self.get(xm, yp) - self.get(xp, ym)
                        + self.get(xm, ym)),
                );
            }
        }
        (lxx, lyy, lxy)
    }

    pub fn zip_map(&self, other: &Plane, f: impl Fn(f64, f64) -> f64) -> Plane {
        assert_eq!((self.width, self.height), (other.width, other.height));
        Plane::from_vec(
            self.width,
            self.height,
            self.data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }
}
