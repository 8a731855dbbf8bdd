//! Repeatability between a reference image's regions and a transformed
//! image's regions.
//!
//! Two regions correspond when the overlap error of the reference region,
//! mapped into the test frame, against the test region is below a threshold.
//! Repeated features are counted as a maximum one-to-one matching over such
//! pairs, and repeatability is that count over the number of reference regions
//! in the part of the scene both images see.

mod matching;
mod overlap;
mod record;

pub use matching::{canonical_matching, hopcroft_karp, matching_size};
pub use overlap::{ellipse_overlap_error, intersection_area, overlap_error, Ellipse};
pub use record::{read_records, records_to_csv, write_records, RepeatabilityRecord, RECORD_HEADER};

use serde::{Deserialize, Serialize};

use crate::detect::InterestRegion;
use crate::error::{Error, Result};

/// Planar projective map from reference to test coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Homography([[f64; 3]; 3]);

impl Homography {
    pub fn identity() -> Self {
        Self([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    pub fn new(m: [[f64; 3]; 3]) -> Result<Self> {
        let h = Self(m);
        let det = h.det();
        if det == 0.0 || !det.is_finite() {
            return Err(Error::Argument("homography must be invertible".into()));
        }
        Ok(h)
    }

    pub fn matrix(&self) -> &[[f64; 3]; 3] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn inverse(&self) -> Self {
        let m = &self.0;
        let d = self.det();
        let mut inv = [[0.0; 3]; 3];
        for (i, row) in inv.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                // adjugate: cofactor of (j, i)
                let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
                let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
                *v = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / d;
            }
        }
        Self(inv)
    }

    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        let m = &self.0;
        let w = m[2][0] * x + m[2][1] * y + m[2][2];
        (
            (m[0][0] * x + m[0][1] * y + m[0][2]) / w,
            (m[1][0] * x + m[1][1] * y + m[1][2]) / w,
        )
    }

    /// Jacobian of [`Homography::apply`] at `(x, y)`.
    pub fn jacobian(&self, x: f64, y: f64) -> [[f64; 2]; 2] {
        let m = &self.0;
        let w = m[2][0] * x + m[2][1] * y + m[2][2];
        let (u, v) = self.apply(x, y);
        [
            [(m[0][0] - u * m[2][0]) / w, (m[0][1] - u * m[2][1]) / w],
            [(m[1][0] - v * m[2][0]) / w, (m[1][1] - v * m[2][1]) / w],
        ]
    }
}

/// Image bounds in pixel-center coordinates: `[0, width - 1] x [0, height - 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Frame {
    pub width: usize,
    pub height: usize,
}

impl Frame {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= 0.0 && y >= 0.0 && x <= (self.width as f64 - 1.0) && y <= (self.height as f64 - 1.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalSettings {
    /// Pairs with overlap error strictly below this value may correspond.
    pub eps_overlap: f64,
    /// When set, both ellipses of a pair are rescaled so the reference region
    /// has this radius before the overlap error is computed. Centers are kept.
    pub normalize_radius: Option<f64>,
}

impl Default for EvalSettings {
    fn default() -> Self {
        Self {
            eps_overlap: 0.4,
            normalize_radius: None,
        }
    }
}

impl EvalSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_overlap > 0.0 && self.eps_overlap < 1.0) {
            return Err(Error::Argument(format!(
                "overlap threshold must lie in (0, 1), got {}",
                self.eps_overlap
            )));
        }
        if let Some(r) = self.normalize_radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::Argument(format!(
                    "normalization radius must be positive, got {r}"
                )));
            }
        }
        Ok(())
    }
}

/// Counts produced by [`repeatability`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RepeatCounts {
    pub n_ref: usize,
    pub n_rep: usize,
}

impl RepeatCounts {
    pub fn ratio(&self) -> f64 {
        self.n_rep as f64 / self.n_ref as f64
    }
}

/// Adjacency of the correspondence graph: for each reference region, the
/// test regions whose overlap error is below the threshold, ascending.
pub fn correspondence_graph(
    reference: &[InterestRegion],
    test: &[InterestRegion],
    h: &Homography,
    settings: &EvalSettings,
) -> Vec<Vec<usize>> {
    let eps = settings.eps_overlap;
    let test_e: Vec<Ellipse> = test.iter().map(Ellipse::from_region).collect();
    let mut order: Vec<usize> = (0..test.len()).collect();
    order.sort_by(|&a, &b| test_e[a].x.total_cmp(&test_e[b].x).then(a.cmp(&b)));
    let sorted_x: Vec<f64> = order.iter().map(|&i| test_e[i].x).collect();
    let max_test_r = test_e
        .iter()
        .map(Ellipse::max_radius)
        .fold(0.0f64, f64::max);

    reference
        .iter()
        .map(|r| {
            let mut e1 = Ellipse::mapped(r, h);
            let mut factor = 1.0;
            if let Some(norm) = settings.normalize_radius {
                factor = norm / e1.area().sqrt() * std::f64::consts::PI.sqrt();
                e1 = e1.scaled(factor);
            }
            let reach = e1.max_radius() + max_test_r * factor;
            let start = sorted_x.partition_point(|&x| x < e1.x - reach);
            let mut adj = Vec::new();
            for &j in &order[start..] {
                let e2 = test_e[j].scaled(factor);
                if e2.x > e1.x + reach {
                    break;
                }
                let (a1, a2) = (e1.area(), e2.area());
                // IoU can never exceed the area ratio
                if 1.0 - a1.min(a2) / a1.max(a2) >= eps {
                    continue;
                }
                let d = ((e1.x - e2.x).powi(2) + (e1.y - e2.y).powi(2)).sqrt();
                if d >= e1.max_radius() + e2.max_radius() {
                    continue;
                }
                if ellipse_overlap_error(&e1, &e2) < eps {
                    adj.push(j);
                }
            }
            adj.sort_unstable();
            adj
        })
        .collect()
}

/// One-to-one correspondences of maximum cardinality, as `(ref, test)` index
/// pairs. Among maximum matchings the lexicographically smallest is returned.
pub fn correspondences(
    reference: &[InterestRegion],
    test: &[InterestRegion],
    h: &Homography,
    settings: &EvalSettings,
) -> Vec<(usize, usize)> {
    let adj = correspondence_graph(reference, test, h, settings);
    canonical_matching(&adj, test.len())
}

/// Repeatability of `test` against `reference`, restricted to the part of the
/// scene visible in both frames (region centers are tested).
pub fn repeatability(
    reference: &[InterestRegion],
    test: &[InterestRegion],
    h: &Homography,
    ref_frame: Frame,
    test_frame: Frame,
    settings: &EvalSettings,
) -> Result<RepeatCounts> {
    settings.validate()?;
    let inv = h.inverse();
    let ref_common: Vec<InterestRegion> = reference
        .iter()
        .filter(|r| {
            let (x, y) = h.apply(r.x, r.y);
            test_frame.contains(x, y)
        })
        .copied()
        .collect();
    let test_common: Vec<InterestRegion> = test
        .iter()
        .filter(|r| {
            let (x, y) = inv.apply(r.x, r.y);
            ref_frame.contains(x, y)
        })
        .copied()
        .collect();
    if ref_common.is_empty() {
        return Err(Error::UndefinedRepeatability);
    }
    let adj = correspondence_graph(&ref_common, &test_common, h, settings);
    Ok(RepeatCounts {
        n_ref: ref_common.len(),
        n_rep: matching_size(&adj, test_common.len()),
    })
}
