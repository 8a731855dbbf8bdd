//! Interest region detectors.
//!
//! Four native detectors are provided: Harris-Laplace and Hessian-Laplace on a
//! Gaussian scale space, MSER on the intensity component tree, and a
//! box-filter fast-Hessian on the integral image. Output of any other detector
//! enters through [`read_region_file`].

mod fast_hessian;
mod mser;
mod region_file;
mod scale_space;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

pub use fast_hessian::{
    box_hessian, fast_hessian, hessian_response, FastHessianLayer, FastHessianParams,
};
pub use mser::{mser, mser_regions, MserParams, MserRegion, Polarity};
pub use region_file::{format_regions, parse_regions, read_region_file, write_region_file};
pub use scale_space::{
    harris_laplace, harris_response, hessian_laplace, HarrisLaplaceParams, HessianLaplaceParams,
    ScaleSpaceParams,
};

use crate::error::{Error, Result};
use crate::imgcore::GrayImage;

/// A detected region: center plus the ellipse
/// `a (u - x)^2 + 2 b (u - x)(v - y) + c (v - y)^2 = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterestRegion {
    pub x: f64,
    pub y: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub strength: f64,
}

impl InterestRegion {
    pub fn circle(x: f64, y: f64, radius: f64, strength: f64) -> Self {
        let inv = 1.0 / (radius * radius);
        Self {
            x,
            y,
            a: inv,
            b: 0.0,
            c: inv,
            strength,
        }
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a > 0.0 && self.c > 0.0 && self.a * self.c - self.b * self.b > 0.0
    }

    /// Radius of the circle with the same area.
    pub fn equivalent_radius(&self) -> f64 {
        (self.a * self.c - self.b * self.b).powf(-0.25)
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI / (self.a * self.c - self.b * self.b).sqrt()
    }
}

/// Descending strength, then ascending `(y, x)`.
pub fn canonical_order(a: &InterestRegion, b: &InterestRegion) -> Ordering {
    b.strength
        .total_cmp(&a.strength)
        .then(a.y.total_cmp(&b.y))
        .then(a.x.total_cmp(&b.x))
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DetectorId {
    HarrisLaplace,
    HessianLaplace,
    Mser,
    FastHessian,
    /// Regions produced by an external program and read from region files.
    External(String),
}

impl DetectorId {
    pub const NATIVE: [DetectorId; 4] = [
        DetectorId::HarrisLaplace,
        DetectorId::HessianLaplace,
        DetectorId::Mser,
        DetectorId::FastHessian,
    ];

    pub fn is_native(&self) -> bool {
        !matches!(self, DetectorId::External(_))
    }

    /// Filesystem-safe directory name.
    pub fn dir_name(&self) -> String {
        match self {
            DetectorId::External(tag) => format!("EXT_{tag}"),
            other => other.to_string(),
        }
    }
}

impl std::fmt::Display for DetectorId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DetectorId::HarrisLaplace => f.write_str("HARLAP"),
            DetectorId::HessianLaplace => f.write_str("HESLAP"),
            DetectorId::Mser => f.write_str("MSER"),
            DetectorId::FastHessian => f.write_str("FASTHESS"),
            DetectorId::External(tag) => write!(f, "EXT:{tag}"),
        }
    }
}

impl std::str::FromStr for DetectorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "HARLAP" => Ok(DetectorId::HarrisLaplace),
            "HESLAP" => Ok(DetectorId::HessianLaplace),
            "MSER" => Ok(DetectorId::Mser),
            "FASTHESS" => Ok(DetectorId::FastHessian),
            _ => match s.strip_prefix("EXT:").or_else(|| s.strip_prefix("EXT_")) {
                Some(tag)
                    if !tag.is_empty()
                        && tag
                            .chars()
                            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') =>
                {
                    Ok(DetectorId::External(tag.to_string()))
                }
                _ => Err(Error::Config(format!(
                    "unknown detector `{s}` (expected HARLAP, HESLAP, MSER, FASTHESS or EXT:<tag>)"
                ))),
            },
        }
    }
}

impl Serialize for DetectorId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DetectorId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Settings for every native detector. Recorded alongside results.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorSettings {
    pub scale_space: ScaleSpaceParams,
    pub harris_laplace: HarrisLaplaceParams,
    pub hessian_laplace: HessianLaplaceParams,
    pub mser: MserParams,
    pub fast_hessian: FastHessianParams,
}

/// Runs a native detector. Output is sorted by [`canonical_order`].
pub fn detect(
    id: &DetectorId,
    img: &GrayImage,
    settings: &DetectorSettings,
) -> Result<Vec<InterestRegion>> {
    let mut regions = match id {
        DetectorId::HarrisLaplace => {
            harris_laplace(img, &settings.scale_space, &settings.harris_laplace)
        }
        DetectorId::HessianLaplace => {
            hessian_laplace(img, &settings.scale_space, &settings.hessian_laplace)
        }
        DetectorId::Mser => mser(img, &settings.mser),
        DetectorId::FastHessian => {
            fast_hessian(img, &settings.fast_hessian, settings.scale_space.kappa)
        }
        DetectorId::External(tag) => {
            return Err(Error::Config(format!(
                "detector EXT:{tag} is external; its regions must be supplied as region files"
            )))
        }
    };
    regions.sort_by(canonical_order);
    debug_assert!(regions.iter().all(|r| r.is_positive_definite()
        && r.x >= 0.0
        && r.y >= 0.0
        && r.x <= (img.width() - 1) as f64
        && r.y <= (img.height() - 1) as f64));
    Ok(regions)
}

/// Offset of the vertex of the parabola through `(-1, lo)`, `(0, mid)`,
/// `(1, hi)`, clamped to half a sample.
pub(crate) fn parabolic_offset(lo: f64, mid: f64, hi: f64) -> f64 {
    let denom = lo - 2.0 * mid + hi;
    if denom.abs() < f64::EPSILON {
        return 0.0;
    }
    (0.5 * (lo - hi) / denom).clamp(-0.5, 0.5)
}
