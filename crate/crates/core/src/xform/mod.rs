//! Synthesis of the blur and light-reduction datasets.
//!
//! Every reference scene yields two datasets, one per [`TransformKind`]. Step
//! `k = 1` of each is the untransformed reference; steps `2..=m` apply the
//! scheduled amount.

mod database;
mod ops;

use serde::{Deserialize, Serialize};

pub use database::{
    generate_database, scan_images, DatasetManifest, GeneratorSettings, SceneEntry, StepEntry,
};
pub use ops::{gaussian_blur, reduce_light, LIGHT_FACTOR_SCALE};

use crate::error::{Error, Result};
use crate::imgcore::GrayImage;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    Blur,
    Light,
}

impl TransformKind {
    pub const ALL: [TransformKind; 2] = [TransformKind::Blur, TransformKind::Light];

    pub fn as_str(self) -> &'static str {
        match self {
            TransformKind::Blur => "blur",
            TransformKind::Light => "light",
        }
    }
}

impl std::fmt::Display for TransformKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TransformKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "blur" => Ok(TransformKind::Blur),
            "light" => Ok(TransformKind::Light),
            other => Err(Error::Config(format!(
                "unknown transformation kind `{other}`"
            ))),
        }
    }
}

/// Default blur amounts: 0.0 to 4.5 pixels in 0.5 increments.
pub fn blur_schedule() -> Vec<f64> {
    (0..10).map(|i| f64::from(i) * 0.5).collect()
}

/// Default light factors: the reference (1.00) followed by 0.90 down to 0.30
/// in 0.05 decrements.
pub fn light_schedule() -> Vec<f64> {
    std::iter::once(1.0)
        .chain((0..13).map(|i| f64::from(90 - 5 * i) / 100.0))
        .collect()
}

/// One step of a transformation dataset.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransformStep {
    pub kind: TransformKind,
    /// 1-based index; `k = 1` is the reference.
    pub k: usize,
    /// Blur sigma in pixels or multiplicative light factor.
    pub param: f64,
}

impl TransformStep {
    pub fn apply(&self, img: &GrayImage) -> Result<GrayImage> {
        match self.kind {
            TransformKind::Blur => gaussian_blur(img, self.param),
            TransformKind::Light => reduce_light(img, self.param),
        }
    }
}

/// Per-kind ordered transformation amounts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedules {
    pub blur: Vec<f64>,
    pub light: Vec<f64>,
}

impl Default for Schedules {
    fn default() -> Self {
        Self {
            blur: blur_schedule(),
            light: light_schedule(),
        }
    }
}

impl Schedules {
    /// Blur must start at 0 and strictly increase; light must start at 1,
    /// strictly decrease and stay in `(0, 1]`.
    pub fn validate(&self) -> Result<()> {
        if self.blur.first() != Some(&0.0) {
            return Err(Error::Config("blur schedule must start at sigma 0".into()));
        }
        if !self.blur.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config(
                "blur schedule must be strictly increasing".into(),
            ));
        }
        if self.light.first() != Some(&1.0) {
            return Err(Error::Config(
                "light schedule must start at factor 1".into(),
            ));
        }
        if !self.light.windows(2).all(|w| w[0] > w[1]) {
            return Err(Error::Config(
                "light schedule must be strictly decreasing".into(),
            ));
        }
        if self.light.iter().any(|&s| !(s > 0.0 && s <= 1.0)) {
            return Err(Error::Config("light factors must lie in (0, 1]".into()));
        }
        Ok(())
    }

    pub fn get(&self, kind: TransformKind) -> &[f64] {
        match kind {
            TransformKind::Blur => &self.blur,
            TransformKind::Light => &self.light,
        }
    }

    pub fn steps(&self, kind: TransformKind) -> impl Iterator<Item = TransformStep> + '_ {
        self.get(kind)
            .iter()
            .enumerate()
            .map(move |(i, &param)| TransformStep {
                kind,
                k: i + 1,
                param,
            })
    }

    /// Number of images produced per scene.
    pub fn images_per_scene(&self) -> usize {
        self.blur.len() + self.light.len()
    }

    /// Step index `k` of `param` within the schedule of `kind`.
    pub fn step_of(&self, kind: TransformKind, param: f64) -> Option<usize> {
        self.get(kind)
            .iter()
            .position(|&p| (p - param).abs() < 1e-9)
            .map(|i| i + 1)
    }
}
