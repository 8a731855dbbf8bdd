//! Benchmark harness measuring how the repeatability of local feature
//! detectors depends on scene content.
//!
//! The pipeline is split into five stages, one module each:
//!
//! - [`imgcore`]: 8-bit luminance rasters, PGM/PNG codecs, integral images.
//! - [`xform`]: synthesis of Gaussian-blur and light-reduction datasets.
//! - [`detect`]: native scale-space, MSER and box-filter detectors plus the
//!   text region-file adapter for third-party detector output.
//! - [`repeat`]: overlap error, one-to-one correspondences and repeatability.
//! - [`rank`]: per-detector scene rankings, scene labels and trait indices.

pub mod detect;
pub mod error;
pub mod imgcore;
pub mod rank;
pub mod repeat;
pub mod xform;

pub use detect::{DetectorId, DetectorSettings, InterestRegion};
pub use error::{Error, Result};
pub use imgcore::{GrayImage, IntegralImage};
pub use rank::{Ranking, SceneLabels, TraitIndices};
pub use repeat::{Homography, RepeatabilityRecord};
pub use xform::{DatasetManifest, Schedules, TransformKind};
