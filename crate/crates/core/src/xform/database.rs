//! On-disk dataset layout and manifest.
//!
//! ```text
//! <out>/manifest.json
//! <out>/<scene:04>/<kind>/<k:02>_<param:.2>.pgm
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Schedules, TransformKind};
use crate::error::{Error, Result};
use crate::imgcore::{load_image, save_image, GrayImage};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSettings {
    pub kernel_truncation: String,
    pub border: String,
    pub rounding: String,
    pub light_model: String,
}

impl Default for GeneratorSettings {
    fn default() -> Self {
        Self {
            kernel_truncation: "radius ceil(3 sigma), renormalized".into(),
            border: "reflect101".into(),
            rounding: "half-up".into(),
            light_model: format!(
                "8-bit luminance scaled directly, factor quantized to 1/{}",
                super::LIGHT_FACTOR_SCALE
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepEntry {
    pub k: usize,
    pub param: f64,
    /// Relative to the database root.
    pub path: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneEntry {
    /// File name of the reference image the scene was built from.
    pub source: String,
    pub width: usize,
    pub height: usize,
    pub blur: Vec<StepEntry>,
    pub light: Vec<StepEntry>,
}

impl SceneEntry {
    pub fn steps(&self, kind: TransformKind) -> &[StepEntry] {
        match kind {
            TransformKind::Blur => &self.blur,
            TransformKind::Light => &self.light,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub version: u32,
    pub schedules: Schedules,
    pub scenes: BTreeMap<u32, SceneEntry>,
    pub generator: GeneratorSettings,
    /// Directory holding the manifest; not serialized.
    #[serde(skip)]
    pub root: PathBuf,
}

impl DatasetManifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str, root: impl Into<PathBuf>) -> Result<Self> {
        let mut m: DatasetManifest = serde_json::from_str(text).map_err(|e| Error::Parse {
            context: MANIFEST_FILE.into(),
            line: e.line(),
            reason: e.to_string(),
        })?;
        if m.version != MANIFEST_VERSION {
            return Err(Error::Config(format!(
                "unsupported manifest version {} (expected {MANIFEST_VERSION})",
                m.version
            )));
        }
        m.root = root.into();
        Ok(m)
    }

    pub fn load(root: impl AsRef<Path>) -> Result<Self> {
        let root = root.as_ref();
        let path = root.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        Self::from_json(&text, root)
    }

    pub fn image_count(&self) -> usize {
        self.scenes
            .values()
            .map(|s| s.blur.len() + s.light.len())
            .sum()
    }

    pub fn path_of(&self, entry: &StepEntry) -> PathBuf {
        self.root.join(&entry.path)
    }
}

pub fn step_path(scene: u32, kind: TransformKind, k: usize, param: f64) -> String {
    format!("{scene:04}/{kind}/{k:02}_{param:.2}.pgm")
}

/// Reference images (`.pgm`/`.png`) in `dir`, sorted by file name.
pub fn scan_images(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut found = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        if path.is_file() && matches!(ext.as_deref(), Some("pgm" | "png")) {
            found.push(path);
        }
    }
    found.sort();
    Ok(found)
}

/// Builds both transformation datasets for every reference image in `refs`
/// and writes `manifest.json` under `out`.
///
/// Scenes are numbered from 1 in file-name order. Existing images are kept
/// unless `force` is set; since synthesis is deterministic, reruns leave the
/// output byte-identical.
pub fn generate_database(
    refs: &Path,
    out: &Path,
    schedules: &Schedules,
    force: bool,
) -> Result<DatasetManifest> {
    schedules.validate()?;
    let sources = scan_images(refs)?;
    if sources.is_empty() {
        return Err(Error::Config(format!(
            "no reference images (.pgm or .png) found in {}",
            refs.display()
        )));
    }
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;

    let scenes: Vec<(u32, SceneEntry)> = sources
        .par_iter()
        .enumerate()
        .map(|(i, src)| {
            let id = i as u32 + 1;
            let img = load_image(src)?;
            let entry = synthesize_scene(id, src, &img, out, schedules, force)?;
            Ok((id, entry))
        })
        .collect::<Result<_>>()?;

    let manifest = DatasetManifest {
        version: MANIFEST_VERSION,
        schedules: schedules.clone(),
        scenes: scenes.into_iter().collect(),
        generator: GeneratorSettings::default(),
        root: out.to_path_buf(),
    };
    let path = out.join(MANIFEST_FILE);
    let text = manifest.to_json();
    if force || fs::read_to_string(&path).ok().as_deref() != Some(text.as_str()) {
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    }
    Ok(manifest)
}

fn synthesize_scene(
    id: u32,
    src: &Path,
    img: &GrayImage,
    out: &Path,
    schedules: &Schedules,
    force: bool,
) -> Result<SceneEntry> {
    let mut entry = SceneEntry {
        source: src
            .file_name()
            .unwrap_or_default()
            .to_string_lossy()
            .into_owned(),
        width: img.width(),
        height: img.height(),
        blur: Vec::new(),
        light: Vec::new(),
    };
    for kind in TransformKind::ALL {
        let dir = out.join(format!("{id:04}")).join(kind.as_str());
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        for step in schedules.steps(kind) {
            let rel = step_path(id, kind, step.k, step.param);
            let path = out.join(&rel);
            if force || !path.exists() {
                save_image(&step.apply(img)?, &path)?;
            }
            let list = match kind {
                TransformKind::Blur => &mut entry.blur,
                TransformKind::Light => &mut entry.light,
            };
            list.push(StepEntry {
                k: step.k,
                param: step.param,
                path: rel,
            });
        }
    }
    Ok(entry)
}
