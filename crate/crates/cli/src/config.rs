//! Run configuration: command-line flags layered over an optional TOML file.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use detbias_core::repeat::EvalSettings;
use detbias_core::{DetectorId, DetectorSettings, Error, Result, Schedules, TransformKind};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "detbias",
    version,
    about = "Scene-content bias benchmark for local feature detectors"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Synthesize blur and light datasets from reference images.
    Gen,
    /// Run the detectors on every database image and write region files.
    Detect,
    /// Compute repeatability records from region files.
    Eval,
    /// Rank scenes and emit trait-index tables and charts.
    Report,
    /// gen, detect, eval and report in sequence.
    All,
}

#[derive(Clone, Debug, Default, Args)]
pub struct Flags {
    /// TOML file with any of the settings below; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Database root (holds manifest.json).
    #[arg(long, global = true)]
    pub db: Option<PathBuf>,
    /// Output directory for region files, CSVs and reports.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Directory of reference images for `gen`.
    #[arg(long, global = true)]
    pub refs: Option<PathBuf>,
    /// Comma-separated detector names: HARLAP, HESLAP, MSER, FASTHESS, EXT:<tag>.
    #[arg(long, global = true, value_delimiter = ',')]
    pub detectors: Option<Vec<String>>,
    /// Overlap error below which two regions may correspond [default: 0.4].
    #[arg(long, global = true)]
    pub eps_overlap: Option<f64>,
    /// Ranking size [default: 20].
    #[arg(long, global = true)]
    pub j: Option<usize>,
    /// Blur sigmas reported in tables [default: 0.5,2.0,3.0].
    #[arg(long, global = true, value_delimiter = ',')]
    pub steps_blur: Option<Vec<f64>>,
    /// Light reductions in percent reported in tables [default: 10,40,60].
    #[arg(long, global = true, value_delimiter = ',')]
    pub steps_light: Option<Vec<f64>>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Recompute outputs that already exist.
    #[arg(long, global = true)]
    pub force: bool,
    /// Scene labels CSV (`scene_id,f,g,h`).
    #[arg(long, global = true)]
    pub labels: Option<PathBuf>,
}

/// Contents of a `--config` file. Paths are relative to the file.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub db: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub refs: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub detectors: Option<Vec<String>>,
    pub eps_overlap: Option<f64>,
    pub normalize_radius: Option<f64>,
    pub j: Option<usize>,
    pub steps_blur: Option<Vec<f64>>,
    pub steps_light: Option<Vec<f64>>,
    pub jobs: Option<usize>,
    pub force: Option<bool>,
    pub schedules: Option<Schedules>,
    pub detector_settings: Option<DetectorSettings>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let mut cfg: FileConfig = toml::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {}", path.display(), e.message())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.db, &mut cfg.out, &mut cfg.refs, &mut cfg.labels]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

pub const DEFAULT_STEPS_BLUR: [f64; 3] = [0.5, 2.0, 3.0];
pub const DEFAULT_STEPS_LIGHT: [f64; 3] = [10.0, 40.0, 60.0];
pub const DEFAULT_J: usize = 20;

/// Fully resolved settings for one invocation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub db: PathBuf,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub refs: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub detectors: Vec<DetectorId>,
    pub eval: EvalSettings,
    pub j: usize,
    /// Blur sigmas selected for the report.
    pub steps_blur: Vec<f64>,
    /// Light reductions in percent selected for the report.
    pub steps_light: Vec<f64>,
    pub schedules: Schedules,
    pub detector_settings: DetectorSettings,
    #[serde(skip)]
    pub jobs: usize,
    #[serde(skip)]
    pub force: bool,
}

impl RunConfig {
    pub fn resolve(flags: &Flags) -> Result<Self> {
        let file = match &flags.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let db = flags
            .db
            .clone()
            .or(file.db)
            .ok_or_else(|| Error::Config("no database root given (--db)".into()))?;
        let names = flags.detectors.clone().or(file.detectors);
        let detectors = match names {
            Some(names) => names
                .iter()
                .map(|n| n.trim().parse::<DetectorId>())
                .collect::<Result<Vec<_>>>()?,
            None => DetectorId::NATIVE.to_vec(),
        };
        let cfg = RunConfig {
            db,
            out: flags.out.clone().or(file.out),
            refs: flags.refs.clone().or(file.refs),
            labels: flags.labels.clone().or(file.labels),
            detectors,
            eval: EvalSettings {
                eps_overlap: flags.eps_overlap.or(file.eps_overlap).unwrap_or(0.4),
                normalize_radius: file.normalize_radius,
            },
            j: flags.j.or(file.j).unwrap_or(DEFAULT_J),
            steps_blur: flags
                .steps_blur
                .clone()
                .or(file.steps_blur)
                .unwrap_or_else(|| DEFAULT_STEPS_BLUR.to_vec()),
            steps_light: flags
                .steps_light
                .clone()
                .or(file.steps_light)
                .unwrap_or_else(|| DEFAULT_STEPS_LIGHT.to_vec()),
            schedules: file.schedules.unwrap_or_default(),
            detector_settings: file.detector_settings.unwrap_or_default(),
            jobs: flags.jobs.or(file.jobs).unwrap_or(0),
            force: flags.force || file.force.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.eval.validate()?;
        self.schedules.validate()?;
        if self.j == 0 {
            return Err(Error::Config("ranking size j must be at least 1".into()));
        }
        if self.detectors.is_empty() {
            return Err(Error::Config("no detectors selected".into()));
        }
        for (i, d) in self.detectors.iter().enumerate() {
            if self.detectors[..i].contains(d) {
                return Err(Error::Config(format!("detector {d} listed twice")));
            }
        }
        self.selected_steps()?;
        Ok(())
    }

    pub fn out_dir(&self) -> Result<&Path> {
        self.out
            .as_deref()
            .ok_or_else(|| Error::Config("no output directory given (--out)".into()))
    }

    /// Report columns per kind as `(k, amount label)`, in the order given.
    pub fn selected_steps(&self) -> Result<Vec<(TransformKind, usize, String)>> {
        let mut out = Vec::new();
        for &sigma in &self.steps_blur {
            let k = self.step_index(TransformKind::Blur, sigma, format!("blur sigma {sigma}"))?;
            out.push((TransformKind::Blur, k, format!("{sigma:.1}")));
        }
        for &pct in &self.steps_light {
            let factor = 1.0 - pct / 100.0;
            let k = self.step_index(
                TransformKind::Light,
                factor,
                format!("light reduction {pct}%"),
            )?;
            out.push((TransformKind::Light, k, format!("{pct}%")));
        }
        Ok(out)
    }

    fn step_index(&self, kind: TransformKind, param: f64, what: String) -> Result<usize> {
        match self.schedules.step_of(kind, param) {
            Some(1) => Err(Error::Config(format!(
                "{what} is the untransformed reference and cannot be ranked"
            ))),
            Some(k) => Ok(k),
            None => Err(Error::Config(format!(
                "{what} is not in the {kind} schedule {:?}",
                self.schedules.get(kind)
            ))),
        }
    }
}
