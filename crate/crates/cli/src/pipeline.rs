//! The four pipeline stages. Each stage reads the previous stage's files,
//! computes in a bounded worker pool and writes its outputs in a fixed order,
//! so results do not depend on the number of workers.

use std::path::{Path, PathBuf};

use detbias_core::detect::{detect, format_regions, read_region_file};
use detbias_core::repeat::{records_to_csv, repeatability, Frame, Homography, RepeatabilityRecord};
use detbias_core::xform::{generate_database, SceneEntry};
use detbias_core::{DatasetManifest, DetectorId, Error, InterestRegion, Result, TransformKind};
use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Command, RunConfig};
use crate::layout::*;
use crate::report;

/// Result of a command that ran to completion.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    /// Some work items failed or inputs were missing; see the gap and
    /// failure reports.
    pub partial: bool,
}

impl Outcome {
    fn merge(self, other: Outcome) -> Outcome {
        Outcome {
            partial: self.partial || other.partial,
        }
    }
}

pub fn run(command: Command, cfg: &RunConfig) -> Result<Outcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {} workers: {e}", cfg.jobs)))?;
    pool.install(|| match command {
        Command::Gen => cmd_gen(cfg).map(|_| Outcome::default()),
        Command::Detect => cmd_detect(cfg).map(|s| s.outcome()),
        Command::Eval => cmd_eval(cfg).map(|s| s.outcome()),
        Command::Report => cmd_report(cfg).map(|_| Outcome::default()),
        Command::All => {
            if cfg.refs.is_some() {
                cmd_gen(cfg)?;
            } else {
                info!(
                    "no --refs given, using the existing database at {}",
                    cfg.db.display()
                );
            }
            let mut outcome = cmd_detect(cfg)?.outcome();
            outcome = outcome.merge(cmd_eval(cfg)?.outcome());
            if cfg.labels.is_some() {
                cmd_report(cfg)?;
            } else {
                warn!("no --labels given, skipping the report stage");
            }
            Ok(outcome)
        }
    })
}

pub fn cmd_gen(cfg: &RunConfig) -> Result<DatasetManifest> {
    let refs = cfg.refs.as_deref().ok_or_else(|| {
        Error::Config("gen needs a directory of reference images (--refs)".into())
    })?;
    let manifest = generate_database(refs, &cfg.db, &cfg.schedules, cfg.force)?;
    info!(
        "database {}: {} scenes, {} images",
        cfg.db.display(),
        manifest.scenes.len(),
        manifest.image_count()
    );
    Ok(manifest)
}

/// One image under one detector.
#[derive(Clone, Debug)]
struct Item<'a> {
    detector: &'a DetectorId,
    scene: u32,
    kind: TransformKind,
    k: usize,
    image: PathBuf,
    regions: PathBuf,
}

fn items<'a>(cfg: &'a RunConfig, manifest: &DatasetManifest, out: &Path) -> Vec<Item<'a>> {
    let mut v = Vec::new();
    for detector in &cfg.detectors {
        for (&scene, entry) in &manifest.scenes {
            for kind in TransformKind::ALL {
                for step in entry.steps(kind) {
                    v.push(Item {
                        detector,
                        scene,
                        kind,
                        k: step.k,
                        image: manifest.path_of(step),
                        regions: region_path(out, detector, scene, kind, step.k, step.param),
                    });
                }
            }
        }
    }
    v
}

#[derive(Clone, Debug, Default)]
pub struct DetectSummary {
    pub written: usize,
    pub cached: usize,
    /// External detector files that are not in place yet.
    pub external_missing: usize,
    /// `(detector, scene, kind, step, reason)`.
    pub failures: Vec<(String, u32, TransformKind, usize, String)>,
}

impl DetectSummary {
    fn outcome(&self) -> Outcome {
        Outcome {
            partial: !self.failures.is_empty(),
        }
    }
}

const DETECT_BATCH: usize = 64;

pub fn cmd_detect(cfg: &RunConfig) -> Result<DetectSummary> {
    let out = cfg.out_dir()?;
    let manifest = DatasetManifest::load(&cfg.db)?;
    let mut summary = DetectSummary::default();
    let mut todo = Vec::new();
    for item in items(cfg, &manifest, out) {
        let present = item.regions.is_file();
        if !item.detector.is_native() {
            if !present {
                summary.external_missing += 1;
            }
        } else if present && !cfg.force {
            summary.cached += 1;
        } else {
            todo.push(item);
        }
    }
    if summary.external_missing > 0 {
        warn!(
            "{} region files of external detectors are not in place under {}",
            summary.external_missing,
            out.join("regions").display()
        );
    }

    for batch in todo.chunks(DETECT_BATCH) {
        let results: Vec<Result<Vec<InterestRegion>>> = batch
            .par_iter()
            .map(|it| {
                let img = detbias_core::imgcore::load_image(&it.image)?;
                detect(it.detector, &img, &cfg.detector_settings)
            })
            .collect();
        for (it, res) in batch.iter().zip(results) {
            match res {
                Ok(regions) => {
                    write_if_changed(&it.regions, format_regions(&regions).as_bytes())?;
                    summary.written += 1;
                }
                Err(e) => {
                    warn!("{} on {}: {e}", it.detector, it.image.display());
                    summary.failures.push((
                        it.detector.to_string(),
                        it.scene,
                        it.kind,
                        it.k,
                        e.to_string(),
                    ));
                }
            }
        }
    }
    let rows: Vec<[String; 5]> = summary
        .failures
        .iter()
        .map(|(d, s, kind, k, reason)| {
            [
                d.clone(),
                s.to_string(),
                kind.to_string(),
                k.to_string(),
                reason.clone(),
            ]
        })
        .collect();
    write_if_changed(
        &out.join(DETECT_FAILURES_CSV),
        csv_string(["detector", "scene", "kind", "step", "reason"], &rows).as_bytes(),
    )?;
    write_metadata(cfg)?;
    info!(
        "detect: {} written, {} cached, {} failed",
        summary.written,
        summary.cached,
        summary.failures.len()
    );
    Ok(summary)
}

#[derive(Clone, Debug, Default)]
pub struct EvalSummary {
    pub records: Vec<RepeatabilityRecord>,
    /// `(detector, kind, scene, step, reason)` for steps with `N_ref = 0`.
    pub exclusions: Vec<[String; 5]>,
    /// `(detector, kind, scene, step, path, reason)` for unreadable region files.
    pub gaps: Vec<[String; 6]>,
}

impl EvalSummary {
    fn outcome(&self) -> Outcome {
        Outcome {
            partial: !self.gaps.is_empty(),
        }
    }

    fn extend(&mut self, other: EvalSummary) {
        self.records.extend(other.records);
        self.exclusions.extend(other.exclusions);
        self.gaps.extend(other.gaps);
    }
}

fn evaluate_unit(
    cfg: &RunConfig,
    out: &Path,
    detector: &DetectorId,
    scene: u32,
    entry: &SceneEntry,
    kind: TransformKind,
) -> EvalSummary {
    let mut s = EvalSummary::default();
    let frame = Frame {
        width: entry.width,
        height: entry.height,
    };
    let h = Homography::identity();
    let steps = entry.steps(kind);
    let key = |k: usize| {
        [
            detector.to_string(),
            kind.to_string(),
            scene.to_string(),
            k.to_string(),
        ]
    };
    let gap = |k: usize, path: &Path, e: &Error| {
        let [d, kind, scene, k] = key(k);
        [d, kind, scene, k, path.display().to_string(), e.to_string()]
    };
    let exclusion = |k: usize| {
        let [d, kind, scene, k] = key(k);
        [
            d,
            kind,
            scene,
            k,
            "no reference regions in the common part".to_string(),
        ]
    };
    let Some(first) = steps.first() else {
        return s;
    };
    let ref_path = region_path(out, detector, scene, kind, first.k, first.param);
    let reference = match read_region_file(&ref_path) {
        Ok(r) => r,
        Err(e) => {
            for step in steps {
                s.gaps.push(gap(step.k, &ref_path, &e));
            }
            return s;
        }
    };
    for step in steps {
        let counts = if step.k == first.k {
            let n = reference
                .iter()
                .filter(|r| frame.contains(r.x, r.y))
                .count();
            if n == 0 {
                Err(Error::UndefinedRepeatability)
            } else {
                Ok((n, n))
            }
        } else {
            let path = region_path(out, detector, scene, kind, step.k, step.param);
            let test = match read_region_file(&path) {
                Ok(t) => t,
                Err(e) => {
                    s.gaps.push(gap(step.k, &path, &e));
                    continue;
                }
            };
            repeatability(&reference, &test, &h, frame, frame, &cfg.eval)
                .map(|c| (c.n_ref, c.n_rep))
        };
        match counts {
            Ok((n_ref, n_rep)) => s.records.push(RepeatabilityRecord {
                detector: detector.clone(),
                kind,
                scene,
                step: step.k,
                param: step.param,
                n_ref,
                n_rep,
            }),
            Err(Error::UndefinedRepeatability) => {
                warn!(
                    "{detector} scene {scene} {kind} step {}: no reference regions, excluded",
                    step.k
                );
                s.exclusions.push(exclusion(step.k));
            }
            Err(e) => {
                let path = region_path(out, detector, scene, kind, step.k, step.param);
                s.gaps.push(gap(step.k, &path, &e));
            }
        }
    }
    s
}

pub fn cmd_eval(cfg: &RunConfig) -> Result<EvalSummary> {
    let out = cfg.out_dir()?;
    let manifest = DatasetManifest::load(&cfg.db)?;
    let mut units = Vec::new();
    for detector in &cfg.detectors {
        for (&scene, entry) in &manifest.scenes {
            for kind in TransformKind::ALL {
                units.push((detector, scene, entry, kind));
            }
        }
    }
    let parts: Vec<EvalSummary> = units
        .par_iter()
        .map(|&(d, scene, entry, kind)| evaluate_unit(cfg, out, d, scene, entry, kind))
        .collect();
    let mut summary = EvalSummary::default();
    for p in parts {
        summary.extend(p);
    }
    write_if_changed(
        &out.join(REPEATABILITY_CSV),
        records_to_csv(&summary.records)?.as_bytes(),
    )?;
    write_if_changed(
        &out.join(EXCLUSIONS_CSV),
        csv_string(
            ["detector", "kind", "scene", "step", "reason"],
            &summary.exclusions,
        )
        .as_bytes(),
    )?;
    write_if_changed(
        &out.join(GAPS_CSV),
        csv_string(
            ["detector", "kind", "scene", "step", "path", "reason"],
            &summary.gaps,
        )
        .as_bytes(),
    )?;
    write_metadata(cfg)?;
    if !summary.gaps.is_empty() {
        warn!(
            "{} region files missing or unreadable, listed in {}",
            summary.gaps.len(),
            out.join(GAPS_CSV).display()
        );
    }
    info!(
        "eval: {} records, {} excluded, {} gaps",
        summary.records.len(),
        summary.exclusions.len(),
        summary.gaps.len()
    );
    Ok(summary)
}

pub fn cmd_report(cfg: &RunConfig) -> Result<report::Report> {
    let out = cfg.out_dir()?;
    let labels_path = cfg
        .labels
        .as_deref()
        .ok_or_else(|| Error::Config("report needs scene labels (--labels)".into()))?;
    let labels = detbias_core::rank::parse_labels(labels_path)?;
    let records = detbias_core::repeat::read_records(out.join(REPEATABILITY_CSV))?;
    let report = report::build(cfg, &records, &labels)?;
    report.write(&out.join(REPORT_DIR))?;
    write_metadata(cfg)?;
    Ok(report)
}

#[derive(Serialize)]
struct Metadata<'a> {
    tool: &'static str,
    version: &'static str,
    repeatability: &'static str,
    common_part: &'static str,
    config: &'a RunConfig,
}

pub fn metadata_json(cfg: &RunConfig) -> String {
    let meta = Metadata {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        repeatability:
            "n_rep / n_ref with n_rep the size of a maximum one-to-one matching between reference \
                        and test regions whose overlap error is below eps_overlap",
        common_part: "region centers inside both image frames under the identity mapping",
        config: cfg,
    };
    let mut s = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    s.push('\n');
    s
}

fn write_metadata(cfg: &RunConfig) -> Result<()> {
    write_if_changed(
        &cfg.out_dir()?.join(METADATA_JSON),
        metadata_json(cfg).as_bytes(),
    )
    .map(|_| ())
}
