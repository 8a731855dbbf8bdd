use std::collections::BTreeMap;

use crate::detect::DetectorId;
use crate::error::{Error, Result};
use crate::repeat::RepeatabilityRecord;
use crate::xform::TransformKind;

/// Repeatability ratios of every scene for one (detector, kind, step).
#[derive(Clone, Debug, PartialEq)]
pub struct RepeatabilitySeries {
    pub detector: DetectorId,
    pub kind: TransformKind,
    pub step: usize,
    pub ratios: BTreeMap<u32, f64>,
    /// Scenes dropped because their reference image had no regions.
    pub excluded: Vec<u32>,
}

impl RepeatabilitySeries {
    pub fn new(
        detector: DetectorId,
        kind: TransformKind,
        step: usize,
        ratios: BTreeMap<u32, f64>,
    ) -> Self {
        Self {
            detector,
            kind,
            step,
            ratios,
            excluded: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.ratios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratios.is_empty()
    }

    /// Scenes by descending ratio, ties by ascending scene id.
    pub fn order(&self) -> Vec<(u32, f64)> {
        let mut v: Vec<(u32, f64)> = self.ratios.iter().map(|(&s, &r)| (s, r)).collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        v
    }
}

/// Collects the series for `(detector, kind, step)`. Records with no
/// reference regions are excluded and logged.
pub fn build_series(
    records: &[RepeatabilityRecord],
    detector: &DetectorId,
    kind: TransformKind,
    step: usize,
) -> Result<RepeatabilitySeries> {
    let mut series = RepeatabilitySeries::new(detector.clone(), kind, step, BTreeMap::new());
    let mut seen = std::collections::BTreeSet::new();
    let mut any = false;
    for (i, r) in records.iter().enumerate() {
        if &r.detector != detector || r.kind != kind || r.step != step {
            continue;
        }
        any = true;
        if !seen.insert(r.scene) {
            return Err(Error::Validation {
                context: format!("{detector} {kind} step {step}"),
                row: i + 1,
                reason: format!("duplicate record for scene {}", r.scene),
            });
        }
        match r.ratio() {
            Some(ratio) => {
                series.ratios.insert(r.scene, ratio);
            }
            None => {
                log::warn!(
                    "{detector} {kind} step {step}: scene {} has no reference regions, excluded",
                    r.scene
                );
                series.excluded.push(r.scene);
            }
        }
    }
    if !any {
        return Err(Error::Config(format!(
            "no repeatability records for {detector} {kind} step {step}"
        )));
    }
    Ok(series)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Top,
    Lowest,
}

impl Polarity {
    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Top => "top",
            Polarity::Lowest => "lowest",
        }
    }
}

/// `j` scenes from one end of a series, best-first for a top ranking and
/// worst-first for a lowest ranking.
#[derive(Clone, Debug, PartialEq)]
pub struct Ranking {
    pub detector: DetectorId,
    pub kind: TransformKind,
    pub step: usize,
    pub polarity: Polarity,
    pub entries: Vec<(u32, f64)>,
}

impl Ranking {
    pub fn j(&self) -> usize {
        self.entries.len()
    }

    pub fn scenes(&self) -> Vec<u32> {
        self.entries.iter().map(|e| e.0).collect()
    }
}

fn check_j(series: &RepeatabilitySeries, j: usize) -> Result<()> {
    if j == 0 || j > series.len() {
        return Err(Error::Argument(format!(
            "ranking size j = {j} must lie in 1..={} for {} {} step {}",
            series.len(),
            series.detector,
            series.kind,
            series.step
        )));
    }
    Ok(())
}

pub fn top_ranking(series: &RepeatabilitySeries, j: usize) -> Result<Ranking> {
    check_j(series, j)?;
    let mut entries = series.order();
    entries.truncate(j);
    Ok(Ranking {
        detector: series.detector.clone(),
        kind: series.kind,
        step: series.step,
        polarity: Polarity::Top,
        entries,
    })
}

pub fn lowest_ranking(series: &RepeatabilitySeries, j: usize) -> Result<Ranking> {
    check_j(series, j)?;
    let order = series.order();
    let entries = order.iter().rev().take(j).copied().collect();
    Ok(Ranking {
        detector: series.detector.clone(),
        kind: series.kind,
        step: series.step,
        polarity: Polarity::Lowest,
        entries,
    })
}

pub const RANKINGS_HEADER: &str = "detector,kind,step,polarity,rank_position,scene_id,ratio";

pub fn rankings_to_csv(rankings: &[Ranking]) -> String {
    let mut out = String::from(RANKINGS_HEADER);
    out.push('\n');
    for r in rankings {
        for (pos, (scene, ratio)) in r.entries.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{:.6}\n",
                r.detector,
                r.kind,
                r.step,
                r.polarity.as_str(),
                pos + 1,
                scene,
                ratio
            ));
        }
    }
    out
}
