//! Repeatability records and their CSV form.

use std::fs;
use std::path::Path;

use crate::detect::DetectorId;
use crate::error::{Error, Result};
use crate::xform::TransformKind;

pub const RECORD_HEADER: &str = "detector,kind,scene,step,param,n_ref,n_rep,ratio";

/// Repeatability of one detector on one transformed image.
#[derive(Clone, Debug, PartialEq)]
pub struct RepeatabilityRecord {
    pub detector: DetectorId,
    pub kind: TransformKind,
    pub scene: u32,
    pub step: usize,
    pub param: f64,
    pub n_ref: usize,
    pub n_rep: usize,
}

impl RepeatabilityRecord {
    /// `n_rep / n_ref`; `None` when no reference regions were found.
    pub fn ratio(&self) -> Option<f64> {
        (self.n_ref > 0).then(|| self.n_rep as f64 / self.n_ref as f64)
    }

    pub fn sort_key(&self) -> (String, TransformKind, u32, usize) {
        (self.detector.to_string(), self.kind, self.scene, self.step)
    }
}

/// Serializes records sorted by (detector, kind, scene, step). Records with
/// undefined ratio are rejected.
pub fn records_to_csv(records: &[RepeatabilityRecord]) -> Result<String> {
    let mut sorted: Vec<&RepeatabilityRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.sort_key());
    let mut out = String::from(RECORD_HEADER);
    out.push('\n');
    for (i, r) in sorted.iter().enumerate() {
        let ratio = r.ratio().ok_or_else(|| Error::Validation {
            context: "repeatability records".into(),
            row: i + 1,
            reason: format!(
                "{} scene {} step {} has no reference regions",
                r.detector, r.scene, r.step
            ),
        })?;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{:.6}\n",
            r.detector, r.kind, r.scene, r.step, r.param, r.n_ref, r.n_rep, ratio
        ));
    }
    Ok(out)
}

pub fn write_records(path: impl AsRef<Path>, records: &[RepeatabilityRecord]) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, records_to_csv(records)?).map_err(|e| Error::io(path, e))
}

pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<RepeatabilityRecord>> {
    let path = path.as_ref();
    let context = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| csv_error(&context, e))?;
    let headers = reader
        .headers()
        .map_err(|e| csv_error(&context, e))?
        .clone();
    if headers.iter().collect::<Vec<_>>().join(",") != RECORD_HEADER {
        return Err(Error::Parse {
            context,
            line: 1,
            reason: format!("expected header `{RECORD_HEADER}`"),
        });
    }
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| csv_error(&context, e))?;
        let line = i + 2;
        let bad = |what: &str| Error::Parse {
            context: context.clone(),
            line,
            reason: format!("invalid {what}"),
        };
        if row.len() != 8 {
            return Err(bad("column count"));
        }
        let record = RepeatabilityRecord {
            detector: row[0].parse().map_err(|_| bad("detector"))?,
            kind: row[1].parse().map_err(|_| bad("kind"))?,
            scene: row[2].parse().map_err(|_| bad("scene"))?,
            step: row[3].parse().map_err(|_| bad("step"))?,
            param: row[4].parse().map_err(|_| bad("param"))?,
            n_ref: row[5].parse().map_err(|_| bad("n_ref"))?,
            n_rep: row[6].parse().map_err(|_| bad("n_rep"))?,
        };
        let ratio: f64 = row[7].parse().map_err(|_| bad("ratio"))?;
        if record.n_rep > record.n_ref || record.ratio().is_none_or(|r| (r - ratio).abs() > 1e-6) {
            return Err(Error::Validation {
                context: context.clone(),
                row: i + 1,
                reason: "counts and ratio are inconsistent".into(),
            });
        }
        out.push(record);
    }
    Ok(out)
}

fn csv_error(context: &str, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: context.into(),
            source,
        },
        other => Error::Parse {
            context: context.to_string(),
            line,
            reason: format!("{other:?}"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(
        det: &str,
        kind: TransformKind,
        scene: u32,
        step: usize,
        n_ref: usize,
        n_rep: usize,
    ) -> RepeatabilityRecord {
        RepeatabilityRecord {
            detector: det.parse().unwrap(),
            kind,
            scene,
            step,
            param: 0.5 * (step - 1) as f64,
            n_ref,
            n_rep,
        }
    }

    #[test]
    fn csv_is_sorted_and_round_trips() {
        let records = vec![
            rec("MSER", TransformKind::Light, 2, 1, 10, 10),
            rec("HARLAP", TransformKind::Blur, 2, 3, 90, 45),
            rec("HARLAP", TransformKind::Blur, 1, 2, 7, 3),
            rec("EXT:ebr", TransformKind::Blur, 1, 2, 7, 3),
        ];
        let text = records_to_csv(&records).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], RECORD_HEADER);
        assert_eq!(lines[1], "EXT:ebr,blur,1,2,0.5,7,3,0.428571");
        assert_eq!(lines[3], "HARLAP,blur,2,3,1,90,45,0.500000");
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        fs::write(&p, &text).unwrap();
        let mut back = read_records(&p).unwrap();
        let mut want = records.clone();
        want.sort_by_key(|r| r.sort_key());
        back.sort_by_key(|r| r.sort_key());
        assert_eq!(back, want);
    }

    #[test]
    fn undefined_ratio_cannot_be_written() {
        let r = rec("MSER", TransformKind::Blur, 1, 1, 0, 0);
        assert_eq!(r.ratio(), None);
        assert!(records_to_csv(&[r]).is_err());
    }

    #[test]
    fn inconsistent_rows_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        fs::write(&p, format!("{RECORD_HEADER}\nMSER,blur,1,2,0.5,10,4,0.9\n")).unwrap();
        assert!(matches!(read_records(&p), Err(Error::Validation { .. })));
        fs::write(&p, format!("{RECORD_HEADER}\nMSER,fog,1,2,0.5,10,4,0.4\n")).unwrap();
        assert!(matches!(
            read_records(&p),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
