//! File names under the output directory.
//!
//! ```text
//! <out>/regions/<detector>/<scene:04>/<kind>/<k:02>_<param:.2>.txt
//! <out>/repeatability.csv  exclusions.csv  gaps.csv  detect_failures.csv
//! <out>/run_metadata.json
//! <out>/report/...
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use detbias_core::{DetectorId, Error, Result, TransformKind};

pub const REPEATABILITY_CSV: &str = "repeatability.csv";
pub const EXCLUSIONS_CSV: &str = "exclusions.csv";
pub const GAPS_CSV: &str = "gaps.csv";
pub const DETECT_FAILURES_CSV: &str = "detect_failures.csv";
pub const METADATA_JSON: &str = "run_metadata.json";
pub const REPORT_DIR: &str = "report";

pub fn region_path(
    out: &Path,
    detector: &DetectorId,
    scene: u32,
    kind: TransformKind,
    k: usize,
    param: f64,
) -> PathBuf {
    out.join("regions")
        .join(detector.dir_name())
        .join(format!("{scene:04}"))
        .join(kind.as_str())
        .join(format!("{k:02}_{param:.2}.txt"))
}

/// Writes `contents` unless the file already holds exactly these bytes.
/// Returns whether the file was written.
pub fn write_if_changed(path: &Path, contents: &[u8]) -> Result<bool> {
    if fs::read(path).is_ok_and(|old| old == contents) {
        return Ok(false);
    }
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| io_error(path, e))?;
    Ok(true)
}

pub fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Serializes rows with a header through the csv writer, so free-text
/// fields are quoted when needed.
pub fn csv_string<const N: usize>(header: [&str; N], rows: &[[String; N]]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for row in rows {
        w.write_record(row).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 fields")
}
