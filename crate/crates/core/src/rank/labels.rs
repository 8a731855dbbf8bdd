use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const LABELS_HEADER: &str = "scene_id,f,g,h";

/// Human-assigned binary scene attributes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SceneLabels {
    /// Outdoor scene.
    pub f: bool,
    /// Elements are mostly human-made.
    pub g: bool,
    /// Few edges delimiting well contrasted areas.
    pub h: bool,
}

/// Parses `scene_id,f,g,h` rows. A header row is optional. Rows are numbered
/// by file line in errors.
pub fn parse_labels_str(text: &str, context: &str) -> Result<BTreeMap<u32, SceneLabels>> {
    let invalid = |row: usize, reason: String| Error::Validation {
        context: context.to_string(),
        row,
        reason,
    };
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let row = i + 1;
        let line = line.trim();
        if line.is_empty() || (row == 1 && line.replace(' ', "") == LABELS_HEADER) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(invalid(
                row,
                format!("expected 4 fields `{LABELS_HEADER}`, got {}", fields.len()),
            ));
        }
        let scene: u32 = fields[0]
            .parse()
            .map_err(|_| invalid(row, format!("invalid scene id `{}`", fields[0])))?;
        let flag = |name: &str, v: &str| match v {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(invalid(
                row,
                format!("label {name} must be 0 or 1, got `{other}`"),
            )),
        };
        let labels = SceneLabels {
            f: flag("f", fields[1])?,
            g: flag("g", fields[2])?,
            h: flag("h", fields[3])?,
        };
        if out.insert(scene, labels).is_some() {
            return Err(invalid(row, format!("duplicate scene id {scene}")));
        }
    }
    Ok(out)
}

pub fn parse_labels(path: impl AsRef<Path>) -> Result<BTreeMap<u32, SceneLabels>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_labels_str(&text, &path.display().to_string())
}

/// Fails on the first scene in `scenes` without a label record.
pub fn require_labels(
    labels: &BTreeMap<u32, SceneLabels>,
    scenes: impl IntoIterator<Item = u32>,
) -> Result<()> {
    for s in scenes {
        if !labels.contains_key(&s) {
            return Err(Error::MissingLabel(s));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_one_examples() {
        let labels = parse_labels_str("scene_id,f,g,h\n88,0,1,1\n76,0,0,0\n", "t").unwrap();
        assert_eq!(
            labels[&88],
            SceneLabels {
                f: false,
                g: true,
                h: true
            }
        );
        assert_eq!(
            labels[&76],
            SceneLabels {
                f: false,
                g: false,
                h: false
            }
        );
    }

    #[test]
    fn non_binary_value_names_row() {
        match parse_labels_str("1,0,0,0\n5,2,0,1\n", "t") {
            Err(Error::Validation { row, .. }) => assert_eq!(row, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicates_and_malformed_rows() {
        assert!(matches!(
            parse_labels_str("1,0,0,0\n1,1,1,1\n", "t"),
            Err(Error::Validation { row: 2, .. })
        ));
        assert!(matches!(
            parse_labels_str("x,0,0,0\n", "t"),
            Err(Error::Validation { row: 1, .. })
        ));
        assert!(matches!(
            parse_labels_str("1,0,0\n", "t"),
            Err(Error::Validation { row: 1, .. })
        ));
    }

    #[test]
    fn missing_scene() {
        let labels = parse_labels_str("1,0,0,0\n2,1,1,1\n", "t").unwrap();
        assert!(require_labels(&labels, [1, 2]).is_ok());
        assert!(matches!(
            require_labels(&labels, [1, 3]),
            Err(Error::MissingLabel(3))
        ));
    }
}
