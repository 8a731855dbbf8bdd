//! Text region files: a `1.0` marker line, a count line, then one
//! `x y a b c` line per region.

use std::fs;
use std::path::Path;

use super::InterestRegion;
use crate::error::{Error, Result};

/// Parses region-file text. `context` names the source in error messages.
/// Rows are numbered from 1 in validation errors.
pub fn parse_regions(text: &str, context: &str) -> Result<Vec<InterestRegion>> {
    let parse_err = |line: usize, reason: String| Error::Parse {
        context: context.to_string(),
        line,
        reason,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (ln, marker) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing scale marker".into()))?;
    match marker.parse::<f64>() {
        Ok(1.0) => {}
        _ => {
            return Err(parse_err(
                ln,
                format!("expected scale marker 1.0, got `{marker}`"),
            ))
        }
    }
    let (ln, count) = lines
        .next()
        .ok_or_else(|| parse_err(ln + 1, "missing region count".into()))?;
    let count: usize = count
        .parse()
        .map_err(|_| parse_err(ln, format!("invalid region count `{count}`")))?;

    let mut regions = Vec::with_capacity(count);
    for (ln, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 5 {
            return Err(parse_err(ln, format!("expected `x y a b c`, got `{line}`")));
        }
        let mut v = [0.0f64; 5];
        for (slot, field) in v.iter_mut().zip(&fields) {
            *slot = field
                .parse()
                .ok()
                .filter(|x: &f64| x.is_finite())
                .ok_or_else(|| parse_err(ln, format!("invalid number `{field}`")))?;
        }
        let region = InterestRegion {
            x: v[0],
            y: v[1],
            a: v[2],
            b: v[3],
            c: v[4],
            strength: 0.0,
        };
        if !region.is_positive_definite() {
            return Err(Error::Validation {
                context: context.to_string(),
                row: regions.len() + 1,
                reason: format!(
                    "ellipse ({}, {}, {}) is not positive definite",
                    v[2], v[3], v[4]
                ),
            });
        }
        regions.push(region);
    }
    if regions.len() != count {
        return Err(parse_err(
            ln,
            format!(
                "header declares {count} regions, file contains {}",
                regions.len()
            ),
        ));
    }
    Ok(regions)
}

pub fn read_region_file(path: impl AsRef<Path>) -> Result<Vec<InterestRegion>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_regions(&text, &path.display().to_string())
}

/// Canonical text for `regions`, in the given order. Numbers use the shortest
/// representation that parses back to the same value.
pub fn format_regions(regions: &[InterestRegion]) -> String {
    let mut out = format!("1.0\n{}\n", regions.len());
    for r in regions {
        out.push_str(&format!("{} {} {} {} {}\n", r.x, r.y, r.a, r.b, r.c));
    }
    out
}

pub fn write_region_file(path: impl AsRef<Path>, regions: &[InterestRegion]) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_regions(regions)).map_err(|e| Error::io(path, e))
}
