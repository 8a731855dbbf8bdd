use std::collections::BTreeMap;

use super::{Ranking, SceneLabels};
use crate::error::{Error, Result};

/// Outdoor / human-made / simple shares of a ranking, kept as exact counts
/// over the ranking size `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraitIndices {
    pub j: usize,
    pub outdoor: usize,
    pub human_made: usize,
    pub simple: usize,
}

impl TraitIndices {
    pub fn f(&self) -> f64 {
        self.outdoor as f64 / self.j as f64
    }

    pub fn g(&self) -> f64 {
        self.human_made as f64 / self.j as f64
    }

    pub fn h(&self) -> f64 {
        self.simple as f64 / self.j as f64
    }

    /// `(F, G, H)` in percent.
    pub fn percentages(&self) -> [f64; 3] {
        [self.outdoor, self.human_made, self.simple].map(|c| 100.0 * c as f64 / self.j as f64)
    }
}

pub fn trait_indices(
    ranking: &Ranking,
    labels: &BTreeMap<u32, SceneLabels>,
) -> Result<TraitIndices> {
    if ranking.j() == 0 {
        return Err(Error::Argument("empty ranking".into()));
    }
    let mut t = TraitIndices {
        j: ranking.j(),
        outdoor: 0,
        human_made: 0,
        simple: 0,
    };
    for &(scene, _) in &ranking.entries {
        let l = labels.get(&scene).ok_or(Error::MissingLabel(scene))?;
        t.outdoor += usize::from(l.f);
        t.human_made += usize::from(l.g);
        t.simple += usize::from(l.h);
    }
    Ok(t)
}
