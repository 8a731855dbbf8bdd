//! Scene rankings and trait indices.
//!
//! For a detector and a transformation step, the repeatability ratios of all
//! scenes form a series. Sorting it by descending ratio gives the scene order
//! `S(1), ..., S(n)`; the top ranking holds `S(1..=j)` and the lowest ranking
//! holds `S(n), S(n-1), ..., S(n-j+1)`. Trait indices are the fractions of a
//! ranking's scenes labeled outdoor, human-made and simple.

mod labels;
mod series;
mod traits;

pub use labels::{parse_labels, parse_labels_str, require_labels, SceneLabels, LABELS_HEADER};
pub use series::{
    build_series, lowest_ranking, rankings_to_csv, top_ranking, Polarity, Ranking,
    RepeatabilitySeries, RANKINGS_HEADER,
};
pub use traits::{trait_indices, TraitIndices};
