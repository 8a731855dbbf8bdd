//! Trait-index tables, rankings and charts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use detbias_core::rank::{
    build_series, lowest_ranking, rankings_to_csv, require_labels, top_ranking, trait_indices,
};
use detbias_core::repeat::RepeatabilityRecord;
use detbias_core::{DetectorId, Ranking, Result, SceneLabels, TraitIndices, TransformKind};

use crate::config::RunConfig;
use crate::layout::{csv_string, write_if_changed};

/// Trait indices of one detector at one selected amount.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub detector: DetectorId,
    pub kind: TransformKind,
    pub step: usize,
    pub amount: String,
    pub top: TraitIndices,
    pub lowest: TraitIndices,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub j: usize,
    pub detectors: Vec<DetectorId>,
    pub rows: Vec<Row>,
    /// Top and lowest rankings of every transformed step.
    pub rankings: Vec<Ranking>,
}

/// Checks label coverage first, then ranks every transformed step of every
/// selected detector.
pub fn build(
    cfg: &RunConfig,
    records: &[RepeatabilityRecord],
    labels: &BTreeMap<u32, SceneLabels>,
) -> Result<Report> {
    let scenes: BTreeSet<u32> = records.iter().map(|r| r.scene).collect();
    require_labels(labels, scenes)?;
    let selected = cfg.selected_steps()?;
    let mut rows = Vec::new();
    let mut rankings = Vec::new();
    for detector in &cfg.detectors {
        for kind in TransformKind::ALL {
            for k in 2..=cfg.schedules.get(kind).len() {
                let series = build_series(records, detector, kind, k)?;
                let top = top_ranking(&series, cfg.j)?;
                let lowest = lowest_ranking(&series, cfg.j)?;
                for (_, _, amount) in selected.iter().filter(|s| s.0 == kind && s.1 == k) {
                    rows.push(Row {
                        detector: detector.clone(),
                        kind,
                        step: k,
                        amount: amount.clone(),
                        top: trait_indices(&top, labels)?,
                        lowest: trait_indices(&lowest, labels)?,
                    });
                }
                rankings.push(top);
                rankings.push(lowest);
            }
        }
    }
    // selection order within each detector and kind
    let order: Vec<(TransformKind, usize)> = selected.iter().map(|s| (s.0, s.1)).collect();
    rows.sort_by_key(|r| {
        let d = cfg.detectors.iter().position(|d| *d == r.detector);
        let s = order.iter().position(|&o| o == (r.kind, r.step));
        let kind = TransformKind::ALL.iter().position(|&k| k == r.kind);
        (kind, d, s)
    });
    Ok(Report {
        j: cfg.j,
        detectors: cfg.detectors.clone(),
        rows,
        rankings,
    })
}

/// `100 * count / j` as an integer when exact, else with two decimals.
pub fn percent(count: usize, j: usize) -> String {
    if (100 * count).is_multiple_of(j) {
        (100 * count / j).to_string()
    } else {
        format!("{:.2}", 100.0 * count as f64 / j as f64)
    }
}

fn cells(t: &TraitIndices) -> [String; 3] {
    [t.outdoor, t.human_made, t.simple].map(|c| percent(c, t.j))
}

fn kind_title(kind: TransformKind) -> &'static str {
    match kind {
        TransformKind::Blur => "Gaussian blur",
        TransformKind::Light => "uniform light reduction",
    }
}

fn amount_label(kind: TransformKind, amount: &str) -> String {
    match kind {
        TransformKind::Blur => format!("sigma {amount}"),
        TransformKind::Light => format!("light -{amount}"),
    }
}

impl Report {
    fn rows_of(&self, kind: TransformKind) -> Vec<&Row> {
        self.rows.iter().filter(|r| r.kind == kind).collect()
    }

    /// Amount labels of `kind` in column order.
    fn amounts(&self, kind: TransformKind) -> Vec<(usize, String)> {
        let mut v: Vec<(usize, String)> = Vec::new();
        for r in self.rows_of(kind) {
            if !v.iter().any(|(k, _)| *k == r.step) {
                v.push((r.step, r.amount.clone()));
            }
        }
        v
    }

    pub fn traits_csv(&self) -> String {
        let rows: Vec<[String; 10]> = self
            .rows
            .iter()
            .map(|r| {
                let [tf, tg, th] = cells(&r.top);
                let [lf, lg, lh] = cells(&r.lowest);
                [
                    r.detector.to_string(),
                    r.kind.to_string(),
                    r.step.to_string(),
                    r.amount.clone(),
                    tf,
                    tg,
                    th,
                    lf,
                    lg,
                    lh,
                ]
            })
            .collect();
        csv_string(
            [
                "detector", "kind", "step", "amount", "top_f", "top_g", "top_h", "lowest_f",
                "lowest_g", "lowest_h",
            ],
            &rows,
        )
    }

    /// Detector rows by amount columns, each split into top and lowest
    /// `F G H` triples.
    pub fn text_table(&self, kind: TransformKind) -> String {
        let amounts = self.amounts(kind);
        let rows = self.rows_of(kind);
        let cell_w = rows
            .iter()
            .flat_map(|r| cells(&r.top).into_iter().chain(cells(&r.lowest)))
            .map(|c| c.len())
            .max()
            .unwrap_or(0)
            .max(3);
        let name_w = self
            .detectors
            .iter()
            .map(|d| d.to_string().len())
            .max()
            .unwrap_or(0)
            .max(8);
        let half_w = 3 * (cell_w + 1) + 1;
        let group_w = 2 * half_w + 1;

        let mut s = String::new();
        let _ = writeln!(
            s,
            "Trait indices (%) for {}, j = {}",
            kind_title(kind),
            self.j
        );
        let _ = writeln!(s);
        let _ = write!(s, "{:name_w$} |", "");
        for (_, a) in &amounts {
            let _ = write!(s, "{:^group_w$}|", amount_label(kind, a));
        }
        let _ = writeln!(s);
        let _ = write!(s, "{:name_w$} |", "");
        for _ in &amounts {
            let _ = write!(s, "{:^half_w$}|{:^half_w$}|", "Top", "Lowest");
        }
        let _ = writeln!(s);
        let _ = write!(s, "{:name_w$} |", "Detector");
        for _ in &amounts {
            for _ in 0..2 {
                for h in ["F", "G", "H"] {
                    let _ = write!(s, " {h:>cell_w$}");
                }
                let _ = write!(s, " |");
            }
        }
        let _ = writeln!(s);
        let _ = write!(s, "{}+", "-".repeat(name_w + 1));
        for _ in &amounts {
            let _ = write!(s, "{}+{}+", "-".repeat(half_w), "-".repeat(half_w));
        }
        let _ = writeln!(s);
        for d in &self.detectors {
            let _ = write!(s, "{:name_w$} |", d.to_string());
            for (k, _) in &amounts {
                let row = rows.iter().find(|r| r.detector == *d && r.step == *k);
                for t in [row.map(|r| &r.top), row.map(|r| &r.lowest)] {
                    let vals = t
                        .map(cells)
                        .unwrap_or_else(|| ["-".into(), "-".into(), "-".into()]);
                    for v in vals {
                        let _ = write!(s, " {v:>cell_w$}");
                    }
                    let _ = write!(s, " |");
                }
            }
            let _ = writeln!(s);
        }
        s
    }

    /// Grouped bar chart: one group per detector and amount, six bars per
    /// group (top F, G, H then lowest F, G, H).
    pub fn svg_chart(&self, kind: TransformKind) -> String {
        const BAR: f64 = 9.0;
        const GAP: f64 = 18.0;
        const PLOT_H: f64 = 220.0;
        const LEFT: f64 = 50.0;
        const TOP: f64 = 60.0;
        const COLORS: [&str; 6] = [
            "#1f77b4", "#2ca02c", "#d62728", "#aec7e8", "#98df8a", "#ff9896",
        ];
        const NAMES: [&str; 6] = [
            "Top F", "Top G", "Top H", "Lowest F", "Lowest G", "Lowest H",
        ];

        let amounts = self.amounts(kind);
        let rows = self.rows_of(kind);
        let groups: Vec<(&DetectorId, &(usize, String))> = self
            .detectors
            .iter()
            .flat_map(|d| amounts.iter().map(move |a| (d, a)))
            .collect();
        let group_w = 6.0 * BAR + GAP;
        let width = (LEFT + groups.len() as f64 * group_w + 20.0).max(560.0);
        let height = TOP + PLOT_H + 70.0;
        let y_of = |pct: f64| TOP + PLOT_H * (1.0 - pct / 100.0);

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{LEFT:.1}" y="20" font-size="14">Trait indices (%) for {}, j = {}</text>"#,
            kind_title(kind),
            self.j
        );
        for (i, (name, color)) in NAMES.iter().zip(COLORS).enumerate() {
            let x = LEFT + i as f64 * 80.0;
            let _ = writeln!(
                s,
                r#"<rect x="{x:.1}" y="32" width="10" height="10" fill="{color}"/>"#
            );
            let _ = writeln!(s, r#"<text x="{:.1}" y="41">{name}</text>"#, x + 14.0);
        }
        for tick in (0..=100).step_by(25) {
            let y = y_of(f64::from(tick));
            let _ = writeln!(
                s,
                r##"<line x1="{LEFT:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#dddddd"/>"##,
                width - 10.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{tick}</text>"#,
                LEFT - 6.0,
                y + 4.0
            );
        }
        for (g, (d, (k, amount))) in groups.iter().enumerate() {
            let x0 = LEFT + GAP / 2.0 + g as f64 * group_w;
            if let Some(row) = rows.iter().find(|r| r.detector == **d && r.step == *k) {
                let values = [&row.top, &row.lowest].into_iter().flat_map(|t| {
                    [t.outdoor, t.human_made, t.simple].map(|c| 100.0 * c as f64 / t.j as f64)
                });
                for (i, (v, color)) in values.zip(COLORS).enumerate() {
                    let x = x0 + i as f64 * BAR;
                    let y = y_of(v);
                    let _ = writeln!(
                        s,
                        r#"<rect x="{x:.1}" y="{y:.1}" width="{:.1}" height="{:.1}" fill="{color}"><title>{d} {} {}: {v:.1}%</title></rect>"#,
                        BAR - 1.0,
                        TOP + PLOT_H - y,
                        amount_label(kind, amount),
                        NAMES[i]
                    );
                }
            }
            let cx = x0 + 3.0 * BAR;
            let _ = writeln!(
                s,
                r#"<text x="{cx:.1}" y="{:.1}" text-anchor="middle">{d}</text>"#,
                TOP + PLOT_H + 16.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{cx:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
                TOP + PLOT_H + 30.0,
                amount_label(kind, amount)
            );
        }
        let _ = writeln!(
            s,
            r#"<line x1="{LEFT:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black"/>"#,
            TOP + PLOT_H,
            width - 10.0,
            TOP + PLOT_H
        );
        let _ = writeln!(s, "</svg>");
        s
    }

    /// Writes `traits.csv`, `rankings.csv` and, for each kind with selected
    /// amounts, `table_<kind>.txt` and `chart_<kind>.svg`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        write_if_changed(&dir.join("traits.csv"), self.traits_csv().as_bytes())?;
        write_if_changed(
            &dir.join("rankings.csv"),
            rankings_to_csv(&self.rankings).as_bytes(),
        )?;
        for kind in TransformKind::ALL {
            if self.rows_of(kind).is_empty() {
                continue;
            }
            write_if_changed(
                &dir.join(format!("table_{kind}.txt")),
                self.text_table(kind).as_bytes(),
            )?;
            write_if_changed(
                &dir.join(format!("chart_{kind}.svg")),
                self.svg_chart(kind).as_bytes(),
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentages_are_exact_multiples() {
        assert_eq!(percent(17, 20), "85");
        assert_eq!(percent(0, 20), "0");
        assert_eq!(percent(20, 20), "100");
        assert_eq!(percent(1, 3), "33.33");
        for c in 0..=20 {
            let v: f64 = percent(c, 20).parse().unwrap();
            assert_eq!(v % 5.0, 0.0);
        }
    }
}
