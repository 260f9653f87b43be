use std::fmt::Write as _;

use super::study::PairingMode;
use super::{GroupSummary, PairResult};
use crate::phonoseg::PreprocessOptions;

pub const GROUP_COLUMNS: [&str; 12] = [
    "Group",
    "Pairs",
    "Identical",
    "STD",
    "Similar",
    "STD",
    "SCA",
    "STD",
    "NED",
    "STD",
    "ED",
    "STD",
];

pub const PAIR_COLUMNS: [&str; 10] = [
    "Group",
    "Variety_A",
    "Variety_B",
    "Origin",
    "Concepts",
    "Identical",
    "Similar",
    "SCA",
    "NED",
    "ED",
];

/// Fixed two-decimal rendering; never prints a negative zero.
pub fn format_value(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".to_owned()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupMeta {
    pub name: String,
    pub dataset_a: String,
    pub dataset_b: String,
    pub options_a: PreprocessOptions,
    pub options_b: PreprocessOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetadata {
    pub threshold: f64,
    pub model: String,
    pub mode: PairingMode,
    pub groups: Vec<GroupMeta>,
}

fn flags(o: &PreprocessOptions) -> String {
    format!(
        "strip_morpheme_boundaries={} strip_tones={}",
        o.strip_morpheme_boundaries, o.strip_tones
    )
}

impl RunMetadata {
    fn lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("threshold: {}", self.threshold),
            format!("model: {}", self.model),
            format!("mode: {}", self.mode),
            "std: population".to_owned(),
            "total: pooled over all pairs".to_owned(),
        ];
        for g in &self.groups {
            lines.push(format!(
                "group {}: a={} ({}) b={} ({})",
                g.name,
                g.dataset_a,
                flags(&g.options_a),
                g.dataset_b,
                flags(&g.options_b)
            ));
        }
        lines
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub metadata: RunMetadata,
    /// (group name, result), in config group order then pairing order.
    pub pairs: Vec<(String, PairResult)>,
    pub groups: Vec<GroupSummary>,
    pub total: GroupSummary,
    pub log: Vec<String>,
}

fn group_cells(g: &GroupSummary) -> Vec<String> {
    let mut cells = vec![g.group.clone(), g.n_pairs.to_string()];
    for m in g.metrics() {
        cells.push(format_value(m.mean));
        cells.push(format_value(m.std));
    }
    cells
}

fn pair_cells(group: &str, r: &PairResult) -> Vec<String> {
    let mut cells = vec![
        group.to_owned(),
        r.pair.a.clone(),
        r.pair.b.clone(),
        r.pair.origin.to_string(),
        r.n_concepts.to_string(),
    ];
    cells.extend(r.scores.as_array().map(format_value));
    cells
}

fn tsv(comments: &[String], header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "{}", header.join("\t"));
    for r in rows {
        let _ = writeln!(out, "{}", r.join("\t"));
    }
    out
}

fn markdown(
    comments: &[String],
    header: &[&str],
    rows: &[Vec<String>],
    numeric_from: usize,
) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "- {c}");
    }
    if !comments.is_empty() {
        out.push('\n');
    }
    let _ = writeln!(out, "| {} |", header.join(" | "));
    let align: Vec<&str> = (0..header.len())
        .map(|i| if i >= numeric_from { "---:" } else { "---" })
        .collect();
    let _ = writeln!(out, "|{}|", align.join("|"));
    for r in rows {
        let _ = writeln!(out, "| {} |", r.join(" | "));
    }
    out
}

impl Report {
    fn group_rows(&self) -> Vec<Vec<String>> {
        self.groups
            .iter()
            .chain([&self.total])
            .map(group_cells)
            .collect()
    }

    fn pair_rows(&self) -> Vec<Vec<String>> {
        self.pairs.iter().map(|(g, r)| pair_cells(g, r)).collect()
    }

    fn pair_comments(&self) -> Vec<String> {
        let mut c = self.metadata.lines();
        c.extend(self.log.iter().map(|l| format!("log: {l}")));
        c
    }

    /// Per-family table with a trailing TOTAL row.
    pub fn groups_tsv(&self) -> String {
        tsv(&self.metadata.lines(), &GROUP_COLUMNS, &self.group_rows())
    }

    pub fn pairs_tsv(&self) -> String {
        tsv(&self.pair_comments(), &PAIR_COLUMNS, &self.pair_rows())
    }

    pub fn groups_markdown(&self) -> String {
        markdown(
            &self.metadata.lines(),
            &GROUP_COLUMNS,
            &self.group_rows(),
            1,
        )
    }

    pub fn pairs_markdown(&self) -> String {
        markdown(&self.pair_comments(), &PAIR_COLUMNS, &self.pair_rows(), 4)
    }

    /// Header and TOTAL row, tab-separated.
    pub fn total_tsv(&self) -> String {
        tsv(&[], &GROUP_COLUMNS, &[group_cells(&self.total)])
    }
}
