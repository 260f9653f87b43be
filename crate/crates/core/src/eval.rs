//! Scoring threshold decisions against human same/different annotations.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::metrics::PairCategory;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{}:{line}: {reason}", .file.display())]
    MalformedRow {
        file: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("{}:{line}: duplicate record for forms {form_a}/{form_b}", .file.display())]
    DuplicateRecord {
        file: PathBuf,
        line: usize,
        form_a: String,
        form_b: String,
    },
    #[error("{}:{line}: unknown label {label:?} (expected same or different)", .file.display())]
    UnknownLabel {
        file: PathBuf,
        line: usize,
        label: String,
    },
    #[error("{} contains no records", .0.display())]
    EmptyGold(PathBuf),
    #[error("no prediction for forms {form_a}/{form_b} ({language})")]
    MissingPrediction {
        language: String,
        form_a: String,
        form_b: String,
    },
    #[error("cannot read {}: {source}", .path.display())]
    Io { path: PathBuf, source: io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GoldLabel {
    Same,
    Different,
}

impl FromStr for GoldLabel {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s.trim().to_ascii_lowercase().as_str() {
            "same" => Ok(GoldLabel::Same),
            "different" => Ok(GoldLabel::Different),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldRecord {
    pub language_pair_id: String,
    pub concept_id: String,
    pub form_a: String,
    pub form_b: String,
    pub label: GoldLabel,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GoldAnnotations {
    pub records: Vec<GoldRecord>,
}

impl GoldAnnotations {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records grouped by language pair, sorted by pair id.
    pub fn by_language(&self) -> BTreeMap<&str, Vec<&GoldRecord>> {
        let mut groups: BTreeMap<&str, Vec<&GoldRecord>> = BTreeMap::new();
        for r in &self.records {
            groups.entry(&r.language_pair_id).or_default().push(r);
        }
        groups
    }
}

pub const GOLD_HEADER: [&str; 5] = [
    "language_pair_id",
    "concept_id",
    "form_a_id",
    "form_b_id",
    "label",
];
pub const PREDICTION_HEADER: [&str; 6] = [
    "language_pair_id",
    "concept_id",
    "form_a_id",
    "form_b_id",
    "category",
    "sca",
];

// Non-comment, non-blank lines with their 1-based line numbers; a leading
// header row is skipped when it matches `header`.
fn data_rows<'a>(text: &'a str, header: &[&str]) -> Vec<(usize, Vec<&'a str>)> {
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').map(str::trim).collect();
        if rows.is_empty() && header.starts_with(&fields) && fields.len() >= 5 {
            continue;
        }
        rows.push((idx + 1, fields));
    }
    rows
}

fn read(path: &Path) -> Result<String, EvalError> {
    std::fs::read_to_string(path).map_err(|source| EvalError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn load_gold(path: &Path) -> Result<GoldAnnotations, EvalError> {
    parse_gold(&read(path)?, path)
}

/// Parses the tab-separated gold format:
/// `language_pair_id, concept_id, form_a_id, form_b_id, label`.
pub fn parse_gold(text: &str, path: &Path) -> Result<GoldAnnotations, EvalError> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (line, fields) in data_rows(text, &GOLD_HEADER) {
        let [language, concept, form_a, form_b, label] = fields[..] else {
            return Err(EvalError::MalformedRow {
                file: path.to_owned(),
                line,
                reason: format!("expected 5 tab-separated columns, found {}", fields.len()),
            });
        };
        if [language, concept, form_a, form_b]
            .iter()
            .any(|f| f.is_empty())
        {
            return Err(EvalError::MalformedRow {
                file: path.to_owned(),
                line,
                reason: "empty field".into(),
            });
        }
        let label = label
            .parse::<GoldLabel>()
            .map_err(|_| EvalError::UnknownLabel {
                file: path.to_owned(),
                line,
                label: label.to_owned(),
            })?;
        let key = unordered(form_a, form_b);
        if !seen.insert(key) {
            return Err(EvalError::DuplicateRecord {
                file: path.to_owned(),
                line,
                form_a: form_a.to_owned(),
                form_b: form_b.to_owned(),
            });
        }
        records.push(GoldRecord {
            language_pair_id: language.to_owned(),
            concept_id: concept.to_owned(),
            form_a: form_a.to_owned(),
            form_b: form_b.to_owned(),
            label,
        });
    }
    if records.is_empty() {
        return Err(EvalError::EmptyGold(path.to_owned()));
    }
    Ok(GoldAnnotations { records })
}

fn unordered(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_owned(), b.to_owned())
    } else {
        (b.to_owned(), a.to_owned())
    }
}

/// One classified form pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub language_pair_id: String,
    pub concept_id: String,
    pub form_a: String,
    pub form_b: String,
    pub category: PairCategory,
    pub sca: Option<f64>,
}

/// Predictions indexed by (form_a, form_b).
#[derive(Debug, Clone, Default)]
pub struct PredictionSet {
    by_forms: HashMap<(String, String), PairCategory>,
}

impl PredictionSet {
    pub fn len(&self) -> usize {
        self.by_forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_forms.is_empty()
    }

    pub fn insert(&mut self, form_a: &str, form_b: &str, category: PairCategory) {
        self.by_forms
            .insert((form_a.to_owned(), form_b.to_owned()), category);
    }

    /// Looks the pair up in either orientation.
    pub fn get(&self, form_a: &str, form_b: &str) -> Option<PairCategory> {
        self.by_forms
            .get(&(form_a.to_owned(), form_b.to_owned()))
            .or_else(|| self.by_forms.get(&(form_b.to_owned(), form_a.to_owned())))
            .copied()
    }
}

impl<'a> FromIterator<&'a Prediction> for PredictionSet {
    fn from_iter<I: IntoIterator<Item = &'a Prediction>>(iter: I) -> Self {
        let mut set = PredictionSet::default();
        for p in iter {
            set.insert(&p.form_a, &p.form_b, p.category);
        }
        set
    }
}

pub fn load_predictions(path: &Path) -> Result<Vec<Prediction>, EvalError> {
    parse_predictions(&read(path)?, path)
}

/// Parses prediction rows (`category` may be followed by an `sca` column).
pub fn parse_predictions(text: &str, path: &Path) -> Result<Vec<Prediction>, EvalError> {
    let mut out = Vec::new();
    for (line, fields) in data_rows(text, &PREDICTION_HEADER) {
        let malformed = |reason: String| EvalError::MalformedRow {
            file: path.to_owned(),
            line,
            reason,
        };
        let (language, concept, form_a, form_b, category, sca) = match fields[..] {
            [l, c, a, b, cat] => (l, c, a, b, cat, None),
            [l, c, a, b, cat, s] => (l, c, a, b, cat, Some(s)),
            _ => {
                return Err(malformed(format!(
                    "expected 5 or 6 tab-separated columns, found {}",
                    fields.len()
                )))
            }
        };
        let category = category.parse::<PairCategory>().map_err(malformed)?;
        let sca = sca
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| malformed(format!("bad sca {s:?}: {e}")))
            })
            .transpose()?;
        out.push(Prediction {
            language_pair_id: language.to_owned(),
            concept_id: concept.to_owned(),
            form_a: form_a.to_owned(),
            form_b: form_b.to_owned(),
            category,
            sca,
        });
    }
    Ok(out)
}

pub fn write_predictions(predictions: &[Prediction]) -> String {
    let mut out = PREDICTION_HEADER.join("\t");
    out.push('\n');
    for p in predictions {
        let sca = p.sca.map(|s| format!("{s:.4}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            p.language_pair_id, p.concept_id, p.form_a, p.form_b, p.category, sca
        );
    }
    out
}

/// Which gold label counts as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PositiveClass {
    /// The two forms are the same word (predicted Identical or Similar).
    #[default]
    Same,
    Different,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl Confusion {
    pub fn add(&mut self, gold_positive: bool, predicted_positive: bool) {
        match (gold_positive, predicted_positive) {
            (true, true) => self.tp += 1,
            (false, true) => self.fp += 1,
            (true, false) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }

    pub fn merge(&mut self, other: &Confusion) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
        self.tn += other.tn;
    }

    /// `None` when no pair was predicted positive.
    pub fn precision(&self) -> Option<f64> {
        ratio(self.tp, self.tp + self.fp)
    }

    /// `None` when the gold set has no positive pair.
    pub fn recall(&self) -> Option<f64> {
        ratio(self.tp, self.tp + self.fn_)
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn f_score(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub language: String,
    pub counts: Confusion,
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
    /// Set when precision or recall had an empty denominator (reported as 0).
    pub undefined: bool,
}

impl EvalRow {
    pub fn from_counts(language: impl Into<String>, counts: Confusion) -> Self {
        let (p, r) = (counts.precision(), counts.recall());
        let precision = p.unwrap_or(0.0);
        let recall = r.unwrap_or(0.0);
        Self {
            language: language.into(),
            counts,
            precision,
            recall,
            f_score: f_score(precision, recall),
            undefined: p.is_none() || r.is_none(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub rows: Vec<EvalRow>,
    pub total: EvalRow,
}

impl EvalResult {
    /// `Language, Precision, Recall, F-Score` rows plus a TOTAL row.
    pub fn to_tsv(&self, decimals: usize) -> String {
        let mut out = String::from("Language\tPrecision\tRecall\tF-Score\n");
        for row in self.rows.iter().chain([&self.total]) {
            let flag = if row.undefined { "\t*" } else { "" };
            let _ = writeln!(
                out,
                "{}\t{:.d$}\t{:.d$}\t{:.d$}{flag}",
                row.language,
                row.precision,
                row.recall,
                row.f_score,
                d = decimals
            );
        }
        out
    }
}

/// Confusion counts per language pair over all gold records, plus a TOTAL
/// row over the pooled counts.
pub fn evaluate_predictions(
    predictions: &PredictionSet,
    gold: &GoldAnnotations,
    positive: PositiveClass,
) -> Result<EvalResult, EvalError> {
    let mut rows = Vec::new();
    let mut pooled = Confusion::default();
    for (language, records) in gold.by_language() {
        let mut counts = Confusion::default();
        for r in records {
            let category = predictions.get(&r.form_a, &r.form_b).ok_or_else(|| {
                EvalError::MissingPrediction {
                    language: language.to_owned(),
                    form_a: r.form_a.clone(),
                    form_b: r.form_b.clone(),
                }
            })?;
            let (gold_pos, pred_pos) = match positive {
                PositiveClass::Same => (r.label == GoldLabel::Same, category.is_same()),
                PositiveClass::Different => (r.label == GoldLabel::Different, !category.is_same()),
            };
            counts.add(gold_pos, pred_pos);
        }
        pooled.merge(&counts);
        rows.push(EvalRow::from_counts(language, counts));
    }
    Ok(EvalResult {
        rows,
        total: EvalRow::from_counts("TOTAL", pooled),
    })
}
