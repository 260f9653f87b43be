//! Segmented phonetic forms and sound-class models.
//!
//! Forms arrive as whitespace-separated segment strings (the CLDF `Segments`
//! column). They are cleaned of morpheme boundaries and tone tokens, then
//! mapped onto a small inventory of sound classes for alignment.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use thiserror::Error;

/// Marker used for morpheme boundaries inside segment strings.
pub const MORPHEME_BOUNDARY: &str = "+";

/// Label of the class every unmatched segment falls into.
pub const UNKNOWN_CLASS_LABEL: &str = "0";

const DEFAULT_MODEL_NAME: &str = "sca-default";
const DEFAULT_MODEL_TABLE: &str = include_str!("../data/sound-classes.tsv");

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PhonosegError {
    #[error("form is empty after preprocessing: {raw:?}")]
    EmptyForm { raw: String },
    #[error("malformed sound-class model (line {line}): {reason}")]
    MalformedModel { line: usize, reason: String },
    #[error("cannot read sound-class model {path}: {reason}")]
    ModelIo { path: String, reason: String },
}

fn malformed(line: usize, reason: impl Into<String>) -> PhonosegError {
    PhonosegError::MalformedModel {
        line,
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PreprocessOptions {
    pub strip_morpheme_boundaries: bool,
    pub strip_tones: bool,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        Self {
            strip_morpheme_boundaries: true,
            strip_tones: true,
        }
    }
}

impl PreprocessOptions {
    /// Keep every token as it appears in the source.
    pub fn raw() -> Self {
        Self {
            strip_morpheme_boundaries: false,
            strip_tones: false,
        }
    }
}

/// A preprocessed sequence of segment tokens.
///
/// Equality and ordering only consider the tokens, never `source_id`.
#[derive(Debug, Clone)]
pub struct SegmentedForm {
    tokens: Vec<String>,
    source_id: String,
}

impl SegmentedForm {
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn with_source_id(mut self, id: impl Into<String>) -> Self {
        self.source_id = id.into();
        self
    }

    /// Tokens joined by single spaces.
    pub fn joined(&self) -> String {
        self.tokens.join(" ")
    }

    /// Builds a form from tokens without any preprocessing.
    ///
    /// Only the whitespace invariant is enforced: tokens are re-split on
    /// whitespace and empty tokens discarded. The result may be empty, which
    /// is what the edit-distance functions accept.
    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let tokens = tokens
            .into_iter()
            .flat_map(|t| {
                t.as_ref()
                    .split_whitespace()
                    .map(str::to_owned)
                    .collect::<Vec<_>>()
            })
            .collect();
        Self {
            tokens,
            source_id: String::new(),
        }
    }
}

impl PartialEq for SegmentedForm {
    fn eq(&self, other: &Self) -> bool {
        self.tokens == other.tokens
    }
}

impl Eq for SegmentedForm {}

impl fmt::Display for SegmentedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.joined())
    }
}

/// True iff every character is a Chao tone letter, a superscript digit
/// ¹ to ⁵, or an ASCII digit 1 to 5.
pub fn is_tone_token(token: &str) -> bool {
    !token.is_empty()
        && token.chars().all(|c| {
            matches!(
                c,
                '˥' | '˦' | '˧' | '˨' | '˩' | '¹' | '²' | '³' | '⁴' | '⁵' | '1'..='5'
            )
        })
}

/// Splits a segment string on whitespace and drops boundary and tone tokens
/// as requested.
pub fn parse_form(raw: &str, opts: PreprocessOptions) -> Result<SegmentedForm, PhonosegError> {
    let tokens: Vec<String> = raw
        .split_whitespace()
        .filter(|t| !(opts.strip_morpheme_boundaries && *t == MORPHEME_BOUNDARY))
        .filter(|t| !(opts.strip_tones && is_tone_token(t)))
        .map(str::to_owned)
        .collect();
    if tokens.is_empty() {
        return Err(PhonosegError::EmptyForm {
            raw: raw.to_owned(),
        });
    }
    Ok(SegmentedForm {
        tokens,
        source_id: String::new(),
    })
}

/// Index of a class within a [`SoundClassModel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SoundClass(u16);

impl SoundClass {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// The sound classes of a form, one per segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassSequence(Vec<SoundClass>);

impl ClassSequence {
    pub fn new(classes: Vec<SoundClass>) -> Self {
        Self(classes)
    }

    pub fn as_slice(&self) -> &[SoundClass] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Segment-to-class mapping with a symmetric class scoring table and a
/// linear gap penalty.
#[derive(Debug, Clone)]
pub struct SoundClassModel {
    name: String,
    class_of: HashMap<String, SoundClass>,
    longest_prefix_chars: usize,
    labels: Vec<String>,
    // (labels.len() + 1)^2 entries; the extra row/column is the unknown class.
    scores: Vec<f64>,
    gap_penalty: f64,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Preamble,
    Classes,
    Scores,
    Gap,
}

impl SoundClassModel {
    /// The packaged default model.
    pub fn default_model() -> Self {
        Self::parse(DEFAULT_MODEL_NAME, DEFAULT_MODEL_TABLE)
            .expect("packaged sound-class table is valid")
    }

    /// Reads a model file; the model is named after the file stem.
    pub fn from_path(path: &Path) -> Result<Self, PhonosegError> {
        let text = std::fs::read_to_string(path).map_err(|e| PhonosegError::ModelIo {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "custom".to_owned());
        Self::parse(&name, &text)
    }

    /// Parses the three-section tab-separated model format.
    ///
    /// ```text
    /// #classes
    /// t<TAB>T
    /// #scores
    /// T<TAB>T<TAB>4
    /// *<TAB>*<TAB>-2
    /// #gap
    /// -2
    /// ```
    ///
    /// A `*<TAB>*` row supplies the score of every pair of distinct classes
    /// not listed explicitly.
    pub fn parse(name: &str, table: &str) -> Result<Self, PhonosegError> {
        let mut section = Section::Preamble;
        let mut labels: Vec<String> = Vec::new();
        let mut label_index: HashMap<String, SoundClass> = HashMap::new();
        let mut class_of: HashMap<String, SoundClass> = HashMap::new();
        let mut explicit: HashMap<(SoundClass, SoundClass), (f64, usize)> = HashMap::new();
        let mut score_rows: Vec<(usize, String, String, f64)> = Vec::new();
        let mut fallback: Option<f64> = None;
        let mut gap: Option<f64> = None;

        for (idx, line) in table.lines().enumerate() {
            let lineno = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            match trimmed {
                "#classes" => {
                    section = Section::Classes;
                    continue;
                }
                "#scores" => {
                    section = Section::Scores;
                    continue;
                }
                "#gap" => {
                    section = Section::Gap;
                    continue;
                }
                _ if trimmed.starts_with('#') => continue,
                _ => {}
            }
            let fields: Vec<&str> = trimmed.split('\t').map(str::trim).collect();
            match section {
                Section::Preamble => {
                    return Err(malformed(lineno, "row outside of any section"));
                }
                Section::Classes => {
                    let [prefix, label] = fields[..] else {
                        return Err(malformed(lineno, "expected `segment<TAB>class`"));
                    };
                    if prefix.is_empty() || label.is_empty() {
                        return Err(malformed(lineno, "empty segment or class"));
                    }
                    if label == UNKNOWN_CLASS_LABEL {
                        return Err(malformed(lineno, "class label `0` is reserved"));
                    }
                    if label == "*" {
                        return Err(malformed(lineno, "class label `*` is reserved"));
                    }
                    if is_tone_token(prefix) {
                        return Err(malformed(lineno, format!("{prefix:?} is a tone token")));
                    }
                    let class = match label_index.get(label) {
                        Some(c) => *c,
                        None => {
                            let c = SoundClass(labels.len() as u16);
                            labels.push(label.to_owned());
                            label_index.insert(label.to_owned(), c);
                            c
                        }
                    };
                    if class_of.insert(prefix.to_owned(), class).is_some() {
                        return Err(malformed(lineno, format!("duplicate prefix {prefix:?}")));
                    }
                }
                Section::Scores => {
                    let [x, y, value] = fields[..] else {
                        return Err(malformed(lineno, "expected `class<TAB>class<TAB>score`"));
                    };
                    let value: f64 = value
                        .parse()
                        .ok()
                        .filter(|v: &f64| v.is_finite())
                        .ok_or_else(|| malformed(lineno, format!("bad score {value:?}")))?;
                    score_rows.push((lineno, x.to_owned(), y.to_owned(), value));
                }
                Section::Gap => {
                    let [value] = fields[..] else {
                        return Err(malformed(lineno, "expected a single gap penalty"));
                    };
                    if gap.is_some() {
                        return Err(malformed(lineno, "gap penalty given twice"));
                    }
                    let value: f64 = value
                        .parse()
                        .ok()
                        .filter(|v: &f64| v.is_finite())
                        .ok_or_else(|| malformed(lineno, format!("bad gap penalty {value:?}")))?;
                    if value >= 0.0 {
                        return Err(malformed(lineno, "gap penalty must be negative"));
                    }
                    gap = Some(value);
                }
            }
        }

        if labels.is_empty() {
            return Err(malformed(0, "no sound classes defined"));
        }
        let gap_penalty = gap.ok_or_else(|| malformed(0, "missing gap penalty"))?;

        for (lineno, x, y, value) in score_rows {
            if x == "*" && y == "*" {
                if fallback.replace(value).is_some() {
                    return Err(malformed(lineno, "default score given twice"));
                }
                continue;
            }
            let lookup = |l: &str| {
                label_index
                    .get(l)
                    .copied()
                    .ok_or_else(|| malformed(lineno, format!("unknown class {l:?}")))
            };
            let (cx, cy) = (lookup(&x)?, lookup(&y)?);
            for key in [(cx, cy), (cy, cx)] {
                if let Some((previous, at)) = explicit.get(&key) {
                    if *previous != value {
                        return Err(malformed(
                            lineno,
                            format!(
                                "asymmetric score for {x}/{y}: {previous} (line {at}) vs {value}"
                            ),
                        ));
                    }
                }
            }
            explicit.insert((cx, cy), (value, lineno));
            explicit.insert((cy, cx), (value, lineno));
        }

        let n = labels.len();
        let width = n + 1;
        let mut scores = vec![0.0; width * width];
        for i in 0..n {
            for j in 0..n {
                let key = (SoundClass(i as u16), SoundClass(j as u16));
                let value = match explicit.get(&key) {
                    Some((v, _)) => *v,
                    None if i != j => fallback.ok_or_else(|| {
                        malformed(0, format!("no score for {}/{}", labels[i], labels[j]))
                    })?,
                    None => return Err(malformed(0, format!("no self-score for {}", labels[i]))),
                };
                if i == j && value <= 0.0 {
                    return Err(malformed(
                        0,
                        format!("self-score of {} must be positive", labels[i]),
                    ));
                }
                scores[i * width + j] = value;
            }
        }

        let longest_prefix_chars = class_of
            .keys()
            .map(|k| k.chars().count())
            .max()
            .unwrap_or(0);
        Ok(Self {
            name: name.to_owned(),
            class_of,
            longest_prefix_chars,
            labels,
            scores,
            gap_penalty,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn gap_penalty(&self) -> f64 {
        self.gap_penalty
    }

    /// Number of known classes (the unknown class is not counted).
    pub fn class_count(&self) -> usize {
        self.labels.len()
    }

    pub fn unknown_class(&self) -> SoundClass {
        SoundClass(self.labels.len() as u16)
    }

    /// All known classes in table order.
    pub fn classes(&self) -> impl Iterator<Item = SoundClass> + '_ {
        (0..self.labels.len()).map(|i| SoundClass(i as u16))
    }

    pub fn label(&self, class: SoundClass) -> &str {
        self.labels
            .get(class.index())
            .map(String::as_str)
            .unwrap_or(UNKNOWN_CLASS_LABEL)
    }

    pub fn class_by_label(&self, label: &str) -> Option<SoundClass> {
        if label == UNKNOWN_CLASS_LABEL {
            return Some(self.unknown_class());
        }
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| SoundClass(i as u16))
    }

    /// Segment prefixes known to the model, sorted.
    pub fn prefixes(&self) -> BTreeSet<&str> {
        self.class_of.keys().map(String::as_str).collect()
    }

    #[inline]
    pub fn score(&self, x: SoundClass, y: SoundClass) -> f64 {
        self.scores[x.index() * (self.labels.len() + 1) + y.index()]
    }

    /// Class of a single segment by longest matching prefix.
    pub fn class_of_token(&self, token: &str) -> SoundClass {
        let boundaries: Vec<usize> = token
            .char_indices()
            .map(|(i, _)| i)
            .skip(1)
            .chain(std::iter::once(token.len()))
            .take(self.longest_prefix_chars)
            .collect();
        boundaries
            .iter()
            .rev()
            .find_map(|&end| self.class_of.get(&token[..end]).copied())
            .unwrap_or_else(|| self.unknown_class())
    }

    pub fn to_classes(&self, form: &SegmentedForm) -> ClassSequence {
        ClassSequence(
            form.tokens()
                .iter()
                .map(|t| self.class_of_token(t))
                .collect(),
        )
    }
}

/// Maps every segment of `form` onto its sound class.
pub fn to_classes(form: &SegmentedForm, model: &SoundClassModel) -> ClassSequence {
    model.to_classes(form)
}
