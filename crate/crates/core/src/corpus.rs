//! CLDF-shaped wordlists: loading, synonymy and variety pairing.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::phonoseg::{parse_form, PreprocessOptions, SegmentedForm};

pub const FORMS_FILE: &str = "forms.csv";
pub const LANGUAGES_FILE: &str = "languages.csv";
pub const PARAMETERS_FILE: &str = "parameters.csv";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("missing file {}", .0.display())]
    MissingFile(PathBuf),
    #[error("{}:{line}: {reason}", .file.display())]
    MalformedRow {
        file: PathBuf,
        line: u64,
        reason: String,
    },
    #[error("{}: duplicate id {id:?}", .file.display())]
    DuplicateId { file: PathBuf, id: String },
    #[error("dataset {0} has no forms")]
    EmptyDataset(String),
    #[error("{}:{line}: unknown variety {id:?}", .file.display())]
    UnknownVariety {
        file: PathBuf,
        line: u64,
        id: String,
    },
    #[error("cannot read {}: {source}", .path.display())]
    Io { path: PathBuf, source: io::Error },
}

fn io_error(path: &Path) -> impl FnOnce(io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io {
        path: path.to_owned(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variety {
    pub id: String,
    pub name: String,
    pub glottocode: Option<String>,
    pub latitude: Option<f64>,
    pub longitude: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormEntry {
    pub id: String,
    pub variety_id: String,
    pub concept_id: String,
    pub form: SegmentedForm,
}

/// Rows discarded while loading.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DropCounts {
    /// Forms with an empty Segments column or nothing left after preprocessing.
    pub empty_forms: usize,
    /// Parameters without a Concepticon mapping.
    pub unmapped_parameters: usize,
    /// Forms whose parameter had no Concepticon mapping.
    pub unmapped_forms: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub id: String,
    pub varieties: Vec<Variety>,
    /// Concepticon ID to gloss.
    pub concepts: BTreeMap<String, String>,
    pub forms: Vec<FormEntry>,
    pub drops: DropCounts,
    pub options: PreprocessOptions,
    // variety -> concept -> indices into `forms`
    slots: BTreeMap<String, BTreeMap<String, Vec<usize>>>,
}

/// Checks the Glottolog code shape: four lowercase letters or digits,
/// followed by four digits.
pub fn is_glottocode(code: &str) -> bool {
    let bytes = code.as_bytes();
    bytes.len() == 8
        && bytes[..4]
            .iter()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit())
        && bytes[4..].iter().all(u8::is_ascii_digit)
}

#[derive(Debug, Deserialize)]
struct LanguageRow {
    #[serde(rename = "ID")]
    id: String,
    #[serde(rename = "Name", default)]
    name: String,
    #[serde(rename = "Glottocode", default)]
    glottocode: String,
    #[serde(rename = "Latitude", default)]
    latitude: String,
    #[serde(rename = "Longitude", default)]
    longitude: String,
}

#[derive(Debug, Deserialize)]
struct ParameterRow {
    #[serde(rename = "ID")]
    id: String,
    #[serde(rename = "Name", default)]
    name: String,
    #[serde(rename = "Concepticon_ID", default)]
    concepticon_id: String,
}

#[derive(Debug, Deserialize)]
struct FormRow {
    #[serde(rename = "ID")]
    id: String,
    #[serde(rename = "Language_ID")]
    language_id: String,
    #[serde(rename = "Parameter_ID")]
    parameter_id: String,
    #[serde(rename = "Segments", default)]
    segments: String,
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<(u64, T)>, CorpusError> {
    if !path.is_file() {
        return Err(CorpusError::MissingFile(path.to_owned()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| malformed_csv(path, e))?;
    let headers = reader
        .headers()
        .map_err(|e| malformed_csv(path, e))?
        .clone();
    let mut record = csv::StringRecord::new();
    let mut rows = Vec::new();
    while reader
        .read_record(&mut record)
        .map_err(|e| malformed_csv(path, e))?
    {
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let row =
            record
                .deserialize::<T>(Some(&headers))
                .map_err(|e| CorpusError::MalformedRow {
                    file: path.to_owned(),
                    line,
                    reason: e.to_string(),
                })?;
        rows.push((line, row));
    }
    Ok(rows)
}

fn malformed_csv(path: &Path, err: csv::Error) -> CorpusError {
    if let csv::ErrorKind::Io(_) = err.kind() {
        return CorpusError::Io {
            path: path.to_owned(),
            source: io::Error::other(err.to_string()),
        };
    }
    let line = err.position().map(|p| p.line()).unwrap_or(0);
    CorpusError::MalformedRow {
        file: path.to_owned(),
        line,
        reason: err.to_string(),
    }
}

fn parse_coordinate(
    raw: &str,
    file: &Path,
    line: u64,
    what: &str,
) -> Result<Option<f64>, CorpusError> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Ok(None);
    }
    raw.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(Some)
        .ok_or_else(|| CorpusError::MalformedRow {
            file: file.to_owned(),
            line,
            reason: format!("bad {what} {raw:?}"),
        })
}

/// Dataset name derived from its directory; a trailing `cldf` component is
/// skipped, as in Lexibank repositories.
fn dataset_id(dir: &Path) -> String {
    let mut components = dir.components().rev().filter_map(|c| match c {
        std::path::Component::Normal(s) => Some(s.to_string_lossy().into_owned()),
        _ => None,
    });
    match components.next() {
        Some(last) if last == "cldf" => components.next().unwrap_or(last),
        Some(last) => last,
        None => "dataset".to_owned(),
    }
}

impl Dataset {
    /// Loads `languages.csv`, `parameters.csv` and `forms.csv` from `dir`.
    pub fn load(dir: &Path, opts: PreprocessOptions) -> Result<Self, CorpusError> {
        let languages_path = dir.join(LANGUAGES_FILE);
        let parameters_path = dir.join(PARAMETERS_FILE);
        let forms_path = dir.join(FORMS_FILE);
        for path in [&languages_path, &parameters_path, &forms_path] {
            if !path.is_file() {
                return Err(CorpusError::MissingFile(path.clone()));
            }
        }

        let mut varieties = Vec::new();
        let mut seen = HashSet::new();
        for (line, row) in read_rows::<LanguageRow>(&languages_path)? {
            let id = row.id.trim().to_owned();
            if id.is_empty() {
                return Err(CorpusError::MalformedRow {
                    file: languages_path,
                    line,
                    reason: "empty ID".into(),
                });
            }
            if !seen.insert(id.clone()) {
                return Err(CorpusError::DuplicateId {
                    file: languages_path,
                    id,
                });
            }
            let glottocode = match row.glottocode.trim() {
                "" => None,
                code if is_glottocode(code) => Some(code.to_owned()),
                code => {
                    return Err(CorpusError::MalformedRow {
                        file: languages_path,
                        line,
                        reason: format!("invalid glottocode {code:?}"),
                    })
                }
            };
            varieties.push(Variety {
                id,
                name: row.name.trim().to_owned(),
                glottocode,
                latitude: parse_coordinate(&row.latitude, &languages_path, line, "latitude")?,
                longitude: parse_coordinate(&row.longitude, &languages_path, line, "longitude")?,
            });
        }

        let mut concepts = BTreeMap::new();
        // parameter id -> Concepticon id (None when unmapped)
        let mut parameters: BTreeMap<String, Option<String>> = BTreeMap::new();
        let mut drops = DropCounts::default();
        for (line, row) in read_rows::<ParameterRow>(&parameters_path)? {
            let id = row.id.trim().to_owned();
            if id.is_empty() {
                return Err(CorpusError::MalformedRow {
                    file: parameters_path,
                    line,
                    reason: "empty ID".into(),
                });
            }
            let concepticon = row.concepticon_id.trim();
            let mapped = if concepticon.is_empty() {
                drops.unmapped_parameters += 1;
                None
            } else {
                concepts
                    .entry(concepticon.to_owned())
                    .or_insert_with(|| row.name.trim().to_owned());
                Some(concepticon.to_owned())
            };
            if parameters.insert(id.clone(), mapped).is_some() {
                return Err(CorpusError::DuplicateId {
                    file: parameters_path,
                    id,
                });
            }
        }

        let mut forms = Vec::new();
        let mut form_ids = HashSet::new();
        for (line, row) in read_rows::<FormRow>(&forms_path)? {
            let id = row.id.trim().to_owned();
            if id.is_empty() {
                return Err(CorpusError::MalformedRow {
                    file: forms_path,
                    line,
                    reason: "empty ID".into(),
                });
            }
            if !form_ids.insert(id.clone()) {
                return Err(CorpusError::DuplicateId {
                    file: forms_path,
                    id,
                });
            }
            let variety_id = row.language_id.trim();
            if !seen.contains(variety_id) {
                return Err(CorpusError::MalformedRow {
                    file: forms_path,
                    line,
                    reason: format!("unknown Language_ID {variety_id:?}"),
                });
            }
            let concept_id = match parameters.get(row.parameter_id.trim()) {
                Some(Some(c)) => c.clone(),
                Some(None) => {
                    drops.unmapped_forms += 1;
                    continue;
                }
                None => {
                    return Err(CorpusError::MalformedRow {
                        file: forms_path,
                        line,
                        reason: format!("unknown Parameter_ID {:?}", row.parameter_id.trim()),
                    })
                }
            };
            let Ok(form) = parse_form(&row.segments, opts) else {
                drops.empty_forms += 1;
                continue;
            };
            forms.push(FormEntry {
                form: form.with_source_id(id.clone()),
                id,
                variety_id: variety_id.to_owned(),
                concept_id,
            });
        }

        let id = dataset_id(dir);
        if drops.empty_forms > 0 {
            log::warn!("{id}: dropped {} empty forms", drops.empty_forms);
        }
        if drops.unmapped_parameters > 0 {
            log::warn!(
                "{id}: dropped {} parameters without Concepticon mapping ({} forms)",
                drops.unmapped_parameters,
                drops.unmapped_forms
            );
        }
        Ok(Self::assemble(id, varieties, concepts, forms, drops, opts))
    }

    /// Builds a dataset from in-memory parts. Forms referencing unknown
    /// varieties are kept but never appear in any variety's slots.
    pub fn from_parts(
        id: impl Into<String>,
        varieties: Vec<Variety>,
        concepts: BTreeMap<String, String>,
        forms: Vec<FormEntry>,
    ) -> Self {
        Self::assemble(
            id.into(),
            varieties,
            concepts,
            forms,
            DropCounts::default(),
            PreprocessOptions::default(),
        )
    }

    fn assemble(
        id: String,
        varieties: Vec<Variety>,
        concepts: BTreeMap<String, String>,
        forms: Vec<FormEntry>,
        drops: DropCounts,
        options: PreprocessOptions,
    ) -> Self {
        let mut slots: BTreeMap<String, BTreeMap<String, Vec<usize>>> = BTreeMap::new();
        for (i, entry) in forms.iter().enumerate() {
            slots
                .entry(entry.variety_id.clone())
                .or_default()
                .entry(entry.concept_id.clone())
                .or_default()
                .push(i);
        }
        Self {
            id,
            varieties,
            concepts,
            forms,
            drops,
            options,
            slots,
        }
    }

    pub fn variety(&self, id: &str) -> Option<&Variety> {
        self.varieties.iter().find(|v| v.id == id)
    }

    /// Forms of one variety for one concept, in file order.
    pub fn slot(&self, variety_id: &str, concept_id: &str) -> Vec<&FormEntry> {
        self.slots
            .get(variety_id)
            .and_then(|c| c.get(concept_id))
            .map(|idx| idx.iter().map(|&i| &self.forms[i]).collect())
            .unwrap_or_default()
    }

    /// Concepts with at least one form in the given variety.
    pub fn concepts_of(&self, variety_id: &str) -> BTreeSet<&str> {
        self.slots
            .get(variety_id)
            .map(|c| c.keys().map(String::as_str).collect())
            .unwrap_or_default()
    }

    /// Concepts with at least one form in any variety.
    pub fn attested_concepts(&self) -> BTreeSet<&str> {
        self.slots
            .values()
            .flat_map(|c| c.keys().map(String::as_str))
            .collect()
    }

    /// Per-variety synonymy (forms per attested concept) averaged over
    /// varieties that have forms.
    pub fn synonymy(&self) -> Result<f64, CorpusError> {
        self.synonymy_over(self.slots.keys().map(String::as_str))
    }

    /// Synonymy restricted to the listed varieties.
    pub fn synonymy_for<'a>(
        &self,
        varieties: impl IntoIterator<Item = &'a str>,
    ) -> Result<f64, CorpusError> {
        self.synonymy_over(varieties.into_iter())
    }

    fn synonymy_over<'a>(
        &self,
        varieties: impl Iterator<Item = &'a str>,
    ) -> Result<f64, CorpusError> {
        let unique: BTreeSet<&str> = varieties.collect();
        let ratios: Vec<f64> = unique
            .into_iter()
            .filter_map(|v| self.slots.get(v))
            .filter(|c| !c.is_empty())
            .map(|c| {
                let forms: usize = c.values().map(Vec::len).sum();
                forms as f64 / c.len() as f64
            })
            .collect();
        if ratios.is_empty() {
            return Err(CorpusError::EmptyDataset(self.id.clone()));
        }
        Ok(ratios.iter().sum::<f64>() / ratios.len() as f64)
    }

    /// All forms divided by all filled (variety, concept) slots.
    pub fn pooled_synonymy(&self) -> Result<f64, CorpusError> {
        let slots: usize = self.slots.values().map(BTreeMap::len).sum();
        if slots == 0 {
            return Err(CorpusError::EmptyDataset(self.id.clone()));
        }
        let forms: usize = self
            .slots
            .values()
            .flat_map(|c| c.values())
            .map(Vec::len)
            .sum();
        Ok(forms as f64 / slots as f64)
    }

    /// Writes `variety_id, name, glottocode, latitude, longitude` rows.
    pub fn write_coordinates<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "variety_id\tname\tglottocode\tlatitude\tlongitude")?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for v in &self.varieties {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                v.id,
                v.name,
                v.glottocode.as_deref().unwrap_or(""),
                opt(v.latitude),
                opt(v.longitude)
            )?;
        }
        Ok(())
    }
}

pub fn load_dataset(dir: &Path, opts: PreprocessOptions) -> Result<Dataset, CorpusError> {
    Dataset::load(dir, opts)
}

pub fn synonymy(ds: &Dataset) -> Result<f64, CorpusError> {
    ds.synonymy()
}

/// Concepticon IDs attested in both datasets.
pub fn concept_intersection(a: &Dataset, b: &Dataset) -> BTreeSet<String> {
    let theirs = b.attested_concepts();
    a.attested_concepts()
        .intersection(&theirs)
        .map(|s| (*s).to_owned())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairOrigin {
    GlottocodeMatch,
    ManualSelection,
}

impl fmt::Display for PairOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairOrigin::GlottocodeMatch => "glottocode",
            PairOrigin::ManualSelection => "manual",
        })
    }
}

/// A variety of dataset A paired with a variety of dataset B.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarietyPair {
    pub a: String,
    pub b: String,
    pub origin: PairOrigin,
}

impl VarietyPair {
    pub fn id(&self) -> String {
        format!("{}/{}", self.a, self.b)
    }
}

/// Every combination of varieties sharing a glottocode, in dataset order.
pub fn glottocode_pairs(a: &Dataset, b: &Dataset) -> Vec<VarietyPair> {
    let mut pairs = Vec::new();
    for va in &a.varieties {
        let Some(code) = va.glottocode.as_deref() else {
            continue;
        };
        for vb in b
            .varieties
            .iter()
            .filter(|v| v.glottocode.as_deref() == Some(code))
        {
            pairs.push(VarietyPair {
                a: va.id.clone(),
                b: vb.id.clone(),
                origin: PairOrigin::GlottocodeMatch,
            });
        }
    }
    pairs
}

pub const PAIR_FILE_HEADER: [&str; 2] = ["dataset_a_variety_id", "dataset_b_variety_id"];

/// Reads a tab-separated pair list of variety IDs (A first, then B).
pub fn load_manual_pairs(
    path: &Path,
    a: &Dataset,
    b: &Dataset,
) -> Result<Vec<VarietyPair>, CorpusError> {
    if !path.is_file() {
        return Err(CorpusError::MissingFile(path.to_owned()));
    }
    let text = std::fs::read_to_string(path).map_err(io_error(path))?;
    parse_manual_pairs(&text, path, a, b)
}

pub fn parse_manual_pairs(
    text: &str,
    path: &Path,
    a: &Dataset,
    b: &Dataset,
) -> Result<Vec<VarietyPair>, CorpusError> {
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx as u64 + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').map(str::trim).collect();
        let [va, vb] = fields[..] else {
            return Err(CorpusError::MalformedRow {
                file: path.to_owned(),
                line,
                reason: format!("expected 2 tab-separated columns, found {}", fields.len()),
            });
        };
        if pairs.is_empty() && fields == PAIR_FILE_HEADER {
            continue;
        }
        for (ds, id) in [(a, va), (b, vb)] {
            if ds.variety(id).is_none() {
                return Err(CorpusError::UnknownVariety {
                    file: path.to_owned(),
                    line,
                    id: id.to_owned(),
                });
            }
        }
        pairs.push(VarietyPair {
            a: va.to_owned(),
            b: vb.to_owned(),
            origin: PairOrigin::ManualSelection,
        });
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn variety(id: &str, code: Option<&str>) -> Variety {
        Variety {
            id: id.into(),
            name: id.into(),
            glottocode: code.map(str::to_owned),
            latitude: None,
            longitude: None,
        }
    }

    fn entry(id: &str, variety: &str, concept: &str, segments: &str) -> FormEntry {
        FormEntry {
            id: id.into(),
            variety_id: variety.into(),
            concept_id: concept.into(),
            form: parse_form(segments, PreprocessOptions::default()).unwrap(),
        }
    }

    fn dataset(id: &str, varieties: Vec<Variety>, forms: Vec<FormEntry>) -> Dataset {
        let concepts = forms
            .iter()
            .map(|f| (f.concept_id.clone(), f.concept_id.clone()))
            .collect();
        Dataset::from_parts(id, varieties, concepts, forms)
    }

    #[test]
    fn glottocode_shape() {
        assert!(is_glottocode("stan1290"));
        assert!(is_glottocode("a1b20000"));
        assert!(!is_glottocode("Stan1290"));
        assert!(!is_glottocode("stan129"));
        assert!(!is_glottocode("stanx290"));
    }

    #[test]
    fn dataset_ids() {
        assert_eq!(dataset_id(Path::new("data/iecor/cldf")), "iecor");
        assert_eq!(dataset_id(Path::new("data/iecor")), "iecor");
        assert_eq!(dataset_id(Path::new("cldf")), "cldf");
    }

    #[test]
    fn synonymy_single_variety() {
        let mut forms: Vec<FormEntry> = (0..8)
            .map(|i| entry(&format!("f{i}"), "v", &format!("c{i}"), "t a"))
            .collect();
        forms.push(entry("x1", "v", "c0", "k a"));
        forms.push(entry("x2", "v", "c1", "k a"));
        let ds = dataset("d", vec![variety("v", None)], forms);
        assert_eq!(ds.synonymy().unwrap(), 1.25);
        assert_eq!(ds.pooled_synonymy().unwrap(), 1.25);
    }

    #[test]
    fn synonymy_one_form_per_slot() {
        let forms = (0..5)
            .flat_map(|i| {
                [
                    entry(&format!("a{i}"), "v1", &format!("c{i}"), "t a"),
                    entry(&format!("b{i}"), "v2", &format!("c{i}"), "t a"),
                ]
            })
            .collect();
        let ds = dataset("d", vec![variety("v1", None), variety("v2", None)], forms);
        assert_eq!(ds.synonymy().unwrap(), 1.0);
    }

    #[test]
    fn synonymy_averages_varieties() {
        // v1: 6 forms over 5 concepts (1.2); v2: 7 forms over 5 concepts (1.4)
        let mut forms = Vec::new();
        for i in 0..5 {
            forms.push(entry(&format!("a{i}"), "v1", &format!("c{i}"), "t a"));
            forms.push(entry(&format!("b{i}"), "v2", &format!("c{i}"), "t a"));
        }
        forms.push(entry("a5", "v1", "c0", "k a"));
        forms.push(entry("b5", "v2", "c0", "k a"));
        forms.push(entry("b6", "v2", "c1", "k a"));
        let ds = dataset("d", vec![variety("v1", None), variety("v2", None)], forms);
        assert!((ds.synonymy().unwrap() - 1.3).abs() < 1e-12);
        assert_eq!(format!("{:.2}", ds.synonymy().unwrap()), "1.30");
        assert_eq!(ds.pooled_synonymy().unwrap(), 1.3);
        assert_eq!(ds.synonymy_for(["v1"]).unwrap(), 1.2);
    }

    #[test]
    fn empty_dataset_synonymy() {
        let ds = dataset("d", vec![variety("v", None)], vec![]);
        assert!(matches!(ds.synonymy(), Err(CorpusError::EmptyDataset(_))));
        assert!(matches!(
            ds.pooled_synonymy(),
            Err(CorpusError::EmptyDataset(_))
        ));
    }

    #[test]
    fn intersections() {
        let a = dataset(
            "a",
            vec![variety("v", None)],
            vec![
                entry("1", "v", "1202", "t a"),
                entry("2", "v", "634", "t a"),
                entry("3", "v", "1", "t a"),
            ],
        );
        let b = dataset(
            "b",
            vec![variety("w", None)],
            vec![
                entry("1", "w", "1202", "t a"),
                entry("2", "w", "634", "t a"),
                entry("3", "w", "2", "t a"),
            ],
        );
        let shared = concept_intersection(&a, &b);
        assert_eq!(
            shared,
            BTreeSet::from(["1202".to_owned(), "634".to_owned()])
        );
        let c = dataset(
            "c",
            vec![variety("w", None)],
            vec![entry("1", "w", "9", "t a")],
        );
        assert!(concept_intersection(&a, &c).is_empty());
    }

    #[test]
    fn glottocode_cross_product() {
        let a = dataset(
            "a",
            vec![
                variety("old", Some("abcd1234")),
                variety("new", Some("abcd1234")),
                variety("none", None),
            ],
            vec![],
        );
        let b = dataset(
            "b",
            vec![variety("x", Some("abcd1234")), variety("none", None)],
            vec![],
        );
        let pairs = glottocode_pairs(&a, &b);
        assert_eq!(pairs.len(), 2);
        assert!(pairs
            .iter()
            .all(|p| p.origin == PairOrigin::GlottocodeMatch));
        let reversed: BTreeSet<(String, String)> = glottocode_pairs(&b, &a)
            .into_iter()
            .map(|p| (p.b, p.a))
            .collect();
        let forward: BTreeSet<(String, String)> = pairs.into_iter().map(|p| (p.a, p.b)).collect();
        assert_eq!(forward, reversed);

        let c = dataset("c", vec![variety("y", Some("wxyz0000"))], vec![]);
        assert!(glottocode_pairs(&a, &c).is_empty());
    }

    #[test]
    fn manual_pairs() {
        let a = dataset("a", vec![variety("fr", None), variety("de", None)], vec![]);
        let b = dataset(
            "b",
            vec![variety("French", None), variety("German", None)],
            vec![],
        );
        let path = Path::new("pairs.tsv");
        let text =
            "dataset_a_variety_id\tdataset_b_variety_id\n# comment\nfr\tFrench\n\nde\tGerman\n";
        let pairs = parse_manual_pairs(text, path, &a, &b).unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[1].id(), "de/German");
        assert!(pairs
            .iter()
            .all(|p| p.origin == PairOrigin::ManualSelection));

        let err = parse_manual_pairs("fr\tItalian\n", path, &a, &b).unwrap_err();
        assert!(
            matches!(err, CorpusError::UnknownVariety { line: 1, ref id, .. } if id == "Italian")
        );
        let err = parse_manual_pairs("fr French\n", path, &a, &b).unwrap_err();
        assert!(matches!(err, CorpusError::MalformedRow { .. }));
    }
}
