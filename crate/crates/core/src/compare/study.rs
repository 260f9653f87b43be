use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;

use super::report::{GroupMeta, Report, RunMetadata};
use super::{aggregate_group, compare_pair, CompareError, PairResult};
use crate::corpus::{glottocode_pairs, load_manual_pairs, CorpusError, Dataset, VarietyPair};
use crate::eval::Prediction;
use crate::metrics::{pair_metrics, DistanceParams};
use crate::phonoseg::PreprocessOptions;

#[derive(Debug, Error)]
pub enum StudyError {
    #[error("config {}: {reason}", .path.display())]
    Config { path: PathBuf, reason: String },
    #[error("group {group:?}: {source}")]
    Corpus {
        group: String,
        #[source]
        source: CorpusError,
    },
    #[error("group {group:?}: manual pairing needs a `pairs` file")]
    MissingPairFile { group: String },
    #[error("group {group:?}: {source}")]
    Compare {
        group: String,
        #[source]
        source: CompareError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairingMode {
    Glottocode,
    Manual,
}

impl fmt::Display for PairingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairingMode::Glottocode => "glottocode",
            PairingMode::Manual => "manual",
        })
    }
}

impl FromStr for PairingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "glottocode" => Ok(PairingMode::Glottocode),
            "manual" => Ok(PairingMode::Manual),
            other => Err(format!("unknown pairing mode {other:?}")),
        }
    }
}

/// One language family: two wordlists and an optional hand-made pair list.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    pub name: String,
    pub a: PathBuf,
    pub b: PathBuf,
    pub pairs: Option<PathBuf>,
    pub strip_tones_a: Option<bool>,
    pub strip_tones_b: Option<bool>,
    pub strip_morpheme_boundaries: Option<bool>,
}

impl GroupConfig {
    fn options(&self, strip_tones: Option<bool>) -> PreprocessOptions {
        let defaults = PreprocessOptions::default();
        PreprocessOptions {
            strip_morpheme_boundaries: self
                .strip_morpheme_boundaries
                .unwrap_or(defaults.strip_morpheme_boundaries),
            strip_tones: strip_tones.unwrap_or(defaults.strip_tones),
        }
    }

    pub fn options_a(&self) -> PreprocessOptions {
        self.options(self.strip_tones_a)
    }

    pub fn options_b(&self) -> PreprocessOptions {
        self.options(self.strip_tones_b)
    }
}

/// Study description, read from a TOML file.
///
/// ```toml
/// threshold = 0.5
/// mode = "manual"
///
/// [[group]]
/// name = "Indo-European"
/// a = "ie/heggarty"
/// b = "ie/starostin"
/// pairs = "ie/pairs.tsv"
/// strip_tones_b = false
/// ```
///
/// Relative paths are resolved against the directory holding the file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub threshold: Option<f64>,
    pub mode: Option<PairingMode>,
    pub model: Option<PathBuf>,
    #[serde(rename = "group", default)]
    pub groups: Vec<GroupConfig>,
}

impl StudyConfig {
    pub fn load(path: &Path) -> Result<Self, StudyError> {
        let text = std::fs::read_to_string(path).map_err(|e| StudyError::Config {
            path: path.to_owned(),
            reason: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::parse(&text, base).map_err(|reason| StudyError::Config {
            path: path.to_owned(),
            reason,
        })
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self, String> {
        let mut config: StudyConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        if config.groups.is_empty() {
            return Err("no [[group]] entries".into());
        }
        let mut names = std::collections::HashSet::new();
        for g in &config.groups {
            if g.name.trim().is_empty() || g.name == "TOTAL" {
                return Err(format!("invalid group name {:?}", g.name));
            }
            if !names.insert(g.name.clone()) {
                return Err(format!("duplicate group {:?}", g.name));
            }
        }
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(m) = config.model.as_mut() {
            resolve(m);
        }
        for g in &mut config.groups {
            resolve(&mut g.a);
            resolve(&mut g.b);
            if let Some(p) = g.pairs.as_mut() {
                resolve(p);
            }
        }
        Ok(config)
    }
}

#[derive(Debug, Clone)]
pub struct StudySettings {
    pub mode: PairingMode,
    pub params: DistanceParams,
    pub parallel: bool,
}

struct PreparedGroup {
    name: String,
    a: Dataset,
    b: Dataset,
    pairs: Vec<VarietyPair>,
}

fn maybe_par<T, R, F>(items: &[T], parallel: bool, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    if parallel {
        items.par_iter().map(f).collect()
    } else {
        items.iter().map(f).collect()
    }
}

fn prepare(
    config: &StudyConfig,
    settings: &StudySettings,
) -> Result<Vec<PreparedGroup>, StudyError> {
    let prepared = maybe_par(&config.groups, settings.parallel, |g| {
        let corpus = |source| StudyError::Corpus {
            group: g.name.clone(),
            source,
        };
        let a = Dataset::load(&g.a, g.options_a()).map_err(corpus)?;
        let b = Dataset::load(&g.b, g.options_b()).map_err(corpus)?;
        let pairs = match settings.mode {
            PairingMode::Glottocode => glottocode_pairs(&a, &b),
            PairingMode::Manual => {
                let path = g
                    .pairs
                    .as_ref()
                    .ok_or_else(|| StudyError::MissingPairFile {
                        group: g.name.clone(),
                    })?;
                load_manual_pairs(path, &a, &b).map_err(corpus)?
            }
        };
        Ok(PreparedGroup {
            name: g.name.clone(),
            a,
            b,
            pairs,
        })
    });
    prepared.into_iter().collect()
}

/// Loads every group, pairs its varieties and compares all pairs.
///
/// Pairs without shared concepts are skipped and logged; a group left
/// without any compared pair is an error.
pub fn run_study(config: &StudyConfig, settings: &StudySettings) -> Result<Report, StudyError> {
    let groups = prepare(config, settings)?;
    let mut log = Vec::new();
    for g in &groups {
        for (side, ds) in [("a", &g.a), ("b", &g.b)] {
            log.push(format!(
                "group {}: dataset {side} ({}): {} forms, dropped {} empty forms, {} unmapped parameters ({} forms)",
                g.name,
                ds.id,
                ds.forms.len(),
                ds.drops.empty_forms,
                ds.drops.unmapped_parameters,
                ds.drops.unmapped_forms
            ));
        }
    }

    let tasks: Vec<(usize, &VarietyPair)> = groups
        .iter()
        .enumerate()
        .flat_map(|(i, g)| g.pairs.iter().map(move |p| (i, p)))
        .collect();
    let outcomes = maybe_par(&tasks, settings.parallel, |(i, pair)| {
        let g = &groups[*i];
        compare_pair(pair, &g.a, &g.b, &settings.params)
    });

    let mut per_group: Vec<Vec<PairResult>> = vec![Vec::new(); groups.len()];
    for ((i, pair), outcome) in tasks.iter().zip(outcomes) {
        match outcome {
            Ok(r) => per_group[*i].push(r),
            Err(CompareError::NoSharedConcepts(_)) => {
                let msg = format!(
                    "group {}: skipped pair {} (no shared concepts)",
                    groups[*i].name,
                    pair.id()
                );
                log::warn!("{msg}");
                log.push(msg);
            }
            Err(source) => {
                return Err(StudyError::Compare {
                    group: groups[*i].name.clone(),
                    source,
                })
            }
        }
    }

    let mut summaries = Vec::new();
    for (g, results) in groups.iter().zip(&per_group) {
        summaries.push(aggregate_group(results, &g.name).map_err(|source| {
            StudyError::Compare {
                group: g.name.clone(),
                source,
            }
        })?);
    }
    let pooled: Vec<PairResult> = per_group.iter().flatten().cloned().collect();
    let total = aggregate_group(&pooled, "TOTAL").map_err(|source| StudyError::Compare {
        group: "TOTAL".into(),
        source,
    })?;

    let metadata = RunMetadata {
        threshold: settings.params.threshold(),
        model: settings.params.model().name().to_owned(),
        mode: settings.mode,
        groups: config
            .groups
            .iter()
            .zip(&groups)
            .map(|(c, g)| GroupMeta {
                name: g.name.clone(),
                dataset_a: g.a.id.clone(),
                dataset_b: g.b.id.clone(),
                options_a: c.options_a(),
                options_b: c.options_b(),
            })
            .collect(),
    };
    let pairs = groups
        .iter()
        .zip(per_group)
        .flat_map(|(g, results)| results.into_iter().map(move |r| (g.name.clone(), r)))
        .collect();
    Ok(Report {
        metadata,
        pairs,
        groups: summaries,
        total,
        log,
    })
}

/// Classifies every form pair of every shared concept slot in the study.
pub fn collect_predictions(
    config: &StudyConfig,
    settings: &StudySettings,
) -> Result<Vec<Prediction>, StudyError> {
    let groups = prepare(config, settings)?;
    let tasks: Vec<(usize, &VarietyPair)> = groups
        .iter()
        .enumerate()
        .flat_map(|(i, g)| g.pairs.iter().map(move |p| (i, p)))
        .collect();
    let chunks = maybe_par(&tasks, settings.parallel, |(i, pair)| {
        let g = &groups[*i];
        let theirs = g.b.concepts_of(&pair.b);
        let mut out = Vec::new();
        for concept in
            g.a.concepts_of(&pair.a)
                .into_iter()
                .filter(|c| theirs.contains(c))
        {
            for fa in g.a.slot(&pair.a, concept) {
                for fb in g.b.slot(&pair.b, concept) {
                    let m = pair_metrics(&fa.form, &fb.form, &settings.params);
                    out.push(Prediction {
                        language_pair_id: pair.id(),
                        concept_id: concept.to_owned(),
                        form_a: fa.id.clone(),
                        form_b: fb.id.clone(),
                        category: m.category,
                        sca: Some(m.sca),
                    });
                }
            }
        }
        out
    });
    Ok(chunks.into_iter().flatten().collect())
}
