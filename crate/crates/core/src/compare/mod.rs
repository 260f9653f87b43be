//! Slot, pair and group level comparison of two wordlists.

mod report;
mod study;

pub use report::{format_value, Report, RunMetadata, GROUP_COLUMNS, PAIR_COLUMNS};
pub use study::{
    collect_predictions, run_study, GroupConfig, PairingMode, StudyConfig, StudyError,
    StudySettings,
};

use thiserror::Error;

use crate::corpus::{Dataset, VarietyPair};
use crate::metrics::{pair_metrics, DistanceParams};
use crate::phonoseg::SegmentedForm;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompareError {
    #[error("concept {0}: cannot compare an empty slot")]
    EmptySlot(String),
    #[error("pair {0}: no shared concepts with forms on both sides")]
    NoSharedConcepts(String),
    #[error("group {0:?} has no comparable pairs")]
    EmptyGroup(String),
    #[error("dataset {dataset}: unknown variety {variety:?}")]
    UnknownVariety { dataset: String, variety: String },
}

/// The five measured quantities, in report column order.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Scores {
    pub identical: f64,
    pub similar: f64,
    pub sca: f64,
    pub ned: f64,
    pub ed: f64,
}

impl Scores {
    pub fn as_array(&self) -> [f64; 5] {
        [self.identical, self.similar, self.sca, self.ned, self.ed]
    }

    fn from_array([identical, similar, sca, ned, ed]: [f64; 5]) -> Self {
        Self {
            identical,
            similar,
            sca,
            ned,
            ed,
        }
    }
}

/// Means over every form pair of one concept slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotScores {
    pub concept_id: String,
    pub n_pairs: usize,
    pub scores: Scores,
}

/// Unweighted means over the shared concepts of one variety pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairResult {
    pub pair: VarietyPair,
    pub n_concepts: usize,
    pub scores: Scores,
    pub slots: Vec<SlotScores>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MetricSummary {
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupSummary {
    pub group: String,
    pub n_pairs: usize,
    pub identical: MetricSummary,
    pub similar: MetricSummary,
    pub sca: MetricSummary,
    pub ned: MetricSummary,
    pub ed: MetricSummary,
}

impl GroupSummary {
    pub fn metrics(&self) -> [MetricSummary; 5] {
        [self.identical, self.similar, self.sca, self.ned, self.ed]
    }
}

// Summation order is fixed by sorting so that the mean does not depend on
// the order in which values were produced.
fn order_free_mean(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum::<f64>() / values.len() as f64
}

/// Compares every form of `forms_a` with every form of `forms_b`.
pub fn compare_slot(
    concept_id: &str,
    forms_a: &[&SegmentedForm],
    forms_b: &[&SegmentedForm],
    params: &DistanceParams,
) -> Result<SlotScores, CompareError> {
    if forms_a.is_empty() || forms_b.is_empty() {
        return Err(CompareError::EmptySlot(concept_id.to_owned()));
    }
    let n = forms_a.len() * forms_b.len();
    let (mut identical, mut similar, mut ed) = (0usize, 0usize, 0usize);
    let mut sca = Vec::with_capacity(n);
    let mut ned = Vec::with_capacity(n);
    for a in forms_a {
        for b in forms_b {
            let m = pair_metrics(a, b, params);
            identical += usize::from(m.category == crate::metrics::PairCategory::Identical);
            similar += usize::from(m.category.is_same());
            ed += m.ed;
            sca.push(m.sca);
            ned.push(m.ned);
        }
    }
    Ok(SlotScores {
        concept_id: concept_id.to_owned(),
        n_pairs: n,
        scores: Scores {
            identical: identical as f64 / n as f64,
            similar: similar as f64 / n as f64,
            sca: order_free_mean(sca),
            ned: order_free_mean(ned),
            ed: ed as f64 / n as f64,
        },
    })
}

/// Averages slot scores over the concepts both varieties attest.
pub fn compare_pair(
    pair: &VarietyPair,
    a: &Dataset,
    b: &Dataset,
    params: &DistanceParams,
) -> Result<PairResult, CompareError> {
    for (ds, id) in [(a, &pair.a), (b, &pair.b)] {
        if ds.variety(id).is_none() {
            return Err(CompareError::UnknownVariety {
                dataset: ds.id.clone(),
                variety: id.clone(),
            });
        }
    }
    let theirs = b.concepts_of(&pair.b);
    let shared: Vec<&str> = a
        .concepts_of(&pair.a)
        .into_iter()
        .filter(|c| theirs.contains(c))
        .collect();
    if shared.is_empty() {
        return Err(CompareError::NoSharedConcepts(pair.id()));
    }
    let slots = shared
        .iter()
        .map(|concept| {
            let fa: Vec<&SegmentedForm> = a
                .slot(&pair.a, concept)
                .into_iter()
                .map(|e| &e.form)
                .collect();
            let fb: Vec<&SegmentedForm> = b
                .slot(&pair.b, concept)
                .into_iter()
                .map(|e| &e.form)
                .collect();
            compare_slot(concept, &fa, &fb, params)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let n = slots.len() as f64;
    let mut sums = [0.0; 5];
    for slot in &slots {
        for (sum, v) in sums.iter_mut().zip(slot.scores.as_array()) {
            *sum += v;
        }
    }
    Ok(PairResult {
        pair: pair.clone(),
        n_concepts: slots.len(),
        scores: Scores::from_array(sums.map(|s| s / n)),
        slots,
    })
}

/// Mean and population standard deviation.
pub fn summarize(values: &[f64]) -> MetricSummary {
    let Some(&first) = values.first() else {
        return MetricSummary::default();
    };
    if values.iter().all(|v| *v == first) {
        return MetricSummary {
            mean: first,
            std: 0.0,
        };
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    MetricSummary {
        mean,
        std: var.sqrt(),
    }
}

/// Per-metric mean and population standard deviation over pair results.
pub fn aggregate_group(results: &[PairResult], group: &str) -> Result<GroupSummary, CompareError> {
    if results.is_empty() {
        return Err(CompareError::EmptyGroup(group.to_owned()));
    }
    let column = |i: usize| -> MetricSummary {
        let values: Vec<f64> = results.iter().map(|r| r.scores.as_array()[i]).collect();
        summarize(&values)
    };
    Ok(GroupSummary {
        group: group.to_owned(),
        n_pairs: results.len(),
        identical: column(0),
        similar: column(1),
        sca: column(2),
        ned: column(3),
        ed: column(4),
    })
}
