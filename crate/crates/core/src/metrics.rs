//! Alignment-based and edit-based distances between segmented forms.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::phonoseg::{ClassSequence, SegmentedForm, SoundClass, SoundClassModel};

pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("normalized edit distance is undefined for two empty forms")]
    BothEmpty,
    #[error("threshold must lie strictly between 0 and 1, got {0}")]
    InvalidThreshold(f64),
}

/// A global pairwise alignment of two class sequences. `None` marks a gap.
#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    pub aligned_a: Vec<Option<SoundClass>>,
    pub aligned_b: Vec<Option<SoundClass>>,
    pub score: f64,
}

impl Alignment {
    pub fn len(&self) -> usize {
        self.aligned_a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.aligned_a.is_empty()
    }

    /// Renders both rows with class labels, `-` for gaps.
    pub fn render(&self, model: &SoundClassModel) -> (String, String) {
        let row = |cols: &[Option<SoundClass>]| {
            cols.iter()
                .map(|c| c.map_or("-", |c| model.label(c)))
                .collect::<Vec<_>>()
                .join(" ")
        };
        (row(&self.aligned_a), row(&self.aligned_b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairCategory {
    Identical,
    Similar,
    Different,
}

impl PairCategory {
    /// Identical and Similar both count as the same word.
    pub fn is_same(self) -> bool {
        !matches!(self, PairCategory::Different)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PairCategory::Identical => "Identical",
            PairCategory::Similar => "Similar",
            PairCategory::Different => "Different",
        }
    }
}

impl fmt::Display for PairCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PairCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "identical" => Ok(PairCategory::Identical),
            "similar" => Ok(PairCategory::Similar),
            "different" => Ok(PairCategory::Different),
            other => Err(format!("unknown category {other:?}")),
        }
    }
}

/// Threshold plus the sound-class model used for SCA distances.
#[derive(Debug, Clone)]
pub struct DistanceParams {
    threshold: f64,
    model: Arc<SoundClassModel>,
}

impl DistanceParams {
    pub fn new(
        threshold: f64,
        model: impl Into<Arc<SoundClassModel>>,
    ) -> Result<Self, MetricsError> {
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(MetricsError::InvalidThreshold(threshold));
        }
        Ok(Self {
            threshold,
            model: model.into(),
        })
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn model(&self) -> &SoundClassModel {
        &self.model
    }
}

impl Default for DistanceParams {
    fn default() -> Self {
        Self::new(DEFAULT_THRESHOLD, SoundClassModel::default_model()).expect("default threshold")
    }
}

#[derive(Clone, Copy)]
enum Step {
    Diagonal,
    GapInY,
    GapInX,
}

/// Needleman-Wunsch alignment with a linear gap penalty.
///
/// On equal scores the traceback prefers a match/mismatch column, then a gap
/// in `y`, then a gap in `x`.
pub fn align_global(x: &ClassSequence, y: &ClassSequence, model: &SoundClassModel) -> Alignment {
    let (xs, ys) = (x.as_slice(), y.as_slice());
    let (n, m) = (xs.len(), ys.len());
    let gap = model.gap_penalty();
    let width = m + 1;
    let mut table = vec![0.0f64; (n + 1) * width];
    for i in 1..=n {
        table[i * width] = gap * i as f64;
    }
    for (j, cell) in table.iter_mut().enumerate().take(width).skip(1) {
        *cell = gap * j as f64;
    }
    for i in 1..=n {
        for j in 1..=m {
            let diag = table[(i - 1) * width + j - 1] + model.score(xs[i - 1], ys[j - 1]);
            let up = table[(i - 1) * width + j] + gap;
            let left = table[i * width + j - 1] + gap;
            table[i * width + j] = diag.max(up).max(left);
        }
    }

    let mut aligned_a = Vec::with_capacity(n + m);
    let mut aligned_b = Vec::with_capacity(n + m);
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = table[i * width + j];
        let step = if i > 0
            && j > 0
            && here == table[(i - 1) * width + j - 1] + model.score(xs[i - 1], ys[j - 1])
        {
            Step::Diagonal
        } else if i > 0 && here == table[(i - 1) * width + j] + gap {
            Step::GapInY
        } else {
            Step::GapInX
        };
        match step {
            Step::Diagonal => {
                i -= 1;
                j -= 1;
                aligned_a.push(Some(xs[i]));
                aligned_b.push(Some(ys[j]));
            }
            Step::GapInY => {
                i -= 1;
                aligned_a.push(Some(xs[i]));
                aligned_b.push(None);
            }
            Step::GapInX => {
                j -= 1;
                aligned_a.push(None);
                aligned_b.push(Some(ys[j]));
            }
        }
    }
    aligned_a.reverse();
    aligned_b.reverse();
    Alignment {
        aligned_a,
        aligned_b,
        score: table[n * width + m],
    }
}

/// Score of the best global alignment, computed in linear space.
pub fn global_score(x: &[SoundClass], y: &[SoundClass], model: &SoundClassModel) -> f64 {
    let gap = model.gap_penalty();
    let mut prev: Vec<f64> = (0..=y.len()).map(|j| gap * j as f64).collect();
    let mut cur = vec![0.0; y.len() + 1];
    for (i, &xc) in x.iter().enumerate() {
        cur[0] = gap * (i + 1) as f64;
        for (j, &yc) in y.iter().enumerate() {
            let diag = prev[j] + model.score(xc, yc);
            let up = prev[j + 1] + gap;
            let left = cur[j] + gap;
            cur[j + 1] = diag.max(up).max(left);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[y.len()]
}

/// Self-normalized alignment distance `1 - 2 S(a,b) / (S(a,a) + S(b,b))`,
/// clamped to `[0, 1]`.
///
/// Token-identical forms are at distance 0. When neither form has a positive
/// self-score (both consist of unknown segments only) the distance is 1.
pub fn sca_distance(a: &SegmentedForm, b: &SegmentedForm, model: &SoundClassModel) -> f64 {
    if a == b {
        return 0.0;
    }
    let (ca, cb) = (model.to_classes(a), model.to_classes(b));
    class_distance(&ca, &cb, model)
}

/// [`sca_distance`] on already mapped class sequences.
pub fn class_distance(a: &ClassSequence, b: &ClassSequence, model: &SoundClassModel) -> f64 {
    let (a, b) = (a.as_slice(), b.as_slice());
    let denom = global_score(a, a, model) + global_score(b, b, model);
    if denom <= 0.0 {
        return 1.0;
    }
    let d = 1.0 - 2.0 * global_score(a, b, model) / denom;
    d.clamp(0.0, 1.0)
}

/// Token-level Levenshtein distance.
pub fn edit_distance(a: &SegmentedForm, b: &SegmentedForm) -> usize {
    levenshtein(a.tokens(), b.tokens())
}

/// Levenshtein distance over arbitrary token slices.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, x) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let next = (diag + usize::from(x != y))
                .min(row[j] + 1)
                .min(row[j + 1] + 1);
            diag = row[j + 1];
            row[j + 1] = next;
        }
    }
    row[b.len()]
}

/// Edit distance divided by the length of the longer form.
pub fn normalized_edit_distance(a: &SegmentedForm, b: &SegmentedForm) -> Result<f64, MetricsError> {
    let longest = a.len().max(b.len());
    if longest == 0 {
        return Err(MetricsError::BothEmpty);
    }
    Ok(edit_distance(a, b) as f64 / longest as f64)
}

/// Categorizes a pair: equal tokens are Identical, otherwise the SCA
/// distance decides between Similar (strictly below threshold) and Different.
pub fn classify_pair(
    a: &SegmentedForm,
    b: &SegmentedForm,
    params: &DistanceParams,
) -> PairCategory {
    category_for(
        a == b,
        sca_distance(a, b, params.model()),
        params.threshold(),
    )
}

pub(crate) fn category_for(identical: bool, sca: f64, threshold: f64) -> PairCategory {
    if identical {
        PairCategory::Identical
    } else if sca < threshold {
        PairCategory::Similar
    } else {
        PairCategory::Different
    }
}

/// All metrics for one form pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairMetrics {
    pub category: PairCategory,
    pub sca: f64,
    pub ned: f64,
    pub ed: usize,
}

/// Computes every metric for a pair of non-empty forms at once.
pub fn pair_metrics(a: &SegmentedForm, b: &SegmentedForm, params: &DistanceParams) -> PairMetrics {
    let sca = sca_distance(a, b, params.model());
    let ed = edit_distance(a, b);
    let longest = a.len().max(b.len()).max(1);
    PairMetrics {
        category: category_for(a == b, sca, params.threshold()),
        sca,
        ned: ed as f64 / longest as f64,
        ed,
    }
}
