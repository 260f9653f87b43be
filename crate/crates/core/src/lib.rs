//! Measure how concept translations differ between independently compiled
//! multilingual wordlists.
//!
//! Forms are compared with sound-class alignments so that transcription
//! noise (voicing, length, diacritics) is separated from genuinely different
//! translations. Results are aggregated per concept slot, per language pair
//! and per language family, and can be scored against human annotations.

pub mod cli;
pub mod compare;
pub mod corpus;
pub mod eval;
pub mod metrics;
pub mod phonoseg;

pub use metrics::{
    align_global, classify_pair, edit_distance, normalized_edit_distance, sca_distance, Alignment,
    DistanceParams, MetricsError, PairCategory,
};
pub use phonoseg::{
    is_tone_token, parse_form, to_classes, ClassSequence, PhonosegError, PreprocessOptions,
    SegmentedForm, SoundClass, SoundClassModel,
};
