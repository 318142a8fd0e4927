//! Measuring and removing semantic bias in pretrained word embeddings.
//!
//! The pipeline is: parse a GloVe-format file into an [`EmbeddingStore`],
//! normalize it, resolve word lists against its vocabulary, score target
//! words against attribute sets, correlate those scores with external
//! statistics, then project a chosen bias direction out of every vector and
//! measure again.

pub mod association;
pub mod debias;
pub mod error;
pub mod lexicon;
pub mod stats;
pub mod store;
pub mod synthetic;

pub use association::{
    assoc_word_set, centroid, centroid_gap, cosine, run_battery, AssociationRecord, AttributeSet,
    BatteryPoint, BatteryResult, TargetList,
};
pub use debias::{
    bias_direction, debias_store, project_out, select_projection, BiasDirection, CandidateScore,
    CandidateStatus, DebiasOutcome, Selection,
};
pub use error::{Error, Result};
pub use lexicon::{
    load_category, load_occupation_stats, load_pairs, Category, OccupationRecord, Pattern, WordPair,
};
pub use stats::{gap_reduction, pearson, CorrelationResult, GapReport};
pub use store::{parse_embedding, EmbeddingStore, LoadSummary, WordVector};
