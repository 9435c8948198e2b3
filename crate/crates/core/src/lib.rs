//! Clause-length statistics for Ukrainian text.
//!
//! The pipeline runs tokenization ([`ingest`]), sentence splitting
//! ([`segment`]), syllable and clause counting ([`syllables`], [`clauses`]),
//! per sentence-length aggregation ([`aggregate`]) and model fitting
//! ([`fitting`]): the Menzerath-Altmann curve `A·x^b·e^(-c/x)` for mean clause
//! length and a shifted negative binomial for the number of sentences.

pub mod aggregate;
pub mod analysis;
pub mod clauses;
pub mod fitting;
pub mod ingest;
pub mod segment;
pub mod syllables;

pub use aggregate::{aggregate, aggregate_with, AggregateRow, AggregateTable, MeanMode, SentenceLengths, TableError};
pub use analysis::{analyze, InputMode, Lexicons, SentenceRecord};
pub use clauses::{count_clauses, evaluate_counts, ClauseBreakdown, EvaluationReport, Lexicon};
pub use fitting::{
    fit_mal, fit_negbin, fit_negbin_with, mal_eval, negbin_pmf, predicted_counts, FitError, MalFit, MalParams,
    NegBinFit, NegBinMethod, NegBinParams, Target, Weighting,
};
pub use ingest::{read_raw, read_tagged, write_vertical, GrammTag, IngestError, Token, TokenKind};
pub use segment::{split_sentences, split_tagged, Sentence};
pub use syllables::syllable_count;

/// Observed clause lengths and sentence counts of a reference Ukrainian novel
/// (8455 sentences), one row per clause count.
pub const REFERENCE_TABLE_TSV: &str = include_str!("../data/reference_table.tsv");

/// Five hand-tagged sentences in vertical format.
pub const SAMPLE_VERTICAL: &str = include_str!("../data/sample.vert");

/// Default predicative word list.
pub const PREDICATIVE_LEXICON: &str = include_str!("../data/predicative.txt");
