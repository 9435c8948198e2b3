//! Per sentence-length statistics: for each number of clauses `x`, the mean
//! clause length in words and syllables and the number of sentences.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const TABLE_SCHEMA_VERSION: u32 = 1;
pub const TABLE_HEADER: [&str; 4] = ["x", "mean_words", "mean_syllables", "sentences"];

#[derive(Debug, Error)]
pub enum TableError {
    #[error("record {index}: clause count must be at least 1")]
    ZeroClauses { index: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid table JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported table schema version {0}")]
    SchemaVersion(u32),
    #[error("row {x}: {message}")]
    Invalid { x: u32, message: String },
}

/// How a bucket's mean clause length is formed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanMode {
    /// Total words over total clauses in the bucket.
    #[default]
    Pooled,
    /// Average of each sentence's words-per-clause ratio.
    PerSentence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub x: u32,
    pub mean_words: f64,
    pub mean_syllables: f64,
    pub sentences: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateTable {
    pub rows: Vec<AggregateRow>,
    pub total_sentences: u64,
}

/// Input to aggregation: the three lengths of one sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceLengths {
    pub words: u32,
    pub syllables: u32,
    pub clauses: u32,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Bucket {
    sentences: u64,
    words: u64,
    syllables: u64,
    word_ratio_sum: f64,
    syllable_ratio_sum: f64,
}

/// Partial aggregation state. Accumulators built over disjoint parts of a
/// corpus can be merged in any order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Accumulator {
    buckets: BTreeMap<u32, Bucket>,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one sentence. `clauses` must be at least 1.
    pub fn push(&mut self, s: SentenceLengths) {
        debug_assert!(s.clauses >= 1);
        let c = f64::from(s.clauses);
        let b = self.buckets.entry(s.clauses).or_default();
        b.sentences += 1;
        b.words += u64::from(s.words);
        b.syllables += u64::from(s.syllables);
        b.word_ratio_sum += f64::from(s.words) / c;
        b.syllable_ratio_sum += f64::from(s.syllables) / c;
    }

    pub fn merge(mut self, other: Accumulator) -> Accumulator {
        for (x, o) in other.buckets {
            let b = self.buckets.entry(x).or_default();
            b.sentences += o.sentences;
            b.words += o.words;
            b.syllables += o.syllables;
            b.word_ratio_sum += o.word_ratio_sum;
            b.syllable_ratio_sum += o.syllable_ratio_sum;
        }
        self
    }

    pub fn finish(&self, mode: MeanMode) -> AggregateTable {
        let max_x = self.buckets.keys().next_back().copied().unwrap_or(0);
        let rows = (1..=max_x)
            .map(|x| match self.buckets.get(&x) {
                Some(b) if b.sentences > 0 => {
                    let n = b.sentences as f64;
                    let (mean_words, mean_syllables) = match mode {
                        MeanMode::Pooled => {
                            let clauses = f64::from(x) * n;
                            (b.words as f64 / clauses, b.syllables as f64 / clauses)
                        }
                        MeanMode::PerSentence => (b.word_ratio_sum / n, b.syllable_ratio_sum / n),
                    };
                    AggregateRow {
                        x,
                        mean_words,
                        mean_syllables,
                        sentences: b.sentences,
                    }
                }
                _ => AggregateRow {
                    x,
                    mean_words: 0.0,
                    mean_syllables: 0.0,
                    sentences: 0,
                },
            })
            .collect();
        AggregateTable {
            rows,
            total_sentences: self.buckets.values().map(|b| b.sentences).sum(),
        }
    }
}

pub fn aggregate(records: &[SentenceLengths]) -> Result<AggregateTable, TableError> {
    aggregate_with(records, MeanMode::Pooled)
}

pub fn aggregate_with(records: &[SentenceLengths], mode: MeanMode) -> Result<AggregateTable, TableError> {
    let mut acc = Accumulator::new();
    for (index, &r) in records.iter().enumerate() {
        if r.clauses == 0 {
            return Err(TableError::ZeroClauses { index });
        }
        acc.push(r);
    }
    Ok(acc.finish(mode))
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    schema_version: u32,
    total_sentences: u64,
    rows: Vec<AggregateRow>,
}

impl AggregateTable {
    pub fn empty() -> Self {
        AggregateTable {
            rows: Vec::new(),
            total_sentences: 0,
        }
    }

    /// Builds a table from rows, checking density and the zero-row convention.
    pub fn from_rows(rows: Vec<AggregateRow>) -> Result<Self, TableError> {
        for (i, row) in rows.iter().enumerate() {
            let invalid = |message: &str| TableError::Invalid {
                x: row.x,
                message: message.to_string(),
            };
            if row.x as usize != i + 1 {
                return Err(invalid("rows must be dense in x starting at 1"));
            }
            if !(row.mean_words.is_finite() && row.mean_syllables.is_finite())
                || row.mean_words < 0.0
                || row.mean_syllables < 0.0
            {
                return Err(invalid("means must be finite and non-negative"));
            }
            if row.sentences == 0 && (row.mean_words != 0.0 || row.mean_syllables != 0.0) {
                return Err(invalid("empty row must have zero means"));
            }
            if row.sentences > 0 && row.mean_words <= 0.0 {
                return Err(invalid("non-empty row must have a positive mean length"));
            }
        }
        let total_sentences = rows.iter().map(|r| r.sentences).sum();
        Ok(AggregateTable {
            rows,
            total_sentences,
        })
    }

    /// Rows that carry at least one sentence.
    pub fn nonzero_rows(&self) -> impl Iterator<Item = &AggregateRow> {
        self.rows.iter().filter(|r| r.sentences > 0)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = TABLE_HEADER.join("\t");
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}",
                r.x, r.mean_words, r.mean_syllables, r.sentences
            );
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self, TableError> {
        let mut rows = Vec::new();
        let mut seen_header = false;
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            if !seen_header {
                seen_header = true;
                if fields == TABLE_HEADER {
                    continue;
                }
            }
            let err = |message: String| TableError::Parse {
                line: line_no,
                message,
            };
            if fields.len() != TABLE_HEADER.len() {
                return Err(err(format!(
                    "expected {} fields, found {}",
                    TABLE_HEADER.len(),
                    fields.len()
                )));
            }
            let x = fields[0]
                .parse::<u32>()
                .map_err(|e| err(format!("x: {e}")))?;
            let mean_words = fields[1]
                .parse::<f64>()
                .map_err(|e| err(format!("mean_words: {e}")))?;
            let mean_syllables = fields[2]
                .parse::<f64>()
                .map_err(|e| err(format!("mean_syllables: {e}")))?;
            let sentences = fields[3]
                .parse::<u64>()
                .map_err(|e| err(format!("sentences: {e}")))?;
            rows.push(AggregateRow {
                x,
                mean_words,
                mean_syllables,
                sentences,
            });
        }
        AggregateTable::from_rows(rows)
    }

    pub fn to_json(&self) -> String {
        let doc = TableJson {
            schema_version: TABLE_SCHEMA_VERSION,
            total_sentences: self.total_sentences,
            rows: self.rows.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("table serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, TableError> {
        let doc: TableJson = serde_json::from_str(text)?;
        if doc.schema_version != TABLE_SCHEMA_VERSION {
            return Err(TableError::SchemaVersion(doc.schema_version));
        }
        let table = AggregateTable::from_rows(doc.rows)?;
        if table.total_sentences != doc.total_sentences {
            return Err(TableError::Invalid {
                x: 0,
                message: format!(
                    "total_sentences {} does not match row sum {}",
                    doc.total_sentences, table.total_sentences
                ),
            });
        }
        Ok(table)
    }

    /// Reads TSV or JSON, deciding by the first non-blank character.
    pub fn parse(text: &str) -> Result<Self, TableError> {
        if text.trim_start().starts_with('{') {
            AggregateTable::from_json(text)
        } else {
            AggregateTable::from_tsv(text)
        }
    }
}
