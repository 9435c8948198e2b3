//! Per-sentence measurements: word, syllable and clause counts.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aggregate::SentenceLengths;
use crate::clauses::{count_clauses, count_clauses_untagged, ClauseBreakdown, Lexicon};
use crate::segment::Sentence;
use crate::syllables::syllable_count;

pub const SENTENCE_HEADER: [&str; 9] = [
    "index", "words", "syllables", "n1", "n2", "n3", "n4", "nc", "clauses",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputMode {
    Raw,
    Tagged,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub index: usize,
    pub words: u32,
    pub syllables: u32,
    /// Digit-only tokens, which count as words with no syllables.
    pub numbers: u32,
    pub breakdown: ClauseBreakdown,
}

impl SentenceRecord {
    pub fn lengths(&self) -> SentenceLengths {
        SentenceLengths {
            words: self.words,
            syllables: self.syllables,
            clauses: self.breakdown.clause_count,
        }
    }
}

/// Word lists used by the clause counter.
#[derive(Debug, Clone)]
pub struct Lexicons {
    pub predicatives: Lexicon,
    pub conjunctions: Lexicon,
}

impl Default for Lexicons {
    fn default() -> Self {
        Lexicons {
            predicatives: Lexicon::default_predicatives(),
            conjunctions: Lexicon::default_conjunctions(),
        }
    }
}

pub fn analyze_sentence(sentence: &Sentence, mode: InputMode, lexicons: &Lexicons) -> SentenceRecord {
    let breakdown = match mode {
        InputMode::Tagged => count_clauses(sentence, &lexicons.predicatives),
        InputMode::Raw => count_clauses_untagged(sentence, &lexicons.conjunctions),
    };
    SentenceRecord {
        index: sentence.index,
        words: sentence.word_count() as u32,
        syllables: sentence.words().map(syllable_count).sum::<usize>() as u32,
        numbers: sentence.number_count() as u32,
        breakdown,
    }
}

pub fn analyze(sentences: &[Sentence], mode: InputMode, lexicons: &Lexicons) -> Vec<SentenceRecord> {
    sentences
        .iter()
        .map(|s| analyze_sentence(s, mode, lexicons))
        .collect()
}

pub fn records_to_tsv(records: &[SentenceRecord]) -> String {
    let mut out = SENTENCE_HEADER.join("\t");
    out.push('\n');
    for r in records {
        let b = r.breakdown;
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.index, r.words, r.syllables, b.n1, b.n2, b.n3, b.n4, b.nc, b.clause_count
        );
    }
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RecordError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing column {0:?}")]
    MissingColumn(String),
}

/// A parsed per-sentence row. Hand-made gold files may carry only
/// `index` and `clauses`, so every other column is optional.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClauseRow {
    pub index: usize,
    pub words: Option<u32>,
    pub clauses: u32,
}

/// Reads a per-sentence TSV with a header line, keyed by column names.
pub fn read_clause_rows(text: &str) -> Result<Vec<ClauseRow>, RecordError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    let Some((_, header)) = lines.next() else {
        return Ok(Vec::new());
    };
    let columns: Vec<&str> = header.split('\t').map(str::trim).collect();
    let find = |name: &str| columns.iter().position(|c| *c == name);
    let clauses_col = find("clauses").ok_or_else(|| RecordError::MissingColumn("clauses".into()))?;
    let index_col = find("index");
    let words_col = find("words");

    let mut rows = Vec::new();
    for (line_no, line) in lines {
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        let err = |message: String| RecordError::Parse {
            line: line_no,
            message,
        };
        if fields.len() != columns.len() {
            return Err(err(format!(
                "expected {} fields, found {}",
                columns.len(),
                fields.len()
            )));
        }
        let clauses = fields[clauses_col]
            .parse::<u32>()
            .map_err(|e| err(format!("clauses: {e}")))?;
        let index = match index_col {
            Some(c) => fields[c]
                .parse::<usize>()
                .map_err(|e| err(format!("index: {e}")))?,
            None => rows.len(),
        };
        let words = words_col
            .map(|c| fields[c].parse::<u32>().map_err(|e| err(format!("words: {e}"))))
            .transpose()?;
        rows.push(ClauseRow {
            index,
            words,
            clauses,
        });
    }
    Ok(rows)
}
