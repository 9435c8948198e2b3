//! Clause counting from part-of-speech counters.
//!
//! For each sentence five counters are collected:
//!
//! * `n1`: verbal forms other than the infinitive (finite verbs and gerunds),
//! * `n2`: participles directly after a comma,
//! * `n3`: predicative words (tag or lexicon match),
//! * `n4`: dashes annotated as standing for an omitted verb,
//! * `nc`: conjunctions directly after a comma,
//!
//! and the clause count is `max(n1 + n2 + n3 + n4, nc + 1)`, which is never
//! below one.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{GrammTag, Token};
use crate::segment::Sentence;

const DEFAULT_PREDICATIVES: &str = include_str!("../data/predicative.txt");
const DEFAULT_CONJUNCTIONS: &str = include_str!("../data/conjunctions.txt");

/// A lowercase word list read from a one-word-per-line file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    words: HashSet<String>,
}

impl Lexicon {
    pub fn parse(text: &str) -> Lexicon {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        Lexicon { words }
    }

    pub fn default_predicatives() -> Lexicon {
        Lexicon::parse(DEFAULT_PREDICATIVES)
    }

    pub fn default_conjunctions() -> Lexicon {
        Lexicon::parse(DEFAULT_CONJUNCTIONS)
    }

    pub fn contains(&self, surface: &str) -> bool {
        self.words.contains(&surface.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClauseBreakdown {
    pub n1: u32,
    pub n2: u32,
    pub n3: u32,
    pub n4: u32,
    pub nc: u32,
    pub clause_count: u32,
}

impl ClauseBreakdown {
    pub fn from_counters(n1: u32, n2: u32, n3: u32, n4: u32, nc: u32) -> ClauseBreakdown {
        let clause_count = (n1 + n2 + n3 + n4).max(nc + 1);
        ClauseBreakdown {
            n1,
            n2,
            n3,
            n4,
            nc,
            clause_count,
        }
    }
}

fn after_comma(tokens: &[Token], i: usize) -> bool {
    i > 0 && tokens[i - 1].is_comma()
}

/// Counts clauses in a tagged sentence. Untagged words are treated as `OTHER`.
pub fn count_clauses(sentence: &Sentence, lexicon: &Lexicon) -> ClauseBreakdown {
    count_tokens(&sentence.tokens, lexicon)
}

pub fn count_tokens(tokens: &[Token], lexicon: &Lexicon) -> ClauseBreakdown {
    let (mut n1, mut n2, mut n3, mut n4, mut nc) = (0, 0, 0, 0, 0);
    for (i, token) in tokens.iter().enumerate() {
        if token.is_clause_dash() {
            n4 += 1;
            continue;
        }
        if !token.is_wordlike() {
            continue;
        }
        match token.effective_tag() {
            GrammTag::VerbFin | GrammTag::Gerund => n1 += 1,
            GrammTag::Predicative => n3 += 1,
            GrammTag::Participle if after_comma(tokens, i) => n2 += 1,
            GrammTag::Conj if after_comma(tokens, i) => nc += 1,
            _ if lexicon.contains(token.surface()) => n3 += 1,
            _ => {}
        }
    }
    ClauseBreakdown::from_counters(n1, n2, n3, n4, nc)
}

/// Lower-bound count for untagged text: only comma + conjunction pairs are
/// visible, found through a conjunction word list.
pub fn count_clauses_untagged(sentence: &Sentence, conjunctions: &Lexicon) -> ClauseBreakdown {
    let tokens = &sentence.tokens;
    let nc = tokens
        .iter()
        .enumerate()
        .filter(|(i, t)| t.is_wordlike() && after_comma(tokens, *i) && conjunctions.contains(t.surface()))
        .count() as u32;
    ClauseBreakdown::from_counters(0, 0, 0, 0, nc)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvaluationError {
    #[error("cannot align {gold} gold sentences with {auto} automatic sentences ({words} word counts)")]
    Alignment {
        gold: usize,
        auto: usize,
        words: usize,
    },
    #[error("sentence {index}: clause count must be at least 1")]
    ZeroClauses { index: usize },
}

/// One row of the manual-vs-automatic comparison: mean clause length in words
/// for sentences with `x` clauses under each count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRow {
    pub x: u32,
    pub gold_mean_words: f64,
    pub auto_mean_words: f64,
    pub gold_sentences: u64,
    pub auto_sentences: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub matches: Vec<bool>,
    pub mismatches: usize,
    pub sentences: usize,
    pub mismatch_fraction: f64,
    pub rows: Vec<EvaluationRow>,
}

/// Compares gold clause counts with automatic ones, sentence by sentence.
/// `words` holds the word count of each aligned sentence.
pub fn evaluate_counts(
    gold: &[u32],
    auto: &[u32],
    words: &[u32],
) -> Result<EvaluationReport, EvaluationError> {
    if gold.len() != auto.len() || gold.len() != words.len() {
        return Err(EvaluationError::Alignment {
            gold: gold.len(),
            auto: auto.len(),
            words: words.len(),
        });
    }
    if let Some(index) = gold.iter().chain(auto).position(|&c| c == 0) {
        return Err(EvaluationError::ZeroClauses {
            index: index % gold.len(),
        });
    }

    let matches: Vec<bool> = gold.iter().zip(auto).map(|(g, a)| g == a).collect();
    let mismatches = matches.iter().filter(|m| !**m).count();
    let mismatch_fraction = if gold.is_empty() {
        0.0
    } else {
        mismatches as f64 / gold.len() as f64
    };

    // x -> (sentences, words) for each source
    let mut gold_buckets: BTreeMap<u32, (u64, u64)> = BTreeMap::new();
    let mut auto_buckets: BTreeMap<u32, (u64, u64)> = BTreeMap::new();
    for ((&g, &a), &w) in gold.iter().zip(auto).zip(words) {
        let e = gold_buckets.entry(g).or_default();
        e.0 += 1;
        e.1 += u64::from(w);
        let e = auto_buckets.entry(a).or_default();
        e.0 += 1;
        e.1 += u64::from(w);
    }
    let max_x = gold.iter().chain(auto).copied().max().unwrap_or(0);
    let mean = |b: Option<&(u64, u64)>, x: u32| match b {
        Some(&(n, w)) if n > 0 => w as f64 / (f64::from(x) * n as f64),
        _ => 0.0,
    };
    let rows = (1..=max_x)
        .map(|x| EvaluationRow {
            x,
            gold_mean_words: mean(gold_buckets.get(&x), x),
            auto_mean_words: mean(auto_buckets.get(&x), x),
            gold_sentences: gold_buckets.get(&x).map_or(0, |b| b.0),
            auto_sentences: auto_buckets.get(&x).map_or(0, |b| b.0),
        })
        .collect();

    Ok(EvaluationReport {
        matches,
        mismatches,
        sentences: gold.len(),
        mismatch_fraction,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::read_tagged;
    use crate::segment::split_tagged;

    fn sentence(vertical: &str) -> Sentence {
        let stream = read_tagged(vertical).unwrap();
        split_tagged(&stream).remove(0)
    }

    #[test]
    fn left_branch() {
        let s = sentence("Він\tOTHER\nприйшов\tVERB_FIN\nі\tCONJ\nсів\tVERB_FIN\n.\tPUNCT\n");
        let b = count_clauses(&s, &Lexicon::default_predicatives());
        assert_eq!((b.n1, b.nc, b.clause_count), (2, 0, 2));
    }

    #[test]
    fn right_branch() {
        let s = sentence(
            "Він\tOTHER\nзнав\tVERB_FIN\n,\tPUNCT\nщо\tCONJ\nдорога\tOTHER\n,\tPUNCT\nале\tCONJ\nмовчки\tOTHER\n.\tPUNCT\n",
        );
        let b = count_clauses(&s, &Lexicon::default_predicatives());
        assert_eq!((b.n1, b.nc, b.clause_count), (1, 2, 3));
    }

    #[test]
    fn floor_of_one() {
        let s = sentence("Тиша\tOTHER\n.\tPUNCT\n");
        let b = count_clauses(&s, &Lexicon::default_predicatives());
        assert_eq!(b, ClauseBreakdown::from_counters(0, 0, 0, 0, 0));
        assert_eq!(b.clause_count, 1);
    }

    #[test]
    fn predicate_dash() {
        let s = sentence(
            "Зате\tCONJ\nсовітник\tOTHER\nМ\tOTHER\n.\tPUNCT\n—\tPUNCT\tDASH_PRED\nкартяр\tOTHER\n.\tPUNCT\n",
        );
        let b = count_clauses(&s, &Lexicon::default_predicatives());
        assert_eq!((b.n4, b.clause_count), (1, 1));
    }

    #[test]
    fn participle_needs_adjacent_comma() {
        let lex = Lexicon::default_predicatives();
        let s = sentence("з\tOTHER\nкапелюхом\tOTHER\n,\tPUNCT\nзсуненим\tPARTICIPLE\n");
        assert_eq!(count_clauses(&s, &lex).n2, 1);
        let s = sentence("з\tOTHER\nкапелюхом\tOTHER\n,\tPUNCT\n—\tPUNCT\nзсуненим\tPARTICIPLE\n");
        assert_eq!(count_clauses(&s, &lex).n2, 0);
        let s = sentence("зсунений\tPARTICIPLE\nкапелюх\tOTHER\n");
        assert_eq!(count_clauses(&s, &lex).n2, 0);
    }

    #[test]
    fn infinitive_not_counted() {
        let s = sentence("хотів\tVERB_FIN\nйти\tINFINITIVE\nспіваючи\tGERUND\n");
        let b = count_clauses(&s, &Lexicon::default_predicatives());
        assert_eq!(b.n1, 2);
    }

    #[test]
    fn lexicon_predicatives_and_no_double_count() {
        let lex = Lexicon::default_predicatives();
        let s = sentence("Треба\tOTHER\nйти\tINFINITIVE\n,\tPUNCT\nшкода\tPREDICATIVE\nнічого\tVERB_FIN\n");
        let b = count_clauses(&s, &lex);
        assert_eq!((b.n1, b.n3), (1, 2));
    }

    #[test]
    fn default_lexicon_has_ten_entries() {
        let lex = Lexicon::default_predicatives();
        assert_eq!(lex.len(), 10);
        assert!(lex.contains("Непереливки"));
    }

    #[test]
    fn untagged_uses_conjunction_list() {
        let stream = read_tagged("Він\tOTHER\nзнав\tOTHER\n,\tPUNCT\nщо\tOTHER\nале\tOTHER\n").unwrap();
        let s = split_tagged(&stream).remove(0);
        let b = count_clauses_untagged(&s, &Lexicon::default_conjunctions());
        assert_eq!((b.n1, b.nc, b.clause_count), (0, 1, 2));
    }

    #[test]
    fn evaluate_identical() {
        let counts = [1, 2, 3, 1];
        let words = [4, 9, 15, 5];
        let r = evaluate_counts(&counts, &counts, &words).unwrap();
        assert_eq!(r.mismatch_fraction, 0.0);
        assert!(r.matches.iter().all(|&m| m));
        assert_eq!(r.rows[0].gold_mean_words, 4.5);
        assert_eq!(r.rows[2].auto_mean_words, 5.0);
    }

    #[test]
    fn evaluate_layout_has_gap_rows() {
        let r = evaluate_counts(&[1, 3], &[1, 2], &[4, 9]).unwrap();
        assert_eq!(r.rows.len(), 3);
        assert_eq!(r.rows[1].gold_mean_words, 0.0);
        assert_eq!(r.rows[1].auto_mean_words, 4.5);
        assert_eq!(r.mismatches, 1);
    }

    #[test]
    fn evaluate_length_mismatch() {
        let err = evaluate_counts(&[1, 1, 1], &[1, 1, 1, 1], &[1, 1, 1]).unwrap_err();
        assert!(matches!(err, EvaluationError::Alignment { gold: 3, auto: 4, .. }));
    }
}
