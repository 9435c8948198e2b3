//! Sentence splitting.
//!
//! A run of `.`, `!`, `?` or `…` tokens closes a sentence when the next word
//! starts with an uppercase letter, or when no word follows. Closing quotes and
//! brackets directly after the run stay with the sentence they close.

use serde::Serialize;

use crate::ingest::{TaggedStream, Token, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sentence {
    pub index: usize,
    pub tokens: Vec<Token>,
}

impl Sentence {
    pub fn words(&self) -> impl Iterator<Item = &Token> {
        self.tokens.iter().filter(|t| t.is_wordlike())
    }

    pub fn word_count(&self) -> usize {
        self.words().count()
    }

    pub fn number_count(&self) -> usize {
        self.tokens
            .iter()
            .filter(|t| t.kind() == TokenKind::Number)
            .count()
    }
}

pub fn is_delimiter(token: &Token) -> bool {
    token.kind() == TokenKind::Punct && matches!(token.surface(), "." | "!" | "?" | "…")
}

fn is_closing(token: &Token) -> bool {
    token.kind() == TokenKind::Punct
        && matches!(
            token.surface(),
            "»" | "\"" | "”" | "“" | "’" | "'" | ")" | "]" | "}" | "›"
        )
}

/// True when the next word-like token after `from` is a capitalized word, or
/// when no word-like token follows at all.
fn boundary_follows(tokens: &[Token], from: usize) -> bool {
    match tokens[from..].iter().find(|t| t.is_wordlike()) {
        None => true,
        Some(t) if t.kind() == TokenKind::Word => {
            t.surface().chars().next().is_some_and(char::is_uppercase)
        }
        Some(_) => false,
    }
}

/// Splits a token stream using the delimiter rule.
pub fn split_sentences(tokens: &[Token]) -> Vec<Sentence> {
    let mut cuts = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if !is_delimiter(&tokens[i]) {
            i += 1;
            continue;
        }
        let mut end = i;
        while end < tokens.len() && is_delimiter(&tokens[end]) {
            end += 1;
        }
        while end < tokens.len() && is_closing(&tokens[end]) {
            end += 1;
        }
        if end < tokens.len() && boundary_follows(tokens, end) {
            cuts.push(end);
        }
        i = end;
    }
    assemble(tokens, &cuts)
}

/// Splits a tagged stream. Blank-line boundaries, when the file has any, are
/// the only boundaries; otherwise the delimiter rule applies.
pub fn split_tagged(stream: &TaggedStream) -> Vec<Sentence> {
    if stream.boundaries.is_empty() {
        split_sentences(&stream.tokens)
    } else {
        assemble(&stream.tokens, &stream.boundaries)
    }
}

/// Cuts `tokens` at the given positions, merging word-less pieces forward
/// (or backward for a trailing piece) and numbering the result.
fn assemble(tokens: &[Token], cuts: &[usize]) -> Vec<Sentence> {
    let mut pieces: Vec<Vec<Token>> = Vec::new();
    let mut pending: Vec<Token> = Vec::new();
    let mut start = 0;
    for &end in cuts.iter().chain(std::iter::once(&tokens.len())) {
        if end <= start {
            continue;
        }
        pending.extend_from_slice(&tokens[start..end]);
        start = end;
        if pending.iter().any(Token::is_wordlike) {
            pieces.push(std::mem::take(&mut pending));
        }
    }
    if !pending.is_empty() {
        if let Some(last) = pieces.last_mut() {
            last.extend(pending);
        }
    }
    pieces
        .into_iter()
        .enumerate()
        .map(|(index, tokens)| Sentence { index, tokens })
        .collect()
}
