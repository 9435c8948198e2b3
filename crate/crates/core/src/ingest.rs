//! Tokenization of raw text and reading/writing of the tagged vertical format.
//!
//! A word is a maximal run of letters and digits. Apostrophes and hyphens
//! between two letters or digits stay inside the word (`п'ять`, `будь-хто`);
//! at the edge of a run they are punctuation. Every other non-whitespace
//! character is a one-character punctuation token.
//!
//! The vertical format has one token per line:
//!
//! ```text
//! SURFACE<TAB>TAG[<TAB>DASH_PRED]
//! ```
//!
//! A blank line ends a sentence and lines starting with `#` are comments.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IngestError {
    #[error("invalid UTF-8 at byte offset {offset}")]
    InvalidEncoding { offset: usize },
    #[error("line {line}: {message}")]
    MalformedLine { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TokenKind {
    Word,
    Punct,
    Number,
}

impl TokenKind {
    /// Words and numbers both count toward sentence length.
    pub fn is_wordlike(self) -> bool {
        matches!(self, TokenKind::Word | TokenKind::Number)
    }
}

/// Grammatical category carried by a tagged token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GrammTag {
    VerbFin,
    Gerund,
    Infinitive,
    Participle,
    Predicative,
    Conj,
    Other,
}

impl GrammTag {
    pub const ALL: [GrammTag; 7] = [
        GrammTag::VerbFin,
        GrammTag::Gerund,
        GrammTag::Infinitive,
        GrammTag::Participle,
        GrammTag::Predicative,
        GrammTag::Conj,
        GrammTag::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GrammTag::VerbFin => "VERB_FIN",
            GrammTag::Gerund => "GERUND",
            GrammTag::Infinitive => "INFINITIVE",
            GrammTag::Participle => "PARTICIPLE",
            GrammTag::Predicative => "PREDICATIVE",
            GrammTag::Conj => "CONJ",
            GrammTag::Other => "OTHER",
        }
    }
}

impl fmt::Display for GrammTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GrammTag {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GrammTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    surface: String,
    kind: TokenKind,
    tag: Option<GrammTag>,
    clause_dash: bool,
}

impl Token {
    /// Builds an untagged token, classifying the surface. Returns `None` for
    /// an empty surface or one containing whitespace.
    pub fn new(surface: impl Into<String>) -> Option<Token> {
        let surface: String = surface.into().nfc().collect();
        let kind = classify(&surface)?;
        Some(Token {
            surface,
            kind,
            tag: None,
            clause_dash: false,
        })
    }

    pub fn tagged(surface: impl Into<String>, tag: GrammTag) -> Option<Token> {
        Token::new(surface).map(|t| t.with_tag(tag))
    }

    pub fn with_tag(mut self, tag: GrammTag) -> Token {
        self.tag = Some(tag);
        self
    }

    /// Marks a dash as standing for an omitted verb. Returns `None` when the
    /// token is not a dash.
    pub fn into_clause_dash(mut self) -> Option<Token> {
        if self.kind != TokenKind::Punct || !is_dash_surface(&self.surface) {
            return None;
        }
        self.clause_dash = true;
        Some(self)
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }

    pub fn kind(&self) -> TokenKind {
        self.kind
    }

    pub fn tag(&self) -> Option<GrammTag> {
        self.tag
    }

    /// Tag used by the clause counter: untagged tokens count as `OTHER`.
    pub fn effective_tag(&self) -> GrammTag {
        self.tag.unwrap_or(GrammTag::Other)
    }

    pub fn is_clause_dash(&self) -> bool {
        self.clause_dash
    }

    pub fn is_wordlike(&self) -> bool {
        self.kind.is_wordlike()
    }

    pub fn is_comma(&self) -> bool {
        self.kind == TokenKind::Punct && self.surface == ","
    }
}

const APOSTROPHES: [char; 3] = ['\u{02BC}', '\'', '\u{2019}'];
const HYPHENS: [char; 3] = ['-', '\u{2010}', '\u{2011}'];
const DASHES: [char; 6] = ['-', '\u{2012}', '\u{2013}', '\u{2014}', '\u{2015}', '\u{2212}'];

fn is_joiner(c: char) -> bool {
    APOSTROPHES.contains(&c) || HYPHENS.contains(&c)
}

/// Letters and digits, excluding apostrophe-like modifier letters.
fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() && !APOSTROPHES.contains(&c)
}

pub fn is_dash_surface(s: &str) -> bool {
    let mut chars = s.chars();
    matches!((chars.next(), chars.next()), (Some(c), None) if DASHES.contains(&c))
}

fn classify(surface: &str) -> Option<TokenKind> {
    if surface.is_empty() || surface.chars().any(char::is_whitespace) {
        return None;
    }
    if !surface.chars().any(is_word_char) {
        return Some(TokenKind::Punct);
    }
    if surface.chars().all(char::is_numeric) {
        Some(TokenKind::Number)
    } else {
        Some(TokenKind::Word)
    }
}

/// Tokenizes raw text. The input is NFC-normalized first; no tags are set.
pub fn read_raw(text: &str) -> Vec<Token> {
    let text: String = text.nfc().collect();
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if is_word_char(c) {
            let start = i;
            i += 1;
            loop {
                if i < chars.len() && is_word_char(chars[i]) {
                    i += 1;
                } else if i + 1 < chars.len() && is_joiner(chars[i]) && is_word_char(chars[i + 1]) {
                    i += 2;
                } else {
                    break;
                }
            }
            let surface: String = chars[start..i].iter().collect();
            let kind = if surface.chars().all(char::is_numeric) {
                TokenKind::Number
            } else {
                TokenKind::Word
            };
            tokens.push(Token {
                surface,
                kind,
                tag: None,
                clause_dash: false,
            });
        } else {
            tokens.push(Token {
                surface: c.to_string(),
                kind: TokenKind::Punct,
                tag: None,
                clause_dash: false,
            });
            i += 1;
        }
    }
    tokens
}

/// Like [`read_raw`] but starts from bytes, reporting where UTF-8 decoding fails.
pub fn read_raw_bytes(bytes: &[u8]) -> Result<Vec<Token>, IngestError> {
    let text = std::str::from_utf8(bytes).map_err(|e| IngestError::InvalidEncoding {
        offset: e.valid_up_to(),
    })?;
    Ok(read_raw(text))
}

/// A tagged token stream plus the sentence boundaries given by blank lines.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TaggedStream {
    pub tokens: Vec<Token>,
    /// Token indices where a blank line started a new sentence.
    pub boundaries: Vec<usize>,
    pub warnings: Vec<String>,
}

pub const DASH_PRED: &str = "DASH_PRED";
pub const PUNCT_TAG: &str = "PUNCT";

pub fn read_tagged(text: &str) -> Result<TaggedStream, IngestError> {
    let mut stream = TaggedStream::default();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.strip_suffix('\r').unwrap_or(raw_line);
        if line.starts_with('#') {
            continue;
        }
        if line.trim().is_empty() {
            let at = stream.tokens.len();
            if at > 0 && stream.boundaries.last() != Some(&at) {
                stream.boundaries.push(at);
            }
            continue;
        }
        let token = parse_vertical_line(line, line_no, &mut stream.warnings)?;
        stream.tokens.push(token);
    }
    // A trailing blank line does not open a sentence.
    let len = stream.tokens.len();
    stream.boundaries.retain(|&b| b < len);
    Ok(stream)
}

pub fn read_tagged_bytes(bytes: &[u8]) -> Result<TaggedStream, IngestError> {
    let text = std::str::from_utf8(bytes).map_err(|e| IngestError::InvalidEncoding {
        offset: e.valid_up_to(),
    })?;
    read_tagged(text)
}

fn parse_vertical_line(
    line: &str,
    line_no: usize,
    warnings: &mut Vec<String>,
) -> Result<Token, IngestError> {
    let malformed = |message: String| IngestError::MalformedLine {
        line: line_no,
        message,
    };
    let fields: Vec<&str> = line.split('\t').collect();
    if !(2..=3).contains(&fields.len()) {
        return Err(malformed(format!(
            "expected 2 or 3 tab-separated fields, found {}",
            fields.len()
        )));
    }
    let surface: String = fields[0].nfc().collect();
    let kind = classify(&surface)
        .ok_or_else(|| malformed(format!("invalid surface {:?}", fields[0])))?;
    let tag_field = fields[1].trim();

    let tag = if tag_field == PUNCT_TAG {
        if kind != TokenKind::Punct {
            return Err(malformed(format!("PUNCT tag on word surface {surface:?}")));
        }
        None
    } else {
        Some(tag_field.parse::<GrammTag>().unwrap_or_else(|()| {
            let msg = format!("line {line_no}: unknown tag {tag_field:?}, using OTHER");
            log::warn!("{msg}");
            warnings.push(msg);
            GrammTag::Other
        }))
    };

    let clause_dash = match fields.get(2).map(|s| s.trim()) {
        None | Some("") => false,
        Some(DASH_PRED) => {
            if kind != TokenKind::Punct || !is_dash_surface(&surface) {
                return Err(malformed(format!("DASH_PRED on non-dash {surface:?}")));
            }
            true
        }
        Some(other) => return Err(malformed(format!("unknown annotation {other:?}"))),
    };

    Ok(Token {
        surface,
        kind,
        tag,
        clause_dash,
    })
}

fn write_token_line(out: &mut String, token: &Token) {
    out.push_str(&token.surface);
    out.push('\t');
    match token.tag {
        Some(tag) => out.push_str(tag.as_str()),
        None if token.kind == TokenKind::Punct => out.push_str(PUNCT_TAG),
        None => out.push_str(GrammTag::Other.as_str()),
    }
    if token.clause_dash {
        out.push('\t');
        out.push_str(DASH_PRED);
    }
    out.push('\n');
}

/// Serializes sentences to vertical format, one blank line between sentences.
///
/// Untagged words are written as `OTHER`. Surfaces starting with `#` cannot be
/// represented, since such lines read back as comments.
pub fn write_vertical<'a, I>(sentences: I) -> String
where
    I: IntoIterator<Item = &'a [Token]>,
{
    let mut out = String::new();
    for (i, sentence) in sentences.into_iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for token in sentence {
            write_token_line(&mut out, token);
        }
    }
    out
}
