//! Syllable counting by vowel letters.
//!
//! Every Ukrainian vowel letter is a syllable nucleus, so the vowel count is the
//! syllable count. Latin-script words use the Latin vowels. Digit-only tokens
//! have no syllables.

use crate::ingest::{Token, TokenKind};

const UKRAINIAN_VOWELS: [char; 10] = ['а', 'е', 'є', 'и', 'і', 'ї', 'о', 'у', 'ю', 'я'];
const LATIN_VOWELS: [char; 6] = ['a', 'e', 'i', 'o', 'u', 'y'];

fn is_vowel(c: char) -> bool {
    c.to_lowercase()
        .any(|l| UKRAINIAN_VOWELS.contains(&l) || LATIN_VOWELS.contains(&l))
}

pub fn count_in(surface: &str) -> usize {
    surface.chars().filter(|&c| is_vowel(c)).count()
}

pub fn syllable_count(token: &Token) -> usize {
    match token.kind() {
        TokenKind::Word => count_in(token.surface()),
        TokenKind::Number | TokenKind::Punct => 0,
    }
}
