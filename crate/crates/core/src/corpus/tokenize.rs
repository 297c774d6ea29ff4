//! Identifier-aware tokenizer shared by source files, reports and API text.
//!
//! Words are maximal runs of alphanumerics and underscores. Compound words
//! (camelCase or snake_case) are emitted once as the whole lowercased word and
//! once per component, so exact entity names and their lexical parts both
//! land in the vocabulary. Tokens shorter than two characters, English
//! stopwords and Java keywords are dropped. No stemming.

use std::collections::BTreeMap;

use super::stopwords::is_stopword;

/// Token multiset keyed by token text.
pub type TokenCounts = BTreeMap<String, u32>;

/// Tokenize `text` into an ordered token list (a multiset with order).
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for word in words(text) {
        push_word(word, &mut out);
    }
    out
}

/// Tokenize and count.
pub fn token_counts(text: &str) -> TokenCounts {
    let mut counts = TokenCounts::new();
    for token in tokenize(text) {
        *counts.entry(token).or_insert(0) += 1;
    }
    counts
}

fn words(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '_'))
        .filter(|w| !w.is_empty())
}

fn push_word(word: &str, out: &mut Vec<String>) {
    let word = word.trim_matches('_');
    if word.is_empty() {
        return;
    }
    let parts = split_compound(word);
    if parts.len() > 1 {
        push_token(word.to_lowercase(), out);
        for part in parts {
            push_token(part.to_lowercase(), out);
        }
    } else {
        push_token(word.to_lowercase(), out);
    }
}

fn push_token(token: String, out: &mut Vec<String>) {
    if token.chars().count() >= 2 && !is_stopword(&token) {
        out.push(token);
    }
}

/// Split on underscores and on lower/digit-to-upper transitions.
///
/// Runs of capitals stay together with their following lowercase tail, so
/// `BZip2Compressor` yields `BZip2` and `Compressor`.
pub fn split_compound(word: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    for piece in word.split('_').filter(|p| !p.is_empty()) {
        let mut start = 0;
        let mut prev: Option<char> = None;
        for (i, c) in piece.char_indices() {
            if let Some(p) = prev {
                if c.is_uppercase() && (p.is_lowercase() || p.is_ascii_digit()) {
                    parts.push(&piece[start..i]);
                    start = i;
                }
            }
            prev = Some(c);
        }
        parts.push(&piece[start..]);
    }
    parts
}
