//! Turning free-form LLM replies into entity lists.
//!
//! Replies mix bare entity lists ("Foo bar baz") with prose ("Here is the
//! query: ..."). Each line is judged separately: a line containing English
//! stopwords is prose and only code-like tokens (or corpus vocabulary) survive
//! from it; a line without stopwords is read as a token list.

use std::collections::HashSet;

use crate::corpus::stopwords::{is_english_stopword, is_java_keyword};
use crate::corpus::{is_identifier, CorpusIndex};
use crate::{Error, Result};

/// Words that frame an answer rather than name an entity.
const REPLY_NOISE: &[&str] = &[
    "query",
    "queries",
    "entity",
    "entities",
    "class",
    "classes",
    "method",
    "methods",
    "relevant",
    "root",
    "cause",
    "bug",
    "report",
    "keyword",
    "keywords",
    "search",
    "term",
    "terms",
    "based",
    "answer",
    "possible",
    "potential",
    "likely",
    "related",
    "following",
    "programming",
    "sure",
    "okay",
    "ok",
    "note",
    "sorry",
    "unable",
    "determine",
];

struct Candidate<'a> {
    text: &'a str,
    call_suffix: bool,
    from_path: bool,
}

/// Extract entity tokens from an LLM reply, in order, deduplicated.
///
/// `vocabulary`, when given, also admits plain lowercase words from prose
/// lines that occur in the corpus.
pub fn parse_llm_reply(text: &str, vocabulary: Option<&CorpusIndex>) -> Result<Vec<String>> {
    let mut out: Vec<String> = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for line in text.lines() {
        let candidates = line_candidates(line);
        let prose = candidates.iter().any(|c| is_english_stopword(&c.text.to_lowercase()));
        for c in candidates {
            if !is_identifier(c.text) || c.text.len() < 2 {
                continue;
            }
            let lower = c.text.to_lowercase();
            if is_java_keyword(&lower) || is_english_stopword(&lower) {
                continue;
            }
            let code_like = c.call_suffix || is_code_like(c.text);
            if !code_like && REPLY_NOISE.contains(&lower.as_str()) {
                continue;
            }
            let in_vocab = vocabulary.is_some_and(|v| v.contains_token(&lower));
            let keep = if c.from_path {
                code_like
            } else {
                code_like || !prose || in_vocab
            };
            if keep && seen.insert(c.text.to_string()) {
                out.push(c.text.to_string());
            }
        }
    }
    if out.is_empty() {
        Err(Error::ReplyUnparseable)
    } else {
        Ok(out)
    }
}

/// camelCase / PascalCase with an inner capital, or snake_case.
pub(crate) fn is_code_like(token: &str) -> bool {
    if token.contains('_') {
        return true;
    }
    let has_lower = token.chars().any(|c| c.is_ascii_lowercase());
    has_lower && token.chars().skip(1).any(|c| c.is_ascii_uppercase())
}

fn line_candidates(line: &str) -> Vec<Candidate<'_>> {
    let mut out = Vec::new();
    let pieces = line
        .split(|c: char| c.is_whitespace() || matches!(c, ',' | ';' | '|' | '`' | '*' | '"' | '[' | ']' | '{' | '}'))
        .filter(|p| !p.is_empty());
    for piece in pieces {
        let piece =
            piece.trim_matches(|c: char| matches!(c, '.' | ':' | '!' | '?' | '\'' | '-' | '#' | '>' | '<' | ')'));
        let (piece, call_suffix) = match piece.find('(') {
            Some(i) => (&piece[..i], true),
            None => (piece, false),
        };
        let piece = piece.strip_suffix(".java").unwrap_or(piece);
        if piece.contains('.') {
            out.extend(
                piece
                    .split('.')
                    .filter(|s| !s.is_empty())
                    .enumerate()
                    .map(|(i, s)| Candidate {
                        text: s,
                        call_suffix: call_suffix && i + 1 == piece.split('.').filter(|s| !s.is_empty()).count(),
                        from_path: true,
                    }),
            );
        } else if !piece.is_empty() {
            out.push(Candidate {
                text: piece,
                call_suffix,
                from_path: false,
            });
        }
    }
    out
}
