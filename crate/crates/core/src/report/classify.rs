use std::collections::BTreeSet;
use std::sync::OnceLock;

use regex::Regex;

use super::{detect_stack_traces, BugReport, Category};

fn identifier_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[A-Za-z_][A-Za-z0-9_]*").unwrap())
}

fn call_suffix_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"([A-Za-z_][A-Za-z0-9_]*)\(\)").unwrap())
}

fn java_file_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\b([A-Za-z_$][\w$]*\.java)\b").unwrap())
}

fn package_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\b[a-z][a-z0-9_]+(?:\.[a-z][a-z0-9_]+)+\b").unwrap())
}

/// Number of camel humps: components split at lower/digit-to-upper transitions.
fn humps(word: &str) -> usize {
    let mut count = 1;
    let mut prev: Option<char> = None;
    for c in word.chars() {
        if let Some(p) = prev {
            if c.is_ascii_uppercase() && (p.is_ascii_lowercase() || p.is_ascii_digit()) {
                count += 1;
            }
        }
        prev = Some(c);
    }
    count
}

/// Programming entities mentioned in free text.
///
/// The union of camelCase identifiers with at least two humps, identifiers
/// written as calls (`name()`, returned without the parentheses), `.java`
/// file names, and dotted lowercase package-like names.
pub fn detect_program_entities(text: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for m in identifier_re().find_iter(text) {
        let w = m.as_str();
        if humps(w) >= 2 {
            out.insert(w.to_string());
        }
    }
    for caps in call_suffix_re().captures_iter(text) {
        out.insert(caps[1].to_string());
    }
    for caps in java_file_re().captures_iter(text) {
        out.insert(caps[1].to_string());
    }
    for m in package_re().find_iter(text) {
        out.insert(m.as_str().to_string());
    }
    out
}

/// ST when any stack frame is present, else PE when any entity is, else NL.
pub fn classify_text(text: &str) -> Category {
    if !detect_stack_traces(text).is_empty() {
        Category::ST
    } else if !detect_program_entities(text).is_empty() {
        Category::PE
    } else {
        Category::NL
    }
}

pub fn classify(report: &BugReport) -> Category {
    classify_text(&report.text())
}
