//! Declaration-level entity extraction for Java-style sources.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::stopwords::is_java_keyword;

/// Signature and doc text of one declared method.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodApi {
    pub name: String,
    pub text: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Entities {
    pub class_names: BTreeSet<String>,
    pub method_names: BTreeSet<String>,
    pub api_text: String,
    pub method_apis: Vec<MethodApi>,
}

/// Words that may precede a call but never a declared method name.
const NON_TYPE_PREFIX: &[&str] = &[
    "new",
    "return",
    "throw",
    "else",
    "case",
    "yield",
    "assert",
    "instanceof",
    "await",
    "do",
    "extends",
    "implements",
    "throws",
    "import",
    "package",
];

const MODIFIERS: &[&str] = &[
    "public",
    "private",
    "protected",
    "static",
    "final",
    "abstract",
    "synchronized",
    "native",
    "default",
    "strictfp",
    "transient",
];

fn declaration_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\b(class|interface|enum)\s+([A-Za-z_][A-Za-z0-9_]*)").unwrap())
}

fn call_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"([A-Za-z_][A-Za-z0-9_]*)\s*\(").unwrap())
}

/// Extract class names, method names and API text from a source file.
pub fn extract_entities(raw_text: &str) -> Entities {
    let masked = mask_source(raw_text);
    let code = masked.code.as_str();

    enum Event {
        Doc(String),
        Class(String),
        Method {
            name: String,
            signature: String,
            public: bool,
        },
    }
    let mut events: Vec<(usize, Event)> = masked
        .doc_comments
        .iter()
        .map(|(end, text)| (*end, Event::Doc(text.clone())))
        .collect();

    for caps in declaration_re().captures_iter(code) {
        let kw = caps.get(1).unwrap();
        if kw.start() > 0 && code.as_bytes()[kw.start() - 1] == b'.' {
            continue;
        }
        let name = caps.get(2).unwrap();
        if is_java_keyword(name.as_str()) {
            continue;
        }
        events.push((name.start(), Event::Class(name.as_str().to_string())));
    }

    let mut line_start = 0;
    for line in code.split_inclusive('\n') {
        for caps in call_re().captures_iter(line) {
            let name = caps.get(1).unwrap();
            let stmt_start = line[..name.start()].rfind(['{', '}', ';']).map(|i| i + 1).unwrap_or(0);
            if let Some(public) = declaration_context(&line[stmt_start..name.start()], name.as_str()) {
                events.push((
                    line_start + name.start(),
                    Event::Method {
                        name: name.as_str().to_string(),
                        signature: signature_of(&line[stmt_start..]),
                        public,
                    },
                ));
            }
        }
        line_start += line.len();
    }

    events.sort_by_key(|(pos, _)| *pos);

    let mut out = Entities::default();
    let mut api_parts: Vec<String> = Vec::new();
    let mut pending_doc: Option<String> = None;
    for (_, event) in events {
        match event {
            Event::Doc(text) => {
                if !text.is_empty() {
                    api_parts.push(text.clone());
                }
                pending_doc = Some(text);
            }
            Event::Class(name) => {
                pending_doc = None;
                out.class_names.insert(name);
            }
            Event::Method {
                name,
                signature,
                public,
            } => {
                if public {
                    api_parts.push(signature.clone());
                }
                let text = match pending_doc.take() {
                    Some(doc) if !doc.is_empty() => format!("{doc}\n{signature}"),
                    _ => signature,
                };
                out.method_names.insert(name.clone());
                out.method_apis.push(MethodApi { name, text });
            }
        }
    }
    out.api_text = api_parts.join("\n");
    out
}

/// `Some(is_public)` when `name(` in this line reads as a declaration.
fn declaration_context(before: &str, name: &str) -> Option<bool> {
    if is_java_keyword(name) {
        return None;
    }
    let trimmed = before.trim_end();
    let last = trimmed.chars().last()?;
    let typed = if last == '>' {
        trimmed.contains('<')
    } else if last == ']' {
        trimmed.ends_with("[]")
    } else if last.is_alphanumeric() || last == '_' {
        let word_start = trimmed
            .rfind(|c: char| !(c.is_alphanumeric() || c == '_'))
            .map(|i| i + 1)
            .unwrap_or(0);
        let word = &trimmed[word_start..];
        if trimmed[..word_start].ends_with('.') || NON_TYPE_PREFIX.contains(&word) {
            false
        } else {
            !is_java_keyword(word) || MODIFIERS.contains(&word) || is_primitive_or_void(word)
        }
    } else {
        false
    };
    if !typed {
        return None;
    }
    let public = trimmed
        .split(|c: char| !(c.is_alphanumeric() || c == '_'))
        .any(|w| w == "public");
    Some(public)
}

fn is_primitive_or_void(word: &str) -> bool {
    matches!(
        word,
        "void" | "int" | "long" | "short" | "byte" | "char" | "boolean" | "float" | "double"
    )
}

fn signature_of(line: &str) -> String {
    let cut = line.find(['{', ';']).unwrap_or(line.len());
    line[..cut].split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Source text with comments and literals blanked, plus the doc comments found.
pub(crate) struct MaskedSource {
    pub code: String,
    /// `(end byte offset, marker-stripped text)` per `/** ... */` comment.
    pub doc_comments: Vec<(usize, String)>,
}

/// Blank out comments and string/char literals, keeping byte offsets and newlines.
pub(crate) fn mask_source(raw: &str) -> MaskedSource {
    let bytes = raw.as_bytes();
    let mut code = bytes.to_vec();
    let mut docs = Vec::new();
    let blank = |code: &mut Vec<u8>, from: usize, to: usize| {
        for b in &mut code[from..to] {
            if *b != b'\n' {
                *b = b' ';
            }
        }
    };
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'/' if bytes.get(i + 1) == Some(&b'/') => {
                let end = raw[i..].find('\n').map(|o| i + o).unwrap_or(bytes.len());
                blank(&mut code, i, end);
                i = end;
            }
            b'/' if bytes.get(i + 1) == Some(&b'*') => {
                let end = raw[i + 2..].find("*/").map(|o| i + 2 + o + 2).unwrap_or(bytes.len());
                let is_doc = bytes.get(i + 2) == Some(&b'*') && bytes.get(i + 3) != Some(&b'/');
                if is_doc {
                    docs.push((end, strip_doc_markers(&raw[i..end])));
                }
                blank(&mut code, i, end);
                i = end;
            }
            b'"' if raw[i..].starts_with("\"\"\"") => {
                let end = raw[i + 3..]
                    .find("\"\"\"")
                    .map(|o| i + 3 + o + 3)
                    .unwrap_or(bytes.len());
                blank(&mut code, i, end);
                i = end;
            }
            q @ (b'"' | b'\'') => {
                let mut j = i + 1;
                while j < bytes.len() && bytes[j] != q && bytes[j] != b'\n' {
                    if bytes[j] == b'\\' {
                        j += 1;
                    }
                    j += 1;
                }
                let end = (j + 1).min(bytes.len());
                blank(&mut code, i, end);
                i = end;
            }
            _ => i += 1,
        }
    }
    // Blanking only touches whole ASCII-delimited regions, so the bytes stay UTF-8.
    let code = String::from_utf8(code).unwrap_or_else(|e| String::from_utf8_lossy(e.as_bytes()).into_owned());
    MaskedSource {
        code,
        doc_comments: docs,
    }
}

fn strip_doc_markers(comment: &str) -> String {
    let inner = comment.trim_start_matches("/**");
    let inner = inner.strip_suffix("*/").unwrap_or(inner);
    inner
        .lines()
        .map(|l| l.trim_start().trim_start_matches('*'))
        .flat_map(str::split_whitespace)
        .collect::<Vec<_>>()
        .join(" ")
}
