//! Java stack trace detection.

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StackFrame {
    /// Dotted class name, always containing at least one dot.
    pub qualified_class: String,
    pub method: String,
    pub file: Option<String>,
    pub line: Option<u32>,
}

impl StackFrame {
    /// Simple class name: the last dotted segment, outer class for nested `$` names.
    pub fn simple_class(&self) -> &str {
        let last = self.qualified_class.rsplit('.').next().unwrap_or(&self.qualified_class);
        last.split('$').next().unwrap_or(last)
    }
}

fn frame_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"\bat\s+(?:[\w.$-]+(?:@[\w.-]+)?/)?((?:[A-Za-z_$][\w$]*\.)+[A-Za-z_$][\w$]*)\.([A-Za-z_$<][\w$<>]*)\(([^)\n]*)\)",
        )
        .unwrap()
    })
}

fn location_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\s*([\w$.-]+\.[A-Za-z]+)(?::(\d+))?\s*$").unwrap())
}

fn header_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\b((?:[a-z_$][\w$]*\.)+[A-Z][\w$]*(?:Exception|Error|Throwable))\b").unwrap())
}

/// Frames of the form `at pkg.Class.method(File.java:123)` in textual order.
///
/// Frames need not start a line: flattened report text with several frames
/// on one line is matched too.
pub fn detect_stack_traces(text: &str) -> Vec<StackFrame> {
    frame_re()
        .captures_iter(text)
        .map(|caps| {
            let location = caps.get(3).map(|m| m.as_str()).unwrap_or("");
            let (file, line) = match location_re().captures(location) {
                Some(loc) => (
                    Some(loc[1].to_string()),
                    loc.get(2)
                        .and_then(|l| l.as_str().parse::<u32>().ok())
                        .filter(|&l| l >= 1),
                ),
                None => (None, None),
            };
            StackFrame {
                qualified_class: caps[1].to_string(),
                method: caps[2].to_string(),
                file,
                line,
            }
        })
        .collect()
}

/// Qualified exception or error class names such as `java.lang.NullPointerException`.
pub fn detect_exception_headers(text: &str) -> Vec<String> {
    header_re().captures_iter(text).map(|c| c[1].to_string()).collect()
}
