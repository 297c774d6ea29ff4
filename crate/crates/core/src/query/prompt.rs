//! Category-specific prompt templates.

use serde::{Deserialize, Serialize};

use crate::report::{BugReport, Category};

/// Placeholder replaced by the report text in [`PromptTemplate::user_text_pattern`].
pub const REPORT_SLOT: &str = "{report}";

pub const REDUCTION_INSTRUCTION: &str = "Analyze the bug report and construct a query by identifying programming entities (e.g., classes, methods) that may be relevant to the bug's root cause.";
pub const STACK_TRACE_INSTRUCTION: &str = "Analyze the provided stack traces and construct a query, identifying programming entities (e.g., classes, methods) relevant to the bug's root cause.";
pub const EXPANSION_INSTRUCTION: &str = "Analyze the bug report and construct a query by identifying potential programming entities (e.g., classes, methods) relevant to the bug's root cause based on your knowledge.";

const SYSTEM_TEXT: &str =
    "You help developers locate buggy source files. Reply with programming entity names only, separated by spaces.";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShotMode {
    ZeroShot,
    #[default]
    OneShot,
}

impl ShotMode {
    pub fn from_shots(shots: u8) -> Option<Self> {
        match shots {
            0 => Some(ShotMode::ZeroShot),
            1 => Some(ShotMode::OneShot),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
}

impl Message {
    pub fn system(content: impl Into<String>) -> Self {
        Message {
            role: Role::System,
            content: content.into(),
        }
    }

    pub fn user(content: impl Into<String>) -> Self {
        Message {
            role: Role::User,
            content: content.into(),
        }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Message {
            role: Role::Assistant,
            content: content.into(),
        }
    }
}

/// A worked (report, query) pair shown before the real report in one-shot mode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exemplar {
    pub report_text: String,
    pub query: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplate {
    pub category: Category,
    pub shot_mode: ShotMode,
    pub system_text: String,
    /// Contains [`REPORT_SLOT`] exactly once.
    pub user_text_pattern: String,
    pub exemplar: Option<Exemplar>,
}

impl PromptTemplate {
    pub fn for_category(category: Category, shot_mode: ShotMode) -> Self {
        let instruction = match category {
            Category::PE => REDUCTION_INSTRUCTION,
            Category::ST => STACK_TRACE_INSTRUCTION,
            Category::NL => EXPANSION_INSTRUCTION,
        };
        PromptTemplate {
            category,
            shot_mode,
            system_text: SYSTEM_TEXT.to_string(),
            user_text_pattern: format!("{instruction}\n\nBug report:\n{REPORT_SLOT}"),
            exemplar: match shot_mode {
                ShotMode::ZeroShot => None,
                ShotMode::OneShot => Some(default_exemplar(category)),
            },
        }
    }

    /// The messages sent to the provider for `report`.
    pub fn instantiate(&self, report: &BugReport) -> Vec<Message> {
        let mut messages = vec![Message::system(&self.system_text)];
        if let Some(ex) = &self.exemplar {
            messages.push(Message::user(self.user_text_pattern.replacen(
                REPORT_SLOT,
                &ex.report_text,
                1,
            )));
            messages.push(Message::assistant(&ex.query));
        }
        messages.push(Message::user(self.user_text_pattern.replacen(
            REPORT_SLOT,
            &report_text(report),
            1,
        )));
        messages
    }
}

/// Report as inserted into prompts: title and description, verbatim.
pub fn report_text(report: &BugReport) -> String {
    format!("Title: {}\nDescription: {}", report.title, report.description)
}

/// Build the prompt messages for a report.
pub fn build_prompt(report: &BugReport, category: Category, shot_mode: ShotMode) -> Vec<Message> {
    PromptTemplate::for_category(category, shot_mode).instantiate(report)
}

fn default_exemplar(category: Category) -> Exemplar {
    let (report_text, query) = match category {
        Category::PE => (
            "Title: LruCache evicts the newest entry\nDescription: When LruCache reaches its capacity, put() removes the most recently inserted key instead of the eldest one.",
            "LruCache put removeEldestEntry",
        ),
        Category::ST => (
            "Title: Crash when loading an empty configuration\nDescription: java.lang.NullPointerException\n\tat com.example.config.ConfigParser.readSection(ConfigParser.java:88)\n\tat com.example.config.ConfigLoader.load(ConfigLoader.java:41)",
            "ConfigParser readSection ConfigLoader",
        ),
        Category::NL => (
            "Title: Uploads stall on slow networks\nDescription: Large uploads never finish when the connection is slow and the progress bar stops moving.",
            "UploadManager ChunkedUploader TimeoutPolicy",
        ),
    };
    Exemplar {
        report_text: report_text.to_string(),
        query: query.to_string(),
    }
}
