//! LLM provider abstraction and the deterministic fixture-backed mock.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::prompt::Message;
use crate::{Error, Result};

/// Routing metadata that travels with a conversation.
///
/// Providers that talk to a real model ignore it; the mock uses it as its
/// lookup key.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConversationContext {
    pub report_id: String,
    pub cycle: u32,
    /// Every class named in feedback so far, sorted.
    pub feedback_classes: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conversation {
    pub messages: Vec<Message>,
    pub context: ConversationContext,
}

pub trait LlmProvider: Send + Sync {
    fn name(&self) -> &str;

    /// Reply text for the conversation so far.
    fn complete(&self, conversation: &Conversation) -> Result<String>;
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct MockKey {
    report_id: String,
    cycle: u32,
    feedback_classes: Vec<String>,
}

/// One scripted reply in a mock fixture file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScriptedReply {
    pub report_id: String,
    #[serde(default)]
    pub cycle: u32,
    /// Classes named in feedback so far; order does not matter.
    #[serde(default)]
    pub feedback: Vec<String>,
    pub reply: String,
}

/// Mock fixture document: `{"default_reply": ..., "replies": [...]}`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MockFixtures {
    #[serde(default)]
    pub default_reply: Option<String>,
    #[serde(default)]
    pub replies: Vec<ScriptedReply>,
}

/// Replies looked up by (report id, cycle, sorted feedback classes).
#[derive(Debug, Clone, Default)]
pub struct MockProvider {
    replies: BTreeMap<MockKey, String>,
    default_reply: Option<String>,
}

impl MockProvider {
    pub fn new(fixtures: MockFixtures) -> Self {
        let replies = fixtures
            .replies
            .into_iter()
            .map(|r| {
                let mut feedback_classes = r.feedback;
                feedback_classes.sort();
                feedback_classes.dedup();
                (
                    MockKey {
                        report_id: r.report_id,
                        cycle: r.cycle,
                        feedback_classes,
                    },
                    r.reply,
                )
            })
            .collect();
        MockProvider {
            replies,
            default_reply: fixtures.default_reply,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let fixtures: MockFixtures = serde_json::from_str(text).map_err(|e| Error::json("mock fixtures", e))?;
        Ok(Self::new(fixtures))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn with_default(mut self, reply: impl Into<String>) -> Self {
        self.default_reply = Some(reply.into());
        self
    }

    /// Add or replace one scripted reply.
    pub fn script(mut self, report_id: &str, cycle: u32, feedback: &[&str], reply: impl Into<String>) -> Self {
        let mut feedback_classes: Vec<String> = feedback.iter().map(|s| s.to_string()).collect();
        feedback_classes.sort();
        feedback_classes.dedup();
        self.replies.insert(
            MockKey {
                report_id: report_id.to_string(),
                cycle,
                feedback_classes,
            },
            reply.into(),
        );
        self
    }
}

impl LlmProvider for MockProvider {
    fn name(&self) -> &str {
        "mock"
    }

    fn complete(&self, conversation: &Conversation) -> Result<String> {
        let ctx = &conversation.context;
        let mut feedback_classes = ctx.feedback_classes.clone();
        feedback_classes.sort();
        feedback_classes.dedup();
        let key = MockKey {
            report_id: ctx.report_id.clone(),
            cycle: ctx.cycle,
            feedback_classes,
        };
        self.replies
            .get(&key)
            .or(self.default_reply.as_ref())
            .cloned()
            .ok_or_else(|| Error::Provider {
                message: format!(
                    "no scripted reply for report {} cycle {} feedback {:?}",
                    key.report_id, key.cycle, key.feedback_classes
                ),
                retriable: false,
            })
    }
}

#[cfg(feature = "http-provider")]
pub use http::{HttpProvider, HttpProviderConfig};

#[cfg(feature = "http-provider")]
mod http {
    use std::time::Duration;

    use serde::{Deserialize, Serialize};

    use super::{Conversation, LlmProvider};
    use crate::query::prompt::Message;
    use crate::{Error, Result};

    pub const ENDPOINT_VAR: &str = "FAULTLINE_LLM_ENDPOINT";
    pub const MODEL_VAR: &str = "FAULTLINE_LLM_MODEL";
    pub const API_KEY_VAR: &str = "FAULTLINE_LLM_API_KEY";

    #[derive(Debug, Clone)]
    pub struct HttpProviderConfig {
        pub endpoint: String,
        pub model: String,
        pub api_key: Option<String>,
        pub timeout: Duration,
    }

    impl HttpProviderConfig {
        /// Read endpoint, model and key from `FAULTLINE_LLM_*` variables.
        pub fn from_env() -> Result<Self> {
            let var = |name: &str| std::env::var(name).ok().filter(|v| !v.trim().is_empty());
            let endpoint = var(ENDPOINT_VAR).ok_or_else(|| Error::Config(format!("{ENDPOINT_VAR} is not set")))?;
            let model = var(MODEL_VAR).ok_or_else(|| Error::Config(format!("{MODEL_VAR} is not set")))?;
            Ok(HttpProviderConfig {
                endpoint,
                model,
                api_key: var(API_KEY_VAR),
                timeout: Duration::from_secs(120),
            })
        }
    }

    #[derive(Serialize)]
    struct ChatRequest<'a> {
        model: &'a str,
        messages: &'a [Message],
    }

    #[derive(Deserialize)]
    struct ChatResponse {
        content: String,
    }

    /// Chat endpoint speaking `{model, messages:[{role, content}]}` -> `{content}`.
    pub struct HttpProvider {
        config: HttpProviderConfig,
        client: reqwest::blocking::Client,
    }

    impl HttpProvider {
        pub fn new(config: HttpProviderConfig) -> Result<Self> {
            let client = reqwest::blocking::Client::builder()
                .timeout(config.timeout)
                .build()
                .map_err(|e| Error::Config(format!("http client: {e}")))?;
            Ok(HttpProvider { config, client })
        }
    }

    impl LlmProvider for HttpProvider {
        fn name(&self) -> &str {
            "http"
        }

        fn complete(&self, conversation: &Conversation) -> Result<String> {
            let body = ChatRequest {
                model: &self.config.model,
                messages: &conversation.messages,
            };
            let mut request = self.client.post(&self.config.endpoint).json(&body);
            if let Some(key) = &self.config.api_key {
                request = request.bearer_auth(key);
            }
            let response = request.send().map_err(|e| Error::Provider {
                message: e.to_string(),
                retriable: e.is_timeout() || e.is_connect(),
            })?;
            let status = response.status();
            if !status.is_success() {
                return Err(Error::Provider {
                    message: format!("endpoint returned {status}"),
                    retriable: status.as_u16() == 429 || status.is_server_error(),
                });
            }
            let parsed: ChatResponse = response.json().map_err(|e| Error::Provider {
                message: format!("malformed response body: {e}"),
                retriable: false,
            })?;
            Ok(parsed.content)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn convo(report_id: &str, cycle: u32, feedback: &[&str]) -> Conversation {
        Conversation {
            messages: vec![],
            context: ConversationContext {
                report_id: report_id.into(),
                cycle,
                feedback_classes: feedback.iter().map(|s| s.to_string()).collect(),
            },
        }
    }

    #[test]
    fn lookup_ignores_feedback_order() {
        let mock = MockProvider::default().script("R", 1, &["B", "A"], "X");
        assert_eq!(mock.complete(&convo("R", 1, &["A", "B"])).unwrap(), "X");
        assert!(matches!(
            mock.complete(&convo("R", 0, &[])),
            Err(Error::Provider { retriable: false, .. })
        ));
    }

    #[test]
    fn default_reply_for_unknown_keys() {
        let mock = MockProvider::default().with_default("Fallback");
        assert_eq!(mock.complete(&convo("?", 3, &[])).unwrap(), "Fallback");
    }

    #[test]
    fn fixture_json() {
        let mock = MockProvider::from_json(
            r#"{"replies":[{"report_id":"R","reply":"A b"},{"report_id":"R","cycle":1,"feedback":["A"],"reply":"C"}]}"#,
        )
        .unwrap();
        assert_eq!(mock.complete(&convo("R", 0, &[])).unwrap(), "A b");
        assert_eq!(mock.complete(&convo("R", 1, &["A"])).unwrap(), "C");
    }
}
