//! Entity-only queries built by an LLM, validated against the corpus, and
//! reformulated from user feedback.

mod engine;
mod prompt;
mod provider;
mod reply;

pub use engine::{
    fallback_entities, validate_entities, Dialogue, Feedback, FeedbackKind, Provenance, ProviderFailurePolicy, Query,
    QueryConfig, QueryEngine, Turn, MAX_CYCLES_CAP,
};
pub use prompt::{
    build_prompt, report_text, Exemplar, Message, PromptTemplate, Role, ShotMode, EXPANSION_INSTRUCTION,
    REDUCTION_INSTRUCTION, REPORT_SLOT, STACK_TRACE_INSTRUCTION,
};
pub use provider::{Conversation, ConversationContext, LlmProvider, MockFixtures, MockProvider, ScriptedReply};
#[cfg(feature = "http-provider")]
pub use provider::{HttpProvider, HttpProviderConfig};
pub use reply::parse_llm_reply;
