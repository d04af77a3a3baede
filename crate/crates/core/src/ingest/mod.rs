//! Planning-document extractions: schema, unit normalization, graph instantiation
//! and rule compilation.

mod client;
mod compile;
mod instantiate;
mod prompt;
mod schema;
mod units;

pub use client::{document_hash, extract_document, ExtractionClient, HttpClient, ReplayClient};
pub use compile::{compile_rules, compile_rules_tagged, parse_gazetteer, resolve_scope, CompiledRules, Gazetteer};
pub use instantiate::{instantiate, instantiate_tagged, split, AttrValue, AttributeSnippet, Minter};
pub use prompt::{build_prompt, PROMPT_TEMPLATE};
pub use schema::{
    parse_extraction, Category, Component, ConstraintSnippet, DocumentMetadata, ExtractionDocument, GoverningEntity,
};
pub use units::{convert_to, normalize_quantity, CanonicalUnit, QuantityValue};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IngestError {
    #[error("empty document")]
    EmptyDocument,
    #[error("malformed extraction: {0}")]
    Malformed(String),
    #[error("ill-formed id `{0}`")]
    BadId(String),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("constraint {constraint} links to unknown component {component}")]
    DanglingComponent { constraint: String, component: String },
    #[error("constraint {0} has an empty context_quote")]
    EmptyQuote(String),
    #[error("constraint {0} has a value but no unit")]
    ValueWithoutUnit(String),
    #[error("unknown unit `{unit}` for value {value}")]
    UnknownUnit { value: String, unit: String },
    #[error("ontology violations: {0}")]
    Ontology(String),
    #[error("gazetteer: {0}")]
    Gazetteer(String),
    #[error("extraction client: {0}")]
    Client(String),
}
