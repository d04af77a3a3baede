use std::path::PathBuf;

use sha2::{Digest, Sha256};

use super::{build_prompt, parse_extraction, ExtractionDocument, IngestError};

/// Source of raw structured text for a prompt built from `document`.
pub trait ExtractionClient {
    fn extract(&self, prompt: &str, document: &str) -> Result<String, IngestError>;
}

/// Hex SHA-256 of the document text; the replay store key.
pub fn document_hash(document: &str) -> String {
    format!("{:x}", Sha256::digest(document.as_bytes()))
}

/// Serves stored responses from `<dir>/<document-hash>.json`.
#[derive(Debug, Clone)]
pub struct ReplayClient {
    dir: PathBuf,
}

impl ReplayClient {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ReplayClient { dir: dir.into() }
    }

    pub fn path_for(&self, document: &str) -> PathBuf {
        self.dir.join(format!("{}.json", document_hash(document)))
    }
}

impl ExtractionClient for ReplayClient {
    fn extract(&self, _prompt: &str, document: &str) -> Result<String, IngestError> {
        let path = self.path_for(document);
        std::fs::read_to_string(&path).map_err(|e| IngestError::Client(format!("{}: {e}", path.display())))
    }
}

/// Minimal chat-completion client: POSTs `{model, messages, temperature: 0}` and reads
/// `choices[0].message.content`.
#[derive(Debug, Clone)]
pub struct HttpClient {
    pub endpoint: String,
    pub model: String,
    pub api_key: Option<String>,
}

impl ExtractionClient for HttpClient {
    fn extract(&self, prompt: &str, _document: &str) -> Result<String, IngestError> {
        let body = serde_json::json!({
            "model": self.model,
            "temperature": 0,
            "messages": [{"role": "user", "content": prompt}],
        });
        let mut req = ureq::post(&self.endpoint).header("Content-Type", "application/json");
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", format!("Bearer {key}"));
        }
        let mut resp = req.send_json(&body).map_err(|e| IngestError::Client(e.to_string()))?;
        let v: serde_json::Value = resp.body_mut().read_json().map_err(|e| IngestError::Client(e.to_string()))?;
        v.pointer("/choices/0/message/content")
            .and_then(|c| c.as_str())
            .map(str::to_string)
            .ok_or_else(|| IngestError::Client("response has no choices[0].message.content".into()))
    }
}

/// Prompt, call the client, and parse the answer. Warnings from both steps are merged.
pub fn extract_document(
    client: &dyn ExtractionClient,
    document: &str,
) -> Result<(ExtractionDocument, Vec<String>), IngestError> {
    let (prompt, mut warnings) = build_prompt(document)?;
    let raw = client.extract(&prompt, document)?;
    let (doc, more) = parse_extraction(&raw)?;
    warnings.extend(more);
    Ok((doc, warnings))
}
