use std::collections::BTreeSet;

use serde::{Deserialize, Deserializer, Serialize};

use super::{normalize_quantity, IngestError, QuantityValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    #[serde(rename = "Design Specification")]
    DesignSpecification,
    #[serde(rename = "Environmental Mitigation")]
    EnvironmentalMitigation,
    #[serde(rename = "Operational Parameter")]
    OperationalParameter,
    #[serde(rename = "Safety Standard")]
    SafetyStandard,
    #[serde(rename = "Regulatory Requirement")]
    RegulatoryRequirement,
}

impl Category {
    pub fn label(self) -> &'static str {
        match self {
            Category::DesignSpecification => "Design Specification",
            Category::EnvironmentalMitigation => "Environmental Mitigation",
            Category::OperationalParameter => "Operational Parameter",
            Category::SafetyStandard => "Safety Standard",
            Category::RegulatoryRequirement => "Regulatory Requirement",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DocumentMetadata {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub project_name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub project_location: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub component_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component_name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component_acronym: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_section_number: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSnippet {
    pub constraint_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linked_component_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<Category>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, deserialize_with = "number_or_string", skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_section_number: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geographic_scope: Option<String>,
    pub context_quote: String,
}

impl ConstraintSnippet {
    /// Canonical quantity, if value and unit are both present and the unit is known.
    pub fn quantity(&self) -> Option<QuantityValue> {
        normalize_quantity(self.value?, self.unit.as_deref()?).ok()
    }

    /// Description and quote, lowercased, for keyword tests.
    pub(crate) fn text_lower(&self) -> String {
        format!("{} {}", self.description.as_deref().unwrap_or(""), self.context_quote).to_lowercase()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoverningEntity {
    pub entity_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entity_name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entity_acronym: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jurisdiction: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role_description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_section_number: Option<String>,
}

/// Structured output of one extraction run over a planning document.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExtractionDocument {
    #[serde(default)]
    pub document_metadata: DocumentMetadata,
    #[serde(default)]
    pub project_components: Vec<Component>,
    #[serde(default)]
    pub project_constraints: Vec<ConstraintSnippet>,
    #[serde(default)]
    pub governing_entities: Vec<GoverningEntity>,
}

impl ExtractionDocument {
    pub fn component(&self, id: &str) -> Option<&Component> {
        self.project_components.iter().find(|c| c.component_id == id)
    }
}

fn number_or_string<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Str(String),
    }
    match Option::<Raw>::deserialize(d)? {
        None => Ok(None),
        Some(Raw::Num(v)) => Ok(Some(v)),
        Some(Raw::Str(s)) => {
            let cleaned: String = s.trim().chars().filter(|c| *c != ',').collect();
            cleaned.parse().map(Some).map_err(|_| serde::de::Error::custom(format!("value `{s}` is not a number")))
        }
    }
}

/// Body of the first fenced code block, or the whole text if there is none.
fn strip_fences(raw: &str) -> &str {
    let Some(open) = raw.find("```") else {
        return raw.trim();
    };
    let after = &raw[open + 3..];
    let body_start = after.find('\n').map(|i| i + 1).unwrap_or(after.len());
    let body = &after[body_start..];
    match body.find("```") {
        Some(close) => body[..close].trim(),
        None => body.trim(),
    }
}

fn id_ok(id: &str, prefix: &str, min_digits: usize) -> bool {
    id.strip_prefix(prefix)
        .is_some_and(|d| d.len() >= min_digits && d.chars().all(|c| c.is_ascii_digit()))
}

/// Parse and validate raw model output. Returns the document plus warnings.
pub fn parse_extraction(raw: &str) -> Result<(ExtractionDocument, Vec<String>), IngestError> {
    let body = strip_fences(raw);
    let mut warnings = Vec::new();
    let de = &mut serde_json::Deserializer::from_str(body);
    let doc: ExtractionDocument = serde_ignored::deserialize(de, |path| {
        warnings.push(format!("unknown field `{path}` ignored"));
    })
    .map_err(|e| IngestError::Malformed(e.to_string()))?;
    validate_document(&doc, &mut warnings)?;
    Ok((doc, warnings))
}

fn validate_document(doc: &ExtractionDocument, warnings: &mut Vec<String>) -> Result<(), IngestError> {
    let mut seen = BTreeSet::new();
    let mut check = |id: &str, prefix: &str, digits: usize| -> Result<(), IngestError> {
        if !id_ok(id, prefix, digits) {
            return Err(IngestError::BadId(id.to_string()));
        }
        if !seen.insert(id.to_string()) {
            return Err(IngestError::DuplicateId(id.to_string()));
        }
        Ok(())
    };
    for c in &doc.project_components {
        check(&c.component_id, "COMP-", 2)?;
    }
    for c in &doc.project_constraints {
        check(&c.constraint_id, "C-", 3)?;
    }
    for e in &doc.governing_entities {
        check(&e.entity_id, "E-", 2)?;
    }
    for c in &doc.project_constraints {
        if let Some(link) = &c.linked_component_id {
            if doc.component(link).is_none() {
                return Err(IngestError::DanglingComponent { constraint: c.constraint_id.clone(), component: link.clone() });
            }
        }
        if c.context_quote.trim().is_empty() {
            return Err(IngestError::EmptyQuote(c.constraint_id.clone()));
        }
        match (c.value, &c.unit) {
            (Some(_), None) => return Err(IngestError::ValueWithoutUnit(c.constraint_id.clone())),
            (Some(v), Some(u)) => {
                if let Err(e) = normalize_quantity(v, u) {
                    warnings.push(format!("{}: {e}", c.constraint_id));
                }
            }
            _ => {}
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"{
      "document_metadata": {"title": "T"},
      "project_components": [{"component_id": "COMP-03", "component_name": "Export Cable"}],
      "project_constraints": [
        {"constraint_id": "C-022", "linked_component_id": "COMP-03", "category": "Regulatory Requirement",
         "value": 500, "unit": "meters", "geographic_scope": "x", "context_quote": "q"}
      ]
    }"#;

    #[test]
    fn fenced_equals_unfenced() {
        let fenced = format!("Here you go:\n```json\n{DOC}\n```\nThanks");
        assert_eq!(parse_extraction(&fenced).unwrap(), parse_extraction(DOC).unwrap());
    }

    #[test]
    fn dangling_component_named() {
        let bad = DOC.replace("\"linked_component_id\": \"COMP-03\"", "\"linked_component_id\": \"COMP-09\"");
        let err = parse_extraction(&bad).unwrap_err();
        assert_eq!(err, IngestError::DanglingComponent { constraint: "C-022".into(), component: "COMP-09".into() });
        assert!(err.to_string().contains("COMP-09"));
    }

    #[test]
    fn id_rules() {
        assert!(matches!(parse_extraction(&DOC.replace("C-022", "C-22")), Err(IngestError::BadId(_))));
        assert!(matches!(parse_extraction(&DOC.replace("COMP-03\", \"component_name", "COMP-3\", \"component_name")), Err(IngestError::BadId(_))));
        let dup = r#"{"governing_entities": [{"entity_id": "E-01"}, {"entity_id": "E-01"}]}"#;
        assert_eq!(parse_extraction(dup).unwrap_err(), IngestError::DuplicateId("E-01".into()));
    }

    #[test]
    fn unknown_fields_warn_and_strings_parse() {
        let doc = DOC.replace("\"value\": 500", "\"value\": \"1,200\", \"confidence\": 0.9");
        let (d, warnings) = parse_extraction(&doc).unwrap();
        assert_eq!(d.project_constraints[0].value, Some(1200.0));
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("confidence"));
    }

    #[test]
    fn value_requires_unit() {
        let doc = DOC.replace("\"unit\": \"meters\", ", "");
        assert_eq!(parse_extraction(&doc).unwrap_err(), IngestError::ValueWithoutUnit("C-022".into()));
    }

    #[test]
    fn malformed() {
        assert!(matches!(parse_extraction("{not json"), Err(IngestError::Malformed(_))));
        assert!(matches!(parse_extraction(&DOC.replace("Regulatory Requirement", "Vibes")), Err(IngestError::Malformed(_))));
    }
}
