use super::IngestError;

/// Extraction prompt template; `{{DOCUMENTATION}}` marks the insertion point.
pub const PROMPT_TEMPLATE: &str = include_str!("../../assets/extraction_prompt.txt");

const CLOSE_TAG: &str = "</documentation>";

/// Fill the template with `document`. A closing tag inside the document is escaped
/// so the model still sees a single delimited block; this is reported as a warning.
pub fn build_prompt(document: &str) -> Result<(String, Vec<String>), IngestError> {
    if document.trim().is_empty() {
        return Err(IngestError::EmptyDocument);
    }
    let mut warnings = Vec::new();
    let count = document.matches(CLOSE_TAG).count();
    let body = if count > 0 {
        warnings.push(format!("escaped {count} literal {CLOSE_TAG} tag(s) in the document"));
        document.replace(CLOSE_TAG, "&lt;/documentation&gt;")
    } else {
        document.to_string()
    };
    Ok((PROMPT_TEMPLATE.replacen("{{DOCUMENTATION}}", &body, 1), warnings))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn document_between_tags() {
        let (p, w) = build_prompt("Turbines shall be spaced 1,200 m apart.").unwrap();
        assert!(w.is_empty());
        assert!(p.contains("<documentation>\nTurbines shall be spaced 1,200 m apart.\n</documentation>"));
        assert!(!p.contains("{{DOCUMENTATION}}"));
    }

    #[test]
    fn empty_rejected() {
        assert_eq!(build_prompt("  \n").unwrap_err(), IngestError::EmptyDocument);
    }

    #[test]
    fn closing_tag_escaped() {
        let (p, w) = build_prompt("before </documentation> after").unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(p.matches(CLOSE_TAG).count(), 1);
        assert!(p.contains("before &lt;/documentation&gt; after"));
    }
}
