use crate::term_graph::{validate, vocab, Datatype, Graph, Iri, Literal, Ontology, Term, Triple};

use super::{ConstraintSnippet, ExtractionDocument, IngestError, QuantityValue};

/// Mints entity IRIs such as `:Constraint_C-022`, optionally namespaced by a document tag.
#[derive(Debug, Clone, Default)]
pub struct Minter {
    tag: Option<String>,
}

impl Minter {
    pub fn new(tag: Option<&str>) -> Self {
        let tag = tag.map(|t| t.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect());
        Minter { tag }
    }

    pub fn tag(&self) -> Option<&str> {
        self.tag.as_deref()
    }

    fn mint(&self, kind: &str, id: &str) -> Iri {
        match &self.tag {
            Some(t) => Iri::local(&format!("{kind}_{t}_{id}")),
            None => Iri::local(&format!("{kind}_{id}")),
        }
    }

    pub fn document(&self) -> Iri {
        match &self.tag {
            Some(t) => Iri::local(&format!("Document_{t}")),
            None => Iri::local("Document"),
        }
    }

    pub fn constraint(&self, id: &str) -> Iri {
        self.mint("Constraint", id)
    }

    pub fn component(&self, id: &str) -> Iri {
        self.mint("Component", id)
    }

    pub fn entity(&self, id: &str) -> Iri {
        self.mint("Entity", id)
    }

    /// IRI for any extraction id, chosen by its prefix.
    pub fn for_id(&self, id: &str) -> Iri {
        if id.starts_with("COMP-") {
            self.component(id)
        } else if id.starts_with("C-") {
            self.constraint(id)
        } else {
            self.entity(id)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttrValue {
    Quantity(QuantityValue),
    Text(String),
}

/// An entity-level property taken from the extraction (component, entity or qualitative rule).
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeSnippet {
    pub subject: String,
    pub property: Iri,
    pub value: AttrValue,
}

fn is_executable(c: &ConstraintSnippet) -> bool {
    c.value.is_some() || c.geographic_scope.as_deref().is_some_and(|s| !s.trim().is_empty())
}

/// Partition into attributes and constraints. A constraint with a value or a geographic
/// scope is a constraint; a purely qualitative one becomes a description attribute.
pub fn split(doc: &ExtractionDocument) -> (Vec<AttributeSnippet>, Vec<ConstraintSnippet>) {
    let mut attrs = Vec::new();
    let mut push = |subject: &str, property: Iri, v: &Option<String>| {
        if let Some(v) = v {
            attrs.push(AttributeSnippet { subject: subject.to_string(), property, value: AttrValue::Text(v.clone()) });
        }
    };
    for c in &doc.project_components {
        push(&c.component_id, vocab::has_name(), &c.component_name);
        push(&c.component_id, vocab::has_acronym(), &c.component_acronym);
        push(&c.component_id, vocab::has_description(), &c.description);
        push(&c.component_id, vocab::has_source_section(), &c.source_section_number);
    }
    for e in &doc.governing_entities {
        push(&e.entity_id, vocab::has_name(), &e.entity_name);
        push(&e.entity_id, vocab::has_acronym(), &e.entity_acronym);
        push(&e.entity_id, vocab::has_jurisdiction(), &e.jurisdiction);
        push(&e.entity_id, vocab::has_role(), &e.role_description);
        push(&e.entity_id, vocab::has_source_section(), &e.source_section_number);
    }
    let mut constraints = Vec::new();
    for c in &doc.project_constraints {
        if is_executable(c) {
            constraints.push(c.clone());
        } else {
            let text = c.description.clone().unwrap_or_else(|| c.context_quote.clone());
            push(&c.constraint_id, vocab::has_regulation_description(), &Some(text));
        }
    }
    (attrs, constraints)
}

/// Ontology class of a component, guessed from its name, acronym and description.
pub(crate) fn component_class(doc: &ExtractionDocument, id: &str) -> Iri {
    let Some(c) = doc.component(id) else { return vocab::infrastructure() };
    let text = format!(
        "{} {} {}",
        c.component_name.as_deref().unwrap_or(""),
        c.component_acronym.as_deref().unwrap_or(""),
        c.description.as_deref().unwrap_or("")
    )
    .to_lowercase();
    if text.contains("turbine") || text.split(|ch: char| !ch.is_alphanumeric()).any(|w| w == "wtg") {
        vocab::turbine()
    } else if text.contains("cable") {
        vocab::cable()
    } else {
        vocab::infrastructure()
    }
}

pub fn instantiate(doc: &ExtractionDocument, ontology: &Ontology) -> Result<Graph, IngestError> {
    instantiate_tagged(doc, ontology, None)
}

/// Like [`instantiate`], with IRIs namespaced by `tag` so several documents can share a graph.
pub fn instantiate_tagged(doc: &ExtractionDocument, ontology: &Ontology, tag: Option<&str>) -> Result<Graph, IngestError> {
    let m = Minter::new(tag);
    let mut g = Graph::new();
    let text = |s: &str| Literal::string(s);

    let d = m.document();
    g.insert(Triple::new(d.clone(), vocab::rdf_type(), vocab::document()));
    let meta = &doc.document_metadata;
    for (p, v) in [
        (vocab::has_title(), &meta.title),
        (vocab::has_project_name(), &meta.project_name),
        (vocab::has_location(), &meta.project_location),
    ] {
        if let Some(v) = v {
            g.insert(Triple::new(d.clone(), p, text(v)));
        }
    }

    for c in &doc.project_components {
        g.insert(Triple::new(m.component(&c.component_id), vocab::rdf_type(), component_class(doc, &c.component_id)));
    }
    for e in &doc.governing_entities {
        g.insert(Triple::new(m.entity(&e.entity_id), vocab::rdf_type(), vocab::governing_entity()));
    }

    let (attrs, constraints) = split(doc);
    for a in &attrs {
        let o: Term = match &a.value {
            AttrValue::Text(s) => text(s).into(),
            AttrValue::Quantity(q) => Literal::double(q.magnitude).into(),
        };
        g.insert(Triple::new(m.for_id(&a.subject), a.property.clone(), o));
    }

    for c in &doc.project_constraints {
        let r = m.constraint(&c.constraint_id);
        g.insert(Triple::new(r.clone(), vocab::rdf_type(), vocab::regulation()));
        g.insert(Triple::new(r.clone(), vocab::has_conflict(), Literal::boolean(false)));
        g.insert(Triple::new(r.clone(), vocab::has_context_quote(), text(&c.context_quote)));
        if let Some(cat) = c.category {
            g.insert(Triple::new(r.clone(), vocab::has_category(), text(cat.label())));
        }
        if let Some(s) = &c.source_section_number {
            g.insert(Triple::new(r.clone(), vocab::has_source_section(), text(s)));
        }
        if let Some(link) = &c.linked_component_id {
            g.insert(Triple::new(r.clone(), vocab::applies_to(), m.component(link)));
        }
    }
    for c in &constraints {
        let r = m.constraint(&c.constraint_id);
        let desc = c.description.as_deref().unwrap_or(&c.context_quote);
        g.insert(Triple::new(r.clone(), vocab::has_regulation_description(), text(desc)));
        if let Some(scope) = c.geographic_scope.as_deref().filter(|s| !s.trim().is_empty()) {
            let area = Literal::new(scope, Datatype::WktLiteral).unwrap_or_else(|_| text(scope));
            g.insert(Triple::new(r.clone(), vocab::has_impact_area(), area));
        }
        if let (Some(v), Some(u)) = (c.value, &c.unit) {
            let (mag, unit) = match c.quantity() {
                Some(q) => (q.magnitude, q.unit.symbol().to_string()),
                None => (v, u.clone()),
            };
            g.insert(Triple::new(r.clone(), vocab::has_impact_value(), Literal::double(mag)));
            g.insert(Triple::new(r.clone(), vocab::has_impact_unit(), text(&unit)));
        }
    }

    let violations = validate(&g, ontology);
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(|v| format!("{} ({:?})", v.triple, v.kind)).collect();
        return Err(IngestError::Ontology(list.join("; ")));
    }
    Ok(g)
}
