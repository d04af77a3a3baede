use std::collections::BTreeMap;

use crate::geo::{self, Geometry};
use crate::rules::{BodyItem, Builtin, BuiltinCall, Rule, RuleSet};
use crate::term_graph::{vocab, Graph, Literal, PatternTerm, Triple, TriplePattern};

use super::instantiate::{component_class, split};
use super::{CanonicalUnit, Category, ConstraintSnippet, ExtractionDocument, IngestError, Minter};

/// Named geometries used to resolve prose scopes such as "Lease Area".
pub type Gazetteer = BTreeMap<String, Geometry>;

/// Parse a `name,wkt` CSV (header required; quote WKT that contains commas).
pub fn parse_gazetteer(text: &str) -> Result<Gazetteer, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| IngestError::Gazetteer(e.to_string()))?.clone();
    if headers.len() != 2 || !headers[0].eq_ignore_ascii_case("name") || !headers[1].eq_ignore_ascii_case("wkt") {
        return Err(IngestError::Gazetteer("expected header `name,wkt`".into()));
    }
    let mut out = Gazetteer::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| IngestError::Gazetteer(e.to_string()))?;
        let g = geo::parse_wkt(&rec[1]).map_err(|e| IngestError::Gazetteer(format!("row {}: {e}", i + 2)))?;
        out.insert(rec[0].to_string(), g);
    }
    Ok(out)
}

/// WKT scopes are used directly; otherwise the longest gazetteer name found in the scope wins.
pub fn resolve_scope(scope: &str, gazetteer: &Gazetteer) -> Option<Geometry> {
    if let Ok(g) = geo::parse_wkt(scope) {
        return Some(g);
    }
    let lower = scope.to_lowercase();
    gazetteer
        .iter()
        .filter(|(name, _)| !name.is_empty() && lower.contains(&name.to_lowercase()))
        .max_by_key(|(name, _)| name.len())
        .map(|(_, g)| g.clone())
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CompiledRules {
    pub rules: RuleSet,
    /// `hasAnnotation` triples for constraints no template could execute.
    pub annotations: Graph,
    pub warnings: Vec<String>,
}

fn var(name: &str) -> PatternTerm {
    PatternTerm::Var(name.to_string())
}

fn pat(s: impl Into<PatternTerm>, p: impl Into<PatternTerm>, o: impl Into<PatternTerm>) -> BodyItem {
    BodyItem::Pattern(TriplePattern::new(s, p, o))
}

fn call(b: Builtin, args: Vec<PatternTerm>) -> BodyItem {
    BodyItem::Builtin(BuiltinCall::new(b, args).expect("template arity"))
}

pub fn compile_rules(doc: &ExtractionDocument, gazetteer: &Gazetteer) -> CompiledRules {
    compile_rules_tagged(doc, gazetteer, None)
}

/// Template compilation, tried in order: spacing, buffer, exclusion, operating threshold.
/// Anything else becomes an annotation plus a warning.
pub fn compile_rules_tagged(doc: &ExtractionDocument, gazetteer: &Gazetteer, tag: Option<&str>) -> CompiledRules {
    let m = Minter::new(tag);
    let mut out = CompiledRules::default();
    let (_, constraints) = split(doc);
    for c in &constraints {
        let r = m.constraint(&c.constraint_id);
        let name = match m.tag() {
            Some(t) => format!("{t}_{}", c.constraint_id),
            None => c.constraint_id.clone(),
        };
        match template(doc, c, gazetteer) {
            Ok((entity, body)) => {
                let head = vec![
                    TriplePattern::new(var(entity), vocab::has_conflict(), Literal::boolean(true)),
                    TriplePattern::new(var(entity), vocab::violates(), r.clone()),
                    TriplePattern::new(r.clone(), vocab::has_conflict(), Literal::boolean(true)),
                ];
                let rule = Rule::new(name, body, head).expect("templates are range-restricted");
                if let Err(e) = out.rules.push(rule) {
                    out.warnings.push(e.to_string());
                }
            }
            Err(reason) => {
                out.annotations.insert(Triple::new(
                    r,
                    vocab::has_annotation(),
                    Literal::string(format!("no executable template: {reason}")),
                ));
                out.warnings.push(format!("{}: no executable template ({reason}); kept as annotation", c.constraint_id));
            }
        }
    }
    out
}

fn template(
    doc: &ExtractionDocument,
    c: &ConstraintSnippet,
    gazetteer: &Gazetteer,
) -> Result<(&'static str, Vec<BodyItem>), String> {
    let q = c.quantity();
    let text = c.text_lower();
    let scope = c.geographic_scope.as_deref().and_then(|s| resolve_scope(s, gazetteer));
    let wkt = |g: &Geometry| PatternTerm::Term(Literal::wkt(g).into());
    let num = |v: f64| PatternTerm::Term(Literal::double(v).into());

    if let Some(q) = q.filter(|q| q.unit == CanonicalUnit::Meter) {
        if c.category == Some(Category::DesignSpecification) && text.contains("spacing") {
            return Ok((
                "a",
                vec![
                    pat(var("a"), vocab::rdf_type(), vocab::turbine()),
                    pat(var("a"), vocab::has_geometry(), var("g1")),
                    pat(var("b"), vocab::rdf_type(), vocab::turbine()),
                    pat(var("b"), vocab::has_geometry(), var("g2")),
                    call(Builtin::NotEqual, vec![var("a"), var("b")]),
                    call(Builtin::WithinDistance, vec![var("g1"), var("g2"), num(q.magnitude)]),
                ],
            ));
        }
        if let Some(g) = &scope {
            return Ok((
                "e",
                vec![
                    pat(var("e"), vocab::rdf_type(), vocab::infrastructure()),
                    pat(var("e"), vocab::has_geometry(), var("g")),
                    call(Builtin::WithinDistance, vec![var("g"), wkt(g), num(q.magnitude)]),
                ],
            ));
        }
    }
    if c.value.is_none() {
        if let Some(g) = &scope {
            return Ok((
                "e",
                vec![
                    pat(var("e"), vocab::rdf_type(), vocab::infrastructure()),
                    pat(var("e"), vocab::has_geometry(), var("g")),
                    call(Builtin::Intersects, vec![var("g"), wkt(g)]),
                ],
            ));
        }
    }
    if let Some(q) = q.filter(|q| q.unit == CanonicalUnit::MeterPerSecond) {
        let on_turbines = c.linked_component_id.as_deref().is_some_and(|id| component_class(doc, id) == vocab::turbine());
        if on_turbines {
            let minimum = text.contains("minimum") || text.contains("at least") || text.contains("no less");
            let guard = if minimum { Builtin::LessThan } else { Builtin::GreaterThan };
            return Ok((
                "e",
                vec![
                    pat(var("e"), vocab::rdf_type(), vocab::turbine()),
                    pat(var("e"), vocab::has_turbine_status(), vocab::operational()),
                    pat(var("e"), vocab::has_wind_speed(), var("w")),
                    call(guard, vec![var("w"), num(q.magnitude)]),
                ],
            ));
        }
        return Err("speed limit does not apply to turbines".into());
    }
    Err(match (q, &scope, c.value) {
        (_, _, Some(_)) if q.is_none() => "value has an unsupported unit".into(),
        (Some(_), None, _) => "geographic scope did not resolve to a geometry".into(),
        _ => "no quantity or resolvable scope".into(),
    })
}
