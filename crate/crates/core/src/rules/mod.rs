//! Jena-style rules with geospatial guards, evaluated by forward chaining.
//!
//! ```text
//! [r1: (?t type :Turbine) (?t :hasGeometry ?g)
//!      withinDistance(?g, "POINT (-74.7 38.3)"^^geo:wktLiteral, 500)
//!      -> (?t :hasConflict "true"^^xsd:boolean)]
//! ```

mod builtins;
mod engine;
mod parser;

use std::collections::BTreeSet;
use std::fmt;

use crate::term_graph::{PatternTerm, PrefixMap, Term, TriplePattern};

pub use builtins::Builtin;
pub use engine::{explain, reason, reason_with_provenance, Derivation, Materialized, TraceStep};
pub use parser::{parse_rules, parse_rules_with};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RuleError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unknown built-in `{name}` at line {line}, column {column}")]
    UnknownBuiltin { name: String, line: usize, column: usize },
    #[error("built-in {builtin} takes {expected} arguments, got {got}")]
    Arity { builtin: &'static str, expected: usize, got: usize },
    #[error("rule {rule}: head variable ?{var} is not bound by a body pattern")]
    UnboundHeadVariable { rule: String, var: String },
    #[error("rule {rule}: built-in variable ?{var} is not bound by a body pattern")]
    UnboundBuiltinVariable { rule: String, var: String },
    #[error("rule {0}: body needs at least one triple pattern")]
    NoBodyPattern(String),
    #[error("rule {0}: literal in subject or predicate position")]
    LiteralPosition(String),
    #[error("duplicate rule name {0}")]
    DuplicateName(String),
    #[error("rule {rule}, bindings {bindings}: {message}")]
    Builtin { rule: String, bindings: String, message: String },
    #[error("triple {0} is not in the materialized graph")]
    NotInGraph(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuiltinCall {
    pub builtin: Builtin,
    pub args: Vec<PatternTerm>,
}

impl BuiltinCall {
    pub fn new(builtin: Builtin, args: Vec<PatternTerm>) -> Result<Self, RuleError> {
        if args.len() != builtin.arity() {
            return Err(RuleError::Arity { builtin: builtin.name(), expected: builtin.arity(), got: args.len() });
        }
        Ok(BuiltinCall { builtin, args })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BodyItem {
    Pattern(TriplePattern),
    Builtin(BuiltinCall),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    name: String,
    body: Vec<BodyItem>,
    head: Vec<TriplePattern>,
}

impl Rule {
    /// Checks range restriction: head and built-in variables must occur in a body pattern.
    pub fn new(name: impl Into<String>, body: Vec<BodyItem>, head: Vec<TriplePattern>) -> Result<Self, RuleError> {
        let name = name.into();
        let patterns: Vec<&TriplePattern> = body
            .iter()
            .filter_map(|b| match b {
                BodyItem::Pattern(p) => Some(p),
                BodyItem::Builtin(_) => None,
            })
            .collect();
        if patterns.is_empty() {
            return Err(RuleError::NoBodyPattern(name));
        }
        let bad_position = |p: &TriplePattern| {
            matches!(p.subject, PatternTerm::Term(Term::Literal(_)))
                || matches!(p.predicate, PatternTerm::Term(Term::Literal(_)))
        };
        if patterns.iter().any(|p| bad_position(p)) || head.iter().any(bad_position) {
            return Err(RuleError::LiteralPosition(name));
        }
        let bound: BTreeSet<&str> = patterns.iter().flat_map(|p| p.variables()).collect();
        for h in &head {
            if let Some(v) = h.variables().find(|v| !bound.contains(v)) {
                return Err(RuleError::UnboundHeadVariable { rule: name, var: v.to_string() });
            }
        }
        for b in &body {
            if let BodyItem::Builtin(call) = b {
                if let Some(v) = call.args.iter().filter_map(|a| a.var_name()).find(|v| !bound.contains(v)) {
                    return Err(RuleError::UnboundBuiltinVariable { rule: name, var: v.to_string() });
                }
            }
        }
        Ok(Rule { name, body, head })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn body(&self) -> &[BodyItem] {
        &self.body
    }

    pub fn head(&self) -> &[TriplePattern] {
        &self.head
    }

    pub fn patterns(&self) -> impl Iterator<Item = &TriplePattern> {
        self.body.iter().filter_map(|b| match b {
            BodyItem::Pattern(p) => Some(p),
            BodyItem::Builtin(_) => None,
        })
    }

    pub fn builtins(&self) -> impl Iterator<Item = &BuiltinCall> {
        self.body.iter().filter_map(|b| match b {
            BodyItem::Builtin(c) => Some(c),
            BodyItem::Pattern(_) => None,
        })
    }
}

/// Ordered rules with unique names.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RuleSet {
    rules: Vec<Rule>,
}

impl RuleSet {
    pub fn new(rules: Vec<Rule>) -> Result<Self, RuleError> {
        let mut rs = RuleSet::default();
        for r in rules {
            rs.push(r)?;
        }
        Ok(rs)
    }

    pub fn push(&mut self, rule: Rule) -> Result<(), RuleError> {
        if self.rules.iter().any(|r| r.name == rule.name) {
            return Err(RuleError::DuplicateName(rule.name));
        }
        self.rules.push(rule);
        Ok(())
    }

    pub fn extend(&mut self, other: RuleSet) -> Result<(), RuleError> {
        for r in other.rules {
            self.push(r)?;
        }
        Ok(())
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }
}

fn fmt_term(t: &PatternTerm, prefixes: &PrefixMap) -> String {
    match t {
        PatternTerm::Var(v) => format!("?{v}"),
        PatternTerm::Term(Term::Iri(i)) => prefixes.compact(i).unwrap_or_else(|| i.to_string()),
        PatternTerm::Term(Term::Literal(l)) => {
            let dt = crate::term_graph::Iri::new(l.datatype().iri()).expect("datatype IRI");
            let dt = prefixes.compact(&dt).unwrap_or_else(|| dt.to_string());
            format!("\"{}\"^^{dt}", crate::term_graph::escape_lexical(l.lexical()))
        }
    }
}

fn fmt_pattern(p: &TriplePattern, prefixes: &PrefixMap) -> String {
    format!(
        "({} {} {})",
        fmt_term(&p.subject, prefixes),
        fmt_term(&p.predicate, prefixes),
        fmt_term(&p.object, prefixes)
    )
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pm = PrefixMap::default();
        let mut parts = Vec::new();
        for b in &self.body {
            parts.push(match b {
                BodyItem::Pattern(p) => fmt_pattern(p, &pm),
                BodyItem::Builtin(c) => {
                    let args: Vec<String> = c.args.iter().map(|a| fmt_term(a, &pm)).collect();
                    format!("{}({})", c.builtin.name(), args.join(", "))
                }
            });
        }
        parts.push("->".to_string());
        parts.extend(self.head.iter().map(|h| fmt_pattern(h, &pm)));
        write!(f, "[{}: {}]", self.name, parts.join(" "))
    }
}

impl fmt::Display for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}
