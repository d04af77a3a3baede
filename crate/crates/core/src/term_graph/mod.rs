//! Triple store, planning ontology and N-Triples text form.

mod graph;
mod ntriples;
mod ontology;
mod term;
pub mod vocab;

pub use graph::{unify, Graph};
pub use ntriples::{parse_ntriples, serialize_ntriples, write_triple};
pub use ontology::{subsumption_closure, validate, Ontology, PropertyAxiom, Range, Violation, ViolationKind};
pub(crate) use term::escape_lexical;
pub use term::{
    format_double, Bindings, Datatype, Iri, Literal, PatternTerm, PrefixMap, Term, Triple, TriplePattern, BASE, GEO,
    XSD,
};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum TermError {
    #[error("invalid IRI `{0}`")]
    InvalidIri(String),
    #[error("invalid {datatype} literal `{lexical}`: {reason}")]
    InvalidLiteral { lexical: String, datatype: &'static str, reason: String },
    #[error("unknown prefix in `{0}`")]
    UnknownPrefix(String),
    #[error("class {0} is not declared")]
    UndeclaredClass(Iri),
    #[error("malformed ontology axiom {0}")]
    MalformedAxiom(Triple),
    #[error("subclass cycle: {}", .0.iter().map(|c| c.local_name()).collect::<Vec<_>>().join(" -> "))]
    SubclassCycle(Vec<Iri>),
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
}
