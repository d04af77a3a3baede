use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::geo;

use super::TermError;

/// Namespace of the built-in planning vocabulary.
pub const BASE: &str = "http://semtwin.dev/ontology#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const GEO: &str = "http://www.opengis.net/ont/geosparql#";

/// An absolute IRI.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Iri(Arc<str>);

impl Iri {
    pub fn new(value: impl AsRef<str>) -> Result<Self, TermError> {
        let value = value.as_ref();
        if !is_absolute_iri(value) {
            return Err(TermError::InvalidIri(value.to_string()));
        }
        Ok(Iri(Arc::from(value)))
    }

    /// IRI in the built-in namespace. Panics on characters that cannot appear in an IRI,
    /// so only use it with trusted local names.
    pub fn local(name: &str) -> Self {
        Iri::new(format!("{BASE}{name}")).expect("valid local name")
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Fragment or last path segment, e.g. `Turbine115` for `...#Turbine115`.
    pub fn local_name(&self) -> &str {
        let s = self.as_str();
        let cut = s.rfind(['#', '/', ':']).map(|i| i + 1).unwrap_or(0);
        &s[cut..]
    }

    // Sorts before every valid IRI; used as a range lower bound by the graph indexes.
    pub(crate) fn min_sentinel() -> Self {
        Iri(Arc::from(""))
    }
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

fn is_absolute_iri(s: &str) -> bool {
    let Some(colon) = s.find(':') else {
        return false;
    };
    let scheme = &s[..colon];
    let mut chars = scheme.chars();
    let scheme_ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'));
    scheme_ok
        && colon + 1 < s.len()
        && !s
            .chars()
            .any(|c| c.is_whitespace() || c.is_control() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\'))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Datatype {
    String,
    Double,
    Integer,
    Boolean,
    DateTime,
    WktLiteral,
}

impl Datatype {
    pub const ALL: [Datatype; 6] = [
        Datatype::String,
        Datatype::Double,
        Datatype::Integer,
        Datatype::Boolean,
        Datatype::DateTime,
        Datatype::WktLiteral,
    ];

    pub fn iri(self) -> &'static str {
        match self {
            Datatype::String => "http://www.w3.org/2001/XMLSchema#string",
            Datatype::Double => "http://www.w3.org/2001/XMLSchema#double",
            Datatype::Integer => "http://www.w3.org/2001/XMLSchema#integer",
            Datatype::Boolean => "http://www.w3.org/2001/XMLSchema#boolean",
            Datatype::DateTime => "http://www.w3.org/2001/XMLSchema#dateTime",
            Datatype::WktLiteral => "http://www.opengis.net/ont/geosparql#wktLiteral",
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Datatype::String => "string",
            Datatype::Double => "double",
            Datatype::Integer => "integer",
            Datatype::Boolean => "boolean",
            Datatype::DateTime => "dateTime",
            Datatype::WktLiteral => "wktLiteral",
        }
    }

    pub fn from_iri(iri: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|d| d.iri() == iri)
    }

    pub fn from_short_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|d| d.short_name() == name)
    }

    pub fn is_numeric(self) -> bool {
        matches!(self, Datatype::Double | Datatype::Integer)
    }
}

/// Typed literal. Numeric and WKT lexical forms are canonicalized on construction,
/// so two literals denoting the same value compare equal.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    lexical: Arc<str>,
    datatype: Datatype,
}

impl Literal {
    pub fn new(lexical: &str, datatype: Datatype) -> Result<Self, TermError> {
        let bad = |reason: String| TermError::InvalidLiteral {
            lexical: lexical.to_string(),
            datatype: datatype.short_name(),
            reason,
        };
        let canonical = match datatype {
            Datatype::String => lexical.to_string(),
            Datatype::Double => {
                let v: f64 = lexical.trim().parse().map_err(|_| bad("not a number".into()))?;
                if !v.is_finite() {
                    return Err(bad("not finite".into()));
                }
                format_double(v)
            }
            Datatype::Integer => {
                let v: i64 = lexical.trim().parse().map_err(|_| bad("not an integer".into()))?;
                v.to_string()
            }
            Datatype::Boolean => match lexical {
                "true" | "false" => lexical.to_string(),
                _ => return Err(bad("expected true or false".into())),
            },
            Datatype::DateTime => {
                chrono::DateTime::parse_from_rfc3339(lexical)
                    .map(|_| ())
                    .or_else(|_| {
                        chrono::NaiveDateTime::parse_from_str(lexical, "%Y-%m-%dT%H:%M:%S%.f").map(|_| ())
                    })
                    .map_err(|e| bad(e.to_string()))?;
                lexical.to_string()
            }
            Datatype::WktLiteral => {
                let g = geo::parse_wkt(lexical).map_err(|e| bad(e.to_string()))?;
                geo::serialize_wkt(&g)
            }
        };
        Ok(Literal { lexical: Arc::from(canonical), datatype })
    }

    pub fn string(s: impl AsRef<str>) -> Self {
        Literal { lexical: Arc::from(s.as_ref()), datatype: Datatype::String }
    }

    /// Panics on non-finite input.
    pub fn double(v: f64) -> Self {
        assert!(v.is_finite(), "double literal must be finite");
        Literal { lexical: Arc::from(format_double(v)), datatype: Datatype::Double }
    }

    pub fn integer(v: i64) -> Self {
        Literal { lexical: Arc::from(v.to_string()), datatype: Datatype::Integer }
    }

    pub fn boolean(v: bool) -> Self {
        Literal { lexical: Arc::from(if v { "true" } else { "false" }), datatype: Datatype::Boolean }
    }

    pub fn wkt(g: &geo::Geometry) -> Self {
        Literal { lexical: Arc::from(geo::serialize_wkt(g)), datatype: Datatype::WktLiteral }
    }

    pub fn date_time(t: chrono::DateTime<chrono::Utc>) -> Self {
        Literal {
            lexical: Arc::from(t.format("%Y-%m-%dT%H:%M:%SZ").to_string()),
            datatype: Datatype::DateTime,
        }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> Datatype {
        self.datatype
    }

    pub fn as_f64(&self) -> Option<f64> {
        if self.datatype.is_numeric() {
            self.lexical.parse().ok()
        } else {
            None
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match (self.datatype, &*self.lexical) {
            (Datatype::Boolean, "true") => Some(true),
            (Datatype::Boolean, "false") => Some(false),
            _ => None,
        }
    }
}

/// Shortest representation that parses back to the same `f64`, always with a
/// decimal point or exponent (`500.0`, `0.1`, `1e-7`).
pub fn format_double(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:?}")
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"^^{}", self.lexical, self.datatype.short_name())
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"^^<{}>", escape_lexical(&self.lexical), self.datatype.iri())
    }
}

pub(crate) fn escape_lexical(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(Iri),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(i) => Some(i),
            Term::Literal(_) => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(l) => Some(l),
            Term::Iri(_) => None,
        }
    }

    pub(crate) fn min_sentinel() -> Self {
        Term::Iri(Iri::min_sentinel())
    }
}

impl From<Iri> for Term {
    fn from(i: Iri) -> Self {
        Term::Iri(i)
    }
}

impl From<Literal> for Term {
    fn from(l: Literal) -> Self {
        Term::Literal(l)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(i) => fmt::Debug::fmt(i, f),
            Term::Literal(l) => fmt::Debug::fmt(l, f),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(i) => fmt::Display::fmt(i, f),
            Term::Literal(l) => fmt::Display::fmt(l, f),
        }
    }
}

/// A subject-predicate-object statement. Subjects and predicates are always IRIs.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Iri, predicate: Iri, object: impl Into<Term>) -> Self {
        Triple { subject, predicate, object: object.into() }
    }
}

impl fmt::Debug for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?} {:?} {:?})", self.subject, self.predicate, self.object)
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

/// Pattern slot: a concrete term or a named variable (`?name`, stored without the `?`).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum PatternTerm {
    Term(Term),
    Var(String),
}

impl PatternTerm {
    pub fn var(name: &str) -> Self {
        PatternTerm::Var(name.trim_start_matches('?').to_string())
    }

    pub fn var_name(&self) -> Option<&str> {
        match self {
            PatternTerm::Var(v) => Some(v),
            PatternTerm::Term(_) => None,
        }
    }

    /// Bound value under `bindings`, if the slot is a constant or a bound variable.
    pub fn resolve<'a>(&'a self, bindings: &'a Bindings) -> Option<&'a Term> {
        match self {
            PatternTerm::Term(t) => Some(t),
            PatternTerm::Var(v) => bindings.get(v),
        }
    }
}

impl From<Term> for PatternTerm {
    fn from(t: Term) -> Self {
        PatternTerm::Term(t)
    }
}

impl From<Iri> for PatternTerm {
    fn from(i: Iri) -> Self {
        PatternTerm::Term(Term::Iri(i))
    }
}

impl From<Literal> for PatternTerm {
    fn from(l: Literal) -> Self {
        PatternTerm::Term(Term::Literal(l))
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

impl TriplePattern {
    pub fn new(s: impl Into<PatternTerm>, p: impl Into<PatternTerm>, o: impl Into<PatternTerm>) -> Self {
        TriplePattern { subject: s.into(), predicate: p.into(), object: o.into() }
    }

    pub fn slots(&self) -> [&PatternTerm; 3] {
        [&self.subject, &self.predicate, &self.object]
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.slots().into_iter().filter_map(PatternTerm::var_name)
    }

    /// Ground triple under `bindings`; `None` if a variable is unbound or the
    /// instantiation is not a well-formed triple (e.g. literal subject).
    pub fn instantiate(&self, bindings: &Bindings) -> Option<Triple> {
        let s = self.subject.resolve(bindings)?.as_iri()?.clone();
        let p = self.predicate.resolve(bindings)?.as_iri()?.clone();
        let o = self.object.resolve(bindings)?.clone();
        Some(Triple::new(s, p, o))
    }
}

pub type Bindings = BTreeMap<String, Term>;

/// Prefix table used to resolve prefixed names such as `:Turbine` or `xsd:double`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefixMap {
    map: BTreeMap<String, String>,
}

impl Default for PrefixMap {
    fn default() -> Self {
        let mut map = BTreeMap::new();
        map.insert(String::new(), BASE.to_string());
        map.insert("xsd".to_string(), XSD.to_string());
        map.insert("geo".to_string(), GEO.to_string());
        map.insert("rdf".to_string(), "http://www.w3.org/1999/02/22-rdf-syntax-ns#".to_string());
        map.insert("rdfs".to_string(), "http://www.w3.org/2000/01/rdf-schema#".to_string());
        PrefixMap { map }
    }
}

impl PrefixMap {
    pub fn empty() -> Self {
        PrefixMap { map: BTreeMap::new() }
    }

    pub fn insert(&mut self, prefix: &str, base: &str) {
        self.map.insert(prefix.to_string(), base.to_string());
    }

    pub fn get(&self, prefix: &str) -> Option<&str> {
        self.map.get(prefix).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.map.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Resolve `prefix:local` to an absolute IRI.
    pub fn expand(&self, prefixed: &str) -> Result<Iri, TermError> {
        let (prefix, local) = prefixed
            .split_once(':')
            .ok_or_else(|| TermError::UnknownPrefix(prefixed.to_string()))?;
        let base = self.get(prefix).ok_or_else(|| TermError::UnknownPrefix(prefix.to_string()))?;
        Iri::new(format!("{base}{local}"))
    }

    /// Shortest prefixed form of `iri`, if any prefix matches and the remainder is a plain name.
    pub fn compact(&self, iri: &Iri) -> Option<String> {
        self.map
            .iter()
            .filter(|(_, base)| iri.as_str().starts_with(base.as_str()))
            .max_by_key(|(_, base)| base.len())
            .and_then(|(prefix, base)| {
                let local = &iri.as_str()[base.len()..];
                let plain = !local.is_empty()
                    && local.chars().all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
                    && !local.ends_with('.');
                plain.then(|| format!("{prefix}:{local}"))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iri_validation() {
        assert!(Iri::new("http://example.org/a").is_ok());
        assert!(Iri::new("urn:x").is_ok());
        assert!(Iri::new("").is_err());
        assert!(Iri::new("no-scheme").is_err());
        assert!(Iri::new("http://a b").is_err());
        assert!(Iri::new("1http://x").is_err());
    }

    #[test]
    fn literal_canonicalization() {
        assert_eq!(Literal::new("90", Datatype::Double).unwrap(), Literal::double(90.0));
        assert_eq!(Literal::double(500.0).lexical(), "500.0");
        assert_eq!(Literal::new("+7", Datatype::Integer).unwrap().lexical(), "7");
        assert!(Literal::new("ninety", Datatype::Double).is_err());
        assert!(Literal::new("inf", Datatype::Double).is_err());
        assert!(Literal::new("TRUE", Datatype::Boolean).is_err());
        assert!(Literal::new("2012-10-29T12:00:00Z", Datatype::DateTime).is_ok());
        assert!(Literal::new("yesterday", Datatype::DateTime).is_err());
        let w = Literal::new("point( -74.70 38.3 )", Datatype::WktLiteral).unwrap();
        assert_eq!(w.lexical(), "POINT (-74.7 38.3)");
        assert!(Literal::new("POLYGON ((0 0, 1 0))", Datatype::WktLiteral).is_err());
    }

    #[test]
    fn prefixes_expand_and_compact() {
        let p = PrefixMap::default();
        let t = p.expand(":Turbine").unwrap();
        assert_eq!(t, Iri::local("Turbine"));
        assert_eq!(p.compact(&t).as_deref(), Some(":Turbine"));
        assert_eq!(p.expand("xsd:double").unwrap().as_str(), Datatype::Double.iri());
        assert!(p.expand("nope:x").is_err());
        assert_eq!(Iri::local("Turbine115").local_name(), "Turbine115");
    }
}
