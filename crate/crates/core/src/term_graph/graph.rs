use std::collections::BTreeSet;

use super::{Bindings, Iri, PatternTerm, PrefixMap, Term, Triple, TriplePattern};

/// In-memory set of triples with subject-, predicate- and object-keyed indexes.
///
/// Mutation needs `&mut self`; share read-only views freely (`Graph: Send + Sync`).
#[derive(Clone, Default)]
pub struct Graph {
    spo: BTreeSet<Triple>,
    pos: BTreeSet<(Iri, Term, Iri)>,
    osp: BTreeSet<(Term, Iri, Iri)>,
    prefixes: PrefixMap,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.spo == other.spo
    }
}

impl Eq for Graph {}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.spo.iter()).finish()
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut g = Graph::new();
        g.extend(iter);
        g
    }
}

impl Extend<Triple> for Graph {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        for t in iter {
            self.insert(t);
        }
    }
}

impl<'a> IntoIterator for &'a Graph {
    type Item = &'a Triple;
    type IntoIter = std::collections::btree_set::Iter<'a, Triple>;

    fn into_iter(self) -> Self::IntoIter {
        self.spo.iter()
    }
}

impl Graph {
    pub fn new() -> Self {
        Graph::default()
    }

    pub fn with_prefixes(prefixes: PrefixMap) -> Self {
        Graph { prefixes, ..Graph::default() }
    }

    pub fn prefixes(&self) -> &PrefixMap {
        &self.prefixes
    }

    pub fn prefixes_mut(&mut self) -> &mut PrefixMap {
        &mut self.prefixes
    }

    pub fn len(&self) -> usize {
        self.spo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spo.is_empty()
    }

    /// Returns `true` if the triple was not already present.
    pub fn insert(&mut self, t: Triple) -> bool {
        if self.spo.contains(&t) {
            return false;
        }
        self.pos.insert((t.predicate.clone(), t.object.clone(), t.subject.clone()));
        self.osp.insert((t.object.clone(), t.subject.clone(), t.predicate.clone()));
        self.spo.insert(t);
        true
    }

    pub fn remove(&mut self, t: &Triple) -> bool {
        if !self.spo.remove(t) {
            return false;
        }
        self.pos.remove(&(t.predicate.clone(), t.object.clone(), t.subject.clone()));
        self.osp.remove(&(t.object.clone(), t.subject.clone(), t.predicate.clone()));
        true
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.spo.contains(t)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.spo.iter()
    }

    pub fn union(&self, other: &Graph) -> Graph {
        let mut g = self.clone();
        g.extend(other.iter().cloned());
        g
    }

    pub fn is_subset(&self, other: &Graph) -> bool {
        self.spo.is_subset(&other.spo)
    }

    /// Triples matching the given fixed positions, in `(s, p, o)` order.
    pub fn find(&self, s: Option<&Iri>, p: Option<&Iri>, o: Option<&Term>) -> Vec<Triple> {
        match (s, p, o) {
            (Some(s), Some(p), Some(o)) => {
                let t = Triple::new(s.clone(), p.clone(), o.clone());
                if self.spo.contains(&t) {
                    vec![t]
                } else {
                    vec![]
                }
            }
            (Some(s), p, o) => {
                let lo = Triple::new(s.clone(), p.cloned().unwrap_or_else(Iri::min_sentinel), Term::min_sentinel());
                self.spo
                    .range(lo..)
                    .take_while(|t| &t.subject == s && p.is_none_or(|p| &t.predicate == p))
                    .filter(|t| o.is_none_or(|o| &t.object == o))
                    .cloned()
                    .collect()
            }
            (None, Some(p), o) => {
                let lo = (p.clone(), o.cloned().unwrap_or_else(Term::min_sentinel), Iri::min_sentinel());
                let mut out: Vec<Triple> = self
                    .pos
                    .range(lo..)
                    .take_while(|(tp, to, _)| tp == p && o.is_none_or(|o| to == o))
                    .map(|(tp, to, ts)| Triple::new(ts.clone(), tp.clone(), to.clone()))
                    .collect();
                out.sort();
                out
            }
            (None, None, Some(o)) => {
                let lo = (o.clone(), Iri::min_sentinel(), Iri::min_sentinel());
                self.osp
                    .range(lo..)
                    .take_while(|(to, _, _)| to == o)
                    .map(|(to, ts, tp)| Triple::new(ts.clone(), tp.clone(), to.clone()))
                    .collect()
            }
            (None, None, None) => self.spo.iter().cloned().collect(),
        }
    }

    /// All object values of `(s, p, ?)`.
    pub fn objects(&self, s: &Iri, p: &Iri) -> Vec<Term> {
        self.find(Some(s), Some(p), None).into_iter().map(|t| t.object).collect()
    }

    /// All subjects of `(?, p, o)`.
    pub fn subjects(&self, p: &Iri, o: &Term) -> Vec<Iri> {
        self.find(None, Some(p), Some(o)).into_iter().map(|t| t.subject).collect()
    }

    /// Variable bindings under which `pattern` instantiates to a triple in the graph.
    pub fn match_pattern(&self, pattern: &TriplePattern) -> BTreeSet<Bindings> {
        self.match_with(pattern, &Bindings::new()).into_iter().collect()
    }

    /// Extensions of `bindings` under which `pattern` matches a graph triple.
    pub fn match_with(&self, pattern: &TriplePattern, bindings: &Bindings) -> Vec<Bindings> {
        let s = pattern.subject.resolve(bindings);
        let p = pattern.predicate.resolve(bindings);
        let o = pattern.object.resolve(bindings);
        // a bound literal in subject/predicate position can never match
        let s = match s {
            Some(Term::Literal(_)) => return vec![],
            Some(Term::Iri(i)) => Some(i),
            None => None,
        };
        let p = match p {
            Some(Term::Literal(_)) => return vec![],
            Some(Term::Iri(i)) => Some(i),
            None => None,
        };
        self.find(s, p, o)
            .into_iter()
            .filter_map(|t| unify(pattern, &t, bindings))
            .collect()
    }
}

/// Extend `bindings` so that `pattern` equals `t`, if possible.
pub fn unify(pattern: &TriplePattern, t: &Triple, bindings: &Bindings) -> Option<Bindings> {
    let mut out = bindings.clone();
    let values = [Term::Iri(t.subject.clone()), Term::Iri(t.predicate.clone()), t.object.clone()];
    for (slot, value) in pattern.slots().into_iter().zip(values) {
        match slot {
            PatternTerm::Term(c) => {
                if *c != value {
                    return None;
                }
            }
            PatternTerm::Var(v) => match out.get(v) {
                Some(bound) if *bound != value => return None,
                Some(_) => {}
                None => {
                    out.insert(v.clone(), value);
                }
            },
        }
    }
    Some(out)
}
