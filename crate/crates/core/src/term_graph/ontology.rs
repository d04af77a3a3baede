use std::collections::{BTreeMap, BTreeSet};

use super::{vocab, Datatype, Graph, Iri, Term, TermError, Triple};

/// Allowed object kind for a property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Range {
    Class(Iri),
    Datatype(Datatype),
    /// Any literal (e.g. an impact area given either as prose or WKT).
    AnyLiteral,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PropertyAxiom {
    pub domain: Option<Iri>,
    pub range: Option<Range>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Ontology {
    classes: BTreeSet<Iri>,
    subclass_axioms: BTreeSet<(Iri, Iri)>,
    properties: BTreeMap<Iri, PropertyAxiom>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ViolationKind {
    DatatypeMismatch { expected: Datatype, found: Datatype },
    LiteralWhereIriExpected { expected: Iri },
    IriWhereLiteralExpected,
    SubjectOutsideDomain { domain: Iri, types: Vec<Iri> },
    ObjectOutsideRange { range: Iri, types: Vec<Iri> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub triple: Triple,
    pub kind: ViolationKind,
}

impl Ontology {
    /// Empty ontology; build with [`Ontology::add_class`] and friends, or start from [`Ontology::core`].
    pub fn new() -> Self {
        Ontology::default()
    }

    /// The built-in planning vocabulary.
    pub fn core() -> Self {
        let mut o = Ontology::new();
        for c in [
            vocab::infrastructure(),
            vocab::wind_farm(),
            vocab::turbine(),
            vocab::cable(),
            vocab::regulation(),
            vocab::event(),
            vocab::governing_entity(),
            vocab::document(),
        ] {
            o.classes.insert(c);
        }
        for child in [vocab::wind_farm(), vocab::turbine(), vocab::cable()] {
            o.subclass_axioms.insert((child, vocab::infrastructure()));
        }
        let dt = |d| Some(Range::Datatype(d));
        let turbine = Some(vocab::turbine());
        let regulation = Some(vocab::regulation());
        let axioms = [
            (vocab::has_geometry(), None, dt(Datatype::WktLiteral)),
            (vocab::has_conflict(), None, dt(Datatype::Boolean)),
            (vocab::has_turbine_status(), turbine.clone(), None),
            (vocab::has_pitch_angle(), turbine.clone(), dt(Datatype::Double)),
            (vocab::has_yaw_angle(), turbine.clone(), dt(Datatype::Double)),
            (vocab::has_wind_speed(), turbine.clone(), dt(Datatype::Double)),
            (vocab::has_distance_to_storm(), turbine, dt(Datatype::Double)),
            (vocab::has_regulation_description(), regulation.clone(), dt(Datatype::String)),
            (vocab::has_impact_area(), regulation.clone(), Some(Range::AnyLiteral)),
            (vocab::has_impact_value(), regulation.clone(), dt(Datatype::Double)),
            (vocab::has_impact_unit(), regulation.clone(), dt(Datatype::String)),
            (vocab::has_category(), regulation.clone(), dt(Datatype::String)),
            (vocab::has_context_quote(), regulation.clone(), dt(Datatype::String)),
            (vocab::has_annotation(), None, dt(Datatype::String)),
            (vocab::violates(), None, Some(Range::Class(vocab::regulation()))),
            (vocab::applies_to(), regulation, Some(Range::Class(vocab::infrastructure()))),
            (vocab::has_name(), None, dt(Datatype::String)),
            (vocab::has_acronym(), None, dt(Datatype::String)),
            (vocab::has_description(), None, dt(Datatype::String)),
            (vocab::has_source_section(), None, dt(Datatype::String)),
            (vocab::has_jurisdiction(), Some(vocab::governing_entity()), dt(Datatype::String)),
            (vocab::has_role(), Some(vocab::governing_entity()), dt(Datatype::String)),
            (vocab::has_title(), Some(vocab::document()), dt(Datatype::String)),
            (vocab::has_project_name(), Some(vocab::document()), dt(Datatype::String)),
            (vocab::has_location(), Some(vocab::document()), dt(Datatype::String)),
        ];
        for (p, domain, range) in axioms {
            o.properties.insert(p, PropertyAxiom { domain, range });
        }
        o
    }

    pub fn add_class(&mut self, class: Iri) {
        self.classes.insert(class);
    }

    pub fn add_subclass(&mut self, child: Iri, parent: Iri) -> Result<(), TermError> {
        for c in [&child, &parent] {
            if !self.classes.contains(c) {
                return Err(TermError::UndeclaredClass(c.clone()));
            }
        }
        self.subclass_axioms.insert((child, parent));
        Ok(())
    }

    pub fn add_property(&mut self, property: Iri, axiom: PropertyAxiom) -> Result<(), TermError> {
        let class_refs = axiom.domain.iter().chain(match &axiom.range {
            Some(Range::Class(c)) => Some(c),
            _ => None,
        });
        for c in class_refs {
            if !self.classes.contains(c) {
                return Err(TermError::UndeclaredClass(c.clone()));
            }
        }
        self.properties.insert(property, axiom);
        Ok(())
    }

    pub fn classes(&self) -> &BTreeSet<Iri> {
        &self.classes
    }

    pub fn subclass_axioms(&self) -> &BTreeSet<(Iri, Iri)> {
        &self.subclass_axioms
    }

    pub fn property(&self, p: &Iri) -> Option<&PropertyAxiom> {
        self.properties.get(p)
    }

    /// Add the classes, subclass and property axioms of another graph-encoded ontology.
    ///
    /// Recognized statements: `(C :type :Class)`, `(A :subClassOf B)`,
    /// `(p :domain C)`, `(p :range C-or-datatype)`. Classes referenced by axioms
    /// must be declared.
    pub fn extend_from_graph(&mut self, g: &Graph) -> Result<(), TermError> {
        for t in g.find(None, Some(&vocab::rdf_type()), Some(&Term::Iri(vocab::class()))) {
            self.classes.insert(t.subject);
        }
        for t in g.find(None, Some(&vocab::sub_class_of()), None) {
            let parent = t.object.as_iri().cloned().ok_or_else(|| TermError::MalformedAxiom(t.clone()))?;
            self.add_subclass(t.subject, parent)?;
        }
        let mut axioms: BTreeMap<Iri, PropertyAxiom> = BTreeMap::new();
        for t in g.find(None, Some(&vocab::domain()), None) {
            let c = t.object.as_iri().cloned().ok_or_else(|| TermError::MalformedAxiom(t.clone()))?;
            axioms.entry(t.subject).or_default().domain = Some(c);
        }
        for t in g.find(None, Some(&vocab::range()), None) {
            let r = t.object.as_iri().ok_or_else(|| TermError::MalformedAxiom(t.clone()))?;
            let range = match Datatype::from_iri(r.as_str()) {
                Some(d) => Range::Datatype(d),
                None => Range::Class(r.clone()),
            };
            axioms.entry(t.subject).or_default().range = Some(range);
        }
        for (p, a) in axioms {
            let mut merged = self.properties.get(&p).cloned().unwrap_or_default();
            if a.domain.is_some() {
                merged.domain = a.domain;
            }
            if a.range.is_some() {
                merged.range = a.range;
            }
            self.add_property(p, merged)?;
        }
        Ok(())
    }

    /// Error naming one subclass cycle, if any exists.
    pub fn check_acyclic(&self) -> Result<(), TermError> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Open,
            Done,
        }
        let mut marks: BTreeMap<&Iri, Mark> = BTreeMap::new();
        let mut path: Vec<&Iri> = Vec::new();

        fn visit<'a>(
            o: &'a Ontology,
            c: &'a Iri,
            marks: &mut BTreeMap<&'a Iri, Mark>,
            path: &mut Vec<&'a Iri>,
        ) -> Result<(), TermError> {
            match marks.get(c) {
                Some(Mark::Done) => return Ok(()),
                Some(Mark::Open) => {
                    let start = path.iter().position(|x| *x == c).unwrap_or(0);
                    let mut cycle: Vec<Iri> = path[start..].iter().map(|x| (*x).clone()).collect();
                    cycle.push(c.clone());
                    return Err(TermError::SubclassCycle(cycle));
                }
                None => {}
            }
            marks.insert(c, Mark::Open);
            path.push(c);
            for (child, parent) in &o.subclass_axioms {
                if child == c {
                    visit(o, parent, marks, path)?;
                }
            }
            path.pop();
            marks.insert(c, Mark::Done);
            Ok(())
        }

        for (child, _) in &self.subclass_axioms {
            visit(self, child, &mut marks, &mut path)?;
        }
        Ok(())
    }

    /// Reflexive-transitive superclasses of `class`.
    pub fn superclasses(&self, class: &Iri) -> BTreeSet<Iri> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![class.clone()];
        while let Some(c) = stack.pop() {
            if seen.insert(c.clone()) {
                for (child, parent) in &self.subclass_axioms {
                    if *child == c {
                        stack.push(parent.clone());
                    }
                }
            }
        }
        seen
    }

    pub fn is_subclass(&self, child: &Iri, parent: &Iri) -> bool {
        self.superclasses(child).contains(parent)
    }
}

/// Add `(x type D)` for every `(x type C)` with `C` a subclass of `D`.
pub fn subsumption_closure(graph: &Graph, ontology: &Ontology) -> Result<Graph, TermError> {
    ontology.check_acyclic()?;
    let mut out = graph.clone();
    for t in graph.find(None, Some(&vocab::rdf_type()), None) {
        let Some(class) = t.object.as_iri() else { continue };
        for sup in ontology.superclasses(class) {
            out.insert(Triple::new(t.subject.clone(), vocab::rdf_type(), sup));
        }
    }
    Ok(out)
}

/// Report every triple whose predicate's declared domain or range is provably violated.
///
/// Typing is closed-world: a subject that has explicit types, none of which is
/// subsumed by the domain class, counts as outside the domain. Untyped subjects
/// are not reported. Integer literals satisfy a double range.
pub fn validate(graph: &Graph, ontology: &Ontology) -> Vec<Violation> {
    let types_of = |s: &super::Iri| -> Vec<Iri> {
        graph
            .objects(s, &vocab::rdf_type())
            .into_iter()
            .filter_map(|o| o.as_iri().cloned())
            .collect()
    };
    let fits = |types: &[Iri], class: &Iri| types.iter().any(|t| ontology.is_subclass(t, class));

    let mut out = Vec::new();
    for t in graph.iter() {
        let Some(axiom) = ontology.property(&t.predicate) else { continue };
        if let Some(domain) = &axiom.domain {
            let types = types_of(&t.subject);
            if !types.is_empty() && !fits(&types, domain) {
                out.push(Violation {
                    triple: t.clone(),
                    kind: ViolationKind::SubjectOutsideDomain { domain: domain.clone(), types },
                });
            }
        }
        let kind = match (&axiom.range, &t.object) {
            (None, _) | (Some(Range::AnyLiteral), Term::Literal(_)) => None,
            (Some(Range::AnyLiteral), Term::Iri(_)) => Some(ViolationKind::IriWhereLiteralExpected),
            (Some(Range::Datatype(_)), Term::Iri(_)) => Some(ViolationKind::IriWhereLiteralExpected),
            (Some(Range::Datatype(expected)), Term::Literal(l)) => {
                let found = l.datatype();
                let ok = found == *expected || (*expected == Datatype::Double && found == Datatype::Integer);
                (!ok).then_some(ViolationKind::DatatypeMismatch { expected: *expected, found })
            }
            (Some(Range::Class(c)), Term::Literal(_)) => {
                Some(ViolationKind::LiteralWhereIriExpected { expected: c.clone() })
            }
            (Some(Range::Class(c)), Term::Iri(o)) => {
                let types = types_of(o);
                (!types.is_empty() && !fits(&types, c))
                    .then(|| ViolationKind::ObjectOutsideRange { range: c.clone(), types })
            }
        };
        if let Some(kind) = kind {
            out.push(Violation { triple: t.clone(), kind });
        }
    }
    out
}
