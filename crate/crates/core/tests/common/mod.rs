//! Generators and independent oracles shared by the property and acceptance suites.
#![allow(dead_code)]

use std::collections::BTreeSet;

use chrono::{Duration, TimeZone, Utc};
use proptest::prelude::*;
use semtwin::geo::{GeoPoint, Geometry};
use semtwin::layout::Layout;
use semtwin::rules::{BodyItem, Builtin, BuiltinCall, Rule, RuleSet};
use semtwin::storm::{StormHeader, Track, TrackRecord};
use semtwin::term_graph::{vocab, Datatype, Graph, Iri, Literal, PatternTerm, Term, Triple, TriplePattern};

pub fn node(i: usize) -> Iri {
    Iri::local(&format!("N{i}"))
}

// ---------- graphs for serialization ----------

fn arb_iri() -> impl Strategy<Value = Iri> {
    prop_oneof![
        prop::sample::select(vec![
            vocab::turbine(),
            vocab::cable(),
            vocab::regulation(),
            vocab::infrastructure(),
            vocab::rdf_type(),
            vocab::has_geometry(),
            vocab::has_conflict(),
            vocab::has_name(),
            vocab::violates(),
        ]),
        "[A-Za-z][A-Za-z0-9_-]{0,12}".prop_map(|s| Iri::local(&s)),
        "[a-z]{1,8}".prop_map(|s| Iri::new(format!("http://example.org/{s}/x")).unwrap()),
    ]
}

fn arb_point() -> impl Strategy<Value = GeoPoint> {
    (-180.0..180.0f64, -89.0..89.0f64).prop_map(|(lon, lat)| GeoPoint::new(lon, lat).unwrap())
}

fn arb_geometry() -> impl Strategy<Value = Geometry> {
    prop_oneof![
        arb_point().prop_map(Geometry::Point),
        prop::collection::vec(arb_point(), 2..5).prop_map(|v| Geometry::line_string(v).unwrap()),
        (arb_point(), 0.001..1.0f64).prop_map(|(c, r)| {
            let c = GeoPoint::new(c.lon.clamp(-178.0, 178.0), c.lat.clamp(-80.0, 80.0)).unwrap();
            let ring = vec![
                GeoPoint { lon: c.lon - r, lat: c.lat - r },
                GeoPoint { lon: c.lon + r, lat: c.lat - r },
                GeoPoint { lon: c.lon + r, lat: c.lat + r },
                GeoPoint { lon: c.lon - r, lat: c.lat + r },
                GeoPoint { lon: c.lon - r, lat: c.lat - r },
            ];
            Geometry::polygon(ring, vec![]).unwrap()
        }),
    ]
}

pub fn arb_literal() -> impl Strategy<Value = Literal> {
    prop_oneof![
        any::<String>().prop_map(Literal::string),
        "[ -~\\n\\t\"\\\\é∑]{0,20}".prop_map(Literal::string),
        (-1e12..1e12f64).prop_map(Literal::double),
        any::<f64>().prop_filter("finite", |v| v.is_finite()).prop_map(Literal::double),
        any::<i64>().prop_map(Literal::integer),
        any::<bool>().prop_map(Literal::boolean),
        (0i64..4_000_000_000).prop_map(|s| Literal::date_time(Utc.timestamp_opt(s, 0).unwrap())),
        arb_geometry().prop_map(|g| Literal::wkt(&g)),
    ]
}

fn arb_object() -> impl Strategy<Value = Term> {
    prop_oneof![arb_iri().prop_map(Term::Iri), arb_literal().prop_map(Term::Literal)]
}

pub fn arb_triple() -> impl Strategy<Value = Triple> {
    (arb_iri(), arb_iri(), arb_object()).prop_map(|(s, p, o)| Triple::new(s, p, o))
}

pub fn arb_graph(max: usize) -> impl Strategy<Value = Graph> {
    prop::collection::vec(arb_triple(), 0..max).prop_map(|v| v.into_iter().collect())
}

// ---------- small graphs and rule sets for the reasoner ----------

pub const NODES: usize = 6;
const PREDICATES: [&str; 3] = ["p0", "p1", "p2"];
const VALUE: &str = "val";
const VARS: [&str; 3] = ["x", "y", "z"];
/// Only ever bound by the object of a `val` pattern, so numeric guards never see an IRI.
const NUMERIC_VARS: [&str; 2] = ["u", "v"];

fn pred(i: usize) -> Iri {
    Iri::local(PREDICATES[i])
}

/// `(Ni pj Nk)` and `(Ni val k)` facts.
pub fn arb_small_graph(max: usize) -> impl Strategy<Value = Graph> {
    let edge = (0..NODES, 0..PREDICATES.len(), 0..NODES).prop_map(|(s, p, o)| Triple::new(node(s), pred(p), node(o)));
    let value = (0..NODES, 0i64..6).prop_map(|(s, v)| Triple::new(node(s), Iri::local(VALUE), Literal::integer(v)));
    prop::collection::vec(prop_oneof![3 => edge, 1 => value], 0..=max).prop_map(|v| v.into_iter().collect())
}

fn arb_slot_node() -> impl Strategy<Value = PatternTerm> {
    prop_oneof![
        3 => prop::sample::select(VARS.to_vec()).prop_map(PatternTerm::var),
        1 => (0..NODES).prop_map(|i| node(i).into()),
    ]
}

/// Body pattern: a node edge, or a `val` pattern whose object is a variable.
fn arb_body_pattern() -> impl Strategy<Value = (TriplePattern, Option<String>)> {
    prop_oneof![
        3 => (arb_slot_node(), 0..PREDICATES.len(), arb_slot_node())
            .prop_map(|(s, p, o)| (TriplePattern::new(s, pred(p), o), None)),
        1 => (arb_slot_node(), prop::sample::select(NUMERIC_VARS.to_vec())).prop_map(|(s, v)| {
            (TriplePattern::new(s, Iri::local(VALUE), PatternTerm::var(v)), Some(v.to_string()))
        }),
    ]
}

#[derive(Debug, Clone)]
enum Guard {
    NotEqual(usize, usize),
    LessThan(usize, i64),
}

fn arb_guard() -> impl Strategy<Value = Guard> {
    prop_oneof![(0..3usize, 0..3usize).prop_map(|(a, b)| Guard::NotEqual(a, b)), (0..3usize, 0i64..6).prop_map(|(a, k)| Guard::LessThan(a, k)),]
}

fn arb_head_slot(bound: &[String]) -> BoxedStrategy<PatternTerm> {
    let consts = (0..NODES).prop_map(|i| PatternTerm::from(node(i)));
    if bound.is_empty() {
        consts.boxed()
    } else {
        prop_oneof![3 => prop::sample::select(bound.to_vec()).prop_map(|v| PatternTerm::var(&v)), 1 => consts].boxed()
    }
}

fn arb_rule(name: String) -> impl Strategy<Value = Rule> {
    (prop::collection::vec(arb_body_pattern(), 1..=3), prop::option::of(arb_guard())).prop_flat_map(
        move |(body, guard)| {
            let name = name.clone();
            let bound: Vec<String> = body
                .iter()
                .flat_map(|(p, _)| p.variables().map(str::to_string).collect::<Vec<_>>())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let numeric: Vec<String> = body.iter().filter_map(|(_, v)| v.clone()).collect();
            let head = (arb_head_slot(&bound), 0..PREDICATES.len(), arb_head_slot(&bound))
                .prop_map(|(s, p, o)| TriplePattern::new(s, pred(p), o));
            prop::collection::vec(head, 1..=2).prop_map(move |head| {
                let mut items: Vec<BodyItem> = body.iter().map(|(p, _)| BodyItem::Pattern(p.clone())).collect();
                match &guard {
                    Some(Guard::NotEqual(a, b)) if !bound.is_empty() => {
                        let a = &bound[a % bound.len()];
                        let b = &bound[b % bound.len()];
                        items.push(BodyItem::Builtin(
                            BuiltinCall::new(Builtin::NotEqual, vec![PatternTerm::var(a), PatternTerm::var(b)]).unwrap(),
                        ));
                    }
                    Some(Guard::LessThan(a, k)) if !numeric.is_empty() => {
                        let v = &numeric[a % numeric.len()];
                        items.push(BodyItem::Builtin(
                            BuiltinCall::new(Builtin::LessThan, vec![PatternTerm::var(v), Literal::integer(*k).into()])
                                .unwrap(),
                        ));
                    }
                    _ => {}
                }
                Rule::new(name.clone(), items, head).expect("generated rules are range-restricted")
            })
        },
    )
}

pub fn arb_rules(max: usize) -> impl Strategy<Value = RuleSet> {
    (1..=max).prop_flat_map(|n| {
        (0..n).map(|i| arb_rule(format!("r{i}"))).collect::<Vec<_>>().prop_map(|rules| RuleSet::new(rules).unwrap())
    })
}

// ---------- naive fixpoint oracle ----------

fn resolve(p: &PatternTerm, assignment: &[(&str, &Term)]) -> Term {
    match p {
        PatternTerm::Term(t) => t.clone(),
        PatternTerm::Var(v) => assignment.iter().find(|(n, _)| n == v).expect("assigned").1.clone(),
    }
}

fn ground(p: &TriplePattern, assignment: &[(&str, &Term)]) -> Option<Triple> {
    let s = resolve(&p.subject, assignment);
    let pr = resolve(&p.predicate, assignment);
    let o = resolve(&p.object, assignment);
    Some(Triple::new(s.as_iri()?.clone(), pr.as_iri()?.clone(), o))
}

fn int(t: &Term) -> Option<i64> {
    t.as_literal().filter(|l| l.datatype() == Datatype::Integer).and_then(|l| l.lexical().parse().ok())
}

fn guard_holds(call: &BuiltinCall, assignment: &[(&str, &Term)]) -> bool {
    let args: Vec<Term> = call.args.iter().map(|a| resolve(a, assignment)).collect();
    match call.builtin {
        Builtin::NotEqual => match (int(&args[0]), int(&args[1])) {
            (Some(a), Some(b)) => a != b,
            _ => args[0] != args[1],
        },
        Builtin::LessThan => int(&args[0]).zip(int(&args[1])).is_some_and(|(a, b)| a < b),
        other => panic!("oracle does not model {other:?}"),
    }
}

/// Apply every rule under every substitution of its variables over the active domain until nothing changes.
pub fn naive_fixpoint(g: &Graph, rules: &RuleSet) -> Graph {
    let mut domain: BTreeSet<Term> = BTreeSet::new();
    for t in g.iter() {
        domain.insert(t.subject.clone().into());
        domain.insert(t.predicate.clone().into());
        domain.insert(t.object.clone());
    }
    for r in rules.rules() {
        for p in r.patterns().chain(r.head()) {
            for slot in p.slots() {
                if let PatternTerm::Term(t) = slot {
                    domain.insert(t.clone());
                }
            }
        }
    }
    let domain: Vec<Term> = domain.into_iter().collect();
    let mut out = g.clone();
    loop {
        let mut added = Vec::new();
        for r in rules.rules() {
            let vars: Vec<&str> = r.patterns().flat_map(|p| p.variables()).collect::<BTreeSet<_>>().into_iter().collect();
            let mut idx = vec![0usize; vars.len()];
            loop {
                let assignment: Vec<(&str, &Term)> = vars.iter().zip(&idx).map(|(v, &i)| (*v, &domain[i])).collect();
                let body_ok = r.patterns().all(|p| ground(p, &assignment).is_some_and(|t| out.contains(&t)))
                    && r.builtins().all(|c| guard_holds(c, &assignment));
                if body_ok {
                    added.extend(r.head().iter().filter_map(|h| ground(h, &assignment)));
                }
                // odometer over the domain
                let mut k = 0;
                while k < idx.len() {
                    idx[k] += 1;
                    if idx[k] < domain.len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == idx.len() || domain.is_empty() {
                    break;
                }
            }
        }
        let before = out.len();
        for t in added {
            out.insert(t);
        }
        if out.len() == before {
            return out;
        }
    }
}

// ---------- layouts and tracks ----------

pub fn arb_layout(max: usize) -> impl Strategy<Value = Layout> {
    let anchor = (-80.0..-60.0f64, 30.0..45.0f64).prop_map(|(lon, lat)| GeoPoint::new(lon, lat).unwrap());
    (anchor, prop::collection::vec((-20_000.0..20_000.0f64, -20_000.0..20_000.0f64), 0..max), any::<bool>())
        .prop_map(|(anchor, pts, with_rows)| {
            let n = pts.len();
            let l = Layout::numbered(anchor, pts.into_iter().map(|(x, y)| [x, y]).collect());
            if with_rows {
                l.with_rows((0..n).map(|i| i % 5 + 1).collect()).unwrap()
            } else {
                l
            }
        })
}

pub fn arb_track() -> impl Strategy<Value = Track> {
    let record = (
        1i64..48,
        prop::option::of(prop::sample::select(vec!['L', 'I', 'W'])),
        prop::sample::select(vec!["TD", "TS", "HU", "EX", "LO"]),
        -900i32..900,
        -1800i32..1800,
        0i32..190,
        prop::option::of(880i32..1020),
        prop::collection::vec((-999i32..999).prop_map(|v| v.to_string()), 0..4),
    );
    ("[A-Z]{2}[0-9]{6}", "[A-Z]{2,10}", prop::collection::vec(record, 1..12)).prop_map(|(id, name, recs)| {
        let mut time = Utc.with_ymd_and_hms(2012, 10, 20, 0, 0, 0).unwrap();
        let records: Vec<TrackRecord> = recs
            .into_iter()
            .map(|(gap, rid, status, lat, lon, vmax, p, extra)| {
                time += Duration::hours(gap);
                TrackRecord {
                    time,
                    record_id: rid,
                    status: status.to_string(),
                    position: GeoPoint::new(lon as f64 / 10.0, lat as f64 / 10.0).unwrap(),
                    vmax_kt: vmax,
                    min_pressure: p,
                    extra,
                }
            })
            .collect();
        Track { header: StormHeader { id, name, count: records.len() }, records }
    })
}

/// Fixed-seed runner configuration so CI runs are reproducible.
pub fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        rng_seed: proptest::test_runner::RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}
