mod common;

use common::config;
use proptest::prelude::*;
use semtwin::geo::{destination, GeoPoint, Geometry};
use semtwin::ingest::{
    compile_rules, convert_to, instantiate, normalize_quantity, parse_extraction, parse_gazetteer, ExtractionClient,
    ReplayClient,
};
use semtwin::rules::reason;
use semtwin::term_graph::{serialize_ntriples, subsumption_closure, vocab, Iri, Literal, Ontology, Term, Triple};

const UNITS: [&str; 14] = [
    "m", "meters", "metres", "ft", "feet", "km", "kilometers", "nm", "nautical miles", "m/s", "knots", "kt", "mph", "count",
];

#[derive(Debug, Clone)]
struct Buffer {
    value: f64,
    unit: &'static str,
    factor: f64,
    zone: usize,
    bearing: f64,
}

fn arb_buffer() -> impl Strategy<Value = Buffer> {
    (
        prop::sample::select(vec![("m", 1.0), ("meters", 1.0), ("km", 1000.0), ("ft", 0.3048)]),
        50.0..3000.0f64,
        0usize..3,
        0.0..360.0f64,
    )
        .prop_map(|((unit, factor), meters, zone, bearing)| Buffer {
            value: (meters / factor * 1000.0).round() / 1000.0,
            unit,
            factor,
            zone,
            bearing,
        })
}

fn zone_point(k: usize) -> GeoPoint {
    GeoPoint::new(-74.0 + 0.2 * k as f64, 38.0).unwrap()
}

fn document(buffers: &[Buffer]) -> String {
    let constraints: Vec<String> = buffers
        .iter()
        .enumerate()
        .map(|(i, b)| {
            format!(
                r#"{{"constraint_id": "C-{:03}", "category": "Safety Standard",
                    "description": "No structures within the buffer of zone {}", "value": {}, "unit": "{}",
                    "geographic_scope": "Area around zone {}", "context_quote": "Keep clear of zone {}."}}"#,
                i + 1,
                b.zone,
                b.value,
                b.unit,
                b.zone,
                b.zone
            )
        })
        .collect();
    format!(
        r#"{{"document_metadata": {{"title": "Generated"}}, "project_constraints": [{}]}}"#,
        constraints.join(",")
    )
}

fn gazetteer_csv() -> String {
    let mut s = String::from("name,wkt\n");
    for k in 0..3 {
        let p = zone_point(k);
        s.push_str(&format!("zone {k},POINT ({} {})\n", p.lon, p.lat));
    }
    s
}

proptest! {
    #![proptest_config(config(1000))]

    #[test]
    fn unit_round_trip(value in -1e6..1e6f64, unit in prop::sample::select(UNITS.to_vec())) {
        let q = normalize_quantity(value, unit).unwrap();
        let back = convert_to(q, unit).unwrap();
        prop_assert!((back - value).abs() <= 1e-9 * value.abs().max(1e-300));
    }
}

proptest! {
    #![proptest_config(config(100))]

    #[test]
    fn compilation_is_deterministic(buffers in prop::collection::vec(arb_buffer(), 1..6)) {
        let raw = document(&buffers);
        let gz = parse_gazetteer(&gazetteer_csv()).unwrap();
        let (d1, _) = parse_extraction(&raw).unwrap();
        let (d2, _) = parse_extraction(&raw).unwrap();
        let ont = Ontology::core();
        prop_assert_eq!(
            serialize_ntriples(&instantiate(&d1, &ont).unwrap()),
            serialize_ntriples(&instantiate(&d2, &ont).unwrap())
        );
        prop_assert_eq!(compile_rules(&d1, &gz).rules.to_string(), compile_rules(&d2, &gz).rules.to_string());
    }

    #[test]
    fn compiled_buffers_flag_violations_with_traceable_constraint(buffers in prop::collection::vec(arb_buffer(), 1..5)) {
        let (doc, _) = parse_extraction(&document(&buffers)).unwrap();
        let gz = parse_gazetteer(&gazetteer_csv()).unwrap();
        let ont = Ontology::core();
        let compiled = compile_rules(&doc, &gz);
        prop_assert_eq!(compiled.rules.len(), buffers.len());
        let mut g = instantiate(&doc, &ont).unwrap();
        for (i, b) in buffers.iter().enumerate() {
            let meters = b.value * b.factor;
            let inside = destination(zone_point(b.zone), b.bearing, 0.5 * meters / 1000.0);
            let t = Iri::local(&format!("T{i}"));
            g.insert(Triple::new(t.clone(), vocab::rdf_type(), vocab::turbine()));
            g.insert(Triple::new(t, vocab::has_geometry(), Literal::wkt(&Geometry::Point(inside))));
        }
        let closed = subsumption_closure(&g, &ont).unwrap();
        let r = reason(&closed, &compiled.rules).unwrap();
        for i in 0..buffers.len() {
            let t = Iri::local(&format!("T{i}"));
            let c = Iri::local(&format!("Constraint_C-{:03}", i + 1));
            prop_assert!(r.contains(&Triple::new(t.clone(), vocab::has_conflict(), Literal::boolean(true))));
            prop_assert!(r.contains(&Triple::new(t, vocab::violates(), Term::Iri(c.clone()))));
            prop_assert!(g.contains(&Triple::new(c, vocab::rdf_type(), vocab::regulation())));
        }
    }
}

#[test]
fn replay_client_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let client = ReplayClient::new(dir.path());
    let text = "The cable shall avoid zone 1.";
    std::fs::write(client.path_for(text), document(&[Buffer { value: 500.0, unit: "m", factor: 1.0, zone: 1, bearing: 0.0 }]))
        .unwrap();
    let run = || {
        let (doc, _) = semtwin::ingest::extract_document(&client, text).unwrap();
        serialize_ntriples(&instantiate(&doc, &Ontology::core()).unwrap())
    };
    assert_eq!(run(), run());
    assert_eq!(client.extract("", text).unwrap(), client.extract("prompt", text).unwrap());
}
