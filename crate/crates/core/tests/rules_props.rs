mod common;

use common::{arb_rules, arb_small_graph, config, naive_fixpoint};
use proptest::prelude::*;
use semtwin::geo::{min_distance_m, parse_wkt, GeoPoint, Geometry};
use semtwin::rules::{parse_rules, reason, RuleSet};
use semtwin::term_graph::{vocab, Graph, Iri, Literal, Term, Triple};

proptest! {
    #![proptest_config(config(150))]

    #[test]
    fn reason_is_monotone_idempotent_and_matches_oracle(g in arb_small_graph(30), rules in arb_rules(3)) {
        let r = reason(&g, &rules).unwrap();
        prop_assert!(g.is_subset(&r));
        prop_assert_eq!(&reason(&r, &rules).unwrap(), &r);
        prop_assert_eq!(&r, &naive_fixpoint(&g, &rules));
    }

    #[test]
    fn rule_order_does_not_matter(g in arb_small_graph(30), rules in arb_rules(3), rot in 0usize..3) {
        let mut v = rules.rules().to_vec();
        let k = rot % v.len();
        v.rotate_left(k);
        v.reverse();
        let shuffled = RuleSet::new(v).unwrap();
        prop_assert_eq!(reason(&g, &rules).unwrap(), reason(&g, &shuffled).unwrap());
    }

    #[test]
    fn rule_text_round_trip(rules in arb_rules(3)) {
        let text = rules.to_string();
        prop_assert_eq!(parse_rules(&text).unwrap(), rules);
    }
}

const BUFFER: &str = "[buffer: (?e :type :Turbine) (?e :hasGeometry ?g) (?z :type :Zone) (?z :hasGeometry ?h) \
                      withinDistance(?g, ?h, ?d) (?z :buffer ?d) -> (?e :hasConflict \"true\"^^xsd:boolean) (?e :violates ?z)]";

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn within_distance_conflicts_are_geometrically_sound(
        turbines in prop::collection::vec((-0.05..0.05f64, -0.05..0.05f64), 1..6),
        zone in prop_oneof![
            (-0.05..0.05f64, -0.05..0.05f64).prop_map(|(x, y)| format!("POINT ({} {})", -74.0 + x, 38.0 + y)),
            (-0.05..0.05f64, 0.001..0.02f64).prop_map(|(x, r)| {
                let (x0, y0) = (-74.0 + x, 38.0);
                format!("POLYGON (({} {}, {} {}, {} {}, {} {}))", x0, y0, x0 + r, y0, x0 + r, y0 + r, x0, y0)
            }),
        ],
        d in 100.0..5000.0f64,
    ) {
        let rules = parse_rules(BUFFER).unwrap();
        let mut g = Graph::new();
        let z = Iri::local("Z");
        let zone_geom = parse_wkt(&zone).unwrap();
        g.insert(Triple::new(z.clone(), vocab::rdf_type(), Iri::local("Zone")));
        g.insert(Triple::new(z.clone(), vocab::has_geometry(), Literal::wkt(&zone_geom)));
        g.insert(Triple::new(z.clone(), Iri::local("buffer"), Literal::double(d)));
        let mut geoms = Vec::new();
        for (i, (dx, dy)) in turbines.iter().enumerate() {
            let t = Iri::local(&format!("T{i}"));
            let p = Geometry::Point(GeoPoint::new(-74.0 + dx, 38.0 + dy).unwrap());
            g.insert(Triple::new(t.clone(), vocab::rdf_type(), vocab::turbine()));
            g.insert(Triple::new(t.clone(), vocab::has_geometry(), Literal::wkt(&p)));
            geoms.push((t, p));
        }
        let r = reason(&g, &rules).unwrap();
        for (t, p) in geoms {
            let flagged = r.contains(&Triple::new(t.clone(), vocab::violates(), Term::Iri(z.clone())));
            prop_assert_eq!(flagged, min_distance_m(&p, &zone_geom) <= d);
        }
    }
}
