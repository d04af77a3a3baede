mod common;

use common::{arb_graph, arb_triple, config};
use proptest::prelude::*;
use semtwin::term_graph::{parse_ntriples, serialize_ntriples, subsumption_closure, vocab, Graph, Iri, Ontology, Triple};

fn typed_graph() -> impl Strategy<Value = Graph> {
    let classes = vec![
        vocab::turbine(),
        vocab::wind_farm(),
        vocab::cable(),
        vocab::infrastructure(),
        vocab::regulation(),
        vocab::event(),
    ];
    let typing = (0..8usize, prop::sample::select(classes))
        .prop_map(|(i, c)| Triple::new(Iri::local(&format!("E{i}")), vocab::rdf_type(), c));
    (prop::collection::vec(typing, 0..12), arb_graph(8)).prop_map(|(types, g)| {
        let mut g = g;
        g.extend(types);
        g
    })
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn insertion_order_and_duplicates_do_not_matter(
        ts in prop::collection::vec(arb_triple(), 0..20),
        seed in any::<u64>(),
    ) {
        let a: Graph = ts.iter().cloned().collect();
        let mut shuffled = ts.clone();
        shuffled.extend(ts.iter().cloned());
        // deterministic Fisher-Yates driven by the seed
        let mut s = seed;
        for i in (1..shuffled.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (s >> 33) as usize % (i + 1));
        }
        let b: Graph = shuffled.into_iter().collect();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.len(), ts.iter().collect::<std::collections::BTreeSet<_>>().len());
    }

    #[test]
    fn ntriples_round_trip(g in arb_graph(40)) {
        let text = serialize_ntriples(&g);
        let back = parse_ntriples(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(serialize_ntriples(&back), text);
    }

    #[test]
    fn closure_is_monotone_idempotent_and_adds_only_types(g in typed_graph()) {
        let ont = Ontology::core();
        let c = subsumption_closure(&g, &ont).unwrap();
        prop_assert!(g.is_subset(&c));
        prop_assert_eq!(&subsumption_closure(&c, &ont).unwrap(), &c);
        for t in c.iter().filter(|t| !g.contains(t)) {
            prop_assert_eq!(&t.predicate, &vocab::rdf_type());
        }
        for t in g.find(None, Some(&vocab::rdf_type()), Some(&vocab::turbine().into())) {
            let up = Triple::new(t.subject.clone(), vocab::rdf_type(), vocab::infrastructure());
            prop_assert!(c.contains(&up));
        }
    }
}
