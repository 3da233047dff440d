use julia_coding::coding_tree::SymbolSeq;
use julia_coding::eq_graph::{build_eq_graph, relation_decide, EqGraph, LoopSetting, NamedRadial, Verdict};
use julia_coding::selftest::GOLDEN_DOT;
use proptest::prelude::*;
use std::sync::OnceLock;

fn graphs() -> &'static Vec<(NamedRadial, EqGraph)> {
    static CELL: OnceLock<Vec<(NamedRadial, EqGraph)>> = OnceLock::new();
    CELL.get_or_init(|| {
        let setting = LoopSetting::quad_cantor().unwrap();
        NamedRadial::ALL
            .iter()
            .map(|&r| {
                let radial = r.radial(&setting).unwrap();
                (r, build_eq_graph(&setting, &radial, &radial).unwrap())
            })
            .collect()
    })
}

#[test]
fn dot_matches_golden_files() {
    for ((name, g), (golden_name, golden)) in graphs().iter().zip(GOLDEN_DOT) {
        assert_eq!(*name, golden_name);
        assert_eq!(g.to_dot(&name.to_string()), golden);
    }
}

#[test]
fn vertex_and_edge_counts() {
    let sizes: Vec<(usize, usize)> = graphs().iter().map(|(_, g)| (g.vertices().len(), g.edges().len())).collect();
    assert_eq!(sizes[0], (1, 2));
    for (_, g) in graphs() {
        assert!(g.edges().iter().all(|e| g.position(e.from).is_some() && g.position(e.to).is_some()));
    }
}

fn seq() -> impl Strategy<Value = SymbolSeq> {
    (proptest::collection::vec(0u8..2, 0..4), proptest::collection::vec(0u8..2, 1..4))
        .prop_map(|(p, q)| SymbolSeq::eventually_periodic(p, q).unwrap())
}

proptest! {
    #[test]
    fn relation_is_reflexive_and_symmetric(a in seq(), b in seq(), k in 0usize..3) {
        let g = &graphs()[k].1;
        prop_assert_eq!(relation_decide(g, &a, &a), Verdict::Related);
        prop_assert_eq!(relation_decide(g, &a, &b), relation_decide(g, &b, &a));
    }

    #[test]
    fn trivial_graph_relates_only_equal_sequences(a in seq(), b in seq()) {
        let g = &graphs()[0].1;
        let same = (0..32).all(|k| a.at(k) == b.at(k));
        prop_assert_eq!(relation_decide(g, &a, &b).is_related(), same);
    }
}
