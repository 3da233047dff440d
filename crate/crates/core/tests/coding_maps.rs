use julia_coding::coding_tree::{pi_eval, CodingTree, SymbolSeq};
use julia_coding::eq_graph::{LoopSetting, NamedRadial};
use julia_coding::lifted_ifs::radial_from_class;
use julia_coding::{Family, MapModel, RadialClass};
use proptest::prelude::*;
use std::sync::OnceLock;

fn quad_tree() -> &'static CodingTree {
    static CELL: OnceLock<CodingTree> = OnceLock::new();
    CELL.get_or_init(|| {
        let setting = LoopSetting::quad_cantor().unwrap();
        let radial = NamedRadial::R2.radial(&setting).unwrap();
        CodingTree::extend(setting.map(), &radial, 8).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn map_shifts_tree_points(w in proptest::collection::vec(0u8..2, 1..=8)) {
        let tree = quad_tree();
        let image = tree.map().evaluate(tree.point(&w).unwrap()).unwrap();
        let shifted = tree.point(&w[1..]).unwrap();
        prop_assert!((image - shifted).norm() < 1e-8, "{image} vs {shifted}");
    }

    #[test]
    fn periodic_points_are_fixed_by_the_period(p in proptest::collection::vec(0u8..2, 1..=3)) {
        let tree = quad_tree();
        let seq = SymbolSeq::eventually_periodic(vec![], p.clone()).unwrap();
        let v = pi_eval(tree, &seq, 1e-9).unwrap();
        let mut z = v.point;
        for _ in 0..p.len() {
            z = tree.map().evaluate(z).unwrap();
        }
        prop_assert!((z - v.point).norm() < 1e-6);
    }
}

#[test]
fn words_round_trip_through_text() {
    for s in ["1", "121^", "2^", "12.21^"] {
        let seq: SymbolSeq = s.parse().unwrap();
        assert_eq!(seq.to_string(), s);
    }
    assert!("12.21".parse::<SymbolSeq>().is_err());
}

#[test]
fn euclidean_tree_bounds_shrink() {
    let map = MapModel::new(Family::Power(2)).unwrap();
    let class = RadialClass::parse(Family::Power(2), "0,1/2").unwrap();
    let radial = radial_from_class(&map, &class).unwrap();
    let tree = CodingTree::extend(&map, &radial, 6).unwrap();
    let coarse = pi_eval(&tree, &"1^".parse().unwrap(), 1e-3).unwrap();
    let fine = pi_eval(&tree, &"1^".parse().unwrap(), 1e-9).unwrap();
    assert!(fine.bound <= 1e-9 && coarse.bound <= 1e-3);
    assert!((fine.point - coarse.point).norm() <= 1e-3 + 1e-9);
}
