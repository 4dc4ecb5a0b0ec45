use balset_core::construct::base_case;
use balset_core::graphs::{
    build_pot, build_pot_with, build_swp, export_graphs, import_graphs, verify_lemma2, verify_prop1, verify_prop2,
    ArcRule, ExportedGraphs, GraphFormat, Membership, Prop2Status, SubsetFamily,
};
use balset_core::optsearch::{find_optimal, sample_balanced, Budget};
use balset_core::{worst_case, DefiningSet, Strategy, SwapSet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn population() -> Vec<DefiningSet> {
    let mut pop = Vec::new();
    for t in 1..=3 {
        pop.extend(find_optimal(t, Budget::default()).unwrap().optima);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for t in [2, 3, 4] {
        for _ in 0..1000 {
            pop.push(sample_balanced(t, &mut rng));
        }
    }
    pop
}

fn check_structure(ds: &DefiningSet, swaps: &SwapSet, membership: Membership) {
    let swp = build_swp(ds, swaps).unwrap();
    let pot = build_pot_with(ds, swaps, membership).unwrap();
    assert_eq!(swp.edges.len(), swaps.len());
    assert!(pot.arcs.iter().all(|a| a.from != 0), "{ds}: arc leaves v0");
    assert!(pot.arcs.iter().filter(|a| a.to == 0).count() <= 2, "{ds}");
    let primed = ds.apply_swaps(swaps).unwrap();
    for a in &pot.arcs {
        if matches!(a.rule, ArcRule::Condition(5 | 6)) {
            assert!(primed.pair(a.from - 1).is_balanced(), "{ds} I={swaps}: {a:?}");
        }
        assert!(
            !swaps.iter().any(|s| s.lower() == a.lower),
            "{ds}: arc from a swap in I"
        );
    }
}

#[test]
fn structural_invariants_on_population() {
    for ds in population() {
        let i_star = worst_case(&ds, Strategy::BranchAndBound).unwrap().minimal_maximizer;
        check_structure(&ds, &i_star, Membership::Original);
        check_structure(&ds, &i_star, Membership::Primed);
        check_structure(&ds, &SwapSet::empty(), Membership::Original);
    }
}

#[test]
fn degree_checks_hold_on_population() {
    for ds in population() {
        let i_star = worst_case(&ds, Strategy::BranchAndBound).unwrap().minimal_maximizer;
        let l2 = verify_lemma2(&ds, &i_star).unwrap();
        assert!(l2.holds(), "{ds} I*={i_star}: {l2:?}");
        assert!(l2.flow_holds);
        let p1 = verify_prop1(&ds, &i_star, &[SubsetFamily::Components, SubsetFamily::Singletons]).unwrap();
        assert!(p1.holds(), "{ds} I*={i_star}: {:?}", p1.failures().collect::<Vec<_>>());
    }
}

#[test]
fn all_subsets_of_the_t2_optimum() {
    let ds = DefiningSet::from_arrays(&[([1, 8], [3, 6]), ([2, 7], [4, 5])]);
    let i_star = worst_case(&ds, Strategy::Exhaustive).unwrap().minimal_maximizer;
    let p1 = verify_prop1(&ds, &i_star, &[SubsetFamily::AllSmall]).unwrap();
    assert_eq!(p1.subsets.len(), 4);
    assert!(p1.holds());
}

#[test]
fn type1_node_with_one_swap_edge() {
    let ds = base_case();
    let i = SwapSet::from_pairs([(1, 2), (5, 6), (10, 11)]).unwrap();
    assert_eq!(ds.discrepancy(&i).unwrap(), 6);
    let report = verify_prop2(&ds, &i).unwrap();
    let n = report.node(1).unwrap();
    assert_eq!(n.pair_type.number(), 1);
    assert_eq!((n.d, n.d_out, n.sum()), (1, 2, 3));
    assert!(matches!(
        n.status,
        Prop2Status::Checked {
            expected: 3,
            holds: true
        }
    ));
}

#[test]
fn export_round_trip_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for t in 1..=6 {
        for _ in 0..20 {
            let ds = sample_balanced(t, &mut rng);
            let i_star = worst_case(&ds, Strategy::BranchAndBound).unwrap().minimal_maximizer;
            let (swp, pot) = (build_swp(&ds, &i_star).unwrap(), build_pot(&ds, &i_star).unwrap());
            let ExportedGraphs::Json(text) = export_graphs(&swp, &pot, GraphFormat::Json).unwrap() else {
                panic!("json requested");
            };
            assert_eq!(import_graphs(&text).unwrap(), (swp.clone(), pot.clone()));
            let ExportedGraphs::Dot { swp: s, pot: p } = export_graphs(&swp, &pot, GraphFormat::Dot).unwrap() else {
                panic!("dot requested");
            };
            assert_eq!(s.matches(" -- ").count(), swp.edges.len());
            assert_eq!(p.matches(" -> ").count(), pot.arcs.len());
        }
    }
}
