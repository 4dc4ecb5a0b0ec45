use balset_core::adversary::Adversary;
use balset_core::optsearch::{find_optimal, sample_balanced, Budget};
use balset_core::{classify_pair, swap_groups, worst_case, DefiningSet, Strategy, SwapSet};
use proptest::prelude::{any, prop, prop_assert, prop_assert_eq, proptest, ProptestConfig};
use proptest::strategy::Strategy as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn swaps_from_mask(ranks: u32, mask: &[bool]) -> SwapSet {
    let mut lowers = Vec::new();
    let mut i = 1;
    while i < ranks {
        if mask[(i - 1) as usize % mask.len()] {
            lowers.push(i);
            i += 2;
        } else {
            i += 1;
        }
    }
    SwapSet::from_lowers(lowers).unwrap()
}

fn instance(max_t: usize) -> impl proptest::strategy::Strategy<Value = (DefiningSet, SwapSet)> {
    (1..=max_t, any::<u64>(), prop::collection::vec(any::<bool>(), 1..24)).prop_map(|(t, seed, mask)| {
        let ds = sample_balanced(t, &mut ChaCha8Rng::seed_from_u64(seed));
        let swaps = swaps_from_mask(ds.ranks(), &mask);
        (ds, swaps)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn apply_swaps_is_an_involution((ds, swaps) in instance(8)) {
        let once = ds.apply_swaps(&swaps).unwrap();
        prop_assert_eq!(once.validate().is_partition(), true);
        prop_assert_eq!(once.apply_swaps(&swaps).unwrap(), ds);
    }

    #[test]
    fn discrepancy_is_even_and_at_most_twice_the_swaps((ds, swaps) in instance(8)) {
        let d = ds.discrepancy(&swaps).unwrap();
        prop_assert_eq!(d % 2, 0);
        prop_assert!(d <= 2 * swaps.len() as u64);
    }

    #[test]
    fn reflection_preserves_discrepancy((ds, swaps) in instance(6)) {
        let t = ds.t();
        prop_assert_eq!(
            ds.discrepancy(&swaps).unwrap(),
            ds.reflect().discrepancy(&swaps.reflect(t)).unwrap()
        );
        prop_assert_eq!(swaps.reflect(t).reflect(t), swaps);
    }

    #[test]
    fn branch_and_bound_agrees_with_exhaustive((ds, _) in instance(4)) {
        let a = worst_case(&ds, Strategy::Exhaustive).unwrap();
        let b = worst_case(&ds, Strategy::BranchAndBound).unwrap();
        prop_assert_eq!(a.worst_case, b.worst_case);
        prop_assert_eq!(&a.minimal_maximizer, &b.minimal_maximizer);
        prop_assert_eq!(a.maximizer_count, b.maximizer_count);
        prop_assert_eq!(a.worst_case, 2 * a.minimal_maximizer.len() as u64);
    }

    #[test]
    fn parallel_agrees_with_sequential((ds, _) in instance(6)) {
        let seq = Adversary::new(&ds).unwrap().parallel(false).run().unwrap();
        let par = Adversary::new(&ds).unwrap().parallel(true).run().unwrap();
        prop_assert_eq!(seq.worst_case, par.worst_case);
        prop_assert_eq!(seq.minimal_maximizer, par.minimal_maximizer);
        prop_assert_eq!(seq.maximizer_count, par.maximizer_count);
    }

    #[test]
    fn swap_groups_push_in_opposite_directions((ds, _) in instance(8)) {
        for p in ds.pairs() {
            let kind = classify_pair(p).unwrap();
            let Ok(groups) = swap_groups(p, ds.t()) else {
                prop_assert_eq!(kind.number(), 3);
                continue;
            };
            let a: Vec<i64> = groups.lowers_a().iter().map(|&l| p.swap_effect(l)).collect();
            let b: Vec<i64> = groups.lowers_b().iter().map(|&l| p.swap_effect(l)).collect();
            prop_assert_eq!(a[0].abs(), 1);
            prop_assert!(a.iter().all(|&e| e == a[0]), "{} group A {:?}", p, a);
            prop_assert!(b.iter().all(|&e| e == -a[0]), "{} group B {:?}", p, b);
        }
    }

    #[test]
    fn canonical_form_is_idempotent((ds, _) in instance(6)) {
        let c = ds.canonical();
        prop_assert_eq!(c.canonical(), c.clone());
        prop_assert!(c.pairs().windows(2).all(|w| w[0].min_rank() < w[1].min_rank()));
        prop_assert!(c.pairs().iter().all(|p| p.odd()[0] == p.min_rank()));
        prop_assert_eq!(c.rank_set(), ds.rank_set());
    }

    #[test]
    fn worst_case_is_invariant_under_symmetry((ds, _) in instance(3)) {
        let w = worst_case(&ds, Strategy::BranchAndBound).unwrap().worst_case;
        prop_assert_eq!(worst_case(&ds.canonical(), Strategy::BranchAndBound).unwrap().worst_case, w);
        prop_assert_eq!(worst_case(&ds.reflect(), Strategy::BranchAndBound).unwrap().worst_case, w);
    }
}

#[test]
fn optima_are_closed_under_reflection() {
    for t in 1..=4 {
        let r = find_optimal(t, Budget::default()).unwrap();
        for o in &r.optima {
            assert!(r.optima.contains(&o.reflect().canonical()), "t={t}: {o}");
        }
    }
}
