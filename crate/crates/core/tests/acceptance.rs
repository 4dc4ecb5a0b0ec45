//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use balset_core::adversary::{minimal_maximizer_property, swap_set_count, Adversary};
use balset_core::construct::{self, base_case, check_lemma1, construct_for_z, lower_bound_even, upper_bound};
use balset_core::graphs::{verify_lemma2, verify_prop1, verify_prop2, Prop2Status, SubsetFamily};
use balset_core::optsearch::{enumerate_balanced, find_optimal, sample_balanced, Budget};
use balset_core::{worst_case, DefiningSet, Rank, Strategy, SwapSet};
use proptest::prelude::{any, prop, prop_assert_eq, Strategy as Gen};
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

const POPULATION_SEED: u64 = 0x5eed_0007;
const PROPERTY_CASES: u32 = 10_000;

fn within(limit: Duration, start: Instant) -> Outcome {
    let spent = start.elapsed();
    if spent <= limit {
        Ok(format!("{spent:.2?}"))
    } else {
        Err(format!("took {spent:.2?}, limit {limit:?}"))
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1() -> Outcome {
    let start = Instant::now();
    let r = find_optimal(2, Budget::default()).map_err(|e| e.to_string())?;
    let example = DefiningSet::from_arrays(&[([1, 8], [3, 6]), ([2, 7], [4, 5])]).canonical();
    check(r.certified, || "search not certified".into())?;
    check(r.d_star == 4, || format!("d_star = {}, expected 4", r.d_star))?;
    check(r.optima.contains(&example), || {
        format!("example set missing from optima {:?}", r.optima)
    })?;
    let time = within(Duration::from_secs(5), start)?;
    Ok(format!("d_star=4, {} optima, {time}", r.optima.len()))
}

fn c2() -> Outcome {
    let start = Instant::now();
    let ds = DefiningSet::from_arrays(&[([1, 4], [2, 3]), ([5, 8], [6, 7])]);
    let r = worst_case(&ds, Strategy::Exhaustive).map_err(|e| e.to_string())?;
    check(r.worst_case == 6, || format!("worst case {}, expected 6", r.worst_case))?;
    let time = within(Duration::from_secs(1), start)?;
    Ok(format!("worst case 6, {time}"))
}

fn c3() -> Outcome {
    let start = Instant::now();
    let r = worst_case(&base_case(), Strategy::Exhaustive).map_err(|e| e.to_string())?;
    check(r.enumerated == 1597 && swap_set_count(4) == 1597, || {
        format!("enumerated {} swap sets, expected 1597", r.enumerated)
    })?;
    check(r.worst_case == 6, || format!("worst case {}, expected 6", r.worst_case))?;
    check(r.worst_case == upper_bound(2).unwrap(), || {
        "upper bound mismatch".into()
    })?;
    let time = within(Duration::from_secs(1), start)?;
    Ok(format!("worst case 6 over 1597 swap sets, {time}"))
}

fn c4() -> Outcome {
    let start = Instant::now();
    let r = find_optimal(4, Budget::default()).map_err(|e| e.to_string())?;
    let expected = DefiningSet::from_arrays(&[
        ([1, 16], [8, 9]),
        ([2, 7], [4, 5]),
        ([10, 15], [12, 13]),
        ([3, 14], [6, 11]),
    ])
    .canonical();
    check(r.certified, || "search not certified".into())?;
    check(r.d_star == 6, || format!("d_star = {}, expected 6", r.d_star))?;
    check(r.optima == vec![expected.clone()], || {
        format!("optima {:?}, expected only {expected}", r.optima)
    })?;
    let time = within(Duration::from_secs(3600), start)?;
    Ok(format!(
        "d_star=6, unique optimum over {} candidates, {time}",
        r.candidates_examined
    ))
}

fn c5() -> Outcome {
    let start = Instant::now();
    let ds = construct_for_z(3).map_err(|e| e.to_string())?;
    let r = Adversary::new(&ds)
        .and_then(|a| a.strategy(Strategy::Exhaustive).parallel(true).run())
        .map_err(|e| e.to_string())?;
    check(r.enumerated == 24_157_817, || {
        format!("enumerated {} matchings, expected 24157817", r.enumerated)
    })?;
    check(r.worst_case == 14, || format!("d_3 = {}, expected 14", r.worst_case))?;
    let lemma = check_lemma1(2).map_err(|e| e.to_string())?;
    check(lemma.holds && lemma.d_z == 6 && lemma.d_z_plus_1 == 14, || {
        format!("{lemma:?}")
    })?;
    check(r.worst_case == upper_bound(3).unwrap(), || {
        "d_3 differs from 2^4 - 2".into()
    })?;
    let time = within(Duration::from_secs(600), start)?;
    Ok(format!("d_3=14 over F(37) matchings, 14 <= 2*6+2, {time}"))
}

fn c6() -> Outcome {
    let mut parts = Vec::new();
    for t in 1..=4 {
        let r = find_optimal(t, Budget::default()).map_err(|e| e.to_string())?;
        let lb = lower_bound_even(t as u64);
        check(lb <= r.d_star, || {
            format!("t={t}: lower bound {lb} > d_star {}", r.d_star)
        })?;
        check(
            construct::lower_bound(t as u64) <= num_rational::Ratio::from_integer(r.d_star as i64),
            || format!("t={t}: rational lower bound above d_star"),
        )?;
        parts.push(format!("t={t}: {lb}<={}", r.d_star));
    }
    Ok(parts.join(", "))
}

fn population() -> Vec<DefiningSet> {
    let mut pop: Vec<DefiningSet> = (1..=2).flat_map(enumerate_balanced).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(POPULATION_SEED);
    for t in [3, 4] {
        for _ in 0..1000 {
            pop.push(sample_balanced(t, &mut rng));
        }
    }
    pop
}

fn c7(pop: &[DefiningSet]) -> Outcome {
    let mut failures = Vec::new();
    for ds in pop {
        let exact = worst_case(ds, Strategy::Exhaustive).map_err(|e| e.to_string())?;
        let bnb = worst_case(ds, Strategy::BranchAndBound).map_err(|e| e.to_string())?;
        let agree = exact.worst_case == bnb.worst_case
            && exact.minimal_maximizer == bnb.minimal_maximizer
            && exact.maximizer_count == bnb.maximizer_count;
        if !agree {
            failures.push(format!("{ds}: strategies disagree ({exact:?} vs {bnb:?})"));
        }
        if !minimal_maximizer_property(ds, &exact) {
            failures.push(format!(
                "{ds}: worst case {} but |I*| = {}",
                exact.worst_case,
                exact.minimal_maximizer.len()
            ));
        }
    }
    check(failures.is_empty(), || failures.join("; "))?;
    Ok(format!("{} sets, zero violations", pop.len()))
}

fn c8(pop: &[DefiningSet]) -> Outcome {
    let mut failures = Vec::new();
    for ds in pop {
        let i_star = worst_case(ds, Strategy::BranchAndBound)
            .map_err(|e| e.to_string())?
            .minimal_maximizer;
        let l2 = verify_lemma2(ds, &i_star).map_err(|e| e.to_string())?;
        if !l2.holds() {
            failures.push(format!("{ds} I*={i_star}: {l2:?}"));
        }
        let p1 = verify_prop1(ds, &i_star, &[SubsetFamily::Components, SubsetFamily::Singletons])
            .map_err(|e| e.to_string())?;
        if !p1.holds() {
            let bad: Vec<_> = p1.failures().collect();
            failures.push(format!("{ds} I*={i_star}: {bad:?}"));
        }
    }
    check(failures.is_empty(), || {
        format!("{} falsifications: {}", failures.len(), failures.join("; "))
    })?;
    Ok(format!("{} sets, zero violations", pop.len()))
}

fn prop2_witness(pairs: &[([Rank; 2], [Rank; 2])], node: usize, kind: u8, d: usize, sum: usize) -> Result<(), String> {
    let ds = DefiningSet::from_arrays(pairs);
    let i_star = worst_case(&ds, Strategy::Exhaustive)
        .map_err(|e| e.to_string())?
        .minimal_maximizer;
    let report = verify_prop2(&ds, &i_star).map_err(|e| e.to_string())?;
    let n = report.node(node).ok_or_else(|| format!("{ds}: node {node} missing"))?;
    check(
        n.pair_type.number() == kind
            && n.d == d
            && n.sum() == sum
            && matches!(n.status, Prop2Status::Checked { holds: true, .. }),
        || format!("{ds} I*={i_star}: {n:?}"),
    )
}

fn c9() -> Outcome {
    prop2_witness(&[([1, 10], [5, 6]), ([2, 11], [4, 9]), ([3, 12], [7, 8])], 3, 1, 0, 3)?;
    prop2_witness(
        &[
            ([1, 11], [4, 8]),
            ([2, 15], [7, 10]),
            ([3, 14], [5, 12]),
            ([6, 16], [9, 13]),
        ],
        4,
        2,
        0,
        4,
    )?;
    prop2_witness(
        &[
            ([1, 14], [7, 8]),
            ([2, 11], [3, 10]),
            ([4, 15], [6, 13]),
            ([5, 16], [9, 12]),
        ],
        4,
        2,
        0,
        4,
    )?;
    Ok("isolated type 1 -> 3, isolated type 2 -> 4".into())
}

fn swap_set_from_mask(ranks: Rank, mask: &[bool]) -> SwapSet {
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
    SwapSet::from_lowers(lowers).expect("greedy lowers are disjoint")
}

fn instance(max_t: usize) -> impl Gen<Value = (DefiningSet, SwapSet)> {
    (1..=max_t, any::<u64>(), prop::collection::vec(any::<bool>(), 16)).prop_map(|(t, seed, mask)| {
        let ds = sample_balanced(t, &mut ChaCha8Rng::seed_from_u64(seed));
        let swaps = swap_set_from_mask(ds.ranks(), &mask);
        (ds, swaps)
    })
}

fn run_property<S: Gen>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases: PROPERTY_CASES,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| format!("{name}: {e}"))
}

fn c10() -> Outcome {
    let start = Instant::now();
    run_property("involution", instance(6), |(ds, swaps)| {
        let once = ds.apply_swaps(&swaps).unwrap();
        prop_assert_eq!(once.apply_swaps(&swaps).unwrap(), ds);
        Ok(())
    })?;
    run_property("worst case parity", instance(3), |(ds, _)| {
        let r = worst_case(&ds, Strategy::BranchAndBound).unwrap();
        prop_assert_eq!(r.worst_case % 2, 0);
        prop_assert_eq!(r.worst_case, 2 * r.minimal_maximizer.len() as u64);
        Ok(())
    })?;
    run_property(
        "reflection invariance at t=2",
        instance(2).prop_filter("t=2", |(ds, _)| ds.t() == 2),
        |(ds, swaps)| {
            let mirrored = ds.reflect();
            prop_assert_eq!(
                ds.discrepancy(&swaps).unwrap(),
                mirrored.discrepancy(&swaps.reflect(2)).unwrap()
            );
            prop_assert_eq!(
                worst_case(&ds, Strategy::Exhaustive).unwrap().worst_case,
                worst_case(&mirrored, Strategy::Exhaustive).unwrap().worst_case
            );
            Ok(())
        },
    )?;
    for z in 2..=5 {
        let ds = construct_for_z(z).map_err(|e| e.to_string())?;
        check(ds.validate().is_ok(), || {
            format!("level z={z} is not a balanced partition")
        })?;
        if z == 2 {
            continue;
        }
        // Level z closes with the pair added by the step from level z - 1.
        let close = ds.pairs().last().unwrap();
        let target = 5 * (1u64 << z) - 3;
        check(close.odd_sum() == target && close.even_sum() == target, || {
            format!("level z={z}: closing pair {close} sums differ from {target}")
        })?;
    }
    let time = within(Duration::from_secs(120), start)?;
    Ok(format!(
        "{PROPERTY_CASES} cases per property, levels z=2..5 valid, {time}"
    ))
}

fn main() -> ExitCode {
    let pop = population();
    let criteria: Vec<Criterion> = vec![
        ("optimal search at t=2", Box::new(c1)),
        ("suboptimal t=2 example", Box::new(c2)),
        ("base case over all swap sets", Box::new(c3)),
        ("unique optimum at t=4", Box::new(c4)),
        ("exact d_3 and the doubling recursion", Box::new(c5)),
        ("lower bound below d_star for t=1..4", Box::new(c6)),
        (
            "worst case equals twice the minimal maximizer size",
            Box::new(|| c7(&pop)),
        ),
        ("swap and potential graph degree checks", Box::new(|| c8(&pop))),
        ("isolated node degree sums", Box::new(c9)),
        ("structural invariants", Box::new(c10)),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS [{:>2}] {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{:>2}] {name}: {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
