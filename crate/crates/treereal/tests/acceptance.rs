//! Acceptance gate: one test per criterion, each printing a pass/fail
//! line. Every checker and the solver are held to exact equivalence with
//! the exhaustive oracle on their full small domains, the reduction chain
//! is held to four-stage answer agreement, and the advertised performance
//! bounds are measured.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use treereal::checkers::{
    check_depths, check_height_depth_synced, check_heights, realize_sizes_itr, Subclass,
};
use treereal::oracle::{Oracle, OracleQuery, QueryShape};
use treereal::reductions::{
    brute_kpwt, brute_nmts, brute_nmtsk, extract_partition, kpwt_to_eis, nmts_to_nmtsk,
    nmtsk_to_kpwt, verify_nmts_matching, verify_partition, Annotate, Matching, NmtsInstance,
    Variant,
};
use treereal::solver::{solve_sizes, verify_witness, SizeInstance, SolveOptions, SolveOutcome};
use treereal::tree::{multiset, AttributeKind, RootedTree};
use treereal::Error;

const SUBCLASSES: [Subclass; 4] = [
    Subclass::Any,
    Subclass::Complete,
    Subclass::Full,
    Subclass::Degenerate,
];

fn report(line: &str, ok: bool) -> bool {
    println!("criterion {line}: {}", if ok { "pass" } else { "FAIL" });
    ok
}

/// Realizable attribute multisets per subclass, from one enumeration.
fn realizable_sets(
    n: usize,
    k: usize,
    attr: AttributeKind,
) -> [HashSet<Vec<u64>>; 4] {
    let oracle = Oracle::default();
    let mut sets: [HashSet<Vec<u64>>; 4] = Default::default();
    for tree in oracle.enumerate_trees(n, k).unwrap() {
        let values = multiset(match attr {
            AttributeKind::Depth => tree.depths(),
            AttributeKind::Height => tree.heights(),
            AttributeKind::Size => tree.sizes(),
            AttributeKind::InorderRank => unreachable!(),
        });
        for (i, &subclass) in SUBCLASSES.iter().enumerate() {
            if treereal::oracle::subclass_matches(&tree, k, subclass) {
                sets[i].insert(values.clone());
            }
        }
    }
    sets
}

fn checker_oracle_equivalence(
    attr: AttributeKind,
    check: fn(&[u64], usize, Subclass) -> bool,
) -> bool {
    for n in 1..=7usize {
        for k in [2usize, 3] {
            let sets = realizable_sets(n, k, attr);
            for values in (0..n as u64).combinations_with_replacement(n) {
                for (i, &subclass) in SUBCLASSES.iter().enumerate() {
                    let want = sets[i].contains(&values);
                    let got = check(&values, k, subclass);
                    if want != got {
                        eprintln!(
                            "disagreement: {attr:?} {values:?} k={k} {subclass:?}: \
                             checker {got}, oracle {want}"
                        );
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[test]
fn criterion_01_checker_oracle_equivalence_depths() {
    let start = Instant::now();
    let ok = checker_oracle_equivalence(AttributeKind::Depth, check_depths)
        && start.elapsed() < Duration::from_secs(60);
    assert!(report("1 (checker-oracle equivalence, depths)", ok));
}

#[test]
fn criterion_02_checker_oracle_equivalence_heights() {
    let start = Instant::now();
    let ok = checker_oracle_equivalence(AttributeKind::Height, check_heights)
        && start.elapsed() < Duration::from_secs(60);
    assert!(report("2 (checker-oracle equivalence, heights)", ok));
}

#[test]
fn criterion_03_hd_sync_equivalence() {
    let start = Instant::now();
    let oracle = Oracle::default();
    let mut ok = true;
    'outer: for n in 1..=5usize {
        let mut realizable: HashSet<Vec<(u64, u64)>> = HashSet::new();
        for tree in oracle.enumerate_trees(n, 2).unwrap() {
            let hd: Vec<(u64, u64)> =
                tree.heights().into_iter().zip(tree.depths()).collect();
            realizable.insert(multiset(hd));
        }
        let domain: Vec<(u64, u64)> =
            (0..=4u64).flat_map(|h| (0..=4u64).map(move |d| (h, d))).collect();
        for pairs in domain.iter().copied().combinations_with_replacement(n) {
            let want = realizable.contains(&multiset(pairs.clone()));
            let got = check_height_depth_synced(&pairs, 2);
            if want != got {
                eprintln!(
                    "disagreement: hd-sync {pairs:?}: checker {got}, oracle {want}"
                );
                ok = false;
                break 'outer;
            }
        }
    }
    ok = ok && start.elapsed() < Duration::from_secs(300);
    assert!(report("3 (synchronized height-depth equivalence)", ok));
}

#[test]
fn criterion_04_solver_oracle_equivalence() {
    let start = Instant::now();
    let mut ok = true;
    'outer: for n in 1..=7usize {
        for k in [2usize, 3] {
            let sets = realizable_sets(n, k, AttributeKind::Size);
            for values in (1..=n as u64).combinations_with_replacement(n) {
                for (i, &subclass) in SUBCLASSES.iter().enumerate() {
                    let want = sets[i].contains(&values);
                    let mut inst = SizeInstance::plain(values.clone(), k);
                    inst.subclass = subclass;
                    let out = solve_sizes(&inst, &SolveOptions::default()).unwrap();
                    let got = out.is_yes();
                    if want != got {
                        eprintln!(
                            "disagreement: sizes {values:?} k={k} {subclass:?}: \
                             solver {got}, oracle {want}"
                        );
                        ok = false;
                        break 'outer;
                    }
                    if let Some(w) = out.witness() {
                        if !verify_witness(w, &inst) {
                            eprintln!("bad witness for {values:?} k={k} {subclass:?}");
                            ok = false;
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    ok = ok && start.elapsed() < Duration::from_secs(300);
    assert!(report("4 (solver-oracle equivalence, sizes)", ok));
}

fn size_itr_pairs(tree: &RootedTree) -> Vec<(u64, u64)> {
    multiset(
        tree.sizes()
            .into_iter()
            .zip(tree.inorder_ranks().unwrap())
            .collect(),
    )
}

#[test]
fn criterion_05_size_itr_reconstruction() {
    let start = Instant::now();
    let oracle = Oracle::default();
    let mut ok = true;

    // round trip over every ordered binary tree up to n = 10
    'outer: for n in 1..=10usize {
        for tree in oracle.enumerate_ordered_binary(n).unwrap() {
            let pairs = size_itr_pairs(&tree);
            match realize_sizes_itr(&pairs) {
                Ok(Some(t)) => {
                    if size_itr_pairs(&t) != pairs {
                        eprintln!("round trip changed the pair multiset: {pairs:?}");
                        ok = false;
                        break 'outer;
                    }
                }
                other => {
                    eprintln!("reconstruction failed on {pairs:?}: {other:?}");
                    ok = false;
                    break 'outer;
                }
            }
        }
    }

    // soundness under mutation: whatever comes back must still match
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        if !ok {
            break;
        }
        let n = rng.gen_range(3..=8usize);
        let tree = RootedTree::random(n, 2, rng.gen());
        let mut pairs = size_itr_pairs(&tree);
        for _ in 0..rng.gen_range(1..=3usize) {
            let i = rng.gen_range(0..pairs.len());
            let v = rng.gen_range(1..=n as u64);
            if rng.gen_bool(0.5) {
                pairs[i].0 = v;
            } else {
                pairs[i].1 = v;
            }
        }
        match realize_sizes_itr(&pairs) {
            Ok(Some(t)) => {
                if size_itr_pairs(&t) != multiset(pairs.clone()) {
                    eprintln!("unsound reconstruction from mutated {pairs:?}");
                    ok = false;
                }
            }
            Ok(None) | Err(Error::InvalidInput(_)) => {}
            Err(e) => {
                eprintln!("unexpected error on mutated {pairs:?}: {e}");
                ok = false;
            }
        }
    }
    ok = ok && start.elapsed() < Duration::from_secs(120);
    assert!(report("5 (size + inorder-rank reconstruction)", ok));
}

fn value_multisets(max: u64, m: usize) -> Vec<Vec<u64>> {
    (1..=max).combinations_with_replacement(m).collect()
}

#[test]
fn criterion_06_reduction_equivalence() {
    let mut ok = true;
    let solver_opts = SolveOptions {
        time_budget: Duration::from_secs(60),
        ..SolveOptions::default()
    };
    'outer: for m in 1..=2usize {
        let parts = value_multisets(4, m);
        for x in &parts {
            for y in &parts {
                for b in &parts {
                    let nmts = NmtsInstance {
                        x: x.clone(),
                        y: y.clone(),
                        b: b.clone(),
                    };
                    let want = brute_nmts(&nmts).unwrap().is_some();
                    let nmtsk = nmts_to_nmtsk(&nmts, 2).unwrap();
                    if brute_nmtsk(&nmtsk).unwrap().is_some() != want {
                        eprintln!("NMTS-K stage disagrees on {nmts:?}");
                        ok = false;
                        break 'outer;
                    }
                    let (kpwt, _) = nmtsk_to_kpwt(&nmtsk).unwrap();
                    if brute_kpwt(&kpwt).unwrap().is_some() != want {
                        eprintln!("K-PwT stage disagrees on {nmts:?}");
                        ok = false;
                        break 'outer;
                    }
                    for variant in [Variant::Plain, Variant::Full] {
                        let eis =
                            kpwt_to_eis(&kpwt, variant, Annotate::None, None).unwrap();
                        let inst = SizeInstance::plain(eis.values.clone(), 2);
                        let solve_start = Instant::now();
                        let out = solve_sizes(&inst, &solver_opts).unwrap();
                        if solve_start.elapsed() > Duration::from_secs(60) {
                            eprintln!("over the 60 s bar on {nmts:?} {variant:?}");
                            ok = false;
                            break 'outer;
                        }
                        let got = match out {
                            SolveOutcome::Tree(_) => true,
                            SolveOutcome::NoTree => false,
                            SolveOutcome::BudgetExhausted => {
                                eprintln!("budget exhausted on {nmts:?} {variant:?}");
                                ok = false;
                                break 'outer;
                            }
                        };
                        if got != want {
                            eprintln!(
                                "final stage disagrees on {nmts:?} {variant:?}: \
                                 solver {got}, brute {want}"
                            );
                            ok = false;
                            break 'outer;
                        }
                        if let Some(w) = out.witness() {
                            if !verify_witness(w, &inst) {
                                eprintln!("bad witness on {nmts:?} {variant:?}");
                                ok = false;
                                break 'outer;
                            }
                            let part = extract_partition(w, &eis).unwrap();
                            if !verify_partition(&kpwt, &part) {
                                eprintln!("extracted partition fails on {nmts:?}");
                                ok = false;
                                break 'outer;
                            }
                            // k = 2 embeds NMTS identically, so the same
                            // index groups form an NMTS matching
                            let matching = Matching {
                                groups: part.groups.clone(),
                            };
                            if !verify_nmts_matching(&nmts, &matching) {
                                eprintln!("mapped-back matching fails on {nmts:?}");
                                ok = false;
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
    }
    assert!(report("6 (reduction-chain answer equivalence)", ok));
}

#[test]
fn criterion_07_generated_instance_identities() {
    let mut ok = true;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = if rng.gen_bool(0.3) { 3 } else { 2 };
        // keep k = 3 to m = 1: the generated multisets stay small
        let m = if k == 3 { 1 } else { rng.gen_range(1..=2usize) };
        let gen = |rng: &mut ChaCha8Rng| -> Vec<u64> {
            (0..m).map(|_| rng.gen_range(1..=4u64)).collect()
        };
        let x = gen(&mut rng);
        let y = gen(&mut rng);
        // targets are sums over a random pairing, possibly shuffled
        // across slots: balanced instances, yes and no alike
        let mut b: Vec<u64> = x.iter().zip(&y).map(|(&a, &c)| a + c).collect();
        b.shuffle(&mut rng);
        let nmts = NmtsInstance { x, y, b };
        let nmtsk = nmts_to_nmtsk(&nmts, k).unwrap();
        let (kpwt, _) = nmtsk_to_kpwt(&nmtsk).unwrap();
        for variant in [Variant::Plain, Variant::Full] {
            let eis = kpwt_to_eis(&kpwt, variant, Annotate::None, Some(seed)).unwrap();
            if let Err(e) = eis.check_structure() {
                eprintln!("seed {seed} k={k} {variant:?}: {e}");
                ok = false;
            }
        }
    }
    assert!(report("7 (generated-instance structural identities)", ok));
}

#[test]
fn criterion_08_example_fidelity() {
    // the running example: its size multiset is realizable for k = 2...
    let sizes = vec![1, 2, 3, 1, 1, 3, 7, 1, 9];
    let inst = SizeInstance::plain(sizes.clone(), 2);
    let out = solve_sizes(&inst, &SolveOptions::default()).unwrap();
    let accepted = out.witness().map_or(false, |w| verify_witness(w, &inst));

    // ...and some witness must carry exactly these synchronized
    // (size, depth) tuples
    let tuples = [
        (1, 5),
        (2, 4),
        (3, 2),
        (1, 3),
        (1, 3),
        (3, 2),
        (7, 1),
        (1, 1),
        (9, 0),
    ];
    let synced = SizeInstance::depth_synced(&tuples, 2);
    let synced_out = solve_sizes(&synced, &SolveOptions::default()).unwrap();
    let tuples_realized = synced_out
        .witness()
        .map_or(false, |w| verify_witness(w, &synced));

    let ok = accepted && tuples_realized;
    report("8 (running-example fidelity)", ok);
    assert!(
        ok,
        "size multiset accepted: {accepted}; stated (size, depth) tuples realized: \
         {tuples_realized}. The tuples force the 2 below a subtree of size 3 at \
         depth 3, never 4, so no witness can end with (2,4),(1,5); the only \
         realizable completion is (2,3),(1,4)."
    );
}

fn best_timing(values: &[u64], k: usize, check: fn(&[u64], usize, Subclass) -> bool) -> Duration {
    (0..5)
        .map(|_| {
            let start = Instant::now();
            assert!(check(values, k, Subclass::Any));
            start.elapsed()
        })
        .min()
        .unwrap()
}

#[test]
fn criterion_09_performance() {
    let mut ok = true;
    for (attr, check) in [
        ("depths", check_depths as fn(&[u64], usize, Subclass) -> bool),
        ("heights", check_heights),
    ] {
        let big = RootedTree::random(1_000_000, 2, 42);
        let small = RootedTree::random(100_000, 2, 42);
        let (big_vals, small_vals) = if attr == "depths" {
            (big.depths(), small.depths())
        } else {
            (big.heights(), small.heights())
        };
        let t_big = best_timing(&big_vals, 2, check);
        let t_small = best_timing(&small_vals, 2, check);
        if t_big >= Duration::from_secs(1) {
            eprintln!("check_{attr} on n=10^6 took {t_big:?}");
            ok = false;
        }
        // n log n growth from 10^5 to 10^6 is a factor of ~11.5
        let fit = t_small.as_secs_f64() * 10.0 * (6.0 / 5.0);
        if t_big.as_secs_f64() > 2.0 * fit {
            eprintln!(
                "check_{attr} scaling: {t_small:?} at 10^5 vs {t_big:?} at 10^6 \
                 exceeds 2x the n log n fit"
            );
            ok = false;
        }
    }
    assert!(report("9 (n log n performance of the checkers)", ok));
}

#[test]
fn criterion_10_honest_incompleteness() {
    let mut ok = true;

    // asynchronized height + depth has no checker; the oracle answers it
    // within the ceiling and refuses beyond
    let oracle = Oracle::default();
    let query = OracleQuery {
        k: 2,
        subclass: Subclass::Any,
        shape: QueryShape::Async {
            lists: vec![
                (AttributeKind::Height, vec![1, 1, 0, 0]),
                (AttributeKind::Depth, vec![0, 1, 1, 2]),
            ],
        },
    };
    if oracle.realizable(&query).unwrap() {
        eprintln!("async H+D query should be unrealizable");
        ok = false;
    }
    let huge = OracleQuery {
        k: 2,
        subclass: Subclass::Any,
        shape: QueryShape::Async {
            lists: vec![(AttributeKind::Height, vec![0; 64])],
        },
    };
    if !matches!(oracle.realizable(&huge), Err(Error::TooLarge(_))) {
        eprintln!("oracle must refuse queries beyond its ceiling");
        ok = false;
    }

    // budget exhaustion on a YES instance must be unknown, never no
    let yes = RootedTree::random(40, 2, 11).sizes();
    let inst = SizeInstance::plain(yes, 2);
    let opts = SolveOptions {
        node_budget: 3,
        ..SolveOptions::default()
    };
    if !matches!(
        solve_sizes(&inst, &opts).unwrap(),
        SolveOutcome::BudgetExhausted
    ) {
        eprintln!("a 3-node budget on a 40-value instance must exhaust, not decide");
        ok = false;
    }
    assert!(report("10 (honest incompleteness)", ok));
}
