mod common;

use relact::controllability::{
    is_controllable, is_pairwise_controllable, is_positive_pairwise_controllable, is_positively_controllable,
    q_graphs_and_index_sets, Context,
};
use relact::oracle::{brammer_positive, kalman_reduced, pairwise_range};
use relact::Tolerances;

const SPECS: u64 = 120;

#[test]
fn analyses_agree_with_oracles_on_random_arrays() {
    let tol = Tolerances::default();
    let mut failures = Vec::new();
    for seed in 0..SPECS {
        let spec = common::random_spec(&mut common::rng(seed));
        let ctx = match Context::new(&spec, &tol) {
            Ok(c) => c,
            Err(e) => {
                failures.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        let ctrl = match is_controllable(&ctx) {
            Ok(c) => c.0,
            Err(e) => {
                failures.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        if ctrl != kalman_reduced(&spec, &tol).unwrap() {
            failures.push(format!("seed {seed}: controllable={ctrl} disagrees with Kalman"));
        }
        let pos = is_positively_controllable(&ctx).unwrap().0;
        if pos != brammer_positive(&spec, &tol).unwrap() {
            failures.push(format!("seed {seed}: positively controllable={pos} disagrees with cone test"));
        }
        for (k, l) in common::pairs(spec.q) {
            let pw = match is_pairwise_controllable(&ctx, k, l) {
                Ok(r) => r.0,
                Err(e) => {
                    failures.push(format!("seed {seed}: {e}"));
                    continue;
                }
            };
            if pw != pairwise_range(&spec, k, l, &tol).unwrap() {
                failures.push(format!("seed {seed}: pairwise ({k},{l})={pw} disagrees with range test"));
            }
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn verdict_implications_hold() {
    let tol = Tolerances::default();
    for seed in 0..SPECS {
        let spec = common::random_spec(&mut common::rng(seed));
        let ctx = Context::new(&spec, &tol).unwrap();
        let ctrl = is_controllable(&ctx).unwrap().0;
        if is_positively_controllable(&ctx).unwrap().0 {
            assert!(ctrl, "seed {seed}");
        }
        let mut all_pairs = true;
        for (k, l) in common::pairs(spec.q) {
            let pw = is_pairwise_controllable(&ctx, k, l).unwrap().0;
            all_pairs &= pw;
            if is_positive_pairwise_controllable(&ctx, k, l).unwrap().holds {
                assert!(pw, "seed {seed} pair ({k},{l})");
            }
        }
        assert_eq!(ctrl, all_pairs, "seed {seed}");
    }
}

#[test]
fn index_sets_shrink() {
    let tol = Tolerances::default();
    for seed in 0..SPECS {
        let spec = common::random_spec(&mut common::rng(seed));
        let ctx = Context::new(&spec, &tol).unwrap();
        let (_, trace) = q_graphs_and_index_sets(&ctx).unwrap();
        let mut prev: Option<&Vec<usize>> = None;
        for step in &trace.steps {
            if let Some(p) = prev {
                assert!(step.index_set.iter().all(|i| p.contains(i)), "seed {seed}: {:?}", trace.steps);
            }
            let removed_ok = step.removed.iter().all(|i| step.index_set.contains(i));
            assert!(removed_ok, "seed {seed}");
            prev = Some(&step.index_set);
        }
    }
}
