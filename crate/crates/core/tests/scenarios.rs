//! The structured workloads replayed end to end, at sizes small enough for
//! the default test run.

use hybrid_table::workloads::{
    gen_adversarial_permutation, gen_full_table_churn, gen_mixed_sign, gen_random_permutation,
    gen_stochastic, trial_rng, Driver, RngPurpose, StochasticConfig, WorkloadOp,
};
use hybrid_table::{HybridTable, Key, MetricsLog, Mode, ResizePolicy, SaltState, Value};

fn replay(mode: Mode, policy: ResizePolicy, ops: &[WorkloadOp]) -> HybridTable {
    let mut d = Driver::new(
        HybridTable::new(mode, policy, SaltState::new(17)),
        trial_rng(17, 0, RngPurpose::Driver),
    );
    d.apply_all(ops).unwrap();
    d.into_table()
}

fn same_size_full_rebuilds(m: &MetricsLog, size: usize) -> Vec<u64> {
    m.rehash_events()
        .iter()
        .filter(|e| e.old_m == size && e.new_m == size && e.reinserted == size as u64)
        .map(|e| e.t)
        .collect()
}

/// k = 1: two tokens fill 1 then 2 slots, then keys 1 and 2 each rebuild
/// the full 2-slot hash part while the array grows 0 -> 1 -> 2.
#[test]
fn mixed_sign_k1_manual_trace() {
    let t = replay(
        Mode::Hybrid,
        ResizePolicy::Original,
        &gen_mixed_sign(1).unwrap(),
    );
    let shape: Vec<_> = t
        .metrics()
        .rehash_events()
        .iter()
        .map(|e| (e.t, e.old_m, e.new_m, e.old_a, e.new_a, e.reinserted))
        .collect();
    assert_eq!(
        shape,
        vec![
            (1, 0, 1, 0, 0, 0),
            (2, 1, 2, 0, 0, 1),
            (3, 2, 2, 0, 1, 2),
            (4, 2, 2, 1, 2, 2)
        ]
    );
    assert_eq!(t.metrics().insertion_calls(), 4 + 5);
}

/// Key 1 and every key 2^i + 1 (i < k) rebuild the full `2^k`-slot hash part.
#[test]
fn mixed_sign_rebuild_schedule() {
    for k in 1..=10u32 {
        let half = 1u64 << k;
        let t = replay(
            Mode::Hybrid,
            ResizePolicy::Original,
            &gen_mixed_sign(k).unwrap(),
        );
        let triggers: Vec<u64> = same_size_full_rebuilds(t.metrics(), half as usize)
            .into_iter()
            .map(|clock| clock - half)
            .collect();
        let mut expected = vec![1];
        expected.extend((0..k).map(|i| (1u64 << i) + 1));
        assert_eq!(triggers, expected, "k = {k}");
        assert_eq!(t.array().capacity() as u64, half);
    }
}

#[test]
fn fixed_headroom_tames_mixed_sign() {
    let ops = gen_mixed_sign(12).unwrap();
    let orig = replay(Mode::Hybrid, ResizePolicy::Original, &ops);
    let fixed = replay(Mode::Hybrid, ResizePolicy::FixedHeadroom, &ops);
    assert!(fixed.metrics().insertion_calls() * 2 < orig.metrics().insertion_calls());
}

#[test]
fn churn_is_quadratic_only_without_headroom() {
    let m = 9u32;
    let cap = 1u64 << m;
    let ops = gen_full_table_churn(m, cap).unwrap();
    let orig = replay(Mode::PureHash, ResizePolicy::Original, &ops);
    let calls = orig.metrics().insertion_calls() as f64;
    let big = (cap * cap) as f64;
    assert!(calls >= 0.5 * big * (1.0 - 2.0 / cap as f64), "{calls}");

    let fixed = replay(Mode::PureHash, ResizePolicy::FixedHeadroom, &ops);
    assert!(fixed.metrics().insertion_calls() <= 10 * (cap + cap));
}

#[test]
fn churn_without_rounds_only_grows() {
    let t = replay(
        Mode::PureHash,
        ResizePolicy::Original,
        &gen_full_table_churn(10, 0).unwrap(),
    );
    let events = t.metrics().rehash_events();
    assert!(events.iter().all(|e| e.hash_grew()));
    assert_eq!(events.len(), 11);
}

#[test]
fn adversarial_permutation_rebuilds_the_first_block() {
    for k in 2..=10u32 {
        let block = 1u64 << k;
        let t = replay(
            Mode::Hybrid,
            ResizePolicy::Original,
            &gen_adversarial_permutation(k).unwrap(),
        );
        let heavy = t
            .metrics()
            .rehash_events()
            .iter()
            .filter(|e| e.reinserted >= block)
            .count();
        assert!(heavy >= k as usize, "k = {k}: {heavy}");
        assert!(t.metrics().cost_c() >= k as u64 * block);
        assert_eq!(t.len() as u64, 3 * block);
    }
}

#[test]
fn random_permutation_cost_decomposition() {
    let n = 1u64 << 14;
    for seed in 0..5 {
        let t = replay(
            Mode::Hybrid,
            ResizePolicy::Original,
            &gen_random_permutation(n, seed, 0).unwrap(),
        );
        let m = t.metrics();
        assert!(m.hash_growing_cost() <= 6 * n);
        assert!(m.array_growing_rehashes() as u64 <= 2 + n.ilog2() as u64);
        assert!(m.cost_c() <= 6 * n + (2 + n.ilog2() as u64) * 2 * n);
        assert_eq!(t.len() as u64, n);
    }
}

#[test]
fn stochastic_run_keeps_accounting_straight() {
    let cfg = StochasticConfig::new(0.75, 200_000, 5);
    for policy in [ResizePolicy::Original, ResizePolicy::FixedHeadroom] {
        let mut d = Driver::new(
            HybridTable::with_seed(Mode::PureHash, policy, 5),
            trial_rng(5, 0, RngPurpose::Driver),
        );
        for op in gen_stochastic(&cfg).unwrap() {
            d.apply(&op).unwrap();
        }
        assert_eq!(d.present().len(), d.table().len());
        let m = d.table().metrics();
        assert_eq!(m.op_clock(), 200_000);
        let reinserted: u64 = m.rehash_events().iter().map(|e| e.reinserted).sum();
        assert_eq!(m.insertion_calls(), m.new_key_calls() + reinserted);
        if policy == ResizePolicy::FixedHeadroom {
            assert!(
                m.rehash_count_by_size().values().all(|&c| c <= 3),
                "{:?}",
                m.rehash_count_by_size()
            );
        }
    }
}

/// Two deletions followed by a forced rebuild in a 4-slot table.
#[test]
fn deleted_count_before_rehash() {
    let salt = 3;
    let mut t = HybridTable::new(
        Mode::PureHash,
        ResizePolicy::Original,
        SaltState::pinned(salt),
    );
    let mut id = 0;
    while t.hash().capacity() < 4 || t.hash().census().2 > 0 {
        t.set(Key::token(id), Value(id));
        id += 1;
    }
    assert_eq!(t.hash().census(), (4, 0, 0));
    t.delete(&Key::token(0));
    t.delete(&Key::token(1));
    let trigger = (100..)
        .map(Key::token)
        .find(|k| t.hash().slots()[t.hash().main_position(k)].is_used())
        .unwrap();
    let before = t.metrics().rehash_events().len();
    t.set(trigger, Value(0));
    let events = t.metrics().rehash_events();
    assert_eq!(events.len(), before + 1);
    let e = events.last().unwrap();
    assert_eq!((e.used_before, e.deleted_before, e.free_before), (2, 2, 0));
    assert_eq!(e.new_m, 4);
    let (_, frac) = *t.metrics().deleted_fraction_before_rehash().last().unwrap();
    assert_eq!(frac, 0.5);
}
