mod common;

use classmem::cma::{BoolMode, Cma, CmaConfiguration};
use classmem::coverability::{wcma_empty, Emptiness};
use classmem::data::{ClassMemory, DataWord};
use classmem::petrinet::{encode_reachability_cma, example_net, QueryKind};
use classmem::sample::{names, Sampler};
use common::cma_oracle;
use proptest::prelude::*;
use rand::Rng;

fn example() -> Cma {
    encode_reachability_cma(&example_net(QueryKind::Reach)).unwrap().machine
}

fn witness() -> DataWord {
    DataWord::from_indices(&[("a", 1), ("a", 2), ("a", 1), ("a", 3), ("a", 2), ("a", 4), ("a", 3), ("a", 4)])
}

#[test]
fn fresh_read_then_no_rule_for_a_seen_value() {
    let mut a = Cma::new(["q0", "q1"], ["a"], 0);
    a.add_transition(0, 0, None, 1);
    let w = DataWord::from_indices(&[("a", 0)]);
    let d = w.entries[0].value;
    let c = a.initial_configuration();
    let next = a.step(&c, 0, d);
    assert_eq!(next, vec![CmaConfiguration { control: 1, memory: ClassMemory::new().with(d, 1) }]);
    let seen = CmaConfiguration { control: 0, memory: ClassMemory::new().with(d, 1) };
    assert!(a.step(&seen, 0, d).is_empty());
}

#[test]
fn example_edge_from_s2_reads_a_value_last_seen_in_s1() {
    let a = example();
    let w = witness();
    let d1 = w.entries[0].value;
    let c = CmaConfiguration { control: 2, memory: ClassMemory::new().with(d1, 1) };
    let next = a.step(&c, 0, d1);
    assert_eq!(next, vec![CmaConfiguration { control: 4, memory: ClassMemory::new().with(d1, 4) }]);
}

#[test]
fn example_accepts_the_witness_ending_in_s7() {
    let a = example();
    let w = witness();
    assert!(cma_oracle(&a, &w));
    let run = a.accepting_run(&w).unwrap();
    let last = run.last().unwrap();
    assert_eq!(a.states[last.control], "s7");
    let states: Vec<&str> = w.distinct_values().iter().map(|v| a.states[last.memory.get(*v).unwrap()].as_str()).collect();
    assert_eq!(states, ["s4", "s4", "s6", "s7"]);
    // locally accepting: all except the token states
    let fl: Vec<&str> = a.locally_accepting.iter().map(|s| a.states[*s].as_str()).collect();
    assert_eq!(fl, ["s0", "s2", "s4", "s6", "s7"]);
}

#[test]
fn empty_word_depends_on_the_initial_state() {
    let mut a = Cma::new(["q0"], ["a"], 0);
    assert!(!a.accepts(&DataWord::flat()));
    a.globally_accepting.insert(0);
    assert!(a.accepts(&DataWord::flat()));
}

#[test]
fn machine_without_transitions_rejects_nonempty_words() {
    let mut a = Cma::new(["q0"], ["a"], 0);
    a.globally_accepting.insert(0);
    let c = a.complete().unwrap();
    let mut s = Sampler::new(5);
    for _ in 0..50 {
        let w = s.flat_word(&names("a", 1), 5, 3);
        assert_eq!(c.accepts(&w), w.is_empty());
    }
}

#[test]
fn universal_machine_has_empty_complement() {
    let mut a = Cma::new(["q0"], ["a"], 0);
    a.add_transition(0, 0, None, 0);
    a.add_transition(0, 0, Some(0), 0);
    a.globally_accepting.insert(0);
    assert_eq!(wcma_empty(&a.complement().unwrap()).unwrap(), Emptiness::Empty);
}

#[test]
fn complete_leaves_complete_machines_alone() {
    let mut s = Sampler::new(6);
    let a = s.det_complete_weak_cma(3, 2);
    assert!(a.is_complete());
    assert_eq!(a.complete().unwrap(), a);
}

#[test]
fn products_of_deterministic_machines_follow_the_factors() {
    let mut s = Sampler::new(7);
    let letters = names("a", 2);
    for _ in 0..10 {
        let a = s.det_complete_weak_cma(3, 2);
        let b = s.det_complete_weak_cma(2, 2);
        let and = a.product(&b, BoolMode::Intersection).unwrap();
        let or = a.product(&b, BoolMode::Union).unwrap();
        for _ in 0..50 {
            let w = s.flat_word(&letters, 6, 3);
            let (x, y) = (cma_oracle(&a, &w), cma_oracle(&b, &w));
            assert_eq!(and.accepts(&w), x && y);
            assert_eq!(or.accepts(&w), x || y);
        }
    }
}

#[test]
fn complement_splits_every_word() {
    let mut s = Sampler::new(8);
    let letters = names("a", 2);
    for _ in 0..10 {
        let a = s.det_complete_weak_cma(3, 2);
        let not_a = a.complement().unwrap();
        let back = not_a.complement().unwrap();
        for _ in 0..100 {
            let w = s.flat_word(&letters, 6, 3);
            assert_ne!(a.accepts(&w), not_a.accepts(&w));
            assert_eq!(back.accepts(&w), cma_oracle(&a, &w));
        }
    }
}

#[test]
fn completion_preserves_membership() {
    let mut s = Sampler::new(9);
    let letters = names("a", 2);
    for _ in 0..10 {
        // deterministic but partial: drop about half of the moves
        let mut a = s.det_complete_weak_cma(3, 2);
        let keys: Vec<_> = a.transitions.keys().cloned().collect();
        for k in keys {
            if s.rng().gen_bool(0.5) {
                a.transitions.remove(&k);
            }
        }
        let c = a.complete().unwrap();
        assert!(c.is_complete());
        for _ in 0..100 {
            let w = s.flat_word(&letters, 6, 3);
            assert_eq!(c.accepts(&w), cma_oracle(&a, &w));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn membership_matches_the_reference(seed in any::<u64>(), weak in any::<bool>()) {
        let mut s = Sampler::new(seed);
        let a = s.cma(3, 2, weak, 0.25);
        for _ in 0..10 {
            let w = s.flat_word(&names("a", 2), 6, 3);
            prop_assert_eq!(a.accepts(&w), cma_oracle(&a, &w));
        }
    }

    #[test]
    fn intersection_with_itself_is_idempotent(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let a = s.cma(3, 1, false, 0.3);
        let aa = a.product(&a, BoolMode::Intersection).unwrap();
        for _ in 0..10 {
            let w = s.flat_word(&names("a", 1), 5, 3);
            prop_assert_eq!(aa.accepts(&w), a.accepts(&w));
        }
    }

    #[test]
    fn silent_elimination_keeps_the_language(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let mut a = s.cma(4, 1, true, 0.15);
        for q in 0..3 {
            a.silent.insert((q, q + 1));
        }
        let b = a.eliminate_silent().unwrap();
        prop_assert!(b.silent.is_empty());
        for _ in 0..10 {
            let w = s.flat_word(&names("a", 1), 5, 3);
            prop_assert_eq!(b.accepts(&w), cma_oracle(&a, &w));
        }
    }

    #[test]
    fn every_configuration_on_a_run_maps_only_read_values(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let a = s.cma(3, 2, true, 0.4);
        let w = s.flat_word(&names("a", 2), 6, 3);
        if let Some(run) = a.accepting_run(&w) {
            prop_assert_eq!(run.len(), w.len() + 1);
            for (i, c) in run.iter().enumerate() {
                let read: std::collections::BTreeSet<_> = w.entries[..i].iter().map(|e| e.value).collect();
                let mapped: std::collections::BTreeSet<_> = c.memory.iter().map(|(v, _)| v).collect();
                prop_assert_eq!(mapped, read);
            }
        }
    }
}
