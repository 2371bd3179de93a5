mod common;

use classmem::cma::Cma;
use classmem::coverability::{cma_empty_bounded, vas_coverable, wcma_empty, wcma_to_vas, BoundedVerdict, Emptiness, Vas, VasRule};
use classmem::petrinet::{encode_coverability_wcma, encode_reachability_cma, example_net, QueryKind};
use classmem::sample::{names, Sampler};
use common::{cma_oracle, vas_bfs};
use proptest::prelude::*;

fn single(initial: Vec<u32>, target: Vec<u32>, rules: Vec<VasRule>) -> Vas {
    Vas {
        counters: names("c", initial.len()),
        states: names("s", 1),
        initial: (0, initial),
        rules,
        targets: vec![(0, target)],
    }
}

/// Fires the certificate from the initial configuration and checks it ends above a target.
fn replays(v: &Vas, rules: &[usize]) -> bool {
    let mut c = v.initial.clone();
    for &r in rules {
        match v.fire(&c, r) {
            Some(next) => c = next,
            None => return false,
        }
    }
    v.covers_target(&c)
}

#[test]
fn initial_configuration_already_covers() {
    let v = single(vec![2, 1], vec![1, 1], vec![]);
    let r = vas_coverable(&v);
    assert!(r.coverable);
    assert_eq!(r.certificate, Some(vec![]));
}

#[test]
fn no_rules_and_too_small_is_not_coverable() {
    let v = single(vec![0], vec![1], vec![]);
    assert!(!vas_coverable(&v).coverable);
}

#[test]
fn pumping_rule_covers_any_target() {
    let pump = VasRule { from: 0, dec: vec![0], inc: vec![1], to: 0 };
    let v = single(vec![0], vec![7], vec![pump]);
    let r = vas_coverable(&v);
    assert!(r.coverable);
    assert_eq!(r.certificate.as_ref().unwrap().len(), 7);
    assert!(replays(&v, r.certificate.as_ref().unwrap()));
}

#[test]
fn conserving_rules_never_create_tokens() {
    // moves a token between two counters; the total stays at one
    let ab = VasRule { from: 0, dec: vec![1, 0], inc: vec![0, 1], to: 0 };
    let ba = VasRule { from: 0, dec: vec![0, 1], inc: vec![1, 0], to: 0 };
    let v = single(vec![1, 0], vec![1, 1], vec![ab, ba]);
    assert!(!vas_coverable(&v).coverable);
    assert!(!vas_bfs(&v, 8));
}

#[test]
fn example_bound_ten_finds_an_eight_read_witness() {
    let a = encode_reachability_cma(&example_net(QueryKind::Reach)).unwrap().machine;
    match cma_empty_bounded(&a, 10) {
        BoundedVerdict::NonEmpty(w) => {
            assert_eq!(w.len(), 8);
            assert!(cma_oracle(&a, &w));
        }
        BoundedVerdict::UnknownBeyondBound => panic!("expected a witness within the bound"),
    }
    assert_eq!(cma_empty_bounded(&a, 4), BoundedVerdict::UnknownBeyondBound);
}

#[test]
fn example_net_weak_encoding_is_nonempty_with_an_accepted_witness() {
    let a = encode_coverability_wcma(&example_net(QueryKind::Cover)).unwrap().machine;
    match wcma_empty(&a).unwrap() {
        Emptiness::NonEmpty(w) => assert!(cma_oracle(&a, &w)),
        Emptiness::Empty => panic!("the net covers its target"),
    }
}

#[test]
fn unreachable_accepting_state_means_empty() {
    let mut a = Cma::new(["q0", "q1", "goal"], ["a"], 0);
    a.add_transition(0, 0, None, 1);
    a.add_transition(1, 0, Some(1), 0);
    a.add_transition(1, 0, None, 1);
    a.globally_accepting.insert(2);
    assert_eq!(wcma_empty(&a).unwrap(), Emptiness::Empty);
}

#[test]
fn strong_machines_are_refused_by_the_weak_procedure() {
    let mut a = Cma::new(["q0", "q1"], ["a"], 0);
    a.add_transition(0, 0, None, 1);
    a.locally_accepting.remove(&1);
    assert!(wcma_to_vas(&a).is_err());
}

#[test]
fn random_vas_agree_with_forward_search() {
    let mut s = Sampler::new(61);
    let (mut yes, mut no) = (0, 0);
    for i in 0..200 {
        let counters = 1 + i % 4;
        let v = s.vas(counters, 2, 1 + i % 6, 2);
        let r = vas_coverable(&v);
        if let Some(cert) = &r.certificate {
            assert!(replays(&v, cert), "vas {i}: certificate does not replay");
        }
        // the capped search is sound, so a hit must be matched
        if vas_bfs(&v, 8) {
            assert!(r.coverable, "vas {i}: forward search covers, saturation says no");
        }
        if r.coverable {
            yes += 1;
        } else {
            no += 1;
        }
    }
    assert!(yes > 10 && no > 10, "{yes} coverable, {no} not");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn weak_emptiness_is_consistent_with_bounded_search(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let a = s.cma(3, 2, true, 0.3);
        let exact = wcma_empty(&a).unwrap();
        if let Emptiness::NonEmpty(w) = &exact {
            prop_assert!(cma_oracle(&a, w));
        }
        if let BoundedVerdict::NonEmpty(w) = cma_empty_bounded(&a, 4) {
            prop_assert!(cma_oracle(&a, &w));
            prop_assert!(matches!(exact, Emptiness::NonEmpty(_)));
        }
    }

    #[test]
    fn short_accepted_words_imply_nonempty(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let a = s.cma(3, 1, true, 0.35);
        let accepted = (0..20).any(|_| {
            let w = s.flat_word(&names("a", 1), 4, 3);
            cma_oracle(&a, &w)
        });
        if accepted {
            prop_assert!(matches!(wcma_empty(&a).unwrap(), Emptiness::NonEmpty(_)));
        }
    }
}
