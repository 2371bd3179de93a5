use classmem::cma::Cma;
use classmem::data::DataWord;
use classmem::homca::translate::{homca_prime_to_homca, homca_prime_to_ndcma, homca_to_homca_prime, ndcma_to_homca_prime};
use classmem::homca::{Homca, HomcaConfiguration, HomcaLimits, HomcaOp, Multiset, Variant};
use classmem::ndcma::{desugar, Ndcma, SearchLimits};
use classmem::sample::{all_strings, Sampler};
use proptest::prelude::*;

use HomcaOp::*;

fn w(s: &str) -> Vec<String> {
    s.chars().map(|c| c.to_string()).collect()
}

/// Strong level-2 machine: two one-element multisets stored, then both
/// loaded and emptied again.
fn shuffle() -> Homca {
    let ops = [New(2), New(1), Inc(0), Store(1), New(1), Inc(0), Store(1), Load(1), Dec(0), Store(1), Load(1), Dec(0), Store(1)];
    let mut m = Homca::new(2, (0..=ops.len()).map(|i| format!("s{i}")), ["a"], ["x"], Variant::Homca);
    for (i, op) in ops.iter().enumerate() {
        m.add(i, if i == 0 { Some(0) } else { None }, *op, i + 1);
    }
    m.accepting.insert(ops.len());
    m
}

/// Level 3: `a` opens every slot and puts `x` in `m_1`, the first `b` stores
/// `m_2` while `m_1` is still open, the second `b` removes `x`.
fn store_with_open_m1() -> Homca {
    let mut m = Homca::new(3, ["q0", "q1", "q2", "q3", "q4", "q5", "q6"], ["a", "b"], ["x"], Variant::Homca);
    m.add(0, Some(0), New(3), 1);
    m.add(1, None, New(2), 2);
    m.add(2, None, New(1), 3);
    m.add(3, None, Inc(0), 4);
    m.add(4, Some(1), Store(2), 5);
    m.add(5, Some(1), Dec(0), 6);
    m.accepting = [5, 6].into();
    m
}

#[test]
fn shuffle_instance_is_accepted_strongly() {
    let m = shuffle();
    let v = m.search(&w("a"), HomcaLimits::default());
    assert!(v.accepted);
    assert!(!m.accepts(&w("aa")));
}

#[test]
fn shuffle_instance_survives_restriction() {
    let p = homca_to_homca_prime(&shuffle()).unwrap();
    assert_eq!(p.variant, Variant::HomcaPrime);
    for s in ["", "a", "aa"] {
        assert_eq!(p.accepts(&w(s)), shuffle().accepts(&w(s)), "{s:?}");
    }
}

#[test]
fn store_with_open_m1_needs_the_copy_loop() {
    let m = store_with_open_m1();
    assert!(m.accepts(&w("abb")));
    assert!(!m.accepts(&w("ab")));
    let p = homca_to_homca_prime(&m).unwrap();
    assert!(p.states.iter().any(|s| s.contains("~copy")));
    for s in all_strings(&m.alphabet, 4) {
        assert_eq!(p.accepts(&s), m.accepts(&s), "{s:?}");
    }
}

#[test]
fn truncated_copy_is_caught_by_strong_acceptance() {
    let m = store_with_open_m1();
    let mut p = homca_to_homca_prime(&m).unwrap();
    // fault injection: drop the loop bodies, so the copy always exits at once
    let hubs: Vec<usize> = (0..p.states.len()).filter(|i| p.states[*i].contains("~copy")).collect();
    let originals = m.symbols.len();
    p.transitions.retain(|t| !(hubs.contains(&t.from) && matches!(t.op, Dec(g) if g < originals)));
    assert!(!p.accepts(&w("abb")));
    assert!(!p.accepts(&w("ab")), "x left in the inactive copy");
    let mut lossy = p.clone();
    lossy.weak = true;
    lossy.accepting.extend(p.states.iter().position(|s| s == "<q5|1+3>"));
    assert!(lossy.accepts(&w("ab")));
}

#[test]
fn level_two_without_ghosts() {
    // m_1 is never open during a store of m_2 at level 2: no copy states
    let m = shuffle();
    let p = homca_to_homca_prime(&m).unwrap();
    assert!(!p.states.iter().any(|s| s.contains("~copy")));
}

#[test]
fn level_four_is_refused() {
    let m = Homca::new(4, ["q"], ["a"], ["x"], Variant::Homca);
    assert!(homca_to_homca_prime(&m).is_err());
}

#[test]
fn restricted_to_plain_keeps_empty_word() {
    let mut m = Homca::new(2, ["q"], ["a"], ["x"], Variant::HomcaPrime);
    m.accepting.insert(0);
    let h = homca_prime_to_homca(&m).unwrap();
    assert_eq!(h.variant, Variant::Homca);
    assert!(h.accepts::<&str>(&[]));
    m.accepting.clear();
    assert!(!homca_prime_to_homca(&m).unwrap().accepts::<&str>(&[]));
}

fn agree(a: &Homca, b: &Homca, words: &[Vec<String>]) {
    for s in words {
        let x = a.search(s, HomcaLimits::default());
        let y = b.search(s, HomcaLimits::default());
        assert!(!x.pruned && !y.pruned, "{s:?} pruned");
        assert_eq!(x.accepted, y.accepted, "{s:?}");
    }
}

#[test]
fn random_restricted_to_plain_agree() {
    let mut s = Sampler::new(21);
    for i in 0..30 {
        let m = s.homca(1 + i % 3, 3, 1, 2, Variant::HomcaPrime, 7);
        agree(&m, &homca_prime_to_homca(&m).unwrap(), &all_strings(&m.alphabet, 4));
    }
}

#[test]
fn random_plain_to_restricted_agree() {
    let mut s = Sampler::new(22);
    for i in 0..30 {
        let m = s.homca(1 + i % 3, 3, 2, 2, Variant::Homca, 7);
        agree(&m, &homca_to_homca_prime(&m).unwrap(), &all_strings(&m.alphabet, 3));
    }
}

/// String membership of a flat machine by trying every assignment of data
/// values to positions up to renaming.
fn cma_str_accepts(a: &Cma, s: &[String]) -> bool {
    fn go(a: &Cma, s: &[String], idx: &mut Vec<usize>) -> bool {
        if idx.len() == s.len() {
            let pairs: Vec<(String, usize)> = s.iter().cloned().zip(idx.iter().copied()).collect();
            return a.accepts(&DataWord::from_indices(&pairs));
        }
        let fresh = idx.iter().max().map_or(0, |m| m + 1);
        for v in 0..=fresh {
            idx.push(v);
            if go(a, s, idx) {
                return true;
            }
            idx.pop();
        }
        false
    }
    go(a, s, &mut Vec::new())
}

#[test]
fn level_one_weak_machine_matches_data_assignment_search() {
    let mut s = Sampler::new(23);
    let mut checked = 0;
    while checked < 100 {
        let a = s.cma(3, 2, true, 0.25);
        let n = Ndcma::from_cma(&a).unwrap();
        let h = ndcma_to_homca_prime(&n).unwrap();
        assert!(h.weak);
        for _ in 0..10 {
            let len = s.rng().gen_range(0..=5);
            let word = s.string(&a.alphabet, len);
            let v = h.search(&word, HomcaLimits::default());
            assert!(!v.pruned);
            assert_eq!(v.accepted, cma_str_accepts(&a, &word), "{word:?}");
            checked += 1;
        }
    }
}

#[test]
fn strong_level_one_machine_matches_too() {
    let mut s = Sampler::new(24);
    for _ in 0..20 {
        let mut a = s.cma(3, 1, false, 0.3);
        a.locally_accepting.remove(&2);
        a.globally_accepting.remove(&2);
        let h = ndcma_to_homca_prime(&Ndcma::from_cma(&a).unwrap()).unwrap();
        assert!(!h.weak);
        for word in all_strings(&a.alphabet, 4) {
            assert_eq!(h.accepts(&word), cma_str_accepts(&a, &word), "{word:?}");
        }
    }
}

#[test]
fn empty_language_stays_empty() {
    let a = Ndcma::new(2, ["q0", "q1"], ["a"], 0);
    let h = ndcma_to_homca_prime(&a).unwrap();
    for word in all_strings(&a.alphabet, 3) {
        assert!(!h.accepts(&word));
    }
}

#[test]
fn round_trip_through_sugared_machine_level_two() {
    let mut s = Sampler::new(25);
    let limits = SearchLimits::default();
    for i in 0..10 {
        let a = s.ndcma(2, 2, 1, i % 2 == 0, 0.3);
        let h = ndcma_to_homca_prime(&a).unwrap();
        let back = desugar(&homca_prime_to_ndcma(&h).unwrap()).unwrap();
        for word in all_strings(&a.alphabet, 2) {
            let x = a.str_accepts(&word, limits);
            let y = back.str_accepts(&word, limits);
            assert!(!x.pruned && !y.pruned, "{word:?} pruned");
            assert_eq!(x.accepted, y.accepted, "{word:?}");
        }
    }
}

#[test]
fn random_restricted_to_sugared_agree() {
    let mut s = Sampler::new(26);
    let limits = SearchLimits::default();
    for i in 0..30 {
        let m = s.homca(1 + i % 3, 3, 2, 2, Variant::HomcaPrime, 7);
        let n = homca_prime_to_ndcma(&m).unwrap();
        assert_eq!(n.is_weak(), m.weak);
        for word in all_strings(&m.alphabet, 4) {
            let x = m.search(&word, HomcaLimits::default());
            let y = n.str_accepts(&word, limits);
            assert!(!x.pruned && !y.pruned);
            assert_eq!(x.accepted, y.accepted, "{word:?}");
        }
    }
}

use rand::Rng;

fn arb_op(level: usize) -> impl Strategy<Value = HomcaOp> {
    prop_oneof![
        (1..=level).prop_map(New),
        (0..2usize).prop_map(Inc),
        (0..2usize).prop_map(Dec),
        (1..level.max(2)).prop_map(Store),
        (1..level.max(2)).prop_map(Load),
    ]
}

proptest! {
    #[test]
    fn restricted_runs_keep_a_single_cut(ops in proptest::collection::vec(arb_op(3), 0..40)) {
        let m = Homca::new(3, ["q"], ["a"], ["x", "y"], Variant::HomcaPrime);
        let mut c = m.initial_configuration();
        for op in ops {
            if let Some(slots) = m.apply(&c, op).into_iter().next() {
                c = HomcaConfiguration { control: 0, slots };
                prop_assert!(c.cut().is_some());
            }
        }
    }

    #[test]
    fn load_only_with_lower_slots_undefined(ops in proptest::collection::vec(arb_op(3), 0..30), i in 1..3usize) {
        let m = Homca::new(3, ["q"], ["a"], ["x", "y"], Variant::Homca);
        let mut c = m.initial_configuration();
        for op in ops {
            if let Some(slots) = m.apply(&c, op).into_iter().next() {
                c = HomcaConfiguration { control: 0, slots };
            }
        }
        if !m.apply(&c, Load(i)).is_empty() {
            prop_assert!(c.slots[..i].iter().all(Option::is_none));
        }
    }

    #[test]
    fn weak_never_rejects_what_strong_accepts(seed in 0u64..200) {
        let mut s = Sampler::new(seed);
        let mut m = s.homca(2, 3, 1, 2, Variant::Homca, 6);
        m.weak = false;
        let mut weak = m.clone();
        weak.weak = true;
        for word in all_strings(&m.alphabet, 3) {
            if m.accepts(&word) {
                prop_assert!(weak.accepts(&word));
            }
        }
    }

    #[test]
    fn hereditary_emptiness_is_a_fold(xs in proptest::collection::vec(proptest::collection::vec(0..3usize, 0..3), 0..4)) {
        let m = Multiset::Sets(xs.iter().map(|v| {
            let mut v = v.clone();
            v.sort();
            Multiset::Symbols(v)
        }).collect());
        prop_assert_eq!(m.is_hereditarily_empty(), xs.iter().all(Vec::is_empty));
    }
}
