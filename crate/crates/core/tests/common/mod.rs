//! Reference interpreters written straight from the definitions. They share
//! no code with the library engines they check.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use classmem::cca::{Cca, CcaTransition, CmpOp, Update};
use classmem::cma::Cma;
use classmem::coverability::Vas;
use classmem::data::DataWord;
use classmem::hra::{HraTransition, NrHra};
use classmem::ndcma::Ndcma;
use classmem::sample::names;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

type Mem = BTreeMap<usize, usize>;

fn silent_closure(a: &Cma, q: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([q]);
    let mut todo = vec![q];
    while let Some(p) = todo.pop() {
        for &(x, y) in &a.silent {
            if x == p && seen.insert(y) {
                todo.push(y);
            }
        }
    }
    seen
}

/// Membership by exhaustive search over (control, class memory) sets.
pub fn cma_oracle(a: &Cma, w: &DataWord) -> bool {
    let mut cur: HashSet<(usize, Mem)> = HashSet::from([(a.initial, Mem::new())]);
    for e in &w.entries {
        let Some(l) = a.alphabet.iter().position(|x| *x == e.letter) else { return false };
        let d = e.value.index();
        let mut next = HashSet::new();
        for (q0, m) in &cur {
            for q in silent_closure(a, *q0) {
                let seen = m.get(&d).copied();
                for t in a.transitions.get(&(q, l, seen)).into_iter().flatten() {
                    let mut m2 = m.clone();
                    m2.insert(d, *t);
                    next.insert((*t, m2));
                }
            }
        }
        cur = next;
    }
    cur.iter().any(|(q0, m)| {
        m.values().all(|s| a.locally_accepting.contains(s))
            && silent_closure(a, *q0).iter().any(|q| a.globally_accepting.contains(q))
    })
}

/// Nested membership: a read of `v` sees the memories of `v`'s ancestors,
/// root-most first, and writes the target to all of them.
pub fn ndcma_oracle(a: &Ndcma, w: &DataWord) -> bool {
    let mut cur: HashSet<(usize, Mem)> = HashSet::from([(a.initial, Mem::new())]);
    for e in &w.entries {
        let Some(l) = a.alphabet.iter().position(|x| *x == e.letter) else { return false };
        let mut path = vec![e.value];
        while let Some(p) = w.universe.parent(*path.last().unwrap()) {
            path.push(p);
        }
        path.reverse();
        let mut next = HashSet::new();
        for (q, m) in &cur {
            let guard: Vec<Option<usize>> = path.iter().map(|v| m.get(&v.index()).copied()).collect();
            for t in a.transitions.get(&(*q, Some(l), guard)).into_iter().flatten() {
                let mut m2 = m.clone();
                for v in &path {
                    m2.insert(v.index(), *t);
                }
                next.insert((*t, m2));
            }
        }
        cur = next;
    }
    cur.iter()
        .any(|(q, m)| a.globally_accepting.contains(q) && m.values().all(|s| a.locally_accepting.contains(s)))
}

/// Forward breadth-first search that drops configurations with a counter above `cap`.
pub fn vas_bfs(v: &Vas, cap: u32) -> bool {
    let covers = |q: usize, c: &[u32]| v.targets.iter().any(|(tq, tc)| *tq == q && tc.iter().zip(c).all(|(x, y)| x <= y));
    let mut seen = HashSet::from([v.initial.clone()]);
    let mut queue = VecDeque::from([v.initial.clone()]);
    while let Some((q, c)) = queue.pop_front() {
        if covers(q, &c) {
            return true;
        }
        for r in v.rules.iter().filter(|r| r.from == q) {
            if r.dec.iter().zip(&c).any(|(d, x)| d > x) {
                continue;
            }
            let d: Vec<u32> = c.iter().zip(&r.dec).zip(&r.inc).map(|((x, d), i)| x - d + i).collect();
            if d.iter().all(|x| *x <= cap) && seen.insert((r.to, d.clone())) {
                queue.push_back((r.to, d));
            }
        }
    }
    false
}

/// Random class counting automaton with constants up to `max_const`.
pub fn random_cca(rng: &mut ChaCha8Rng, states: usize, letters: usize, transitions: usize, max_const: u64) -> Cca {
    let ops = [CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Gt];
    let transitions = (0..transitions)
        .map(|_| CcaTransition {
            from: rng.gen_range(0..states),
            letter: rng.gen_range(0..letters),
            guard: (ops[rng.gen_range(0..4)], rng.gen_range(0..=max_const)),
            update: if rng.gen_bool(0.5) { Update::Inc } else { Update::Set },
            amount: rng.gen_range(0..=max_const),
            to: rng.gen_range(0..states),
        })
        .collect();
    Cca {
        states: names("q", states),
        alphabet: names("a", letters),
        initial: 0,
        accepting: (0..states).filter(|_| rng.gen_bool(0.4)).collect(),
        transitions,
    }
}

/// Random non-reset history register automaton of type `m`.
pub fn random_nrhra(rng: &mut ChaCha8Rng, m: usize, states: usize, letters: usize, transitions: usize) -> NrHra {
    let sets = 1u32 << m;
    let transitions = (0..transitions)
        .map(|_| HraTransition {
            from: rng.gen_range(0..states),
            letter: rng.gen_range(0..letters),
            guard: rng.gen_range(0..sets),
            update: rng.gen_range(0..sets),
            to: rng.gen_range(0..states),
        })
        .collect();
    NrHra {
        histories: m,
        states: names("q", states),
        alphabet: names("a", letters),
        initial: 0,
        accepting: (0..states).filter(|_| rng.gen_bool(0.4)).collect(),
        transitions,
    }
}

/// Direct CCA semantics: a bag of counters keyed by value.
pub fn cca_oracle(c: &Cca, w: &DataWord) -> bool {
    let mut cur: HashSet<(usize, BTreeMap<usize, u64>)> = HashSet::from([(c.initial, BTreeMap::new())]);
    for e in &w.entries {
        let Some(l) = c.alphabet.iter().position(|x| *x == e.letter) else { return false };
        let d = e.value.index();
        let mut next = HashSet::new();
        for (q, bag) in &cur {
            let n = bag.get(&d).copied().unwrap_or(0);
            for t in c.transitions.iter().filter(|t| t.from == *q && t.letter == l) {
                let (op, k) = t.guard;
                let ok = match op {
                    CmpOp::Eq => n == k,
                    CmpOp::Ne => n != k,
                    CmpOp::Lt => n < k,
                    CmpOp::Gt => n > k,
                };
                if ok {
                    let mut b = bag.clone();
                    b.insert(d, if t.update == Update::Inc { n + t.amount } else { t.amount });
                    next.insert((t.to, b));
                }
            }
        }
        cur = next;
    }
    cur.iter().any(|(q, _)| c.accepting.contains(q))
}

/// Direct history semantics: each value sits in a set of histories.
pub fn nrhra_oracle(h: &NrHra, w: &DataWord) -> bool {
    let mut cur: HashSet<(usize, BTreeMap<usize, u32>)> = HashSet::from([(h.initial, BTreeMap::new())]);
    for e in &w.entries {
        let Some(l) = h.alphabet.iter().position(|x| *x == e.letter) else { return false };
        let d = e.value.index();
        let mut next = HashSet::new();
        for (q, hist) in &cur {
            let x = hist.get(&d).copied().unwrap_or(0);
            for t in h.transitions.iter().filter(|t| t.from == *q && t.letter == l && t.guard == x) {
                let mut h2 = hist.clone();
                h2.insert(d, t.update);
                next.insert((t.to, h2));
            }
        }
        cur = next;
    }
    cur.iter().any(|(q, _)| h.accepting.contains(q))
}
