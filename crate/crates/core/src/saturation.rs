//! Backward saturation for well-structured systems.
//!
//! Keeps a basis of the upward-closed set of states that can reach a target,
//! adds minimal predecessors until nothing new appears, and prunes any
//! element dominated by another. Each element remembers the rule and the
//! element it was derived from, so a covering chain can be read back.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

#[derive(Clone, Debug)]
struct Node<S, R> {
    state: S,
    alive: bool,
    via: Option<(R, usize)>,
}

#[derive(Clone, Debug)]
pub struct Saturation<S, R> {
    nodes: Vec<Node<S, R>>,
    /// Live nodes grouped by key; only nodes with equal keys are compared.
    live: HashMap<u64, Vec<usize>>,
    /// Predecessor computations performed.
    pub expansions: usize,
}

/// A chain from a basis element below the initial state up to a target:
/// applying `rules` in order from any state above `start` covers `target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain<S, R> {
    pub start: S,
    pub steps: Vec<(R, S)>,
}

impl<S: Clone, R: Clone> Saturation<S, R> {
    /// Runs to a fixpoint, or stops as soon as `initial` is covered when `stop_early`.
    pub fn run(
        targets: Vec<S>,
        initial: &S,
        leq: impl Fn(&S, &S) -> bool,
        pred: impl Fn(&S) -> Vec<(R, S)>,
        stop_early: bool,
    ) -> Self {
        Self::run_keyed(targets, initial, |_| 0, |_| 0, leq, pred, stop_early)
    }

    /// As [`Saturation::run`], for orders where states with different keys
    /// are never comparable. States of smaller rank are expanded first,
    /// which pays off when small states tend to be minimal.
    pub fn run_keyed(
        targets: Vec<S>,
        initial: &S,
        key: impl Fn(&S) -> u64,
        rank: impl Fn(&S) -> usize,
        leq: impl Fn(&S, &S) -> bool,
        pred: impl Fn(&S) -> Vec<(R, S)>,
        stop_early: bool,
    ) -> Self {
        let leq = |a: &S, b: &S| key(a) == key(b) && leq(a, b);
        let mut sat = Saturation {
            nodes: Vec::new(),
            live: HashMap::new(),
            expansions: 0,
        };
        let mut queue = BinaryHeap::new();
        for t in targets {
            let r = rank(&t);
            if let Some(i) = sat.insert(t, None, &key, &leq) {
                queue.push(Reverse((r, i)));
            }
        }
        if stop_early && sat.covering(initial, &leq).is_some() {
            return sat;
        }
        while let Some(Reverse((_, i))) = queue.pop() {
            if !sat.nodes[i].alive {
                continue;
            }
            sat.expansions += 1;
            let state = sat.nodes[i].state.clone();
            for (r, p) in pred(&state) {
                let k = rank(&p);
                if let Some(j) = sat.insert(p, Some((r, i)), &key, &leq) {
                    queue.push(Reverse((k, j)));
                    if stop_early && leq(&sat.nodes[j].state, initial) {
                        return sat;
                    }
                }
            }
        }
        sat
    }

    fn insert(
        &mut self,
        s: S,
        via: Option<(R, usize)>,
        key: &impl Fn(&S) -> u64,
        leq: &impl Fn(&S, &S) -> bool,
    ) -> Option<usize> {
        let bucket = self.live.entry(key(&s)).or_default();
        if bucket.iter().any(|&i| leq(&self.nodes[i].state, &s)) {
            return None;
        }
        let nodes = &mut self.nodes;
        bucket.retain(|&i| {
            let keep = !leq(&s, &nodes[i].state);
            nodes[i].alive = keep;
            keep
        });
        bucket.push(nodes.len());
        nodes.push(Node {
            state: s,
            alive: true,
            via,
        });
        Some(nodes.len() - 1)
    }

    pub fn basis(&self) -> Vec<&S> {
        self.nodes.iter().filter(|n| n.alive).map(|n| &n.state).collect()
    }

    /// No basis element lies below another.
    pub fn is_minimal(&self, leq: impl Fn(&S, &S) -> bool) -> bool {
        let b = self.basis();
        b.iter()
            .enumerate()
            .all(|(i, x)| b.iter().enumerate().all(|(j, y)| i == j || !leq(x, y)))
    }

    fn covering(&self, initial: &S, leq: &impl Fn(&S, &S) -> bool) -> Option<usize> {
        self.nodes.iter().position(|n| n.alive && leq(&n.state, initial))
    }

    /// The chain for a basis element below `initial`, if there is one.
    pub fn chain(&self, initial: &S, leq: impl Fn(&S, &S) -> bool) -> Option<Chain<S, R>> {
        let mut i = self.covering(initial, &leq)?;
        let start = self.nodes[i].state.clone();
        let mut steps = Vec::new();
        while let Some((r, next)) = &self.nodes[i].via {
            steps.push((r.clone(), self.nodes[*next].state.clone()));
            i = *next;
        }
        Some(Chain { start, steps })
    }
}
