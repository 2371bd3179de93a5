//! Seeded random instances for property tests and the acceptance suite.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cma::Cma;
use crate::coverability::{Vas, VasRule};
use crate::data::{DataValue, DataWord, Universe};
use crate::homca::{Homca, HomcaOp, Variant};
use crate::ndcma::{all_guards, Ndcma};
use crate::tree::{LabelledTree, TreeNode};

pub fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn coin(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    /// Each (state, letter, memory, target) is present with probability
    /// `density`; roughly a third of states are globally accepting.
    pub fn cma(&mut self, states: usize, letters: usize, weak: bool, density: f64) -> Cma {
        let mut a = Cma::new(names("q", states), names("a", letters), 0);
        for q in 0..states {
            for l in 0..letters {
                for m in std::iter::once(None).chain((0..states).map(Some)) {
                    for t in 0..states {
                        if self.coin(density) {
                            a.add_transition(q, l, m, t);
                        }
                    }
                }
            }
        }
        a.globally_accepting = (0..states).filter(|_| self.coin(0.35)).collect();
        if !weak {
            a.locally_accepting = (0..states).filter(|_| self.coin(0.6)).collect();
            a.locally_accepting.extend(a.globally_accepting.iter().copied());
        }
        a
    }

    /// Exactly one target per (state, letter, memory).
    pub fn det_complete_weak_cma(&mut self, states: usize, letters: usize) -> Cma {
        let mut a = Cma::new(names("q", states), names("a", letters), 0);
        for q in 0..states {
            for l in 0..letters {
                for m in std::iter::once(None).chain((0..states).map(Some)) {
                    let t = self.rng.gen_range(0..states);
                    a.add_transition(q, l, m, t);
                }
            }
        }
        a.globally_accepting = (0..states).filter(|_| self.coin(0.4)).collect();
        a
    }

    /// A flat word of length at most `max_len` over at most `max_values` values.
    pub fn flat_word(&mut self, letters: &[String], max_len: usize, max_values: usize) -> DataWord {
        let len = self.rng.gen_range(0..=max_len);
        let pairs: Vec<(String, usize)> = (0..len)
            .map(|_| {
                let l = letters.choose(&mut self.rng).expect("nonempty alphabet").clone();
                (l, self.rng.gen_range(0..max_values.max(1)))
            })
            .collect();
        DataWord::from_indices(&pairs)
    }

    /// A nested word: each position reads a value of random level, reusing
    /// an existing value or creating a child of a random shallower one.
    pub fn nested_word(&mut self, level: usize, letters: &[String], max_len: usize, max_values: usize) -> DataWord {
        let mut w = DataWord::new(Universe::nested(level));
        let len = self.rng.gen_range(0..=max_len);
        let mut values: Vec<DataValue> = Vec::new();
        for _ in 0..len {
            let reuse = !values.is_empty() && (values.len() >= max_values || self.coin(0.5));
            let v = if reuse {
                *values.choose(&mut self.rng).unwrap()
            } else {
                let parents: Vec<DataValue> =
                    values.iter().copied().filter(|v| w.universe.level(*v) < level).collect();
                let parent = if parents.is_empty() || self.coin(0.4) {
                    None
                } else {
                    parents.choose(&mut self.rng).copied()
                };
                let v = w.universe.fresh(parent).expect("level checked");
                values.push(v);
                v
            };
            let l = letters.choose(&mut self.rng).expect("nonempty alphabet").clone();
            w.push(l, v);
        }
        w
    }

    pub fn string(&mut self, letters: &[String], len: usize) -> Vec<String> {
        (0..len).map(|_| letters.choose(&mut self.rng).unwrap().clone()).collect()
    }

    pub fn vas(&mut self, counters: usize, states: usize, rules: usize, max_const: u32) -> Vas {
        let vec = |rng: &mut ChaCha8Rng| (0..counters).map(|_| rng.gen_range(0..=max_const)).collect::<Vec<u32>>();
        let rules: Vec<VasRule> = (0..rules)
            .map(|_| VasRule {
                from: self.rng.gen_range(0..states),
                dec: vec(&mut self.rng),
                inc: vec(&mut self.rng),
                to: self.rng.gen_range(0..states),
            })
            .collect();
        let target = (self.rng.gen_range(0..states), vec(&mut self.rng));
        Vas {
            counters: names("c", counters),
            states: names("s", states),
            initial: (0, vec(&mut self.rng)),
            rules,
            targets: vec![target],
        }
    }

    /// Plain nested machine; each possible read key gets a transition with
    /// probability `density`.
    pub fn ndcma(&mut self, level: usize, states: usize, letters: usize, weak: bool, density: f64) -> Ndcma {
        let mut a = Ndcma::new(level, names("q", states), names("a", letters), 0);
        for q in 0..states {
            for l in 0..letters {
                for g in all_guards(states, level) {
                    if self.coin(density) {
                        let t = self.rng.gen_range(0..states);
                        a.add_transition(q, Some(l), g, t);
                    }
                }
            }
        }
        a.globally_accepting = (0..states).filter(|_| self.coin(0.4)).collect();
        if !weak {
            a.locally_accepting = (0..states).filter(|_| self.coin(0.6)).collect();
            a.locally_accepting.extend(a.globally_accepting.iter().copied());
        }
        a
    }

    /// A tree with at most `max_nodes` nodes below the root and depth at most `max_depth`.
    pub fn tree(&mut self, labels: usize, max_nodes: usize, max_depth: usize) -> LabelledTree {
        let n = self.rng.gen_range(0..=max_nodes);
        // grow by attaching each node under a random earlier node or the root
        let mut parent: Vec<Option<usize>> = Vec::new();
        let mut depth: Vec<usize> = Vec::new();
        for _ in 0..n {
            let candidates: Vec<usize> = (0..parent.len()).filter(|i| depth[*i] < max_depth).collect();
            let p = if candidates.is_empty() || self.coin(0.4) {
                None
            } else {
                candidates.choose(&mut self.rng).copied()
            };
            depth.push(p.map_or(1, |p| depth[p] + 1));
            parent.push(p);
        }
        let label: Vec<usize> = (0..n).map(|_| self.rng.gen_range(0..labels)).collect();
        fn build(i: usize, parent: &[Option<usize>], label: &[usize]) -> TreeNode {
            let kids = (0..parent.len()).filter(|j| parent[*j] == Some(i)).map(|j| build(j, parent, label)).collect();
            TreeNode::with_children(label[i], kids)
        }
        let roots = (0..n).filter(|i| parent[*i].is_none()).map(|i| build(i, &parent, &label)).collect();
        LabelledTree::from_children(roots)
    }

    /// A random machine with `transitions` moves. The initial state always
    /// has a `new_k` move so that runs get started. ε-moves only go from a
    /// lower to a higher state index, so ε-closures stay finite.
    pub fn homca(
        &mut self,
        level: usize,
        states: usize,
        letters: usize,
        symbols: usize,
        variant: Variant,
        transitions: usize,
    ) -> Homca {
        let mut m = Homca::new(level, names("q", states), names("a", letters), names("x", symbols), variant);
        for i in 0..transitions {
            let op = match self.rng.gen_range(0..5) {
                _ if i == 0 => HomcaOp::New(level),
                0 => HomcaOp::New(self.rng.gen_range(1..=level)),
                1 => HomcaOp::Inc(self.rng.gen_range(0..symbols)),
                2 => HomcaOp::Dec(self.rng.gen_range(0..symbols)),
                3 if level > 1 => HomcaOp::Store(self.rng.gen_range(1..level)),
                4 if level > 1 => HomcaOp::Load(self.rng.gen_range(1..level)),
                _ => HomcaOp::New(1),
            };
            let from = if i == 0 { 0 } else { self.rng.gen_range(0..states) };
            let to = self.rng.gen_range(0..states);
            let letter = if from < to && self.coin(0.4) {
                None
            } else {
                Some(self.rng.gen_range(0..letters))
            };
            m.add(from, letter, op, to);
        }
        m.accepting = (0..states).filter(|_| self.coin(0.4)).collect();
        m.weak = self.coin(0.3);
        m
    }
}

/// Every string over `letters` of length at most `max`, shortest first.
pub fn all_strings(letters: &[String], max: usize) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = vec![Vec::new()];
    let mut start = 0;
    for _ in 0..max {
        let end = out.len();
        for i in start..end {
            for a in letters {
                let mut w = out[i].clone();
                w.push(a.clone());
                out.push(w);
            }
        }
        start = end;
    }
    out
}
