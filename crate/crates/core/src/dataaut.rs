//! Data automata and k-nested data automata (membership only).
//!
//! A letter-to-letter transducer relabels the word; each class of positions
//! sharing a data value (or, at level i, sharing the first i tuple components)
//! must then spell a word accepted by the class automaton of that level.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::data::{DataWord, TupleWord};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transducer {
    pub states: Vec<String>,
    pub input: Vec<String>,
    pub output: Vec<String>,
    pub initial: usize,
    pub accepting: BTreeSet<usize>,
    /// (from, input letter, output letter, to)
    pub transitions: BTreeSet<(usize, usize, usize, usize)>,
}

/// An NFA over the transducer's output alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassNfa {
    pub states: Vec<String>,
    pub initial: usize,
    pub accepting: BTreeSet<usize>,
    pub transitions: BTreeSet<(usize, usize, usize)>,
}

impl ClassNfa {
    fn step(&self, from: &BTreeSet<usize>, b: usize) -> BTreeSet<usize> {
        self.transitions
            .iter()
            .filter(|(p, l, _)| from.contains(p) && *l == b)
            .map(|t| t.2)
            .collect()
    }

    pub fn accepts(&self, word: &[usize]) -> bool {
        let mut cur = BTreeSet::from([self.initial]);
        for &b in word {
            cur = self.step(&cur, b);
        }
        cur.iter().any(|q| self.accepting.contains(q))
    }

    pub fn all_final(&self) -> bool {
        self.accepting.len() == self.states.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DataAutomaton {
    pub base: Transducer,
    pub class: ClassNfa,
}

impl DataAutomaton {
    /// Locally prefix-closed: every class state is final.
    pub fn is_prefix_closed(&self) -> bool {
        self.class.all_final()
    }

    pub fn accepts(&self, w: &DataWord) -> bool {
        let positions: Option<Vec<(usize, Vec<usize>)>> = w
            .entries
            .iter()
            .map(|e| Some((self.base.input.iter().position(|l| *l == e.letter)?, vec![e.value.index()])))
            .collect();
        match positions {
            Some(p) => accepts_classes(&self.base, std::slice::from_ref(&self.class), &p),
            None => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NestedDataAutomaton {
    pub base: Transducer,
    pub classes: Vec<ClassNfa>,
}

impl NestedDataAutomaton {
    pub fn level(&self) -> usize {
        self.classes.len()
    }

    pub fn accepts(&self, w: &TupleWord) -> Result<bool> {
        if w.k != self.level() {
            return Err(Error::LevelBound(format!("level-{} word for a level-{} automaton", w.k, self.level())));
        }
        let mut ids: Vec<HashMap<&[String], usize>> = vec![HashMap::new(); self.level()];
        let mut positions = Vec::with_capacity(w.len());
        for (letter, tuple) in &w.entries {
            let Some(a) = self.base.input.iter().position(|l| l == letter) else {
                return Ok(false);
            };
            let keys = (1..=self.level())
                .map(|i| {
                    let n = ids[i - 1].len();
                    *ids[i - 1].entry(&tuple[..i]).or_insert(n)
                })
                .collect();
            positions.push((a, keys));
        }
        Ok(accepts_classes(&self.base, &self.classes, &positions))
    }
}

/// Search over transducer runs, tracking per class the subset of class-NFA states.
fn accepts_classes(base: &Transducer, classes: &[ClassNfa], positions: &[(usize, Vec<usize>)]) -> bool {
    type Tracks = Vec<BTreeMap<usize, BTreeSet<usize>>>;
    let mut current: HashSet<(usize, Tracks)> = HashSet::from([(base.initial, vec![BTreeMap::new(); classes.len()])]);
    for (a, keys) in positions {
        let mut next = HashSet::new();
        for (q, tracks) in &current {
            for &(_, _, b, q2) in base.transitions.iter().filter(|t| t.0 == *q && t.1 == *a) {
                let mut t2 = tracks.clone();
                let mut alive = true;
                for (lvl, nfa) in classes.iter().enumerate() {
                    let cur = t2[lvl].get(&keys[lvl]).cloned().unwrap_or_else(|| BTreeSet::from([nfa.initial]));
                    let s = nfa.step(&cur, b);
                    if s.is_empty() {
                        alive = false;
                        break;
                    }
                    t2[lvl].insert(keys[lvl], s);
                }
                if alive {
                    next.insert((q2, t2));
                }
            }
        }
        current = next;
        if current.is_empty() {
            return false;
        }
    }
    current.iter().any(|(q, tracks)| {
        base.accepting.contains(q)
            && classes
                .iter()
                .zip(tracks)
                .all(|(nfa, t)| t.values().all(|s| s.iter().any(|p| nfa.accepting.contains(p))))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity(letters: &[&str]) -> Transducer {
        let n = letters.len();
        Transducer {
            states: vec!["t".into()],
            input: letters.iter().map(|s| s.to_string()).collect(),
            output: letters.iter().map(|s| s.to_string()).collect(),
            initial: 0,
            accepting: BTreeSet::from([0]),
            transitions: (0..n).map(|a| (0, a, a, 0)).collect(),
        }
    }

    /// Accepts class words of even length over one letter.
    fn even() -> ClassNfa {
        ClassNfa {
            states: vec!["e".into(), "o".into()],
            initial: 0,
            accepting: BTreeSet::from([0]),
            transitions: BTreeSet::from([(0, 0, 1), (1, 0, 0)]),
        }
    }

    #[test]
    fn every_class_checked() {
        let d = DataAutomaton {
            base: identity(&["a"]),
            class: even(),
        };
        assert!(d.accepts(&DataWord::flat()));
        assert!(d.accepts(&DataWord::from_indices(&[("a", 0), ("a", 1), ("a", 1), ("a", 0)])));
        assert!(!d.accepts(&DataWord::from_indices(&[("a", 0), ("a", 1), ("a", 0)])));
        assert!(!d.is_prefix_closed());
    }

    #[test]
    fn nested_levels_group_by_prefix() {
        let mut all = even();
        all.accepting.insert(1);
        let n = NestedDataAutomaton {
            base: identity(&["a"]),
            classes: vec![all, even()],
        };
        let mut w = TupleWord::new(2);
        w.push("a", vec!["r".into(), "x".into()]).unwrap();
        w.push("a", vec!["s".into(), "x".into()]).unwrap();
        // ("r","x") and ("s","x") are different level-2 classes
        assert!(!n.accepts(&w).unwrap());
        w.push("a", vec!["r".into(), "x".into()]).unwrap();
        w.push("a", vec!["s".into(), "x".into()]).unwrap();
        assert!(n.accepts(&w).unwrap());
    }
}
