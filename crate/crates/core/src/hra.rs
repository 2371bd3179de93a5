//! Non-reset history register automata. A history is a set of data values;
//! a step is guarded by exactly the set of histories holding the read value
//! and then moves the value into a chosen set of histories.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::cma::{Cma, StateId};
use crate::data::{DataValue, DataWord};
use crate::error::{Error, Result};

/// A subset of `[m]`, bit `i-1` for history `i`.
pub type HistorySet = u32;

pub const MAX_TYPE: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HraTransition {
    pub from: StateId,
    pub letter: usize,
    pub guard: HistorySet,
    pub update: HistorySet,
    pub to: StateId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NrHra {
    pub histories: usize,
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub initial: StateId,
    pub accepting: BTreeSet<StateId>,
    pub transitions: BTreeSet<HraTransition>,
}

pub fn set_to_string(x: HistorySet) -> String {
    let items: Vec<String> = (0..32).filter(|i| x >> i & 1 == 1).map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", items.join(","))
}

/// Bracket-free rendering used inside generated state names: `1+3`, or empty.
fn set_to_name(x: HistorySet) -> String {
    let items: Vec<String> = (0..32).filter(|i| x >> i & 1 == 1).map(|i| (i + 1).to_string()).collect();
    items.join("+")
}

impl NrHra {
    pub fn validate(&self) -> Result<()> {
        if self.histories == 0 || self.histories > MAX_TYPE {
            return Err(Error::Invariant(format!("type must lie in 1..={MAX_TYPE}")));
        }
        let full: HistorySet = (1u32 << self.histories) - 1;
        for t in &self.transitions {
            if t.guard & !full != 0 || t.update & !full != 0 {
                return Err(Error::Invariant(format!(
                    "history set outside [{}] in a transition from `{}`",
                    self.histories, self.states[t.from]
                )));
            }
        }
        Ok(())
    }

    pub fn accepts(&self, w: &DataWord) -> bool {
        let letters: Option<Vec<usize>> = w
            .entries
            .iter()
            .map(|e| self.alphabet.iter().position(|l| *l == e.letter))
            .collect();
        let Some(letters) = letters else { return false };
        // assignment kept inverted: value -> H⁻¹(value), empty sets omitted
        type Inv = BTreeMap<DataValue, HistorySet>;
        let mut current: HashSet<(StateId, Inv)> = HashSet::from([(self.initial, Inv::new())]);
        for (e, &a) in w.entries.iter().zip(&letters) {
            let mut next = HashSet::new();
            for (q, h) in &current {
                let x = h.get(&e.value).copied().unwrap_or(0);
                for t in self.transitions.iter().filter(|t| t.from == *q && t.letter == a && t.guard == x) {
                    let mut h2 = h.clone();
                    if t.update == 0 {
                        h2.remove(&e.value);
                    } else {
                        h2.insert(e.value, t.update);
                    }
                    next.insert((t.to, h2));
                }
            }
            if next.is_empty() {
                return false;
            }
            current = next;
        }
        current.iter().any(|(q, _)| self.accepting.contains(q))
    }

    /// For every state, letter and guard there is exactly one transition.
    pub fn is_deterministic(&self) -> bool {
        let mut count: BTreeMap<(StateId, usize, HistorySet), usize> = BTreeMap::new();
        for t in &self.transitions {
            *count.entry((t.from, t.letter, t.guard)).or_default() += 1;
        }
        let subsets = 1u32 << self.histories;
        (0..self.states.len()).all(|q| {
            (0..self.alphabet.len()).all(|a| (0..subsets).all(|x| count.get(&(q, a, x)) == Some(&1)))
        })
    }
}

/// History `i + 1` holds the values last seen in state `i`.
///
/// Guards with two or more histories never arise in runs of the result; on
/// deterministic complete input they are given the behaviour of their least
/// member so that the output stays deterministic.
pub fn wcma_to_nrhra(a: &Cma) -> Result<NrHra> {
    a.require_weak()?;
    let a = a.eliminate_silent()?;
    let m = a.states.len();
    if m > MAX_TYPE {
        return Err(Error::Unsupported(format!("{m} states exceed the history bound {MAX_TYPE}")));
    }
    let bit = |q: StateId| 1u32 << q;
    let mut transitions = BTreeSet::new();
    for ((q, l, mem), ts) in &a.transitions {
        let guard = mem.map_or(0, bit);
        for &t in ts {
            transitions.insert(HraTransition {
                from: *q,
                letter: *l,
                guard,
                update: bit(t),
                to: t,
            });
        }
    }
    if a.is_deterministic() && a.is_complete() {
        for x in 1u32..(1 << m) {
            if x.count_ones() < 2 {
                continue;
            }
            let low = x.trailing_zeros() as usize;
            for q in 0..m {
                for l in 0..a.alphabet.len() {
                    for &t in &a.transitions[&(q, l, Some(low))] {
                        transitions.insert(HraTransition {
                            from: q,
                            letter: l,
                            guard: x,
                            update: bit(t),
                            to: t,
                        });
                    }
                }
            }
        }
    }
    Ok(NrHra {
        histories: m,
        states: a.states.clone(),
        alphabet: a.alphabet.clone(),
        initial: a.initial,
        accepting: a.globally_accepting.clone(),
        transitions,
    })
}

/// nrHRA to weak CMA. States are `Q ⊎ Q × P([m])`; a pair `(q, Y)` is both
/// the control after moving a value into histories `Y` and the record that
/// value keeps, so a value remembered as `(r, Z)` lies exactly in `Z`.
pub fn nrhra_to_wcma(h: &NrHra) -> Result<Cma> {
    h.validate()?;
    let n = h.states.len();
    let subsets = 1usize << h.histories;
    let pair = |q: StateId, y: HistorySet| n + q * subsets + y as usize;
    let mut states: Vec<String> = h.states.clone();
    for q in &h.states {
        for y in 0..subsets as u32 {
            states.push(format!("<{q}|{}>", set_to_name(y)));
        }
    }
    let mut out = Cma::new(states, h.alphabet.clone(), h.initial);
    for &q in &h.accepting {
        out.globally_accepting.insert(q);
        for y in 0..subsets as u32 {
            out.globally_accepting.insert(pair(q, y));
        }
    }
    for t in &h.transitions {
        let sources = std::iter::once(t.from).chain((0..subsets as u32).map(|y| pair(t.from, y)));
        let target = pair(t.to, t.update);
        for src in sources {
            if t.guard == 0 {
                out.add_transition(src, t.letter, None, target);
            }
            for r in 0..n {
                out.add_transition(src, t.letter, Some(pair(r, t.guard)), target);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn history_guard_blocks_second_read() {
        let h = NrHra {
            histories: 1,
            states: vec!["q0".into(), "q1".into()],
            alphabet: vec!["a".into()],
            initial: 0,
            accepting: BTreeSet::from([1]),
            transitions: BTreeSet::from([HraTransition {
                from: 0,
                letter: 0,
                guard: 0,
                update: 1,
                to: 1,
            }]),
        };
        assert!(h.accepts(&DataWord::from_indices(&[("a", 0)])));
        assert!(!h.accepts(&DataWord::from_indices(&[("a", 0), ("a", 0)])));
        let c = nrhra_to_wcma(&h).unwrap();
        assert!(c.accepts(&DataWord::from_indices(&[("a", 0)])));
        assert!(!c.accepts(&DataWord::from_indices(&[("a", 0), ("a", 1)])));
        assert!(!c.accepts(&DataWord::flat()));
    }

    #[test]
    fn set_rendering() {
        assert_eq!(set_to_string(0), "{}");
        assert_eq!(set_to_string(0b101), "{1,3}");
    }
}
