//! Class memory automata: general, weak and deterministic, with run search
//! and the Boolean operations available on deterministic weak machines.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::data::{ClassMemory, DataValue, DataWord};
use crate::error::{Error, Result};

pub type StateId = usize;
pub type LetterId = usize;
/// What the class memory holds for a value: a state, or `None` for ⊥ (fresh).
pub type Memory = Option<StateId>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cma {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub initial: StateId,
    pub locally_accepting: BTreeSet<StateId>,
    pub globally_accepting: BTreeSet<StateId>,
    pub transitions: BTreeMap<(StateId, LetterId, Memory), BTreeSet<StateId>>,
    /// Control-only moves that touch no data value.
    pub silent: BTreeSet<(StateId, StateId)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CmaConfiguration {
    pub control: StateId,
    pub memory: ClassMemory,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoolMode {
    Intersection,
    Union,
}

impl Cma {
    /// A machine with the given states and alphabet, no transitions, and
    /// every state locally accepting.
    pub fn new<S: Into<String>, L: Into<String>>(
        states: impl IntoIterator<Item = S>,
        alphabet: impl IntoIterator<Item = L>,
        initial: StateId,
    ) -> Self {
        let states: Vec<String> = states.into_iter().map(Into::into).collect();
        let locally_accepting = (0..states.len()).collect();
        Cma {
            states,
            alphabet: alphabet.into_iter().map(Into::into).collect(),
            initial,
            locally_accepting,
            globally_accepting: BTreeSet::new(),
            transitions: BTreeMap::new(),
            silent: BTreeSet::new(),
        }
    }

    pub fn add_transition(&mut self, from: StateId, letter: LetterId, memory: Memory, to: StateId) {
        self.transitions.entry((from, letter, memory)).or_default().insert(to);
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name)
    }

    pub fn letter_id(&self, name: &str) -> Option<LetterId> {
        self.alphabet.iter().position(|s| s == name)
    }

    pub fn is_weak(&self) -> bool {
        self.locally_accepting.len() == self.states.len()
    }

    pub fn is_deterministic(&self) -> bool {
        self.silent.is_empty() && self.transitions.values().all(|t| t.len() == 1)
    }

    /// Every `(state, letter, memory)` triple has at least one successor.
    pub fn is_complete(&self) -> bool {
        let n = self.states.len();
        (0..n).all(|q| {
            (0..self.alphabet.len()).all(|a| {
                std::iter::once(None)
                    .chain((0..n).map(Some))
                    .all(|m| self.transitions.get(&(q, a, m)).is_some_and(|t| !t.is_empty()))
            })
        })
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.states.len();
        if self.initial >= n {
            return Err(Error::Invariant("initial state out of range".into()));
        }
        for q in &self.globally_accepting {
            if !self.locally_accepting.contains(q) {
                return Err(Error::Invariant(format!(
                    "globally accepting state `{}` is not locally accepting",
                    self.states[*q]
                )));
            }
        }
        let mut seen = HashSet::new();
        for s in &self.states {
            if !seen.insert(s) {
                return Err(Error::Invariant(format!("duplicate state `{s}`")));
            }
        }
        for ((q, a, m), ts) in &self.transitions {
            if *q >= n || *a >= self.alphabet.len() || m.is_some_and(|m| m >= n) || ts.iter().any(|t| *t >= n) {
                return Err(Error::Invariant("transition refers to an unknown state or letter".into()));
            }
        }
        Ok(())
    }

    pub fn require_weak(&self) -> Result<()> {
        match (0..self.states.len()).find(|q| !self.locally_accepting.contains(q)) {
            Some(q) => Err(Error::NotWeak(self.states[q].clone())),
            None => Ok(()),
        }
    }

    fn require_deterministic(&self) -> Result<()> {
        if !self.silent.is_empty() {
            return Err(Error::NotDeterministic("silent transitions present".into()));
        }
        if let Some(((q, a, _), _)) = self.transitions.iter().find(|(_, t)| t.len() != 1) {
            return Err(Error::NotDeterministic(format!(
                "several successors from `{}` on `{}`",
                self.states[*q], self.alphabet[*a]
            )));
        }
        Ok(())
    }

    /// All successors on one input; silent moves are not applied.
    pub fn step(&self, c: &CmaConfiguration, letter: LetterId, value: DataValue) -> Vec<CmaConfiguration> {
        let key = (c.control, letter, c.memory.get(value));
        self.transitions
            .get(&key)
            .into_iter()
            .flatten()
            .map(|&q| CmaConfiguration {
                control: q,
                memory: c.memory.with(value, q),
            })
            .collect()
    }

    /// States reachable from `q` by silent moves (including `q`).
    pub fn silent_closure(&self, q: StateId) -> BTreeSet<StateId> {
        let mut seen = BTreeSet::from([q]);
        let mut stack = vec![q];
        while let Some(p) = stack.pop() {
            for &(from, to) in self.silent.range((p, 0)..=(p, usize::MAX)) {
                debug_assert_eq!(from, p);
                if seen.insert(to) {
                    stack.push(to);
                }
            }
        }
        seen
    }

    pub fn is_final(&self, c: &CmaConfiguration) -> bool {
        self.globally_accepting.contains(&c.control)
            && c.memory.iter().all(|(_, s)| self.locally_accepting.contains(&s))
    }

    pub fn initial_configuration(&self) -> CmaConfiguration {
        CmaConfiguration {
            control: self.initial,
            memory: ClassMemory::new(),
        }
    }

    /// An accepting run, one configuration per prefix of `w` (the last one is final).
    pub fn accepting_run(&self, w: &DataWord) -> Option<Vec<CmaConfiguration>> {
        let letters: Option<Vec<LetterId>> = w.entries.iter().map(|e| self.letter_id(&e.letter)).collect();
        let letters = letters?;
        // layer[i]: configuration -> index of its parent in layer[i-1]
        let mut layers: Vec<Vec<(CmaConfiguration, usize)>> = Vec::with_capacity(w.len() + 1);
        let close = |seeds: Vec<(CmaConfiguration, usize)>| -> Vec<(CmaConfiguration, usize)> {
            let mut index: HashMap<CmaConfiguration, usize> = HashMap::new();
            let mut out = Vec::new();
            for (c, parent) in seeds {
                for q in self.silent_closure(c.control) {
                    let d = CmaConfiguration {
                        control: q,
                        memory: c.memory.clone(),
                    };
                    if !index.contains_key(&d) {
                        index.insert(d.clone(), out.len());
                        out.push((d, parent));
                    }
                }
            }
            out
        };
        layers.push(close(vec![(self.initial_configuration(), 0)]));
        for (i, e) in w.entries.iter().enumerate() {
            let mut seeds = Vec::new();
            for (pi, (c, _)) in layers[i].iter().enumerate() {
                for d in self.step(c, letters[i], e.value) {
                    seeds.push((d, pi));
                }
            }
            let next = close(seeds);
            if next.is_empty() {
                return None;
            }
            layers.push(next);
        }
        let last = layers.len() - 1;
        let mut idx = layers[last].iter().position(|(c, _)| self.is_final(c))?;
        let mut run = Vec::with_capacity(layers.len());
        for i in (0..=last).rev() {
            let (c, parent) = &layers[i][idx];
            run.push(c.clone());
            idx = *parent;
        }
        run.reverse();
        Some(run)
    }

    pub fn accepts(&self, w: &DataWord) -> bool {
        self.accepting_run(w).is_some()
    }

    /// Removes silent moves from a weak machine: a read may start anywhere in
    /// the silent closure, and a state is globally accepting when its closure
    /// reaches one.
    pub fn eliminate_silent(&self) -> Result<Cma> {
        if self.silent.is_empty() {
            return Ok(self.clone());
        }
        self.require_weak()?;
        let mut out = self.clone();
        out.silent.clear();
        out.transitions.clear();
        for q in 0..self.states.len() {
            let closure = self.silent_closure(q);
            for &p in &closure {
                for ((from, a, m), ts) in self.transitions.range((p, 0, None)..) {
                    if *from != p {
                        break;
                    }
                    for &t in ts {
                        out.add_transition(q, *a, *m, t);
                    }
                }
            }
            if closure.iter().any(|p| self.globally_accepting.contains(p)) {
                out.globally_accepting.insert(q);
            }
        }
        Ok(out)
    }

    fn aligned_letters(&self, other: &Cma) -> Result<Vec<LetterId>> {
        let a: BTreeSet<&String> = self.alphabet.iter().collect();
        let b: BTreeSet<&String> = other.alphabet.iter().collect();
        if a != b {
            return Err(Error::AlphabetMismatch(format!("{:?} vs {:?}", self.alphabet, other.alphabet)));
        }
        Ok(self.alphabet.iter().map(|l| other.letter_id(l).unwrap()).collect())
    }

    /// Pair-state product. Union requires deterministic, complete, weak factors.
    pub fn product(&self, other: &Cma, mode: BoolMode) -> Result<Cma> {
        let map = self.aligned_letters(other)?;
        if mode == BoolMode::Union {
            for m in [self, other] {
                m.require_weak()?;
                m.require_deterministic()?;
                if !m.is_complete() {
                    return Err(Error::NotComplete("union needs complete factors".into()));
                }
            }
        }
        let nb = other.states.len();
        let pair = |p: StateId, q: StateId| p * nb + q;
        let mut states = Vec::new();
        for p in &self.states {
            for q in &other.states {
                states.push(format!("<{p}|{q}>"));
            }
        }
        let mut out = Cma::new(states, self.alphabet.clone(), pair(self.initial, other.initial));
        out.locally_accepting.clear();
        for p in 0..self.states.len() {
            for q in 0..nb {
                let s = pair(p, q);
                if self.locally_accepting.contains(&p) && other.locally_accepting.contains(&q) {
                    out.locally_accepting.insert(s);
                }
                let (ga, gb) = (self.globally_accepting.contains(&p), other.globally_accepting.contains(&q));
                let accept = match mode {
                    BoolMode::Intersection => ga && gb,
                    BoolMode::Union => ga || gb,
                };
                if accept {
                    out.globally_accepting.insert(s);
                }
            }
        }
        for ((p, a, m1), t1) in &self.transitions {
            let b_letter = map[*a];
            let memories: Vec<(Memory, Memory, Memory)> = match m1 {
                None => vec![(None, None, None)],
                Some(s1) => (0..nb).map(|s2| (Some(*s1), Some(s2), Some(pair(*s1, s2)))).collect(),
            };
            for q in 0..nb {
                for &(_, m2, mp) in &memories {
                    if let Some(t2) = other.transitions.get(&(q, b_letter, m2)) {
                        for &x in t1 {
                            for &y in t2 {
                                out.add_transition(pair(*p, q), *a, mp, pair(x, y));
                            }
                        }
                    }
                }
            }
        }
        for &(x, y) in &self.silent {
            for q in 0..nb {
                out.silent.insert((pair(x, q), pair(y, q)));
            }
        }
        for &(x, y) in &other.silent {
            for p in 0..self.states.len() {
                out.silent.insert((pair(p, x), pair(p, y)));
            }
        }
        Ok(out)
    }

    /// Adds a non-accepting sink so that every triple has exactly one successor.
    pub fn complete(&self) -> Result<Cma> {
        self.require_deterministic()?;
        self.require_weak()?;
        if self.is_complete() {
            return Ok(self.clone());
        }
        let mut out = self.clone();
        let mut name = String::from("sink");
        while out.state_id(&name).is_some() {
            name.push('\'');
        }
        out.states.push(name);
        let sink = out.states.len() - 1;
        out.locally_accepting.insert(sink);
        let n = out.states.len();
        for q in 0..n {
            for a in 0..out.alphabet.len() {
                for m in std::iter::once(None).chain((0..n).map(Some)) {
                    out.transitions.entry((q, a, m)).or_insert_with(|| BTreeSet::from([sink]));
                }
            }
        }
        Ok(out)
    }

    /// Complement of a deterministic, weak, complete machine: flip global acceptance.
    pub fn complement(&self) -> Result<Cma> {
        self.require_deterministic()?;
        self.require_weak()?;
        if !self.is_complete() {
            return Err(Error::NotComplete("complement needs a complete machine".into()));
        }
        let mut out = self.clone();
        out.globally_accepting = (0..self.states.len()).filter(|q| !self.globally_accepting.contains(q)).collect();
        Ok(out)
    }

    /// The same machine with every state locally accepting.
    pub fn weakened(&self) -> Cma {
        let mut out = self.clone();
        out.locally_accepting = (0..self.states.len()).collect();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_step() -> Cma {
        let mut a = Cma::new(["q0", "q1"], ["a"], 0);
        a.add_transition(0, 0, None, 1);
        a.globally_accepting.insert(1);
        a
    }

    #[test]
    fn step_on_fresh_value() {
        let a = one_step();
        let w = DataWord::from_indices(&[("a", 0)]);
        let d = w.entries[0].value;
        let c = a.initial_configuration();
        let next = a.step(&c, 0, d);
        assert_eq!(next.len(), 1);
        assert_eq!(next[0].control, 1);
        assert_eq!(next[0].memory.get(d), Some(1));
        let again = CmaConfiguration {
            control: 0,
            memory: ClassMemory::new().with(d, 1),
        };
        assert!(a.step(&again, 0, d).is_empty());
    }

    #[test]
    fn empty_word_acceptance() {
        let mut a = one_step();
        assert!(!a.accepts(&DataWord::flat()));
        a.globally_accepting.insert(0);
        assert!(a.accepts(&DataWord::flat()));
    }

    #[test]
    fn local_acceptance_checked_at_end() {
        let mut a = one_step();
        a.locally_accepting.remove(&1);
        a.globally_accepting.clear();
        a.add_transition(1, 0, None, 0);
        a.globally_accepting.insert(0);
        // (a,d1)(a,d2): d1 ends in q1 which is not locally accepting
        assert!(!a.accepts(&DataWord::from_indices(&[("a", 0), ("a", 1)])));
    }

    #[test]
    fn complete_adds_sink_and_preserves_language() {
        let a = Cma::new(["q0"], ["a"], 0);
        let c = a.complete().unwrap();
        assert!(c.is_complete());
        assert_eq!(c.states.len(), 2);
        assert!(!c.accepts(&DataWord::from_indices(&[("a", 0)])));
        let already = c.complete().unwrap();
        assert_eq!(already, c);
    }

    #[test]
    fn complement_requires_completeness() {
        assert!(matches!(one_step().complement(), Err(Error::NotComplete(_))));
        let mut nd = one_step();
        nd.add_transition(0, 0, None, 0);
        assert!(matches!(nd.complete(), Err(Error::NotDeterministic(_))));
    }

    #[test]
    fn union_rejects_nondeterministic_factors() {
        let mut nd = one_step().complete().unwrap();
        nd.add_transition(0, 0, None, 0);
        let d = one_step().complete().unwrap();
        assert!(nd.product(&d, BoolMode::Union).is_err());
        let other = Cma::new(["p"], ["b"], 0);
        assert!(matches!(d.product(&other, BoolMode::Intersection), Err(Error::AlphabetMismatch(_))));
    }

    #[test]
    fn silent_elimination_keeps_language() {
        let mut a = Cma::new(["s", "t", "u"], ["a"], 0);
        a.silent.insert((0, 1));
        a.add_transition(1, 0, None, 2);
        a.silent.insert((2, 0));
        a.globally_accepting.insert(0);
        let b = a.eliminate_silent().unwrap();
        assert!(b.silent.is_empty());
        for n in 0..4 {
            let w = DataWord::from_indices(&(0..n).map(|i| ("a", i)).collect::<Vec<_>>());
            assert_eq!(a.accepts(&w), b.accepts(&w));
        }
    }
}
