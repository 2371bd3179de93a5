//! Higher-order multicounter automata. Slot `m_i` is undefined or a level-i
//! multiset: level 1 holds symbols, level i+1 holds level-i multisets.
//!
//! The restricted variant adds enabling conditions to `new` and `store`
//! which keep the defined slots contiguous from the top.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use crate::cma::StateId;
use crate::error::{Error, Result};

pub mod translate;

pub type SymbolId = usize;

/// Canonical nested multiset: elements kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Multiset {
    Symbols(Vec<SymbolId>),
    Sets(Vec<Multiset>),
}

impl Multiset {
    pub fn empty(level: usize) -> Self {
        if level <= 1 {
            Multiset::Symbols(Vec::new())
        } else {
            Multiset::Sets(Vec::new())
        }
    }

    /// No symbol anywhere inside.
    pub fn is_hereditarily_empty(&self) -> bool {
        match self {
            Multiset::Symbols(v) => v.is_empty(),
            Multiset::Sets(v) => v.iter().all(Multiset::is_hereditarily_empty),
        }
    }

    /// Symbols plus nested multisets, at every depth.
    pub fn weight(&self) -> usize {
        match self {
            Multiset::Symbols(v) => v.len(),
            Multiset::Sets(v) => v.iter().map(|m| 1 + m.weight()).sum(),
        }
    }

    pub fn render(&self, names: &[String]) -> String {
        let items: Vec<String> = match self {
            Multiset::Symbols(v) => v.iter().map(|a| names[*a].clone()).collect(),
            Multiset::Sets(v) => v.iter().map(|m| m.render(names)).collect(),
        };
        format!("{{{}}}", items.join(","))
    }

    fn insert_symbol(&mut self, a: SymbolId) {
        if let Multiset::Symbols(v) = self {
            let at = v.partition_point(|x| *x <= a);
            v.insert(at, a);
        }
    }

    fn remove_symbol(&mut self, a: SymbolId) -> bool {
        match self {
            Multiset::Symbols(v) => match v.binary_search(&a) {
                Ok(i) => {
                    v.remove(i);
                    true
                }
                Err(_) => false,
            },
            Multiset::Sets(_) => false,
        }
    }

    fn insert_set(&mut self, m: Multiset) {
        if let Multiset::Sets(v) = self {
            let at = v.partition_point(|x| *x <= m);
            v.insert(at, m);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HomcaOp {
    New(usize),
    Inc(SymbolId),
    Dec(SymbolId),
    Store(usize),
    Load(usize),
}

impl HomcaOp {
    pub fn render(&self, symbols: &[String]) -> String {
        match self {
            HomcaOp::New(i) => format!("new_{i}"),
            HomcaOp::Inc(a) => format!("inc_{}", symbols[*a]),
            HomcaOp::Dec(a) => format!("dec_{}", symbols[*a]),
            HomcaOp::Store(i) => format!("store_{i}"),
            HomcaOp::Load(i) => format!("load_{i}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Homca,
    HomcaPrime,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Homca => "homca",
            Variant::HomcaPrime => "homca'",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HomcaTransition {
    pub from: StateId,
    /// None for an ε-move.
    pub letter: Option<usize>,
    pub op: HomcaOp,
    pub to: StateId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homca {
    pub level: usize,
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub symbols: Vec<String>,
    pub initial: StateId,
    pub accepting: BTreeSet<StateId>,
    pub transitions: BTreeSet<HomcaTransition>,
    pub variant: Variant,
    pub weak: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HomcaConfiguration {
    pub control: StateId,
    /// `slots[i]` is `m_{i+1}`.
    pub slots: Vec<Option<Multiset>>,
}

impl HomcaConfiguration {
    /// The `i` with `m_1..m_i` undefined and the rest defined, if any.
    pub fn cut(&self) -> Option<usize> {
        let i = self.slots.iter().take_while(|s| s.is_none()).count();
        self.slots[i..].iter().all(Option::is_some).then_some(i)
    }

    pub fn weight(&self) -> usize {
        self.slots.iter().flatten().map(|m| 1 + m.weight()).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HomcaLimits {
    /// ε-moves allowed between two letters; None picks
    /// `|symbols| * level * (configuration weight + 1) + |states|`.
    pub eps_budget: Option<usize>,
    /// Configurations kept per position.
    pub max_configs: usize,
}

impl Default for HomcaLimits {
    fn default() -> Self {
        HomcaLimits {
            eps_budget: None,
            max_configs: 200_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HomcaVerdict {
    pub accepted: bool,
    /// Some branch was cut by a limit, so a rejection is not conclusive.
    pub pruned: bool,
}

impl Homca {
    pub fn new<S: Into<String>, L: Into<String>, Y: Into<String>>(
        level: usize,
        states: impl IntoIterator<Item = S>,
        alphabet: impl IntoIterator<Item = L>,
        symbols: impl IntoIterator<Item = Y>,
        variant: Variant,
    ) -> Self {
        Homca {
            level,
            states: states.into_iter().map(Into::into).collect(),
            alphabet: alphabet.into_iter().map(Into::into).collect(),
            symbols: symbols.into_iter().map(Into::into).collect(),
            initial: 0,
            accepting: BTreeSet::new(),
            transitions: BTreeSet::new(),
            variant,
            weak: false,
        }
    }

    pub fn add(&mut self, from: StateId, letter: Option<usize>, op: HomcaOp, to: StateId) {
        self.transitions.insert(HomcaTransition { from, letter, op, to });
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.level;
        if k == 0 {
            return Err(Error::LevelBound("level must be at least 1".into()));
        }
        let n = self.states.len();
        if self.initial >= n || self.accepting.iter().any(|q| *q >= n) {
            return Err(Error::Invariant("unknown state in initial or accepting set".into()));
        }
        for t in &self.transitions {
            if t.from >= n || t.to >= n || t.letter.is_some_and(|a| a >= self.alphabet.len()) {
                return Err(Error::Invariant("malformed transition".into()));
            }
            let ok = match t.op {
                HomcaOp::New(i) => (1..=k).contains(&i),
                HomcaOp::Store(i) | HomcaOp::Load(i) => (1..k).contains(&i),
                HomcaOp::Inc(a) | HomcaOp::Dec(a) => a < self.symbols.len(),
            };
            if !ok {
                return Err(Error::LevelBound(format!(
                    "`{}` out of range at level {k}",
                    self.render_op(t.op)
                )));
            }
        }
        Ok(())
    }

    pub fn render_op(&self, op: HomcaOp) -> String {
        match op {
            HomcaOp::Inc(a) | HomcaOp::Dec(a) if a >= self.symbols.len() => format!("{op:?}"),
            _ => op.render(&self.symbols),
        }
    }

    pub fn initial_configuration(&self) -> HomcaConfiguration {
        HomcaConfiguration {
            control: self.initial,
            slots: vec![None; self.level],
        }
    }

    /// Memory effect of `op`; several results only for `load`.
    pub fn apply(&self, c: &HomcaConfiguration, op: HomcaOp) -> Vec<Vec<Option<Multiset>>> {
        let k = self.level;
        let s = &c.slots;
        let def = |i: usize| s[i - 1].is_some();
        let prime = self.variant == Variant::HomcaPrime;
        let mut out = Vec::new();
        match op {
            HomcaOp::New(i) => {
                if def(i) || prime && ((i + 1..=k).any(|j| !def(j)) || (1..i).any(def)) {
                    return out;
                }
                let mut s2 = s.clone();
                s2[i - 1] = Some(Multiset::empty(i));
                out.push(s2);
            }
            HomcaOp::Inc(a) => {
                if def(1) {
                    let mut s2 = s.clone();
                    s2[0].as_mut().unwrap().insert_symbol(a);
                    out.push(s2);
                }
            }
            HomcaOp::Dec(a) => {
                let mut s2 = s.clone();
                if s2[0].as_mut().is_some_and(|m| m.remove_symbol(a)) {
                    out.push(s2);
                }
            }
            HomcaOp::Store(i) => {
                if i >= k || !def(i) || !def(i + 1) || prime && (1..i).any(def) {
                    return out;
                }
                let mut s2 = s.clone();
                let m = s2[i - 1].take().unwrap();
                s2[i].as_mut().unwrap().insert_set(m);
                out.push(s2);
            }
            HomcaOp::Load(i) => {
                if i >= k || (1..=i).any(def) {
                    return out;
                }
                let Some(Multiset::Sets(children)) = &s[i] else { return out };
                let mut seen: Option<&Multiset> = None;
                for (j, child) in children.iter().enumerate() {
                    if seen == Some(child) {
                        continue;
                    }
                    seen = Some(child);
                    let mut s2 = s.clone();
                    if let Some(Multiset::Sets(v)) = &mut s2[i] {
                        v.remove(j);
                    }
                    s2[i - 1] = Some(child.clone());
                    out.push(s2);
                }
            }
        }
        out
    }

    /// Successors of `c` through transitions labelled `letter`.
    pub fn step(&self, c: &HomcaConfiguration, letter: Option<usize>) -> Vec<HomcaConfiguration> {
        let lo = HomcaTransition {
            from: c.control,
            letter: None,
            op: HomcaOp::New(0),
            to: 0,
        };
        let mut out = Vec::new();
        for t in self.transitions.range(lo..) {
            if t.from != c.control {
                break;
            }
            if t.letter != letter {
                continue;
            }
            for slots in self.apply(c, t.op) {
                let next = HomcaConfiguration { control: t.to, slots };
                if self.variant == Variant::HomcaPrime {
                    assert!(next.cut().is_some(), "cut invariant broken by {}", self.render_op(t.op));
                }
                out.push(next);
            }
        }
        out
    }

    pub fn is_accepting(&self, c: &HomcaConfiguration) -> bool {
        self.accepting.contains(&c.control)
            && (self.weak || c.slots.iter().flatten().all(Multiset::is_hereditarily_empty))
    }

    fn budget(&self, limits: &HomcaLimits, weight: usize) -> usize {
        limits
            .eps_budget
            .unwrap_or(self.symbols.len().max(1) * self.level * (weight + 1) + self.states.len())
    }

    /// ε-closure within the budget. Returns the closure and whether any
    /// branch was cut.
    fn closure(
        &self,
        start: HashSet<HomcaConfiguration>,
        limits: &HomcaLimits,
    ) -> (HashSet<HomcaConfiguration>, bool) {
        let weight = start.iter().map(HomcaConfiguration::weight).max().unwrap_or(0);
        let budget = self.budget(limits, weight);
        let mut pruned = false;
        let mut seen = start.clone();
        let mut queue: VecDeque<(HomcaConfiguration, usize)> = start.into_iter().map(|c| (c, 0)).collect();
        while let Some((c, d)) = queue.pop_front() {
            for n in self.step(&c, None) {
                if seen.contains(&n) {
                    continue;
                }
                if d >= budget || seen.len() >= limits.max_configs {
                    pruned = true;
                    continue;
                }
                seen.insert(n.clone());
                queue.push_back((n, d + 1));
            }
        }
        (seen, pruned)
    }

    /// Bounded membership search for a word given by letter names.
    pub fn search(&self, word: &[String], limits: HomcaLimits) -> HomcaVerdict {
        let mut letters = Vec::new();
        for w in word {
            match self.alphabet.iter().position(|a| a == w) {
                Some(i) => letters.push(i),
                None => {
                    return HomcaVerdict {
                        accepted: false,
                        pruned: false,
                    }
                }
            }
        }
        let mut pruned = false;
        let mut current = HashSet::from([self.initial_configuration()]);
        for a in letters {
            let (closed, p) = self.closure(current, &limits);
            pruned |= p;
            let mut next = HashSet::new();
            for c in &closed {
                for n in self.step(c, Some(a)) {
                    if next.len() >= limits.max_configs {
                        pruned = true;
                        break;
                    }
                    next.insert(n);
                }
            }
            if next.is_empty() {
                return HomcaVerdict { accepted: false, pruned };
            }
            current = next;
        }
        let (closed, p) = self.closure(current, &limits);
        HomcaVerdict {
            accepted: closed.iter().any(|c| self.is_accepting(c)),
            pruned: pruned || p,
        }
    }

    /// Membership with default limits.
    pub fn accepts<S: AsRef<str>>(&self, word: &[S]) -> bool {
        let w: Vec<String> = word.iter().map(|s| s.as_ref().to_string()).collect();
        self.search(&w, HomcaLimits::default()).accepted
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn level1() -> Homca {
        let mut m = Homca::new(1, ["q0", "q1", "q2"], ["a"], ["x"], Variant::Homca);
        m.add(0, Some(0), HomcaOp::New(1), 1);
        m.add(1, None, HomcaOp::Inc(0), 2);
        m
    }

    #[test]
    fn new_gives_hereditarily_empty() {
        let mut m = level1();
        m.accepting.insert(1);
        assert!(m.accepts(&["a"]));
        assert!(!m.accepts::<&str>(&[]));
    }

    #[test]
    fn leftover_symbol_blocks_strong_only() {
        let mut m = level1();
        m.accepting = [2].into();
        assert!(!m.accepts(&["a"]));
        m.weak = true;
        assert!(m.accepts(&["a"]));
    }

    #[test]
    fn load_picks_each_distinct_child() {
        let m = Homca::new(2, ["q"], ["a"], ["x", "y"], Variant::Homca);
        let c = HomcaConfiguration {
            control: 0,
            slots: vec![
                None,
                Some(Multiset::Sets(vec![
                    Multiset::Symbols(vec![0]),
                    Multiset::Symbols(vec![0]),
                    Multiset::Symbols(vec![1]),
                ])),
            ],
        };
        assert_eq!(m.apply(&c, HomcaOp::Load(1)).len(), 2);
    }

    #[test]
    fn prime_conditions() {
        let m = Homca::new(2, ["q"], ["a"], ["x"], Variant::HomcaPrime);
        let c = m.initial_configuration();
        // new_1 needs m_2 defined
        assert!(m.apply(&c, HomcaOp::New(1)).is_empty());
        assert_eq!(m.apply(&c, HomcaOp::New(2)).len(), 1);
    }
}
