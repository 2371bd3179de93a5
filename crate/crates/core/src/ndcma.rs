//! Nested-data class memory automata.
//!
//! A read of a level-i value consults the memory of the value and of its
//! i-1 ancestors and writes the target state to all of them. The sugared
//! form adds a level-0 root above every level-1 value and writes a separate
//! state per level. [`desugar`] turns the sugared form into the plain one.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use crate::cma::{BoolMode, Cma, CmaConfiguration, LetterId, Memory, StateId};
use crate::coverability::BoundedVerdict;
use crate::data::{ClassMemory, DataValue, DataWord, TupleWord, Universe};
use crate::error::{Error, Result};
use crate::tree::LabelledTree;

/// Memories of the read value's ancestors, top-down, ending with the value itself.
pub type Guard = Vec<Memory>;

/// Transition key. A `None` letter marks a silent move: it reads a data value
/// but consumes no input letter.
pub type NdKey = (StateId, Option<LetterId>, Guard);

/// A transition key with its targets, borrowed from a machine.
type Entry<'a> = (&'a NdKey, &'a BTreeSet<StateId>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ndcma {
    pub level: usize,
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub initial: StateId,
    pub locally_accepting: BTreeSet<StateId>,
    pub globally_accepting: BTreeSet<StateId>,
    pub transitions: BTreeMap<NdKey, BTreeSet<StateId>>,
}

/// Guards are well-formed when known memories form a prefix: a value
/// remembered by the machine always has remembered ancestors.
pub fn guard_shape_ok(g: &[Memory]) -> bool {
    let known = g.iter().take_while(|m| m.is_some()).count();
    g[known..].iter().all(Option::is_none)
}

fn check_common(
    level: usize,
    n: usize,
    initial: StateId,
    fl: &BTreeSet<StateId>,
    fg: &BTreeSet<StateId>,
    states: &[String],
) -> Result<()> {
    if level == 0 {
        return Err(Error::LevelBound("level must be at least 1".into()));
    }
    if initial >= n {
        return Err(Error::Invariant("initial state out of range".into()));
    }
    if let Some(q) = fg.iter().find(|q| !fl.contains(q)) {
        return Err(Error::Invariant(format!(
            "globally accepting state `{}` is not locally accepting",
            states[*q]
        )));
    }
    if fl.iter().chain(fg).any(|q| *q >= n) {
        return Err(Error::Invariant("acceptance set refers to an unknown state".into()));
    }
    Ok(())
}

impl Ndcma {
    pub fn new<S: Into<String>, L: Into<String>>(
        level: usize,
        states: impl IntoIterator<Item = S>,
        alphabet: impl IntoIterator<Item = L>,
        initial: StateId,
    ) -> Self {
        let states: Vec<String> = states.into_iter().map(Into::into).collect();
        Ndcma {
            level,
            locally_accepting: (0..states.len()).collect(),
            states,
            alphabet: alphabet.into_iter().map(Into::into).collect(),
            initial,
            globally_accepting: BTreeSet::new(),
            transitions: BTreeMap::new(),
        }
    }

    pub fn add_transition(&mut self, from: StateId, letter: Option<LetterId>, guard: Guard, to: StateId) {
        self.transitions.entry((from, letter, guard)).or_default().insert(to);
    }

    pub fn letter_id(&self, name: &str) -> Option<LetterId> {
        self.alphabet.iter().position(|l| l == name)
    }

    pub fn is_weak(&self) -> bool {
        self.locally_accepting.len() == self.states.len()
    }

    pub fn has_silent(&self) -> bool {
        self.transitions.keys().any(|k| k.1.is_none())
    }

    pub fn is_deterministic(&self) -> bool {
        !self.has_silent() && self.transitions.values().all(|t| t.len() == 1)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.states.len();
        check_common(
            self.level,
            n,
            self.initial,
            &self.locally_accepting,
            &self.globally_accepting,
            &self.states,
        )?;
        for ((q, a, g), ts) in &self.transitions {
            if g.is_empty() || g.len() > self.level {
                return Err(Error::LevelBound(format!(
                    "read of level {} in a level-{} machine",
                    g.len(),
                    self.level
                )));
            }
            if *q >= n
                || a.is_some_and(|a| a >= self.alphabet.len())
                || g.iter().flatten().any(|s| *s >= n)
                || ts.iter().any(|t| *t >= n)
            {
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
        if self.has_silent() {
            return Err(Error::NotDeterministic("silent reads present".into()));
        }
        if let Some(((q, _, _), _)) = self.transitions.iter().find(|(_, t)| t.len() != 1) {
            return Err(Error::NotDeterministic(format!("several successors from `{}`", self.states[*q])));
        }
        Ok(())
    }

    /// The level-1 machine with the same transitions as `a`.
    pub fn from_cma(a: &Cma) -> Result<Ndcma> {
        if !a.silent.is_empty() {
            return Err(Error::Unsupported("control-only moves have no nested counterpart".into()));
        }
        let mut out = Ndcma::new(1, a.states.clone(), a.alphabet.clone(), a.initial);
        out.locally_accepting = a.locally_accepting.clone();
        out.globally_accepting = a.globally_accepting.clone();
        for ((q, l, m), ts) in &a.transitions {
            for &t in ts {
                out.add_transition(*q, Some(*l), vec![*m], t);
            }
        }
        Ok(out)
    }

    /// A level-1 machine as a plain CMA.
    pub fn to_cma(&self) -> Result<Cma> {
        if self.level != 1 || self.has_silent() {
            return Err(Error::Unsupported("only silent-free level-1 machines are plain CMA".into()));
        }
        let mut out = Cma::new(self.states.clone(), self.alphabet.clone(), self.initial);
        out.locally_accepting = self.locally_accepting.clone();
        out.globally_accepting = self.globally_accepting.clone();
        for ((q, l, g), ts) in &self.transitions {
            for &t in ts {
                out.add_transition(*q, l.unwrap(), g[0], t);
            }
        }
        Ok(out)
    }

    /// Successors on one input. Every value on the ancestor path gets the target state.
    pub fn step(
        &self,
        c: &CmaConfiguration,
        universe: &Universe,
        letter: LetterId,
        value: crate::data::DataValue,
    ) -> Vec<CmaConfiguration> {
        let path = universe.ancestry(value);
        let guard: Guard = path.iter().map(|v| c.memory.get(*v)).collect();
        let Some(ts) = self.transitions.get(&(c.control, Some(letter), guard)) else {
            return Vec::new();
        };
        ts.iter()
            .map(|&t| {
                let mut memory = c.memory.clone();
                update_path(&mut memory, &path, t);
                debug_assert!(memory.check_parent_mapped(universe).is_ok());
                CmaConfiguration { control: t, memory }
            })
            .collect()
    }

    pub fn is_final(&self, c: &CmaConfiguration) -> bool {
        self.globally_accepting.contains(&c.control)
            && c.memory.iter().all(|(_, s)| self.locally_accepting.contains(&s))
    }

    /// An accepting run, one configuration per prefix of `w`.
    pub fn accepting_run(&self, w: &DataWord) -> Result<Option<Vec<CmaConfiguration>>> {
        if self.has_silent() {
            return Err(Error::Unsupported(
                "silent reads choose arbitrary data; use string membership instead".into(),
            ));
        }
        for e in &w.entries {
            if w.universe.level(e.value) > self.level {
                return Err(Error::LevelBound(format!(
                    "value `{}` is deeper than level {}",
                    w.universe.path(e.value),
                    self.level
                )));
            }
        }
        let letters: Option<Vec<LetterId>> = w.entries.iter().map(|e| self.letter_id(&e.letter)).collect();
        let Some(letters) = letters else { return Ok(None) };
        let init = CmaConfiguration {
            control: self.initial,
            memory: ClassMemory::new(),
        };
        let mut layers: Vec<Vec<(CmaConfiguration, usize)>> = vec![vec![(init, 0)]];
        for (i, e) in w.entries.iter().enumerate() {
            let mut seen = HashSet::new();
            let mut next = Vec::new();
            for (pi, (c, _)) in layers[i].iter().enumerate() {
                for d in self.step(c, &w.universe, letters[i], e.value) {
                    if seen.insert(d.clone()) {
                        next.push((d, pi));
                    }
                }
            }
            if next.is_empty() {
                return Ok(None);
            }
            layers.push(next);
        }
        let last = layers.len() - 1;
        let Some(mut idx) = layers[last].iter().position(|(c, _)| self.is_final(c)) else {
            return Ok(None);
        };
        let mut run = Vec::new();
        for i in (0..=last).rev() {
            run.push(layers[i][idx].0.clone());
            idx = layers[i][idx].1;
        }
        run.reverse();
        Ok(Some(run))
    }

    pub fn accepts(&self, w: &DataWord) -> Result<bool> {
        Ok(self.accepting_run(w)?.is_some())
    }

    /// Adds a sink so that every well-shaped guard at every level has a successor.
    pub fn complete(&self) -> Result<Ndcma> {
        self.require_deterministic()?;
        self.require_weak()?;
        let mut out = self.clone();
        let mut name = String::from("sink");
        while out.states.contains(&name) {
            name.push('\'');
        }
        out.states.push(name);
        let sink = out.states.len() - 1;
        out.locally_accepting.insert(sink);
        let n = out.states.len();
        let mut added = false;
        for guard in all_guards(n, self.level) {
            for q in 0..n {
                for a in 0..out.alphabet.len() {
                    if let std::collections::btree_map::Entry::Vacant(e) = out.transitions.entry((q, Some(a), guard.clone())) {
                        e.insert(BTreeSet::from([sink]));
                        if q != sink && !guard.contains(&Some(sink)) {
                            added = true;
                        }
                    }
                }
            }
        }
        if !added {
            return Ok(self.clone());
        }
        Ok(out)
    }

    pub fn is_complete(&self) -> bool {
        let n = self.states.len();
        all_guards(n, self.level).iter().all(|g| {
            (0..n).all(|q| {
                (0..self.alphabet.len())
                    .all(|a| self.transitions.get(&(q, Some(a), g.clone())).is_some_and(|t| !t.is_empty()))
            })
        })
    }

    pub fn complement(&self) -> Result<Ndcma> {
        self.require_deterministic()?;
        self.require_weak()?;
        if !self.is_complete() {
            return Err(Error::NotComplete("complement needs a complete machine".into()));
        }
        let mut out = self.clone();
        out.globally_accepting = (0..self.states.len()).filter(|q| !self.globally_accepting.contains(q)).collect();
        Ok(out)
    }

    /// Pair-state product with guards paired componentwise.
    pub fn product(&self, other: &Ndcma, mode: BoolMode) -> Result<Ndcma> {
        if self.level != other.level {
            return Err(Error::LevelBound(format!("levels {} and {} differ", self.level, other.level)));
        }
        let sa: BTreeSet<&String> = self.alphabet.iter().collect();
        let sb: BTreeSet<&String> = other.alphabet.iter().collect();
        if sa != sb {
            return Err(Error::AlphabetMismatch(format!("{:?} vs {:?}", self.alphabet, other.alphabet)));
        }
        if self.has_silent() || other.has_silent() {
            return Err(Error::Unsupported("products of machines with silent reads".into()));
        }
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
        let mut out = Ndcma::new(self.level, states, self.alphabet.clone(), pair(self.initial, other.initial));
        out.locally_accepting.clear();
        for p in 0..self.states.len() {
            for q in 0..nb {
                if self.locally_accepting.contains(&p) && other.locally_accepting.contains(&q) {
                    out.locally_accepting.insert(pair(p, q));
                }
                let (ga, gb) = (self.globally_accepting.contains(&p), other.globally_accepting.contains(&q));
                if match mode {
                    BoolMode::Intersection => ga && gb,
                    BoolMode::Union => ga || gb,
                } {
                    out.globally_accepting.insert(pair(p, q));
                }
            }
        }
        // index the second machine by (letter name, guard shape)
        let mut by_letter: HashMap<(&str, usize), Vec<Entry<'_>>> = HashMap::new();
        for (k, ts) in &other.transitions {
            by_letter
                .entry((other.alphabet[k.1.unwrap()].as_str(), k.2.len()))
                .or_default()
                .push((k, ts));
        }
        for ((p, a, g1), t1) in &self.transitions {
            let a = a.unwrap();
            let Some(cands) = by_letter.get(&(self.alphabet[a].as_str(), g1.len())) else {
                continue;
            };
            for ((q, _, g2), t2) in cands {
                let paired: Option<Guard> = g1
                    .iter()
                    .zip(g2.iter())
                    .map(|(x, y)| match (x, y) {
                        (None, None) => Some(None),
                        (Some(x), Some(y)) => Some(Some(pair(*x, *y))),
                        _ => None,
                    })
                    .collect();
                let Some(g) = paired else { continue };
                for &x in t1 {
                    for &y in t2.iter() {
                        out.add_transition(pair(*p, *q), Some(a), g.clone(), pair(x, y));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// All well-shaped guards over `n` states, for every read level up to `level`.
pub fn all_guards(n: usize, level: usize) -> Vec<Guard> {
    let mut out = Vec::new();
    for i in 1..=level {
        for known in 0..=i {
            let mut acc: Vec<Guard> = vec![Vec::new()];
            for _ in 0..known {
                acc = acc
                    .into_iter()
                    .flat_map(|g| {
                        (0..n).map(move |s| {
                            let mut g = g.clone();
                            g.push(Some(s));
                            g
                        })
                    })
                    .collect();
            }
            for mut g in acc {
                g.resize(i, None);
                out.push(g);
            }
        }
    }
    out
}

fn update_path(memory: &mut ClassMemory, path: &[crate::data::DataValue], t: StateId) {
    for v in path {
        memory.set(*v, t);
    }
}

// ---------------------------------------------------------------------------
// sugared presentation

/// Sugared transition key: `guard[0]` is the root's memory, `guard[j]` that
/// of the level-j ancestor. Targets give one state per guard entry.
pub type SugaredTargets = (StateId, Vec<StateId>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SugaredNdcma {
    pub level: usize,
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub initial: StateId,
    pub locally_accepting: BTreeSet<StateId>,
    pub globally_accepting: BTreeSet<StateId>,
    pub transitions: BTreeMap<NdKey, BTreeSet<SugaredTargets>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SugaredConfiguration {
    pub control: StateId,
    pub root: Memory,
    pub memory: ClassMemory,
}

impl SugaredNdcma {
    pub fn new<S: Into<String>, L: Into<String>>(
        level: usize,
        states: impl IntoIterator<Item = S>,
        alphabet: impl IntoIterator<Item = L>,
        initial: StateId,
    ) -> Self {
        let states: Vec<String> = states.into_iter().map(Into::into).collect();
        SugaredNdcma {
            level,
            locally_accepting: (0..states.len()).collect(),
            states,
            alphabet: alphabet.into_iter().map(Into::into).collect(),
            initial,
            globally_accepting: BTreeSet::new(),
            transitions: BTreeMap::new(),
        }
    }

    pub fn add_transition(&mut self, from: StateId, letter: Option<LetterId>, guard: Guard, to: StateId, targets: Vec<StateId>) {
        self.transitions.entry((from, letter, guard)).or_default().insert((to, targets));
    }

    pub fn is_weak(&self) -> bool {
        self.locally_accepting.len() == self.states.len()
    }

    pub fn has_silent(&self) -> bool {
        self.transitions.keys().any(|k| k.1.is_none())
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.states.len();
        check_common(
            self.level,
            n,
            self.initial,
            &self.locally_accepting,
            &self.globally_accepting,
            &self.states,
        )?;
        for ((q, a, g), ts) in &self.transitions {
            if g.len() < 2 {
                return Err(Error::LevelBound("the root itself cannot be read".into()));
            }
            if g.len() > self.level + 1 {
                return Err(Error::LevelBound(format!(
                    "read of level {} in a level-{} machine",
                    g.len() - 1,
                    self.level
                )));
            }
            let bad_state = |s: &StateId| *s >= n;
            if bad_state(q)
                || a.is_some_and(|a| a >= self.alphabet.len())
                || g.iter().flatten().any(bad_state)
                || ts.iter().any(|(t, v)| bad_state(t) || v.iter().any(bad_state) || v.len() != g.len())
            {
                return Err(Error::Invariant("malformed sugared transition".into()));
            }
        }
        Ok(())
    }

    pub fn is_final(&self, c: &SugaredConfiguration) -> bool {
        self.globally_accepting.contains(&c.control)
            && c.root.is_none_or(|r| self.locally_accepting.contains(&r))
            && c.memory.iter().all(|(_, s)| self.locally_accepting.contains(&s))
    }

    /// Direct interpreter for the sugared semantics on data words.
    pub fn accepts(&self, w: &DataWord) -> Result<bool> {
        if self.has_silent() {
            return Err(Error::Unsupported(
                "silent reads choose arbitrary data; use string membership instead".into(),
            ));
        }
        let mut current: HashSet<SugaredConfiguration> = HashSet::from([SugaredConfiguration {
            control: self.initial,
            root: None,
            memory: ClassMemory::new(),
        }]);
        for e in &w.entries {
            let Some(a) = self.alphabet.iter().position(|l| *l == e.letter) else {
                return Ok(false);
            };
            let path = w.universe.ancestry(e.value);
            if path.len() > self.level {
                return Err(Error::LevelBound(format!("value `{}` too deep", w.universe.path(e.value))));
            }
            let mut next = HashSet::new();
            for c in &current {
                let mut guard = vec![c.root];
                guard.extend(path.iter().map(|v| c.memory.get(*v)));
                for (to, targets) in self.transitions.get(&(c.control, Some(a), guard)).into_iter().flatten() {
                    let mut memory = c.memory.clone();
                    for (v, t) in path.iter().zip(&targets[1..]) {
                        memory.set(*v, *t);
                    }
                    next.insert(SugaredConfiguration {
                        control: *to,
                        root: Some(targets[0]),
                        memory,
                    });
                }
            }
            if next.is_empty() {
                return Ok(false);
            }
            current = next;
        }
        Ok(current.iter().any(|c| self.is_final(c)))
    }
}

/// State of a desugared machine: sugared control, root memory, and the
/// per-level states written by the last read (empty before any read).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Packed {
    control: StateId,
    root: Memory,
    levels: Vec<StateId>,
}

/// Plain machine for a sugared one.
///
/// Each plain state packs the sugared control, the root's memory and the
/// per-level targets of the read that wrote it; a level-j value holding a
/// packed state is read back through component j. The root is tracked in the
/// control, as it is never an input value. Plain local acceptance requires
/// every component to be locally accepting, which is exact when strong
/// machines write only locally accepting states to strict ancestors; other
/// strong machines are refused.
pub fn desugar(s: &SugaredNdcma) -> Result<Ndcma> {
    s.validate()?;
    let weak = s.is_weak();
    if !weak {
        for ts in s.transitions.values() {
            for (_, v) in ts {
                let inner = &v[1..v.len() - 1];
                if let Some(t) = inner.iter().find(|t| !s.locally_accepting.contains(t)) {
                    return Err(Error::Unsupported(format!(
                        "strong machine writes non-accepting `{}` to an ancestor",
                        s.states[*t]
                    )));
                }
            }
        }
    }
    let name_of = |m: Memory| m.map_or("_".to_string(), |x| s.states[x].clone());
    let mut packed: Vec<Packed> = vec![Packed {
        control: s.initial,
        root: None,
        levels: Vec::new(),
    }];
    let mut index: HashMap<Packed, usize> = HashMap::from([(packed[0].clone(), 0)]);
    let mut transitions: BTreeMap<NdKey, BTreeSet<StateId>> = BTreeMap::new();
    loop {
        let before = packed.len();
        // (level j, sugared state) -> packed states readable as that state at level j
        let mut readable: HashMap<(usize, StateId), Vec<usize>> = HashMap::new();
        let mut controls: HashMap<(StateId, Memory), Vec<usize>> = HashMap::new();
        for (i, p) in packed.iter().enumerate() {
            for (j, t) in p.levels.iter().enumerate() {
                readable.entry((j + 1, *t)).or_default().push(i);
            }
            controls.entry((p.control, p.root)).or_default().push(i);
        }
        let snapshot = packed.len();
        for ((q, a, g), targets) in &s.transitions {
            let Some(ctrls) = controls.get(&(*q, g[0])) else { continue };
            let mut combos: Vec<Guard> = vec![Vec::new()];
            for (j, gj) in g.iter().enumerate().skip(1) {
                let options: Vec<Memory> = match gj {
                    None => vec![None],
                    Some(x) => readable.get(&(j, *x)).into_iter().flatten().map(|i| Some(*i)).collect(),
                };
                combos = combos
                    .into_iter()
                    .flat_map(|c| {
                        options.iter().map(move |o| {
                            let mut c = c.clone();
                            c.push(*o);
                            c
                        })
                    })
                    .collect();
                if combos.is_empty() {
                    break;
                }
            }
            for (to, v) in targets {
                let target = Packed {
                    control: *to,
                    root: Some(v[0]),
                    levels: v[1..].to_vec(),
                };
                let tid = *index.entry(target.clone()).or_insert_with(|| {
                    packed.push(target);
                    packed.len() - 1
                });
                for &c in ctrls {
                    if c >= snapshot {
                        continue;
                    }
                    for combo in &combos {
                        transitions.entry((c, *a, combo.clone())).or_default().insert(tid);
                    }
                }
            }
        }
        if packed.len() == before {
            break;
        }
    }
    let states: Vec<String> = packed
        .iter()
        .map(|p| {
            let lv: Vec<&str> = p.levels.iter().map(|t| s.states[*t].as_str()).collect();
            format!("<{}|{}|{}>", s.states[p.control], name_of(p.root), lv.join("."))
        })
        .collect();
    let mut out = Ndcma::new(s.level, states, s.alphabet.clone(), 0);
    out.transitions = transitions;
    let local = |p: &Packed| weak || p.levels.iter().all(|t| s.locally_accepting.contains(t));
    out.locally_accepting = packed.iter().enumerate().filter(|(_, p)| local(p)).map(|(i, _)| i).collect();
    out.globally_accepting = packed
        .iter()
        .enumerate()
        .filter(|(_, p)| {
            s.globally_accepting.contains(&p.control)
                && p.root.is_none_or(|r| s.locally_accepting.contains(&r))
                && local(p)
        })
        .map(|(i, _)| i)
        .collect();
    Ok(out)
}

// ---------------------------------------------------------------------------
// string membership over tree configurations

/// One read, in the uniform shape shared by plain and sugared machines.
#[derive(Clone, Debug)]
struct TreeRule {
    letter: Option<LetterId>,
    root_guard: Option<Memory>,
    guard: Guard,
    to: StateId,
    root_target: Option<StateId>,
    targets: Vec<StateId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeConfiguration {
    pub control: StateId,
    pub root: Memory,
    pub tree: LabelledTree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    /// Largest tree (nodes, root included) explored.
    pub max_nodes: usize,
    /// Largest number of configurations kept per input position.
    pub max_configs: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_nodes: 12,
            max_configs: 200_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StrVerdict {
    pub accepted: bool,
    /// Some configuration was cut off by the limits; a rejection is then inconclusive.
    pub pruned: bool,
}

struct TreeMachine<'a> {
    rules: HashMap<StateId, Vec<TreeRule>>,
    initial: StateId,
    alphabet: &'a [String],
    fl: &'a BTreeSet<StateId>,
    fg: &'a BTreeSet<StateId>,
}

impl TreeMachine<'_> {
    fn successors(&self, c: &TreeConfiguration, letter: Option<LetterId>) -> Vec<TreeConfiguration> {
        let mut out = Vec::new();
        for r in self.rules.get(&c.control).into_iter().flatten() {
            if r.letter != letter || r.root_guard.is_some_and(|g| g != c.root) {
                continue;
            }
            for tree in c.tree.apply_read(&r.guard, &r.targets) {
                out.push(TreeConfiguration {
                    control: r.to,
                    root: r.root_target.or(c.root),
                    tree,
                });
            }
        }
        out
    }

    fn is_final(&self, c: &TreeConfiguration) -> bool {
        self.fg.contains(&c.control)
            && c.root.is_none_or(|r| self.fl.contains(&r))
            && c.tree.labels().iter().all(|l| self.fl.contains(l))
    }

    fn search(&self, word: &[String], limits: SearchLimits) -> StrVerdict {
        let letters: Option<Vec<LetterId>> = word.iter().map(|w| self.alphabet.iter().position(|a| a == w)).collect();
        let Some(letters) = letters else {
            return StrVerdict {
                accepted: false,
                pruned: false,
            };
        };
        let mut pruned = false;
        let init = TreeConfiguration {
            control: self.initial,
            root: None,
            tree: LabelledTree::root_only(),
        };
        let mut layer: HashSet<TreeConfiguration> = HashSet::from([init]);
        for pos in 0..=letters.len() {
            // silent closure
            let mut queue: VecDeque<TreeConfiguration> = layer.iter().cloned().collect();
            while let Some(c) = queue.pop_front() {
                for d in self.successors(&c, None) {
                    if d.tree.node_count() > limits.max_nodes || layer.len() >= limits.max_configs {
                        pruned = true;
                        continue;
                    }
                    if layer.insert(d.clone()) {
                        queue.push_back(d);
                    }
                }
            }
            if pos == letters.len() {
                break;
            }
            let mut next = HashSet::new();
            for c in &layer {
                for d in self.successors(c, Some(letters[pos])) {
                    if d.tree.node_count() > limits.max_nodes || next.len() >= limits.max_configs {
                        pruned = true;
                        continue;
                    }
                    next.insert(d);
                }
            }
            layer = next;
            if layer.is_empty() {
                break;
            }
        }
        StrVerdict {
            accepted: layer.iter().any(|c| self.is_final(c)),
            pruned,
        }
    }
}

impl Ndcma {
    fn tree_machine(&self) -> TreeMachine<'_> {
        let mut rules: HashMap<StateId, Vec<TreeRule>> = HashMap::new();
        for ((q, a, g), ts) in &self.transitions {
            for &t in ts {
                rules.entry(*q).or_default().push(TreeRule {
                    letter: *a,
                    root_guard: None,
                    guard: g.clone(),
                    to: t,
                    root_target: None,
                    targets: vec![t; g.len()],
                });
            }
        }
        TreeMachine {
            rules,
            initial: self.initial,
            alphabet: &self.alphabet,
            fl: &self.locally_accepting,
            fg: &self.globally_accepting,
        }
    }

    /// Is `word` the string projection of some accepted data word?
    pub fn str_accepts(&self, word: &[String], limits: SearchLimits) -> StrVerdict {
        self.tree_machine().search(word, limits)
    }
}

impl SugaredNdcma {
    fn tree_machine(&self) -> TreeMachine<'_> {
        let mut rules: HashMap<StateId, Vec<TreeRule>> = HashMap::new();
        for ((q, a, g), ts) in &self.transitions {
            for (to, v) in ts {
                rules.entry(*q).or_default().push(TreeRule {
                    letter: *a,
                    root_guard: Some(g[0]),
                    guard: g[1..].to_vec(),
                    to: *to,
                    root_target: Some(v[0]),
                    targets: v[1..].to_vec(),
                });
            }
        }
        TreeMachine {
            rules,
            initial: self.initial,
            alphabet: &self.alphabet,
            fl: &self.locally_accepting,
            fg: &self.globally_accepting,
        }
    }

    pub fn str_accepts(&self, word: &[String], limits: SearchLimits) -> StrVerdict {
        self.tree_machine().search(word, limits)
    }
}

impl Ndcma {
    /// Forward search for an accepted data word of at most `max_steps`
    /// positions whose class memory never exceeds `max_nodes` values.
    /// Configurations are merged up to renaming of values.
    pub fn empty_bounded(&self, max_steps: usize, max_nodes: usize) -> Result<BoundedVerdict> {
        self.validate()?;
        if self.has_silent() {
            return Err(Error::Unsupported("bounded search needs every read to carry a letter".into()));
        }
        struct Node {
            config: CmaConfiguration,
            word: DataWord,
        }
        let key = |n: &Node| -> Result<(StateId, LabelledTree)> {
            Ok((n.config.control, crate::tree::canonical_tree(&n.config.memory, &n.word.universe)?))
        };
        let start = Node {
            config: CmaConfiguration {
                control: self.initial,
                memory: ClassMemory::new(),
            },
            word: DataWord::new(Universe::nested(self.level)),
        };
        let mut seen = HashSet::from([key(&start)?]);
        let mut layer = vec![start];
        for depth in 0..=max_steps {
            if let Some(n) = layer.iter().find(|n| self.is_final(&n.config)) {
                return Ok(BoundedVerdict::NonEmpty(n.word.clone()));
            }
            if depth == max_steps {
                break;
            }
            let mut next = Vec::new();
            for n in &layer {
                let mapped: Vec<DataValue> = n.word.universe.values().filter(|v| n.config.memory.get(*v).is_some()).collect();
                // a fresh value under the root or under any value above the last level
                let mut candidates: Vec<(Option<DataValue>, bool)> = vec![(None, true)];
                for &v in &mapped {
                    candidates.push((Some(v), false));
                    if n.word.universe.level(v) < self.level && mapped.len() < max_nodes {
                        candidates.push((Some(v), true));
                    }
                }
                for (v, fresh) in candidates {
                    if fresh && v.is_none() && mapped.len() >= max_nodes {
                        continue;
                    }
                    let mut universe = n.word.universe.clone();
                    let value = if fresh { universe.fresh(v)? } else { v.expect("existing value") };
                    for letter in 0..self.alphabet.len() {
                        for config in self.step(&n.config, &universe, letter, value) {
                            let mut word = n.word.clone();
                            word.universe = universe.clone();
                            word.push(self.alphabet[letter].clone(), value);
                            let m = Node { config, word };
                            if seen.insert(key(&m)?) {
                                next.push(m);
                            }
                        }
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            layer = next;
        }
        Ok(BoundedVerdict::UnknownBeyondBound)
    }
}

// ---------------------------------------------------------------------------
// tuple presentation

/// Position `(a, d1..dk)` becomes `(a, node with ancestor path d1/../dk)`.
pub fn tuple_to_forest(w: &TupleWord) -> Result<DataWord> {
    let mut out = DataWord::new(Universe::nested(w.k.max(1)));
    for (letter, tuple) in &w.entries {
        if tuple.iter().any(|c| c.contains('/') || c.is_empty()) {
            return Err(Error::Invariant(format!("tuple component in {tuple:?} is empty or contains `/`")));
        }
        let v = out.universe.intern_path(&tuple.join("/"))?;
        out.push(letter.clone(), v);
    }
    Ok(out)
}

/// Inverse of [`tuple_to_forest`] on words whose values all sit at the maximal level.
pub fn forest_to_tuple(w: &DataWord) -> Result<TupleWord> {
    let k = w.universe.bound();
    let mut out = TupleWord::new(k);
    for e in &w.entries {
        if w.universe.level(e.value) != k {
            return Err(Error::LevelBound(format!(
                "value `{}` is not at level {k}",
                w.universe.path(e.value)
            )));
        }
        let tuple = w.universe.ancestry(e.value).iter().map(|v| w.universe.name(*v).to_string()).collect();
        out.push(e.letter.clone(), tuple)?;
    }
    Ok(out)
}

/// The multi-level presentation over words in `Σ × D^k`: a forest machine
/// whose reads are all at level k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleNdcma(Ndcma);

impl TupleNdcma {
    pub fn new(machine: Ndcma) -> Result<Self> {
        if let Some(((_, _, g), _)) = machine.transitions.iter().find(|(k, _)| k.2.len() != machine.level) {
            return Err(Error::LevelBound(format!(
                "read of level {} in a tuple machine of level {}",
                g.len(),
                machine.level
            )));
        }
        Ok(TupleNdcma(machine))
    }

    pub fn machine(&self) -> &Ndcma {
        &self.0
    }

    pub fn accepts(&self, w: &TupleWord) -> Result<bool> {
        if w.k != self.0.level {
            return Err(Error::LevelBound(format!("level-{} word for a level-{} machine", w.k, self.0.level)));
        }
        self.0.accepts(&tuple_to_forest(w)?)
    }
}
