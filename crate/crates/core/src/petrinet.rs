//! Petri nets with optional reset arcs, and their encodings into class
//! memory automata: tokens are data values, a place is the set of states
//! its tokens may sit in.

use std::collections::{HashMap, VecDeque};

use crate::cma::{Cma, StateId};
use crate::coverability::{Vas, VasRule};
use crate::data::DataWord;
use crate::error::{Error, Result};
use crate::ndcma::{Guard, Ndcma};
use crate::wsts::{ndcma_weak_empty_within, WeakVerdict, WstsState};

pub type Marking = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetTransition {
    pub name: String,
    /// Tokens consumed per place.
    pub input: Vec<u32>,
    /// Tokens produced per place, after resets.
    pub output: Vec<u32>,
    pub reset: Vec<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueryKind {
    Reach,
    Cover,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PetriNet {
    pub places: Vec<String>,
    pub transitions: Vec<NetTransition>,
    pub initial: Marking,
    pub query: QueryKind,
    pub target: Marking,
}

impl PetriNet {
    pub fn new<S: Into<String>>(places: impl IntoIterator<Item = S>) -> Self {
        let places: Vec<String> = places.into_iter().map(Into::into).collect();
        let n = places.len();
        PetriNet {
            places,
            transitions: Vec::new(),
            initial: vec![0; n],
            query: QueryKind::Cover,
            target: vec![0; n],
        }
    }

    pub fn place_id(&self, name: &str) -> Option<usize> {
        self.places.iter().position(|p| p == name)
    }

    /// Adds a transition given as place-index lists; repeated entries count twice.
    pub fn add_transition(&mut self, name: impl Into<String>, input: &[usize], reset: &[usize], output: &[usize]) -> usize {
        let n = self.places.len();
        let count = |xs: &[usize]| {
            let mut v = vec![0u32; n];
            for &p in xs {
                v[p] += 1;
            }
            v
        };
        let mut r = vec![false; n];
        for &p in reset {
            r[p] = true;
        }
        self.transitions.push(NetTransition {
            name: name.into(),
            input: count(input),
            output: count(output),
            reset: r,
        });
        self.transitions.len() - 1
    }

    pub fn has_resets(&self) -> bool {
        self.transitions.iter().any(|t| t.reset.iter().any(|r| *r))
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.places.len();
        if self.initial.len() != n || self.target.len() != n {
            return Err(Error::Invariant("marking length differs from the number of places".into()));
        }
        for t in &self.transitions {
            if t.input.len() != n || t.output.len() != n || t.reset.len() != n {
                return Err(Error::Invariant(format!("transition `{}` has the wrong arity", t.name)));
            }
        }
        Ok(())
    }

    pub fn enabled(&self, m: &[u32], t: usize) -> bool {
        m.iter().zip(&self.transitions[t].input).all(|(a, b)| a >= b)
    }

    /// Inputs are removed, reset places emptied, then outputs added.
    pub fn fire(&self, m: &[u32], t: usize) -> Result<Marking> {
        if !self.enabled(m, t) {
            return Err(Error::Invariant(format!("transition `{}` is not enabled", self.transitions[t].name)));
        }
        let tr = &self.transitions[t];
        Ok((0..m.len())
            .map(|p| if tr.reset[p] { 0 } else { m[p] - tr.input[p] } + tr.output[p])
            .collect())
    }

    pub fn replay(&self, sequence: &[usize]) -> Result<Marking> {
        sequence.iter().try_fold(self.initial.clone(), |m, &t| self.fire(&m, t))
    }

    pub fn satisfies(&self, m: &[u32]) -> bool {
        match self.query {
            QueryKind::Reach => m == self.target.as_slice(),
            QueryKind::Cover => m.iter().zip(&self.target).all(|(a, b)| a >= b),
        }
    }

    /// The net as a one-state vector addition system whose target is the
    /// query marking, for coverability.
    pub fn to_vas(&self) -> Result<Vas> {
        if self.has_resets() {
            return Err(Error::Unsupported("reset arcs have no vector addition counterpart".into()));
        }
        Ok(Vas {
            counters: self.places.clone(),
            states: vec!["net".into()],
            initial: (0, self.initial.clone()),
            rules: self
                .transitions
                .iter()
                .map(|t| VasRule {
                    from: 0,
                    dec: t.input.clone(),
                    inc: t.output.clone(),
                    to: 0,
                })
                .collect(),
            targets: vec![(0, self.target.clone())],
        })
    }

    /// Breadth-first search for a shortest firing sequence of at most
    /// `max_steps` transitions meeting the query, never holding more than
    /// `max_tokens` tokens in one place.
    pub fn search_bounded(&self, max_steps: usize, max_tokens: u32) -> Option<Vec<usize>> {
        let mut parent: HashMap<Marking, Option<(Marking, usize)>> = HashMap::from([(self.initial.clone(), None)]);
        let mut queue = VecDeque::from([(self.initial.clone(), 0usize)]);
        while let Some((m, depth)) = queue.pop_front() {
            if self.satisfies(&m) {
                let mut seq = Vec::new();
                let mut cur = m;
                while let Some(Some((p, t))) = parent.get(&cur) {
                    seq.push(*t);
                    cur = p.clone();
                }
                seq.reverse();
                return Some(seq);
            }
            if depth == max_steps {
                continue;
            }
            for t in 0..self.transitions.len() {
                let Ok(next) = self.fire(&m, t) else { continue };
                if next.iter().any(|k| *k > max_tokens) || parent.contains_key(&next) {
                    continue;
                }
                parent.insert(next.clone(), Some((m.clone(), t)));
                queue.push_back((next, depth + 1));
            }
        }
        None
    }
}

/// What an automaton state stands for in an encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Role {
    Start,
    /// Creates an initial token, or (nested) a place's first bag.
    Setup,
    Hub,
    /// A step of the chain simulating a transition; `first` marks the
    /// chain's entry, which is where the transition fires.
    Fire { transition: usize, first: bool },
    /// Collects a token of a dead bag.
    Garbage,
    Check,
    /// Reads a bag once the target is checked.
    Finish,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetEncoding<M> {
    pub machine: M,
    pub roles: Vec<Role>,
    /// Nested encodings: the place whose live bag a state may label.
    pub bag_of: Vec<Option<usize>>,
}

impl<M> NetEncoding<M> {
    /// The firing sequence behind a run given by its visited control states.
    pub fn decode_controls(&self, controls: impl IntoIterator<Item = StateId>) -> Vec<usize> {
        controls
            .into_iter()
            .filter_map(|q| match self.roles[q] {
                Role::Fire { transition, first: true } => Some(transition),
                _ => None,
            })
            .collect()
    }
}

impl NetEncoding<Cma> {
    /// The firing sequence behind an accepted word, or `None` if the word is rejected.
    pub fn decode(&self, w: &DataWord) -> Option<Vec<usize>> {
        let run = self.machine.accepting_run(w)?;
        // the state written by each read is where the run stands afterwards
        let controls = w.entries.iter().enumerate().map(|(i, e)| run[i + 1].memory.get(e.value).expect("read value is mapped"));
        Some(self.decode_controls(controls))
    }
}

impl NetEncoding<Ndcma> {
    /// Holds in every reachable configuration: each place has at most one
    /// live bag, and the values below it carry states of that place.
    /// Deleting nodes keeps it true, so the weak engine may prune with it.
    pub fn invariant(&self, s: &WstsState) -> bool {
        let mut seen = vec![false; self.bag_of.iter().flatten().max().map_or(0, |p| p + 1)];
        s.tree.children.iter().all(|b| match self.bag_of[b.label] {
            Some(p) => !std::mem::replace(&mut seen[p], true) && b.children.iter().all(|t| self.bag_of[t.label] == Some(p)),
            None => true,
        })
    }

    /// Emptiness of a weak nested encoding, pruned by [`Self::invariant`].
    pub fn weak_emptiness(&self) -> Result<WeakVerdict> {
        ndcma_weak_empty_within(&self.machine, |s| self.invariant(s))
    }

    pub fn decode(&self, w: &DataWord) -> Result<Option<Vec<usize>>> {
        let Some(run) = self.machine.accepting_run(w)? else {
            return Ok(None);
        };
        Ok(Some(self.decode_controls(run[1..].iter().map(|c| c.control))))
    }
}

fn units(v: &[u32]) -> Vec<usize> {
    v.iter().enumerate().flat_map(|(p, k)| std::iter::repeat_n(p, *k as usize)).collect()
}

fn has_effect(t: &NetTransition) -> bool {
    t.input.iter().chain(&t.output).any(|k| *k > 0) || t.reset.iter().any(|r| *r)
}

struct Layout {
    names: Vec<String>,
    roles: Vec<Role>,
}

impl Layout {
    fn add(&mut self, role: Role) -> StateId {
        self.names.push(format!("s{}", self.names.len()));
        self.roles.push(role);
        self.names.len() - 1
    }
}

/// Strong flat encoding: nonempty iff the target marking is reachable.
pub fn encode_reachability_cma(net: &PetriNet) -> Result<NetEncoding<Cma>> {
    encode_flat(net, true)
}

/// Weak flat encoding: nonempty iff the target marking is coverable.
pub fn encode_coverability_wcma(net: &PetriNet) -> Result<NetEncoding<Cma>> {
    encode_flat(net, false)
}

fn encode_flat(net: &PetriNet, strong: bool) -> Result<NetEncoding<Cma>> {
    net.validate()?;
    if net.has_resets() {
        return Err(Error::Unsupported("reset arcs need the nested encoding".into()));
    }
    enum Read {
        Fresh,
        Token(usize),
    }
    let mut l = Layout {
        names: Vec::new(),
        roles: Vec::new(),
    };
    let mut tokens: Vec<Vec<StateId>> = vec![Vec::new(); net.places.len()];
    let mut reads: Vec<(StateId, Read, StateId)> = Vec::new();
    let mut silent: Vec<(StateId, StateId)> = Vec::new();

    let mut prev = l.add(Role::Start);
    for p in units(&net.initial) {
        let s = l.add(Role::Setup);
        tokens[p].push(s);
        reads.push((prev, Read::Fresh, s));
        prev = s;
    }
    let hub = l.add(Role::Hub);
    silent.push((prev, hub));
    for (t, tr) in net.transitions.iter().enumerate() {
        if !has_effect(tr) {
            continue;
        }
        let mut prev = hub;
        let mut first = true;
        for p in units(&tr.input) {
            let s = l.add(Role::Fire { transition: t, first });
            reads.push((prev, Read::Token(p), s));
            (prev, first) = (s, false);
        }
        for p in units(&tr.output) {
            let s = l.add(Role::Fire { transition: t, first });
            tokens[p].push(s);
            reads.push((prev, Read::Fresh, s));
            (prev, first) = (s, false);
        }
        silent.push((prev, hub));
    }
    let mut prev = hub;
    for p in units(&net.target) {
        let s = l.add(Role::Check);
        reads.push((prev, Read::Token(p), s));
        prev = s;
    }
    if prev == hub {
        prev = l.add(Role::Check);
        silent.push((hub, prev));
    }

    let mut a = Cma::new(l.names, ["a"], 0);
    for (from, read, to) in reads {
        match read {
            Read::Fresh => a.add_transition(from, 0, None, to),
            Read::Token(p) => {
                for &s in &tokens[p] {
                    a.add_transition(from, 0, Some(s), to);
                }
            }
        }
    }
    a.silent.extend(silent);
    a.globally_accepting.insert(prev);
    if strong {
        a.locally_accepting = (0..a.states.len()).filter(|s| !tokens.iter().any(|ts| ts.contains(s))).collect();
    }
    a.validate()?;
    let bag_of = vec![None; a.states.len()];
    Ok(NetEncoding {
        machine: a,
        roles: l.roles,
        bag_of,
    })
}

/// Strong nested encoding: nonempty iff the target marking is reachable.
pub fn encode_reset_reachability_ndcma(net: &PetriNet) -> Result<NetEncoding<Ndcma>> {
    encode_nested(net, true)
}

/// Weak nested encoding: nonempty iff the target marking is coverable.
pub fn encode_reset_coverability_weak_ndcma(net: &PetriNet) -> Result<NetEncoding<Ndcma>> {
    encode_nested(net, false)
}

/// Each place owns a level-1 bag value; its tokens are level-2 values below
/// the bag. A reset moves the bag to a dead state and opens a fresh bag, so
/// the old tokens can no longer be read as tokens of the place.
///
/// There are no silent moves, so every move out of the hub is copied to
/// each state that ends a chain. A read also relabels the bag above the
/// value read, and producing a token writes a token state to its bag;
/// strong machines therefore read every bag once more after the check.
fn encode_nested(net: &PetriNet, strong: bool) -> Result<NetEncoding<Ndcma>> {
    net.validate()?;
    if net.places.is_empty() {
        return Err(Error::Unsupported("a net without places".into()));
    }
    #[derive(Clone, Copy)]
    enum Read {
        FreshBag,
        Bag(usize),
        FreshToken(usize),
        Token(usize),
        DeadToken(usize),
    }
    #[derive(Clone, Copy)]
    enum Src {
        State(StateId),
        ChainEnd,
    }
    let n = net.places.len();
    let mut l = Layout {
        names: Vec::new(),
        roles: Vec::new(),
    };
    let mut live: Vec<Vec<StateId>> = vec![Vec::new(); n];
    let mut dead: Vec<Vec<StateId>> = vec![Vec::new(); n];
    let mut tokens: Vec<Vec<StateId>> = vec![Vec::new(); n];
    let mut reads: Vec<(Src, Read, StateId)> = Vec::new();
    let mut ends: Vec<StateId> = Vec::new();

    let mut prev = l.add(Role::Start);
    for bag in live.iter_mut() {
        let s = l.add(Role::Setup);
        bag.push(s);
        reads.push((Src::State(prev), Read::FreshBag, s));
        prev = s;
    }
    for p in units(&net.initial) {
        let s = l.add(Role::Setup);
        live[p].push(s);
        tokens[p].push(s);
        reads.push((Src::State(prev), Read::FreshToken(p), s));
        prev = s;
    }
    ends.push(prev);
    for (t, tr) in net.transitions.iter().enumerate() {
        if !has_effect(tr) {
            continue;
        }
        let mut prev = Src::ChainEnd;
        let mut first = true;
        let mut step = |l: &mut Layout, read: Read, prev: &mut Src| {
            let s = l.add(Role::Fire { transition: t, first });
            first = false;
            reads.push((*prev, read, s));
            *prev = Src::State(s);
            s
        };
        for p in units(&tr.input) {
            let s = step(&mut l, Read::Token(p), &mut prev);
            live[p].push(s);
        }
        for r in (0..n).filter(|r| tr.reset[*r]) {
            let s = step(&mut l, Read::Bag(r), &mut prev);
            dead[r].push(s);
            let s = step(&mut l, Read::FreshBag, &mut prev);
            live[r].push(s);
        }
        for p in units(&tr.output) {
            let s = step(&mut l, Read::FreshToken(p), &mut prev);
            live[p].push(s);
            tokens[p].push(s);
        }
        let Src::State(last) = prev else { unreachable!("transition with an effect") };
        ends.push(last);
    }
    if strong {
        let resettable: Vec<usize> = (0..n).filter(|r| !dead[*r].is_empty()).collect();
        for r in resettable {
            let s = l.add(Role::Garbage);
            dead[r].push(s);
            reads.push((Src::ChainEnd, Read::DeadToken(r), s));
            ends.push(s);
        }
    }
    let mut prev = Src::ChainEnd;
    for p in units(&net.target) {
        let s = l.add(Role::Check);
        live[p].push(s);
        reads.push((prev, Read::Token(p), s));
        prev = Src::State(s);
    }
    // weak machines accept any bag label; they only need a final state
    let finish = if strong || matches!(prev, Src::ChainEnd) { 0..n } else { 0..0 };
    for p in finish {
        let s = l.add(Role::Finish);
        reads.push((prev, Read::Bag(p), s));
        prev = Src::State(s);
    }
    let Src::State(last) = prev else { unreachable!("at least one place") };

    // the letter tells the two levels apart in witness words
    let mut a = Ndcma::new(2, l.names, ["bag", "token"], 0);
    for (src, read, to) in reads {
        let guards: Vec<(usize, Guard)> = match read {
            Read::FreshBag => vec![(0, vec![None])],
            Read::Bag(p) => live[p].iter().map(|s| (0, vec![Some(*s)])).collect(),
            Read::FreshToken(p) => live[p].iter().map(|s| (1, vec![Some(*s), None])).collect(),
            Read::Token(p) => live[p]
                .iter()
                .flat_map(|b| tokens[p].iter().map(move |t| (1, vec![Some(*b), Some(*t)])))
                .collect(),
            Read::DeadToken(p) => dead[p]
                .iter()
                .flat_map(|b| tokens[p].iter().map(move |t| (1, vec![Some(*b), Some(*t)])))
                .collect(),
        };
        let sources = match src {
            Src::State(s) => vec![s],
            Src::ChainEnd => ends.clone(),
        };
        for s in sources {
            for (letter, g) in &guards {
                a.add_transition(s, Some(*letter), g.clone(), to);
            }
        }
    }
    a.globally_accepting.insert(last);
    if strong {
        a.locally_accepting = (0..a.states.len()).filter(|s| !tokens.iter().any(|ts| ts.contains(s))).collect();
    }
    a.validate()?;
    let mut bag_of = vec![None; a.states.len()];
    for (p, states) in live.iter().enumerate() {
        for &s in states {
            debug_assert!(bag_of[s].is_none(), "a state labels the live bag of one place only");
            bag_of[s] = Some(p);
        }
    }
    Ok(NetEncoding {
        machine: a,
        roles: l.roles,
        bag_of,
    })
}

/// The net of the running example: `t1` puts a token in `p1`, `t2` moves
/// one from `p1` to `p2`; one token starts in `p1`, the query asks for two in `p2`.
pub fn example_net(query: QueryKind) -> PetriNet {
    let mut net = PetriNet::new(["p1", "p2"]);
    net.add_transition("t1", &[], &[], &[0]);
    net.add_transition("t2", &[0], &[], &[1]);
    net.initial = vec![1, 0];
    net.target = vec![0, 2];
    net.query = query;
    net
}
