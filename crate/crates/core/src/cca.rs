//! Class counting automata: one counter per data value, guarded by
//! comparisons against constants and updated by increment or set.

use std::collections::{BTreeSet, HashSet};

use crate::cma::{Cma, StateId};
use crate::data::{Bag, DataWord};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Gt,
}

impl CmpOp {
    pub fn holds(self, n: u64, e: u64) -> bool {
        match self {
            CmpOp::Eq => n == e,
            CmpOp::Ne => n != e,
            CmpOp::Lt => n < e,
            CmpOp::Gt => n > e,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        Some(match s {
            "=" => CmpOp::Eq,
            "!=" | "≠" => CmpOp::Ne,
            "<" => CmpOp::Lt,
            ">" => CmpOp::Gt,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Update {
    Inc,
    Set,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CcaTransition {
    pub from: StateId,
    pub letter: usize,
    pub guard: (CmpOp, u64),
    pub update: Update,
    pub amount: u64,
    pub to: StateId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cca {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub initial: StateId,
    pub accepting: BTreeSet<StateId>,
    pub transitions: BTreeSet<CcaTransition>,
}

impl Cca {
    /// Largest constant occurring in any guard or update.
    pub fn max_constant(&self) -> u64 {
        self.transitions
            .iter()
            .map(|t| t.guard.1.max(t.amount))
            .max()
            .unwrap_or(0)
    }

    pub fn accepts(&self, w: &DataWord) -> bool {
        let letters: Option<Vec<usize>> = w
            .entries
            .iter()
            .map(|e| self.alphabet.iter().position(|l| *l == e.letter))
            .collect();
        let Some(letters) = letters else { return false };
        let mut current: HashSet<(StateId, Bag)> = HashSet::from([(self.initial, Bag::new())]);
        for (e, &a) in w.entries.iter().zip(&letters) {
            let mut next = HashSet::new();
            for (q, h) in &current {
                let n = h.get(e.value);
                for t in self.transitions.iter().filter(|t| t.from == *q && t.letter == a) {
                    if t.guard.0.holds(n, t.guard.1) {
                        let v = match t.update {
                            Update::Inc => n + t.amount,
                            Update::Set => t.amount,
                        };
                        let mut h2 = h.clone();
                        h2.set(e.value, v);
                        next.insert((t.to, h2));
                    }
                }
            }
            if next.is_empty() {
                return false;
            }
            current = next;
        }
        current.iter().any(|(q, _)| self.accepting.contains(q))
    }

    /// For each state and letter the guards of outgoing transitions partition the naturals.
    pub fn is_deterministic(&self) -> bool {
        let top = self.max_constant() + 1;
        for q in 0..self.states.len() {
            for a in 0..self.alphabet.len() {
                let out: Vec<&CcaTransition> =
                    self.transitions.iter().filter(|t| t.from == q && t.letter == a).collect();
                for n in 0..=top {
                    if out.iter().filter(|t| t.guard.0.holds(n, t.guard.1)).count() != 1 {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Weak CMA to CCA: state `i` is counter value `i + 1`, ⊥ is 0.
///
/// The guard for the largest state number is `> n-1` rather than `= n`, so
/// that deterministic complete machines map to deterministic ones: no
/// reachable counter ever exceeds `n`, and the guards then cover every natural.
pub fn wcma_to_cca(a: &Cma) -> Result<Cca> {
    a.require_weak()?;
    let a = a.eliminate_silent()?;
    let n = a.states.len() as u64;
    let mut transitions = BTreeSet::new();
    for ((q, l, m), ts) in &a.transitions {
        let guard = match m {
            None => (CmpOp::Eq, 0),
            Some(p) if *p as u64 + 1 == n => (CmpOp::Gt, n - 1),
            Some(p) => (CmpOp::Eq, *p as u64 + 1),
        };
        for &t in ts {
            transitions.insert(CcaTransition {
                from: *q,
                letter: *l,
                guard,
                update: Update::Set,
                amount: t as u64 + 1,
                to: t,
            });
        }
    }
    Ok(Cca {
        states: a.states.clone(),
        alphabet: a.alphabet.clone(),
        initial: a.initial,
        accepting: a.globally_accepting.clone(),
        transitions,
    })
}

/// CCA to weak CMA over `Q × {0..n0+1}`, saturating counters at `n0 + 1`.
pub fn cca_to_wcma(c: &Cca) -> Cma {
    let n0 = c.max_constant();
    let width = (n0 + 2) as usize;
    let id = |q: StateId, i: usize| q * width + i;
    let mut states = Vec::with_capacity(c.states.len() * width);
    for q in &c.states {
        for i in 0..width {
            states.push(format!("<{q}|{i}>"));
        }
    }
    let mut out = Cma::new(states, c.alphabet.clone(), id(c.initial, 0));
    for &q in &c.accepting {
        for i in 0..width {
            out.globally_accepting.insert(id(q, i));
        }
    }
    let sat = |v: u64| v.min(n0 + 1) as usize;
    for t in &c.transitions {
        let (op, e) = t.guard;
        for i in 0..width {
            let src = id(t.from, i);
            if op.holds(0, e) {
                out.add_transition(src, t.letter, None, id(t.to, sat(t.amount)));
            }
            for q2 in 0..c.states.len() {
                for l in 0..width {
                    if !op.holds(l as u64, e) {
                        continue;
                    }
                    let j = match t.update {
                        Update::Inc => sat(l as u64 + t.amount),
                        Update::Set => sat(t.amount),
                    };
                    out.add_transition(src, t.letter, Some(id(q2, l)), id(t.to, j));
                }
            }
        }
    }
    out
}
