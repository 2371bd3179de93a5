//! Emptiness of weak nested-data CMA by backward saturation over labelled
//! trees ordered by injective, root-, parent- and label-preserving embedding.

use std::fmt::Write as _;

use crate::cma::{LetterId, StateId};
use crate::error::{Error, Result};
use crate::ndcma::{Guard, Ndcma};
use crate::saturation::Saturation;
use crate::tree::LabelledTree;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WstsState {
    pub control: StateId,
    pub tree: LabelledTree,
}

impl WstsState {
    pub fn initial(a: &Ndcma) -> Self {
        WstsState {
            control: a.initial,
            tree: LabelledTree::root_only(),
        }
    }
}

pub fn tree_leq(t: &LabelledTree, u: &LabelledTree) -> bool {
    t.embeds_into(u)
}

pub fn state_leq(s: &WstsState, t: &WstsState) -> bool {
    s.control == t.control && tree_leq(&s.tree, &t.tree)
}

/// A transition of the machine: source, letter (None for silent), guard, target.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move {
    pub from: StateId,
    pub letter: Option<LetterId>,
    pub guard: Guard,
    pub to: StateId,
}

/// One-step successors of `s` under `m`.
pub fn successors(s: &WstsState, m: &Move) -> Vec<WstsState> {
    if s.control != m.from {
        return Vec::new();
    }
    let targets = vec![m.to; m.guard.len()];
    s.tree
        .apply_read(&m.guard, &targets)
        .into_iter()
        .map(|tree| WstsState { control: m.to, tree })
        .collect()
}

fn moves(a: &Ndcma) -> Vec<Move> {
    let mut out = Vec::new();
    for ((q, l, g), ts) in &a.transitions {
        for &t in ts {
            out.push(Move {
                from: *q,
                letter: *l,
                guard: g.clone(),
                to: t,
            });
        }
    }
    out
}

/// A finite basis of the states with a one-step successor above `s`.
pub fn pred_basis(s: &WstsState, a: &Ndcma) -> Vec<(Move, WstsState)> {
    let mut out: Vec<(Move, WstsState)> = Vec::new();
    for m in moves(a) {
        if m.to != s.control {
            continue;
        }
        for tree in s.tree.read_predecessors(&m.guard, m.to) {
            let p = WstsState { control: m.from, tree };
            if !out.iter().any(|(_, q)| *q == p) {
                out.push((m.clone(), p));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeakVerdict {
    Empty { basis_size: usize },
    NonEmpty(Certificate),
}

/// A forward run from the initial state to an accepting control, one
/// (move, reached state) pair per step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub steps: Vec<(Move, WstsState)>,
}

impl Certificate {
    pub fn render(&self, a: &Ndcma) -> String {
        let names = |i: usize| a.states[i].clone();
        let mut out = String::new();
        for (m, s) in &self.steps {
            let guard: Vec<String> = m.guard.iter().map(|g| g.map_or("bot".into(), names)).collect();
            let letter = m.letter.map_or("eps".to_string(), |l| a.alphabet[l].clone());
            let _ = writeln!(
                out,
                "{} {} level {} [{}] -> {}  {}",
                names(m.from),
                letter,
                m.guard.len(),
                guard.join(","),
                names(m.to),
                s.tree.render(&names)
            );
        }
        out
    }
}

/// Decides emptiness of a weak machine. The answer is exact; a nonempty
/// verdict carries a forward run replayed through the successor relation.
pub fn ndcma_weak_empty(a: &Ndcma) -> Result<WeakVerdict> {
    ndcma_weak_empty_within(a, |_| true)
}

/// As [`ndcma_weak_empty`], discarding backward states that fail `invariant`.
///
/// The caller promises that every reachable state satisfies `invariant` and
/// that it survives deleting nodes from the tree. A state failing it then
/// has nothing reachable above it, so dropping it changes no verdict.
pub fn ndcma_weak_empty_within(a: &Ndcma, invariant: impl Fn(&WstsState) -> bool) -> Result<WeakVerdict> {
    a.validate()?;
    a.require_weak()?;
    let init = WstsState::initial(a);
    let targets: Vec<WstsState> = a
        .globally_accepting
        .iter()
        .map(|q| WstsState {
            control: *q,
            tree: LabelledTree::root_only(),
        })
        .collect();
    let pred = |s: &WstsState| {
        let mut ps = pred_basis(s, a);
        ps.retain(|(_, p)| invariant(p));
        ps
    };
    let sat = Saturation::run_keyed(targets, &init, |s| s.control as u64, |s| s.tree.node_count(), state_leq, pred, true);
    let Some(chain) = sat.chain(&init, state_leq) else {
        debug_assert!(sat.is_minimal(state_leq));
        return Ok(WeakVerdict::Empty {
            basis_size: sat.basis().len(),
        });
    };
    // replay forward: from a state above each chain element, some successor is above the next
    let mut cur = init;
    let mut steps = Vec::new();
    for (m, next) in chain.steps {
        let succ = successors(&cur, &m)
            .into_iter()
            .find(|s| state_leq(&next, s))
            .ok_or_else(|| Error::Invariant("certificate does not replay".into()))?;
        steps.push((m, succ.clone()));
        cur = succ;
    }
    if !a.globally_accepting.contains(&cur.control) {
        return Err(Error::Invariant("certificate ends outside the accepting states".into()));
    }
    Ok(WeakVerdict::NonEmpty(Certificate { steps }))
}
