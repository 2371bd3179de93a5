//! Emptiness of weak CMA through coverability in a vector addition system
//! with control states, and a bounded forward search for the strong case.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::cma::{BoolMode, Cma, LetterId, Memory, StateId};
use crate::data::{DataValue, DataWord};
use crate::error::Result;
use crate::saturation::Saturation;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VasRule {
    pub from: usize,
    pub dec: Vec<u32>,
    pub inc: Vec<u32>,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vas {
    pub counters: Vec<String>,
    pub states: Vec<String>,
    pub initial: (usize, Vec<u32>),
    pub rules: Vec<VasRule>,
    /// Cover any of these: same control, every counter at least as large.
    pub targets: Vec<(usize, Vec<u32>)>,
}

pub type VasConfig = (usize, Vec<u32>);

pub fn vas_leq(a: &VasConfig, b: &VasConfig) -> bool {
    a.0 == b.0 && a.1.iter().zip(&b.1).all(|(x, y)| x <= y)
}

impl Vas {
    /// Decrements first, then increments.
    pub fn fire(&self, c: &VasConfig, rule: usize) -> Option<VasConfig> {
        let r = &self.rules[rule];
        if c.0 != r.from || c.1.iter().zip(&r.dec).any(|(v, d)| v < d) {
            return None;
        }
        let m = c.1.iter().zip(&r.dec).zip(&r.inc).map(|((v, d), i)| v - d + i).collect();
        Some((r.to, m))
    }

    /// Minimal configuration from which `rule` leads to a configuration above `c`.
    pub fn predecessor(&self, c: &VasConfig, rule: usize) -> Option<VasConfig> {
        let r = &self.rules[rule];
        if r.to != c.0 {
            return None;
        }
        let m = c.1.iter().zip(&r.dec).zip(&r.inc).map(|((v, d), i)| d + v.saturating_sub(*i)).collect();
        Some((r.from, m))
    }

    pub fn covers_target(&self, c: &VasConfig) -> bool {
        self.targets.iter().any(|t| vas_leq(t, c))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverResult {
    pub coverable: bool,
    /// Rules to fire from the initial configuration to cover a target.
    pub certificate: Option<Vec<usize>>,
    pub basis_size: usize,
}

/// Backward saturation from the targets.
pub fn vas_coverable(v: &Vas) -> CoverResult {
    let sat = saturate(v);
    let chain = sat.chain(&v.initial, vas_leq);
    debug_assert!(sat.is_minimal(vas_leq));
    CoverResult {
        coverable: chain.is_some(),
        certificate: chain.map(|c| c.steps.into_iter().map(|(r, _)| r).collect()),
        basis_size: sat.basis().len(),
    }
}

/// The full saturation, for callers that inspect the basis.
pub fn saturate(v: &Vas) -> Saturation<VasConfig, usize> {
    Saturation::run(
        v.targets.clone(),
        &v.initial,
        vas_leq,
        |c| (0..v.rules.len()).filter_map(|r| Some((r, v.predecessor(c, r)?))).collect(),
        false,
    )
}

/// Where a VAS rule came from in the source machine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleOrigin {
    Read { letter: LetterId, memory: Memory },
    Silent,
}

/// One counter per state, counting values last seen there. Reads decrement
/// the remembered state's counter and increment the target's.
pub fn wcma_to_vas(a: &Cma) -> Result<(Vas, Vec<RuleOrigin>)> {
    a.require_weak()?;
    let n = a.states.len();
    let unit = |i: usize| {
        let mut v = vec![0; n];
        v[i] = 1;
        v
    };
    let mut rules = Vec::new();
    let mut origins = Vec::new();
    for ((q, l, m), ts) in &a.transitions {
        for &t in ts {
            rules.push(VasRule {
                from: *q,
                dec: m.map_or(vec![0; n], unit),
                inc: unit(t),
                to: t,
            });
            origins.push(RuleOrigin::Read {
                letter: *l,
                memory: *m,
            });
        }
    }
    for &(q, t) in &a.silent {
        rules.push(VasRule {
            from: q,
            dec: vec![0; n],
            inc: vec![0; n],
            to: t,
        });
        origins.push(RuleOrigin::Silent);
    }
    let vas = Vas {
        counters: a.states.clone(),
        states: a.states.clone(),
        initial: (a.initial, vec![0; n]),
        rules,
        targets: a.globally_accepting.iter().map(|q| (*q, vec![0; n])).collect(),
    };
    Ok((vas, origins))
}

/// Replays a rule sequence of [`wcma_to_vas`] as a data word, picking any
/// value in the remembered state and a fresh value for ⊥ reads.
pub fn witness_word(a: &Cma, vas: &Vas, origins: &[RuleOrigin], rules: &[usize]) -> DataWord {
    let mut w = DataWord::flat();
    let mut holding: BTreeMap<StateId, Vec<DataValue>> = BTreeMap::new();
    for &r in rules {
        let to = vas.rules[r].to;
        if let RuleOrigin::Read { letter, memory } = &origins[r] {
            let v = match memory {
                None => w.universe.fresh(None).expect("flat universe"),
                Some(p) => holding.get_mut(p).and_then(Vec::pop).expect("certificate replays"),
            };
            holding.entry(to).or_default().push(v);
            w.push(a.alphabet[*letter].clone(), v);
        }
    }
    w
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Emptiness {
    Empty,
    NonEmpty(DataWord),
}

/// Decides emptiness of a weak CMA.
pub fn wcma_empty(a: &Cma) -> Result<Emptiness> {
    let (vas, origins) = wcma_to_vas(a)?;
    let res = vas_coverable(&vas);
    Ok(match res.certificate {
        Some(rules) => Emptiness::NonEmpty(witness_word(a, &vas, &origins, &rules)),
        None => Emptiness::Empty,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    Equivalent,
    /// `witness` is accepted by exactly one side; `left` tells which.
    Inequivalent { witness: DataWord, left: bool },
}

/// Language equivalence of deterministic weak machines, as emptiness of
/// `a ∩ ¬b` and of `b ∩ ¬a`. Partial machines are completed first.
pub fn dwcma_equiv(a: &Cma, b: &Cma) -> Result<Equivalence> {
    let done = |m: &Cma| if m.is_complete() { Ok(m.clone()) } else { m.complete() };
    let (a, b) = (done(a)?, done(b)?);
    for (x, y, left) in [(&a, &b, true), (&b, &a, false)] {
        let diff = x.product(&y.complement()?, BoolMode::Intersection)?;
        if let Emptiness::NonEmpty(witness) = wcma_empty(&diff)? {
            return Ok(Equivalence::Inequivalent { witness, left });
        }
    }
    Ok(Equivalence::Equivalent)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundedVerdict {
    NonEmpty(DataWord),
    /// Nothing found within the bound; says nothing about longer runs.
    UnknownBeyondBound,
}

/// Forward search over configurations with at most `bound` data values and
/// runs of at most `bound` reads; silent moves are free. Values are
/// interchangeable, so a configuration is the control plus how many values
/// sit in each state.
pub fn cma_empty_bounded(a: &Cma, bound: usize) -> BoundedVerdict {
    let n = a.states.len();
    type Abs = (StateId, Vec<u16>);
    #[derive(Clone)]
    enum Move {
        Read(LetterId, Memory, StateId),
        Silent,
    }
    let final_ok = |c: &Abs| {
        a.globally_accepting.contains(&c.0)
            && c.1.iter().enumerate().all(|(s, k)| *k == 0 || a.locally_accepting.contains(&s))
    };
    let init: Abs = (a.initial, vec![0; n]);
    // 0-1 breadth-first search: reads cost one, silent moves nothing
    let mut dist: HashMap<Abs, usize> = HashMap::from([(init.clone(), 0)]);
    let mut parent: HashMap<Abs, Option<(Abs, Move)>> = HashMap::from([(init.clone(), None)]);
    let mut queue = VecDeque::from([(init, 0usize)]);
    let mut found = None;
    while let Some((c, depth)) = queue.pop_front() {
        if dist[&c] < depth {
            continue;
        }
        if final_ok(&c) {
            found = Some(c);
            break;
        }
        let values: usize = c.1.iter().map(|k| *k as usize).sum();
        let mut succ: Vec<(Abs, Move)> = Vec::new();
        for ((q, l, m), ts) in a.transitions.range((c.0, 0, None)..) {
            if *q != c.0 {
                break;
            }
            if depth >= bound {
                break;
            }
            for &t in ts {
                let mut counts = c.1.clone();
                match m {
                    None if values < bound => {}
                    None => continue,
                    Some(p) if counts[*p] > 0 => counts[*p] -= 1,
                    Some(_) => continue,
                }
                counts[t] += 1;
                succ.push(((t, counts), Move::Read(*l, *m, t)));
            }
        }
        for &(q, t) in a.silent.range((c.0, 0)..=(c.0, usize::MAX)) {
            debug_assert_eq!(q, c.0);
            succ.push(((t, c.1.clone()), Move::Silent));
        }
        for (d, mv) in succ {
            let cost = usize::from(matches!(mv, Move::Read(..)));
            if dist.get(&d).is_none_or(|old| depth + cost < *old) {
                dist.insert(d.clone(), depth + cost);
                parent.insert(d.clone(), Some((c.clone(), mv)));
                if cost == 0 {
                    queue.push_front((d, depth));
                } else {
                    queue.push_back((d, depth + 1));
                }
            }
        }
    }
    let Some(mut c) = found else {
        return BoundedVerdict::UnknownBeyondBound;
    };
    let mut moves = Vec::new();
    while let Some(Some((p, mv))) = parent.get(&c) {
        moves.push(mv.clone());
        c = p.clone();
    }
    moves.reverse();
    let mut w = DataWord::flat();
    let mut holding: BTreeMap<StateId, Vec<DataValue>> = BTreeMap::new();
    for mv in moves {
        if let Move::Read(l, m, t) = mv {
            let v = match m {
                None => w.universe.fresh(None).expect("flat universe"),
                Some(p) => holding.get_mut(&p).and_then(Vec::pop).expect("abstract run replays"),
            };
            holding.entry(t).or_default().push(v);
            w.push(a.alphabet[l].clone(), v);
        }
    }
    BoundedVerdict::NonEmpty(w)
}
