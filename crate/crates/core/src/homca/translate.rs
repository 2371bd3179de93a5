//! Translations between the two HOMCA variants, and between the restricted
//! variant and nested-data CMA (via the string projection).

use std::collections::{BTreeSet, HashMap, VecDeque};

use super::{Homca, HomcaOp, SymbolId, Variant};
use crate::cma::StateId;
use crate::error::{Error, Result};
use crate::ndcma::{Guard, Ndcma, SugaredNdcma};

/// `base`, or `base` prefixed with underscores until it is not taken.
fn unique(taken: &[String], base: &str) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.insert(0, '_');
    }
    name
}

fn slot_set_name(d: u32) -> String {
    let items: Vec<String> = (0..32).filter(|i| d >> i & 1 == 1).map(|i| (i + 1).to_string()).collect();
    items.join("+")
}

struct Builder {
    out: Homca,
    index: HashMap<String, StateId>,
    fresh: usize,
}

impl Builder {
    fn new(level: usize, alphabet: Vec<String>, symbols: Vec<String>, variant: Variant, weak: bool) -> Self {
        let mut out = Homca::new(level, Vec::<String>::new(), alphabet, symbols, variant);
        out.weak = weak;
        Builder {
            out,
            index: HashMap::new(),
            fresh: 0,
        }
    }

    fn state(&mut self, name: String) -> StateId {
        if let Some(&i) = self.index.get(&name) {
            return i;
        }
        self.out.states.push(name.clone());
        self.index.insert(name, self.out.states.len() - 1);
        self.out.states.len() - 1
    }

    fn fresh(&mut self, base: &str) -> StateId {
        loop {
            self.fresh += 1;
            let name = format!("{base}~{}", self.fresh);
            if !self.index.contains_key(&name) {
                return self.state(name);
            }
        }
    }

    /// `ops` in sequence; only the first carries `letter`.
    fn chain(&mut self, from: StateId, letter: Option<usize>, ops: &[HomcaOp], to: StateId) {
        let base = self.out.states[from].clone();
        let mut cur = from;
        for (i, op) in ops.iter().enumerate() {
            let next = if i + 1 == ops.len() { to } else { self.fresh(&base) };
            self.out.add(cur, if i == 0 { letter } else { None }, *op, next);
            cur = next;
        }
    }
}

fn require_variant(m: &Homca, v: Variant) -> Result<()> {
    m.validate()?;
    if m.variant != v {
        return Err(Error::Unsupported(format!("expected a {v} machine, got {}", m.variant)));
    }
    Ok(())
}

/// Runs the restricted machine as an ordinary one, tracking the defined
/// slots in the control so the extra enabling conditions can be checked.
pub fn homca_prime_to_homca(m: &Homca) -> Result<Homca> {
    require_variant(m, Variant::HomcaPrime)?;
    let k = m.level;
    let bit = |i: usize| 1u32 << (i - 1);
    let has = |d: u32, i: usize| d & bit(i) != 0;
    let mut b = Builder::new(k, m.alphabet.clone(), m.symbols.clone(), Variant::Homca, m.weak);
    let name = |q: StateId, d: u32| format!("<{}|{}>", m.states[q], slot_set_name(d));
    let start = b.state(name(m.initial, 0));
    b.out.initial = start;
    let mut seen = BTreeSet::from([(m.initial, 0u32)]);
    let mut queue = VecDeque::from([(m.initial, 0u32)]);
    while let Some((q, d)) = queue.pop_front() {
        let src = b.state(name(q, d));
        if m.accepting.contains(&q) {
            b.out.accepting.insert(src);
        }
        for t in m.transitions.iter().filter(|t| t.from == q) {
            let next = match t.op {
                HomcaOp::New(i) => {
                    let ok = !has(d, i) && (i + 1..=k).all(|j| has(d, j)) && (1..i).all(|j| !has(d, j));
                    ok.then_some(d | bit(i))
                }
                HomcaOp::Inc(_) | HomcaOp::Dec(_) => has(d, 1).then_some(d),
                HomcaOp::Store(i) => {
                    let ok = has(d, i) && has(d, i + 1) && (1..i).all(|j| !has(d, j));
                    ok.then_some(d & !bit(i))
                }
                HomcaOp::Load(i) => {
                    let ok = (1..=i).all(|j| !has(d, j)) && has(d, i + 1);
                    ok.then_some(d | bit(i))
                }
            };
            let Some(d2) = next else { continue };
            let dst = b.state(name(t.to, d2));
            b.out.add(src, t.letter, t.op, dst);
            if seen.insert((t.to, d2)) {
                queue.push_back((t.to, d2));
            }
        }
    }
    Ok(b.out)
}

/// Marker symbols used by [`homca_to_homca_prime`].
struct Tags {
    active: Vec<SymbolId>,
    mf: [SymbolId; 2],
    mt: [SymbolId; 2],
    inactive: SymbolId,
}

fn check(tag: SymbolId, g: usize) -> Vec<HomcaOp> {
    let mut ops: Vec<HomcaOp> = (1..g).rev().map(HomcaOp::Load).collect();
    ops.extend([HomcaOp::Dec(tag), HomcaOp::Inc(tag)]);
    ops.extend((1..g).map(HomcaOp::Store));
    ops
}

/// Ops that put the marker `{active_g}^{g-1}` into a just created `m_g`.
fn populate(tags: &Tags, g: usize) -> Vec<HomcaOp> {
    let mut ops: Vec<HomcaOp> = (1..g).rev().map(HomcaOp::New).collect();
    ops.push(HomcaOp::Inc(tags.active[g - 1]));
    ops.extend((1..g).map(HomcaOp::Store));
    ops
}

/// Restricted machine for an unrestricted one of level at most 3.
///
/// Every multiset carries an activity marker, checked after each load. A
/// slot defined in the simulated run is real; slots the restricted run needs
/// defined but the simulated one has undefined are ghosts, which the control
/// tracks. A `store_2` with `m_1` open copies `m_1` element by element under
/// a fresh ghost `m_2`. Strong machines end in a cleanup state that may only
/// remove markers.
pub fn homca_to_homca_prime(m: &Homca) -> Result<Homca> {
    require_variant(m, Variant::Homca)?;
    let k = m.level;
    if k > 3 {
        return Err(Error::LevelBound(format!("level {k}: only levels up to 3 are supported")));
    }
    let mut symbols = m.symbols.clone();
    let mut add = |base: String| {
        let name = unique(&symbols, &base);
        symbols.push(name);
        symbols.len() - 1
    };
    let active: Vec<SymbolId> = (1..=k).map(|g| add(format!("active.{g}"))).collect();
    let (mf, mt, inactive) = if k == 3 {
        (
            [add("mf.1".into()), add("mf.2".into())],
            [add("mt.1".into()), add("mt.2".into())],
            add("inactive.1".into()),
        )
    } else {
        ([0; 2], [0; 2], 0)
    };
    let tags = Tags {
        active,
        mf,
        mt,
        inactive,
    };
    let tag_ids: Vec<SymbolId> = (m.symbols.len()..symbols.len()).collect();
    let originals = m.symbols.len();

    let bit = |i: usize| 1u32 << (i - 1);
    let has = |d: u32, i: usize| d & bit(i) != 0;
    let low = |d: u32| if d == 0 { k + 1 } else { d.trailing_zeros() as usize + 1 };
    let name = |q: StateId, d: u32| format!("<{}|{}>", m.states[q], slot_set_name(d));

    let mut b = Builder::new(k, m.alphabet.clone(), symbols, Variant::HomcaPrime, m.weak);
    let start = b.state(name(m.initial, 0));
    b.out.initial = start;
    let clean = (!m.weak).then(|| {
        // simulated states are bracketed, so the name is free
        let c = b.state("clean".into());
        for &t in &tag_ids {
            b.out.add(c, None, HomcaOp::Dec(t), c);
        }
        for i in 1..k {
            b.out.add(c, None, HomcaOp::Load(i), c);
            b.out.add(c, None, HomcaOp::Store(i), c);
        }
        b.out.accepting.insert(c);
        c
    });

    let mut seen = BTreeSet::from([(m.initial, 0u32)]);
    let mut queue = VecDeque::from([(m.initial, 0u32)]);
    while let Some((q, d)) = queue.pop_front() {
        let src = b.state(name(q, d));
        let c = low(d);
        if m.accepting.contains(&q) {
            match clean {
                None => {
                    b.out.accepting.insert(src);
                }
                Some(cl) => {
                    let entry = if d == 0 { vec![HomcaOp::New(k)] } else { check(tags.active[c - 1], c) };
                    b.chain(src, None, &entry, cl);
                }
            }
        }
        for t in m.transitions.iter().filter(|t| t.from == q) {
            let (ops, d2) = match t.op {
                HomcaOp::Inc(_) | HomcaOp::Dec(_) if has(d, 1) => (vec![t.op], d),
                HomcaOp::New(i) if !has(d, i) => {
                    if i > c {
                        // the slot is a ghost already; only the control changes
                        (check(tags.active[c - 1], c), d | bit(i))
                    } else {
                        let mut ops = Vec::new();
                        for g in (i..c).rev() {
                            ops.push(HomcaOp::New(g));
                            ops.extend(populate(&tags, g));
                        }
                        (ops, d | bit(i))
                    }
                }
                HomcaOp::Load(i) if (1..=i).all(|j| !has(d, j)) && has(d, i + 1) => {
                    let mut ops = vec![HomcaOp::Load(i)];
                    ops.extend(check(tags.active[i - 1], i));
                    (ops, d | bit(i))
                }
                HomcaOp::Store(i) if has(d, i) && has(d, i + 1) => {
                    if c == i {
                        (vec![t.op], d & !bit(i))
                    } else {
                        debug_assert!(k == 3 && i == 2 && c == 1);
                        let target = b.state(name(t.to, d & !bit(i)));
                        copy_gadget(&mut b, &tags, originals, src, t.letter, target);
                        if seen.insert((t.to, d & !bit(i))) {
                            queue.push_back((t.to, d & !bit(i)));
                        }
                        continue;
                    }
                }
                _ => continue,
            };
            let dst = b.state(name(t.to, d2));
            b.chain(src, t.letter, &ops, dst);
            if seen.insert((t.to, d2)) {
                queue.push_back((t.to, d2));
            }
        }
    }
    Ok(b.out)
}

/// `store_2` at level 3 with `m_1` open: after it, `m_1` is a copy of the old
/// one sitting under a ghost `m_2`, and the old one is left inactive.
fn copy_gadget(b: &mut Builder, tags: &Tags, originals: usize, src: StateId, letter: Option<usize>, to: StateId) {
    use HomcaOp::*;
    let [mf1, mf2] = tags.mf;
    let [mt1, mt2] = tags.mt;
    let (act1, act2) = (tags.active[0], tags.active[1]);
    let to_from = |ops: &mut Vec<HomcaOp>| {
        ops.extend([Store(1), Store(2), Load(2)]);
        ops.extend(check(mf2, 2));
        ops.push(Load(1));
        ops.extend(check(mf1, 1));
    };
    let mut pre = vec![Dec(act1), Inc(mf1), Store(1)];
    pre.extend([Load(1), Dec(act2), Inc(mf2), Store(1)]);
    pre.extend([Store(2), New(2), New(1), Inc(mt2), Store(1)]);
    pre.extend([New(1), Inc(mt1)]);
    to_from(&mut pre);
    let hub_name = format!("{}~copy", b.out.states[src]);
    let hub = b.fresh(&hub_name);
    b.chain(src, letter, &pre, hub);
    for g in 0..originals {
        let mut ops = vec![Dec(g), Store(1), Store(2), Load(2)];
        ops.extend(check(mt2, 2));
        ops.push(Load(1));
        ops.extend(check(mt1, 1));
        ops.push(Inc(g));
        to_from(&mut ops);
        b.chain(hub, None, &ops, hub);
    }
    let exit = [
        Dec(mf1),
        Inc(tags.inactive),
        Store(1),
        Load(1),
        Dec(mf2),
        Inc(act2),
        Store(1),
        Store(2),
        Load(2),
        Load(1),
        Dec(mt2),
        Inc(act2),
        Store(1),
        Load(1),
        Dec(mt1),
        Inc(act1),
    ];
    b.chain(hub, None, &exit, to);
}

/// Restricted machine for the string projection of a plain nested-data CMA.
///
/// The root is `m_k`; a level-j value is a level-(k-j) multiset whose state
/// sits as the symbol `s@j` in a level-1 multiset below it, and a level-k
/// value is just its symbol. A read opens the path from the root, checking
/// and rewriting each state, then stores everything back.
pub fn ndcma_to_homca_prime(a: &Ndcma) -> Result<Homca> {
    a.validate()?;
    let k = a.level;
    let weak = a.is_weak();
    let mut symbols: Vec<String> = Vec::new();
    for s in &a.states {
        for j in 1..=k {
            symbols.push(format!("{s}@{j}"));
        }
    }
    let sym = |s: StateId, j: usize| s * k + (j - 1);
    let done = (!weak && k == 1).then(|| {
        symbols.push(unique(&symbols, "done"));
        symbols.len() - 1
    });
    let mut b = Builder::new(k, a.alphabet.clone(), symbols, Variant::HomcaPrime, weak);
    for s in &a.states {
        b.state(s.clone());
    }
    let init = b.state(unique(&a.states, "init"));
    b.out.initial = init;
    b.chain(init, None, &[HomcaOp::New(k)], a.initial);
    for ((p, letter, guard), targets) in &a.transitions {
        for &q in targets {
            let ops = read_ops(guard, q, k, &sym);
            b.chain(*p, *letter, &ops, q);
        }
    }
    b.out.accepting = a.globally_accepting.clone();
    if !weak {
        let mut taken = a.states.clone();
        taken.push(b.out.states[init].clone());
        let fin = b.state(unique(&taken, "final"));
        let entry = match done {
            Some(d) => HomcaOp::Inc(d),
            None => HomcaOp::New(k - 1),
        };
        for &q in &a.globally_accepting {
            b.out.add(q, None, entry, fin);
        }
        for i in 1..k {
            b.out.add(fin, None, HomcaOp::Load(i), fin);
            b.out.add(fin, None, HomcaOp::Store(i), fin);
        }
        for &s in &a.locally_accepting {
            for j in 1..=k {
                b.out.add(fin, None, HomcaOp::Dec(sym(s, j)), fin);
            }
        }
        if let Some(d) = done {
            b.out.add(fin, None, HomcaOp::Dec(d), fin);
        }
        b.out.accepting.insert(fin);
    }
    Ok(b.out)
}

fn read_ops(guard: &Guard, q: StateId, k: usize, sym: &impl Fn(StateId, usize) -> SymbolId) -> Vec<HomcaOp> {
    let i = guard.len();
    let mut ops = Vec::new();
    for (j, p) in (1..=i).zip(guard) {
        if j < k {
            let top = k - j;
            match p {
                Some(p) => {
                    ops.extend((1..=top).rev().map(HomcaOp::Load));
                    ops.push(HomcaOp::Dec(sym(*p, j)));
                }
                None => ops.extend((1..=top).rev().map(HomcaOp::New)),
            }
            ops.push(HomcaOp::Inc(sym(q, j)));
            ops.extend((1..top).map(HomcaOp::Store));
        } else {
            if let Some(p) = p {
                ops.push(HomcaOp::Dec(sym(*p, k)));
            }
            ops.push(HomcaOp::Inc(sym(q, k)));
        }
    }
    ops.extend((k.saturating_sub(i).max(1)..k).map(HomcaOp::Store));
    ops
}

/// Sugared nested-data CMA whose string projection is the language of a
/// restricted machine. The root remembers the lowest defined slot; active
/// multisets are values in `open`, stored ones in `closed`, and symbols are
/// level-k values remembering the symbol until decremented into `dead`.
pub fn homca_prime_to_ndcma(m: &Homca) -> Result<SugaredNdcma> {
    require_variant(m, Variant::HomcaPrime)?;
    let k = m.level;
    let mut states = m.states.clone();
    let mut add = |base: String| {
        let name = unique(&states, &base);
        states.push(name);
        states.len() - 1
    };
    let sym0 = m.states.len();
    for a in &m.symbols {
        add(format!("@{a}"));
    }
    let lv: Vec<StateId> = (1..=k).map(|i| add(format!("lv{i}"))).collect();
    let open = add("open".into());
    let closed = add("closed".into());
    let dead = add("dead".into());
    let lvl = |i: usize| lv[i - 1];

    let mut out = SugaredNdcma::new(k, states, m.alphabet.clone(), m.initial);
    out.globally_accepting = m.accepting.clone();
    if !m.weak {
        out.locally_accepting = lv.iter().copied().chain([open, closed, dead]).chain(m.accepting.iter().copied()).collect();
    }
    for t in &m.transitions {
        // (root guard, root target, last guard, last target, read level)
        let (g0, t0, gi, ti, i) = match t.op {
            HomcaOp::New(j) if j == k => (None, lvl(k), None, dead, 1),
            HomcaOp::New(j) => (Some(lvl(j + 1)), lvl(j), None, open, k - j),
            HomcaOp::Inc(a) => (Some(lvl(1)), lvl(1), None, sym0 + a, k),
            HomcaOp::Dec(a) => (Some(lvl(1)), lvl(1), Some(sym0 + a), dead, k),
            HomcaOp::Load(j) => (Some(lvl(j + 1)), lvl(j), Some(closed), open, k - j),
            HomcaOp::Store(j) => (Some(lvl(j)), lvl(j + 1), Some(open), closed, k - j),
        };
        let mut guard = vec![g0];
        let mut targets = vec![t0];
        for _ in 1..i {
            guard.push(Some(open));
            targets.push(open);
        }
        guard.push(gi);
        targets.push(ti);
        out.add_transition(t.from, t.letter, guard, t.to, targets);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn read_ops_level_two() {
        let sym = |s: StateId, j: usize| s * 2 + (j - 1);
        let ops = read_ops(&vec![Some(0), None], 1, 2, &sym);
        use HomcaOp::*;
        assert_eq!(ops, vec![Load(1), Dec(0), Inc(2), Inc(3), Store(1)]);
        let ops = read_ops(&vec![None], 1, 2, &sym);
        assert_eq!(ops, vec![New(1), Inc(2), Store(1)]);
    }

    #[test]
    fn wrong_variant_is_refused() {
        let m = Homca::new(1, ["q"], ["a"], ["x"], Variant::Homca);
        assert!(homca_prime_to_homca(&m).is_err());
        assert!(homca_to_homca_prime(&m).is_ok());
    }
}
