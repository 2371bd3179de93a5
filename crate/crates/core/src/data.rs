//! Data universes (flat and nested), data words, class memory functions and bags.
//!
//! A [`Universe`] interns data values. Values compare by identity; the only
//! structure they carry is the parent relation of a nested dataset. The
//! level-0 root that sits above every level-1 value is implicit here (a value
//! without a parent is a child of the root) and explicit in
//! [`crate::tree::LabelledTree`].

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// An interned data value. Equality is identity within one [`Universe`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DataValue(u32);

impl DataValue {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct ValueInfo {
    parent: Option<DataValue>,
    level: usize,
    name: String,
}

/// A forest-structured data universe of bounded level. Level bound 1 is a flat universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Universe {
    bound: usize,
    values: Vec<ValueInfo>,
}

impl Universe {
    pub fn flat() -> Self {
        Self::nested(1)
    }

    pub fn nested(bound: usize) -> Self {
        assert!(bound >= 1, "a universe needs level bound >= 1");
        Universe {
            bound,
            values: Vec::new(),
        }
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = DataValue> + '_ {
        (0..self.values.len() as u32).map(DataValue)
    }

    /// Returns a value never returned before, a child of `parent` (or of the root).
    pub fn fresh(&mut self, parent: Option<DataValue>) -> Result<DataValue> {
        let name = format!("d{}", self.values.len() + 1);
        self.fresh_named(parent, name)
    }

    pub fn fresh_named(&mut self, parent: Option<DataValue>, name: impl Into<String>) -> Result<DataValue> {
        let level = match parent {
            None => 1,
            Some(p) => {
                let pl = self.level(p);
                if pl >= self.bound {
                    return Err(Error::LevelBound(format!(
                        "value `{}` is at the maximum level {}",
                        self.path(p),
                        self.bound
                    )));
                }
                pl + 1
            }
        };
        let id = DataValue(self.values.len() as u32);
        self.values.push(ValueInfo {
            parent,
            level,
            name: name.into(),
        });
        Ok(id)
    }

    pub fn level(&self, v: DataValue) -> usize {
        self.values[v.index()].level
    }

    pub fn parent(&self, v: DataValue) -> Option<DataValue> {
        self.values[v.index()].parent
    }

    pub fn name(&self, v: DataValue) -> &str {
        &self.values[v.index()].name
    }

    /// Ancestor path from the level-1 ancestor down to `v` (inclusive).
    pub fn ancestry(&self, v: DataValue) -> Vec<DataValue> {
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent(cur) {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Slash-separated path of segment names, e.g. `r1/s2`.
    pub fn path(&self, v: DataValue) -> String {
        self.ancestry(v)
            .iter()
            .map(|a| self.name(*a))
            .collect::<Vec<_>>()
            .join("/")
    }

    pub fn child_named(&self, parent: Option<DataValue>, name: &str) -> Option<DataValue> {
        self.values()
            .find(|v| self.parent(*v) == parent && self.name(*v) == name)
    }

    /// Interns a slash path, creating missing segments.
    pub fn intern_path(&mut self, path: &str) -> Result<DataValue> {
        let mut parent = None;
        for seg in path.split('/') {
            if seg.is_empty() {
                return Err(Error::Invariant(format!("empty segment in value path `{path}`")));
            }
            parent = Some(match self.child_named(parent, seg) {
                Some(v) => v,
                None => self.fresh_named(parent, seg)?,
            });
        }
        parent.ok_or_else(|| Error::Invariant("empty value path".into()))
    }

    /// Checks the structural invariants of every value.
    pub fn check(&self) -> Result<()> {
        for v in self.values() {
            let info = &self.values[v.index()];
            match info.parent {
                None if info.level != 1 => {
                    return Err(Error::Invariant(format!("parentless value `{}` has level {}", info.name, info.level)))
                }
                Some(p) if self.level(p) + 1 != info.level => {
                    return Err(Error::Invariant(format!("value `{}` is not one level below its parent", info.name)))
                }
                _ => {}
            }
            if info.level > self.bound {
                return Err(Error::LevelBound(format!("value `{}` exceeds level {}", info.name, self.bound)));
            }
        }
        Ok(())
    }
}

/// One position of a data word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub letter: String,
    pub value: DataValue,
}

/// A finite sequence of (letter, data value) pairs over one universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DataWord {
    pub universe: Universe,
    pub entries: Vec<Entry>,
}

impl DataWord {
    pub fn new(universe: Universe) -> Self {
        DataWord {
            universe,
            entries: Vec::new(),
        }
    }

    pub fn flat() -> Self {
        Self::new(Universe::flat())
    }

    pub fn push(&mut self, letter: impl Into<String>, value: DataValue) {
        self.entries.push(Entry {
            letter: letter.into(),
            value,
        });
    }

    /// Builds a flat word from `(letter, value index)` pairs; equal indices mean equal values.
    pub fn from_indices<S: AsRef<str>>(pairs: &[(S, usize)]) -> Self {
        let mut universe = Universe::flat();
        let mut ids: BTreeMap<usize, DataValue> = BTreeMap::new();
        let mut entries = Vec::new();
        for (letter, idx) in pairs {
            let v = *ids
                .entry(*idx)
                .or_insert_with(|| universe.fresh_named(None, format!("d{idx}")).expect("flat fresh"));
            entries.push(Entry {
                letter: letter.as_ref().to_string(),
                value: v,
            });
        }
        DataWord { universe, entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// String projection.
    pub fn str(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.letter.clone()).collect()
    }

    /// Distinct values in order of first occurrence.
    pub fn distinct_values(&self) -> Vec<DataValue> {
        let mut seen = Vec::new();
        for e in &self.entries {
            if !seen.contains(&e.value) {
                seen.push(e.value);
            }
        }
        seen
    }

    /// Concatenation; values of `other` are identified with values of `self` by path.
    pub fn concat(&self, other: &DataWord) -> Result<DataWord> {
        let mut out = self.clone();
        if other.universe.bound() > out.universe.bound() {
            out.universe.bound = other.universe.bound();
        }
        for e in &other.entries {
            let v = out.universe.intern_path(&other.universe.path(e.value))?;
            out.entries.push(Entry {
                letter: e.letter.clone(),
                value: v,
            });
        }
        Ok(out)
    }
}

/// A word in the tuple presentation: each position carries a letter and a
/// k-tuple of values. Positions agree at level i when their first i components agree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TupleWord {
    pub k: usize,
    pub entries: Vec<(String, Vec<String>)>,
}

impl TupleWord {
    pub fn new(k: usize) -> Self {
        TupleWord { k, entries: Vec::new() }
    }

    pub fn push(&mut self, letter: impl Into<String>, tuple: Vec<String>) -> Result<()> {
        if tuple.len() != self.k {
            return Err(Error::LevelBound(format!("tuple of length {} in a level-{} word", tuple.len(), self.k)));
        }
        self.entries.push((letter.into(), tuple));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A class memory function: finitely many values mapped to states, the rest are ⊥.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassMemory(BTreeMap<DataValue, usize>);

impl ClassMemory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: DataValue) -> Option<usize> {
        self.0.get(&v).copied()
    }

    pub fn set(&mut self, v: DataValue, state: usize) {
        self.0.insert(v, state);
    }

    pub fn with(&self, v: DataValue, state: usize) -> Self {
        let mut m = self.clone();
        m.set(v, state);
        m
    }

    pub fn iter(&self) -> impl Iterator<Item = (DataValue, usize)> + '_ {
        self.0.iter().map(|(v, s)| (*v, *s))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// In nested universes, every mapped value must have a mapped parent.
    pub fn check_parent_mapped(&self, universe: &Universe) -> Result<()> {
        for (v, _) in self.iter() {
            if let Some(p) = universe.parent(v) {
                if self.get(p).is_none() {
                    return Err(Error::Invariant(format!(
                        "`{}` is mapped but its parent `{}` is not",
                        universe.path(v),
                        universe.path(p)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A bag: a counter per data value, zero for all but finitely many.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bag(BTreeMap<DataValue, u64>);

impl Bag {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: DataValue) -> u64 {
        self.0.get(&v).copied().unwrap_or(0)
    }

    pub fn set(&mut self, v: DataValue, n: u64) {
        if n == 0 {
            self.0.remove(&v);
        } else {
            self.0.insert(v, n);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (DataValue, u64)> + '_ {
        self.0.iter().map(|(v, n)| (*v, *n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_values() {
        let mut u = Universe::nested(3);
        let d = u.fresh(None).unwrap();
        assert_eq!(u.level(d), 1);
        let c1 = u.fresh(Some(d)).unwrap();
        let c2 = u.fresh(Some(d)).unwrap();
        assert_ne!(c1, c2);
        assert_eq!(u.parent(c1), Some(d));
        let d3 = u.fresh(Some(c1)).unwrap();
        assert_eq!(u.level(d3), 3);
        assert!(matches!(u.fresh(Some(d3)), Err(Error::LevelBound(_))));
        u.check().unwrap();
    }

    #[test]
    fn paths_intern_once() {
        let mut u = Universe::nested(3);
        let a = u.intern_path("r1/s2/t3").unwrap();
        let b = u.intern_path("r1/s2/t3").unwrap();
        assert_eq!(a, b);
        assert_eq!(u.len(), 3);
        assert_eq!(u.path(a), "r1/s2/t3");
        assert!(u.intern_path("r1/s2/t3/u4").is_err());
    }

    #[test]
    fn memory_parent_invariant() {
        let mut u = Universe::nested(2);
        let d = u.fresh(None).unwrap();
        let c = u.fresh(Some(d)).unwrap();
        let m = ClassMemory::new().with(c, 0);
        assert!(m.check_parent_mapped(&u).is_err());
        assert!(m.with(d, 1).check_parent_mapped(&u).is_ok());
    }

    #[test]
    fn bag_stores_positive_counts_only() {
        let mut u = Universe::flat();
        let d = u.fresh(None).unwrap();
        let mut b = Bag::new();
        b.set(d, 3);
        b.set(d, 0);
        assert_eq!(b.iter().count(), 0);
        assert_eq!(b.get(d), 0);
    }
}
