//! Labelled trees: the shape of a class memory function over a nested dataset.
//!
//! Children are kept sorted, so the derived ordering is a canonical code and
//! structural equality is isomorphism.

use crate::data::{ClassMemory, Universe};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeNode {
    pub label: usize,
    pub children: Vec<TreeNode>,
}

impl TreeNode {
    pub fn leaf(label: usize) -> Self {
        TreeNode {
            label,
            children: Vec::new(),
        }
    }

    pub fn with_children(label: usize, mut children: Vec<TreeNode>) -> Self {
        children.sort();
        TreeNode { label, children }
    }

    fn canonicalize(&mut self) {
        for c in &mut self.children {
            c.canonicalize();
        }
        self.children.sort();
    }

    fn count(&self) -> usize {
        1 + self.children.iter().map(TreeNode::count).sum::<usize>()
    }

    fn height(&self) -> usize {
        1 + self.children.iter().map(TreeNode::height).max().unwrap_or(0)
    }

    fn render(&self, names: &dyn Fn(usize) -> String, out: &mut String) {
        out.push_str(&names(self.label));
        render_children(&self.children, names, out);
    }
}

fn render_children(children: &[TreeNode], names: &dyn Fn(usize) -> String, out: &mut String) {
    if children.is_empty() {
        return;
    }
    out.push('[');
    for (i, c) in children.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        c.render(names, out);
    }
    out.push(']');
}

/// A rooted unordered tree whose root carries the distinguished root label
/// and whose other nodes carry states.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelledTree {
    pub children: Vec<TreeNode>,
}

impl LabelledTree {
    pub fn root_only() -> Self {
        Self::default()
    }

    pub fn from_children(children: Vec<TreeNode>) -> Self {
        let mut t = LabelledTree { children };
        t.canonicalize();
        t
    }

    pub fn canonicalize(&mut self) {
        for c in &mut self.children {
            c.canonicalize();
        }
        self.children.sort();
    }

    /// Number of nodes including the root.
    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(TreeNode::count).sum::<usize>()
    }

    /// Every non-root label, with repetition.
    pub fn labels(&self) -> Vec<usize> {
        fn walk(n: &TreeNode, out: &mut Vec<usize>) {
            out.push(n.label);
            n.children.iter().for_each(|c| walk(c, out));
        }
        let mut out = Vec::new();
        self.children.iter().for_each(|c| walk(c, &mut out));
        out
    }

    /// Depth counted in nodes; the root-only tree has depth 1.
    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(TreeNode::height).max().unwrap_or(0)
    }

    pub fn render(&self, names: &dyn Fn(usize) -> String) -> String {
        let mut out = String::from("*");
        render_children(&self.children, names, &mut out);
        out
    }

    /// Injective, root-, parent- and label-preserving embedding into `other`.
    pub fn embeds_into(&self, other: &LabelledTree) -> bool {
        children_embed(&self.children, &other.children)
    }

    fn node_mut(&mut self, path: &[usize]) -> &mut TreeNode {
        let mut node = &mut self.children[path[0]];
        for &i in &path[1..] {
            node = &mut node.children[i];
        }
        node
    }

    fn children_at_mut(&mut self, path: &[usize]) -> &mut Vec<TreeNode> {
        if path.is_empty() {
            &mut self.children
        } else {
            &mut self.node_mut(path).children
        }
    }

    fn children_at(&self, path: &[usize]) -> &[TreeNode] {
        let mut children = &self.children[..];
        for &i in path {
            children = &children[i].children;
        }
        children
    }

    /// Downward root paths (as child-index sequences) whose labels are exactly `labels`.
    /// Among identical sibling subtrees only the first is used.
    pub fn paths_labelled(&self, labels: &[usize]) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        collect_paths(&self.children, labels, &mut cur, &mut out);
        out
    }

    /// Successor trees after reading a value whose ancestor path (top-down)
    /// carries `guard`, writing `targets[j]` to the level-(j+1) node.
    pub fn apply_read(&self, guard: &[Option<usize>], targets: &[usize]) -> Vec<LabelledTree> {
        debug_assert_eq!(guard.len(), targets.len());
        let known = guard.iter().take_while(|g| g.is_some()).count();
        if guard[known..].iter().any(Option::is_some) {
            return Vec::new();
        }
        let labels: Vec<usize> = guard[..known].iter().map(|g| g.unwrap()).collect();
        let mut out: Vec<LabelledTree> = Vec::new();
        for path in self.paths_labelled(&labels) {
            let mut t = self.clone();
            for j in 0..known {
                t.node_mut(&path[..=j]).label = targets[j];
            }
            if known < guard.len() {
                let mut chain: Option<TreeNode> = None;
                for &lab in targets[known..].iter().rev() {
                    chain = Some(TreeNode {
                        label: lab,
                        children: chain.into_iter().collect(),
                    });
                }
                t.children_at_mut(&path).push(chain.unwrap());
            }
            t.canonicalize();
            if !out.contains(&t) {
                out.push(t);
            }
        }
        out
    }

    /// Basis of the trees from which a read with `guard`, writing `target`
    /// along the whole path, yields a tree above `self`.
    ///
    /// Path lengths run from 0 (the read touches no node of `self`) up to the
    /// read level; a node that was fresh before the read may only have the
    /// path continuation as a child.
    pub fn read_predecessors(&self, guard: &[Option<usize>], target: usize) -> Vec<LabelledTree> {
        let level = guard.len();
        let known = guard.iter().take_while(|g| g.is_some()).count();
        if guard[known..].iter().any(Option::is_some) {
            return Vec::new();
        }
        let mut out: Vec<LabelledTree> = Vec::new();
        let mut push = |t: LabelledTree| {
            if !out.contains(&t) {
                out.push(t);
            }
        };
        for len in 0..=level {
            let labels = vec![target; len];
            let paths = if len == 0 { vec![vec![]] } else { self.paths_labelled(&labels) };
            for path in paths {
                let mut t = self.clone();
                if len <= known {
                    for j in 0..len {
                        t.node_mut(&path[..=j]).label = guard[j].unwrap();
                    }
                    if len < known {
                        let mut chain: Option<TreeNode> = None;
                        for g in guard[len..known].iter().rev() {
                            chain = Some(TreeNode {
                                label: g.unwrap(),
                                children: chain.into_iter().collect(),
                            });
                        }
                        t.children_at_mut(&path).push(chain.unwrap());
                    }
                } else {
                    // Path nodes below `known` were fresh before the read: they
                    // may have no children besides the path itself.
                    let ok = (known..len).all(|j| {
                        let kids = self.children_at(&path[..=j]);
                        if j + 1 < len {
                            kids.len() == 1
                        } else {
                            kids.is_empty()
                        }
                    });
                    if !ok {
                        continue;
                    }
                    for j in 0..known {
                        t.node_mut(&path[..=j]).label = guard[j].unwrap();
                    }
                    let siblings = t.children_at_mut(&path[..known]);
                    siblings.remove(path[known]);
                }
                t.canonicalize();
                push(t);
            }
        }
        out
    }
}

fn collect_paths(children: &[TreeNode], labels: &[usize], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if labels.is_empty() {
        out.push(cur.clone());
        return;
    }
    for (i, c) in children.iter().enumerate() {
        if c.label != labels[0] || (i > 0 && children[i - 1] == *c) {
            continue;
        }
        cur.push(i);
        collect_paths(&c.children, &labels[1..], cur, out);
        cur.pop();
    }
}

fn node_embeds(a: &TreeNode, b: &TreeNode) -> bool {
    a.label == b.label && children_embed(&a.children, &b.children)
}

/// Bipartite matching of `small` children onto distinct `big` children.
fn children_embed(small: &[TreeNode], big: &[TreeNode]) -> bool {
    if small.len() > big.len() {
        return false;
    }
    match small {
        [] => return true,
        [a] => return big.iter().any(|b| node_embeds(a, b)),
        [a, b] => {
            // two children: try both assignments without building the matching
            return big.iter().enumerate().any(|(i, x)| {
                node_embeds(a, x) && big.iter().enumerate().any(|(j, y)| i != j && node_embeds(b, y))
            });
        }
        _ => {}
    }
    let compat: Vec<Vec<usize>> = small
        .iter()
        .map(|s| (0..big.len()).filter(|&j| node_embeds(s, &big[j])).collect())
        .collect();
    if compat.iter().any(Vec::is_empty) {
        return false;
    }
    let mut owner: Vec<Option<usize>> = vec![None; big.len()];
    for i in 0..small.len() {
        let mut seen = vec![false; big.len()];
        if !augment(i, &compat, &mut owner, &mut seen) {
            return false;
        }
    }
    true
}

fn augment(i: usize, compat: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &j in &compat[i] {
        if seen[j] {
            continue;
        }
        seen[j] = true;
        if owner[j].is_none() || augment(owner[j].unwrap(), compat, owner, seen) {
            owner[j] = Some(i);
            return true;
        }
    }
    false
}

/// The tree of all mapped values under an explicit level-0 root, labelled by `f`.
pub fn canonical_tree(f: &ClassMemory, universe: &Universe) -> Result<LabelledTree> {
    f.check_parent_mapped(universe)?;
    fn build(parent: Option<crate::data::DataValue>, f: &ClassMemory, u: &Universe) -> Vec<TreeNode> {
        f.iter()
            .filter(|(v, _)| u.parent(*v) == parent)
            .map(|(v, s)| TreeNode {
                label: s,
                children: build(Some(v), f, u),
            })
            .collect()
    }
    let t = LabelledTree::from_children(build(None, f, universe));
    if t.depth() > universe.bound() + 1 {
        return Err(Error::LevelBound(format!("tree depth {} exceeds {}", t.depth(), universe.bound() + 1)));
    }
    Ok(t)
}
