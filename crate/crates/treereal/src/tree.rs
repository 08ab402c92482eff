//! Rooted k-ary trees and their node attributes.
//!
//! Trees are stored arena-style: a flat vector of nodes with parent and
//! child links, plus the arity bound `k`. Children are kept in order so
//! that binary trees can distinguish left from right (needed for inorder
//! ranks and DOT output); attribute multisets never depend on that order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Which side a lone child of a binary node sits on. A node with two
/// children needs no tag: `children[0]` is left, `children[1]` right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    Left,
    Right,
}

/// Node attributes that can be asked about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AttributeKind {
    Size,
    Height,
    Depth,
    InorderRank,
}

/// Attribute values for one node, with absent fields for kinds that were
/// not requested. Ordering is derived so vectors of records can be sorted
/// into canonical multisets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct AttributeRecord {
    pub size: Option<u64>,
    pub height: Option<u64>,
    pub depth: Option<u64>,
    pub itr: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeRecord {
    pub children: Vec<usize>,
    pub parent: Option<usize>,
    /// Left/right tag for a lone child of a binary node.
    pub slot: Option<Slot>,
}

/// A rooted tree with at most `k` children per node. Node indices are
/// dense `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    k: usize,
    root: usize,
    nodes: Vec<NodeRecord>,
}

impl RootedTree {
    /// A single-node tree with arity bound `k`.
    pub fn single(k: usize) -> Self {
        RootedTree {
            k,
            root: 0,
            nodes: vec![NodeRecord {
                children: Vec::new(),
                parent: None,
                slot: None,
            }],
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: usize) -> &NodeRecord {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[NodeRecord] {
        &self.nodes
    }

    /// Appends a new leaf under `parent` and returns its index.
    pub fn add_child(&mut self, parent: usize) -> Result<usize> {
        self.add_child_tagged(parent, None)
    }

    /// Appends a new leaf under `parent` with an explicit left/right tag.
    pub fn add_child_slotted(&mut self, parent: usize, slot: Slot) -> Result<usize> {
        self.add_child_tagged(parent, Some(slot))
    }

    fn add_child_tagged(&mut self, parent: usize, slot: Option<Slot>) -> Result<usize> {
        if parent >= self.nodes.len() {
            return Err(Error::InvalidInput(format!("no such node {parent}")));
        }
        if self.nodes[parent].children.len() >= self.k {
            return Err(Error::InvalidInput(format!(
                "node {parent} already has {} children (k = {})",
                self.nodes[parent].children.len(),
                self.k
            )));
        }
        let id = self.nodes.len();
        self.nodes.push(NodeRecord {
            children: Vec::new(),
            parent: Some(parent),
            slot,
        });
        self.nodes[parent].children.push(id);
        Ok(id)
    }

    /// Sets the left/right tag of a node (meaningful for lone children
    /// of binary nodes).
    pub fn set_slot(&mut self, node: usize, slot: Slot) {
        self.nodes[node].slot = Some(slot);
    }

    /// Checks the structural invariants: one root, parent/child links
    /// consistent, at most `k` children everywhere, all nodes reachable.
    pub fn validate(&self) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::InvalidInput("empty tree".into()));
        }
        if self.k == 0 {
            return Err(Error::InvalidInput("arity bound must be positive".into()));
        }
        if self.root >= self.nodes.len() {
            return Err(Error::InvalidInput("root index out of range".into()));
        }
        if self.nodes[self.root].parent.is_some() {
            return Err(Error::InvalidInput("root has a parent".into()));
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![self.root];
        seen[self.root] = true;
        while let Some(u) = stack.pop() {
            let node = &self.nodes[u];
            if node.children.len() > self.k {
                return Err(Error::InvalidInput(format!(
                    "node {u} has {} children, k = {}",
                    node.children.len(),
                    self.k
                )));
            }
            for &c in &node.children {
                if c >= self.nodes.len() {
                    return Err(Error::InvalidInput(format!("child index {c} out of range")));
                }
                if self.nodes[c].parent != Some(u) {
                    return Err(Error::InvalidInput(format!(
                        "parent link of {c} does not match"
                    )));
                }
                if seen[c] {
                    return Err(Error::InvalidInput(format!("node {c} reached twice")));
                }
                seen[c] = true;
                stack.push(c);
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::InvalidInput("unreachable nodes present".into()));
        }
        Ok(())
    }

    /// Node order with every parent before its children.
    fn top_down_order(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root];
        while let Some(u) = stack.pop() {
            order.push(u);
            for &c in &self.nodes[u].children {
                stack.push(c);
            }
        }
        order
    }

    /// Subtree size of every node, indexed by node id.
    pub fn sizes(&self) -> Vec<u64> {
        let order = self.top_down_order();
        let mut sizes = vec![1u64; self.nodes.len()];
        for &u in order.iter().rev() {
            for &c in &self.nodes[u].children {
                sizes[u] += sizes[c];
            }
        }
        sizes
    }

    /// Height of every node: 0 for leaves, 1 + max child height otherwise.
    pub fn heights(&self) -> Vec<u64> {
        let order = self.top_down_order();
        let mut heights = vec![0u64; self.nodes.len()];
        for &u in order.iter().rev() {
            for &c in &self.nodes[u].children {
                heights[u] = heights[u].max(heights[c] + 1);
            }
        }
        heights
    }

    /// Depth of every node: edge count from the root.
    pub fn depths(&self) -> Vec<u64> {
        let mut depths = vec![0u64; self.nodes.len()];
        for u in self.top_down_order() {
            for &c in &self.nodes[u].children {
                depths[c] = depths[u] + 1;
            }
        }
        depths
    }

    /// Left and right child of a binary node, resolving the slot tag for
    /// lone children.
    fn binary_children(&self, u: usize) -> Result<(Option<usize>, Option<usize>)> {
        let node = &self.nodes[u];
        match node.children.len() {
            0 => Ok((None, None)),
            1 => {
                let c = node.children[0];
                match self.nodes[c].slot {
                    Some(Slot::Left) => Ok((Some(c), None)),
                    Some(Slot::Right) => Ok((None, Some(c))),
                    None => Err(Error::InvalidInput(format!(
                        "lone child {c} has no left/right tag"
                    ))),
                }
            }
            2 => Ok((Some(node.children[0]), Some(node.children[1]))),
            n => Err(Error::InvalidInput(format!(
                "node {u} has {n} children in a binary tree"
            ))),
        }
    }

    /// 1-based inorder traversal ranks, indexed by node id. Binary trees
    /// only; lone children must carry a left/right tag.
    pub fn inorder_ranks(&self) -> Result<Vec<u64>> {
        if self.k != 2 {
            return Err(Error::UnsupportedQuery(format!(
                "inorder ranks are defined for k = 2, got k = {}",
                self.k
            )));
        }
        let mut ranks = vec![0u64; self.nodes.len()];
        let mut next = 1u64;
        // iterative inorder, safe for path-shaped trees
        let mut stack: Vec<(usize, bool)> = vec![(self.root, false)];
        while let Some((u, expanded)) = stack.pop() {
            let (left, right) = self.binary_children(u)?;
            if expanded {
                ranks[u] = next;
                next += 1;
                if let Some(r) = right {
                    stack.push((r, false));
                }
            } else {
                stack.push((u, true));
                if let Some(l) = left {
                    stack.push((l, false));
                }
            }
        }
        Ok(ranks)
    }

    /// One attribute record per node (node identity erased: treat the
    /// result as a multiset).
    pub fn compute_attributes(&self, kinds: &[AttributeKind]) -> Result<Vec<AttributeRecord>> {
        let want = |k: AttributeKind| kinds.contains(&k);
        if kinds.is_empty() {
            return Err(Error::InvalidInput("no attribute kinds requested".into()));
        }
        let sizes = want(AttributeKind::Size).then(|| self.sizes());
        let heights = want(AttributeKind::Height).then(|| self.heights());
        let depths = want(AttributeKind::Depth).then(|| self.depths());
        let itrs = if want(AttributeKind::InorderRank) {
            Some(self.inorder_ranks()?)
        } else {
            None
        };
        let mut records = Vec::with_capacity(self.nodes.len());
        for u in 0..self.nodes.len() {
            records.push(AttributeRecord {
                size: sizes.as_ref().map(|v| v[u]),
                height: heights.as_ref().map(|v| v[u]),
                depth: depths.as_ref().map(|v| v[u]),
                itr: itrs.as_ref().map(|v| v[u]),
            });
        }
        Ok(records)
    }

    /// The unique complete k-ary tree on `n` nodes: every level full
    /// except the last, which is filled from the left.
    pub fn complete(n: usize, k: usize) -> Self {
        assert!(n >= 1 && k >= 1);
        let mut nodes = Vec::with_capacity(n);
        for i in 0..n {
            let parent = if i == 0 { None } else { Some((i - 1) / k) };
            nodes.push(NodeRecord {
                children: Vec::new(),
                parent,
                slot: None,
            });
        }
        for i in 1..n {
            let p = (i - 1) / k;
            nodes[p].children.push(i);
        }
        RootedTree { k, root: 0, nodes }
    }

    /// A path on `n` nodes.
    pub fn degenerate(n: usize, k: usize) -> Self {
        assert!(n >= 1 && k >= 1);
        let mut tree = RootedTree::single(k);
        let mut cur = 0;
        for _ in 1..n {
            cur = tree.add_child(cur).expect("path stays within arity bound");
        }
        tree
    }

    /// A seeded random k-ary tree: each new node attaches to a uniformly
    /// chosen node that still has spare capacity. Deterministic per seed.
    pub fn random(n: usize, k: usize, seed: u64) -> Self {
        assert!(n >= 1 && k >= 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tree = RootedTree::single(k);
        // nodes with spare capacity and their remaining slot counts
        let mut open: Vec<(usize, usize)> = vec![(0, k)];
        for _ in 1..n {
            let pick = rng.gen_range(0..open.len());
            let (parent, spare) = open[pick];
            let child = tree.add_child(parent).expect("picked node has spare slots");
            if spare == 1 {
                open.swap_remove(pick);
            } else {
                open[pick].1 = spare - 1;
            }
            open.push((child, k));
        }
        if k == 2 {
            // tag lone children so inorder ranks are well defined
            let singles: Vec<usize> = tree
                .nodes
                .iter()
                .filter(|nd| nd.children.len() == 1)
                .map(|nd| nd.children[0])
                .collect();
            for c in singles {
                tree.nodes[c].slot = Some(if rng.gen_bool(0.5) {
                    Slot::Left
                } else {
                    Slot::Right
                });
            }
        }
        tree
    }

    /// Canonical code of the tree with children treated as an unordered
    /// multiset: equal codes iff isomorphic as unordered rooted trees.
    pub fn canonical_code(&self) -> String {
        let order = self.top_down_order();
        let mut codes: Vec<String> = vec![String::new(); self.nodes.len()];
        for &u in order.iter().rev() {
            let mut parts: Vec<&str> = self.nodes[u]
                .children
                .iter()
                .map(|&c| codes[c].as_str())
                .collect();
            parts.sort_unstable();
            let mut code = String::with_capacity(2 + parts.iter().map(|p| p.len()).sum::<usize>());
            code.push('(');
            for p in parts {
                code.push_str(p);
            }
            code.push(')');
            codes[u] = code;
        }
        codes.swap_remove(self.root)
    }

    /// True iff every node has exactly `k` or 0 children.
    pub fn is_full(&self) -> bool {
        self.nodes
            .iter()
            .all(|nd| nd.children.is_empty() || nd.children.len() == self.k)
    }

    /// True iff the tree is a path.
    pub fn is_path(&self) -> bool {
        self.nodes.iter().all(|nd| nd.children.len() <= 1)
    }

    /// True iff the tree is isomorphic to the complete k-ary tree on the
    /// same number of nodes.
    pub fn is_complete(&self) -> bool {
        self.canonical_code() == RootedTree::complete(self.len(), self.k).canonical_code()
    }

    /// Grafts a copy of `sub` as a new child of `parent`; returns the
    /// index of the copied root.
    pub fn graft(&mut self, parent: usize, sub: &RootedTree) -> Result<usize> {
        let sub_root = self.add_child(parent)?;
        let offset = self.nodes.len();
        // map sub ids to self ids: sub.root -> sub_root, others shifted
        let map = |id: usize| {
            if id == sub.root {
                sub_root
            } else if id < sub.root {
                offset + id
            } else {
                offset + id - 1
            }
        };
        for (id, nd) in sub.nodes.iter().enumerate() {
            if id == sub.root {
                continue;
            }
            self.nodes.push(NodeRecord {
                children: Vec::new(),
                parent: Some(map(nd.parent.expect("non-root has a parent"))),
                slot: nd.slot,
            });
        }
        // rebuild child lists in sub's order
        for (id, nd) in sub.nodes.iter().enumerate() {
            let new_id = map(id);
            for &c in &nd.children {
                let mc = map(c);
                self.nodes[new_id].children.push(mc);
            }
        }
        Ok(sub_root)
    }

    /// DOT rendering with size/height/depth labels.
    pub fn to_dot(&self) -> String {
        let sizes = self.sizes();
        let heights = self.heights();
        let depths = self.depths();
        let mut out = String::from("digraph tree {\n");
        for u in 0..self.nodes.len() {
            out.push_str(&format!(
                "  {u} [label=\"{u}\\ns={} h={} d={}\"];\n",
                sizes[u], heights[u], depths[u]
            ));
        }
        for u in 0..self.nodes.len() {
            for &c in &self.nodes[u].children {
                out.push_str(&format!("  {u} -> {c};\n"));
            }
        }
        out.push_str("}\n");
        out
    }
}

// -- JSON form: {"k": int, "nodes": [{"children": [...]}, ...], "root": int}

#[derive(Serialize, Deserialize)]
struct NodeRepr {
    children: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    slot: Option<Slot>,
}

#[derive(Serialize, Deserialize)]
struct TreeRepr {
    k: usize,
    nodes: Vec<NodeRepr>,
    root: usize,
}

impl Serialize for RootedTree {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = TreeRepr {
            k: self.k,
            nodes: self
                .nodes
                .iter()
                .map(|nd| NodeRepr {
                    children: nd.children.clone(),
                    slot: nd.slot,
                })
                .collect(),
            root: self.root,
        };
        repr.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for RootedTree {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = TreeRepr::deserialize(de)?;
        let mut nodes: Vec<NodeRecord> = repr
            .nodes
            .iter()
            .map(|nd| NodeRecord {
                children: nd.children.clone(),
                parent: None,
                slot: nd.slot,
            })
            .collect();
        for i in 0..repr.nodes.len() {
            for &c in &repr.nodes[i].children {
                if c >= nodes.len() {
                    return Err(serde::de::Error::custom(format!(
                        "child index {c} out of range"
                    )));
                }
                nodes[c].parent = Some(i);
            }
        }
        let tree = RootedTree {
            k: repr.k,
            root: repr.root,
            nodes,
        };
        tree.validate()
            .map_err(|e| serde::de::Error::custom(e.to_string()))?;
        Ok(tree)
    }
}

/// Sorts a vector into canonical multiset order.
pub fn multiset<T: Ord>(mut values: Vec<T>) -> Vec<T> {
    values.sort_unstable();
    values
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sizes_multiset(t: &RootedTree) -> Vec<u64> {
        multiset(t.sizes())
    }

    #[test]
    fn single_node_attributes() {
        let t = RootedTree::single(2);
        let recs = t
            .compute_attributes(&[
                AttributeKind::Size,
                AttributeKind::Height,
                AttributeKind::Depth,
            ])
            .unwrap();
        assert_eq!(
            recs,
            vec![AttributeRecord {
                size: Some(1),
                height: Some(0),
                depth: Some(0),
                itr: None
            }]
        );
    }

    #[test]
    fn path_sizes() {
        let t = RootedTree::degenerate(3, 2);
        assert_eq!(sizes_multiset(&t), vec![1, 2, 3]);
        let t4 = RootedTree::degenerate(4, 1);
        assert_eq!(multiset(t4.depths()), vec![0, 1, 2, 3]);
        assert_eq!(multiset(t4.heights()), vec![0, 1, 2, 3]);
    }

    #[test]
    fn complete_tree_sizes() {
        assert_eq!(sizes_multiset(&RootedTree::complete(1, 2)), vec![1]);
        assert_eq!(
            sizes_multiset(&RootedTree::complete(5, 2)),
            vec![1, 1, 1, 3, 5]
        );
        assert_eq!(
            sizes_multiset(&RootedTree::complete(7, 2)),
            vec![1, 1, 1, 1, 3, 3, 7]
        );
    }

    // The nine-node binary tree forced by the size multiset
    // {1,2,3,1,1,3,7,1,9}: root 9 -> {7, 1}, 7 -> {3, 3}, one 3 -> {1, 1},
    // the other 3 -> 2 -> 1. Its synchronized (size, depth) multiset is
    // computed here and frozen; it is the unique one for that size multiset.
    #[test]
    fn nine_node_size_depth_multiset() {
        let mut t = RootedTree::single(2);
        let a7 = t.add_child(0).unwrap(); // size 7
        t.add_child(0).unwrap(); // leaf
        let b3 = t.add_child(a7).unwrap();
        let c3 = t.add_child(a7).unwrap();
        t.add_child(b3).unwrap();
        t.add_child(b3).unwrap();
        let d2 = t.add_child(c3).unwrap();
        t.add_child(d2).unwrap();
        assert_eq!(sizes_multiset(&t), multiset(vec![1, 2, 3, 1, 1, 3, 7, 1, 9]));
        let recs = t
            .compute_attributes(&[AttributeKind::Size, AttributeKind::Depth])
            .unwrap();
        let pairs: Vec<(u64, u64)> =
            multiset(recs.iter().map(|r| (r.size.unwrap(), r.depth.unwrap())).collect());
        assert_eq!(
            pairs,
            multiset(vec![
                (9, 0),
                (7, 1),
                (1, 1),
                (3, 2),
                (3, 2),
                (1, 3),
                (1, 3),
                (2, 3),
                (1, 4)
            ])
        );
    }

    #[test]
    fn inorder_cherry_and_path() {
        let mut cherry = RootedTree::single(2);
        let l = cherry.add_child(0).unwrap();
        let r = cherry.add_child(0).unwrap();
        let ranks = cherry.inorder_ranks().unwrap();
        assert_eq!(ranks[l], 1);
        assert_eq!(ranks[0], 2);
        assert_eq!(ranks[r], 3);

        let mut left_path = RootedTree::single(2);
        let m = left_path.add_child_slotted(0, Slot::Left).unwrap();
        let d = left_path.add_child_slotted(m, Slot::Left).unwrap();
        let ranks = left_path.inorder_ranks().unwrap();
        assert_eq!(ranks[d], 1);
        assert_eq!(ranks[m], 2);
        assert_eq!(ranks[0], 3);
    }

    #[test]
    fn inorder_requires_binary() {
        let t = RootedTree::single(3);
        assert!(matches!(
            t.inorder_ranks(),
            Err(Error::UnsupportedQuery(_))
        ));
        assert!(matches!(
            t.compute_attributes(&[AttributeKind::InorderRank]),
            Err(Error::UnsupportedQuery(_))
        ));
    }

    #[test]
    fn inorder_is_permutation() {
        for seed in 0..20 {
            let t = RootedTree::random(17, 2, seed);
            let mut ranks = t.inorder_ranks().unwrap();
            ranks.sort_unstable();
            assert_eq!(ranks, (1..=17).collect::<Vec<u64>>());
        }
    }

    #[test]
    fn random_tree_deterministic_and_bounded() {
        let a = RootedTree::random(5, 2, 7);
        let b = RootedTree::random(5, 2, 7);
        assert_eq!(a, b);
        let t = RootedTree::random(50, 3, 1);
        t.validate().unwrap();
        assert!(t.nodes().iter().all(|nd| nd.children.len() <= 3));
        assert_eq!(RootedTree::random(1, 2, 42).len(), 1);
    }

    #[test]
    fn attribute_recurrences() {
        let t = RootedTree::random(40, 3, 9);
        let sizes = t.sizes();
        let heights = t.heights();
        let depths = t.depths();
        assert_eq!(sizes[t.root()], 40);
        for (u, nd) in t.nodes().iter().enumerate() {
            let child_sum: u64 = nd.children.iter().map(|&c| sizes[c]).sum();
            assert_eq!(sizes[u], 1 + child_sum);
            let child_h = nd.children.iter().map(|&c| heights[c]).max();
            assert_eq!(heights[u], child_h.map_or(0, |h| h + 1));
            for &c in &nd.children {
                assert_eq!(depths[c], depths[u] + 1);
            }
        }
        assert_eq!(depths.iter().filter(|&&d| d == 0).count(), 1);
        let hmax = *heights.iter().max().unwrap();
        assert_eq!(heights.iter().filter(|&&h| h == hmax).count(), 1);
    }

    #[test]
    fn json_round_trip() {
        let t = RootedTree::random(12, 2, 3);
        let s = serde_json::to_string(&t).unwrap();
        let back: RootedTree = serde_json::from_str(&s).unwrap();
        assert_eq!(t, back);
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }

    #[test]
    fn dot_labels() {
        let t = RootedTree::degenerate(2, 2);
        let dot = t.to_dot();
        assert!(dot.contains("0 [label=\"0\\ns=2 h=1 d=0\"]"));
        assert!(dot.contains("0 -> 1;"));
    }

    #[test]
    fn canonical_code_ignores_child_order() {
        let mut a = RootedTree::single(2);
        let x = a.add_child(0).unwrap();
        a.add_child(0).unwrap();
        a.add_child(x).unwrap();
        let mut b = RootedTree::single(2);
        b.add_child(0).unwrap();
        let y = b.add_child(0).unwrap();
        b.add_child(y).unwrap();
        assert_eq!(a.canonical_code(), b.canonical_code());
        assert!(!a.is_path());
        assert!(RootedTree::degenerate(4, 2).is_path());
        assert!(RootedTree::complete(6, 2).is_complete());
    }
}
