//! Exhaustive ground truth at desk scale: canonical enumeration of all
//! unordered k-ary trees on n nodes, realizability membership for any
//! attribute query, and census tables.

use std::collections::BTreeMap;

use crate::checkers::Subclass;
use crate::tree::{multiset, AttributeKind, AttributeRecord, RootedTree, Slot};
use crate::{Error, Result};

pub const DEFAULT_CEILING: usize = 12;

/// One of the three query shapes: a single attribute multiset,
/// synchronized per-node tuples, or independent (asynchronized) lists
/// that must all be realized by the same tree.
#[derive(Debug, Clone)]
pub enum QueryShape {
    Single {
        kind: AttributeKind,
        values: Vec<u64>,
    },
    Synced {
        records: Vec<AttributeRecord>,
    },
    Async {
        lists: Vec<(AttributeKind, Vec<u64>)>,
    },
}

#[derive(Debug, Clone)]
pub struct OracleQuery {
    pub k: usize,
    pub subclass: Subclass,
    pub shape: QueryShape,
}

/// Enumeration front-end with a configurable size guard.
#[derive(Debug, Clone)]
pub struct Oracle {
    pub ceiling: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle {
            ceiling: DEFAULT_CEILING,
        }
    }
}

impl Oracle {
    pub fn with_ceiling(ceiling: usize) -> Self {
        Oracle { ceiling }
    }

    fn guard(&self, n: usize) -> Result<()> {
        if n > self.ceiling {
            return Err(Error::TooLarge(format!(
                "n = {n} exceeds the enumeration ceiling {}",
                self.ceiling
            )));
        }
        Ok(())
    }

    /// Exactly one representative per isomorphism class of rooted trees
    /// on `n` nodes with at most `k` children per node (children
    /// unordered). Deterministic order.
    pub fn enumerate_trees(&self, n: usize, k: usize) -> Result<Vec<RootedTree>> {
        self.guard(n)?;
        if n == 0 || k == 0 {
            return Err(Error::InvalidInput("n and k must be positive".into()));
        }
        let mut memo: Vec<Vec<RootedTree>> = vec![Vec::new(); n + 1];
        for size in 1..=n {
            memo[size] = build_size(size, k, &memo);
        }
        Ok(memo.swap_remove(n))
    }

    /// All ordered binary trees on `n` nodes, with lone children tagged
    /// left/right. One per shape; sizes follow the Catalan numbers.
    pub fn enumerate_ordered_binary(&self, n: usize) -> Result<Vec<RootedTree>> {
        self.guard(n)?;
        let mut memo: Vec<Vec<RootedTree>> = vec![Vec::new(); n + 1];
        for size in 1..=n {
            let mut out = Vec::new();
            if size == 1 {
                out.push(RootedTree::single(2));
            } else {
                for left in 0..size {
                    let right = size - 1 - left;
                    match (left, right) {
                        (0, _) => {
                            for r in &memo[right] {
                                let mut t = RootedTree::single(2);
                                graft_slotted(&mut t, 0, r, Slot::Right);
                                out.push(t);
                            }
                        }
                        (_, 0) => {
                            for l in &memo[left] {
                                let mut t = RootedTree::single(2);
                                graft_slotted(&mut t, 0, l, Slot::Left);
                                out.push(t);
                            }
                        }
                        _ => {
                            for l in &memo[left] {
                                for r in &memo[right] {
                                    let mut t = RootedTree::single(2);
                                    t.graft(0, l).unwrap();
                                    t.graft(0, r).unwrap();
                                    out.push(t);
                                }
                            }
                        }
                    }
                }
            }
            memo[size] = out;
        }
        Ok(memo.swap_remove(n))
    }

    /// True iff some enumerated tree of the query's subclass yields
    /// attribute data matching the query.
    pub fn realizable(&self, query: &OracleQuery) -> Result<bool> {
        let n = query_n(&query.shape)?;
        self.guard(n)?;
        let uses_itr = query_uses_itr(&query.shape);
        if uses_itr && query.k != 2 {
            return Err(Error::UnsupportedQuery(
                "inorder ranks are defined for k = 2 only".into(),
            ));
        }
        let trees = if uses_itr {
            self.enumerate_ordered_binary(n)?
        } else {
            self.enumerate_trees(n, query.k)?
        };
        for tree in &trees {
            if !subclass_matches(tree, query.k, query.subclass) {
                continue;
            }
            if shape_matches(tree, &query.shape)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Complete map from attribute multiset to the number of realizing
    /// isomorphism classes.
    pub fn census(
        &self,
        n: usize,
        k: usize,
        kind: AttributeKind,
    ) -> Result<BTreeMap<Vec<u64>, usize>> {
        let trees = if kind == AttributeKind::InorderRank {
            if k != 2 {
                return Err(Error::UnsupportedQuery(
                    "inorder ranks are defined for k = 2 only".into(),
                ));
            }
            self.enumerate_ordered_binary(n)?
        } else {
            self.enumerate_trees(n, k)?
        };
        let mut table: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
        for tree in &trees {
            let values = attr_values(tree, kind)?;
            *table.entry(multiset(values)).or_insert(0) += 1;
        }
        Ok(table)
    }
}

fn attr_values(tree: &RootedTree, kind: AttributeKind) -> Result<Vec<u64>> {
    Ok(match kind {
        AttributeKind::Size => tree.sizes(),
        AttributeKind::Height => tree.heights(),
        AttributeKind::Depth => tree.depths(),
        AttributeKind::InorderRank => tree.inorder_ranks()?,
    })
}

fn query_n(shape: &QueryShape) -> Result<usize> {
    match shape {
        QueryShape::Single { values, .. } => Ok(values.len()),
        QueryShape::Synced { records } => Ok(records.len()),
        QueryShape::Async { lists } => {
            let mut lens = lists.iter().map(|(_, v)| v.len());
            let Some(first) = lens.next() else {
                return Err(Error::InvalidInput("empty asynchronized query".into()));
            };
            if lens.any(|l| l != first) {
                return Err(Error::InvalidInput(
                    "asynchronized lists must have equal cardinality".into(),
                ));
            }
            Ok(first)
        }
    }
}

fn query_uses_itr(shape: &QueryShape) -> bool {
    match shape {
        QueryShape::Single { kind, .. } => *kind == AttributeKind::InorderRank,
        QueryShape::Synced { records } => records.iter().any(|r| r.itr.is_some()),
        QueryShape::Async { lists } => lists.iter().any(|(k, _)| *k == AttributeKind::InorderRank),
    }
}

pub fn subclass_matches(tree: &RootedTree, k: usize, subclass: Subclass) -> bool {
    match subclass {
        Subclass::Any => true,
        Subclass::Full => tree
            .nodes()
            .iter()
            .all(|nd| nd.children.is_empty() || nd.children.len() == k),
        Subclass::Degenerate => tree.is_path(),
        Subclass::Complete => {
            tree.canonical_code() == RootedTree::complete(tree.len(), k).canonical_code()
        }
    }
}

fn shape_matches(tree: &RootedTree, shape: &QueryShape) -> Result<bool> {
    match shape {
        QueryShape::Single { kind, values } => {
            Ok(multiset(attr_values(tree, *kind)?) == multiset(values.clone()))
        }
        QueryShape::Synced { records } => {
            let mut kinds = Vec::new();
            let first = records
                .first()
                .ok_or_else(|| Error::InvalidInput("empty synchronized query".into()))?;
            if first.size.is_some() {
                kinds.push(AttributeKind::Size);
            }
            if first.height.is_some() {
                kinds.push(AttributeKind::Height);
            }
            if first.depth.is_some() {
                kinds.push(AttributeKind::Depth);
            }
            if first.itr.is_some() {
                kinds.push(AttributeKind::InorderRank);
            }
            let uniform = records.iter().all(|r| {
                r.size.is_some() == first.size.is_some()
                    && r.height.is_some() == first.height.is_some()
                    && r.depth.is_some() == first.depth.is_some()
                    && r.itr.is_some() == first.itr.is_some()
            });
            if !uniform {
                return Err(Error::InvalidInput(
                    "synchronized records must carry the same attribute kinds".into(),
                ));
            }
            let trew = tree.compute_attributes(&kinds)?;
            Ok(multiset(trew) == multiset(records.clone()))
        }
        QueryShape::Async { lists } => {
            for (kind, values) in lists {
                if multiset(attr_values(tree, *kind)?) != multiset(values.clone()) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// All canonical trees of exactly `size` nodes, given the lists for all
/// smaller sizes. Children are chosen as a non-increasing sequence of
/// (size, index) so each unordered multiset of subtrees appears once.
fn build_size(size: usize, k: usize, memo: &[Vec<RootedTree>]) -> Vec<RootedTree> {
    if size == 1 {
        return vec![RootedTree::single(k)];
    }
    let mut out = Vec::new();
    let mut choice: Vec<(usize, usize)> = Vec::new(); // (size, index into memo[size])
    fill_children(size - 1, k, usize::MAX, usize::MAX, memo, &mut choice, &mut out, k);
    out
}

#[allow(clippy::too_many_arguments)]
fn fill_children(
    remaining: usize,
    slots: usize,
    max_size: usize,
    max_index: usize,
    memo: &[Vec<RootedTree>],
    choice: &mut Vec<(usize, usize)>,
    out: &mut Vec<RootedTree>,
    k: usize,
) {
    if remaining == 0 {
        let mut tree = RootedTree::single(k);
        for &(s, i) in choice.iter() {
            tree.graft(0, &memo[s][i]).unwrap();
        }
        out.push(tree);
        return;
    }
    if slots == 0 || remaining > slots * max_size.min(remaining) {
        return;
    }
    let hi = max_size.min(remaining);
    for s in (1..=hi).rev() {
        // remaining slots must be able to absorb what is left
        if remaining - s > (slots - 1) * s {
            continue;
        }
        let idx_hi = if s == max_size {
            max_index.min(memo[s].len() - 1)
        } else {
            memo[s].len() - 1
        };
        for i in (0..=idx_hi).rev() {
            choice.push((s, i));
            fill_children(remaining - s, slots - 1, s, i, memo, choice, out, k);
            choice.pop();
        }
    }
}

fn graft_slotted(tree: &mut RootedTree, parent: usize, sub: &RootedTree, slot: Slot) {
    let root = tree.graft(parent, sub).unwrap();
    tree.set_slot(root, slot);
}
