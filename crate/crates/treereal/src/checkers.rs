//! Polynomial-time realizability deciders for depth sequences, height
//! sequences, synchronized (height, depth) pairs, size + inorder-rank
//! pairs, and the complete/degenerate subtree-size subclasses.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::tree::{multiset, RootedTree, Slot};
use crate::{Error, Result};

/// Tree subclass a realizability query may be restricted to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subclass {
    Any,
    Complete,
    Full,
    Degenerate,
}

/// Occurrence counts per depth value. `counts[d]` is the number of nodes
/// at depth `d`.
#[derive(Debug, Clone)]
pub struct LevelCounts {
    pub counts: Vec<u64>,
    pub d_max: u64,
}

impl LevelCounts {
    /// Builds counts from a depth multiset. Returns `None` when the
    /// multiset cannot belong to any rooted tree's level structure:
    /// missing depth 0, more than one root, or a gap between levels.
    pub fn from_depths(depths: &[u64]) -> Option<LevelCounts> {
        let n = depths.len() as u64;
        let d_max = *depths.iter().max()?;
        if d_max >= n {
            return None; // some level in 0..=d_max would be empty
        }
        let mut counts = vec![0u64; d_max as usize + 1];
        for &d in depths {
            counts[d as usize] += 1;
        }
        if counts[0] != 1 || counts.iter().any(|&c| c == 0) {
            return None;
        }
        Some(LevelCounts { counts, d_max })
    }
}

/// Occurrence counts per height value.
#[derive(Debug, Clone)]
pub struct HeightCounts {
    pub counts: Vec<u64>,
    pub h_max: u64,
}

impl HeightCounts {
    pub fn from_heights(heights: &[u64]) -> Option<HeightCounts> {
        let n = heights.len() as u64;
        let h_max = *heights.iter().max()?;
        if h_max >= n {
            return None;
        }
        let mut counts = vec![0u64; h_max as usize + 1];
        for &h in heights {
            counts[h as usize] += 1;
        }
        Some(HeightCounts { counts, h_max })
    }
}

fn is_zero_to_n_minus_one(values: &[u64]) -> bool {
    let sorted = multiset(values.to_vec());
    sorted.iter().enumerate().all(|(i, &v)| v == i as u64)
}

/// Decides whether a k-ary tree of the given subclass exists with exactly
/// this depth multiset.
pub fn check_depths(depths: &[u64], k: usize, subclass: Subclass) -> bool {
    if depths.is_empty() {
        return false;
    }
    if subclass == Subclass::Degenerate {
        return is_zero_to_n_minus_one(depths);
    }
    let k = k as u64;
    let Some(lc) = LevelCounts::from_depths(depths) else {
        return false;
    };
    let c = &lc.counts;
    let d_max = lc.d_max as usize;
    for d in 0..d_max {
        if c[d + 1] > k * c[d] {
            return false;
        }
    }
    match subclass {
        Subclass::Any => true,
        // every level but the last is exactly full
        Subclass::Complete => (0..d_max.saturating_sub(1)).all(|d| c[d + 1] == k * c[d]),
        // K must divide every level size below the root
        Subclass::Full => (1..=d_max).all(|d| c[d] % k == 0),
        Subclass::Degenerate => unreachable!(),
    }
}

/// Decides whether a k-ary tree of the given subclass exists with exactly
/// this height multiset. Conjunction of a unique root, strand
/// feasibility (counts non-increasing with height), and the running
/// free-places check.
pub fn check_heights(heights: &[u64], k: usize, subclass: Subclass) -> bool {
    if heights.is_empty() {
        return false;
    }
    match subclass {
        Subclass::Degenerate => return is_zero_to_n_minus_one(heights),
        Subclass::Complete => {
            let complete = RootedTree::complete(heights.len(), k);
            return multiset(heights.to_vec()) == multiset(complete.heights());
        }
        _ => {}
    }
    let k = k as i128;
    let Some(hc) = HeightCounts::from_heights(heights) else {
        return false;
    };
    let c = &hc.counts;
    let h_max = hc.h_max as usize;
    if c[h_max] != 1 {
        return false;
    }
    for i in 0..h_max {
        if c[i] < c[i + 1] {
            return false;
        }
    }
    // free child slots remaining above, scanning from the root down
    let mut places: i128 = 0;
    for i in (1..=h_max).rev() {
        places += k * c[i] as i128 - c[i - 1] as i128;
        if places < 0 {
            return false;
        }
    }
    match subclass {
        Subclass::Any => true,
        Subclass::Full => places == 0,
        _ => unreachable!(),
    }
}

/// Decides whether a k-ary tree exists whose per-node (height, depth)
/// pairs equal the given multiset.
///
/// Steps: a unique root pair at depth 0 attaining the maximum height,
/// a greedy maximal-strand decomposition in descending height order,
/// then per level a threshold matching of strand roots against free
/// child slots one level above.
pub fn check_height_depth_synced(pairs: &[(u64, u64)], k: usize) -> bool {
    if pairs.is_empty() {
        return false;
    }
    let h_max = pairs.iter().map(|&(h, _)| h).max().unwrap();
    let roots_at_zero: Vec<&(u64, u64)> = pairs.iter().filter(|&&(_, d)| d == 0).collect();
    if roots_at_zero.len() != 1 || roots_at_zero[0].0 != h_max {
        return false;
    }

    // strand decomposition; BTreeMap gives a deterministic scan order
    let mut remaining: BTreeMap<(u64, u64), u64> = BTreeMap::new();
    for &(h, d) in pairs {
        *remaining.entry((h, d)).or_insert(0) += 1;
    }
    let mut strand_roots: Vec<(u64, u64)> = Vec::new(); // (height, depth)
    while let Some((&(h, d), _)) = remaining.iter().next_back() {
        take_one(&mut remaining, (h, d));
        strand_roots.push((h, d));
        for i in 1..=h {
            if !take_one_checked(&mut remaining, (h - i, d + i)) {
                return false;
            }
        }
    }

    // slots at depth d-1 usable by strand roots at depth d: every node of
    // height >= 1 keeps k-1 slots (one is taken by its own strand child)
    let mut nodes_by_depth: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for &(h, d) in pairs {
        nodes_by_depth.entry(d).or_default().push(h);
    }
    for hs in nodes_by_depth.values_mut() {
        hs.sort_unstable_by(|a, b| b.cmp(a));
    }
    let mut roots_by_depth: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for &(h, d) in &strand_roots {
        if d > 0 {
            roots_by_depth.entry(d).or_default().push(h);
        }
    }
    for (d, roots) in roots_by_depth.iter_mut() {
        roots.sort_unstable_by(|a, b| b.cmp(a));
        let empty = Vec::new();
        let parents = nodes_by_depth.get(&(d - 1)).unwrap_or(&empty);
        // descending-height greedy == threshold (Hall) check: the i+1
        // highest roots need slots on parents of height >= h_i + 1
        for (i, &h) in roots.iter().enumerate() {
            let eligible = parents.iter().take_while(|&&ph| ph >= h + 1).count() as u64;
            if (i as u64 + 1) > eligible * (k as u64 - 1) {
                return false;
            }
        }
    }
    true
}

fn take_one(map: &mut BTreeMap<(u64, u64), u64>, key: (u64, u64)) {
    take_one_checked(map, key);
}

fn take_one_checked(map: &mut BTreeMap<(u64, u64), u64>, key: (u64, u64)) -> bool {
    match map.get_mut(&key) {
        Some(c) if *c > 1 => {
            *c -= 1;
            true
        }
        Some(_) => {
            map.remove(&key);
            true
        }
        None => false,
    }
}

/// Reconstructs the unique binary tree whose (subtree size, inorder rank)
/// pairs equal the input, or `None` when no such tree exists. The inorder
/// ranks must form a permutation of 1..=n.
pub fn realize_sizes_itr(pairs: &[(u64, u64)]) -> Result<Option<RootedTree>> {
    let n = pairs.len() as u64;
    if n == 0 {
        return Err(Error::InvalidInput("empty pair multiset".into()));
    }
    let mut size_of = vec![0u64; n as usize + 1]; // indexed by rank
    let mut seen = vec![false; n as usize + 1];
    for &(s, r) in pairs {
        if r < 1 || r > n || seen[r as usize] {
            return Err(Error::InvalidInput(
                "inorder ranks must form a permutation of 1..=n".into(),
            ));
        }
        seen[r as usize] = true;
        size_of[r as usize] = s;
    }
    // size -> sorted ranks, for O(log n) unique-root lookups per interval
    let mut by_size: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for r in 1..=n {
        by_size.entry(size_of[r as usize]).or_default().push(r);
    }

    let root_rank = |lo: u64, hi: u64| -> Option<u64> {
        let want = hi - lo + 1;
        let ranks = by_size.get(&want)?;
        let from = ranks.partition_point(|&r| r < lo);
        let to = ranks.partition_point(|&r| r <= hi);
        if to - from == 1 {
            Some(ranks[from])
        } else {
            None // zero or multiple candidates
        }
    };

    let Some(r0) = root_rank(1, n) else {
        return Ok(None);
    };
    let mut tree = RootedTree::single(2);
    // (lo, hi, parent, slot); right pushed first so left attaches first
    let mut work: Vec<(u64, u64, usize, Slot)> = Vec::new();
    if r0 > 1 {
        work.push((r0 + 1, n, 0, Slot::Right));
        work.push((1, r0 - 1, 0, Slot::Left));
    } else if r0 < n {
        work.push((r0 + 1, n, 0, Slot::Right));
    }
    while let Some((lo, hi, parent, slot)) = work.pop() {
        if lo > hi {
            continue;
        }
        let Some(r) = root_rank(lo, hi) else {
            return Ok(None);
        };
        let node = tree.add_child_slotted(parent, slot)?;
        if r + 1 <= hi {
            work.push((r + 1, hi, node, Slot::Right));
        }
        if lo + 1 <= r {
            work.push((lo, r - 1, node, Slot::Left));
        }
    }
    Ok(Some(tree))
}

/// Subtree-size realizability for the two rigid subclasses. `Any` and
/// `Full` are NP-hard and answered by the solver, not here.
pub fn check_sizes_subclass(sizes: &[u64], k: usize, subclass: Subclass) -> Result<bool> {
    if sizes.is_empty() {
        return Err(Error::InvalidInput("empty size multiset".into()));
    }
    match subclass {
        Subclass::Complete => {
            let complete = RootedTree::complete(sizes.len(), k);
            Ok(multiset(sizes.to_vec()) == multiset(complete.sizes()))
        }
        Subclass::Degenerate => {
            let sorted = multiset(sizes.to_vec());
            Ok(sorted.iter().enumerate().all(|(i, &v)| v == i as u64 + 1))
        }
        _ => Err(Error::UnsupportedQuery(
            "size realizability for this subclass requires the exact solver".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::AttributeKind;

    #[test]
    fn depth_examples() {
        assert!(!check_depths(&[0, 1, 1, 1], 2, Subclass::Any));
        assert!(check_depths(&[0, 1, 1, 2, 2, 2, 2], 2, Subclass::Any));
        assert!(check_depths(&[0, 1, 1, 2], 2, Subclass::Complete));
        assert!(check_depths(&[0, 1, 1], 2, Subclass::Full));
        assert!(!check_depths(&[0, 1], 2, Subclass::Full));
        assert!(check_depths(&[0, 1, 2, 3], 2, Subclass::Degenerate));
        assert!(!check_depths(&[0, 1, 1, 2], 2, Subclass::Degenerate));
        // missing root / gap / two roots
        assert!(!check_depths(&[1, 2], 2, Subclass::Any));
        assert!(!check_depths(&[0, 2, 2], 2, Subclass::Any));
        assert!(!check_depths(&[0, 0, 1], 2, Subclass::Any));
    }

    #[test]
    fn height_examples() {
        assert!(check_heights(&[0], 2, Subclass::Any));
        assert!(check_heights(&[2, 1, 0, 0], 2, Subclass::Any));
        assert!(!check_heights(&[1, 1, 0, 0], 2, Subclass::Any));
        assert!(check_heights(&[1, 0, 0], 2, Subclass::Full));
        assert!(!check_heights(&[2, 1, 0, 0], 2, Subclass::Full));
        assert!(check_heights(&[0], 2, Subclass::Full));
        // passes the places loop but is not strand-decomposable
        assert!(!check_heights(&[2, 1, 1, 1, 0], 3, Subclass::Any));
        assert!(check_heights(&[2, 1, 0], 5, Subclass::Degenerate));
        assert!(check_heights(&[2, 1, 0, 0, 0, 0, 0], 3, Subclass::Complete));
        assert!(!check_heights(&[1, 1, 0, 0, 0, 0, 0], 3, Subclass::Complete));
    }

    #[test]
    fn hd_sync_examples() {
        assert!(check_height_depth_synced(&[(2, 0), (1, 1), (0, 2)], 2));
        assert!(!check_height_depth_synced(&[(1, 0), (1, 1), (0, 2)], 2));
        assert!(check_height_depth_synced(
            &[(2, 0), (1, 1), (1, 1), (0, 2), (0, 2)],
            2
        ));
        // two roots at depth 0
        assert!(!check_height_depth_synced(&[(1, 0), (0, 0)], 2));
        // root does not attain the maximum height
        assert!(!check_height_depth_synced(&[(0, 0), (1, 1), (0, 2)], 2));
    }

    #[test]
    fn sizes_itr_examples() {
        let cherry = realize_sizes_itr(&[(1, 1), (3, 2), (1, 3)]).unwrap().unwrap();
        let ranks = cherry.inorder_ranks().unwrap();
        let sizes = cherry.sizes();
        let got: Vec<(u64, u64)> =
            multiset((0..3).map(|u| (sizes[u], ranks[u])).collect());
        assert_eq!(got, vec![(1, 1), (1, 3), (3, 2)]);

        let path = realize_sizes_itr(&[(1, 1), (2, 2), (3, 3)]).unwrap().unwrap();
        assert!(path.is_path());
        let ranks = path.inorder_ranks().unwrap();
        assert_eq!(ranks[path.root()], 3);

        assert!(realize_sizes_itr(&[(3, 1), (1, 2), (1, 3)]).unwrap().is_none());
        assert!(matches!(
            realize_sizes_itr(&[(1, 1), (2, 1)]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn sizes_itr_round_trip_on_random_trees() {
        for seed in 0..30 {
            let t = RootedTree::random(9, 2, seed);
            let recs = t
                .compute_attributes(&[AttributeKind::Size, AttributeKind::InorderRank])
                .unwrap();
            let pairs: Vec<(u64, u64)> =
                recs.iter().map(|r| (r.size.unwrap(), r.itr.unwrap())).collect();
            let rebuilt = realize_sizes_itr(&pairs).unwrap().expect("tree exists");
            let recs2 = rebuilt
                .compute_attributes(&[AttributeKind::Size, AttributeKind::InorderRank])
                .unwrap();
            let pairs2: Vec<(u64, u64)> =
                recs2.iter().map(|r| (r.size.unwrap(), r.itr.unwrap())).collect();
            assert_eq!(multiset(pairs), multiset(pairs2));
        }
    }

    #[test]
    fn sizes_subclass_examples() {
        assert!(check_sizes_subclass(&[5, 3, 1, 1, 1], 2, Subclass::Complete).unwrap());
        assert!(check_sizes_subclass(&[3, 2, 1], 7, Subclass::Degenerate).unwrap());
        assert!(!check_sizes_subclass(&[3, 1, 1], 2, Subclass::Degenerate).unwrap());
        assert!(matches!(
            check_sizes_subclass(&[1], 2, Subclass::Any),
            Err(Error::UnsupportedQuery(_))
        ));
    }

    #[test]
    fn checkers_accept_real_trees() {
        for seed in 0..15 {
            let t = RootedTree::random(25, 2, seed);
            assert!(check_depths(&t.depths(), 2, Subclass::Any));
            assert!(check_heights(&t.heights(), 2, Subclass::Any));
            let pairs: Vec<(u64, u64)> = t
                .heights()
                .into_iter()
                .zip(t.depths())
                .collect();
            assert!(check_height_depth_synced(&pairs, 2));
        }
        let c = RootedTree::complete(11, 2);
        assert!(check_depths(&c.depths(), 2, Subclass::Complete));
        assert!(check_heights(&c.heights(), 2, Subclass::Complete));
        let full = RootedTree::complete(7, 2); // perfect, hence full
        assert!(check_depths(&full.depths(), 2, Subclass::Full));
        assert!(check_heights(&full.heights(), 2, Subclass::Full));
    }
}
