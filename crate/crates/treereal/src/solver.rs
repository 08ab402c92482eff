//! Exact decision and witness construction for subtree-size realizability
//! and its depth-synchronized variant.
//!
//! The search assigns values largest-first to open parent demands
//! (remaining child sum, remaining slots). Reduction-generated instances
//! have rigid forced structure, so with duplicate-state memoization and
//! infeasibility pruning they resolve quickly despite the worst-case
//! exponential behavior.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::time::{Duration, Instant};

use crate::checkers::{check_sizes_subclass, Subclass};
use crate::tree::{multiset, RootedTree};
use crate::{Error, Result};

/// A subtree-size realizability instance, optionally with a depth
/// attached to every value.
#[derive(Debug, Clone)]
pub struct SizeInstance {
    pub k: usize,
    pub sizes: Vec<u64>,
    /// Depth of `sizes[i]`, when the query is depth-synchronized.
    pub depths: Option<Vec<u64>>,
    pub subclass: Subclass,
}

impl SizeInstance {
    pub fn plain(sizes: Vec<u64>, k: usize) -> Self {
        SizeInstance {
            k,
            sizes,
            depths: None,
            subclass: Subclass::Any,
        }
    }

    pub fn depth_synced(pairs: &[(u64, u64)], k: usize) -> Self {
        SizeInstance {
            k,
            sizes: pairs.iter().map(|&(s, _)| s).collect(),
            depths: Some(pairs.iter().map(|&(_, d)| d).collect()),
            subclass: Subclass::Any,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::InvalidInput("empty size multiset".into()));
        }
        if self.k < 1 {
            return Err(Error::InvalidInput("arity bound must be positive".into()));
        }
        if self.sizes.iter().any(|&s| s == 0) {
            return Err(Error::InvalidInput("subtree sizes must be positive".into()));
        }
        if let Some(depths) = &self.depths {
            if depths.len() != self.sizes.len() {
                return Err(Error::InvalidInput(
                    "depth annotations must align with sizes".into(),
                ));
            }
            if self.subclass != Subclass::Any {
                return Err(Error::UnsupportedQuery(
                    "depth-synchronized solving supports subclass any only".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Search limits and toggles.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub node_budget: u64,
    pub time_budget: Duration,
    /// Enables forced-move pruning (residual reachability bounds).
    pub propagate: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            node_budget: 50_000_000,
            time_budget: Duration::from_secs(120),
            propagate: true,
        }
    }
}

/// A realizing tree plus the value assigned to each node.
#[derive(Debug, Clone)]
pub struct Witness {
    pub tree: RootedTree,
    pub value_of: Vec<u64>,
}

/// Outcome of a solve: budget exhaustion is distinct from a decided NO.
#[derive(Debug, Clone)]
pub enum SolveOutcome {
    Tree(Witness),
    NoTree,
    BudgetExhausted,
}

impl SolveOutcome {
    pub fn witness(&self) -> Option<&Witness> {
        match self {
            SolveOutcome::Tree(w) => Some(w),
            _ => None,
        }
    }

    pub fn is_yes(&self) -> bool {
        matches!(self, SolveOutcome::Tree(_))
    }
}

/// Open demand: a placed node still waiting for children worth
/// `residual` in total, over at most `slots` further child slots.
/// `depth` is 0 for unsynchronized instances.
type Sig = (u64, u32, u64);

struct BudgetStop;

struct Search {
    k: u32,
    full: bool,
    synced: bool,
    propagate: bool,
    items: Vec<(u64, u64)>, // (value, depth) sorted by descending value
    class_end: Vec<usize>,  // one past the run of items equal to items[i]
    // demand bookkeeping: counted signatures plus concrete node stacks
    sig_counts: BTreeMap<Sig, u32>,
    sig_nodes: HashMap<Sig, Vec<usize>>,
    nodes: Vec<(usize, u64)>, // (parent, value) in creation order
    failed: HashSet<(usize, Vec<(Sig, u32)>)>,
    visited: u64,
    node_budget: u64,
    deadline: Instant,
    exhausted: bool,
}

impl Search {
    fn push_demand(&mut self, sig: Sig, node: usize) {
        *self.sig_counts.entry(sig).or_insert(0) += 1;
        self.sig_nodes.entry(sig).or_default().push(node);
    }

    fn pop_demand(&mut self, sig: Sig) -> usize {
        let c = self.sig_counts.get_mut(&sig).expect("demand present");
        if *c == 1 {
            self.sig_counts.remove(&sig);
        } else {
            *c -= 1;
        }
        self.sig_nodes.get_mut(&sig).expect("demand present").pop().unwrap()
    }

    fn memo_key(&self, idx: usize) -> (usize, Vec<(Sig, u32)>) {
        (idx, self.sig_counts.iter().map(|(&s, &c)| (s, c)).collect())
    }

    fn feasible_as_parent(&self, idx: usize, v: u64) -> bool {
        // a node of value v needs children summing to v-1 later on
        let next_v = self.items.get(idx + 1).map_or(0, |&(nv, _)| nv);
        if v == 1 {
            true
        } else if self.full && v - 1 < self.k as u64 {
            false
        } else {
            !self.propagate || v - 1 <= self.k as u64 * next_v
        }
    }

    /// Class-counting propagation over the run of values equal to
    /// `items[idx]`: every open demand must stay satisfiable once the
    /// run is exhausted and only values <= the next class remain, which
    /// bounds how many copies each demand must (`min_t`) and can
    /// (`max_t`) absorb. Returns `None` when no distribution of the run
    /// can work, otherwise the starving demands when the totals force
    /// every remaining copy into them.
    fn class_forcing(&self, idx: usize) -> Option<Vec<Sig>> {
        let (v, _) = self.items[idx];
        let end = self.class_end[idx];
        let copies = (end - idx) as u64;
        let v_next = self.items.get(end).map_or(0, |&(nv, _)| nv);
        let mut total_min = 0u64;
        let mut total_max = 0u64;
        let mut starving: Vec<Sig> = Vec::new();
        for (&sig, &cnt) in &self.sig_counts {
            let (r, s, _) = sig;
            let (s, cnt) = (s as u64, cnt as u64);
            if r < v {
                // takes nothing from this class; must survive on smaller values
                if r > s * v_next {
                    return None;
                }
                continue;
            }
            let min_t = if r <= s * v_next {
                0
            } else {
                (r - s * v_next).div_ceil(v - v_next)
            };
            let closing = if r % v == 0 && r / v <= s { r / v } else { 0 };
            let open_max = if v_next == 0 { 0 } else { (s - 1).min((r - 1) / v) };
            let max_t = closing.max(open_max);
            if max_t < min_t {
                return None;
            }
            if min_t > 0 {
                starving.push(sig);
            }
            total_min += min_t * cnt;
            total_max = total_max.saturating_add(max_t * cnt);
        }
        if total_min > copies || total_max < copies {
            return None;
        }
        if total_min == copies {
            Some(starving)
        } else {
            Some(Vec::new())
        }
    }

    /// Demands that can take the value at `idx`, or `None` when the
    /// counting propagation rules the whole state out. Best fit first:
    /// exact closes, then ascending residual; demands that must absorb
    /// copies of this value class come before the rest.
    fn placement_candidates(&self, idx: usize) -> Option<Vec<Sig>> {
        let (v, vd) = self.items[idx];
        let mut cands = self.candidates(v, vd);
        if self.propagate && !self.full && !self.synced {
            let starving = self.class_forcing(idx)?;
            if !starving.is_empty() {
                cands.retain(|sig| starving.contains(sig));
            }
        }
        Some(cands)
    }

    /// Demands that can take a child of value `v` at depth `vd`, best
    /// fit first: exact closes, then ascending residual. Placements that
    /// would close a fresh k-slot demand with a single child go last:
    /// single-child internal nodes are legal but rare, and trying them
    /// first sends the search into deep dead ends.
    fn candidates(&self, v: u64, vd: u64) -> Vec<Sig> {
        let mut cands: Vec<Sig> = self
            .sig_counts
            .keys()
            .filter(|&&(residual, slots, depth)| {
                if residual < v {
                    return false;
                }
                // sig depth is the depth of the children this demand accepts
                if self.synced && depth != vd {
                    return false;
                }
                let r = residual - v;
                let s = slots - 1;
                if r > 0 && s == 0 {
                    return false;
                }
                if self.full && r > 0 && r < s as u64 {
                    return false; // s more children of size >= 1 each
                }
                if self.full && r == 0 && s != 0 {
                    return false; // full nodes take exactly k children
                }
                // remaining values are all <= v
                !(self.propagate && r > s as u64 * v)
            })
            .copied()
            .collect();
        cands.sort_by_key(|&(r, s, _)| r == v && s == self.k);
        cands
    }

    /// Places value `idx` into the best-fitting demand with no
    /// backtracking. Cheap, and exact on the rigid instances the
    /// reduction generates; the full search is the fallback.
    fn greedy(&mut self) -> bool {
        for idx in 1..self.items.len() {
            self.visited += 1;
            if self.visited > self.node_budget {
                return false;
            }
            let (v, _) = self.items[idx];
            if !self.feasible_as_parent(idx, v) {
                return false;
            }
            let Some(&sig) = self.placement_candidates(idx).as_deref().and_then(<[Sig]>::first)
            else {
                return false;
            };
            let (residual, slots, depth) = sig;
            let parent = self.pop_demand(sig);
            let child = self.nodes.len();
            self.nodes.push((parent, v));
            let r = residual - v;
            let child_depth = if self.synced { depth + 1 } else { 0 };
            if r > 0 {
                self.push_demand((r, slots - 1, depth), parent);
            }
            if v > 1 {
                self.push_demand((v - 1, self.k, child_depth), child);
            }
        }
        self.sig_counts.is_empty()
    }

    fn search(&mut self, idx: usize) -> std::result::Result<bool, BudgetStop> {
        if idx == self.items.len() {
            // sum(residuals) always equals the number of unplaced values,
            // so no open demand can remain here
            debug_assert!(self.sig_counts.is_empty());
            return Ok(true);
        }
        self.visited += 1;
        if self.visited > self.node_budget {
            self.exhausted = true;
            return Err(BudgetStop);
        }
        if self.visited % 4096 == 0 && Instant::now() >= self.deadline {
            self.exhausted = true;
            return Err(BudgetStop);
        }
        let (v, vd) = self.items[idx];
        // remaining values are all <= v, so every open demand must be
        // coverable by its remaining slots at that magnitude
        if self.propagate
            && self
                .sig_counts
                .keys()
                .any(|&(r, s, _)| r > s as u64 * v)
        {
            return Ok(false);
        }
        let key = self.memo_key(idx);
        if self.failed.contains(&key) {
            return Ok(false);
        }
        let _ = vd;
        let cands = match self.placement_candidates(idx) {
            Some(c) => c,
            None => {
                self.failed.insert(key);
                return Ok(false);
            }
        };
        if self.feasible_as_parent(idx, v) {
            for sig in cands {
                let (residual, slots, depth) = sig;
                let parent = self.pop_demand(sig);
                let child = self.nodes.len();
                self.nodes.push((parent, v));
                let r = residual - v;
                let child_depth = if self.synced { depth + 1 } else { 0 };
                if r > 0 {
                    self.push_demand((r, slots - 1, depth), parent);
                }
                if v > 1 {
                    self.push_demand((v - 1, self.k, child_depth), child);
                }
                if self.search(idx + 1)? {
                    // keep the node assignments: they are the witness
                    return Ok(true);
                }
                // undo
                if v > 1 {
                    self.pop_demand((v - 1, self.k, child_depth));
                }
                if r > 0 {
                    self.pop_demand((r, slots - 1, depth));
                }
                self.nodes.pop();
                self.push_demand(sig, parent);
            }
        }
        self.failed.insert(key);
        Ok(false)
    }
}

/// Decides whether a k-ary tree (of the instance's subclass) realizes
/// the size multiset, returning a witness when one exists.
pub fn solve_sizes(instance: &SizeInstance, opts: &SolveOptions) -> Result<SolveOutcome> {
    instance.validate()?;
    let n = instance.sizes.len() as u64;
    let k = instance.k;

    // rigid subclasses have closed-form answers
    match instance.subclass {
        Subclass::Complete => {
            return Ok(if check_sizes_subclass(&instance.sizes, k, Subclass::Complete)? {
                witness_from_tree(RootedTree::complete(n as usize, k))
            } else {
                SolveOutcome::NoTree
            });
        }
        Subclass::Degenerate => {
            return Ok(
                if check_sizes_subclass(&instance.sizes, k, Subclass::Degenerate)? {
                    witness_from_tree(RootedTree::degenerate(n as usize, k))
                } else {
                    SolveOutcome::NoTree
                },
            );
        }
        _ => {}
    }

    let synced = instance.depths.is_some();
    let mut items: Vec<(u64, u64)> = match &instance.depths {
        Some(depths) => instance.sizes.iter().copied().zip(depths.iter().copied()).collect(),
        None => instance.sizes.iter().map(|&s| (s, 0)).collect(),
    };
    items.sort_unstable_by(|a, b| b.cmp(a));

    // the unique maximum must be the root and equal n
    if items[0].0 != n || (items.len() > 1 && items[1].0 == n) {
        return Ok(SolveOutcome::NoTree);
    }
    if synced && items[0].1 != 0 {
        return Ok(SolveOutcome::NoTree);
    }

    if instance.subclass == Subclass::Full && n > 1 && n - 1 < k as u64 {
        return Ok(SolveOutcome::NoTree);
    }
    let mut class_end = vec![0usize; items.len()];
    for idx in (0..items.len()).rev() {
        class_end[idx] = if idx + 1 < items.len() && items[idx + 1] == items[idx] {
            class_end[idx + 1]
        } else {
            idx + 1
        };
    }

    let fresh = || {
        let mut search = Search {
            k: k as u32,
            full: instance.subclass == Subclass::Full,
            synced,
            propagate: opts.propagate,
            items: items.clone(),
            class_end: class_end.clone(),
            sig_counts: BTreeMap::new(),
            sig_nodes: HashMap::new(),
            nodes: vec![(usize::MAX, n)],
            failed: HashSet::new(),
            visited: 0,
            node_budget: opts.node_budget,
            deadline: Instant::now() + opts.time_budget,
            exhausted: false,
        };
        if n > 1 {
            search.push_demand((n - 1, k as u32, if synced { 1 } else { 0 }), 0);
        }
        search
    };

    let mut greedy = fresh();
    if greedy.greedy() {
        return witness_from_search(&greedy, k).map(SolveOutcome::Tree);
    }
    // recursion depth is the item count; give deep instances room
    let stack = 16 * 1024 * 1024 + 2048 * items.len();
    let (res, search) = std::thread::scope(|scope| {
        std::thread::Builder::new()
            .stack_size(stack)
            .spawn_scoped(scope, || {
                let mut search = fresh();
                (search.search(1), search)
            })
            .expect("solver thread spawns")
            .join()
            .expect("solver thread completes")
    });
    match res {
        Err(BudgetStop) => Ok(SolveOutcome::BudgetExhausted),
        Ok(false) => Ok(SolveOutcome::NoTree),
        Ok(true) => witness_from_search(&search, k).map(SolveOutcome::Tree),
    }
}

fn witness_from_search(search: &Search, k: usize) -> Result<Witness> {
    let mut tree = RootedTree::single(k);
    let mut value_of = vec![search.nodes[0].1];
    for &(parent, v) in &search.nodes[1..] {
        tree.add_child(parent)?;
        value_of.push(v);
    }
    Ok(Witness { tree, value_of })
}

fn witness_from_tree(tree: RootedTree) -> SolveOutcome {
    let value_of = tree.sizes();
    SolveOutcome::Tree(Witness { tree, value_of })
}

/// Checks every witness invariant against the instance: value multiset,
/// the parent recurrence, arity, depth synchronization, and subclass.
pub fn verify_witness(witness: &Witness, instance: &SizeInstance) -> bool {
    let tree = &witness.tree;
    if tree.validate().is_err() || tree.k() > instance.k {
        return false;
    }
    if witness.value_of.len() != tree.len() {
        return false;
    }
    // assigned values must satisfy the subtree-size recurrence, which
    // makes them equal to the computed sizes
    if witness.value_of != tree.sizes() {
        return false;
    }
    if multiset(witness.value_of.clone()) != multiset(instance.sizes.clone()) {
        return false;
    }
    if let Some(depths) = &instance.depths {
        let want: Vec<(u64, u64)> =
            multiset(instance.sizes.iter().copied().zip(depths.iter().copied()).collect());
        let got: Vec<(u64, u64)> =
            multiset(tree.sizes().into_iter().zip(tree.depths()).collect());
        if want != got {
            return false;
        }
    }
    match instance.subclass {
        Subclass::Any => true,
        Subclass::Full => {
            tree.nodes()
                .iter()
                .all(|nd| nd.children.is_empty() || nd.children.len() == instance.k)
        }
        Subclass::Degenerate => tree.is_path(),
        Subclass::Complete => {
            tree.canonical_code() == RootedTree::complete(tree.len(), instance.k).canonical_code()
        }
    }
}
