//! The three-stage reduction chain NMTS -> NMTS-K -> K-PwT -> subtree-size
//! realizability, with the full-tree variant, depth/height annotations,
//! certificate verifiers, partition extraction from witness trees, and
//! small brute-force reference solvers.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::solver::Witness;
use crate::tree::RootedTree;
use crate::{Error, Result};

/// Numerical Matching with Target Sums: pair one element of X with one
/// of Y to hit each target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NmtsInstance {
    pub x: Vec<u64>,
    pub y: Vec<u64>,
    pub b: Vec<u64>,
}

/// NMTS generalized to one element from each of K sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NmtsKInstance {
    pub k: usize,
    pub sets: Vec<Vec<u64>>,
    pub b: Vec<u64>,
}

/// Partition a Km-element multiset into m K-sets hitting per-set targets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KPwTInstance {
    pub k: usize,
    pub sizes: Vec<u64>,
    pub b: Vec<u64>,
}

/// Constants derived while generating a size instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionParams {
    /// Largest integer in the source K-PwT instance.
    pub m1: u64,
    /// K * m * m1.
    pub m2: u64,
    /// Smallest power of K that is >= m2.
    pub big_m: u64,
    /// ceil(log_K(K * m)): depth of the C component in the target tree.
    pub d: u32,
    /// K^d - K*m filler elements in C.
    pub m_prime: u64,
    /// K^(d-1) - m filler elements in P; m_prime = K * m_dprime.
    pub m_dprime: u64,
    /// sum over i of M^i from the K-PwT stage, when the instance came
    /// through the full chain.
    pub sigma: Option<u64>,
}

fn pow_u64(base: u64, exp: u32) -> u64 {
    base.checked_pow(exp).expect("reduction constant overflow")
}

/// Smallest e with base^e >= x (x >= 1).
fn ceil_log(base: u64, x: u64) -> u32 {
    let mut e = 0;
    let mut p = 1u64;
    while p < x {
        p = p.checked_mul(base).expect("reduction constant overflow");
        e += 1;
    }
    e
}

impl ReductionParams {
    pub fn for_kpwt(inst: &KPwTInstance, sigma: Option<u64>) -> Self {
        let k = inst.k as u64;
        let m = inst.b.len() as u64;
        let m1 = inst
            .sizes
            .iter()
            .chain(inst.b.iter())
            .copied()
            .max()
            .expect("nonempty instance");
        let m2 = k * m * m1;
        let big_m = pow_u64(k, ceil_log(k, m2));
        let d = ceil_log(k, k * m);
        let m_prime = pow_u64(k, d) - k * m;
        let m_dprime = pow_u64(k, d - 1) - m;
        ReductionParams {
            m1,
            m2,
            big_m,
            d,
            m_prime,
            m_dprime,
            sigma,
        }
    }

    /// Closed-form bound on the largest generated integer, polynomial in
    /// the source instance's magnitude and length (pseudo-polynomial
    /// transformation condition). Covers both variants.
    pub fn max_value_bound(&self, k: usize, m: usize) -> u128 {
        let k = k as u128;
        let m = m as u128;
        let kd1 = (0..self.d.saturating_sub(1)).fold(1u128, |a, _| a * k); // K^(d-1)
        let plain = m * self.m1 as u128 + kd1 * (k * self.big_m as u128 + 2);
        k * plain + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Plain,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Annotate {
    None,
    Depth,
    Height,
    Both,
}

impl Annotate {
    pub fn wants_depth(self) -> bool {
        matches!(self, Annotate::Depth | Annotate::Both)
    }
    pub fn wants_height(self) -> bool {
        matches!(self, Annotate::Height | Annotate::Both)
    }
}

/// How each element of the generated size multiset relates to the source
/// K-PwT instance. Values are post-mapping for the full variant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub kpwt: KPwTInstance,
    pub variant: Variant,
    pub params: ReductionParams,
    /// Generated value for kpwt.sizes[i] (the C' part).
    pub c_values: Vec<u64>,
    /// C'' filler values.
    pub c_filler: Vec<u64>,
    /// Generated value for kpwt.b[j] (the P' part).
    pub p_values: Vec<u64>,
    /// P'' filler values.
    pub p_filler: Vec<u64>,
    /// Grandparent levels l_0..l_{d-2}, l_0 first.
    pub g_levels: Vec<Vec<u64>>,
}

/// A subtree-size multiset, optionally annotated and carrying reduction
/// provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EisInstance {
    pub k: usize,
    pub values: Vec<u64>,
    pub depths: Option<Vec<u64>>,
    pub heights: Option<Vec<u64>>,
    pub provenance: Option<Provenance>,
}

/// Certificate for NMTS / NMTS-K: `groups[j]` holds flat element indices
/// summing to target j (X then Y for NMTS; set-major for NMTS-K).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    pub groups: Vec<Vec<usize>>,
}

/// Certificate for K-PwT: `groups[j]` holds K indices into `sizes`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub groups: Vec<Vec<usize>>,
}

fn validate_nmts(inst: &NmtsInstance) -> Result<()> {
    let m = inst.b.len();
    if m == 0 || inst.x.len() != m || inst.y.len() != m {
        return Err(Error::InvalidInput(
            "NMTS requires |X| = |Y| = |B| >= 1".into(),
        ));
    }
    if inst.x.iter().chain(&inst.y).chain(&inst.b).any(|&v| v == 0) {
        return Err(Error::InvalidInput("NMTS entries must be positive".into()));
    }
    Ok(())
}

fn validate_nmtsk(inst: &NmtsKInstance) -> Result<()> {
    let m = inst.b.len();
    if m == 0 || inst.k < 2 || inst.sets.len() != inst.k {
        return Err(Error::InvalidInput(
            "NMTS-K requires K >= 2 sets and a nonempty target vector".into(),
        ));
    }
    if inst.sets.iter().any(|s| s.len() != m) {
        return Err(Error::InvalidInput("every set must have m elements".into()));
    }
    Ok(())
}

fn validate_kpwt(inst: &KPwTInstance) -> Result<()> {
    let m = inst.b.len();
    if m == 0 || inst.k < 2 || inst.sizes.len() != inst.k * m {
        return Err(Error::InvalidInput(
            "K-PwT requires |sizes| = K * m with K >= 2, m >= 1".into(),
        ));
    }
    Ok(())
}

/// NMTS -> NMTS-K. Identity embedding for K = 2; for K >= 3 the extra
/// sets are filled with unit elements and the targets grow by K - 2.
pub fn nmts_to_nmtsk(src: &NmtsInstance, k: usize) -> Result<NmtsKInstance> {
    validate_nmts(src)?;
    if k < 2 {
        return Err(Error::InvalidInput("K must be at least 2".into()));
    }
    let m = src.b.len();
    let mut sets = vec![src.x.clone(), src.y.clone()];
    for _ in 2..k {
        sets.push(vec![1u64; m]);
    }
    let b = if k == 2 {
        src.b.clone()
    } else {
        src.b.iter().map(|&b| b + (k as u64 - 2)).collect()
    };
    Ok(NmtsKInstance { k, sets, b })
}

/// NMTS-K -> K-PwT. The element of set i gains M^i; every target gains
/// sigma = sum of M^i, with M = K * m * max(sizes, targets).
pub fn nmtsk_to_kpwt(src: &NmtsKInstance) -> Result<(KPwTInstance, ReductionParams)> {
    validate_nmtsk(src)?;
    let k = src.k;
    let m_max = src
        .sets
        .iter()
        .flatten()
        .chain(src.b.iter())
        .copied()
        .max()
        .unwrap();
    let m_base = (k as u64) * (src.b.len() as u64) * m_max;
    let mut sizes = Vec::with_capacity(k * src.b.len());
    let mut sigma = 0u64;
    for (i, set) in src.sets.iter().enumerate() {
        let offset = pow_u64(m_base, i as u32 + 1);
        sigma = sigma
            .checked_add(offset)
            .ok_or_else(|| Error::TooLarge("K-PwT offsets overflow".into()))?;
        for &s in set {
            sizes.push(s + offset);
        }
    }
    let b = src.b.iter().map(|&b| b + sigma).collect();
    let kpwt = KPwTInstance { k, sizes, b };
    let params = ReductionParams::for_kpwt(&kpwt, Some(sigma));
    Ok((kpwt, params))
}

fn full_map(v: u64, k: u64) -> u64 {
    k * v + 1
}

/// K-PwT -> subtree-size realizability. Generates the four component
/// sequences C, P, G, D; the full variant maps every C/P/G value
/// v -> K*v + 1 and rebuilds D on the mapped C values. `seed` randomizes
/// the grandparent block order (sorted descending when absent).
pub fn kpwt_to_eis(
    src: &KPwTInstance,
    variant: Variant,
    annotate: Annotate,
    seed: Option<u64>,
) -> Result<EisInstance> {
    kpwt_to_eis_with_params(src, ReductionParams::for_kpwt(src, None), variant, annotate, seed)
}

fn kpwt_to_eis_with_params(
    src: &KPwTInstance,
    params: ReductionParams,
    variant: Variant,
    annotate: Annotate,
    seed: Option<u64>,
) -> Result<EisInstance> {
    validate_kpwt(src)?;
    let k = src.k as u64;
    let big_m = params.big_m;
    let d = params.d;

    let mut c_values: Vec<u64> = src.sizes.iter().map(|&s| s + big_m).collect();
    let mut c_filler: Vec<u64> = vec![big_m; params.m_prime as usize];
    let mut p_values: Vec<u64> = src.b.iter().map(|&b| b + k * big_m + 1).collect();
    let mut p_filler: Vec<u64> = vec![k * big_m + 1; params.m_dprime as usize];

    // grandparent levels built bottom-up from P; blocks of K over a
    // deterministic (or seeded) order
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    let mut level_input: Vec<u64> = p_values.iter().chain(&p_filler).copied().collect();
    let mut g_levels_rev: Vec<Vec<u64>> = Vec::new(); // l_{d-2} first
    while level_input.len() > 1 {
        match rng.as_mut() {
            Some(rng) => level_input.shuffle(rng),
            None => level_input.sort_unstable_by(|a, b| b.cmp(a)),
        }
        let next: Vec<u64> = level_input
            .chunks(src.k)
            .map(|block| 1 + block.iter().sum::<u64>())
            .collect();
        g_levels_rev.push(std::mem::replace(&mut level_input, next));
    }
    // level_input is now l_0's single element (or the lone P element when d = 1)
    let mut g_levels: Vec<Vec<u64>> = Vec::new();
    if d >= 2 {
        // collapse inputs ran [P, l_{d-2}, ..., l_1]; the G levels are
        // those inputs minus P, plus the final single element l_0
        g_levels.push(level_input.clone());
        for lvl in g_levels_rev.iter().skip(1).rev() {
            g_levels.push(lvl.clone());
        }
    }

    if variant == Variant::Full {
        for v in c_values
            .iter_mut()
            .chain(&mut c_filler)
            .chain(&mut p_values)
            .chain(&mut p_filler)
            .chain(g_levels.iter_mut().flatten())
        {
            *v = full_map(*v, k);
        }
    }

    // descendant component: complete trees on each c, root value excluded
    // (C already carries the root)
    let wants_depth = annotate.wants_depth();
    let wants_height = annotate.wants_height();
    let mut values = Vec::new();
    let mut depths: Vec<u64> = Vec::new();
    let mut heights: Vec<u64> = Vec::new();

    // the heights of all C elements are equal by construction; computed
    // from the built trees and checked below
    let mut c_height: Option<u64> = None;

    let push = |v: u64, dep: u64, hei: u64, values: &mut Vec<u64>, depths: &mut Vec<u64>, heights: &mut Vec<u64>| {
        values.push(v);
        if wants_depth {
            depths.push(dep);
        }
        if wants_height {
            heights.push(hei);
        }
    };

    let mut d_parts: Vec<(Vec<u64>, Vec<u64>, Vec<u64>)> = Vec::new();
    for &c in c_values.iter().chain(&c_filler) {
        let tree = RootedTree::complete(c as usize, src.k);
        let sizes = tree.sizes();
        let tree_heights = tree.heights();
        let tree_depths = tree.depths();
        let h = tree_heights[tree.root()];
        if let Some(prev) = c_height {
            if prev != h {
                return Err(Error::InvalidInput(format!(
                    "C heights differ ({prev} vs {h}); source magnitudes break the reduction"
                )));
            }
        } else {
            c_height = Some(h);
        }
        let mut part = (Vec::new(), Vec::new(), Vec::new());
        for u in 0..tree.len() {
            if u == tree.root() {
                continue;
            }
            part.0.push(sizes[u]);
            part.1.push(d as u64 + tree_depths[u]);
            part.2.push(tree_heights[u]);
        }
        d_parts.push(part);
    }
    let c_height = c_height.expect("C is nonempty");

    // emit: G (l_0 first), P, C, D
    for (i, level) in g_levels.iter().enumerate() {
        let dep = i as u64;
        let hei = c_height + 1 + (d as u64 - 1 - i as u64);
        for &v in level {
            push(v, dep, hei, &mut values, &mut depths, &mut heights);
        }
    }
    for &p in p_values.iter().chain(&p_filler) {
        push(p, d as u64 - 1, c_height + 1, &mut values, &mut depths, &mut heights);
    }
    for &c in c_values.iter().chain(&c_filler) {
        push(c, d as u64, c_height, &mut values, &mut depths, &mut heights);
    }
    for (vs, ds, hs) in &d_parts {
        for ((&v, &dep), &hei) in vs.iter().zip(ds).zip(hs) {
            push(v, dep, hei, &mut values, &mut depths, &mut heights);
        }
    }

    Ok(EisInstance {
        k: src.k,
        values,
        depths: wants_depth.then_some(depths),
        heights: wants_height.then_some(heights),
        provenance: Some(Provenance {
            kpwt: src.clone(),
            variant,
            params,
            c_values,
            c_filler,
            p_values,
            p_filler,
            g_levels,
        }),
    })
}

/// NMTS-K -> size instance, carrying sigma into the recorded parameters.
pub fn nmtsk_to_eis(
    src: &NmtsKInstance,
    variant: Variant,
    annotate: Annotate,
    seed: Option<u64>,
) -> Result<EisInstance> {
    let (kpwt, params) = nmtsk_to_kpwt(src)?;
    kpwt_to_eis_with_params(&kpwt, params, variant, annotate, seed)
}

/// Runs the whole chain NMTS -> ... -> size instance, carrying sigma
/// from the K-PwT stage into the recorded parameters.
pub fn nmts_to_eis(
    src: &NmtsInstance,
    k: usize,
    variant: Variant,
    annotate: Annotate,
    seed: Option<u64>,
) -> Result<EisInstance> {
    let nmtsk = nmts_to_nmtsk(src, k)?;
    let (kpwt, params) = nmtsk_to_kpwt(&nmtsk)?;
    kpwt_to_eis_with_params(&kpwt, params, variant, annotate, seed)
}

fn groups_cover(groups: &[Vec<usize>], total: usize) -> bool {
    let mut seen = vec![false; total];
    for g in groups {
        for &i in g {
            if i >= total || seen[i] {
                return false;
            }
            seen[i] = true;
        }
    }
    seen.into_iter().all(|s| s)
}

/// Checks an NMTS matching: disjoint, covering, one element from each of
/// X and Y per group, sums hitting the targets. Flat indices: X then Y.
pub fn verify_nmts_matching(inst: &NmtsInstance, cert: &Matching) -> bool {
    let m = inst.b.len();
    if cert.groups.len() != m || !groups_cover(&cert.groups, 2 * m) {
        return false;
    }
    let value = |i: usize| if i < m { inst.x[i] } else { inst.y[i - m] };
    cert.groups.iter().zip(&inst.b).all(|(g, &target)| {
        g.len() == 2
            && g.iter().filter(|&&i| i < m).count() == 1
            && g.iter().map(|&i| value(i)).sum::<u64>() == target
    })
}

/// Checks an NMTS-K matching: exactly one element per set per group,
/// sums hitting the targets. Flat indices are set-major.
pub fn verify_nmtsk_matching(inst: &NmtsKInstance, cert: &Matching) -> bool {
    let m = inst.b.len();
    if cert.groups.len() != m || !groups_cover(&cert.groups, inst.k * m) {
        return false;
    }
    cert.groups.iter().zip(&inst.b).all(|(g, &target)| {
        g.len() == inst.k
            && (0..inst.k).all(|set| g.iter().filter(|&&i| i / m == set).count() == 1)
            && g.iter().map(|&i| inst.sets[i / m][i % m]).sum::<u64>() == target
    })
}

/// Checks a K-PwT partition: disjoint K-sets covering all indices with
/// correct sums.
pub fn verify_partition(inst: &KPwTInstance, cert: &Partition) -> bool {
    let m = inst.b.len();
    if cert.groups.len() != m || !groups_cover(&cert.groups, inst.sizes.len()) {
        return false;
    }
    cert.groups.iter().zip(&inst.b).all(|(g, &target)| {
        g.len() == inst.k && g.iter().map(|&i| inst.sizes[i]).sum::<u64>() == target
    })
}

/// Reads a K-PwT partition off a witness tree for a generated instance:
/// the children of each P' node are the C' values of one group.
pub fn extract_partition(witness: &Witness, inst: &EisInstance) -> Result<Partition> {
    let prov = inst
        .provenance
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("instance carries no provenance".into()))?;
    let tree = &witness.tree;
    if witness.value_of.len() != tree.len() {
        return Err(Error::MalformedWitness("value assignment length mismatch".into()));
    }

    let mut used_node = vec![false; tree.len()];
    let mut used_source = vec![false; prov.kpwt.sizes.len()];
    let mut groups = Vec::with_capacity(prov.p_values.len());
    for &p in &prov.p_values {
        let node = (0..tree.len())
            .find(|&u| !used_node[u] && witness.value_of[u] == p)
            .ok_or_else(|| {
                Error::MalformedWitness(format!("no unused node carries the P' value {p}"))
            })?;
        used_node[node] = true;
        let mut group = Vec::new();
        for &child in &tree.node(node).children {
            let v = witness.value_of[child];
            let source = (0..prov.kpwt.sizes.len())
                .find(|&i| !used_source[i] && prov.c_values[i] == v)
                .ok_or_else(|| {
                    Error::MalformedWitness(format!(
                        "child value {v} of a P' node is not an available C' value"
                    ))
                })?;
            used_source[source] = true;
            group.push(source);
        }
        groups.push(group);
    }
    Ok(Partition { groups })
}

const BRUTE_LIMIT: usize = 12;

/// Exhaustive NMTS reference solver (m * 2 <= 12).
pub fn brute_nmts(inst: &NmtsInstance) -> Result<Option<Matching>> {
    validate_nmts(inst)?;
    let m = inst.b.len();
    if 2 * m > BRUTE_LIMIT {
        return Err(Error::TooLarge("brute-force NMTS limited to 2m <= 12".into()));
    }
    let as_k = NmtsKInstance {
        k: 2,
        sets: vec![inst.x.clone(), inst.y.clone()],
        b: inst.b.clone(),
    };
    brute_nmtsk(&as_k)
}

/// Exhaustive NMTS-K reference solver (K * m <= 12).
pub fn brute_nmtsk(inst: &NmtsKInstance) -> Result<Option<Matching>> {
    validate_nmtsk(inst)?;
    let m = inst.b.len();
    if inst.k * m > BRUTE_LIMIT {
        return Err(Error::TooLarge("brute-force NMTS-K limited to Km <= 12".into()));
    }
    let mut used = vec![vec![false; m]; inst.k];
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); m];
    if assign_target(inst, 0, 0, 0, &mut used, &mut groups) {
        Ok(Some(Matching { groups }))
    } else {
        Ok(None)
    }
}

fn assign_target(
    inst: &NmtsKInstance,
    target: usize,
    set: usize,
    sum: u64,
    used: &mut [Vec<bool>],
    groups: &mut [Vec<usize>],
) -> bool {
    let m = inst.b.len();
    if set == inst.k {
        if sum != inst.b[target] {
            return false;
        }
        return target + 1 == m || assign_target(inst, target + 1, 0, 0, used, groups);
    }
    for pos in 0..m {
        if used[set][pos] {
            continue;
        }
        let v = inst.sets[set][pos];
        if sum + v > inst.b[target] {
            continue;
        }
        used[set][pos] = true;
        groups[target].push(set * m + pos);
        if assign_target(inst, target, set + 1, sum + v, used, groups) {
            return true;
        }
        groups[target].pop();
        used[set][pos] = false;
    }
    false
}

/// Exhaustive K-PwT reference solver (K * m <= 12).
pub fn brute_kpwt(inst: &KPwTInstance) -> Result<Option<Partition>> {
    validate_kpwt(inst)?;
    if inst.sizes.len() > BRUTE_LIMIT {
        return Err(Error::TooLarge("brute-force K-PwT limited to Km <= 12".into()));
    }
    let mut used = vec![false; inst.sizes.len()];
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); inst.b.len()];
    if fill_group(inst, 0, 0, 0, 0, &mut used, &mut groups) {
        Ok(Some(Partition { groups }))
    } else {
        Ok(None)
    }
}

fn fill_group(
    inst: &KPwTInstance,
    target: usize,
    taken: usize,
    min_idx: usize,
    sum: u64,
    used: &mut [bool],
    groups: &mut [Vec<usize>],
) -> bool {
    if taken == inst.k {
        if sum != inst.b[target] {
            return false;
        }
        return target + 1 == inst.b.len()
            || fill_group(inst, target + 1, 0, 0, 0, used, groups);
    }
    // indices increase within a group, killing the K! orderings; groups
    // themselves are pinned to their (possibly distinct) targets
    for i in min_idx..inst.sizes.len() {
        if used[i] || sum + inst.sizes[i] > inst.b[target] {
            continue;
        }
        used[i] = true;
        groups[target].push(i);
        if fill_group(inst, target, taken + 1, i + 1, sum + inst.sizes[i], used, groups) {
            return true;
        }
        groups[target].pop();
        used[i] = false;
    }
    false
}

impl EisInstance {
    /// Structural identities every generated instance must satisfy:
    /// cardinality equals the maximum element, component cardinalities
    /// are the right powers of K, the largest value respects the
    /// polynomial bound, and full-variant descendant trees are full.
    pub fn check_structure(&self) -> Result<()> {
        let prov = self
            .provenance
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("no provenance to check".into()))?;
        let k = self.k as u64;
        let max = *self.values.iter().max().unwrap();
        if self.values.len() as u64 != max {
            return Err(Error::InvalidInput(format!(
                "|S| = {} but max element = {max}",
                self.values.len()
            )));
        }
        let c_card = (prov.c_values.len() + prov.c_filler.len()) as u64;
        if c_card != pow_u64(k, prov.params.d) {
            return Err(Error::InvalidInput(format!("|C| = {c_card} is not K^d")));
        }
        let p_card = (prov.p_values.len() + prov.p_filler.len()) as u64;
        if p_card != pow_u64(k, prov.params.d - 1) {
            return Err(Error::InvalidInput(format!("|P| = {p_card} is not K^(d-1)")));
        }
        let bound = prov.params.max_value_bound(self.k, prov.kpwt.b.len());
        if max as u128 > bound {
            return Err(Error::InvalidInput(format!(
                "max element {max} exceeds the polynomial bound {bound}"
            )));
        }
        if prov.variant == Variant::Full {
            for &c in prov.c_values.iter().chain(&prov.c_filler) {
                let tree = RootedTree::complete(c as usize, self.k);
                if !tree.is_full() {
                    return Err(Error::InvalidInput(format!(
                        "complete tree on mapped value {c} is not full"
                    )));
                }
            }
        }
        for ann in [self.depths.as_ref(), self.heights.as_ref()].into_iter().flatten() {
            if ann.len() != self.values.len() {
                return Err(Error::InvalidInput("annotation length mismatch".into()));
            }
        }
        Ok(())
    }
}
