use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{bits, pow2, Bits, ExactCount, KernelLimits};
use crate::error::{Error, Result};

/// Three-term geometric progression `(a, a*r, a*r^2)` with integral `r >= 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GpTriple(pub u64, pub u64, pub u64);

impl GpTriple {
    pub fn ratio(&self) -> u64 {
        self.1 / self.0
    }
}

/// All progressions `(a, ar, ar^2)`, `r >= 2`, lying entirely in `vertices`.
pub fn gp_triples(vertices: &[u64]) -> Vec<GpTriple> {
    let set: HashSet<u64> = vertices.iter().copied().collect();
    let Some(&top) = vertices.iter().max() else {
        return Vec::new();
    };
    let mut sorted: Vec<u64> = set.iter().copied().collect();
    sorted.sort_unstable();
    let mut out = Vec::new();
    for &a in &sorted {
        let mut r = 2u64;
        loop {
            let Some(c) = r.checked_mul(r).and_then(|r2| r2.checked_mul(a)) else {
                break;
            };
            if c > top {
                break;
            }
            if set.contains(&(a * r)) && set.contains(&c) {
                out.push(GpTriple(a, a * r, c));
            }
            r += 1;
        }
    }
    out
}

/// Largest subset of `vertices` containing no progression from [`gp_triples`].
pub fn gp_free_max(vertices: &[u64], limits: &KernelLimits) -> Result<usize> {
    let (universe, edges) = hypergraph(vertices, limits, "gp_free_max")?;
    let mut memo = HashMap::new();
    Ok(max_free(universe, edges, &mut memo).expect("the empty set is always feasible"))
}

/// Number of subsets of `vertices` (empty set included) containing no
/// progression from [`gp_triples`].
pub fn gp_free_count(vertices: &[u64], limits: &KernelLimits) -> Result<ExactCount> {
    let (universe, edges) = hypergraph(vertices, limits, "gp_free_count")?;
    let mut memo = HashMap::new();
    Ok(ExactCount(count_free(universe, edges, &mut memo)))
}

fn hypergraph(vertices: &[u64], limits: &KernelLimits, what: &'static str) -> Result<(Bits, Vec<Bits>)> {
    let mut sorted = vertices.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != vertices.len() {
        return Err(Error::invalid("vertex set has repeated elements"));
    }
    limits.check(what, sorted.len())?;
    let index: HashMap<u64, usize> = sorted.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let edges = gp_triples(&sorted)
        .into_iter()
        .map(|GpTriple(a, b, c)| (1 << index[&a]) | (1 << index[&b]) | (1 << index[&c]))
        .collect();
    Ok((super::full_mask(sorted.len()), edges))
}

/// Residual constraint system: `undecided` vertices, and hyperedges (subsets
/// of `undecided`) that must not be chosen entirely. `None` if some
/// hyperedge is already fully chosen.
fn normalize(mut undecided: Bits, mut edges: Vec<Bits>) -> Option<(Bits, Vec<Bits>)> {
    loop {
        if edges.iter().any(|&e| e == 0) {
            return None;
        }
        let forced: Bits = edges
            .iter()
            .filter(|e| e.count_ones() == 1)
            .fold(0, |acc, &e| acc | e);
        if forced == 0 {
            break;
        }
        // a singleton edge forbids its vertex; edges through it are satisfied
        undecided &= !forced;
        edges.retain(|&e| e & forced == 0);
    }
    edges.sort_unstable_by_key(|e| (e.count_ones(), *e));
    edges.dedup();
    let mut kept: Vec<Bits> = Vec::with_capacity(edges.len());
    for e in edges {
        if !kept.iter().any(|&k| k & e == k) {
            kept.push(e);
        }
    }
    kept.sort_unstable();
    Some((undecided, kept))
}

fn edge_components(core: Bits, edges: &[Bits]) -> Vec<(Bits, Vec<Bits>)> {
    let mut rest = core;
    let mut out = Vec::new();
    while rest != 0 {
        let mut comp = rest & rest.wrapping_neg();
        loop {
            let grown = edges
                .iter()
                .filter(|&&e| e & comp != 0)
                .fold(comp, |acc, &e| acc | e);
            if grown == comp {
                break;
            }
            comp = grown;
        }
        let part: Vec<Bits> = edges.iter().copied().filter(|&e| e & comp != 0).collect();
        out.push((comp, part));
        rest &= !comp;
    }
    out
}

fn branch_vertex(edges: &[Bits]) -> usize {
    let mut hits = [0u32; 128];
    for &e in edges {
        for v in bits(e) {
            hits[v] += 1;
        }
    }
    let mut best = 0;
    for v in 0..128 {
        if hits[v] > hits[best] {
            best = v;
        }
    }
    best
}

fn split_on(v: usize, undecided: Bits, edges: &[Bits]) -> ((Bits, Vec<Bits>), (Bits, Vec<Bits>)) {
    let rest = undecided & !(1 << v);
    let excluded: Vec<Bits> = edges.iter().copied().filter(|&e| e >> v & 1 == 0).collect();
    let included: Vec<Bits> = edges.iter().map(|&e| e & !(1 << v)).collect();
    ((rest, excluded), (rest, included))
}

fn count_free(undecided: Bits, edges: Vec<Bits>, memo: &mut HashMap<(Bits, Vec<Bits>), BigUint>) -> BigUint {
    let Some((undecided, edges)) = normalize(undecided, edges) else {
        return BigUint::zero();
    };
    let core = edges.iter().fold(0, |acc, &e| acc | e);
    let free = (undecided & !core).count_ones();
    let factor = pow2(free);
    if edges.is_empty() {
        return factor;
    }
    let key = (core, edges);
    if let Some(c) = memo.get(&key) {
        return c * factor;
    }
    let (core, edges) = key;
    let parts = edge_components(core, &edges);
    let inner = if parts.len() > 1 {
        parts
            .into_iter()
            .fold(BigUint::one(), |acc, (c, e)| acc * count_free(c, e, memo))
    } else {
        let v = branch_vertex(&edges);
        let ((u0, e0), (u1, e1)) = split_on(v, core, &edges);
        count_free(u0, e0, memo) + count_free(u1, e1, memo)
    };
    memo.insert((core, edges), inner.clone());
    inner * factor
}

fn max_free(undecided: Bits, edges: Vec<Bits>, memo: &mut HashMap<(Bits, Vec<Bits>), usize>) -> Option<usize> {
    let (undecided, edges) = normalize(undecided, edges)?;
    let core = edges.iter().fold(0, |acc, &e| acc | e);
    let free = (undecided & !core).count_ones() as usize;
    if edges.is_empty() {
        return Some(free);
    }
    let key = (core, edges);
    if let Some(&m) = memo.get(&key) {
        return Some(m + free);
    }
    let (core, edges) = key;
    let parts = edge_components(core, &edges);
    let inner = if parts.len() > 1 {
        parts
            .into_iter()
            .map(|(c, e)| max_free(c, e, memo).expect("subproblem of a feasible system"))
            .sum()
    } else {
        let v = branch_vertex(&edges);
        let ((u0, e0), (u1, e1)) = split_on(v, core, &edges);
        let out = max_free(u0, e0, memo);
        let inc = max_free(u1, e1, memo).map(|m| m + 1);
        out.max(inc).expect("excluding a vertex keeps feasibility")
    };
    memo.insert((core, edges), inner);
    Some(inner + free)
}
