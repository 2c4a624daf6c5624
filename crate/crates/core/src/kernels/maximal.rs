use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{bits, Bits, ExactCount, Graph, KernelLimits};
use crate::error::Result;

/// Number of inclusion-maximal independent sets (1 for the empty graph).
///
/// Branches on an undominated vertex `y` with the fewest candidate
/// dominators: every maximal set contains some vertex of `N[y]`, and the
/// branches are made disjoint by fixing the first such vertex.
pub fn count_maximal_independent_sets(g: &Graph, limits: &KernelLimits) -> Result<ExactCount> {
    limits.check("count_maximal_independent_sets", g.len())?;
    let mut memo = HashMap::new();
    Ok(ExactCount(maximal(g, g.all(), 0, &mut memo)))
}

/// Counts independent `S` inside `avail` such that every vertex of `avail`
/// outside `S`, and every vertex of `pending`, has a neighbour in `S`.
fn maximal(
    g: &Graph,
    avail: Bits,
    pending: Bits,
    memo: &mut HashMap<(Bits, Bits), BigUint>,
) -> BigUint {
    if avail == 0 {
        return if pending == 0 { BigUint::one() } else { BigUint::zero() };
    }
    if bits(pending).any(|x| g.neighbors(x) & avail == 0) {
        return BigUint::zero();
    }
    let key = (avail, pending);
    if let Some(c) = memo.get(&key) {
        return c.clone();
    }

    let parts = split(g, avail, pending);
    let result = if parts.len() > 1 {
        let mut acc = BigUint::one();
        for (a, p) in parts {
            acc *= maximal(g, a, p, memo);
            if acc.is_zero() {
                break;
            }
        }
        acc
    } else {
        let cands = bits(avail | pending)
            .map(|y| {
                let mut c = g.neighbors(y) & avail;
                if avail >> y & 1 == 1 {
                    c |= 1 << y;
                }
                (y, c)
            })
            .min_by_key(|&(y, c)| (c.count_ones(), y))
            .map(|(_, c)| c)
            .expect("nonempty");
        let mut total = BigUint::zero();
        let mut skipped: Bits = 0;
        for u in bits(cands) {
            let closed = g.neighbors(u) | 1 << u;
            let next_avail = avail & !closed & !skipped;
            let next_pending = (pending | skipped) & !g.neighbors(u);
            total += maximal(g, next_avail, next_pending, memo);
            skipped |= 1 << u;
        }
        total
    };
    memo.insert(key, result.clone());
    result
}

/// Components of the graph on `avail ∪ pending` that keeps only edges with
/// at least one endpoint in `avail`.
fn split(g: &Graph, avail: Bits, pending: Bits) -> Vec<(Bits, Bits)> {
    let all = avail | pending;
    let mut rest = all;
    let mut out = Vec::new();
    while rest != 0 {
        let seed = rest & rest.wrapping_neg();
        let mut comp = seed;
        let mut frontier = seed;
        while frontier != 0 {
            let mut next = 0;
            for v in bits(frontier) {
                let reach = if avail >> v & 1 == 1 {
                    g.neighbors(v) & all
                } else {
                    g.neighbors(v) & avail
                };
                next |= reach;
            }
            next &= !comp;
            comp |= next;
            frontier = next;
        }
        out.push((comp & avail, comp & pending));
        rest &= !comp;
    }
    out
}
