use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{bits, Bits, ExactCount, Graph, KernelLimits};
use crate::error::Result;

/// Independence number and the number of independent sets of that size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxISResult {
    pub size: usize,
    pub count: BigUint,
}

/// Number of independent vertex sets, the empty set included.
pub fn count_independent_sets(g: &Graph, limits: &KernelLimits) -> Result<ExactCount> {
    limits.check("count_independent_sets", g.len())?;
    let mut memo = HashMap::new();
    Ok(ExactCount(count(g, g.all(), &mut memo)))
}

/// Independence number with the count of maximum independent sets.
pub fn max_independent_set(g: &Graph, limits: &KernelLimits) -> Result<MaxISResult> {
    limits.check("max_independent_set", g.len())?;
    let mut memo = HashMap::new();
    let (size, count) = maximum(g, g.all(), &mut memo);
    Ok(MaxISResult { size, count })
}

/// Highest-degree vertex inside `set`, smallest index on ties.
pub(crate) fn pivot(g: &Graph, set: Bits) -> (usize, u32) {
    let mut best = (usize::MAX, 0u32);
    for v in bits(set) {
        let deg = (g.neighbors(v) & set).count_ones();
        if best.0 == usize::MAX || deg > best.1 {
            best = (v, deg);
        }
    }
    best
}

fn count(g: &Graph, set: Bits, memo: &mut HashMap<Bits, BigUint>) -> BigUint {
    if set == 0 {
        return BigUint::one();
    }
    if let Some(c) = memo.get(&set) {
        return c.clone();
    }
    let comps = g.components_of(set);
    let result = if comps.len() > 1 {
        comps
            .into_iter()
            .fold(BigUint::one(), |acc, c| acc * count(g, c, memo))
    } else {
        let (v, deg) = pivot(g, set);
        if deg == 0 {
            BigUint::from(2u32)
        } else {
            let without = set & !(1 << v);
            let closed = set & !(g.neighbors(v) | 1 << v);
            count(g, without, memo) + count(g, closed, memo)
        }
    };
    memo.insert(set, result.clone());
    result
}

fn maximum(g: &Graph, set: Bits, memo: &mut HashMap<Bits, (usize, BigUint)>) -> (usize, BigUint) {
    if set == 0 {
        return (0, BigUint::one());
    }
    if let Some(c) = memo.get(&set) {
        return c.clone();
    }
    let comps = g.components_of(set);
    let result = if comps.len() > 1 {
        comps.into_iter().fold((0, BigUint::one()), |(s, c), comp| {
            let (s2, c2) = maximum(g, comp, memo);
            (s + s2, c * c2)
        })
    } else {
        let (v, deg) = pivot(g, set);
        if deg == 0 {
            (1, BigUint::one())
        } else {
            let (s_out, c_out) = maximum(g, set & !(1 << v), memo);
            let (s_in, c_in) = maximum(g, set & !(g.neighbors(v) | 1 << v), memo);
            let s_in = s_in + 1;
            match s_out.cmp(&s_in) {
                std::cmp::Ordering::Greater => (s_out, c_out),
                std::cmp::Ordering::Less => (s_in, c_in),
                std::cmp::Ordering::Equal => (s_out, c_out + c_in),
            }
        }
    };
    memo.insert(set, result.clone());
    result
}
