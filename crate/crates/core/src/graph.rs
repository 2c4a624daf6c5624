//! Interval divisor graphs and the canonical reduction of anchor components.
//!
//! The divisor graph of a set joins two integers when one divides the
//! other. For an interval `[a, n]` only the component of the left endpoint
//! `a` matters to the local statistics, and that component is isomorphic
//! (anchor to anchor, by multiplication) to the component of `d` in
//! `[d, t]` for the canonical triple `(i, d, t)` returned by [`reduce`].

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::kernels::Graph;

/// Smoothness level `i >= 1`: an integer is `i`-smooth when all of its prime
/// factors are at most `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SmoothnessBound(u64);

impl SmoothnessBound {
    pub fn new(i: u64) -> Result<Self> {
        if i == 0 {
            return Err(Error::invalid("smoothness bound must be >= 1"));
        }
        Ok(SmoothnessBound(i))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn admits(self, m: u64) -> bool {
        arith::is_smooth(m, self.0)
    }
}

/// Canonical identifier `(i, d, t)` of an anchor-component class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ReductionTriple {
    pub i: u64,
    pub d: u64,
    pub t: u64,
}

impl ReductionTriple {
    /// Checks `d` is `i`-smooth and `i*d <= t < (i+1)*d`.
    pub fn new(i: u64, d: u64, t: u64) -> Result<Self> {
        let triple = ReductionTriple { i, d, t };
        if !triple.is_legal() {
            return Err(Error::invalid(format!("illegal triple {triple}")));
        }
        Ok(triple)
    }

    pub fn is_legal(&self) -> bool {
        let ReductionTriple { i, d, t } = *self;
        if i == 0 || d == 0 {
            return false;
        }
        let Some(lo) = i.checked_mul(d) else {
            return false;
        };
        let hi = (i as u128 + 1) * d as u128;
        arith::is_smooth(d, i) && lo <= t && (t as u128) < hi
    }
}

impl fmt::Display for ReductionTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.i, self.d, self.t)
    }
}

/// Largest divisor of `a` whose prime factors are all at most `i`.
pub fn largest_smooth_divisor(a: u64, i: SmoothnessBound) -> u64 {
    assert!(a >= 1);
    let mut rest = a;
    let mut d = 1;
    for p in 2..=i.get().min(a) {
        while rest % p == 0 {
            rest /= p;
            d *= p;
        }
    }
    d
}

/// Canonical triple of the anchor component of `a` in `[a, n]`.
pub fn reduce(a: u64, n: u64) -> Result<ReductionTriple> {
    if a == 0 || a > n {
        return Err(Error::invalid(format!("reduce needs 1 <= a <= n, got a={a}, n={n}")));
    }
    let i = n / a;
    let d = largest_smooth_divisor(a, SmoothnessBound(i));
    let rough = a / d;
    Ok(ReductionTriple { i, d, t: n / rough })
}

/// All `i`-smooth integers in `[lo, hi]`, ascending.
pub fn smooth_numbers_in(lo: u64, hi: u64, i: SmoothnessBound) -> Vec<u64> {
    arith::smooth_in_range(lo.max(1), hi, i.get())
}

/// Connected component of an anchor in the divisor graph of `[anchor, top]`.
///
/// `vertices` is sorted, so the anchor sits at index 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    anchor: u64,
    vertices: Vec<u64>,
}

impl Component {
    pub fn anchor(&self) -> u64 {
        self.anchor
    }

    pub fn vertices(&self) -> &[u64] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Edges `(u, v)` with `u < v` and `u | v`.
    pub fn edges(&self) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        for (k, &u) in self.vertices.iter().enumerate() {
            for &v in &self.vertices[k + 1..] {
                if v % u == 0 {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Bitset graph over local indices for the counting kernels.
    pub fn graph(&self) -> Result<Graph> {
        Graph::divisor(&self.vertices)
    }

    /// Same graph with every label multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Component {
        Component {
            anchor: self.anchor * factor,
            vertices: self.vertices.iter().map(|v| v * factor).collect(),
        }
    }
}

/// Breadth-first closure of `d` under "multiple or divisor inside `[d, t]`".
pub fn build_component(d: u64, t: u64) -> Result<Component> {
    if d == 0 || d > t {
        return Err(Error::invalid(format!("build_component needs 1 <= d <= t, got d={d}, t={t}")));
    }
    let mut seen = std::collections::HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(d);
    queue.push_back(d);
    while let Some(x) = queue.pop_front() {
        let mut m = x.saturating_add(x);
        while m <= t {
            if seen.insert(m) {
                queue.push_back(m);
            }
            m = match m.checked_add(x) {
                Some(v) => v,
                None => break,
            };
        }
        // divisors y = x / k with y >= d
        let kmax = x / d;
        for k in 2..=kmax {
            if x % k == 0 {
                let y = x / k;
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
    }
    let mut vertices: Vec<u64> = seen.into_iter().collect();
    vertices.sort_unstable();
    Ok(Component { anchor: d, vertices })
}

/// Components of the induced subgraph on `c.vertices \ {anchor}`.
pub fn remove_anchor(c: &Component) -> Vec<Component> {
    let rest = &c.vertices[1..];
    let n = rest.len();
    let mut label = vec![usize::MAX; n];
    let mut out = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        label[start] = id;
        let mut members = vec![rest[start]];
        let mut stack = vec![start];
        while let Some(a) = stack.pop() {
            for b in 0..n {
                if label[b] == usize::MAX && divides_either(rest[a], rest[b]) {
                    label[b] = id;
                    members.push(rest[b]);
                    stack.push(b);
                }
            }
        }
        members.sort_unstable();
        out.push(Component {
            anchor: members[0],
            vertices: members,
        });
    }
    out
}

fn divides_either(a: u64, b: u64) -> bool {
    a != b && (b % a == 0 || a % b == 0)
}

/// `true` iff every vertex of the component of `p*d` in `[p*d, p*t]` is a
/// multiple of `p`. In that case the component is `p` times the component
/// of `d` in `[d, t]`, and so are all its images under further powers of `p`.
pub fn obs2_applies(d: u64, t: u64, p: u64) -> Result<bool> {
    if d == 0 || d > t {
        return Err(Error::invalid(format!("obs2_applies needs 1 <= d <= t, got d={d}, t={t}")));
    }
    let (Some(pd), Some(pt)) = (p.checked_mul(d), p.checked_mul(t)) else {
        return Err(Error::invalid("obs2_applies: p*t overflows"));
    };
    Ok(build_component(pd, pt)?.vertices.iter().all(|v| v % p == 0))
}

/// Run of consecutive `t` values in the block `[i*d, (i+1)*d)` sharing one
/// anchor component: `[start, end)` where `start` is `i`-smooth and no
/// integer strictly between `start` and `end` is.
pub fn run_containing(triple: &ReductionTriple) -> (u64, u64) {
    let ReductionTriple { i, d, t } = *triple;
    let mut start = t;
    while !arith::is_smooth(start, i) {
        start -= 1;
    }
    let block_end = (i + 1) * d;
    let mut end = t + 1;
    while end < block_end && !arith::is_smooth(end, i) {
        end += 1;
    }
    (start, end)
}

/// Consecutive runs covering the block `[i*d, (i+1)*d)`.
pub fn block_runs(i: u64, d: u64) -> Vec<(u64, u64)> {
    let lo = i * d;
    let hi = (i + 1) * d;
    let starts = smooth_numbers_in(lo, hi - 1, SmoothnessBound(i));
    let mut runs = Vec::with_capacity(starts.len());
    for (k, &s) in starts.iter().enumerate() {
        let e = starts.get(k + 1).copied().unwrap_or(hi);
        runs.push((s, e));
    }
    runs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sb(i: u64) -> SmoothnessBound {
        SmoothnessBound::new(i).unwrap()
    }

    #[test]
    fn smooth_divisor_examples() {
        assert_eq!(largest_smooth_divisor(10, sb(3)), 2);
        assert_eq!(largest_smooth_divisor(7, sb(1)), 1);
        assert_eq!(largest_smooth_divisor(12, sb(3)), 12);
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce(10, 35).unwrap(), ReductionTriple { i: 3, d: 2, t: 7 });
        assert_eq!(reduce(7, 7).unwrap(), ReductionTriple { i: 1, d: 1, t: 1 });
        assert_eq!(reduce(6, 12).unwrap(), ReductionTriple { i: 2, d: 2, t: 4 });
        assert_eq!(reduce(1, 9).unwrap(), ReductionTriple { i: 9, d: 1, t: 9 });
        assert!(reduce(5, 4).is_err());
        assert!(reduce(0, 4).is_err());
    }

    #[test]
    fn reduce_10_35_component_maps_by_five() {
        let big = build_component(10, 35).unwrap();
        assert_eq!(big.vertices(), &[10, 15, 20, 30]);
        let small = build_component(2, 7).unwrap();
        assert_eq!(small.vertices(), &[2, 3, 4, 6]);
        assert_eq!(small.scaled(5), big);
    }

    #[test]
    fn component_examples() {
        let c = build_component(2, 9).unwrap();
        assert_eq!(c.vertices(), &[2, 3, 4, 6, 8, 9]);
        assert_eq!(
            c.edges(),
            vec![(2, 4), (2, 6), (2, 8), (3, 6), (3, 9), (4, 8)]
        );
        let lone = build_component(5, 9).unwrap();
        assert_eq!(lone.vertices(), &[5]);
        assert!(lone.edges().is_empty());
        let pair = build_component(2, 4).unwrap();
        assert_eq!(pair.vertices(), &[2, 4]);
        assert_eq!(pair.edges(), vec![(2, 4)]);
        assert!(build_component(5, 4).is_err());
    }

    #[test]
    fn remove_anchor_examples() {
        let pair = build_component(2, 4).unwrap();
        let parts = remove_anchor(&pair);
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].vertices(), &[4]);

        let c = build_component(2, 9).unwrap();
        let parts = remove_anchor(&c);
        let sets: Vec<&[u64]> = parts.iter().map(|p| p.vertices()).collect();
        assert_eq!(sets, vec![&[3u64, 6, 9][..], &[4, 8][..]]);

        assert!(remove_anchor(&build_component(5, 9).unwrap()).is_empty());
    }

    #[test]
    fn smooth_numbers_examples() {
        assert_eq!(smooth_numbers_in(8, 16, sb(2)), vec![8, 16]);
        assert_eq!(smooth_numbers_in(10, 20, sb(3)), vec![12, 16, 18]);
        assert!(smooth_numbers_in(2, 7, sb(1)).is_empty());
    }

    #[test]
    fn obs2_examples() {
        assert!(obs2_applies(1, 2, 2).unwrap());
        assert!(!obs2_applies(1, 3, 2).unwrap());
        assert!(obs2_applies(1, 1, 2).unwrap());
    }

    #[test]
    fn triple_legality() {
        assert!(ReductionTriple::new(1, 1, 1).is_ok());
        assert!(ReductionTriple::new(1, 2, 2).is_err());
        assert!(ReductionTriple::new(1, 1, 2).is_err());
        assert!(ReductionTriple::new(3, 2, 7).is_ok());
        assert!(ReductionTriple::new(3, 5, 15).is_err());
        assert!(ReductionTriple::new(5, 3, 17).is_ok());
        assert!(ReductionTriple::new(5, 3, 18).is_err());
    }

    #[test]
    fn runs_tile_the_block() {
        assert_eq!(block_runs(3, 4), vec![(12, 16)]);
        assert_eq!(block_runs(3, 8), vec![(24, 27), (27, 32)]);
        for t in 24..27 {
            assert_eq!(run_containing(&ReductionTriple { i: 3, d: 8, t }), (24, 27));
        }
        assert_eq!(run_containing(&ReductionTriple { i: 3, d: 8, t: 31 }), (27, 32));
    }
}
