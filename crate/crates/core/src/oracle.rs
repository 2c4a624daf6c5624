//! Ground truth by direct enumeration.
//!
//! Nothing here uses the component machinery or the branching kernels
//! except [`forward_g`] and [`check_submultiplicative`], which need `Q(k)`
//! beyond exhaustive range: subsets are enumerated outright and path covers
//! come from a plain `(subset, last vertex)` dynamic program.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::graph::reduce;
use crate::kernels::{count_independent_sets, Graph, KernelLimits};
use crate::stats::{StatCache, StatKind};

/// Size limits for exhaustive work.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleLimits {
    /// Largest interval handled by subset enumeration.
    pub max_n: u64,
    /// Largest interval handed to the path cover dynamic program.
    pub max_cover_n: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_n: 22,
            max_cover_n: 20,
        }
    }
}

/// Global quantities on `[1, n]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalCounts {
    pub n: u64,
    /// Primitive subsets, empty set included.
    pub q: BigUint,
    /// Size and number of maximum primitive subsets.
    pub max_size: usize,
    pub max_count: BigUint,
    /// Maximal primitive subsets.
    pub maximal_count: BigUint,
    /// GP-free subsets, and the size of the largest.
    pub h: BigUint,
    pub g: usize,
    /// Minimum path cover of the divisor graph, when within the guard.
    pub c: Option<usize>,
}

/// Adjacency bitmasks of the divisor graph on `vals`.
fn divisor_adjacency(vals: &[u64]) -> Vec<u64> {
    let n = vals.len();
    let mut adj = vec![0u64; n];
    for a in 0..n {
        for b in 0..n {
            if a != b && (vals[a] % vals[b] == 0 || vals[b] % vals[a] == 0) {
                adj[a] |= 1 << b;
            }
        }
    }
    adj
}

fn graph_adjacency(g: &Graph) -> Vec<u64> {
    let n = g.len();
    (0..n)
        .map(|a| (0..n).filter(|&b| g.has_edge(a, b)).fold(0u64, |m, b| m | 1 << b))
        .collect()
}

#[derive(Default)]
struct IndependentTally {
    total: u64,
    max_size: usize,
    max_count: u64,
    maximal: u64,
}

fn tally_independent(adj: &[u64]) -> IndependentTally {
    fn walk(adj: &[u64], idx: usize, chosen: u64, blocked: u64, t: &mut IndependentTally) {
        let n = adj.len();
        if idx == n {
            t.total += 1;
            let size = chosen.count_ones() as usize;
            if size > t.max_size {
                t.max_size = size;
                t.max_count = 0;
            }
            if size == t.max_size {
                t.max_count += 1;
            }
            let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            if all & !chosen & !blocked == 0 {
                t.maximal += 1;
            }
            return;
        }
        walk(adj, idx + 1, chosen, blocked, t);
        if blocked >> idx & 1 == 0 {
            walk(adj, idx + 1, chosen | 1 << idx, blocked | adj[idx], t);
        }
    }
    let mut t = IndependentTally::default();
    walk(adj, 0, 0, 0, &mut t);
    t
}

/// Triples `(a, ar, ar^2)` inside sorted `vals`, as bitmasks grouped by the
/// index of their largest element.
fn gp_masks(vals: &[u64]) -> Vec<Vec<u64>> {
    let n = vals.len();
    let mut by_top = vec![Vec::new(); n];
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if vals[b] % vals[a] == 0 && vals[b] / vals[a] >= 2 && vals[b] * vals[b] == vals[a] * vals[c] {
                    by_top[c].push(1u64 << a | 1 << b | 1 << c);
                }
            }
        }
    }
    by_top
}

fn tally_gp_free(vals: &[u64]) -> (u64, usize) {
    fn walk(by_top: &[Vec<u64>], idx: usize, chosen: u64, count: &mut u64, best: &mut usize) {
        if idx == by_top.len() {
            *count += 1;
            *best = (*best).max(chosen.count_ones() as usize);
            return;
        }
        walk(by_top, idx + 1, chosen, count, best);
        let with = chosen | 1 << idx;
        if by_top[idx].iter().all(|&m| with & m != m) {
            walk(by_top, idx + 1, with, count, best);
        }
    }
    let mut sorted = vals.to_vec();
    sorted.sort_unstable();
    let by_top = gp_masks(&sorted);
    let (mut count, mut best) = (0, 0);
    walk(&by_top, 0, 0, &mut count, &mut best);
    (count, best)
}

/// Minimum path cover by `dp[mask][v]`: fewest paths covering `mask` with
/// the last path ending at `v`.
fn path_cover_dp(adj: &[u64]) -> usize {
    let n = adj.len();
    if n == 0 {
        return 0;
    }
    let size = 1usize << n;
    let mut dp = vec![u8::MAX; size * n];
    for v in 0..n {
        dp[(1 << v) * n + v] = 1;
    }
    for mask in 1..size {
        for v in 0..n {
            let c = dp[mask * n + v];
            if c == u8::MAX {
                continue;
            }
            for u in 0..n {
                if mask >> u & 1 == 1 {
                    continue;
                }
                let cost = if adj[v] >> u & 1 == 1 { c } else { c + 1 };
                let slot = &mut dp[(mask | 1 << u) * n + u];
                if cost < *slot {
                    *slot = cost;
                }
            }
        }
    }
    let full = size - 1;
    (0..n).map(|v| dp[full * n + v]).min().unwrap() as usize
}

fn interval(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).collect()
}

/// Every global quantity on `[1, n]` by exhaustive enumeration.
pub fn brute_all(n: u64, limits: &OracleLimits) -> Result<GlobalCounts> {
    if n == 0 {
        return Err(Error::invalid("brute_all needs n >= 1"));
    }
    if n > limits.max_n || n > 63 {
        return Err(Error::budget("brute_all", format!("n = {n} exceeds oracle limit {}", limits.max_n)));
    }
    let vals = interval(1, n);
    let adj = divisor_adjacency(&vals);
    let t = tally_independent(&adj);
    let (h, g) = tally_gp_free(&vals);
    let c = (n <= limits.max_cover_n).then(|| path_cover_dp(&adj));
    Ok(GlobalCounts {
        n,
        q: t.total.into(),
        max_size: t.max_size,
        max_count: t.max_count.into(),
        maximal_count: t.maximal.into(),
        h: h.into(),
        g,
        c,
    })
}

/// The quantity that `kind` telescopes into, on the interval `[lo, hi]`
/// (empty when `lo > hi`).
pub fn interval_quantity(kind: StatKind, lo: u64, hi: u64, limits: &OracleLimits) -> Result<BigRational> {
    let vals = if lo > hi { Vec::new() } else { interval(lo, hi) };
    let len = vals.len() as u64;
    let cap = if kind == StatKind::V { limits.max_cover_n } else { limits.max_n };
    if len > cap.min(63) {
        return Err(Error::budget("oracle", format!("interval of {len} integers exceeds limit {cap}")));
    }
    let int = |x: u64| BigRational::from_integer(x.into());
    Ok(match kind {
        StatKind::R => int(tally_independent(&divisor_adjacency(&vals)).total),
        StatKind::S => int(tally_independent(&divisor_adjacency(&vals)).max_count),
        StatKind::W => int(tally_independent(&divisor_adjacency(&vals)).maximal),
        StatKind::H => int(tally_gp_free(&vals).0),
        StatKind::G => int(tally_gp_free(&vals).1 as u64),
        StatKind::V => int(path_cover_dp(&divisor_adjacency(&vals)) as u64),
    })
}

/// Enumerated and local values at one `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TelescopeCheck {
    pub k: u64,
    pub expected: String,
    pub got: String,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TelescopeReport {
    pub kind: StatKind,
    pub n: u64,
    /// Enumerated global quantity on `[1, n]`.
    pub global: String,
    /// Product or sum of `stat(kind, reduce(k, n))` over `k`.
    pub telescoped: String,
    pub checks: Vec<TelescopeCheck>,
}

impl TelescopeReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.ok) && self.global == self.telescoped
    }

    pub fn first_mismatch(&self) -> Option<&TelescopeCheck> {
        self.checks.iter().find(|c| !c.ok)
    }
}

/// Compares, for every `k <= n`, the enumerated ratio (or difference) of
/// the global quantity on `[k, n]` and `[k + 1, n]` with
/// `stat(kind, reduce(k, n))`, and the telescoped total with the global one.
pub fn verify_telescoping(kind: StatKind, n: u64, cache: &StatCache, limits: &OracleLimits) -> Result<TelescopeReport> {
    if n == 0 {
        return Err(Error::invalid("verify_telescoping needs n >= 1"));
    }
    let mut values = Vec::with_capacity(n as usize + 2);
    for k in 1..=n + 1 {
        values.push(interval_quantity(kind, k, n, limits)?);
    }
    let mut total = if kind.is_ratio() { BigRational::one() } else { BigRational::zero() };
    let mut checks = Vec::with_capacity(n as usize);
    for k in 1..=n {
        let here = &values[(k - 1) as usize];
        let next = &values[k as usize];
        let expected = if kind.is_ratio() { here / next } else { here - next };
        let tr = reduce(k, n)?;
        let got = cache.stat(kind, tr.d, tr.t)?.value;
        checks.push(TelescopeCheck {
            k,
            expected: expected.to_string(),
            got: got.to_string(),
            ok: got == expected,
        });
        if kind.is_ratio() {
            total *= got;
        } else {
            total += got;
        }
    }
    Ok(TelescopeReport {
        kind,
        n,
        global: values[0].to_string(),
        telescoped: total.to_string(),
        checks,
    })
}

/// `Q(n)` via the independent-set kernel: sets containing 1 are just `{1}`.
pub fn primitive_count(n: u64, limits: &KernelLimits) -> Result<BigUint> {
    if n == 0 {
        return Ok(BigUint::one());
    }
    let g = Graph::divisor(&interval(2, n))?;
    Ok(count_independent_sets(&g, limits)?.into_inner() + 1u32)
}

/// `g(k) = Q(k) / Q(k - 1) - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForwardG {
    pub k: u64,
    pub value: BigRational,
}

pub fn forward_g(k: u64, limits: &KernelLimits) -> Result<ForwardG> {
    if k == 0 {
        return Err(Error::invalid("forward_g needs k >= 1"));
    }
    let value = if k == 1 {
        BigRational::one()
    } else {
        let a = primitive_count(k, limits)?;
        let b = primitive_count(k - 1, limits)?;
        BigRational::new(a.into(), b.into()) - BigRational::one()
    };
    Ok(ForwardG { k, value })
}

/// A violation of `g(nm) <= g(n) g(m)` (coprime `n`, `m`) or of
/// `g(p^(e+1)) <= g(p^e)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Counterexample {
    Coprime { n: u64, m: u64, lhs: String, rhs: String },
    PrimePower { p: u64, e: u32, lhs: String, rhs: String },
}

/// Checks the submultiplicativity conjecture for all arguments up to `limit`.
pub fn check_submultiplicative(limit: u64, limits: &KernelLimits) -> Result<Vec<Counterexample>> {
    let mut q = vec![BigUint::one()];
    for k in 1..=limit {
        q.push(primitive_count(k, limits)?);
    }
    let g = |k: u64| -> BigRational {
        if k == 1 {
            BigRational::one()
        } else {
            BigRational::new(q[k as usize].clone().into(), q[k as usize - 1].clone().into()) - BigRational::one()
        }
    };
    let mut out = Vec::new();
    for n in 2..=limit {
        for m in n + 1..=limit / n {
            if arith::gcd_u128(n as u128, m as u128) != 1 {
                continue;
            }
            let (lhs, rhs) = (g(n * m), g(n) * g(m));
            if lhs > rhs {
                out.push(Counterexample::Coprime {
                    n,
                    m,
                    lhs: lhs.to_string(),
                    rhs: rhs.to_string(),
                });
            }
        }
    }
    for p in arith::primes_upto(limit) {
        let mut e = 1u32;
        while let Some(next) = p.checked_pow(e + 1).filter(|&x| x <= limit) {
            let (lhs, rhs) = (g(next), g(p.pow(e)));
            if lhs > rhs {
                out.push(Counterexample::PrimePower {
                    p,
                    e,
                    lhs: lhs.to_string(),
                    rhs: rhs.to_string(),
                });
            }
            e += 1;
        }
    }
    Ok(out)
}

/// Exhaustive counterparts of the kernels, for graphs and vertex sets of
/// at most 20 elements.
pub mod brute {
    use super::*;

    fn guard(n: usize) {
        assert!(n <= 20, "exhaustive oracle limited to 20 vertices");
    }

    fn subsets(n: usize) -> impl Iterator<Item = u64> {
        0..1u64 << n
    }

    fn independent(adj: &[u64], s: u64) -> bool {
        (0..adj.len()).all(|v| s >> v & 1 == 0 || adj[v] & s == 0)
    }

    pub fn count_independent_sets(g: &Graph) -> BigUint {
        let adj = graph_adjacency(g);
        guard(adj.len());
        subsets(adj.len()).filter(|&s| independent(&adj, s)).count().into()
    }

    pub fn max_independent_set(g: &Graph) -> (usize, BigUint) {
        let adj = graph_adjacency(g);
        guard(adj.len());
        let mut best = (0usize, 0u64);
        for s in subsets(adj.len()).filter(|&s| independent(&adj, s)) {
            let k = s.count_ones() as usize;
            if k > best.0 {
                best = (k, 0);
            }
            if k == best.0 {
                best.1 += 1;
            }
        }
        (best.0, best.1.into())
    }

    pub fn count_maximal_independent_sets(g: &Graph) -> BigUint {
        let adj = graph_adjacency(g);
        let n = adj.len();
        guard(n);
        subsets(n)
            .filter(|&s| independent(&adj, s))
            .filter(|&s| (0..n).all(|v| s >> v & 1 == 1 || adj[v] & s != 0))
            .count()
            .into()
    }

    fn gp_free_sets(vals: &[u64]) -> impl Iterator<Item = u64> + '_ {
        let mut masks = Vec::new();
        for &a in vals {
            for &b in vals {
                for &c in vals {
                    if a < b && b < c && b % a == 0 && b * b == a * c {
                        let bit = |x: u64| 1u64 << vals.iter().position(|&v| v == x).unwrap();
                        masks.push(bit(a) | bit(b) | bit(c));
                    }
                }
            }
        }
        subsets(vals.len()).filter(move |&s| masks.iter().all(|&m| s & m != m))
    }

    pub fn gp_free_count(vals: &[u64]) -> BigUint {
        guard(vals.len());
        gp_free_sets(vals).count().into()
    }

    pub fn gp_free_max(vals: &[u64]) -> usize {
        guard(vals.len());
        gp_free_sets(vals).map(|s| s.count_ones() as usize).max().unwrap_or(0)
    }

    pub fn min_path_cover(g: &Graph) -> usize {
        let adj = graph_adjacency(g);
        guard(adj.len());
        path_cover_dp(&adj)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lim() -> OracleLimits {
        OracleLimits::default()
    }

    #[test]
    fn brute_examples() {
        assert_eq!(brute_all(3, &lim()).unwrap().q, BigUint::from(5u32));
        assert_eq!(brute_all(7, &lim()).unwrap().c, Some(2));
        let four = brute_all(4, &lim()).unwrap();
        assert_eq!((four.max_size, four.max_count.clone()), (2, BigUint::from(2u32)));
        assert_eq!(four.maximal_count, BigUint::from(3u32));
        assert!(brute_all(23, &lim()).unwrap_err().is_budget());
    }

    #[test]
    fn nine_has_small_maximal_set() {
        // {2,3,5,7} is maximal in [1,9] yet the maximum size is 5
        let vals = interval(1, 9);
        let adj = divisor_adjacency(&vals);
        let s: u64 = [2u64, 3, 5, 7].iter().fold(0, |m, &v| m | 1 << (v - 1));
        assert!((0..9).all(|v| s >> v & 1 == 0 || adj[v] & s == 0));
        assert!((0..9).all(|v| s >> v & 1 == 1 || adj[v] & s != 0));
        assert_eq!(brute_all(9, &lim()).unwrap().max_size, 5);
    }

    #[test]
    fn telescoping_examples() {
        let cache = StatCache::default();
        let r = verify_telescoping(StatKind::R, 9, &cache, &lim()).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.global, brute_all(9, &lim()).unwrap().q.to_string());
        let v = verify_telescoping(StatKind::V, 7, &cache, &lim()).unwrap();
        assert!(v.passed());
        assert_eq!(v.global, "2");
        let w = verify_telescoping(StatKind::W, 4, &cache, &lim()).unwrap();
        assert!(w.passed());
        assert_eq!(w.global, "3");
    }

    #[test]
    fn forward_g_examples() {
        let l = KernelLimits::default();
        let q = |n, d| BigRational::new(BigInt::from(n), BigInt::from(d));
        use num_bigint::BigInt;
        assert_eq!(forward_g(2, &l).unwrap().value, q(1, 2));
        assert_eq!(forward_g(3, &l).unwrap().value, q(2, 3));
        assert_eq!(forward_g(4, &l).unwrap().value, q(2, 5));
        assert_eq!(forward_g(5, &l).unwrap().value, q(6, 7));
        assert_eq!(forward_g(1, &l).unwrap().value, q(1, 1));
    }

    #[test]
    fn conjecture_small() {
        assert!(check_submultiplicative(30, &KernelLimits::default()).unwrap().is_empty());
    }
}
